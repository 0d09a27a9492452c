#include <cmath>
#include <cstdio>

#include "cli/commands.hpp"

namespace qtec::cli {

using nlohmann::json;

namespace {

json complex_array(std::span<const complex> v) {
  json out = json::array();
  for (const complex& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

json matrix_rows(const ComplexMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "human") return OutputFormat::Human;
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  throw Error(ErrorKind::ParseError, "unknown format '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Human: return "human";
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
  }
  return "human";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(complex z) {
  return format_double(z.real()) + (std::signbit(z.imag()) ? "" : "+") + format_double(z.imag()) + "i";
}

json to_json(const TECostResult& r) {
  return {{"cos_value", r.cos_value},
          {"angle", r.angle},
          {"optimal_v", complex_array(r.optimal_v)},
          {"witness", complex_array(r.witness.amplitudes())},
          {"converged", r.converged},
          {"regime", std::string(to_string(r.regime))},
          {"certificate_gap", r.certificate_gap},
          {"ascent_value", r.ascent_value},
          {"newton_steps", r.newton_steps},
          {"time_energy", r.time_energy}};
}

json to_json(const FidelityResult& r) {
  return {{"value", r.value},
          {"minimizer",
           {{"dim_a", r.minimizer.dim_a()},
            {"dim_b", r.minimizer.dim_b()},
            {"amplitudes", complex_array(r.minimizer.amplitudes())}}},
          {"reduced", matrix_rows(r.reduced.matrix())},
          {"optimal_w", complex_array(r.optimal_w)},
          {"iterations", r.iterations},
          {"restarts_used", r.restarts_used},
          {"converged", r.converged},
          {"gradient_norm", r.gradient_norm},
          {"possibly_zero", r.possibly_zero},
          {"best_restart", r.best_restart}};
}

json to_json(const VerifyReport& r) {
  return {{"channel", r.channel},
          {"fmin_value", r.fmin_value},
          {"cos_cost", r.cos_cost},
          {"clamped_cos", r.clamped_cos},
          {"abs_gap", r.abs_gap},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"max_min_ok", r.max_min_ok},
          {"fmin_converged", r.fmin_converged},
          {"fmin_iterations", r.fmin_iterations},
          {"fmin_restarts", r.fmin_restarts},
          {"fmin_possibly_zero", r.fmin_possibly_zero},
          {"cost_converged", r.cost_converged},
          {"cost_regime", r.cost_regime},
          {"certificate_gap", r.certificate_gap},
          {"fmin_seconds", r.fmin_seconds},
          {"cost_seconds", r.cost_seconds}};
}

json to_json(const ValidateReport& r) {
  return {{"path", r.path},
          {"valid", r.valid},
          {"n", r.n},
          {"d", r.d},
          {"completeness_residual", r.completeness_residual},
          {"choi_min_eigenvalue", r.choi_min_eigenvalue},
          {"choi_psd", r.choi_psd},
          {"message", r.message}};
}

json to_json(const SweepRow& r) {
  return {{"q", r.q},
          {"fmin_solver", r.fmin_solver},
          {"fmin_closed", r.fmin_closed},
          {"cost_solver", r.cost_solver},
          {"cost_closed", r.cost_closed},
          {"no_entanglement_fidelity", r.no_entanglement_fidelity},
          {"fmin_gap", r.fmin_gap},
          {"cost_gap", r.cost_gap},
          {"strict", r.strict}};
}

json to_json(const TeurReport& r) {
  return {{"e_max", r.e_max},       {"e_min", r.e_min}, {"time", r.time},
          {"hbar", r.hbar},         {"cost", r.cost},   {"fidelity", r.fidelity},
          {"delta_e", r.delta_e},   {"lhs", r.lhs},     {"rhs", r.rhs},
          {"bound_satisfied", r.bound_satisfied}};
}

}  // namespace qtec::cli
