#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace qtec::cli {

using nlohmann::json;

FidelityOptions RunConfig::fidelity_options() const {
  FidelityOptions o;
  o.seed = seed;
  if (restarts) o.restarts = *restarts;
  if (iters) o.max_iters = *iters;
  return o;
}

CostOptions RunConfig::cost_options() const {
  CostOptions o;
  o.seed = seed;
  o.hbar = hbar;
  if (restarts) o.restarts = *restarts;
  if (iters) o.iters = *iters;
  return o;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string vector_text(std::span<const complex> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_complex(v[i]);
  return s + "]";
}

// Key/value lines for the human format.
class Lines {
 public:
  explicit Lines(std::ostream& os) : os_(os) {}
  Lines& operator()(std::string_view key, const std::string& value) {
    os_ << std::left << std::setw(26) << (key.empty() ? std::string() : std::string(key) + ":") << value << '\n';
    return *this;
  }
  Lines& operator()(std::string_view key, double value) { return (*this)(key, format_double(value)); }

 private:
  std::ostream& os_;
};

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

json envelope(std::string_view command, const RunConfig& cfg, json result, const std::string& channel = {}) {
  json out = {{"command", command}, {"seed", cfg.seed}};
  if (!channel.empty()) out["channel"] = channel;
  out["result"] = std::move(result);
  return out;
}

// ---- validate -------------------------------------------------------------

int cmd_validate(const std::string& path, const RunConfig& cfg, std::ostream& os) {
  const ValidateReport r = validate_file(path, cfg.allow_incomplete);
  switch (cfg.format) {
    case OutputFormat::Json: os << envelope("validate", cfg, to_json(r)).dump(2) << '\n'; break;
    case OutputFormat::Csv:
      csv_row(os, {"path", "valid", "n", "d", "completeness_residual", "choi_min_eigenvalue", "choi_psd", "seed"});
      csv_row(os, {r.path, r.valid ? "1" : "0", std::to_string(r.n), std::to_string(r.d),
                   format_double(r.completeness_residual), format_double(r.choi_min_eigenvalue),
                   r.choi_psd ? "1" : "0", std::to_string(cfg.seed)});
      break;
    case OutputFormat::Human:
      Lines{os}("file", r.path)("valid", yes_no(r.valid))("n", std::to_string(r.n))("d", std::to_string(r.d))(
          "completeness_residual", r.completeness_residual)("choi_min_eigenvalue", r.choi_min_eigenvalue)(
          "choi_psd", yes_no(r.choi_psd))("seed", std::to_string(cfg.seed));
      if (!r.message.empty()) Lines{os}("message", r.message);
      break;
  }
  return r.valid ? kExitOk : kExitFailed;
}

// ---- tecost / fmin / verify ----------------------------------------------

int cmd_tecost(const RunConfig& cfg, std::ostream& os) {
  const LoadedChannel lc = load_channel(cfg);
  const TECostResult r = channel_cost(lc.channel, cfg.cost_options());
  switch (cfg.format) {
    case OutputFormat::Json: os << envelope("tecost", cfg, to_json(r), lc.descriptor).dump(2) << '\n'; break;
    case OutputFormat::Csv:
      csv_row(os, {"channel", "seed", "angle", "cos_value", "regime", "certificate_gap", "converged", "newton_steps",
                   "ascent_value", "time_energy"});
      csv_row(os, {lc.descriptor, std::to_string(cfg.seed), format_double(r.angle), format_double(r.cos_value),
                   std::string(to_string(r.regime)), format_double(r.certificate_gap), r.converged ? "1" : "0",
                   std::to_string(r.newton_steps), format_double(r.ascent_value), format_double(r.time_energy)});
      break;
    case OutputFormat::Human:
      Lines{os}("channel", lc.descriptor)("seed", std::to_string(cfg.seed))("angle", r.angle)("cos_value", r.cos_value)(
          "regime", std::string(to_string(r.regime)))("certificate_gap", r.certificate_gap)(
          "converged", yes_no(r.converged))("newton_steps", std::to_string(r.newton_steps))(
          "ascent_value", r.ascent_value)("time_energy", r.time_energy)("optimal_v", vector_text(r.optimal_v))(
          "witness", vector_text(r.witness.amplitudes()));
      break;
  }
  return kExitOk;
}

int cmd_fmin(const RunConfig& cfg, std::ostream& os) {
  const LoadedChannel lc = load_channel(cfg);
  const FidelityResult r = fmin_descent(lc.channel, cfg.fidelity_options());
  switch (cfg.format) {
    case OutputFormat::Json: os << envelope("fmin", cfg, to_json(r), lc.descriptor).dump(2) << '\n'; break;
    case OutputFormat::Csv:
      csv_row(os, {"channel", "seed", "value", "iterations", "restarts_used", "converged", "gradient_norm",
                   "possibly_zero", "best_restart"});
      csv_row(os, {lc.descriptor, std::to_string(cfg.seed), format_double(r.value), std::to_string(r.iterations),
                   std::to_string(r.restarts_used), r.converged ? "1" : "0", format_double(r.gradient_norm),
                   r.possibly_zero ? "1" : "0", std::to_string(r.best_restart)});
      break;
    case OutputFormat::Human: {
      Lines{os}("channel", lc.descriptor)("seed", std::to_string(cfg.seed))("value", r.value)(
          "minimizer", vector_text(r.minimizer.amplitudes()))("optimal_w", vector_text(r.optimal_w))(
          "iterations", std::to_string(r.iterations))("restarts_used", std::to_string(r.restarts_used))(
          "best_restart", std::to_string(r.best_restart))("converged", yes_no(r.converged))(
          "gradient_norm", r.gradient_norm)("possibly_zero", yes_no(r.possibly_zero));
      const ComplexMatrix& rho = r.reduced.matrix();
      for (std::size_t i = 0; i < rho.rows(); ++i) {
        std::vector<complex> row(rho.cols());
        for (std::size_t j = 0; j < rho.cols(); ++j) row[j] = rho(i, j);
        Lines{os}(i == 0 ? "reduced" : "", vector_text(row));
      }
      break;
    }
  }
  return kExitOk;
}

const std::vector<std::string> kVerifyColumns = {
    "channel",       "fmin_value",      "cos_cost",           "clamped_cos",    "abs_gap",     "tolerance",
    "pass",          "max_min_ok",     "fmin_converged",     "fmin_iterations", "fmin_restarts",
    "fmin_possibly_zero", "cost_converged", "cost_regime",   "certificate_gap"};

std::vector<std::string> verify_cells(const VerifyReport& r) {
  return {r.channel,
          format_double(r.fmin_value),
          format_double(r.cos_cost),
          format_double(r.clamped_cos),
          format_double(r.abs_gap),
          format_double(r.tolerance),
          r.pass ? "1" : "0",
          r.max_min_ok ? "1" : "0",
          r.fmin_converged ? "1" : "0",
          std::to_string(r.fmin_iterations),
          std::to_string(r.fmin_restarts),
          r.fmin_possibly_zero ? "1" : "0",
          r.cost_converged ? "1" : "0",
          r.cost_regime,
          format_double(r.certificate_gap)};
}

int cmd_verify(const RunConfig& cfg, std::ostream& os) {
  const LoadedChannel lc = load_channel(cfg);
  const VerifyReport r = verify_channel(lc, cfg);
  switch (cfg.format) {
    case OutputFormat::Json: os << envelope("verify", cfg, to_json(r), lc.descriptor).dump(2) << '\n'; break;
    case OutputFormat::Csv: {
      std::vector<std::string> head = kVerifyColumns, cells = verify_cells(r);
      head.insert(head.end(), {"fmin_seconds", "cost_seconds", "seed"});
      cells.insert(cells.end(), {format_double(r.fmin_seconds), format_double(r.cost_seconds), std::to_string(cfg.seed)});
      csv_row(os, head);
      csv_row(os, cells);
      break;
    }
    case OutputFormat::Human:
      Lines{os}("channel", r.channel)("seed", std::to_string(cfg.seed))("fmin", r.fmin_value)("cos_cost", r.cos_cost)(
          "clamped_cos", r.clamped_cos)("abs_gap", r.abs_gap)("tolerance", r.tolerance)("pass", yes_no(r.pass))(
          "max_min_ok", yes_no(r.max_min_ok))("fmin_converged", yes_no(r.fmin_converged))(
          "fmin_iterations", std::to_string(r.fmin_iterations))("fmin_restarts", std::to_string(r.fmin_restarts))(
          "fmin_possibly_zero", yes_no(r.fmin_possibly_zero))("cost_converged", yes_no(r.cost_converged))(
          "cost_regime", r.cost_regime)("certificate_gap", r.certificate_gap)("fmin_seconds", r.fmin_seconds)(
          "cost_seconds", r.cost_seconds);
      break;
  }
  return r.pass ? kExitOk : kExitFailed;
}

// ---- sweep-depolarizing ---------------------------------------------------

int cmd_sweep(std::size_t n, std::vector<double> qs, int points, const RunConfig& cfg, std::ostream& os) {
  if (qs.empty()) qs = depolarizing_grid(n, points);
  const std::vector<SweepRow> rows = sweep_depolarizing(n, qs, cfg);
  bool ok = true;
  for (const auto& r : rows)
    ok = ok && r.fmin_gap <= cfg.tol && r.cost_gap <= cfg.tol && r.no_entanglement_fidelity >= r.fmin_closed;
  const std::vector<std::string> head = {"q",          "fmin_solver", "fmin_closed", "cost_solver", "cost_closed",
                                         "no_entanglement_fidelity", "fmin_gap", "cost_gap", "strict"};
  switch (cfg.format) {
    case OutputFormat::Json: {
      json arr = json::array();
      for (const auto& r : rows) arr.push_back(to_json(r));
      json res = {{"n", n}, {"rows", std::move(arr)}};
      os << envelope("sweep-depolarizing", cfg, std::move(res)).dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv:
    case OutputFormat::Human: {
      if (cfg.format == OutputFormat::Human) os << "# depolarizing sweep, n = " << n << ", seed = " << cfg.seed << '\n';
      csv_row(os, head);
      for (const auto& r : rows)
        csv_row(os, {format_double(r.q), format_double(r.fmin_solver), format_double(r.fmin_closed),
                     format_double(r.cost_solver), format_double(r.cost_closed),
                     format_double(r.no_entanglement_fidelity), format_double(r.fmin_gap), format_double(r.cost_gap),
                     r.strict ? "1" : "0"});
      break;
    }
  }
  return ok ? kExitOk : kExitFailed;
}

// ---- random-suite ---------------------------------------------------------

int cmd_random_suite(const std::vector<std::size_t>& ns, const std::vector<std::size_t>& ds, int trials,
                     const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  SuiteSummary s;
  const std::vector<SuiteRow> rows = random_suite(ns, ds, trials, cfg, s);
  const auto summary_lines = [&](std::ostream& o) {
    Lines{o}("trials", std::to_string(s.trials))("failures", std::to_string(s.failures))(
        "max_min_failures", std::to_string(s.max_min_failures))("max_gap", s.max_gap)("tolerance", cfg.tol)(
        "seed", std::to_string(cfg.seed))("seconds", s.seconds);
  };
  std::vector<std::string> head = {"n", "d", "trial", "seed"};
  head.insert(head.end(), kVerifyColumns.begin(), kVerifyColumns.end());
  const auto table = [&](std::ostream& o) {
    csv_row(o, head);
    for (const auto& r : rows) {
      std::vector<std::string> cells = {std::to_string(r.n), std::to_string(r.d), std::to_string(r.trial),
                                        std::to_string(r.seed)};
      const auto rest = verify_cells(r.report);
      cells.insert(cells.end(), rest.begin(), rest.end());
      csv_row(o, cells);
    }
  };
  switch (cfg.format) {
    case OutputFormat::Json: {
      json arr = json::array();
      for (const auto& r : rows)
        arr.push_back({{"n", r.n}, {"d", r.d}, {"trial", r.trial}, {"seed", r.seed}, {"report", to_json(r.report)}});
      json summary = {{"trials", s.trials},         {"failures", s.failures},
                      {"max_min_failures", s.max_min_failures}, {"max_gap", s.max_gap},
                      {"tolerance", cfg.tol},       {"seconds", s.seconds}};
      os << envelope("random-suite", cfg, {{"summary", std::move(summary)}, {"rows", std::move(arr)}}).dump(2)
         << '\n';
      break;
    }
    case OutputFormat::Csv:
      // Rows carry no timings so a fixed seed reproduces the bytes exactly.
      table(os);
      summary_lines(err);
      break;
    case OutputFormat::Human:
      summary_lines(os);
      os << '\n';
      table(os);
      break;
  }
  return s.failures == 0 && s.max_min_failures == 0 ? kExitOk : kExitFailed;
}

// ---- teur ------------------------------------------------------------------

struct TeurParams {
  std::optional<double> spread, e_max, e_min, fidelity, epsilon, time;
  double theta = kPi / 2.0;
};

std::pair<double, double> energy_interval(const TeurParams& p) {
  if (p.spread) {
    if (p.e_max || p.e_min) throw Error(ErrorKind::BadInterval, "give either --spread or --e-max/--e-min");
    return {*p.spread, 0.0};
  }
  if (!p.e_max || !p.e_min) throw Error(ErrorKind::BadInterval, "--spread or both --e-max and --e-min required");
  return {*p.e_max, *p.e_min};
}

double required(const std::optional<double>& v, const char* flag) {
  if (!v) throw Error(ErrorKind::ParseError, std::string(flag) + " is required");
  return *v;
}

void emit_scalars(const std::string& command, const std::vector<std::pair<std::string, json>>& fields,
                  const RunConfig& cfg, std::ostream& os) {
  json res = json::object();
  for (const auto& [k, v] : fields) res[k] = v;
  switch (cfg.format) {
    case OutputFormat::Json: os << envelope(command, cfg, std::move(res)).dump(2) << '\n'; break;
    case OutputFormat::Csv: {
      std::vector<std::string> head, cells;
      for (const auto& [k, v] : fields) {
        head.push_back(k);
        cells.push_back(v.is_number_float() ? format_double(v.get<double>()) : v.is_boolean() ? (v.get<bool>() ? "1" : "0") : v.dump());
      }
      head.push_back("seed");
      cells.push_back(std::to_string(cfg.seed));
      csv_row(os, head);
      csv_row(os, cells);
      break;
    }
    case OutputFormat::Human: {
      Lines lines(os);
      for (const auto& [k, v] : fields)
        lines(k, v.is_number_float() ? format_double(v.get<double>()) : v.is_boolean() ? yes_no(v.get<bool>()) : v.dump());
      break;
    }
  }
}

int cmd_teur(const std::string& sub, const TeurParams& p, const RunConfig& cfg, std::ostream& os) {
  const std::string command = "teur " + sub;
  if (sub == "orthogonalization") {
    const auto [hi, lo] = energy_interval(p);
    emit_scalars(command, {{"e_max", hi}, {"e_min", lo}, {"hbar", cfg.hbar},
                           {"orthogonalization_time", orthogonalization_time(hi, lo, cfg.hbar)}},
                 cfg, os);
  } else if (sub == "fastest") {
    const auto [hi, lo] = energy_interval(p);
    const double f = required(p.fidelity, "--fidelity");
    emit_scalars(command, {{"fidelity", f}, {"e_max", hi}, {"e_min", lo}, {"hbar", cfg.hbar},
                           {"fastest_time", fastest_state_time(f, hi, lo, cfg.hbar)}},
                 cfg, os);
  } else if (sub == "chau") {
    const double eps = required(p.epsilon, "--epsilon");
    const ChauComparison c = chau_comparison(eps, cfg.hbar);
    emit_scalars(command, {{"epsilon", eps}, {"hbar", cfg.hbar}, {"chau_constant", kChauConstant},
                           {"chau_time", c.chau_time}, {"fastest_time", c.fastest_time},
                           {"fastest_exceeds_chau", c.fastest_exceeds_chau}},
                 cfg, os);
  } else if (sub == "product") {
    const double t = required(p.time, "--time");
    if (!p.e_max || !p.e_min) throw Error(ErrorKind::BadInterval, "--e-max and --e-min are required");
    emit_scalars(command, {{"e_max", *p.e_max}, {"e_min", *p.e_min}, {"time", t}, {"hbar", cfg.hbar},
                           {"cost", cost_energy_product(*p.e_max, *p.e_min, t, cfg.hbar)}},
                 cfg, os);
  } else {  // bound
    const double eps = required(p.epsilon, "--epsilon");
    const double t = required(p.time, "--time");
    const PureState psi({std::cos(p.theta / 2.0), std::sin(p.theta / 2.0)});
    const TeurReport r = teur_bound_check(pauli::z() * complex{eps}, psi, t, cfg.hbar);
    std::vector<std::pair<std::string, json>> fields;
    const json report = to_json(r);
    for (const auto& [k, v] : report.items()) fields.emplace_back(k, v);
    emit_scalars(command, fields, cfg, os);
    return r.bound_satisfied ? kExitOk : kExitFailed;
  }
  return kExitOk;
}

}  // namespace

// ---- library-level operations ---------------------------------------------

ValidateReport validate_file(const std::string& path, bool allow_incomplete) {
  ChannelParseOptions opts;
  opts.allow_incomplete = true;  // the residual is reported rather than thrown
  const KrausChannel ch = read_channel_file(path, opts);
  ValidateReport r;
  r.path = path;
  r.n = ch.n();
  r.d = ch.d();
  r.completeness_residual = ch.completeness_residual();
  // Choi matrix without trace normalization, so incomplete sets still report.
  const std::size_t n = ch.n();
  ComplexMatrix choi(n * n, n * n);
  ComplexVector col(n * n);
  for (const auto& k : ch.kraus()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < n; ++b) col[i * n + b] = k(b, i) / std::sqrt(static_cast<double>(n));
    choi += ComplexMatrix::outer(col, col);
  }
  r.choi_min_eigenvalue = hermitian_eigen(hermitian_part(choi), 1e-8).values.front();
  r.choi_psd = r.choi_min_eigenvalue >= -1e-9;
  const bool complete = r.completeness_residual <= ChannelParseOptions{}.tol;
  r.valid = r.choi_psd && (complete || allow_incomplete);
  if (!complete) {
    r.message = std::string(allow_incomplete ? "accepted (--allow-incomplete): " : "InvalidChannel: ") +
                "completeness residual " + format_double(r.completeness_residual) + " exceeds " +
                format_double(ChannelParseOptions{}.tol);
  } else if (!r.choi_psd) {
    r.message = "InvalidChannel: Choi matrix is not positive semidefinite";
  }
  return r;
}

VerifyReport verify_channel(const LoadedChannel& lc, const RunConfig& cfg) {
  VerifyReport r;
  r.channel = lc.descriptor;
  r.tolerance = cfg.tol;
  auto t0 = std::chrono::steady_clock::now();
  const FidelityResult f = fmin_descent(lc.channel, cfg.fidelity_options());
  r.fmin_seconds = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const TECostResult c = channel_cost(lc.channel, cfg.cost_options());
  r.cost_seconds = seconds_since(t0);

  r.fmin_value = f.value;
  r.cos_cost = c.cos_value;
  r.clamped_cos = std::max(c.cos_value, 0.0);
  r.abs_gap = std::abs(f.value - r.clamped_cos);
  r.pass = r.abs_gap <= cfg.tol;
  r.max_min_ok = f.value >= c.cos_value - 1e-7;
  r.fmin_converged = f.converged;
  r.fmin_iterations = f.iterations;
  r.fmin_restarts = f.restarts_used;
  r.fmin_possibly_zero = f.possibly_zero;
  r.cost_converged = c.converged;
  r.cost_regime = std::string(to_string(c.regime));
  r.certificate_gap = c.certificate_gap;
  return r;
}

std::vector<double> depolarizing_grid(std::size_t n, int points) {
  if (points < 2) throw Error(ErrorKind::OutOfRange, "a sweep needs at least 2 points");
  const double lo = depolarizing_lower_bound(n);
  std::vector<double> qs(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) qs[k] = lo + (1.0 - lo) * k / (points - 1);
  qs.back() = 1.0;
  return qs;
}

std::vector<SweepRow> sweep_depolarizing(std::size_t n, const std::vector<double>& qs, const RunConfig& cfg) {
  for (double q : qs) require_depolarizing_range(n, q);
  std::vector<SweepRow> rows;
  for (double q : qs) {
    const KrausChannel ch = depolarizing(n, q);
    SweepRow r;
    r.q = q;
    r.fmin_solver = fmin_descent(ch, cfg.fidelity_options()).value;
    r.cost_solver = channel_cost(ch, cfg.cost_options()).angle;
    r.fmin_closed = depolarizing_fmin_closed_form(n, q);
    r.cost_closed = depolarizing_cost_closed_form(n, q);
    r.no_entanglement_fidelity = std::sqrt(std::clamp(q, -1.0, 1.0) + (1.0 - q) / static_cast<double>(n));
    r.fmin_gap = std::abs(r.fmin_solver - r.fmin_closed);
    r.cost_gap = std::abs(r.cost_solver - r.cost_closed);
    r.strict = r.no_entanglement_fidelity > r.fmin_closed;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SuiteRow> random_suite(const std::vector<std::size_t>& ns, const std::vector<std::size_t>& ds,
                                   int trials, const RunConfig& cfg, SuiteSummary& summary) {
  if (trials < 1) throw Error(ErrorKind::OutOfRange, "trials must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SuiteRow> rows;
  summary = {};
  std::uint64_t index = 0;
  for (std::size_t n : ns) {
    for (std::size_t d : ds) {
      for (int t = 0; t < trials; ++t, ++index) {
        SuiteRow row{n, d, t, Rng::stream_seed(cfg.seed, index), {}};
        const std::string spec = "random:n=" + std::to_string(n) + ",d=" + std::to_string(d) +
                                 ",seed=" + std::to_string(row.seed);
        RunConfig trial_cfg = cfg;
        trial_cfg.seed = row.seed;
        row.report = verify_channel(family_channel(spec), trial_cfg);
        summary.max_gap = std::max(summary.max_gap, row.report.abs_gap);
        if (!row.report.pass) ++summary.failures;
        if (!row.report.max_min_ok) ++summary.max_min_failures;
        rows.push_back(std::move(row));
      }
    }
  }
  summary.trials = rows.size();
  summary.seconds = seconds_since(t0);
  return rows;
}

// ---- argument parsing -------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum entanglement fidelity and time-energy cost of quantum channels", "qtec"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value file mirroring the flags (flags take precedence)");

  RunConfig cfg;
  std::string format = "human", out_path;
  int restarts = 0, iters = 0;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "json", "csv"}));
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--restarts", restarts, "Solver restarts")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "Tolerance on |F_min - max(cos cost, 0)|")->check(CLI::PositiveNumber);
  app.add_option("--iters", iters, "Iteration limit for the solvers")->check(CLI::PositiveNumber);
  app.add_option("--hbar", cfg.hbar, "Value of hbar")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "Write the report to this file");

  const auto channel_input = [&](CLI::App* sub) {
    auto* file = sub->add_option("--channel", cfg.channel_path, "Channel file");
    auto* fam = sub->add_option("--family", cfg.family, "Family spec, e.g. depolarizing:n=3,q=0.2");
    file->excludes(fam);
    sub->add_flag("--allow-incomplete", cfg.allow_incomplete, "Skip the completeness check");
  };

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a channel file");
  validate->add_option("path", validate_path, "Channel file")->required();
  validate->add_flag("--allow-incomplete", cfg.allow_incomplete, "Accept a non-trace-preserving set");

  auto* tecost = app.add_subcommand("tecost", "Time-energy cost of a channel");
  channel_input(tecost);
  auto* fmin = app.add_subcommand("fmin", "Minimum entanglement fidelity of a channel");
  channel_input(fmin);
  auto* verify = app.add_subcommand("verify", "Compare F_min with max(cos cost, 0)");
  channel_input(verify);

  std::size_t sweep_n = 2;
  std::vector<double> sweep_q;
  int sweep_points = 21;
  auto* sweep = app.add_subcommand("sweep-depolarizing", "Depolarizing sweep against the closed forms");
  sweep->add_option("--n", sweep_n, "System dimension")->check(CLI::Range(2, 64));
  sweep->add_option("--q", sweep_q, "Comma-separated q values")->delimiter(',');
  sweep->add_option("--points", sweep_points, "Grid size when --q is absent")->check(CLI::Range(2, 100000));

  std::vector<std::size_t> suite_n = {2, 3, 4}, suite_d = {1, 2, 3, 4};
  int suite_trials = 25;
  auto* suite = app.add_subcommand("random-suite", "Verify seeded random channels");
  suite->add_option("--n", suite_n, "Comma-separated dimensions")->delimiter(',')->check(CLI::Range(2, 64));
  suite->add_option("--d", suite_d, "Comma-separated Kraus counts")->delimiter(',')->check(CLI::Range(1, 64));
  suite->add_option("--trials", suite_trials, "Trials per (n, d)")->check(CLI::PositiveNumber);

  TeurParams tp;
  auto* teur = app.add_subcommand("teur", "Time-energy uncertainty calculators");
  teur->require_subcommand(1);
  auto* t_orth = teur->add_subcommand("orthogonalization", "pi hbar / (E_max - E_min)");
  auto* t_fast = teur->add_subcommand("fastest", "2 hbar arccos(F) / (E_max - E_min)");
  auto* t_chau = teur->add_subcommand("chau", "Chau versus fastest-state orthogonalization times");
  auto* t_prod = teur->add_subcommand("product", "(E_max - E_min) t / (2 hbar)");
  auto* t_bound = teur->add_subcommand("bound", "Check t dE >= hbar arccos F for H = eps Z");
  for (auto* s : {t_orth, t_fast, t_prod}) {
    s->add_option("--e-max", tp.e_max, "Largest energy");
    s->add_option("--e-min", tp.e_min, "Smallest energy");
  }
  for (auto* s : {t_orth, t_fast}) s->add_option("--spread", tp.spread, "E_max - E_min");
  t_fast->add_option("--fidelity", tp.fidelity, "Target fidelity F");
  for (auto* s : {t_chau, t_bound}) s->add_option("--epsilon", tp.epsilon, "Energy scale");
  for (auto* s : {t_prod, t_bound}) s->add_option("--time", tp.time, "Evolution time");
  t_bound->add_option("--theta", tp.theta, "Initial state cos(theta/2)|0> + sin(theta/2)|1>");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  if (restarts > 0) cfg.restarts = restarts;
  if (iters > 0) cfg.iters = iters;

  std::ostringstream body;
  int status = kExitOk;
  try {
    cfg.format = parse_format(format);
    if (validate->parsed()) {
      cfg.command = "validate";
      status = cmd_validate(validate_path, cfg, body);
    } else if (tecost->parsed()) {
      cfg.command = "tecost";
      status = cmd_tecost(cfg, body);
    } else if (fmin->parsed()) {
      cfg.command = "fmin";
      status = cmd_fmin(cfg, body);
    } else if (verify->parsed()) {
      cfg.command = "verify";
      status = cmd_verify(cfg, body);
    } else if (sweep->parsed()) {
      cfg.command = "sweep-depolarizing";
      status = cmd_sweep(sweep_n, sweep_q, sweep_points, cfg, body);
    } else if (suite->parsed()) {
      cfg.command = "random-suite";
      status = cmd_random_suite(suite_n, suite_d, suite_trials, cfg, body, err);
    } else {
      cfg.command = "teur";
      for (auto* s : {t_orth, t_fast, t_chau, t_prod, t_bound})
        if (s->parsed()) status = cmd_teur(s->get_name(), tp, cfg, body);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::NoConvergence ? kExitFailed : kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  if (out_path.empty()) {
    out << body.str();
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!(file << body.str())) {
      err << "error: cannot write " << out_path << '\n';
      return kExitInputError;
    }
  }
  return status;
}

}  // namespace qtec::cli
