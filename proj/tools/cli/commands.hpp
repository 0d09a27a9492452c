#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qtec/qtec.hpp"

namespace qtec::cli {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitInputError = 2 };

enum class OutputFormat { Human, Json, Csv };

OutputFormat parse_format(std::string_view name);
std::string_view to_string(OutputFormat f);

struct RunConfig {
  std::string command;
  std::string channel_path;  // exactly one of channel_path / family
  std::string family;
  bool allow_incomplete = false;
  OutputFormat format = OutputFormat::Human;
  std::uint64_t seed = 0;
  std::optional<int> restarts;
  std::optional<int> iters;
  double tol = 1e-6;  // Tolerance on |F_min - max(cos cost, 0)|
  double hbar = 1.0;

  FidelityOptions fidelity_options() const;
  CostOptions cost_options() const;
};

struct LoadedChannel {
  KrausChannel channel;
  std::string descriptor;
};

/// Families: identity:n=N, depolarizing:n=N,q=Q, dephasing:n=N, bitflip,
/// xrot:omega=W, zrot:omega=W, unitary:n=N,seed=S, random:n=N,d=D,seed=S.
LoadedChannel family_channel(std::string_view spec);
LoadedChannel load_channel(const RunConfig& cfg);

struct ValidateReport {
  std::string path;
  bool valid = false;
  std::size_t n = 0;
  std::size_t d = 0;
  double completeness_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  bool choi_psd = false;
  std::string message;
};

ValidateReport validate_file(const std::string& path, bool allow_incomplete);

struct VerifyReport {
  std::string channel;
  double fmin_value = 0.0;
  double cos_cost = 0.0;
  double clamped_cos = 0.0;
  double abs_gap = 0.0;
  double tolerance = 1e-6;
  bool pass = false;
  bool max_min_ok = false;
  bool fmin_converged = false;
  int fmin_iterations = 0;
  int fmin_restarts = 0;
  bool fmin_possibly_zero = false;
  bool cost_converged = false;
  std::string cost_regime;
  double certificate_gap = 0.0;
  double fmin_seconds = 0.0;
  double cost_seconds = 0.0;
};

VerifyReport verify_channel(const LoadedChannel& ch, const RunConfig& cfg);

struct SweepRow {
  double q = 0.0;
  double fmin_solver = 0.0;
  double fmin_closed = 0.0;
  double cost_solver = 0.0;
  double cost_closed = 0.0;
  double no_entanglement_fidelity = 0.0;
  double fmin_gap = 0.0;
  double cost_gap = 0.0;
  bool strict = false;  // no_entanglement_fidelity > fmin_closed
};

/// `points` evenly spaced q values over [-1/(n^2 - 1), 1] unless `qs` is given.
std::vector<double> depolarizing_grid(std::size_t n, int points);
std::vector<SweepRow> sweep_depolarizing(std::size_t n, const std::vector<double>& qs, const RunConfig& cfg);

struct SuiteRow {
  std::size_t n = 0;
  std::size_t d = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  VerifyReport report;
};

struct SuiteSummary {
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t max_min_failures = 0;
  double max_gap = 0.0;
  double seconds = 0.0;
};

std::vector<SuiteRow> random_suite(const std::vector<std::size_t>& ns, const std::vector<std::size_t>& ds,
                                   int trials, const RunConfig& cfg, SuiteSummary& summary);

// Rendering. Every JSON result object carries exactly the fields of the
// corresponding struct.
nlohmann::json to_json(const TECostResult& r);
nlohmann::json to_json(const FidelityResult& r);
nlohmann::json to_json(const VerifyReport& r);
nlohmann::json to_json(const ValidateReport& r);
nlohmann::json to_json(const SweepRow& r);
nlohmann::json to_json(const TeurReport& r);

std::string format_double(double x);  // 17 significant digits
std::string format_complex(complex z);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtec::cli
