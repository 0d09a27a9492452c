#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "oracles.hpp"

using namespace qtec;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

json run_json(std::vector<std::string> args, int expected_code = 0) {
  args.push_back("--format");
  args.push_back("json");
  const Outcome o = run_cli(args);
  EXPECT_EQ(o.code, expected_code) << o.err;
  return json::parse(o.out);
}

std::set<std::string> keys(const json& j) {
  std::set<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
  return out;
}

std::string scratch(const std::string& name, const std::string& contents) {
  const auto dir = std::filesystem::temp_directory_path() / "qtec_cli_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << contents;
  return path.string();
}

const char* kIncomplete = R"({"n": 2, "d": 1, "kraus": [
  [[[1, 0], [0, 0]], [[0, 0], [0.9486832980505138, 0]]]
]})";

const char* kMalformed = "{\"n\": 2, \"d\": 1, \"kraus\": [\n  [\n    [[1, 0], [0, 0]],\n    [[0, 0], [1, 0, 0]]\n  ]\n]}";

}  // namespace

TEST(CliValidate, ExitCodes) {
  const std::string good = scratch("dephasing.json", write_channel(dephasing(2)));
  EXPECT_EQ(run_cli({"validate", good}).code, cli::kExitOk);

  const std::string bad = scratch("incomplete.json", kIncomplete);
  const json r = run_json({"validate", bad}, cli::kExitFailed)["result"];
  EXPECT_FALSE(r["valid"].get<bool>());
  EXPECT_NEAR(r["completeness_residual"].get<double>(), 0.1, 1e-12);
  EXPECT_EQ(run_cli({"validate", bad, "--allow-incomplete"}).code, cli::kExitOk);

  const Outcome malformed = run_cli({"validate", scratch("malformed.json", kMalformed)});
  EXPECT_EQ(malformed.code, cli::kExitInputError);
  EXPECT_NE(malformed.err.find("line 4"), std::string::npos) << malformed.err;

  EXPECT_EQ(run_cli({"validate", "/nonexistent/channel.json"}).code, cli::kExitInputError);
}

TEST(CliValidate, ReportFields) {
  const json j = run_json({"validate", scratch("dephasing3.json", write_channel(dephasing(3)))});
  const json& r = j["result"];
  EXPECT_EQ(keys(r), (std::set<std::string>{"path", "valid", "n", "d", "completeness_residual",
                                             "choi_min_eigenvalue", "choi_psd", "message"}));
  EXPECT_EQ(r["n"], 3);
  EXPECT_EQ(r["d"], 3);
  EXPECT_LE(r["completeness_residual"].get<double>(), 1e-12);
  EXPECT_TRUE(r["choi_psd"].get<bool>());
}

TEST(CliTecost, SchemaAndValues) {
  const json j = run_json({"tecost", "--family", "depolarizing:n=2,q=0.5"});
  EXPECT_EQ(keys(j), (std::set<std::string>{"command", "seed", "channel", "result"}));
  EXPECT_EQ(j["command"], "tecost");
  EXPECT_EQ(keys(j["result"]), (std::set<std::string>{"cos_value", "angle", "optimal_v", "witness", "converged",
                                                        "regime", "certificate_gap", "ascent_value",
                                                        "newton_steps", "time_energy"}));
  EXPECT_NEAR(j["result"]["angle"].get<double>(), 0.6590580, 1e-6);

  EXPECT_NEAR(run_json({"tecost", "--family", "dephasing:n=2"})["result"]["angle"].get<double>(), 0.7853982, 1e-6);
  EXPECT_NEAR(run_json({"tecost", "--family", "identity:n=3"})["result"]["angle"].get<double>(), 0.0, 1e-4);
}

TEST(CliTecost, HumanAndCsvOutput) {
  const Outcome human = run_cli({"tecost", "--family", "dephasing:n=2"});
  EXPECT_EQ(human.code, 0);
  EXPECT_NE(human.out.find("angle"), std::string::npos);
  EXPECT_NE(human.out.find("regime"), std::string::npos);
  const Outcome csv = run_cli({"tecost", "--family", "dephasing:n=2", "--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')),
            "channel,seed,angle,cos_value,regime,certificate_gap,converged,newton_steps,ascent_value,time_energy");
}

TEST(CliTecost, InputErrors) {
  EXPECT_EQ(run_cli({"tecost"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"tecost", "--family", "nosuch:n=2"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"tecost", "--family", "depolarizing:n=2,q=-0.5"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"tecost", "--family", "dephasing:n=2", "--channel", "x.json"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"tecost", "--channel", "/nonexistent.json"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"tecost", "--family", "dephasing:n=2", "--format", "xml"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"nosuch"}).code, cli::kExitInputError);
}

TEST(CliFmin, SchemaAndValues) {
  const json j = run_json({"fmin", "--family", "dephasing:n=3"});
  EXPECT_EQ(j["command"], "fmin");
  EXPECT_EQ(keys(j["result"]), (std::set<std::string>{"value", "minimizer", "reduced", "optimal_w", "iterations",
                                                        "restarts_used", "converged", "gradient_norm",
                                                        "possibly_zero", "best_restart"}));
  EXPECT_NEAR(j["result"]["value"].get<double>(), 1.0 / std::sqrt(3.0), 1e-7);
  EXPECT_NEAR(run_json({"fmin", "--family", "depolarizing:n=3,q=0.2"})["result"]["value"].get<double>(), std::sqrt(0.2 + 0.8 / 9.0),
              1e-7);
  EXPECT_NEAR(run_json({"fmin", "--family", "identity:n=2"})["result"]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(run_json({"fmin", "--family", "dephasing:n=2", "--restarts", "3"})["result"]["restarts_used"], 3);
}

TEST(CliVerify, SchemaAndExitCodes) {
  const json j = run_json({"verify", "--family", "depolarizing:n=2,q=0.5"});
  EXPECT_EQ(j["command"], "verify");
  EXPECT_EQ(keys(j["result"]),
            (std::set<std::string>{"channel", "fmin_value", "cos_cost", "clamped_cos", "abs_gap", "tolerance", "pass",
                                   "max_min_ok", "fmin_converged", "fmin_iterations", "fmin_restarts",
                                   "fmin_possibly_zero", "cost_converged", "cost_regime", "certificate_gap",
                                   "fmin_seconds", "cost_seconds"}));
  EXPECT_TRUE(j["result"]["pass"].get<bool>());
  EXPECT_LE(j["result"]["abs_gap"].get<double>(), 1e-6);

  const json deph = run_json({"verify", "--family", "dephasing:n=2"})["result"];
  EXPECT_NEAR(deph["fmin_value"].get<double>(), 0.70711, 1e-5);

  const json flip = run_json({"verify", "--family", "bitflip"})["result"];
  EXPECT_EQ(flip["clamped_cos"].get<double>(), 0.0);
  EXPECT_LE(flip["fmin_value"].get<double>(), 1e-6);
  EXPECT_TRUE(flip["pass"].get<bool>());

  // A starved solver cannot close the gap.
  EXPECT_EQ(run_cli({"verify", "--family", "random:n=3,d=2,seed=4", "--iters", "1", "--restarts", "1"}).code,
            cli::kExitFailed);
  EXPECT_EQ(run_cli({"verify", "--family", "random:n=3,d=2,seed=4", "--tol", "1e-300"}).code, cli::kExitFailed);
}

TEST(CliVerify, FileRoundTripMatchesFamily) {
  for (const std::string spec : {"depolarizing:n=3,q=0.2", "random:n=3,d=2,seed=11", "xrot:omega=0.7"}) {
    const KrausChannel ch = cli::family_channel(spec).channel;
    const std::string path = scratch("roundtrip.json", write_channel(ch));
    EXPECT_LE(choi_distance(ch, read_channel_file(path)), 1e-12);
    const json a = run_json({"verify", "--family", spec})["result"];
    const json b = run_json({"verify", "--channel", path})["result"];
    EXPECT_NEAR(a["fmin_value"].get<double>(), b["fmin_value"].get<double>(), 1e-12) << spec;
    EXPECT_NEAR(a["cos_cost"].get<double>(), b["cos_cost"].get<double>(), 1e-12) << spec;
    EXPECT_EQ(a["pass"], b["pass"]);
  }
}

TEST(CliVerify, OutFileMatchesStdout) {
  const auto dir = std::filesystem::temp_directory_path() / "qtec_cli_tests";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "report.json").string();
  std::filesystem::remove(path);
  const Outcome o = run_cli({"tecost", "--family", "dephasing:n=2", "--format", "json", "--out", path});
  EXPECT_EQ(o.code, 0);
  std::ifstream in(path);
  const json written = json::parse(in);
  EXPECT_EQ(written, run_json({"tecost", "--family", "dephasing:n=2"}));
}

TEST(CliSweep, DepolarizingRows) {
  const json j = run_json({"sweep-depolarizing", "--n", "2", "--q", "-0.3333333333333333,0,0.5,1"});
  const json& rows = j["result"]["rows"];
  ASSERT_EQ(rows.size(), 4u);
  const double closed[] = {0.0, 0.5, 0.7905694, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    const json& r = rows[i];
    EXPECT_EQ(keys(r), (std::set<std::string>{"q", "fmin_solver", "fmin_closed", "cost_solver", "cost_closed",
                                               "no_entanglement_fidelity", "fmin_gap", "cost_gap", "strict"}));
    EXPECT_NEAR(r["fmin_closed"].get<double>(), closed[i], 1e-7);
    EXPECT_GE(r["no_entanglement_fidelity"].get<double>(), r["fmin_closed"].get<double>());
  }
  EXPECT_LE(rows[3]["fmin_gap"].get<double>(), 1e-8);
  EXPECT_LE(rows[3]["cost_gap"].get<double>(), 1e-8);
  EXPECT_EQ(run_cli({"sweep-depolarizing", "--n", "2", "--q", "-0.5"}).code, cli::kExitInputError);
}

TEST(CliSweep, CsvHeader) {
  const Outcome o = run_cli({"sweep-depolarizing", "--n", "3", "--points", "5", "--format", "csv"});
  EXPECT_EQ(o.code, 0);
  std::istringstream lines(o.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "q,fmin_solver,fmin_closed,cost_solver,cost_closed,no_entanglement_fidelity,fmin_gap,cost_gap,strict");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) rows += !line.empty();
  EXPECT_EQ(rows, 5);
}

TEST(CliRandomSuite, CsvIsDeterministic) {
  const std::vector<std::string> args = {"random-suite", "--n", "2,3", "--d", "1,2", "--trials", "2",
                                         "--seed", "42", "--format", "csv"};
  const Outcome a = run_cli(args), b = run_cli(args);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
  const Outcome other = run_cli({"random-suite", "--n", "2,3", "--d", "1,2", "--trials", "2", "--seed", "43",
                                 "--format", "csv"});
  EXPECT_NE(a.out, other.out);
}

TEST(CliRandomSuite, JsonSummary) {
  const json j = run_json({"random-suite", "--n", "2", "--d", "1,3", "--trials", "3", "--seed", "5"});
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["result"]["summary"]["trials"], 6);
  EXPECT_EQ(j["result"]["summary"]["failures"], 0);
  EXPECT_LE(j["result"]["summary"]["max_gap"].get<double>(), 1e-6);
  EXPECT_EQ(run_cli({"random-suite", "--n", "2", "--d", "1", "--trials", "0"}).code, cli::kExitInputError);
}

TEST(CliTeur, Subcommands) {
  EXPECT_NEAR(run_json({"teur", "orthogonalization", "--spread", "3.141592653589793"})["result"]["orthogonalization_time"].get<double>(),
              1.0, 1e-12);
  const json chau = run_json({"teur", "chau", "--epsilon", "1"})["result"];
  EXPECT_NEAR(chau["chau_time"].get<double>(), 1.380049, 1e-5);
  EXPECT_NEAR(chau["fastest_time"].get<double>(), 1.570796, 1e-5);
  EXPECT_NEAR(run_json({"teur", "fastest", "--fidelity", "0.5", "--spread", "1"})["result"]["fastest_time"].get<double>(),
              2.0943951, 1e-6);
  const json bound = run_json({"teur", "bound", "--epsilon", "1", "--time", "1.5707963267948966"})["result"];
  EXPECT_NEAR(bound["lhs"].get<double>(), bound["rhs"].get<double>(), 1e-9);
  EXPECT_TRUE(bound["bound_satisfied"].get<bool>());
  EXPECT_EQ(run_cli({"teur", "fastest", "--fidelity", "2", "--spread", "1"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"teur", "orthogonalization", "--spread", "-1"}).code, cli::kExitInputError);
}

TEST(CliConfig, FileValuesAndFlagOverrides) {
  const std::string cfg = scratch("run.ini", "seed = 7\nformat = json\n");
  const Outcome from_file = run_cli({"--config", cfg, "fmin", "--family", "dephasing:n=2"});
  EXPECT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(json::parse(from_file.out)["seed"], 7);

  const Outcome overridden = run_cli({"--config", cfg, "fmin", "--family", "dephasing:n=2", "--seed", "9"});
  EXPECT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(json::parse(overridden.out)["seed"], 9);
}

TEST(CliConfig, SeedChangesTheSearchNotTheAnswer) {
  const json a = run_json({"fmin", "--family", "random:n=3,d=2,seed=2", "--seed", "1"})["result"];
  const json b = run_json({"fmin", "--family", "random:n=3,d=2,seed=2", "--seed", "2"})["result"];
  EXPECT_NEAR(a["value"].get<double>(), b["value"].get<double>(), 1e-8);
}
