// Command-line front end for the evolutionary Cournot engine. All heavy
// lifting happens behind the C API; this layer handles flags, file I/O and
// output formatting.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cournotlre/capi.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::vector<double> epsilon_sweep;
  std::string out_dir;
  std::string format = "json";
};

int exit_code_for(int status) {
  switch (status) {
    case CLRE_OK: return 0;
    case CLRE_CONFIG_ERROR: return 2;
    default: return 1;  // check failures and runtime errors
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to <out_dir>/<name> when an output directory was given, otherwise
// to stdout.
void emit(const Options& opt, const std::string& name,
          const std::string& content) {
  if (opt.out_dir.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(opt.out_dir);
  std::filesystem::path path = std::filesystem::path(opt.out_dir) / name;
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  std::cerr << "wrote " << path.string() << "\n";
}

struct RunHandle {
  clre_run* run = nullptr;
  ~RunHandle() { clre_run_free(run); }
};

struct CString {
  char* s = nullptr;
  ~CString() { clre_string_free(s); }
  std::string str() const { return s ? std::string(s) : std::string(); }
};

int open_run(const Options& opt, RunHandle& handle) {
  std::string text = read_file(opt.config_path);
  int rc = clre_run_new(text.c_str(), &handle.run);
  if (rc != CLRE_OK) {
    std::cerr << "config error: " << clre_last_error(nullptr) << "\n";
  }
  return rc;
}

void print_bench_summary(const json& report) {
  const json& b = report.at("benchmarks");
  std::cerr << "firms: " << report.at("model").at("n").get<int>() << "\n"
            << "Cournot-Nash q^N = "
            << b.at("nash").at("value").get<std::string>() << "\n"
            << "Walrasian    q^W = "
            << b.at("walras").at("value").get<std::string>() << "\n"
            << "Collusive    q^C = "
            << b.at("collusive").at("value").get<std::string>() << "\n"
            << "long-run quantity bounds: ["
            << report.at("bounds").at("lower").at("value").get<std::string>()
            << ", "
            << report.at("bounds").at("upper").at("value").get<std::string>()
            << "]\n";
}

std::string occupancy_csv(const json& report) {
  std::ostringstream os;
  os << "epsilon,pattern,rule,quantity,mean,std_error\n";
  for (const auto& run : report.at("runs")) {
    for (const auto& row : run.at("occupancy")) {
      os << run.at("epsilon").get<double>() << ','
         << row.at("pattern").get<std::string>() << ','
         << row.at("rule").get<std::string>() << ','
         << row.at("quantity").at("value").get<std::string>() << ','
         << row.at("mean").get<double>() << ','
         << row.at("std_error").get<double>() << '\n';
    }
    os << run.at("epsilon").get<double>() << ",(non-monomorphic),,,"
       << run.at("non_monomorphic_mean").get<double>() << ",\n";
  }
  return os.str();
}

int cmd_bench(const Options& opt) {
  RunHandle handle;
  int rc = open_run(opt, handle);
  if (rc != CLRE_OK) return exit_code_for(rc);
  CString out;
  rc = clre_bench(handle.run, &out.s);
  if (rc != CLRE_OK) {
    std::cerr << "error: " << clre_last_error(handle.run) << "\n";
    return exit_code_for(rc);
  }
  print_bench_summary(json::parse(out.str()));
  emit(opt, "bench.json", out.str());
  return 0;
}

int cmd_analyze(const Options& opt) {
  RunHandle handle;
  int rc = open_run(opt, handle);
  if (rc != CLRE_OK) return exit_code_for(rc);
  const double* eta = opt.eta ? &*opt.eta : nullptr;
  CString out;
  if (opt.format == "dot") {
    rc = clre_analyze_dot(handle.run, eta, &out.s);
  } else {
    rc = clre_analyze(handle.run, eta, &out.s);
  }
  if (rc != CLRE_OK) {
    std::cerr << "error: " << clre_last_error(handle.run) << "\n";
    return exit_code_for(rc);
  }
  emit(opt, opt.format == "dot" ? "analysis.dot" : "analysis.json", out.str());
  return 0;
}

int cmd_simulate(const Options& opt) {
  RunHandle handle;
  int rc = open_run(opt, handle);
  if (rc != CLRE_OK) return exit_code_for(rc);
  unsigned long long seed = 0;
  const unsigned long long* seed_ptr = nullptr;
  if (opt.seed) {
    seed = *opt.seed;
    seed_ptr = &seed;
  }
  const double* sweep =
      opt.epsilon_sweep.empty() ? nullptr : opt.epsilon_sweep.data();
  CString out, trajectory;
  rc = clre_simulate(handle.run, seed_ptr, sweep, opt.epsilon_sweep.size(),
                     &out.s, &trajectory.s);
  if (rc != CLRE_OK) {
    std::cerr << "error: " << clre_last_error(handle.run) << "\n";
    return exit_code_for(rc);
  }
  if (opt.format == "csv") {
    emit(opt, "occupancy.csv", occupancy_csv(json::parse(out.str())));
  } else {
    emit(opt, "occupancy.json", out.str());
  }
  std::string traj = trajectory.str();
  if (!traj.empty()) {
    if (opt.out_dir.empty()) {
      std::cerr << "note: trajectory export requires --out; skipped\n";
    } else {
      emit(opt, "trajectory.csv", traj);
    }
  }
  return 0;
}

int cmd_verify(const Options& opt) {
  RunHandle handle;
  int rc = open_run(opt, handle);
  if (rc != CLRE_OK) return exit_code_for(rc);
  CString out;
  rc = clre_verify(handle.run, &out.s);
  if (rc == CLRE_OK || rc == CLRE_CHECK_FAILED) {
    json report = json::parse(out.str());
    for (const auto& check : report.at("checks")) {
      std::cerr << (check.at("pass").get<bool>() ? "PASS " : "FAIL ")
                << check.at("name").get<std::string>();
      if (check.contains("detail"))
        std::cerr << " — " << check.at("detail").get<std::string>();
      std::cerr << "\n";
    }
    emit(opt, "verify.json", out.str());
  } else {
    std::cerr << "error: " << clre_last_error(handle.run) << "\n";
  }
  return exit_code_for(rc);
}

int cmd_aggregative(const Options& opt) {
  RunHandle handle;
  int rc = open_run(opt, handle);
  if (rc != CLRE_OK) return exit_code_for(rc);
  const double* eta = opt.eta ? &*opt.eta : nullptr;
  CString out;
  rc = clre_aggregative(handle.run, eta, &out.s);
  if (rc != CLRE_OK) {
    std::cerr << "error: " << clre_last_error(handle.run) << "\n";
    return exit_code_for(rc);
  }
  emit(opt, "aggregative.json", out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Evolutionary Cournot dynamics: benchmarks, stochastic-stability "
      "analysis, and Monte Carlo simulation"};
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed_value = 0;
  double eta_value = 0.0;

  auto add_common = [&](CLI::App* sub, bool with_seed, bool with_eta,
                        bool with_sweep, bool with_dot) {
    sub->add_option("--config", opt.config_path, "Path to run config JSON")
        ->required();
    sub->add_option("--out", opt.out_dir,
                    "Directory for output files (default: stdout)");
    std::string formats = with_dot ? "json,dot" : "json,csv";
    sub->add_option("--format", opt.format, "Output format (" + formats + ")")
        ->check(with_dot ? CLI::IsMember({"json", "dot"})
                         : CLI::IsMember({"json", "csv"}));
    if (with_seed) {
      sub->add_option("--seed", seed_value, "Master RNG seed override")
          ->each([&](const std::string& s) { opt.seed = std::stoull(s); });
    }
    if (with_eta) {
      sub->add_option("--eta", eta_value,
                      "Rule-mistake rarity exponent override (>= 1)")
          ->each([&](const std::string& s) { opt.eta = std::stod(s); });
    }
    if (with_sweep) {
      sub->add_option("--epsilon-sweep", opt.epsilon_sweep,
                      "Comma-separated mistake probabilities to sweep")
          ->delimiter(',');
    }
  };

  CLI::App* bench = app.add_subcommand(
      "bench", "Benchmark quantities, advantage sets, and long-run bounds");
  add_common(bench, false, false, false, false);
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Resistance-tree computation of the long-run equilibria");
  add_common(analyze, false, true, false, true);
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo occupancy estimation of the perturbed chain");
  add_common(simulate, true, false, true, false);
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the model-regularity and rule-principle check suite");
  add_common(verify, false, false, false, false);
  CLI::App* aggregative = app.add_subcommand(
      "aggregative", "Aggregative-game analysis (ATS, Nash, long-run states)");
  add_common(aggregative, false, true, false, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) return cmd_bench(opt);
    if (analyze->parsed()) return cmd_analyze(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (aggregative->parsed()) return cmd_aggregative(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
