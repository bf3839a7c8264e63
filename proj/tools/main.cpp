// Command-line harness: run, validate, reference.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decsliding/harness.hpp"

namespace ds = decsliding;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kInfeasible = 3,
  kNoReference = 4,
};

struct Flags {
  std::string config;
  std::string algo;
  std::string m;
  std::string N;
  std::string seeds;
  std::string out;
  std::vector<std::string> sets;

  std::map<std::string, std::string> overrides() const {
    std::map<std::string, std::string> o;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ds::ConfigError("--set expects key=value, got '" + kv + "'");
      o[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!algo.empty()) o["algo"] = algo;
    if (!m.empty()) o["m"] = m;
    if (!N.empty()) o["N"] = N;
    if (!seeds.empty()) o["seeds"] = seeds;
    if (!out.empty()) o["out"] = out;
    return o;
  }
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key=value config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--algo", f.algo, "adpd or aasdcs");
  cmd->add_option("--m", f.m, "number of agents");
  cmd->add_option("--N", f.N, "outer iterations");
  cmd->add_option("--seeds", f.seeds, "comma list, ranges allowed (1-20)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--set", f.sets, "override any config key (key=value), repeatable");
}

int cmd_run(const Flags& f) {
  const auto cfg = ds::load_config(f.config, f.overrides());
  const auto summary = ds::run_experiment(cfg);
  std::cout << "F* = " << ds::format_double(summary.F_star) << '\n';
  std::cout << "k,comm_rounds,grad_evals,objective,feasibility\n";
  for (const auto& r : summary.rows) {
    std::cout << r.k << ',' << r.comm_rounds << ',' << ds::format_double(r.grad_evals_mean) << ','
              << ds::format_double(r.objective_mean) << ',' << ds::format_double(r.feasibility_mean)
              << '\n';
  }
  std::cout << "wrote " << summary.trace_files.size() << " traces and " << summary.summary_file.string()
            << '\n';
  return kOk;
}

int cmd_validate(const Flags& f, const std::string& dump) {
  const auto cfg = ds::load_config(f.config, f.overrides());
  const auto exp = ds::build_experiment(cfg);
  const auto& s = exp.schedule;
  std::cout << "regime " << ds::to_string(s.regime) << ", m = " << s.m << ", d_max = " << s.d_max
            << ", N = " << s.N << '\n';
  if (s.has_inner_loop()) {
    std::cout << "D = " << ds::format_double(s.D) << ", T_1 = " << s.T[1] << ", T_N = " << s.T.back()
              << '\n';
  }
  std::cout << exp.report.summary();
  if (!dump.empty()) {
    std::ofstream out(dump);
    if (!out) throw std::runtime_error("cannot write '" + dump + "'");
    ds::write_schedule_csv(out, s);
  }
  return exp.report.ok() ? kOk : kInfeasible;
}

int cmd_reference(const Flags& f) {
  const auto cfg = ds::load_config(f.config, f.overrides());
  const auto exp = ds::build_experiment(cfg);
  const auto ref = ds::cached_reference(cfg, exp.problems);
  std::cout << "method " << ds::to_string(ref.method) << "\nF* = " << ds::format_double(ref.F_star)
            << "\ncertificate " << ds::format_double(ref.certificate) << "\niterations "
            << ref.iterations << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized primal-dual solvers over simulated networks"};
  app.require_subcommand(1);

  Flags run_flags, validate_flags, reference_flags;
  std::string dump;
  auto* run = app.add_subcommand("run", "run a seed sweep and write traces");
  add_common(run, run_flags);
  auto* validate = app.add_subcommand("validate", "build and check the schedule only");
  add_common(validate, validate_flags);
  validate->add_option("--dump-schedule", dump, "write the schedule as CSV");
  auto* reference = app.add_subcommand("reference", "compute and cache the centralized reference");
  add_common(reference, reference_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*validate) return cmd_validate(validate_flags, dump);
    return cmd_reference(reference_flags);
  } catch (const ds::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ds::ScheduleInfeasibleError& e) {
    std::cerr << "schedule infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ds::ReferenceNotConvergedError& e) {
    std::cerr << "reference not converged: " << e.what() << '\n';
    return kNoReference;
  } catch (const ds::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
