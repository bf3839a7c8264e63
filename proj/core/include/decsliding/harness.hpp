#ifndef DECSLIDING_HARNESS_HPP
#define DECSLIDING_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decsliding/graph.hpp"
#include "decsliding/metrics.hpp"
#include "decsliding/network_state.hpp"
#include "decsliding/objectives.hpp"
#include "decsliding/schedules.hpp"

namespace decsliding {

enum class ProblemKind { quadratic, svm_l1, svm_l2 };
enum class Algorithm { adpd, aasdcs };

ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(ProblemKind kind);
Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algo);

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "DECSLIDING_OUT";

struct ExperimentConfig {
  TopologySpec topology{TopologyKind::ring, 4, 0.5, 0};

  ProblemKind problem = ProblemKind::quadratic;
  // quadratic: centers drawn N(0, I) from problem_seed
  int dim = 2;
  double q = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t problem_seed = 1;
  std::optional<double> radius;
  // svm
  std::string dataset;
  std::size_t subsample = 0;
  std::uint64_t subsample_seed = 0;
  std::optional<double> reg_weight;

  Algorithm algorithm = Algorithm::aasdcs;
  std::optional<Regime> regime;  // defaults: adpd for adpd, convex for aasdcs
  std::int64_t N = 0;
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> D;
  std::optional<int> T;
  std::filesystem::path out_dir;
  std::int64_t log_every = 1;
  bool record_wall_time = false;

  std::optional<ReferenceMethod> reference;  // closed_form for quadratics, long-run for svm
  std::int64_t reference_budget = 2'000'000;
  double reference_tol = 1e-4;
  unsigned threads = 0;  // 0: hardware concurrency

  Regime effective_regime() const;
  ReferenceMethod effective_reference() const;
};

/// Every key parse_config accepts.
const std::vector<std::string>& config_keys();

/// Flat "key = value" text, '#' starts a comment. overrides (for example
/// from command-line flags) replace file values. Unknown keys, malformed
/// values, a missing N, and inconsistent combinations throw ConfigError.
ExperimentConfig parse_config(const std::string& text,
                              const std::map<std::string, std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::map<std::string, std::string>& overrides = {});

/// Cross-field checks that need no data: algorithm/regime agreement and
/// the exact-prox requirement of adpd.
void validate_config(const ExperimentConfig& cfg);

struct Experiment {
  Topology topology;
  ProblemSet problems;
  ProblemClassConstants constants;
  OuterSchedule schedule;
  ValidationReport report;
  AgentVectors x0;
};

/// Builds topology, problems and schedule and validates the schedule. Does
/// not throw on a failed validation; callers inspect report.
Experiment build_experiment(const ExperimentConfig& cfg);

/// Stable fingerprint of the keys that determine the problem instance.
std::string problem_fingerprint(const ExperimentConfig& cfg);

/// Reads <out_dir>/reference.txt when its fingerprint matches, otherwise
/// computes the reference and writes the cache. Closed-form references are
/// recomputed every time and never written.
ReferenceSolution cached_reference(const ExperimentConfig& cfg, const ProblemSet& problems);

struct SummaryRow {
  std::int64_t k = 0;
  std::int64_t comm_rounds = 0;
  double grad_evals_mean = 0.0;
  double objective_mean = 0.0;
  double objective_std = 0.0;
  double feasibility_mean = 0.0;
  double feasibility_std = 0.0;
  double primal_gap_mean = 0.0;
  double primal_gap_std = 0.0;
  std::size_t seeds = 0;
};

struct ExperimentSummary {
  std::vector<SummaryRow> rows;
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path summary_file;
  double F_star = 0.0;
};

inline constexpr const char* kSummaryHeader =
    "k,comm_rounds,grad_evals_mean,objective_mean,objective_std,feasibility_mean,feasibility_std,"
    "primal_gap_mean,primal_gap_std,seeds";

/// Checkpoints reported in summary.csv: powers of two on the log_every grid.
std::vector<std::int64_t> summary_checkpoints(std::int64_t N, std::int64_t log_every);

/// Aggregates per-seed traces at the checkpoints (sample std, 0 for one seed).
std::vector<SummaryRow> summarize(const std::vector<RunTrace>& traces,
                                  const std::vector<std::int64_t>& checkpoints, double F_star);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Runs one seed with the configured algorithm.
RunResult run_single(const Experiment& exp, const ExperimentConfig& cfg, std::uint64_t seed);

/// Full pipeline: builds, validates (ScheduleInfeasibleError on failure),
/// runs every seed concurrently, writes <out>/<algo>_<seed>.csv and
/// <out>/summary.csv.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace decsliding

#endif
