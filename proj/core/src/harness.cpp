#include "decsliding/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "decsliding/aasdcs.hpp"
#include "decsliding/adpd.hpp"
#include "decsliding/dataset.hpp"

namespace decsliding {

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "quadratic") return ProblemKind::quadratic;
  if (name == "svm_l1") return ProblemKind::svm_l1;
  if (name == "svm_l2") return ProblemKind::svm_l2;
  throw ArgumentError("unknown problem '" + name + "' (expected quadratic, svm_l1 or svm_l2)");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::svm_l1: return "svm_l1";
    case ProblemKind::svm_l2: return "svm_l2";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "adpd") return Algorithm::adpd;
  if (name == "aasdcs") return Algorithm::aasdcs;
  throw ArgumentError("unknown algorithm '" + name + "' (expected adpd or aasdcs)");
}

std::string to_string(Algorithm algo) { return algo == Algorithm::adpd ? "adpd" : "aasdcs"; }

Regime ExperimentConfig::effective_regime() const {
  if (regime) return *regime;
  return algorithm == Algorithm::adpd ? Regime::adpd : Regime::aasdcs_convex;
}

ReferenceMethod ExperimentConfig::effective_reference() const {
  if (reference) return *reference;
  return problem == ProblemKind::quadratic ? ReferenceMethod::closed_form
                                           : ReferenceMethod::long_run_subgradient;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "topology", "m", "p", "graph_seed", "problem", "dim", "q", "sigma", "problem_seed", "radius",
      "dataset", "subsample", "subsample_seed", "reg_weight", "algo", "regime", "N", "seeds", "D", "T",
      "out", "log_every", "record_wall_time", "reference", "reference_budget", "reference_tol",
      "threads"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

// "1,2,5-8" -> 1 2 5 6 7 8
std::vector<std::uint64_t> parse_seeds(const std::string& v) {
  std::vector<std::uint64_t> out;
  std::istringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    const auto dash = tok.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_int<std::uint64_t>("seeds", tok));
      continue;
    }
    const auto lo = parse_int<std::uint64_t>("seeds", trim(tok.substr(0, dash)));
    const auto hi = parse_int<std::uint64_t>("seeds", trim(tok.substr(dash + 1)));
    if (hi < lo || hi - lo > 100000) throw ConfigError("key 'seeds': bad range '" + tok + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("key 'seeds': no seeds given");
  return out;
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& v, bool& have_N) {
  if (key == "topology") {
    cfg.topology.kind = wrap(key, [&] { return parse_topology_kind(v); });
  } else if (key == "m") {
    cfg.topology.m = parse_int<int>(key, v);
  } else if (key == "p") {
    cfg.topology.p = parse_real(key, v);
  } else if (key == "graph_seed") {
    cfg.topology.seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "problem") {
    cfg.problem = wrap(key, [&] { return parse_problem_kind(v); });
  } else if (key == "dim") {
    cfg.dim = parse_int<int>(key, v);
  } else if (key == "q") {
    cfg.q = parse_real(key, v);
  } else if (key == "sigma") {
    cfg.noise_sigma = parse_real(key, v);
  } else if (key == "problem_seed") {
    cfg.problem_seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "radius") {
    cfg.radius = parse_real(key, v);
  } else if (key == "dataset") {
    cfg.dataset = v;
  } else if (key == "subsample") {
    cfg.subsample = parse_int<std::size_t>(key, v);
  } else if (key == "subsample_seed") {
    cfg.subsample_seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "reg_weight") {
    cfg.reg_weight = parse_real(key, v);
  } else if (key == "algo") {
    cfg.algorithm = wrap(key, [&] { return parse_algorithm(v); });
  } else if (key == "regime") {
    cfg.regime = wrap(key, [&] { return parse_regime(v); });
  } else if (key == "N") {
    cfg.N = parse_int<std::int64_t>(key, v);
    have_N = true;
  } else if (key == "seeds") {
    cfg.seeds = parse_seeds(v);
  } else if (key == "D") {
    cfg.D = parse_real(key, v);
  } else if (key == "T") {
    cfg.T = parse_int<int>(key, v);
  } else if (key == "out") {
    cfg.out_dir = v;
  } else if (key == "log_every") {
    cfg.log_every = parse_int<std::int64_t>(key, v);
  } else if (key == "record_wall_time") {
    cfg.record_wall_time = parse_bool(key, v);
  } else if (key == "reference") {
    cfg.reference = wrap(key, [&] { return parse_reference_method(v); });
  } else if (key == "reference_budget") {
    cfg.reference_budget = parse_int<std::int64_t>(key, v);
  } else if (key == "reference_tol") {
    cfg.reference_tol = parse_real(key, v);
  } else if (key == "threads") {
    cfg.threads = parse_int<unsigned>(key, v);
  } else {
    std::string valid;
    for (const auto& k : config_keys()) valid += (valid.empty() ? "" : ", ") + k;
    throw ConfigError("unknown key '" + key + "'; valid keys: " + valid);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    values[key] = trim(line.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides) values[k] = v;

  ExperimentConfig cfg;
  bool have_N = false;
  for (const auto& [k, v] : values) apply(cfg, k, v, have_N);
  if (!have_N) throw ConfigError("missing required key 'N' (outer iteration budget)");
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.topology.m < 2) throw ConfigError("m must be >= 2");
  if (!(cfg.topology.p > 0.0 && cfg.topology.p <= 1.0)) throw ConfigError("p must lie in (0, 1]");
  if (cfg.N < 1) throw ConfigError("N must be >= 1");
  if (cfg.N > INT32_MAX) throw ConfigError("N is too large");
  if (cfg.log_every < 1) throw ConfigError("log_every must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
  if (cfg.T && *cfg.T < 1) throw ConfigError("T must be >= 1");
  if (cfg.D && !(*cfg.D > 0.0)) throw ConfigError("D must be > 0");
  if (cfg.reference_budget < 1) throw ConfigError("reference_budget must be >= 1");
  if (!(cfg.reference_tol > 0.0)) throw ConfigError("reference_tol must be > 0");

  const Regime regime = cfg.effective_regime();
  if (cfg.algorithm == Algorithm::adpd) {
    if (regime != Regime::adpd) throw ConfigError("algo=adpd requires regime=adpd");
    if (cfg.problem != ProblemKind::quadratic) {
      throw ConfigError("algo=adpd requires an objective with an exact prox (quadratic); " +
                        to_string(cfg.problem) + " has none, use algo=aasdcs");
    }
    if (cfg.T || cfg.D) throw ConfigError("T and D apply to algo=aasdcs only");
  } else if (regime == Regime::adpd) {
    throw ConfigError("algo=aasdcs requires regime convex or strongly_convex");
  }
  if (regime == Regime::aasdcs_strongly_convex && cfg.problem == ProblemKind::svm_l1) {
    throw ConfigError("regime=strongly_convex requires mu > 0, but svm_l1 has mu = 0");
  }

  if (cfg.problem == ProblemKind::quadratic) {
    if (cfg.dim < 1) throw ConfigError("dim must be >= 1");
    if (!(cfg.q > 0.0)) throw ConfigError("q must be > 0");
    if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
    if (cfg.radius && !(*cfg.radius >= 0.0)) throw ConfigError("radius must be >= 0");
  } else {
    if (cfg.dataset.empty()) throw ConfigError(to_string(cfg.problem) + " requires key 'dataset'");
    if (cfg.effective_reference() == ReferenceMethod::closed_form) {
      throw ConfigError("reference=closed_form is available for quadratic problems only");
    }
  }
}

namespace {

AgentVectors quadratic_centers(const ExperimentConfig& cfg) {
  Rng rng = RngStreams(cfg.problem_seed).auxiliary(0);
  std::normal_distribution<double> normal(0.0, 1.0);
  AgentVectors centers;
  for (int i = 0; i < cfg.topology.m; ++i) {
    Vector c(cfg.dim);
    for (int j = 0; j < cfg.dim; ++j) c[j] = normal(rng);
    centers.push_back(std::move(c));
  }
  return centers;
}

ProblemSet build_problems(const ExperimentConfig& cfg, const Topology& topo) {
  if (cfg.problem == ProblemKind::quadratic) {
    QuadraticOptions opts;
    opts.noise_sigma = cfg.noise_sigma;
    if (cfg.radius) opts.constraint = Constraint::ball(*cfg.radius);
    return make_quadratic_problem(quadratic_centers(cfg), cfg.q, opts);
  }
  LibsvmOptions lo;
  lo.subsample = cfg.subsample;
  lo.subsample_seed = cfg.subsample_seed;
  const Dataset data = load_libsvm(cfg.dataset, lo);
  SvmOptions so;
  so.reg_weight = cfg.reg_weight;
  return make_svm_problem(data, topo,
                          cfg.problem == ProblemKind::svm_l1 ? Regularizer::l1 : Regularizer::l2, so);
}

OuterSchedule build_schedule(const ExperimentConfig& cfg, const Topology& topo,
                             const ProblemClassConstants& consts) {
  const int N = static_cast<int>(cfg.N);
  switch (cfg.effective_regime()) {
    case Regime::adpd:
      return adpd_schedule(topo.size(), topo.max_degree(), N);
    case Regime::aasdcs_convex:
      return aasdcs_convex_schedule(topo.size(), topo.max_degree(), N, consts, cfg.D, cfg.T);
    case Regime::aasdcs_strongly_convex:
      if (!(consts.mu > 0.0)) {
        throw ConfigError("regime=strongly_convex requires mu > 0 for every agent");
      }
      return aasdcs_strong_schedule(topo.size(), topo.max_degree(), N, consts, cfg.D, cfg.T);
  }
  throw ConfigError("unknown regime");
}

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* root = std::getenv(kOutputRootEnv);
  const std::filesystem::path base = root && *root ? root : "runs";
  return base / (to_string(cfg.algorithm) + "_" + to_string(cfg.problem));
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  Topology topo = build_topology(cfg.topology);
  ProblemSet problems = build_problems(cfg, topo);
  const ProblemClassConstants consts = aggregate_constants(problems);
  OuterSchedule sched = build_schedule(cfg, topo, consts);
  ValidationReport report = validate_schedule(sched, topo.size(), topo.max_degree(), consts);
  AgentVectors x0(static_cast<std::size_t>(topo.size()), Vector::Zero(problems.front()->dim()));
  return Experiment{std::move(topo), std::move(problems), consts, std::move(sched), std::move(report),
                    std::move(x0)};
}

std::string problem_fingerprint(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << to_string(cfg.problem) << '|' << to_string(cfg.topology.kind) << '|' << cfg.topology.m << '|'
     << cfg.dim << '|' << format_double(cfg.q) << '|' << cfg.problem_seed << '|'
     << (cfg.radius ? format_double(*cfg.radius) : "-") << '|' << cfg.dataset << '|' << cfg.subsample
     << '|' << cfg.subsample_seed << '|' << (cfg.reg_weight ? format_double(*cfg.reg_weight) : "-")
     << '|' << to_string(cfg.effective_reference()) << '|' << format_double(cfg.reference_tol);
  // FNV-1a, stable across platforms.
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

ReferenceSolution cached_reference(const ExperimentConfig& cfg, const ProblemSet& problems) {
  const auto compute = [&] {
    return centralized_reference(problems, cfg.effective_reference(), cfg.reference_budget,
                                 cfg.reference_tol);
  };
  if (cfg.effective_reference() == ReferenceMethod::closed_form) return compute();
  const std::filesystem::path dir = resolve_out_dir(cfg);
  const std::filesystem::path file = dir / "reference.txt";
  const std::string fp = problem_fingerprint(cfg);
  if (std::ifstream in(file); in) {
    std::string key, stored;
    if (in >> key >> stored && key == "fingerprint" && stored == fp) {
      try {
        return read_reference(in);
      } catch (const ParseError&) {
        // fall through and recompute
      }
    }
  }
  ReferenceSolution ref = compute();
  std::filesystem::create_directories(dir);
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  out << "fingerprint " << fp << '\n';
  write_reference(out, ref);
  return ref;
}

std::vector<std::int64_t> summary_checkpoints(std::int64_t N, std::int64_t log_every) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 1; p <= N; p *= 2) {
    if (p % log_every == 0) out.push_back(p);
  }
  if (out.empty() || out.back() != N) out.push_back(N);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunTrace>& traces,
                                  const std::vector<std::int64_t>& checkpoints, double F_star) {
  if (traces.empty()) throw ArgumentError("summarize: no traces");
  std::vector<SummaryRow> rows;
  const double n = static_cast<double>(traces.size());
  const auto mean_std = [n](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
  };
  for (const std::int64_t k : checkpoints) {
    std::vector<double> obj, feas, gap, grads;
    SummaryRow row;
    row.k = k;
    for (const auto& t : traces) {
      const auto it = std::find_if(t.rows.begin(), t.rows.end(), [k](const TraceRow& r) { return r.k == k; });
      if (it == t.rows.end()) throw ArgumentError("summarize: trace has no row at k = " + std::to_string(k));
      row.comm_rounds = it->comm_rounds;
      obj.push_back(it->objective);
      feas.push_back(it->feasibility);
      gap.push_back(it->objective - F_star);
      grads.push_back(static_cast<double>(it->grad_evals));
    }
    row.grad_evals_mean = mean_std(grads).first;
    std::tie(row.objective_mean, row.objective_std) = mean_std(obj);
    std::tie(row.feasibility_mean, row.feasibility_std) = mean_std(feas);
    std::tie(row.primal_gap_mean, row.primal_gap_std) = mean_std(gap);
    row.seeds = traces.size();
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << r.comm_rounds << ',' << format_double(r.grad_evals_mean) << ','
       << format_double(r.objective_mean) << ',' << format_double(r.objective_std) << ','
       << format_double(r.feasibility_mean) << ',' << format_double(r.feasibility_std) << ','
       << format_double(r.primal_gap_mean) << ',' << format_double(r.primal_gap_std) << ',' << r.seeds
       << '\n';
  }
}

RunResult run_single(const Experiment& exp, const ExperimentConfig& cfg, std::uint64_t seed) {
  RunOptions opts;
  opts.log_every = cfg.log_every;
  opts.seed = seed;
  opts.record_wall_time = cfg.record_wall_time;
  if (cfg.algorithm == Algorithm::adpd) {
    return adpd_run(exp.topology, exp.problems, exp.schedule, exp.x0, opts);
  }
  return aasdcs_run(exp.topology, exp.problems, exp.schedule, exp.x0, opts);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  const Experiment exp = build_experiment(cfg);
  if (!exp.report.ok()) {
    throw ScheduleInfeasibleError("schedule violates its parameter conditions:\n" + exp.report.summary());
  }
  const std::filesystem::path dir = resolve_out_dir(cfg);
  std::filesystem::create_directories(dir);
  const ReferenceSolution ref = cached_reference(cfg, exp.problems);

  ExperimentSummary summary;
  summary.F_star = ref.F_star;
  std::vector<RunTrace> traces(cfg.seeds.size());
  summary.trace_files.resize(cfg.seeds.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t idx = next++; idx < cfg.seeds.size(); idx = next++) {
      try {
        const std::uint64_t seed = cfg.seeds[idx];
        RunResult res = run_single(exp, cfg, seed);
        const auto path = dir / (to_string(cfg.algorithm) + "_" + std::to_string(seed) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        res.trace.write_csv(out);
        if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
        traces[idx] = std::move(res.trace);
        summary.trace_files[idx] = path;
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.seeds.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  summary.rows = summarize(traces, summary_checkpoints(cfg.N, cfg.log_every), ref.F_star);
  summary.summary_file = dir / "summary.csv";
  std::ofstream out(summary.summary_file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + summary.summary_file.string() + "'");
  write_summary_csv(out, summary.rows);
  return summary;
}

}  // namespace decsliding
