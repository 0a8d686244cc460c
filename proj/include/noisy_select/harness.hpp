#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "noisy_select/adversary.hpp"
#include "noisy_select/constants.hpp"
#include "noisy_select/context.hpp"
#include "noisy_select/ground_truth.hpp"
#include "noisy_select/max.hpp"
#include "noisy_select/oracle.hpp"
#include "noisy_select/rank.hpp"
#include "noisy_select/reduction.hpp"
#include "noisy_select/threshold.hpp"
#include "noisy_select/topk.hpp"
#include "noisy_select/tower.hpp"

namespace noisy_select {

enum class Algorithm : std::uint8_t {
  OneRoundMax,
  ParallelMax,
  ParallelMin,
  ParallelMaxValue,  // ParallelMax on a value session through the comparison adapter
  ThresholdV,
  ThresholdMeta,
  TopK,
  FallbackSort,
  ApproxTopK,
  ParameterizedTopK,
  ObliviousTopK,
  DistinctTop,
};

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::OneRoundMax, Algorithm::ParallelMax,  Algorithm::ParallelMin,       Algorithm::ParallelMaxValue,
    Algorithm::ThresholdV,  Algorithm::ThresholdMeta, Algorithm::TopK,             Algorithm::FallbackSort,
    Algorithm::ApproxTopK,  Algorithm::ParameterizedTopK, Algorithm::ObliviousTopK, Algorithm::DistinctTop,
};

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::OneRoundMax: return "one_round_max";
    case Algorithm::ParallelMax: return "parallel_max";
    case Algorithm::ParallelMin: return "parallel_min";
    case Algorithm::ParallelMaxValue: return "parallel_max_value";
    case Algorithm::ThresholdV: return "threshold_v";
    case Algorithm::ThresholdMeta: return "threshold_meta";
    case Algorithm::TopK: return "top_k";
    case Algorithm::FallbackSort: return "fallback_sort_topk";
    case Algorithm::ApproxTopK: return "approx_top_k";
    case Algorithm::ParameterizedTopK: return "parameterized_top_k";
    case Algorithm::ObliviousTopK: return "oblivious_top_k";
    case Algorithm::DistinctTop: return "distinct_top";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms)
    if (algorithm_name(a) == name) return a;
  throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

inline Model model_for(Algorithm a) {
  switch (a) {
    case Algorithm::ParallelMaxValue:
    case Algorithm::ThresholdV:
    case Algorithm::ThresholdMeta:
    case Algorithm::DistinctTop: return Model::Value;
    default: return Model::Comparison;
  }
}

inline std::string describe_adversary(const AdversarySpec& spec) {
  std::string out(adversary_name(spec.kind));
  if (spec.kind != AdversaryKind::BucketLie) return out;
  if (spec.bucket_size) out += ":size=" + std::to_string(*spec.bucket_size);
  if (spec.bucket_below) {
    std::ostringstream b;
    b << *spec.bucket_below;
    out += ":below=" + b.str();
  }
  if (spec.phase_one_queries != AdversarySpec{}.phase_one_queries) out += ":phase1=" + std::to_string(spec.phase_one_queries);
  return out;
}

/// One Monte Carlo cell.
struct CellConfig {
  Algorithm algorithm = Algorithm::ParallelMax;
  InstanceSpec instance;
  AdversarySpec adversary;
  std::size_t k = 1;
  std::optional<double> v;          // threshold; defaults to the instance's v
  double delta = 1.0 / 3.0;
  std::optional<int> r;             // defaults to log*_2(n) + 4 (twice that for approx_top_k)
  double gamma = 1.0;
  std::optional<std::size_t> lambda;  // parameterized_top_k; default: the instance's profile at k
  std::optional<std::size_t> kappa;
  std::size_t trials = 300;
  std::uint64_t seed = 1;
  Constants constants;

  int rounds(std::size_t n) const {
    if (r) return *r;
    const int base = log_star(static_cast<double>(n), 2.0) + 4;
    return algorithm == Algorithm::ApproxTopK ? 2 * base : base;
  }
  double threshold() const { return v.value_or(instance.v); }
};

struct TrialResult {
  bool success = false;
  bool fail_outcome = false;
  Accounting accounting;
  int depth = 0;
  std::uint64_t block_sum = 0;
  std::uint64_t seed = 0;
};

/// Aggregate of one cell. `k` holds k_v for threshold cells.
struct ExperimentRecord {
  std::string algorithm;
  std::string instance;
  std::uint64_t instance_hash = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double v = 0.0;
  double delta = 0.0;
  int r = 0;
  double gamma = 0.0;
  std::size_t lambda = 0;
  std::size_t kappa = 0;
  std::string adversary;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;       // wrong outputs
  std::uint64_t fail_outcomes = 0;  // FAIL returned
  double mean_queries = 0.0;
  std::uint64_t max_queries = 0;
  double mean_rounds = 0.0;
  std::uint64_t max_rounds = 0;
  int max_depth = 0;
  std::uint64_t max_block_sum = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;

  double success_rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

namespace detail {

inline void check(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

inline KProfile profile_or_default(const Instance& inst, std::size_t k) {
  return k >= 1 && k <= inst.size() ? inst.profile(k) : KProfile{};
}

}  // namespace detail

/// Rejects combinations the algorithms do not accept, naming the violated precondition.
inline void validate(const CellConfig& cfg, const Instance& inst) {
  using detail::check;
  const std::size_t n = inst.size();
  const auto name = std::string(algorithm_name(cfg.algorithm)) + ": ";
  check(cfg.delta > 0.0 && cfg.delta <= 1.0, name + "delta must lie in (0, 1]");
  switch (cfg.algorithm) {
    case Algorithm::ParallelMax:
    case Algorithm::ParallelMin:
    case Algorithm::ParallelMaxValue:
      check(n < cfg.constants.min_parallel_n || cfg.rounds(n) >= 5, name + "needs r >= 5");
      break;
    case Algorithm::TopK: check(cfg.k >= 1 && 2 * cfg.k <= n, name + "needs 1 <= k <= n/2"); break;
    case Algorithm::FallbackSort:
    case Algorithm::ObliviousTopK: check(cfg.k >= 1 && cfg.k <= n, name + "needs 1 <= k <= n"); break;
    case Algorithm::ApproxTopK:
      check(cfg.k >= 1 && cfg.k <= n, name + "needs 1 <= k <= n");
      check(cfg.gamma > 0.0, name + "needs gamma > 0");
      break;
    case Algorithm::ParameterizedTopK: {
      check(cfg.k >= 1 && cfg.k <= n, name + "needs 1 <= k <= n");
      const auto p = detail::profile_or_default(inst, cfg.k);
      const auto lambda = cfg.lambda.value_or(p.lambda);
      const auto kappa = cfg.kappa.value_or(p.kappa);
      check(lambda >= cfg.k || lambda + kappa >= cfg.k, name + "needs lambda + kappa >= k");
      break;
    }
    case Algorithm::DistinctTop:
      check(inst.all_distinct(), name + "needs an instance with all-distinct values");
      check(cfg.k >= 1 && cfg.k <= n, name + "needs 1 <= k <= n");
      break;
    default: break;
  }
}

/// Trial i of a cell: fresh session and algorithm coins from seed + i.
inline TrialResult run_trial(const CellConfig& cfg, const std::shared_ptr<const Instance>& instance, std::size_t i) {
  const Instance& inst = *instance;
  const std::uint64_t seed = cfg.seed + i;
  Context ctx(seed, cfg.constants);
  OracleSession session(instance, Adversary::make(cfg.adversary, inst, seed), seed, model_for(cfg.algorithm));
  const auto ids = inst.ids();
  const int r = cfg.rounds(inst.size());
  const std::size_t k = cfg.k;
  Outcome out;
  std::function<bool(const IdSet&)> judge;
  auto one_of = [](IdSet allowed) {
    return [allowed = std::move(allowed)](const IdSet& got) {
      return got.size() == 1 && std::binary_search(allowed.begin(), allowed.end(), got[0]);
    };
  };
  switch (cfg.algorithm) {
    case Algorithm::OneRoundMax:
      out = one_round_max(session, ctx, ids, cfg.delta);
      judge = one_of(truth_max(inst));
      break;
    case Algorithm::ParallelMax:
      out = parallel_max(session, ctx, ids, r, cfg.delta);
      judge = one_of(truth_max(inst));
      break;
    case Algorithm::ParallelMin:
      out = parallel_min(session, ctx, ids, r, cfg.delta);
      judge = one_of(truth_min(inst));
      break;
    case Algorithm::ParallelMaxValue: {
      ComparisonFromValue adapter(session, cfg.constants.reduction_repeats);
      out = parallel_max(adapter, ctx, ids, r, cfg.delta);
      judge = one_of(truth_max(inst));
      break;
    }
    case Algorithm::ThresholdV:
    case Algorithm::ThresholdMeta: {
      const double v = cfg.threshold();
      out = cfg.algorithm == Algorithm::ThresholdV ? threshold_v(session, ctx, ids, v) : threshold_meta(session, ctx, ids, v);
      judge = [want = truth_threshold(inst, v)](const IdSet& got) { return got == want; };
      break;
    }
    case Algorithm::TopK:
      out = top_k(session, ctx, ids, k, r, cfg.delta);
      judge = [&](const IdSet& got) { return valid_top_k(inst, k, got); };
      break;
    case Algorithm::FallbackSort:
      out = fallback_sort_topk(session, ctx, ids, k, cfg.delta);
      judge = [&](const IdSet& got) { return valid_top_k(inst, k, got); };
      break;
    case Algorithm::ApproxTopK:
      out = approx_top_k(session, ctx, ids, k, r, cfg.gamma, cfg.delta);
      judge = [&](const IdSet& got) { return valid_approx_top_k(inst, k, cfg.gamma, got); };
      break;
    case Algorithm::ParameterizedTopK: {
      const auto p = detail::profile_or_default(inst, k);
      out = parameterized_top_k(session, ctx, ids, k, cfg.lambda.value_or(p.lambda), cfg.kappa.value_or(p.kappa), r,
                                cfg.delta);
      judge = [&](const IdSet& got) { return valid_top_k(inst, k, got); };
      break;
    }
    case Algorithm::ObliviousTopK:
      out = oblivious_top_k(session, ctx, ids, k);
      judge = [&](const IdSet& got) { return valid_top_k(inst, k, got); };
      break;
    case Algorithm::DistinctTop:
      out = distinct_top(session, ctx, ids, k);
      judge = [&](const IdSet& got) { return valid_top_k(inst, k, got); };
      break;
  }
  TrialResult t;
  t.seed = seed;
  t.accounting = out.accounting;
  t.depth = out.depth;
  t.block_sum = out.block_sum;
  t.fail_outcome = out.failed();
  t.success = !t.fail_outcome && judge(*out.ids);
  return t;
}

/// Runs every trial of a cell and aggregates. T = 0 creates no sessions.
inline ExperimentRecord run_cell(const CellConfig& cfg, std::vector<TrialResult>* trials_out = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  auto instance = std::make_shared<const Instance>(generate(cfg.instance));
  validate(cfg, *instance);
  ExperimentRecord rec;
  rec.algorithm = algorithm_name(cfg.algorithm);
  rec.instance = cfg.instance.describe();
  rec.instance_hash = cfg.instance.hash();
  rec.n = instance->size();
  const bool threshold = cfg.algorithm == Algorithm::ThresholdV || cfg.algorithm == Algorithm::ThresholdMeta;
  rec.k = threshold ? truth_threshold(*instance, cfg.threshold()).size() : cfg.k;
  rec.v = threshold ? cfg.threshold() : 0.0;
  rec.delta = cfg.delta;
  rec.r = cfg.rounds(instance->size());
  rec.gamma = cfg.algorithm == Algorithm::ApproxTopK ? cfg.gamma : 0.0;
  if (cfg.algorithm == Algorithm::ParameterizedTopK) {
    const auto p = detail::profile_or_default(*instance, cfg.k);
    rec.lambda = cfg.lambda.value_or(p.lambda);
    rec.kappa = cfg.kappa.value_or(p.kappa);
  }
  rec.adversary = describe_adversary(cfg.adversary);
  rec.seed = cfg.seed;
  rec.trials = cfg.trials;
  double queries = 0.0;
  double rounds = 0.0;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const auto t = run_trial(cfg, instance, i);
    if (trials_out) trials_out->push_back(t);
    if (t.success) ++rec.successes;
    else if (t.fail_outcome) ++rec.fail_outcomes;
    else ++rec.failures;
    queries += static_cast<double>(t.accounting.queries);
    rounds += static_cast<double>(t.accounting.rounds);
    rec.max_queries = std::max(rec.max_queries, t.accounting.queries);
    rec.max_rounds = std::max(rec.max_rounds, t.accounting.rounds);
    rec.max_depth = std::max(rec.max_depth, t.depth);
    rec.max_block_sum = std::max(rec.max_block_sum, t.block_sum);
  }
  if (cfg.trials > 0) {
    rec.mean_queries = queries / static_cast<double>(cfg.trials);
    rec.mean_rounds = rounds / static_cast<double>(cfg.trials);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// CSV ----------------------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "algorithm,instance,instance_hash,n,k,v,delta,r,gamma,lambda,kappa,adversary,trials,successes,failures,"
    "fail_outcomes,mean_queries,max_queries,mean_rounds,max_rounds,max_depth,max_block_sum,seed";

namespace detail {

inline std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view s, std::string_view field) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParameterError("csv: bad " + std::string(field) + " '" + std::string(s) + "'");
  return value;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t at = 0;
  for (;;) {
    const auto next = line.find(sep, at);
    out.emplace_back(line.substr(at, next == std::string_view::npos ? std::string_view::npos : next - at));
    if (next == std::string_view::npos) break;
    at = next + 1;
  }
  return out;
}

}  // namespace detail

/// Column header; `timing` appends the non-deterministic wall_seconds column.
inline std::string csv_header(bool timing = false) {
  return std::string(kCsvHeader) + (timing ? ",wall_seconds" : "");
}

inline std::string to_csv_row(const ExperimentRecord& r, bool timing = false) {
  using detail::shortest;
  std::ostringstream out;
  out << r.algorithm << ',' << r.instance << ',' << r.instance_hash << ',' << r.n << ',' << r.k << ',' << shortest(r.v)
      << ',' << shortest(r.delta) << ',' << r.r << ',' << shortest(r.gamma) << ',' << r.lambda << ',' << r.kappa << ','
      << r.adversary << ',' << r.trials << ',' << r.successes << ',' << r.failures << ',' << r.fail_outcomes << ','
      << shortest(r.mean_queries) << ',' << r.max_queries << ',' << shortest(r.mean_rounds) << ',' << r.max_rounds
      << ',' << r.max_depth << ',' << r.max_block_sum << ',' << r.seed;
  if (timing) out << ',' << shortest(r.wall_seconds);
  return out.str();
}

inline ExperimentRecord parse_csv_row(std::string_view line, bool timing = false) {
  using detail::parse_number;
  const auto f = detail::split(line, ',');
  const std::size_t want = timing ? 24 : 23;
  if (f.size() != want) throw ParameterError("csv: expected " + std::to_string(want) + " fields, got " + std::to_string(f.size()));
  ExperimentRecord r;
  r.algorithm = f[0];
  r.instance = f[1];
  r.instance_hash = parse_number<std::uint64_t>(f[2], "instance_hash");
  r.n = parse_number<std::size_t>(f[3], "n");
  r.k = parse_number<std::size_t>(f[4], "k");
  r.v = parse_number<double>(f[5], "v");
  r.delta = parse_number<double>(f[6], "delta");
  r.r = parse_number<int>(f[7], "r");
  r.gamma = parse_number<double>(f[8], "gamma");
  r.lambda = parse_number<std::size_t>(f[9], "lambda");
  r.kappa = parse_number<std::size_t>(f[10], "kappa");
  r.adversary = f[11];
  r.trials = parse_number<std::uint64_t>(f[12], "trials");
  r.successes = parse_number<std::uint64_t>(f[13], "successes");
  r.failures = parse_number<std::uint64_t>(f[14], "failures");
  r.fail_outcomes = parse_number<std::uint64_t>(f[15], "fail_outcomes");
  r.mean_queries = parse_number<double>(f[16], "mean_queries");
  r.max_queries = parse_number<std::uint64_t>(f[17], "max_queries");
  r.mean_rounds = parse_number<double>(f[18], "mean_rounds");
  r.max_rounds = parse_number<std::uint64_t>(f[19], "max_rounds");
  r.max_depth = parse_number<int>(f[20], "max_depth");
  r.max_block_sum = parse_number<std::uint64_t>(f[21], "max_block_sum");
  r.seed = parse_number<std::uint64_t>(f[22], "seed");
  if (timing) r.wall_seconds = parse_number<double>(f[23], "wall_seconds");
  if (r.successes + r.failures + r.fail_outcomes != r.trials) throw ParameterError("csv: outcome counts do not add up to trials");
  return r;
}

inline void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, bool timing = false) {
  out << csv_header(timing) << '\n';
  for (const auto& r : records) out << to_csv_row(r, timing) << '\n';
}

inline std::vector<ExperimentRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool timing = false;
  if (line == csv_header(true)) timing = true;
  else if (line != csv_header(false)) throw ParameterError("csv: unexpected header");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(parse_csv_row(line, timing));
  }
  return out;
}

// Sweeps ------------------------------------------------------------------------------------

/// Flat `key=value[,value...]` grid; every combination of listed values is one cell.
struct Grid {
  std::map<std::string, std::vector<std::string>> axes;

  static Grid parse(std::istream& in) {
    Grid g;
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParameterError("grid: expected key=value, got '" + line + "'");
      auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r");
        return first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
      };
      const auto key = trim(line.substr(0, eq));
      std::vector<std::string> values;
      for (auto& v : detail::split(line.substr(eq + 1), ',')) {
        auto t = trim(v);
        if (t.empty()) throw ParameterError("grid: empty value for '" + key + "'");
        values.push_back(std::move(t));
      }
      if (!g.axes.emplace(key, std::move(values)).second) throw ParameterError("grid: duplicate key '" + key + "'");
    }
    return g;
  }
};

/// Builds a cell from single values per key. Unknown keys are rejected.
inline CellConfig cell_from(const std::map<std::string, std::string>& kv, const Constants& constants) {
  CellConfig cfg;
  cfg.constants = constants;
  std::optional<std::size_t> bucket_size;
  auto num = [](const std::string& s, std::string_view key) { return detail::parse_number<double>(s, key); };
  auto count = [](const std::string& s, std::string_view key) { return detail::parse_number<std::size_t>(s, key); };
  for (const auto& [key, value] : kv) {
    if (key == "alg") cfg.algorithm = parse_algorithm(value);
    else if (key == "instance") cfg.instance.kind = parse_instance_kind(value);
    else if (key == "n") cfg.instance.n = count(value, key);
    else if (key == "k") cfg.k = count(value, key);
    else if (key == "v") cfg.v = cfg.instance.v = num(value, key);
    else if (key == "kv") cfg.instance.k_v = count(value, key);
    else if (key == "levels") cfg.instance.levels = count(value, key);
    else if (key == "epsilon") cfg.instance.epsilon = num(value, key);
    else if (key == "lambda") cfg.instance.lambda = count(value, key);
    else if (key == "kappa") cfg.instance.kappa = count(value, key);
    else if (key == "tail") cfg.instance.tail_distinct = value == "distinct";
    else if (key == "instance_seed") cfg.instance.seed = detail::parse_number<std::uint64_t>(value, key);
    else if (key == "delta") cfg.delta = num(value, key);
    else if (key == "r") cfg.r = static_cast<int>(num(value, key));
    else if (key == "gamma") cfg.gamma = num(value, key);
    else if (key == "adversary") cfg.adversary.kind = parse_adversary(value);
    else if (key == "bucket_size") bucket_size = count(value, key);
    else if (key == "trials") cfg.trials = count(value, key);
    else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(value, key);
    else throw ParameterError("grid: unknown key '" + key + "'");
  }
  cfg.adversary.bucket_size = bucket_size;
  if (cfg.instance.kind == InstanceKind::Profiled) cfg.instance.k = cfg.k;
  return cfg;
}

namespace detail {

inline auto order_key(const CellConfig& c) {
  return std::tuple(std::string(algorithm_name(c.algorithm)), std::string(instance_kind_name(c.instance.kind)), c.instance.n,
                    c.k, c.instance.k_v, c.instance.levels, c.instance.lambda, c.instance.kappa, c.threshold(), c.delta,
                    c.r.value_or(0), c.gamma, std::string(adversary_name(c.adversary.kind)), c.adversary.bucket_size.value_or(0),
                    c.trials, c.seed, c.instance.seed);
}

}  // namespace detail

/// Every cell of the grid, ordered lexicographically by parameters.
inline std::vector<CellConfig> expand(const Grid& grid, const Constants& constants) {
  std::vector<std::map<std::string, std::string>> combos{{}};
  for (const auto& [key, values] : grid.axes) {
    std::vector<std::map<std::string, std::string>> next;
    for (const auto& partial : combos)
      for (const auto& v : values) {
        auto c = partial;
        c[key] = v;
        next.push_back(std::move(c));
      }
    combos = std::move(next);
  }
  std::vector<CellConfig> cells;
  for (const auto& c : combos) cells.push_back(cell_from(c, constants));
  std::stable_sort(cells.begin(), cells.end(),
                   [](const CellConfig& a, const CellConfig& b) { return detail::order_key(a) < detail::order_key(b); });
  return cells;
}

/// Runs every cell in order and streams the CSV.
inline std::vector<ExperimentRecord> sweep(const Grid& grid, std::ostream& csv, const Constants& constants = {},
                                           bool timing = false) {
  std::vector<ExperimentRecord> out;
  csv << csv_header(timing) << '\n';
  for (const auto& cell : expand(grid, constants)) {
    out.push_back(run_cell(cell));
    csv << to_csv_row(out.back(), timing) << '\n' << std::flush;
  }
  return out;
}

// Scaling fits --------------------------------------------------------------------------------

enum class Formula : std::uint8_t { N, NLogN, NLogBDelta, NLogKBDelta, NLogK2, NPlusKLogN };

inline std::string_view formula_name(Formula f) {
  switch (f) {
    case Formula::N: return "n";
    case Formula::NLogN: return "n_log_n";
    case Formula::NLogBDelta: return "n_log_b_delta";
    case Formula::NLogKBDelta: return "n_log_kb_delta";
    case Formula::NLogK2: return "n_log_k2";
    case Formula::NPlusKLogN: return "n_plus_k_log_n";
  }
  return "?";
}

inline Formula parse_formula(std::string_view name) {
  for (auto f : {Formula::N, Formula::NLogN, Formula::NLogBDelta, Formula::NLogKBDelta, Formula::NLogK2, Formula::NPlusKLogN})
    if (formula_name(f) == name) return f;
  throw ParameterError("unknown formula '" + std::string(name) + "'");
}

/// The formula's term for one record (logs base 2; b from the record's n and r).
inline double formula_term(Formula f, const ExperimentRecord& r) {
  const double n = static_cast<double>(r.n);
  const double k = static_cast<double>(r.k);
  auto base = [&] { return solve_base(n, r.r); };
  switch (f) {
    case Formula::N: return n;
    case Formula::NLogN: return n * std::log2(n);
    case Formula::NLogBDelta: return n * std::log2(base() / r.delta);
    case Formula::NLogKBDelta: return n * std::log2(k * base() / r.delta);
    case Formula::NLogK2: return n * std::log2(k + 2.0);
    case Formula::NPlusKLogN: return n + k * std::log2(n);
  }
  return 0.0;
}

struct FitPoint {
  double term = 0.0;
  double queries = 0.0;
  double ratio = 0.0;  // queries / (constant * term)
};

struct FitReport {
  Formula formula = Formula::N;
  double constant = 0.0;
  double max_residual_ratio = 0.0;  // max over points of max(ratio, 1/ratio)
  bool degenerate = false;
  std::string note;
  std::vector<FitPoint> points;
};

/// Least squares through the origin of mean queries against the formula term.
inline FitReport scaling_report(const std::vector<ExperimentRecord>& records, Formula formula) {
  FitReport rep;
  rep.formula = formula;
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : records) {
    FitPoint p;
    p.term = formula_term(formula, r);
    p.queries = r.mean_queries;
    rep.points.push_back(p);
    num += p.term * p.queries;
    den += p.term * p.term;
  }
  if (records.size() < 2) {
    rep.degenerate = true;
    rep.note = "fewer than 2 points";
  } else if (!(den > 0.0) || !(num > 0.0)) {
    rep.degenerate = true;
    rep.note = "formula terms or queries are all zero";
  }
  for (const auto& p : rep.points)
    if (!(p.term > 0.0) || !(p.queries > 0.0)) {
      rep.degenerate = true;
      rep.note = "a point has a non-positive term or zero queries";
    }
  if (rep.degenerate) return rep;
  rep.constant = num / den;
  for (auto& p : rep.points) {
    p.ratio = p.queries / (rep.constant * p.term);
    rep.max_residual_ratio = std::max({rep.max_residual_ratio, p.ratio, 1.0 / p.ratio});
  }
  return rep;
}

}  // namespace noisy_select
