#include <catch_amalgamated.hpp>

#include <sstream>

#include "noisy_select/harness.hpp"

using namespace noisy_select;

namespace {

CellConfig cell(Algorithm alg, std::size_t n, std::size_t trials) {
  CellConfig c;
  c.algorithm = alg;
  c.instance.n = n;
  c.trials = trials;
  return c;
}

ExperimentRecord synthetic(std::size_t n, std::size_t k, double queries) {
  ExperimentRecord r;
  r.algorithm = "top_k";
  r.n = n;
  r.k = k;
  r.r = 6;
  r.delta = 1.0 / 3;
  r.trials = 1;
  r.successes = 1;
  r.mean_queries = queries;
  return r;
}

}  // namespace

TEST_CASE("algorithm and formula names round-trip") {
  for (auto a : kAllAlgorithms) CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK_THROWS_AS(parse_algorithm("bogo_sort"), ParameterError);
  for (auto f : {Formula::N, Formula::NLogN, Formula::NLogBDelta, Formula::NLogKBDelta, Formula::NLogK2, Formula::NPlusKLogN})
    CHECK(parse_formula(formula_name(f)) == f);
  CHECK_THROWS_AS(parse_formula("n_squared"), ParameterError);
}

TEST_CASE("T = 0 gives an empty record") {
  auto c = cell(Algorithm::ParallelMax, 100, 0);
  std::vector<TrialResult> trials;
  const auto rec = run_cell(c, &trials);
  CHECK(trials.empty());
  CHECK(rec.trials == 0);
  CHECK(rec.successes + rec.failures + rec.fail_outcomes == 0);
  CHECK(rec.mean_queries == 0.0);
  CHECK(rec.max_rounds == 0);
  CHECK(rec.success_rate() == 0.0);
}

TEST_CASE("every algorithm succeeds on every trial without noise") {
  for (auto alg : kAllAlgorithms) {
    auto c = cell(alg, 200, 20);
    c.k = 4;
    c.adversary.kind = AdversaryKind::Truthful;
    if (alg == Algorithm::ThresholdV || alg == Algorithm::ThresholdMeta) {
      c.instance.kind = InstanceKind::Threshold;
      c.instance.k_v = 13;
      c.instance.v = 50;
    } else if (alg == Algorithm::ParameterizedTopK) {
      c.instance.kind = InstanceKind::Profiled;
      c.instance.k = 4;
      c.instance.lambda = 2;
      c.instance.kappa = 6;
    }
    INFO(algorithm_name(alg));
    std::vector<TrialResult> trials;
    const auto rec = run_cell(c, &trials);
    CHECK(rec.successes == 20);
    REQUIRE(trials.size() == 20);
    for (std::size_t i = 0; i < trials.size(); ++i) CHECK(trials[i].seed == c.seed + i);
    if (alg == Algorithm::ThresholdV) CHECK(rec.k == 13);
    if (alg == Algorithm::OneRoundMax) CHECK(rec.max_rounds == 1);
  }
}

TEST_CASE("invalid combinations name the precondition") {
  auto top = cell(Algorithm::TopK, 10, 1);
  top.k = 6;
  CHECK_THROWS_WITH(run_cell(top), Catch::Matchers::ContainsSubstring("k <= n/2"));
  auto dist = cell(Algorithm::DistinctTop, 50, 1);
  dist.instance.kind = InstanceKind::BoundedValues;
  CHECK_THROWS_WITH(run_cell(dist), Catch::Matchers::ContainsSubstring("all-distinct"));
  auto max = cell(Algorithm::ParallelMax, 500, 1);
  max.r = 4;
  CHECK_THROWS_WITH(run_cell(max), Catch::Matchers::ContainsSubstring("r >= 5"));
  auto bad_delta = cell(Algorithm::OneRoundMax, 10, 1);
  bad_delta.delta = 0;
  CHECK_THROWS_AS(run_cell(bad_delta), ParameterError);
  auto approx = cell(Algorithm::ApproxTopK, 100, 1);
  approx.gamma = -1;
  CHECK_THROWS_WITH(run_cell(approx), Catch::Matchers::ContainsSubstring("gamma"));
}

TEST_CASE("counts add up under noise") {
  auto c = cell(Algorithm::TopK, 120, 40);
  c.k = 3;
  c.adversary.kind = AdversaryKind::UniformLie;
  const auto rec = run_cell(c);
  CHECK(rec.successes + rec.failures + rec.fail_outcomes == 40);
  CHECK(rec.mean_queries <= static_cast<double>(rec.max_queries));
  CHECK(rec.mean_rounds <= static_cast<double>(rec.max_rounds));
}

TEST_CASE("CSV rows round-trip") {
  auto c = cell(Algorithm::ApproxTopK, 150, 7);
  c.k = 5;
  c.gamma = 0.3;
  c.delta = 0.1;
  c.adversary.kind = AdversaryKind::UniformLie;
  auto rec = run_cell(c);
  rec.wall_seconds = 0;
  CHECK(parse_csv_row(to_csv_row(rec)) == rec);

  ExperimentRecord odd = rec;
  odd.mean_queries = 1.0 / 3.0;
  odd.v = -0.1;
  odd.adversary = "bucket:size=45";
  odd.wall_seconds = 0.125;
  CHECK(parse_csv_row(to_csv_row(odd, true), true) == odd);

  std::stringstream io;
  write_csv(io, {rec, odd});
  const auto back = read_csv(io);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == rec);
  auto no_time = odd;
  no_time.wall_seconds = 0;
  CHECK(back[1] == no_time);

  auto broken = to_csv_row(rec);
  broken.replace(broken.find(",7,"), 3, ",8,");  // trials no longer match the counts
  CHECK_THROWS_AS(parse_csv_row(broken), ParameterError);
  CHECK_THROWS_AS(parse_csv_row("a,b,c"), ParameterError);
}

TEST_CASE("grid parsing and ordering") {
  std::istringstream text(
      "# comment\n"
      "alg = top_k, parallel_max\n"
      "n = 300,100\n"
      "k=2\n"
      "trials=3\n");
  const auto grid = Grid::parse(text);
  CHECK(grid.axes.size() == 4);
  const auto cells = expand(grid, {});
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].algorithm == Algorithm::ParallelMax);
  CHECK(cells[0].instance.n == 100);
  CHECK(cells[1].instance.n == 300);
  CHECK(cells[2].algorithm == Algorithm::TopK);
  CHECK(cells[3].k == 2);

  std::istringstream dup("n=1\nn=2\n");
  CHECK_THROWS_AS(Grid::parse(dup), ParameterError);
  std::istringstream junk("n\n");
  CHECK_THROWS_AS(Grid::parse(junk), ParameterError);
  std::istringstream unknown("colour=red\n");
  CHECK_THROWS_AS(expand(Grid::parse(unknown), {}), ParameterError);
}

TEST_CASE("sweep streams one row per cell and is byte-deterministic") {
  std::istringstream text("alg=parallel_max\nn=80\ntrials=5\nadversary=uniform\n");
  const auto grid = Grid::parse(text);
  std::ostringstream a, b;
  const auto recs = sweep(grid, a);
  sweep(grid, b);
  CHECK(recs.size() == 1);
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string header, row, extra;
  std::getline(in, header);
  CHECK(header == kCsvHeader);
  CHECK(std::getline(in, row));
  CHECK_FALSE(std::getline(in, extra));

  std::istringstream threshold("alg=threshold_v\ninstance=threshold\nn=100\nkv=3\nv=7\ntrials=3\n");
  std::ostringstream c;
  const auto t = sweep(Grid::parse(threshold), c);
  CHECK(t[0].k == 3);
  CHECK(t[0].v == 7.0);
}

TEST_CASE("scaling_report") {
  // queries exactly proportional to n log2(k + 2)
  std::vector<ExperimentRecord> recs;
  for (auto [n, k] : {std::pair{1000, 2}, {2000, 6}, {4000, 30}})
    recs.push_back(synthetic(n, k, 3.5 * n * std::log2(k + 2.0)));
  const auto fit = scaling_report(recs, Formula::NLogK2);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.constant == Catch::Approx(3.5));
  CHECK(fit.max_residual_ratio == Catch::Approx(1.0).epsilon(1e-12));

  recs[2].mean_queries *= 2;
  CHECK(scaling_report(recs, Formula::NLogK2).max_residual_ratio > 1.2);

  CHECK(scaling_report({recs[0]}, Formula::N).degenerate);
  CHECK(scaling_report({}, Formula::N).degenerate);
  auto zero = recs;
  zero[1].mean_queries = 0;
  CHECK(scaling_report(zero, Formula::N).degenerate);
}

TEST_CASE("parallel_max fit over n in {1e3, 1e4}") {
  std::vector<ExperimentRecord> recs;
  for (std::size_t n : {1000u, 10000u}) {
    auto c = cell(Algorithm::ParallelMax, n, 20);
    c.adversary.kind = AdversaryKind::UniformLie;
    recs.push_back(run_cell(c));
  }
  const auto fit = scaling_report(recs, Formula::NLogBDelta);
  INFO("C=" << fit.constant);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.max_residual_ratio <= 1.5);
}
