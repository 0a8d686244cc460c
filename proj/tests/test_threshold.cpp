#include <catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "noisy_select/ground_truth.hpp"
#include "noisy_select/threshold.hpp"

using namespace noisy_select;

namespace {

std::shared_ptr<const Instance> shared(Instance inst) { return std::make_shared<const Instance>(std::move(inst)); }

std::shared_ptr<const Instance> threshold_instance(std::size_t n, std::size_t kv, std::uint64_t seed, double v = 100) {
  InstanceSpec spec;
  spec.kind = InstanceKind::Threshold;
  spec.n = n;
  spec.k_v = kv;
  spec.v = v;
  spec.seed = seed;
  return shared(generate(spec));
}

enum class Which { One, Meta };

Outcome run(const std::shared_ptr<const Instance>& inst, Adversary adv, std::uint64_t seed, double v, Which which,
            Constants c = {}) {
  OracleSession s(inst, std::move(adv), seed, Model::Value);
  Context ctx(seed, c);
  return which == Which::One ? threshold_v(s, ctx, inst->ids(), v) : threshold_meta(s, ctx, inst->ids(), v);
}

}  // namespace

TEST_CASE("random_partition sizes differ by at most one") {
  Rng rng(3);
  IdSet xs(103);
  for (Id i = 0; i < 103; ++i) xs[i] = i;
  for (std::size_t parts : {1u, 2u, 10u, 103u}) {
    const auto p = detail::random_partition(xs, parts, rng);
    REQUIRE(p.size() == parts);
    std::size_t lo = SIZE_MAX, hi = 0, total = 0;
    IdSet all;
    for (const auto& part : p) {
      lo = std::min(lo, part.size());
      hi = std::max(hi, part.size());
      total += part.size();
      all.insert(all.end(), part.begin(), part.end());
    }
    std::sort(all.begin(), all.end());
    CHECK(hi - lo <= 1);
    CHECK(all == xs);
  }
}

TEST_CASE("threshold_v without noise") {
  auto inst = shared(Instance({1, 2, 9, 10}));
  const auto out = run(inst, Adversary::truthful(), 1, 9, Which::One);
  CHECK(*out.ids == IdSet{2, 3});
  const auto none = run(inst, Adversary::truthful(), 1, 11, Which::One);
  CHECK(none.ids->empty());
  CHECK(none.depth == 0);
}

TEST_CASE("threshold_v is exact without noise on every seed") {
  for (std::size_t kv : {0u, 1u, 5u, 40u, 299u, 300u}) {
    auto inst = threshold_instance(300, kv, kv);
    const auto want = truth_threshold(*inst, 100);
    REQUIRE(want.size() == kv);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      INFO("kv=" << kv << " seed=" << seed);
      CHECK(*run(inst, Adversary::truthful(), seed, 100, Which::One).ids == want);
      CHECK(*run(inst, Adversary::truthful(), seed, 100, Which::Meta).ids == want);
    }
  }
}

TEST_CASE("threshold_meta edge cases") {
  auto inst = shared(Instance({5, 6, 7, 8, 9, 1}));
  CHECK(*run(inst, Adversary::truthful(), 2, 2, Which::Meta).ids == IdSet{0, 1, 2, 3, 4});
  CHECK(run(inst, Adversary::truthful(), 2, 100, Which::Meta).ids->empty());
}

TEST_CASE("threshold_meta fails when its caps are hit") {
  auto inst = threshold_instance(400, 20, 1);
  Constants c;
  c.meta_query_c = 1e-3;
  const auto out = run(inst, Adversary::uniform(), 3, 100, Which::Meta, c);
  CHECK(out.failed());
  Constants rounds;
  rounds.meta_round_c = 0.2;
  CHECK(run(inst, Adversary::uniform(), 3, 100, Which::Meta, rounds).failed());
}

TEST_CASE("threshold_v under noise") {
  auto inst = threshold_instance(500, 8, 4);
  const auto want = truth_threshold(*inst, 100);
  int ok = 0;
  const int trials = 60;
  for (int i = 0; i < trials; ++i) ok += *run(inst, Adversary::uniform(), 500 + i, 100, Which::One).ids == want;
  CHECK(ok >= (5.0 / 6.0 - 0.1) * trials);
}

TEST_CASE("threshold_meta under noise when almost everything is above v") {
  auto inst = threshold_instance(500, 492, 6);
  const auto want = truth_threshold(*inst, 100);
  int ok = 0;
  const int trials = 60;
  for (int i = 0; i < trials; ++i) {
    const auto out = run(inst, Adversary::uniform(), 900 + i, 100, Which::Meta);
    ok += !out.failed() && *out.ids == want;
  }
  CHECK(ok >= (2.0 / 3.0 - 0.1) * trials);
}

TEST_CASE("threshold recursion depth") {
  for (std::size_t kv : {4u, 16u, 64u}) {
    auto inst = threshold_instance(600, kv, kv + 1);
    const double bound = std::log2(std::log2(static_cast<double>(kv))) + 3;
    int within = 0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) within += run(inst, Adversary::uniform(), 70 + i, 100, Which::One).depth <= bound;
    INFO("kv=" << kv);
    CHECK(within >= 0.9 * trials);
  }
}

TEST_CASE("threshold meta budget grows like n log n") {
  const auto a = threshold_meta_budget(1000, Constants{});
  const auto b = threshold_meta_budget(4000, Constants{});
  CHECK(static_cast<double>(b.queries) / static_cast<double>(a.queries) ==
        Catch::Approx(4.0 * std::log2(4000.0) / std::log2(1000.0)).epsilon(1e-6));
  CHECK(b.rounds >= a.rounds);
}
