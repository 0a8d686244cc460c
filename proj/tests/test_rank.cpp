#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <map>
#include <memory>

#include "noisy_select/ground_truth.hpp"
#include "noisy_select/max.hpp"
#include "noisy_select/mode_law.hpp"
#include "noisy_select/rank.hpp"
#include "noisy_select/reduction.hpp"

using namespace noisy_select;

namespace {

using Inst = std::shared_ptr<const Instance>;

Inst shared(Instance inst) { return std::make_shared<const Instance>(std::move(inst)); }

Inst distinct(std::size_t n, std::uint64_t seed) {
  InstanceSpec spec;
  spec.n = n;
  spec.seed = seed;
  return shared(generate(spec));
}

double sigma3(double p, double trials) { return 3.0 * std::sqrt(p * (1 - p) / trials) + 1e-12; }

// Law of the mode (ties to the larger value) of `per` answers about an element at level
// `truth`, by enumerating every answer sequence. Lies are uniform over the other copies.
std::vector<double> brute_mode_law(const std::vector<double>& weight, std::size_t truth, unsigned per) {
  const std::size_t m = weight.size();
  double others = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (i != truth) others += weight[i];
  std::vector<double> p(m);
  for (std::size_t i = 0; i < m; ++i) p[i] = i == truth ? 2.0 / 3.0 : others > 0 ? weight[i] / others / 3.0 : 0.0;
  if (others == 0) p[truth] = 1.0;
  std::vector<double> law(m, 0.0);
  std::size_t total = 1;
  for (unsigned i = 0; i < per; ++i) total *= m;
  std::vector<int> count(m);
  for (std::size_t code = 0; code < total; ++code) {
    std::fill(count.begin(), count.end(), 0);
    std::size_t c = code;
    double pr = 1;
    for (unsigned i = 0; i < per; ++i) {
      pr *= p[c % m];
      ++count[c % m];
      c /= m;
    }
    if (pr == 0) continue;
    std::size_t best = 0;
    for (std::size_t a = 1; a < m; ++a)
      if (count[a] > count[best]) best = a;  // level 0 is the largest value, so ties go up
    law[best] += pr;
  }
  return law;
}

}  // namespace

TEST_CASE("super_query") {
  auto inst = shared(Instance({7, 3, 5}));
  OracleSession s(inst, Adversary::truthful(), 1, Model::Value);
  CHECK(super_query(s, 0, 12) == 7.0);
  CHECK(s.accounting() == Accounting{12, 1});
  CHECK_THROWS_AS(super_query(s, 0, 0), ParameterError);

  OracleSession noisy(inst, Adversary::uniform(), 2, Model::Value);
  int lies = 0;
  for (int i = 0; i < 3000; ++i) lies += super_query(noisy, 0, 1) != 7.0;
  CHECK(std::abs(lies / 3000.0 - 1.0 / 3.0) <= sigma3(1.0 / 3.0, 3000));
}

TEST_CASE("super_query error at block 48 stays below 1/9") {
  auto inst = distinct(20, 3);
  const Id x = 4;
  OracleSession s(inst, Adversary::uniform(), 5, Model::Value);
  const std::vector<Request> b{{Query::value(x), 48 * 10000, 48}};
  const auto rep = s.ask(b);
  double wrong = 0;
  for (double v : rep[0].values) wrong += v != inst->value(x);
  CHECK(wrong / 10000 <= 1.0 / 9.0 + sigma3(1.0 / 9.0, 10000));
}

TEST_CASE("mode law matches brute-force enumeration") {
  const Instance inst({5, 5, 3, 3, 3, 1, 8, 2});
  std::vector<double> weight;
  for (std::size_t i = 0; i < inst.size();) {
    std::size_t j = i;
    while (j < inst.size() && inst.descending()[j] == inst.descending()[i]) ++j;
    weight.push_back(static_cast<double>(j - i));
    i = j;
  }
  double worst = 0;
  for (unsigned per = 1; per <= 8; ++per) {
    detail::ModeLaws laws(inst, per);
    REQUIRE(laws.levels() == weight.size());
    for (std::uint32_t t = 0; t < weight.size(); ++t) {
      const auto want = brute_mode_law(weight, t, per);
      const auto& got = laws.uniform(t);
      for (std::size_t a = 0; a < want.size(); ++a) worst = std::max(worst, std::abs(got.p[a] - want[a]));
      CHECK(got.tail[0] == Catch::Approx(1.0).margin(1e-12));
      for (std::uint32_t lie = 0; lie < weight.size(); ++lie) {
        if (lie == t) continue;
        double p = 0;
        for (unsigned mask = 0; mask < (1u << per); ++mask) {
          const int l = std::popcount(mask);
          const int tr = static_cast<int>(per) - l;
          if (l > tr || (l == tr && lie < t)) p += std::pow(1.0 / 3, l) * std::pow(2.0 / 3, tr);
        }
        worst = std::max(worst, std::abs(p - laws.fixed_lie_wins(t, lie)));
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("value modes of 9 answers follow the exact law") {
  auto inst = shared(Instance({5, 5, 3, 1, 8, 2}));
  OracleSession s(inst, Adversary::uniform(), 8, Model::Value);
  const std::uint64_t groups = 40000;
  const std::vector<Request> b{{Query::value(2), 9 * groups, 9}};
  const auto rep = s.ask(b);
  std::map<double, double> freq;
  for (double v : rep[0].values) freq[v] += 1.0 / static_cast<double>(groups);
  const auto law = brute_mode_law({1, 2, 1, 1, 1}, 2, 9);  // levels 8, 5, 3, 2, 1
  const double level_value[] = {8, 5, 3, 2, 1};
  for (std::size_t a = 0; a < law.size(); ++a) {
    INFO("value " << level_value[a]);
    CHECK(std::abs(freq[level_value[a]] - law[a]) <= sigma3(law[a], static_cast<double>(groups)));
  }
}

TEST_CASE("adapter yes rate equals the exact mode comparison probability") {
  auto inst = shared(Instance({5, 5, 3, 1, 8, 2}));
  const std::vector<double> weight{1, 2, 1, 1, 1};
  const auto lx = brute_mode_law(weight, 2, 9);  // x = id 2, value 3
  const auto ly = brute_mode_law(weight, 1, 9);  // y = id 0, value 5
  double q = 0;
  for (std::size_t a = 0; a < lx.size(); ++a)
    for (std::size_t b = a; b < ly.size(); ++b) q += lx[a] * ly[b];
  OracleSession s(inst, Adversary::uniform(), 12, Model::Value);
  ComparisonFromValue adapter(s, 9);
  const std::uint64_t n = 50000;
  const std::vector<Request> b{{Query::compare(2, 0), n, 1}};
  const auto rep = adapter.ask(b);
  double yes = 0;
  for (auto y : rep[0].yes) yes += y;
  CHECK(std::abs(yes / static_cast<double>(n) - q) <= sigma3(q, static_cast<double>(n)));
  CHECK(s.accounting() == Accounting{18 * n, 1});
  CHECK(s.history(2) == 9 * n);
}

TEST_CASE("adapter on a history-aware liar uses direct simulation with the same law") {
  // 40 copies of 1 form buckets; id 40 (value 10) lies towards 1 during phase one.
  std::vector<double> v(40, 1.0);
  v.push_back(10);
  v.push_back(4);
  auto inst = shared(Instance(v));
  AdversarySpec spec;
  spec.kind = AdversaryKind::BucketLie;
  spec.bucket_size = 10;
  OracleSession s(inst, Adversary::make(spec, *inst, 3), 3, Model::Value);
  ComparisonFromValue adapter(s, 9);
  // Both lie towards 1: yes unless 40's mode is the lie while 41's is the truth.
  const double e = majority_error(9).value();
  const double q = (1.0 - e) + e * e;
  const std::uint64_t n = 20000;
  const std::vector<Request> b{{Query::compare(40, 41), n, 1}};
  const auto rep = adapter.ask(b);
  double yes = 0;
  for (auto y : rep[0].yes) yes += y;
  CHECK(std::abs(yes / static_cast<double>(n) - q) <= sigma3(q, static_cast<double>(n)));
}

TEST_CASE("comparison_from_value") {
  auto inst = shared(Instance({7, 3}));
  OracleSession s(inst, Adversary::truthful(), 1, Model::Value);
  auto adapter = comparison_from_value(s);
  CHECK(adapter.repeats() == 9);
  CHECK(three_outcome_compare(adapter, 0, 1, 1) == Comparison::XGreater);
  CHECK(s.accounting() == Accounting{36, 1});
  OracleSession cmp(inst, Adversary::truthful(), 1, Model::Comparison);
  CHECK_THROWS_AS(comparison_from_value(cmp), ParameterError);
  CHECK_THROWS_AS(adapter.ask(std::vector<Request>{{Query::compare(0, 0), 1, 1}}), QueryError);

  auto d = distinct(30, 4);
  OracleSession noisy(d, Adversary::uniform(), 9, Model::Value);
  ComparisonFromValue a(noisy);
  const std::uint64_t n = 10000;
  const std::vector<Request> b{{Query::compare(3, 17), n, 1}};
  const auto rep = a.ask(b);
  const bool truth = d->value(3) >= d->value(17);
  double wrong = 0;
  for (auto y : rep[0].yes) wrong += (y == 1) != truth;
  CHECK(wrong / static_cast<double>(n) <= 1.0 / 3.0);
  const double bound = 1.0 - (1.0 - kReductionMajorityError.value()) * (1.0 - kReductionMajorityError.value());
  CHECK(wrong / static_cast<double>(n) <= bound + sigma3(bound, static_cast<double>(n)));
}

TEST_CASE("distinct_top without noise follows the block schedule") {
  const std::size_t n = 100, k = 4;
  auto inst = distinct(n, 5);
  OracleSession s(inst, Adversary::truthful(), 1, Model::Value);
  Context ctx(1);
  const auto out = distinct_top(s, ctx, inst->ids(), k);
  REQUIRE_FALSE(out.failed());
  CHECK(valid_top_k(*inst, k, *out.ids));
  // bar = 20 log2 100 ~ 132.9: head elements go 12, 24, 48, 96, 192.
  CHECK(out.block_sum == 12 * (n - k) + 192 * k);
  CHECK(out.accounting.queries == 12 * n + (24 + 48 + 96 + 192) * k);
  for (Id x : *out.ids) CHECK(s.history(x) == 12 * ((1u << 5) - 1));
  for (Id x = 0; x < n; ++x)
    if (!std::binary_search(out.ids->begin(), out.ids->end(), x)) CHECK(s.history(x) == 12);
}

TEST_CASE("distinct_top edge cases") {
  auto inst = distinct(6, 1);
  OracleSession s(inst, Adversary::truthful(), 1, Model::Value);
  Context ctx(1);
  const auto all = distinct_top(s, ctx, inst->ids(), 6);
  CHECK(*all.ids == inst->ids());

  auto tied = shared(Instance({1, 2, 2}));
  OracleSession t(tied, Adversary::truthful(), 1, Model::Value);
  CHECK_THROWS_AS(distinct_top(t, ctx, tied->ids(), 1), ParameterError);
  CHECK_THROWS_AS(distinct_top(s, ctx, inst->ids(), 7), ParameterError);
}

TEST_CASE("distinct_top under noise") {
  auto inst = distinct(500, 7);
  const std::size_t k = 5;
  const double cap = 34000.0 * (500 + k * std::log2(500.0));
  int ok = 0;
  for (int i = 0; i < 100; ++i) {
    OracleSession s(inst, Adversary::uniform(), 40 + i, Model::Value);
    Context ctx(40 + i);
    const auto out = distinct_top(s, ctx, inst->ids(), k);
    if (!out.failed()) {
      ok += valid_top_k(*inst, k, *out.ids);
      CHECK(static_cast<double>(out.block_sum) <= cap);
    }
  }
  CHECK(ok >= (2.0 / 3.0 - 0.1) * 100);
}

TEST_CASE("distinct_top fails when the block budget is exhausted") {
  auto inst = distinct(200, 2);
  Constants c;
  c.distinct_budget_c = 1.0;
  OracleSession s(inst, Adversary::uniform(), 3, Model::Value);
  Context ctx(3, c);
  CHECK(distinct_top(s, ctx, inst->ids(), 5).failed());
}
