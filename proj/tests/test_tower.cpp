#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "noisy_select/tower.hpp"

using namespace noisy_select;

TEST_CASE("log_star unrolls the definition") {
  CHECK(log_star(16, 2) == 4);
  CHECK(log_star(1, 2) == 1);
  CHECK(log_star(0, 2) == 0);
  CHECK(log_star(-3, 2) == 0);
  CHECK(log_star(2, 2) == 2);
  CHECK(log_star(65536, 2) == 5);
  CHECK(log_star(27, 3) == 3);  // 27, 3, 1, 0
  CHECK_THROWS_AS(log_star(5, 1.0), ParameterError);
  CHECK_THROWS_AS(log_star(5, 0.5), ParameterError);
  // log_1.2 has a fixed point near 15.4; the iteration would never reach 0.
  CHECK_THROWS_AS(log_star(100, 1.2), ParameterError);
  CHECK(log_star(0.5, 1.2) == 1);
}

TEST_CASE("tower and zeta") {
  CHECK(tower(2, 3).value == 16.0);
  CHECK(tower(3, 1).value == 3.0);
  CHECK(tower(2, 4).value == 65536.0);
  CHECK_FALSE(tower(2, 4).saturated);
  const auto big = tower(2, 5);
  CHECK(big.saturated);
  CHECK(big.value == 1e300);
  CHECK(tower(2, 5, 1e10).value == 1e10);
  CHECK(zeta(2, 1, 2).value == 4.0);
  CHECK(zeta(4, 0.5, 1).value == 8.0);
  CHECK(zeta(2, 1, 3).value == 16.0);
  CHECK_THROWS_AS(tower(1.0, 2), ParameterError);
  CHECK_THROWS_AS(tower(2.0, 0), ParameterError);
}

TEST_CASE("log_star of a tower is its height plus one") {
  for (double b : {2.0, 3.0, 4.0, 5.5, 10.0})
    for (int i = 1; i <= 4; ++i) {
      const auto t = tower(b, i);
      if (t.saturated) continue;
      INFO("b=" << b << " i=" << i);
      CHECK(log_star(t.value, b) == i + 1);
    }
}

TEST_CASE("log_star is monotone") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> logn(0.0, 40.0);
  std::uniform_real_distribution<double> base(1.45, 100.0);
  for (int t = 0; t < 5000; ++t) {
    const double n1 = std::exp2(logn(gen));
    const double n2 = std::exp2(logn(gen));
    const double b1 = base(gen);
    const double b2 = base(gen);
    INFO(n1 << ' ' << n2 << ' ' << b1 << ' ' << b2);
    CHECK((log_star(std::min(n1, n2), b1) <= log_star(std::max(n1, n2), b1)));
    CHECK((log_star(n1, std::max(b1, b2)) <= log_star(n1, std::min(b1, b2))));
  }
}

TEST_CASE("solve_base examples") {
  CHECK(solve_base(65536, log_star(65536, 2) + 4) == 2.0);
  CHECK(solve_base(10, 100) == 2.0);
  CHECK_THROWS_AS(solve_base(1000, 4), ParameterError);
  // For n > 1 no base reaches log_star = 1, so r = 5 is rejected.
  CHECK_THROWS_AS(solve_base(1e6, 5), ParameterError);
  CHECK(solve_base(1, 5) == 2.0);
}

TEST_CASE("solve_base returns the smallest feasible base") {
  for (double n : {10.0, 1000.0, 1e4, 1e6, 1e9})
    for (int r = 6; r <= 10; ++r) {
      const double b = solve_base(n, r);
      INFO("n=" << n << " r=" << r << " b=" << b);
      CHECK(b >= 2.0);
      CHECK(log_star(n, b) <= r - 4);
      if (b > 2.0) CHECK(log_star(n, b - 1e-5) > r - 4);
    }
  // log_star(1e6, b) = 2 needs log_b(1e6) <= 1, i.e. b >= 1e6.
  const double b = solve_base(1e6, 6);
  CHECK(b == Catch::Approx(1e6).margin(1e-3));
  CHECK(log_star(1e6, b) == 2);
  CHECK(log_star(1e6, b - 1e-3) == 3);
}
