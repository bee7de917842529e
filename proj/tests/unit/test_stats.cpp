#include <doctest.h>

#include <cmath>
#include <vector>

#include "prunelab/error.hpp"
#include "prunelab/rng.hpp"
#include "prunelab/stats.hpp"
#include "support/oracles.hpp"

using namespace prunelab;

TEST_CASE("t CDF matches the closed-form and series oracles") {
  for (int df = 1; df <= 100; ++df)
    for (double t = -10.0; t <= 10.0; t += 0.5) {
      const double ours = student_t_cdf(t, df);
      CHECK(std::abs(ours - oracles::t_cdf_closed_form(t, df)) <= 1e-10);
      CHECK(std::abs(ours - oracles::t_cdf_beta_series(t, df)) <= 1e-10);
    }
  CHECK(student_t_cdf(0.0, 7.0) == 0.5);
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), NumericError);
}

TEST_CASE("t quantile inverts the CDF") {
  CHECK(student_t_quantile(0.995, 29.0) == doctest::Approx(2.7564).epsilon(1e-4));
  CHECK(student_t_quantile(0.5, 12.0) == 0.0);
  auto rng = make_stream(1, "quantile");
  for (int trial = 0; trial < 50; ++trial) {
    const double p = 0.01 + 0.98 * rng.next_unit();
    const double df = 1.0 + 99.0 * rng.next_unit();
    CHECK(student_t_cdf(student_t_quantile(p, df), df) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK_THROWS_AS(student_t_quantile(0.0, 5.0), NumericError);
}

TEST_CASE("paired t-test") {
  SUBCASE("identical samples hit the degenerate flat limit") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const TestResult two = t_paired(x, x, Alternative::TwoSided);
    CHECK(two.t == 0.0);
    CHECK(two.p_raw == 1.0);
    CHECK(two.degenerate);
    const TestResult one = t_paired(x, x, Alternative::Greater);
    CHECK(one.p_raw == 0.5);
  }

  SUBCASE("d = [1,2,3,4] reproduces the textbook statistic") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y = {0.0, 0.0, 0.0, 0.0};
    const TestResult r = t_paired(x, y, Alternative::TwoSided);
    CHECK(r.t == doctest::Approx(std::sqrt(15.0)).epsilon(1e-12));  // 2.5 / (sqrt(5/3)/2)
    CHECK(r.df == 3.0);
    const double expected_p = 2.0 * (1.0 - oracles::t_cdf_closed_form(std::sqrt(15.0), 3));
    CHECK(r.p_raw == doctest::Approx(expected_p).epsilon(1e-10));
    CHECK(r.p_raw == doctest::Approx(0.0305).epsilon(2e-3));
    CHECK_FALSE(r.degenerate);
    CHECK(r.kind == TestKind::Paired);
  }

  SUBCASE("constant nonzero difference returns the flagged limit") {
    // dyadic values keep the differences bitwise identical
    const std::vector<double> y = {1.0, 1.125, 1.25, 0.875, 1.375};
    std::vector<double> x = y;
    for (double& v : x) v += 0.25;
    const TestResult less = t_paired(y, x, Alternative::Less);
    CHECK(less.degenerate);
    CHECK(less.p_raw == 0.0);
    const TestResult greater = t_paired(y, x, Alternative::Greater);
    CHECK(greater.p_raw == 1.0);
    const TestResult two = t_paired(y, x, Alternative::TwoSided);
    CHECK(two.p_raw == 0.0);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(t_paired(std::vector<double>{1.0}, std::vector<double>{2.0},
                             Alternative::Less),
                    InputError);
    CHECK_THROWS_AS(t_paired(std::vector<double>{1.0, 2.0}, std::vector<double>{2.0},
                             Alternative::Less),
                    InputError);
  }
}

TEST_CASE("independent (Welch) t-test") {
  SUBCASE("identical samples give t = 0 and one-sided p = 0.5") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const TestResult r = t_independent(x, x, Alternative::Greater);
    CHECK(r.t == 0.0);
    CHECK(r.p_raw == 0.5);
    CHECK_FALSE(r.degenerate);  // variance is positive, the statistic is real
    CHECK(r.kind == TestKind::Independent);
  }

  SUBCASE("swapping the samples flips the sign of t") {
    const std::vector<double> x = {1.0, 2.0, 3.5};
    const std::vector<double> y = {4.0, 4.5, 6.0, 7.0};
    const TestResult a = t_independent(x, y, Alternative::TwoSided);
    const TestResult b = t_independent(y, x, Alternative::TwoSided);
    CHECK(a.t == -b.t);
    CHECK(a.p_raw == doctest::Approx(b.p_raw).epsilon(1e-15));
  }

  SUBCASE("textbook example with Welch-Satterthwaite df") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {4.0, 5.0, 6.0};
    const TestResult r = t_independent(x, y, Alternative::TwoSided);
    CHECK(r.t == doctest::Approx(-3.0 / std::sqrt(2.0 / 3.0)).epsilon(1e-12));  // -3.674
    CHECK(r.df == 4.0);
    const double expected_p = 2.0 * oracles::t_cdf_closed_form(r.t, 4);
    CHECK(r.p_raw == doctest::Approx(expected_p).epsilon(1e-10));
    CHECK(r.p_raw == doctest::Approx(0.0213).epsilon(2e-2));
  }

  SUBCASE("two constant samples degenerate") {
    const std::vector<double> x = {2.0, 2.0, 2.0};
    const std::vector<double> y = {1.0, 1.0};
    const TestResult r = t_independent(x, y, Alternative::Greater);
    CHECK(r.degenerate);
    CHECK(r.p_raw == 0.0);
    const TestResult equal = t_independent(x, x, Alternative::Greater);
    CHECK(equal.degenerate);
    CHECK(equal.p_raw == 0.5);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(t_independent(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0},
                                  Alternative::Less),
                    InputError);
  }
}

TEST_CASE("one-sided and two-sided p-values are consistent") {
  auto rng = make_stream(2, "p-consistency");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(6), y(6);
    for (auto& v : x) v = rng.next_normal();
    for (auto& v : y) v = rng.next_normal() + 0.3;
    const TestResult less = t_paired(x, y, Alternative::Less);
    const TestResult greater = t_paired(x, y, Alternative::Greater);
    const TestResult two = t_paired(x, y, Alternative::TwoSided);
    CHECK(less.p_raw + greater.p_raw == doctest::Approx(1.0).epsilon(1e-12));
    if (two.t > 0.0) CHECK(two.p_raw == doctest::Approx(2.0 * greater.p_raw).epsilon(1e-15));
    if (two.t < 0.0) CHECK(two.p_raw == doctest::Approx(2.0 * less.p_raw).epsilon(1e-15));
    CHECK(two.p_raw >= 0.0);
    CHECK(two.p_raw <= 1.0);
  }
}

TEST_CASE("bonferroni correction") {
  CHECK(bonferroni(0.01, 4) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(bonferroni(0.3, 5) == 1.0);  // capped
  CHECK(bonferroni(0.7, 1) == 0.7);  // identity at k = 1
  CHECK_THROWS_AS(bonferroni(0.1, 0), UsageError);
}

TEST_CASE("confidence interval for the mean") {
  const std::vector<double> constant = {2.0, 2.0, 2.0, 2.0};
  const ConfidenceInterval flat = ci_mean(constant, 0.99);
  CHECK(flat.lower == 2.0);
  CHECK(flat.upper == 2.0);

  // 30 points engineered to mean 1.2 and sample sd 0.1
  std::vector<double> x;
  const double d = 0.1 * std::sqrt(29.0 / 30.0);
  for (int i = 0; i < 15; ++i) {
    x.push_back(1.2 - d);
    x.push_back(1.2 + d);
  }
  const ConfidenceInterval ci = ci_mean(x, 0.99);
  CHECK(ci.lower == doctest::Approx(1.1497).epsilon(2e-4));
  CHECK(ci.upper == doctest::Approx(1.2503).epsilon(2e-4));

  const ConfidenceInterval narrow = ci_mean(x, 0.95);
  CHECK(narrow.upper - narrow.lower < ci.upper - ci.lower);

  CHECK_THROWS_AS(ci_mean(std::vector<double>{1.0}, 0.99), InputError);
  CHECK_THROWS_AS(ci_mean(x, 1.0), ConfigError);
}

TEST_CASE("interval classification against a reference") {
  CHECK(classify_ci({1.1, 1.3, 0.99, 5}, 1.0) == '>');
  CHECK(classify_ci({0.8, 0.95, 0.99, 5}, 1.0) == '<');
  CHECK(classify_ci({0.9, 1.1, 0.99, 5}, 1.0) == '?');
  CHECK(classify_ci({1.0, 1.1, 0.99, 5}, 1.0) == '?');  // touching counts as overlap
  CHECK(classify_ci({0.9, 1.0, 0.99, 5}, 1.0) == '?');
}

TEST_CASE("CI and two-sided test reject the same references") {
  auto rng = make_stream(9, "duality");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.next_below(10);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.next_normal() * 2.0;
    const double level = 0.9 + 0.09 * rng.next_unit();
    const double reference = rng.next_normal();
    const ConfidenceInterval ci = ci_mean(x, level);
    const std::vector<double> ref_vec(n, reference);
    const TestResult r = t_paired(x, ref_vec, Alternative::TwoSided);
    const bool outside = reference < ci.lower || reference > ci.upper;
    const bool rejected = r.p_raw < 1.0 - level;
    CHECK(outside == rejected);
  }
}

TEST_CASE("null-simulation p-values are uniform") {
  auto rng = make_stream(123, "null-sim");
  std::vector<double> paired_p, welch_p;
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<double> x(10), y(10);
    for (auto& v : x) v = rng.next_normal();
    for (auto& v : y) v = rng.next_normal();
    paired_p.push_back(t_paired(x, y, Alternative::TwoSided).p_raw);
    welch_p.push_back(t_independent(x, y, Alternative::TwoSided).p_raw);
  }
  CHECK(oracles::ks_uniform(paired_p) <= 0.05);
  CHECK(oracles::ks_uniform(welch_p) <= 0.05);
}

TEST_CASE("p-value rendering") {
  CHECK(render_p_value(0.0003) == "<0.001");
  CHECK(render_p_value(0.00049) == "<0.001");
  CHECK(render_p_value(0.036) == "0.036");
  CHECK(render_p_value(1.0) == "1.000");
  CHECK(render_p_value(0.0006) == "0.001");
}
