#ifndef PRUNELAB_STATS_HPP
#define PRUNELAB_STATS_HPP

#include <cstddef>
#include <span>
#include <string>

namespace prunelab {

enum class Alternative { Less, Greater, TwoSided };
enum class TestKind { Paired, Independent };

std::string to_string(Alternative a);
std::string to_string(TestKind k);
Alternative parse_alternative(const std::string& s);

struct TestResult {
  double t = 0.0;
  double df = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;  // equals p_raw until a correction is applied
  Alternative alternative = Alternative::TwoSided;
  TestKind kind = TestKind::Paired;
  // Zero-variance input; the p-value is a limit (0, 1, 0.5) rather than a
  // finite-t computation.
  bool degenerate = false;
};

// One-sample t on the differences x - y; df = n - 1.
TestResult t_paired(std::span<const double> x, std::span<const double> y, Alternative alt);

// Welch's t with Welch-Satterthwaite degrees of freedom.
TestResult t_independent(std::span<const double> x, std::span<const double> y, Alternative alt);

// min(1, k * p).
double bonferroni(double p, std::size_t k);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  std::size_t n = 0;
};

// mean +- t_{(1+level)/2, n-1} * s / sqrt(n), sample standard deviation s.
ConfidenceInterval ci_mean(std::span<const double> x, double level);

// '<' when the interval lies below the reference, '>' above, '?' when it
// overlaps (touching counts as overlap).
char classify_ci(const ConfidenceInterval& ci, double reference = 1.0);

// Student-t distribution via the regularized incomplete beta function.
double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);
double regularized_incomplete_beta(double x, double a, double b);

// "<0.001" below 0.0005, otherwise three decimals (so a capped value prints
// as "1.000").
std::string render_p_value(double p);

}  // namespace prunelab

#endif
