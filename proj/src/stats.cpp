#include "prunelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "prunelab/error.hpp"

namespace prunelab {

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
    case Alternative::TwoSided: return "two-sided";
  }
  return "?";
}

std::string to_string(TestKind k) {
  return k == TestKind::Paired ? "paired" : "independent";
}

Alternative parse_alternative(const std::string& s) {
  if (s == "less") return Alternative::Less;
  if (s == "greater") return Alternative::Greater;
  if (s == "two-sided" || s == "two_sided" || s == "twosided") return Alternative::TwoSided;
  throw ConfigError("unknown alternative: '" + s + "'");
}

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m <= 500; ++m) {
    const double dm = static_cast<double>(m);
    // even step
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    result *= d * c;
    // odd step
    num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    result *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return result;
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // sample variance, n - 1 denominator
};

MeanVar mean_var(std::span<const double> x) {
  MeanVar mv;
  const double n = static_cast<double>(x.size());
  for (double v : x) mv.mean += v;
  mv.mean /= n;
  for (double v : x) mv.var += (v - mv.mean) * (v - mv.mean);
  mv.var /= (n - 1.0);
  return mv;
}

// p-value for the observed t under the given alternative, with limits for
// degenerate inputs (t = +-inf from zero variance).
double p_from_t(double t, double df, Alternative alt) {
  double cdf;
  if (std::isinf(t)) {
    cdf = t > 0 ? 1.0 : 0.0;
  } else {
    cdf = student_t_cdf(t, df);
  }
  switch (alt) {
    case Alternative::Less: return cdf;
    case Alternative::Greater: return 1.0 - cdf;
    case Alternative::TwoSided: return std::clamp(2.0 * std::min(cdf, 1.0 - cdf), 0.0, 1.0);
  }
  return 1.0;
}

TestResult finish_test(double t, double df, Alternative alt, TestKind kind, bool degenerate) {
  TestResult r;
  r.t = t;
  r.df = df;
  r.alternative = alt;
  r.kind = kind;
  r.degenerate = degenerate;
  if (degenerate && t == 0.0) {
    // zero variance and zero effect: flat limit
    r.p_raw = alt == Alternative::TwoSided ? 1.0 : 0.5;
  } else {
    r.p_raw = p_from_t(t, df, alt);
  }
  r.p_adjusted = r.p_raw;
  return r;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw NumericError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw NumericError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  // The continued fraction converges quickly for x < (a + 1) / (a + b + 2).
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw NumericError("t distribution needs df > 0");
  if (t == 0.0) return 0.5;
  const double x = df / (t * t + df);
  const double half_tail = 0.5 * regularized_incomplete_beta(x, 0.5 * df, 0.5);
  return t > 0.0 ? 1.0 - half_tail : half_tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("t quantile needs p in (0, 1)");
  if (p == 0.5) return 0.0;
  // Bracket, then bisect; the CDF is strictly increasing.
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, df) > p) lo *= 2.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (student_t_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TestResult t_paired(std::span<const double> x, std::span<const double> y, Alternative alt) {
  if (x.size() != y.size()) throw InputError("paired samples must have equal lengths");
  if (x.size() < 2) throw InputError("paired t-test needs n >= 2");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const MeanVar mv = mean_var(d);
  const double n = static_cast<double>(d.size());
  const double df = n - 1.0;
  if (mv.var == 0.0) {
    const double t = mv.mean == 0.0 ? 0.0
                     : (mv.mean > 0.0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity());
    return finish_test(t, df, alt, TestKind::Paired, true);
  }
  const double t = mv.mean / std::sqrt(mv.var / n);
  return finish_test(t, df, alt, TestKind::Paired, false);
}

TestResult t_independent(std::span<const double> x, std::span<const double> y, Alternative alt) {
  if (x.size() < 2 || y.size() < 2) throw InputError("independent t-test needs n >= 2 per sample");
  const MeanVar mx = mean_var(x);
  const MeanVar my = mean_var(y);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double vx = mx.var / nx;
  const double vy = my.var / ny;
  const double diff = mx.mean - my.mean;
  if (vx + vy == 0.0) {
    const double t = diff == 0.0 ? 0.0
                     : (diff > 0.0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity());
    return finish_test(t, nx + ny - 2.0, alt, TestKind::Independent, true);
  }
  const double t = diff / std::sqrt(vx + vy);
  // Welch-Satterthwaite degrees of freedom.
  const double df = (vx + vy) * (vx + vy) /
                    (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
  return finish_test(t, df, alt, TestKind::Independent, false);
}

double bonferroni(double p, std::size_t k) {
  if (k < 1) throw UsageError("bonferroni needs k >= 1");
  return std::min(1.0, static_cast<double>(k) * p);
}

ConfidenceInterval ci_mean(std::span<const double> x, double level) {
  if (x.size() < 2) throw InputError("confidence interval needs n >= 2");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must be in (0, 1)");
  const MeanVar mv = mean_var(x);
  const double n = static_cast<double>(x.size());
  const double tq = student_t_quantile(0.5 * (1.0 + level), n - 1.0);
  const double half = tq * std::sqrt(mv.var / n);
  return {mv.mean - half, mv.mean + half, level, x.size()};
}

char classify_ci(const ConfidenceInterval& ci, double reference) {
  if (ci.upper < reference) return '<';
  if (ci.lower > reference) return '>';
  return '?';
}

std::string render_p_value(double p) {
  if (p < 0.0005) return "<0.001";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

}  // namespace prunelab
