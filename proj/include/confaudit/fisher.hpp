#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "confaudit/error.hpp"

namespace confaudit {

enum class TestStatus { Ok, ZeroMargin };

// 2x2 association: table laid out row-major as
//   [ a b ]   rows: exposure level, columns: case status
//   [ c d ]
struct AssociationResult {
  double odds_ratio = 1.0;
  double p_value = 1.0;
  std::array<long long, 4> table{0, 0, 0, 0};  // a, b, c, d
  TestStatus status = TestStatus::Ok;
};

inline double log_choose(long long n, long long k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Two-sided Fisher's exact test. The p-value sums hypergeometric
// probabilities (fixed margins) of every table whose probability does not
// exceed the observed table's, with the usual 1e-7 relative slack on the
// comparison. Probabilities are evaluated in log space.
//
// Odds ratio is the sample (a*d)/(b*c); a 0.5 continuity correction is added
// to every cell only when some cell is zero. A zero margin means only one
// table is consistent with the margins: p = 1 and status flags the case.
inline AssociationResult fisher_exact(long long a, long long b, long long c,
                                      long long d) {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw DataError("fisher_exact: negative cell count");
  AssociationResult res;
  res.table = {a, b, c, d};

  if (a == 0 || b == 0 || c == 0 || d == 0) {
    double aa = a + 0.5, bb = b + 0.5, cc = c + 0.5, dd = d + 0.5;
    res.odds_ratio = (aa * dd) / (bb * cc);
  } else {
    res.odds_ratio = (static_cast<double>(a) * static_cast<double>(d)) /
                     (static_cast<double>(b) * static_cast<double>(c));
  }

  long long r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  long long n = r1 + r2;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
    res.status = TestStatus::ZeroMargin;
    res.p_value = 1.0;
    return res;
  }

  // log P(first cell = k) for the hypergeometric with these margins
  double log_denom = log_choose(n, c1);
  auto log_pmf = [&](long long k) {
    return log_choose(r1, k) + log_choose(r2, c1 - k) - log_denom;
  };

  long long k_lo = std::max<long long>(0, c1 - r2);
  long long k_hi = std::min(r1, c1);
  double log_obs = log_pmf(a);
  double cutoff = log_obs + std::log1p(1e-7);

  double p = 0.0;
  for (long long k = k_lo; k <= k_hi; ++k) {
    double lp = log_pmf(k);
    if (lp <= cutoff) p += std::exp(lp);
  }
  res.p_value = std::min(1.0, p);
  return res;
}

inline AssociationResult fisher_exact(const std::array<long long, 4>& t) {
  return fisher_exact(t[0], t[1], t[2], t[3]);
}

}  // namespace confaudit
