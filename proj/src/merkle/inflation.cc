#include "fpki/merkle/inflation.h"

#include <algorithm>
#include <cmath>

#include "fpki/merkle/hashes.h"

namespace fpki::merkle {

double expected_max_prefix(double m) {
  if (m <= 0) return 0;
  double sum = 0;
  for (unsigned l = 1; l <= kMaxDepth; ++l) {
    // 1 - (1 - 2^-l)^m without cancellation for large l.
    sum += -std::expm1(m * std::log1p(-std::ldexp(1.0, -int(l))));
  }
  return sum;
}

double expected_proof_inflation(double hash_rate, double duration_seconds,
                                double baseline_leaves) {
  double m = hash_rate * duration_seconds;
  double baseline = baseline_leaves > 1 ? std::ceil(std::log2(baseline_leaves)) : 0;
  return 32.0 * std::max(0.0, expected_max_prefix(m) - baseline);
}

}  // namespace fpki::merkle
