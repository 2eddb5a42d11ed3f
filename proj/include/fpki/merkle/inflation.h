#ifndef FPKI_MERKLE_INFLATION_H_
#define FPKI_MERKLE_INFLATION_H_

#include <cstdint>

namespace fpki::merkle {

// Expected extra proof bytes an attacker can force by grinding keys whose
// index shares a long prefix with a victim's. With m = hash_rate * duration
// hashes, the expected longest shared prefix is sum_l 1 - (1 - 2^-l)^m; the
// honest tree already has about ceil(log2 baseline_leaves) siblings.
double expected_proof_inflation(double hash_rate, double duration_seconds,
                                double baseline_leaves);

// The prefix-length expectation alone, in bits.
double expected_max_prefix(double m);

constexpr double kSecondsPerYear = 365.0 * 86400.0;

}  // namespace fpki::merkle

#endif  // FPKI_MERKLE_INFLATION_H_
