#ifndef FPKI_HARNESS_BENCH_H_
#define FPKI_HARNESS_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

namespace fpki::harness {

struct BenchParams {
  std::vector<size_t> leaves{1024};
  std::vector<unsigned> depths{1, 2, 3};  // levels in a bundle, 1 = e2LD only
  size_t samples = 100;
  unsigned fanout = 8;  // siblings beside the sampled name at every lower level
  uint64_t seed = 1;
};

struct BenchRow {
  size_t leaves = 0;
  unsigned depth = 0;
  size_t samples = 0;
  double mean_proof_bytes = 0;     // serialized compressed proofs, all levels
  double mean_deflated_bytes = 0;  // the same, raw DEFLATE
  double mean_top_siblings = 0;    // non-default siblings in the e2LD proof
  double mean_total_siblings = 0;
  size_t uncompressed_absence_bytes = 0;
  double mean_generation_us = 0;
};

// |leaves| random e2LDs with one certificate each, plus |samples| target
// names |depth| levels deep. Proofs are generated for the targets.
std::vector<BenchRow> bench(const BenchParams& p);

std::string bench_csv_header();
std::string to_csv(const BenchRow& r);

}  // namespace fpki::harness

#endif  // FPKI_HARNESS_BENCH_H_
