#include "fpki/harness/bench.h"

#include <chrono>
#include <random>
#include <sstream>

#include "fpki/certmodel/test_ca.h"
#include "fpki/mapserver/map_state.h"
#include "fpki/transport/wire.h"

namespace fpki::harness {

namespace {

std::string label(std::mt19937_64& rng) {
  static const char kAlpha[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string s;
  for (int i = 0; i < 12; ++i) s += kAlpha[rng() % 36];
  return s;
}

}  // namespace

std::vector<BenchRow> bench(const BenchParams& p) {
  std::vector<BenchRow> rows;
  std::mt19937_64 rng(p.seed);
  auto ca = cert::CertificateAuthority::root(p.seed ^ 0xbe4c);
  auto issue = [&](std::string name) {
    cert::IssueOptions o;
    o.names = {std::move(name)};
    return ca.issue_chained(o);
  };

  for (size_t leaves : p.leaves) {
    map::RevisionDelta filler;
    filler.certs.reserve(leaves);
    for (size_t i = 0; i < leaves; ++i) filler.certs.push_back(issue(label(rng) + ".com"));
    const map::MapState base = map::MapState().apply(filler);

    // Absence proof of a name that is not in the map: the full sibling list
    // is always 256 hashes.
    auto absent = base.prove(naming::DomainName::parse(label(rng) + "-absent.com"));
    size_t absence = absent.front().proof.uncompressed_size();

    for (unsigned depth : p.depths) {
      map::RevisionDelta targets;
      std::vector<naming::DomainName> names;
      for (size_t s = 0; s < p.samples; ++s) {
        std::string name = label(rng) + ".com";
        targets.certs.push_back(issue(name));
        for (unsigned level = 1; level < depth; ++level) {
          for (unsigned k = 0; k < p.fanout; ++k) targets.certs.push_back(issue(label(rng) + "." + name));
          name = label(rng) + "." + name;
          targets.certs.push_back(issue(name));
        }
        names.push_back(naming::DomainName::parse(name));
      }
      const map::MapState state = base.apply(targets);

      BenchRow row;
      row.leaves = leaves;
      row.depth = depth;
      row.samples = names.size();
      row.uncompressed_absence_bytes = absence;
      double bytes = 0, deflated = 0, top = 0, total = 0, us = 0;
      for (const auto& n : names) {
        auto levels = state.prove(n);
        Bytes all;
        for (const auto& l : levels) {
          Bytes b = merkle::serialize(l.proof);
          all.insert(all.end(), b.begin(), b.end());
          total += l.proof.siblings.size();
        }
        top += levels.front().proof.siblings.size();
        bytes += all.size();
        deflated += transport::deflate_raw(all).size();
      }
      // Timed separately over warm repetitions; single proofs take a few
      // microseconds.
      constexpr int kReps = 20;
      auto start = std::chrono::steady_clock::now();
      size_t sink = 0;
      for (int rep = 0; rep < kReps; ++rep)
        for (const auto& n : names) sink += state.prove(n).size();
      us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start)
               .count() /
           kReps;
      if (sink == 0 && !names.empty()) us = 0;
      double k = names.empty() ? 1 : double(names.size());
      row.mean_proof_bytes = bytes / k;
      row.mean_deflated_bytes = deflated / k;
      row.mean_top_siblings = top / k;
      row.mean_total_siblings = total / k;
      row.mean_generation_us = us / k;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv_header() {
  return "leaves,depth,samples,mean_proof_bytes,mean_deflated_bytes,mean_top_siblings,"
         "mean_total_siblings,uncompressed_absence_bytes,mean_generation_us";
}

std::string to_csv(const BenchRow& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << r.leaves << ',' << r.depth << ',' << r.samples << ',' << r.mean_proof_bytes << ','
      << r.mean_deflated_bytes << ',' << r.mean_top_siblings << ',' << r.mean_total_siblings
      << ',' << r.uncompressed_absence_bytes << ',' << r.mean_generation_us;
  return out.str();
}

}  // namespace fpki::harness
