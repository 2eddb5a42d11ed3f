#ifndef FPKI_HARNESS_SCENARIO_H_
#define FPKI_HARNESS_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpki/mapserver/map_entry.h"

namespace fpki::harness {

// Script line that cannot be run: unknown command, undefined entity, bad
// argument. Raised before or during execution.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// One scripted step. Commands (arguments in brackets are optional):
//   scenario NAME
//   seed N
//   time T                      T in seconds, or with suffix d / h
//   root CA [untrusted] [realm R] [validity A B]
//   intermediate CA of PARENT [realm R] [validity A B]
//   highly-trusted CA[,CA...] [for R]
//   server ID [supports CA,...] [cost C]
//   quorum N
//   fail-mode hard|soft
//   browser-policy POLICY...
//   cert NAME by CA names N1[,N2...] [validity A B] [policy POLICY...]
//   ingest CERT[,CERT...] [into S,...]
//   revoke CERT [policy-only] [by owner|CA] [into S,...]
//   prune [into S,...]
//   commit [S,...]
//   fork S as COPY
//   connect DOMAIN with CERT [via S,...] expect accept|reject|unavailable
//   http-connect DOMAIN [via S,...] expect downgrade|plain
//   monitor DOMAIN owner CA[,CA...] [via S,...] expect alert|clean
//   gossip S1 S2 expect split-view|consistent
// Policies use the certmodel text form with CA names for key ids. Realms
// use NameRealm text. '#' starts a comment.
struct Step {
  size_t line = 0;
  std::vector<std::string> words;
};

struct Scenario {
  std::string name;
  uint64_t seed = 1;
  std::vector<Step> steps;
};

// Throws ScenarioError on lexical problems (unknown command, bad arity);
// references are checked when the scenario runs.
Scenario parse_scenario(std::string_view text, std::string default_name = "scenario");
Scenario load_scenario(const std::string& path);

struct CheckResult {
  size_t line = 0;
  std::string what;      // the script line
  std::string expected;
  std::string actual;
  std::string detail;    // reason from the validator, evidence for alerts
  bool pass() const { return expected == actual; }
};

struct ScenarioReport {
  std::string name;
  std::vector<CheckResult> checks;
  bool passed() const;
  size_t failures() const;
  std::string str() const;  // one line per check plus a summary
};

// Runs against in-process map servers and a client. Deterministic for a
// given scenario (seed included). Throws ScenarioError for setup errors.
ScenarioReport run_scenario(const Scenario& s);

// Random downgrade attempt: the attacker controls every CA that is not
// highly trusted and some map servers (which omit the legitimate
// certificate), while enough honest servers remain for the quorum. A highly
// trusted CA has issued a certificate whose ISSUERS policy excludes the
// attacker. The single check expects the attacker certificate to be rejected.
Scenario random_downgrade_instance(uint64_t seed);

// Pairwise head comparison standing in for gossip: two validly signed heads
// from the same server with the same revision but different roots.
enum class GossipResult { kConsistent, kSplitView, kUnverifiable };
GossipResult compare_heads(const map::SignedMapHead& a, const map::SignedMapHead& b,
                           const PublicKey& server_key);

}  // namespace fpki::harness

#endif  // FPKI_HARNESS_SCENARIO_H_
