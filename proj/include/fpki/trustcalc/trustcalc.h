#ifndef FPKI_TRUSTCALC_TRUSTCALC_H_
#define FPKI_TRUSTCALC_TRUSTCALC_H_

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fpki/naming/name_realm.h"

namespace fpki::trust {

using naming::DomainName;
using naming::NamePattern;
using naming::NameRealm;

// Keys and log ids are opaque symbols. The null key stands for "no valid
// certificate exists for this name" in proofs of compliance.
using Key = std::string;
inline const Key kNullKey = "\xe2\x88\x85";  // U+2205
using KeySet = std::set<Key>;

// Half-open [lo, hi) in unix seconds; the extremes act as -inf / +inf.
struct Interval {
  static constexpr int64_t kMin = std::numeric_limits<int64_t>::min();
  static constexpr int64_t kMax = std::numeric_limits<int64_t>::max();

  int64_t lo = kMin;
  int64_t hi = kMax;

  bool empty() const { return lo >= hi; }
  bool contains(int64_t t) const { return lo <= t && t < hi; }
  // nullopt when the intersection is empty.
  std::optional<Interval> intersect(const Interval& o) const;

  friend auto operator<=>(const Interval&, const Interval&) = default;
};

struct Aut {
  Key x;
  DomainName n;
  NameRealm r;
  Interval i;
  friend auto operator<=>(const Aut&, const Aut&) = default;
};

struct Cert {
  Key x1, x2;
  DomainName n;
  NameRealm r;
  Interval i;
  friend auto operator<=>(const Cert&, const Cert&) = default;
};

struct LogTrust {
  std::string l;
  KeySet s;
  friend auto operator<=>(const LogTrust&, const LogTrust&) = default;
};

struct Proof {
  std::string l;
  Key x;
  DomainName n;
  Interval i;
  friend auto operator<=>(const Proof&, const Proof&) = default;
};

struct Compliant {
  Key x;
  DomainName n;
  KeySet s;
  Interval i;
  friend auto operator<=>(const Compliant&, const Compliant&) = default;
};

using Statement = std::variant<Aut, Cert, LogTrust, Proof, Compliant>;

// The set of highly trusted authorities per name. Each entry applies to the
// names its pattern covers; f(N) is the union over matching entries.
class TrustFunction {
 public:
  void add(NamePattern pattern, KeySet keys);
  KeySet operator()(const DomainName& n) const;
  const std::map<NamePattern, KeySet>& entries() const { return entries_; }
  friend bool operator==(const TrustFunction&, const TrustFunction&) = default;

 private:
  std::map<NamePattern, KeySet> entries_;
};

struct View {
  std::set<Statement> statements;
  TrustFunction f;
};

// Least fixed point of the view's statements under the three rules:
//  1. LogTrust(L,S), Proof(L,X,N,I)            |- Compliant(X,N,S,I)
//  2. Compliant(X,N,S1,I1), Compliant(X',N,S2,I2), X' in {X, null}
//                                              |- Compliant(X,N,S1+S2,I1&I2)
//  3. Aut(X1,N1,R1,I1), Cert(X1,X2,N2,R2,I2), Compliant(X2,N2,S,I3),
//     f(N2) <= S, N2 in R1                     |- Aut(X2,N2,R1&R2,I1&I2&I3)
// A derivation whose interval intersection is empty produces nothing.
std::set<Statement> derive_closure(const View& view);

// Closure minus the axioms.
std::set<Statement> derived_only(const View& view);

bool is_authentic(const View& view, const Key& x, const DomainName& n, int64_t at);
bool is_authentic(const std::set<Statement>& closure, const Key& x, const DomainName& n,
                  int64_t at);

// Text form, one statement per line:
//   Aut(X, N, R, I)  Cert(X1, X2, N, R, I)  LogTrust(L, S)
//   Proof(L, X, N, I)  Compliant(X, N, S, I)  f(P) = S
// Realms use NameRealm text ("*", "{}", "{.example.com, a.org}"), key sets
// "{A, B}", intervals "[0,100)" with -inf / inf, the null key "∅" or "null".
// '#' starts a comment.
class ParseError : public std::runtime_error {
 public:
  ParseError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

View parse_view(std::string_view text);
// One statement (no f lines). Throws ParseError with line 0.
Statement parse_statement(std::string_view text);
// Statements only, e.g. an expectation file.
std::set<Statement> parse_statements(std::string_view text);

std::string to_string(const Interval& i);
std::string to_string(const KeySet& s);
std::string to_string(const Statement& s);
std::string to_string(const View& v);

}  // namespace fpki::trust

#endif  // FPKI_TRUSTCALC_TRUSTCALC_H_
