#ifndef FPKI_NAMING_NAME_REALM_H_
#define FPKI_NAMING_NAME_REALM_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "fpki/naming/domain_name.h"

namespace fpki::naming {

// One element of a realm. Text forms:
//   "example.com"    exactly that name
//   "*.example.com"  names exactly one label below example.com
//   ".example.com"   example.com and every name below it
class NamePattern {
 public:
  enum class Kind { kExact = 0, kWildcard = 1, kSubtree = 2 };

  NamePattern(Kind kind, DomainName base);
  // Throws NameError.
  static NamePattern parse(std::string_view text);

  Kind kind() const { return kind_; }
  const DomainName& base() const { return base_; }
  std::string str() const;

  // |name| may itself be a wildcard, in which case every expansion must be
  // covered.
  bool covers(const DomainName& name) const;
  // True iff every name this pattern covers is covered by |other|.
  bool subsumed_by(const NamePattern& other) const;
  std::optional<NamePattern> intersect(const NamePattern& other) const;

  friend bool operator==(const NamePattern&, const NamePattern&) = default;
  friend auto operator<=>(const NamePattern& a, const NamePattern& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return a.base_ <=> b.base_;
  }

 private:
  Kind kind_;
  DomainName base_;
};

// A set of names: either every name, or a finite union of patterns kept in
// canonical form (no pattern subsumed by another).
class NameRealm {
 public:
  NameRealm() = default;  // empty realm
  static NameRealm all() { NameRealm r; r.all_ = true; return r; }
  static NameRealm of(std::initializer_list<std::string_view> patterns);
  // "*" for all names, "{}" or "" for none, else comma-separated patterns
  // optionally wrapped in braces.
  static NameRealm parse(std::string_view text);

  void add(NamePattern pattern);

  bool is_all() const { return all_; }
  bool empty() const { return !all_ && patterns_.empty(); }
  const std::set<NamePattern>& patterns() const { return patterns_; }

  bool covers(const DomainName& name) const;
  NameRealm intersect(const NameRealm& other) const;
  std::string str() const;

  friend bool operator==(const NameRealm&, const NameRealm&) = default;
  friend auto operator<=>(const NameRealm&, const NameRealm&) = default;

 private:
  bool all_ = false;
  std::set<NamePattern> patterns_;
};

}  // namespace fpki::naming

#endif  // FPKI_NAMING_NAME_REALM_H_
