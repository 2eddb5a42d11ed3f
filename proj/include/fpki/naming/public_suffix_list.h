#ifndef FPKI_NAMING_PUBLIC_SUFFIX_LIST_H_
#define FPKI_NAMING_PUBLIC_SUFFIX_LIST_H_

#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fpki/naming/domain_name.h"

namespace fpki::naming {

struct PublicSuffixOrInvalid {
  friend bool operator==(const PublicSuffixOrInvalid&, const PublicSuffixOrInvalid&) = default;
};
struct E2ld {
  friend bool operator==(const E2ld&, const E2ld&) = default;
};
struct Subdomain {
  DomainName e2ld;
  // Labels below the e2LD, e2LD-adjacent first: a.b.example.com -> [b, a].
  std::vector<std::string> chain;
  friend bool operator==(const Subdomain&, const Subdomain&) = default;
};
using NameClass = std::variant<PublicSuffixOrInvalid, E2ld, Subdomain>;

// Rules in the public-suffix list text format: plain suffixes, "*." wildcard
// rules and "!" exceptions. Lines that are not LDH names (IDN rules) are
// skipped. Names under a special-use TLD (invalid, test, localhost) and names
// whose TLD no rule mentions are never registrable.
class PublicSuffixList {
 public:
  // com, net, org, co.uk, ac.jp, gov, us; "invalid" is reserved.
  static PublicSuffixList builtin();
  static PublicSuffixList parse(std::string_view text,
                                std::string source = "<inline>");
  // Throws std::runtime_error if the file cannot be read.
  static PublicSuffixList load(const std::string& path);

  void add_rule(std::string_view rule);

  // Number of labels of the public suffix of |name|, or 0 when the name has
  // no valid TLD.
  size_t suffix_length(const DomainName& name) const;
  bool is_public_suffix(const DomainName& name) const;

  const std::string& source() const { return source_; }
  size_t rule_count() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  using Labels = std::vector<std::string>;
  static bool has_prefix(const Labels& labels, const Labels& prefix);
  bool is_rule_ancestor(const Labels& labels) const;

  std::set<Labels> rules_;
  std::set<Labels> wildcards_;   // base of "*.base"
  std::set<Labels> exceptions_;  // full "!name" labels
  std::set<std::string> tlds_;
  std::string source_;

  friend NameClass classify(const DomainName&, const PublicSuffixList&);
};

NameClass classify(const DomainName& name, const PublicSuffixList& psl);

inline bool is_e2ld(const NameClass& c) { return std::holds_alternative<E2ld>(c); }
inline bool is_valid_class(const NameClass& c) {
  return !std::holds_alternative<PublicSuffixOrInvalid>(c);
}

// e2LD of a name that classifies E2LD or Subdomain. Throws NameError otherwise.
DomainName e2ld_of(const DomainName& name, const PublicSuffixList& psl);

}  // namespace fpki::naming

#endif  // FPKI_NAMING_PUBLIC_SUFFIX_LIST_H_
