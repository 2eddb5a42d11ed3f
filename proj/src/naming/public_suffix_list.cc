#include "fpki/naming/public_suffix_list.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fpki::naming {

namespace {

const std::set<std::string>& special_use_tlds() {
  static const std::set<std::string> kReserved = {"invalid", "test", "localhost"};
  return kReserved;
}

}  // namespace

PublicSuffixList PublicSuffixList::builtin() {
  PublicSuffixList psl;
  psl.source_ = "<builtin>";
  for (const char* rule : {"com", "net", "org", "co.uk", "ac.jp", "gov", "us"})
    psl.add_rule(rule);
  return psl;
}

PublicSuffixList PublicSuffixList::parse(std::string_view text,
                                         std::string source) {
  PublicSuffixList psl;
  psl.source_ = std::move(source);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    // A rule is the first whitespace-delimited token of a non-comment line.
    std::istringstream tokens(line);
    std::string rule;
    if (!(tokens >> rule) || rule.starts_with("//")) continue;
    try {
      psl.add_rule(rule);
    } catch (const NameError&) {
      // IDN or otherwise non-LDH rule.
    }
  }
  return psl;
}

PublicSuffixList PublicSuffixList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read public suffix list " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void PublicSuffixList::add_rule(std::string_view rule) {
  bool exception = false;
  if (rule.starts_with("!")) {
    exception = true;
    rule.remove_prefix(1);
  }
  DomainName name = DomainName::parse(rule);
  Labels labels = name.labels();
  tlds_.insert(labels.front());
  if (exception)
    exceptions_.insert(std::move(labels));
  else if (name.is_wildcard())
    wildcards_.insert(std::move(labels));
  else
    rules_.insert(std::move(labels));
}

bool PublicSuffixList::has_prefix(const Labels& labels, const Labels& prefix) {
  return prefix.size() <= labels.size() &&
         std::equal(prefix.begin(), prefix.end(), labels.begin());
}

size_t PublicSuffixList::suffix_length(const DomainName& name) const {
  const Labels& labels = name.labels();
  if (labels.empty() || !tlds_.contains(labels.front()) ||
      special_use_tlds().contains(labels.front()))
    return 0;

  // Exception rules win over everything: the suffix is the rule minus its
  // leaf-most label.
  for (size_t n = labels.size(); n >= 1; --n) {
    Labels prefix(labels.begin(), labels.begin() + n);
    if (exceptions_.contains(prefix)) return n - 1;
  }
  size_t best = 1;  // implicit "*" rule: the TLD itself
  for (size_t n = 1; n <= labels.size(); ++n) {
    Labels prefix(labels.begin(), labels.begin() + n);
    if (rules_.contains(prefix)) best = std::max(best, n);
    if (n < labels.size() && wildcards_.contains(prefix))
      best = std::max(best, n + 1);
  }
  return best;
}

bool PublicSuffixList::is_public_suffix(const DomainName& name) const {
  size_t n = suffix_length(name);
  return n != 0 && n == name.size();
}

bool PublicSuffixList::is_rule_ancestor(const Labels& labels) const {
  auto check = [&](const std::set<Labels>& set, bool inclusive) {
    // Rules extending |labels| sort directly after it.
    for (auto it = set.lower_bound(labels); it != set.end(); ++it) {
      if (!has_prefix(*it, labels)) break;
      if (inclusive || it->size() > labels.size()) return true;
    }
    return false;
  };
  return check(rules_, false) || check(wildcards_, true);
}

NameClass classify(const DomainName& name, const PublicSuffixList& psl) {
  const auto& labels = name.labels();
  size_t suffix = psl.suffix_length(name);
  if (suffix == 0 || labels.size() <= suffix) return PublicSuffixOrInvalid{};
  if (psl.is_rule_ancestor(labels)) return PublicSuffixOrInvalid{};
  if (labels.size() == suffix + 1) return E2ld{};
  std::vector<std::string> e2ld(labels.begin(), labels.begin() + suffix + 1);
  return Subdomain{DomainName::from_labels(std::move(e2ld)),
                   {labels.begin() + suffix + 1, labels.end()}};
}

DomainName e2ld_of(const DomainName& name, const PublicSuffixList& psl) {
  NameClass c = classify(name, psl);
  if (std::holds_alternative<E2ld>(c)) return name.base();
  if (auto* sub = std::get_if<Subdomain>(&c)) return sub->e2ld;
  throw NameError(name.str() + " is a public suffix or has no valid TLD");
}

}  // namespace fpki::naming
