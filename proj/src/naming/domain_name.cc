#include "fpki/naming/domain_name.h"

#include <algorithm>

namespace fpki::naming {

namespace {

std::string join(const std::vector<std::string>& labels, bool wildcard) {
  std::string out = wildcard ? "*" : "";
  for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
    if (!out.empty()) out.push_back('.');
    out += *it;
  }
  return out;
}

}  // namespace

bool is_valid_label(std::string_view label) {
  if (label.empty() || label.size() > kMaxLabelLength) return false;
  if (label.front() == '-' || label.back() == '-') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

DomainName::DomainName(std::vector<std::string> labels, bool wildcard)
    : labels_(std::move(labels)),
      wildcard_(wildcard),
      text_(join(labels_, wildcard_)) {}

DomainName DomainName::parse(std::string_view raw) {
  if (raw.empty()) throw NameError("empty domain name");
  std::string lowered(raw);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c;
  });
  std::string_view text = lowered;
  if (text.back() == '.') text.remove_suffix(1);

  bool wildcard = false;
  if (text.starts_with("*.")) {
    wildcard = true;
    text.remove_prefix(2);
  }
  if (text.empty()) throw NameError("domain name has no labels: " + std::string(raw));

  std::vector<std::string> labels;
  size_t start = 0;
  while (true) {
    size_t dot = text.find('.', start);
    std::string_view label = text.substr(start, dot == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : dot - start);
    if (label == "*")
      throw NameError("wildcard allowed only as the leading label: " + std::string(raw));
    if (!is_valid_label(label))
      throw NameError("malformed label '" + std::string(label) + "' in " + std::string(raw));
    labels.emplace_back(label);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  std::reverse(labels.begin(), labels.end());
  DomainName name(std::move(labels), wildcard);
  if (name.text_.size() > kMaxNameLength)
    throw NameError("domain name exceeds 253 characters");
  return name;
}

std::optional<DomainName> DomainName::try_parse(std::string_view raw) {
  try {
    return parse(raw);
  } catch (const NameError&) {
    return std::nullopt;
  }
}

DomainName DomainName::from_labels(std::vector<std::string> labels,
                                   bool wildcard) {
  for (const auto& l : labels)
    if (!is_valid_label(l)) throw NameError("malformed label '" + l + "'");
  if (labels.empty() && wildcard) throw NameError("bare wildcard");
  DomainName name(std::move(labels), wildcard);
  if (name.text_.size() > kMaxNameLength)
    throw NameError("domain name exceeds 253 characters");
  return name;
}

DomainName DomainName::base() const { return DomainName(labels_, false); }

DomainName DomainName::as_wildcard() const {
  if (labels_.empty()) throw NameError("bare wildcard");
  return DomainName(labels_, true);
}

DomainName DomainName::parent() const {
  if (labels_.empty()) return {};
  return DomainName({labels_.begin(), labels_.end() - 1}, false);
}

DomainName DomainName::child(std::string_view label) const {
  auto labels = labels_;
  labels.emplace_back(label);
  return from_labels(std::move(labels));
}

bool DomainName::is_within(const DomainName& ancestor) const {
  if (ancestor.size() > size()) return false;
  return std::equal(ancestor.labels_.begin(), ancestor.labels_.end(),
                    labels_.begin());
}

bool wildcard_matches(const DomainName& pattern, const DomainName& name,
                      WildcardSemantics semantics) {
  if (!pattern.is_wildcard())
    throw std::invalid_argument("wildcard_matches: pattern " + pattern.str() +
                                " is not a wildcard");
  if (name.is_wildcard()) return false;
  if (semantics == WildcardSemantics::kIncludeBase &&
      name.size() == pattern.size() && name.is_within(pattern))
    return true;
  return name.size() == pattern.size() + 1 && name.is_within(pattern);
}

bool name_matches(const DomainName& certified, const DomainName& name) {
  if (certified.is_wildcard()) return wildcard_matches(certified, name);
  return certified == name;
}

}  // namespace fpki::naming
