#include "fpki/naming/name_realm.h"

#include <vector>

namespace fpki::naming {

NamePattern::NamePattern(Kind kind, DomainName base)
    : kind_(kind), base_(std::move(base).base()) {
  if (base_.empty()) throw NameError("name pattern without labels");
}

NamePattern NamePattern::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.starts_with(".")) {
    text.remove_prefix(1);
    return NamePattern(Kind::kSubtree, DomainName::parse(text));
  }
  DomainName name = DomainName::parse(text);
  return NamePattern(name.is_wildcard() ? Kind::kWildcard : Kind::kExact, name);
}

std::string NamePattern::str() const {
  switch (kind_) {
    case Kind::kExact: return base_.str();
    case Kind::kWildcard: return "*." + base_.str();
    case Kind::kSubtree: return "." + base_.str();
  }
  return {};
}

bool NamePattern::covers(const DomainName& name) const {
  if (name.is_wildcard()) {
    // The expansions of *.x are the children of x.
    switch (kind_) {
      case Kind::kExact: return false;
      case Kind::kWildcard: return name.base() == base_;
      case Kind::kSubtree: return name.is_within(base_);
    }
  }
  switch (kind_) {
    case Kind::kExact: return name == base_;
    case Kind::kWildcard: return name.size() == base_.size() + 1 && name.is_within(base_);
    case Kind::kSubtree: return name.is_within(base_);
  }
  return false;
}

bool NamePattern::subsumed_by(const NamePattern& other) const {
  switch (kind_) {
    case Kind::kExact: return other.covers(base_);
    case Kind::kWildcard: return other.covers(base_.as_wildcard());
    case Kind::kSubtree:
      return other.kind_ == Kind::kSubtree && base_.is_within(other.base_);
  }
  return false;
}

std::optional<NamePattern> NamePattern::intersect(const NamePattern& other) const {
  if (subsumed_by(other)) return *this;
  if (other.subsumed_by(*this)) return other;
  // Remaining non-trivial overlap: *.x with .s where s is a child of x.
  const NamePattern* wild = kind_ == Kind::kWildcard ? this : &other;
  const NamePattern* sub = kind_ == Kind::kSubtree ? this : &other;
  if (wild->kind_ == Kind::kWildcard && sub->kind_ == Kind::kSubtree &&
      wild->covers(sub->base_))
    return NamePattern(Kind::kExact, sub->base_);
  return std::nullopt;
}

NameRealm NameRealm::of(std::initializer_list<std::string_view> patterns) {
  NameRealm r;
  for (auto p : patterns) r.add(NamePattern::parse(p));
  return r;
}

NameRealm NameRealm::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "*") return all();
  if (text.starts_with("{")) {
    if (!text.ends_with("}")) throw NameError("unbalanced realm braces");
    text = text.substr(1, text.size() - 2);
  }
  NameRealm r;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    std::string_view item = text.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
    if (item.find_first_not_of(' ') != std::string_view::npos)
      r.add(NamePattern::parse(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return r;
}

void NameRealm::add(NamePattern pattern) {
  if (all_) return;
  for (const auto& p : patterns_)
    if (pattern.subsumed_by(p)) return;
  std::erase_if(patterns_, [&](const NamePattern& p) { return p.subsumed_by(pattern); });
  patterns_.insert(std::move(pattern));
}

bool NameRealm::covers(const DomainName& name) const {
  if (all_) return true;
  for (const auto& p : patterns_)
    if (p.covers(name)) return true;
  return false;
}

NameRealm NameRealm::intersect(const NameRealm& other) const {
  if (all_) return other;
  if (other.all_) return *this;
  NameRealm out;
  for (const auto& a : patterns_)
    for (const auto& b : other.patterns_)
      if (auto p = a.intersect(b)) out.add(*p);
  return out;
}

std::string NameRealm::str() const {
  if (all_) return "*";
  std::string out = "{";
  for (const auto& p : patterns_) {
    if (out.size() > 1) out += ", ";
    out += p.str();
  }
  return out + "}";
}

}  // namespace fpki::naming
