#include "fpki/certmodel/policy.h"

#include <algorithm>
#include <sstream>

namespace fpki::cert {

KeySet KeySet::intersect(const KeySet& other) const {
  if (all_) return other;
  if (other.all_) return *this;
  KeySet out;
  std::set_intersection(keys_.begin(), keys_.end(), other.keys_.begin(),
                        other.keys_.end(),
                        std::inserter(out.keys_, out.keys_.end()));
  return out;
}

bool KeySet::subset_of(const KeySet& other) const {
  if (other.all_) return true;
  if (all_) return false;
  return std::includes(other.keys_.begin(), other.keys_.end(), keys_.begin(),
                       keys_.end());
}

DomainPolicy DomainPolicy::permissive() {
  DomainPolicy p;
  p.issuers.value = KeySet::all();
  p.subdomains.value = NameRealm::all();
  p.wildcard_forbidden.value = false;
  p.max_lifetime.value = kUnlimitedLifetime;
  return p;
}

bool DomainPolicy::present(Attribute a) const {
  switch (a) {
    case Attribute::kIssuers: return issuers.present();
    case Attribute::kSubdomains: return subdomains.present();
    case Attribute::kWildcardForbidden: return wildcard_forbidden.present();
    case Attribute::kMaxLifetime: return max_lifetime.present();
  }
  return false;
}

bool DomainPolicy::inherited(Attribute a) const {
  switch (a) {
    case Attribute::kIssuers: return issuers.present() && issuers.inherited;
    case Attribute::kSubdomains: return subdomains.present() && subdomains.inherited;
    case Attribute::kWildcardForbidden:
      return wildcard_forbidden.present() && wildcard_forbidden.inherited;
    case Attribute::kMaxLifetime: return max_lifetime.present() && max_lifetime.inherited;
  }
  return false;
}

bool DomainPolicy::empty() const {
  return std::none_of(kAllAttributes.begin(), kAllAttributes.end(),
                      [&](Attribute a) { return present(a); });
}

bool DomainPolicy::complete() const {
  return std::all_of(kAllAttributes.begin(), kAllAttributes.end(),
                     [&](Attribute a) { return present(a); });
}

void fold_attribute(DomainPolicy& acc, const DomainPolicy& other, Attribute a) {
  if (!other.present(a)) return;
  switch (a) {
    case Attribute::kIssuers:
      acc.issuers.value = acc.issuers.value->intersect(*other.issuers.value);
      break;
    case Attribute::kSubdomains:
      acc.subdomains.value = acc.subdomains.value->intersect(*other.subdomains.value);
      break;
    case Attribute::kWildcardForbidden:
      // WILDCARD_FORBIDDEN is stored negated relative to "wildcards allowed";
      // the conjunction is over the permission, so the prohibition is an OR.
      acc.wildcard_forbidden.value =
          *acc.wildcard_forbidden.value || *other.wildcard_forbidden.value;
      break;
    case Attribute::kMaxLifetime:
      acc.max_lifetime.value =
          std::min(*acc.max_lifetime.value, *other.max_lifetime.value);
      break;
  }
}

DomainPolicy fold_policies(const DomainPolicy& base,
                           std::span<const PolicyContribution> others) {
  if (!base.complete())
    throw std::invalid_argument("fold_policies: base policy must define every attribute");
  DomainPolicy acc = base;
  for (const auto& c : others)
    for (Attribute a : kAllAttributes)
      if (c.applies.test(a)) fold_attribute(acc, c.policy, a);
  return acc;
}

namespace {

template <typename T, typename Fn>
void encode_attribute(tlv::Writer& w, const PolicyAttribute<T>& attr, Fn&& value) {
  size_t mark = w.open_list(attr.present() ? 2 : 0);
  if (attr.present()) {
    w.boolean(attr.inherited);
    value(*attr.value);
  }
  w.close_list(mark);
}

template <typename T, typename Fn>
PolicyAttribute<T> read_attribute(tlv::Reader& r, Fn&& value) {
  uint32_t count = 0;
  tlv::Reader items = r.list(count);
  PolicyAttribute<T> attr;
  if (count == 2) {
    attr.inherited = items.boolean();
    attr.value = value(items);
  } else if (count != 0) {
    throw tlv::DecodeError("policy attribute must have 0 or 2 items");
  }
  items.expect_end();
  return attr;
}

}  // namespace

void encode_realm(tlv::Writer& w, const NameRealm& realm) {
  size_t mark = w.open_list(2);
  w.boolean(realm.is_all());
  w.list(realm.patterns(), [](tlv::Writer& w, const naming::NamePattern& p) { w.string(p.str()); });
  w.close_list(mark);
}

NameRealm read_realm(tlv::Reader& r) {
  uint32_t count = 0;
  tlv::Reader items = r.list(count);
  if (count != 2) throw tlv::DecodeError("realm must have 2 items");
  bool all = items.boolean();
  auto patterns = items.read_list([](tlv::Reader& r) {
    try {
      return naming::NamePattern::parse(r.string());
    } catch (const naming::NameError& e) {
      throw tlv::DecodeError(e.what());
    }
  });
  items.expect_end();
  if (all && !patterns.empty()) throw tlv::DecodeError("realm 'all' with patterns");
  NameRealm realm = all ? NameRealm::all() : NameRealm();
  for (auto& p : patterns) realm.add(std::move(p));
  if (realm.patterns().size() != patterns.size())
    throw tlv::DecodeError("realm patterns not canonical");
  return realm;
}

void encode_to(tlv::Writer& w, const DomainPolicy& p) {
  size_t mark = w.open(tlv::Tag::kDomainPolicy);
  encode_attribute(w, p.issuers, [&](const KeySet& s) {
    size_t m = w.open_list(2);
    w.boolean(s.is_all());
    w.list(s.keys(), [](tlv::Writer& w, const KeyId& k) { w.hash(k); });
    w.close_list(m);
  });
  encode_attribute(w, p.subdomains, [&](const NameRealm& realm) { encode_realm(w, realm); });
  encode_attribute(w, p.wildcard_forbidden, [&](bool b) { w.boolean(b); });
  encode_attribute(w, p.max_lifetime, [&](uint64_t v) { w.integer(v); });
  w.close(mark);
}

DomainPolicy read_policy(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kDomainPolicy);
  DomainPolicy p;
  p.issuers = read_attribute<KeySet>(r, [](tlv::Reader& r) {
    uint32_t count = 0;
    tlv::Reader items = r.list(count);
    if (count != 2) throw tlv::DecodeError("key set must have 2 items");
    bool all = items.boolean();
    auto keys = items.read_list([](tlv::Reader& r) { return r.hash(); });
    items.expect_end();
    std::set<KeyId> set(keys.begin(), keys.end());
    if (set.size() != keys.size() || !std::is_sorted(keys.begin(), keys.end()))
      throw tlv::DecodeError("key set not canonical");
    if (all && !keys.empty()) throw tlv::DecodeError("key set 'all' with members");
    return all ? KeySet::all() : KeySet(std::move(set));
  });
  p.subdomains = read_attribute<NameRealm>(r, read_realm);
  p.wildcard_forbidden = read_attribute<bool>(r, [](tlv::Reader& r) { return r.boolean(); });
  p.max_lifetime = read_attribute<uint64_t>(r, [](tlv::Reader& r) { return r.integer(); });
  r.expect_end();
  return p;
}

Bytes encode(const DomainPolicy& p) {
  tlv::Writer w;
  encode_to(w, p);
  return std::move(w).take();
}

DomainPolicy decode_policy(ByteView data) {
  tlv::Reader r(data);
  DomainPolicy p = read_policy(r);
  r.expect_end();
  return p;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    auto item = s.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

DomainPolicy parse_policy(
    std::string_view text,
    const std::function<KeyId(std::string_view)>& resolve_key) {
  DomainPolicy p;
  std::vector<std::string_view> inherit;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("policy token without '=': " + token);
    std::string key = token.substr(0, eq);
    std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "issuers") {
      KeySet set;
      if (value == "*") {
        set = KeySet::all();
      } else {
        std::set<KeyId> keys;
        for (auto item : split(value, ',')) keys.insert(resolve_key(item));
        set = KeySet(std::move(keys));
      }
      p.issuers.value = std::move(set);
    } else if (key == "subdomains") {
      std::string joined(value);
      p.subdomains.value = value == "*" ? NameRealm::all() : NameRealm::parse(joined);
    } else if (key == "wildcard-forbidden") {
      if (value != "true" && value != "false")
        throw std::invalid_argument("wildcard-forbidden must be true or false");
      p.wildcard_forbidden.value = value == "true";
    } else if (key == "max-lifetime") {
      p.max_lifetime.value = std::stoull(std::string(value));
    } else if (key == "inherit") {
      for (auto item : split(value, ',')) inherit.push_back(item);
    } else {
      throw std::invalid_argument("unknown policy attribute: " + key);
    }
  }
  // Resolve inherit flags after all attributes are known.
  for (auto item : inherit) {
    if (item == "issuers") p.issuers.inherited = true;
    else if (item == "subdomains") p.subdomains.inherited = true;
    else if (item == "wildcard-forbidden") p.wildcard_forbidden.inherited = true;
    else if (item == "max-lifetime") p.max_lifetime.inherited = true;
    else if (item == "all")
      p.issuers.inherited = p.subdomains.inherited = p.wildcard_forbidden.inherited =
          p.max_lifetime.inherited = true;
    else throw std::invalid_argument("unknown attribute in inherit: " + std::string(item));
  }
  return p;
}

std::string to_string(const DomainPolicy& p) {
  std::ostringstream out;
  std::vector<std::string> inherit;
  auto sep = [&] { if (out.tellp() > 0) out << ' '; };
  if (p.issuers.present()) {
    sep();
    out << "issuers=";
    if (p.issuers.value->is_all()) out << '*';
    bool first = true;
    for (const auto& k : p.issuers.value->keys()) {
      out << (first ? "" : ",") << to_hex(k);
      first = false;
    }
    if (p.issuers.inherited) inherit.push_back("issuers");
  }
  if (p.subdomains.present()) {
    sep();
    std::string realm = p.subdomains.value->str();
    if (realm.starts_with("{")) realm = realm.substr(1, realm.size() - 2);
    std::erase(realm, ' ');
    out << "subdomains=" << realm;
    if (p.subdomains.inherited) inherit.push_back("subdomains");
  }
  if (p.wildcard_forbidden.present()) {
    sep();
    out << "wildcard-forbidden=" << (*p.wildcard_forbidden.value ? "true" : "false");
    if (p.wildcard_forbidden.inherited) inherit.push_back("wildcard-forbidden");
  }
  if (p.max_lifetime.present()) {
    sep();
    out << "max-lifetime=" << *p.max_lifetime.value;
    if (p.max_lifetime.inherited) inherit.push_back("max-lifetime");
  }
  if (!inherit.empty()) {
    sep();
    out << "inherit=";
    for (size_t i = 0; i < inherit.size(); ++i) out << (i ? "," : "") << inherit[i];
  }
  return out.str();
}

}  // namespace fpki::cert
