#ifndef FPKI_CERTMODEL_POLICY_H_
#define FPKI_CERTMODEL_POLICY_H_

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>

#include "fpki/common/crypto.h"
#include "fpki/common/tlv.h"
#include "fpki/naming/name_realm.h"

namespace fpki::cert {

using naming::DomainName;
using naming::NameRealm;

// Set of CA key identifiers with a top element for "any CA".
class KeySet {
 public:
  KeySet() = default;
  KeySet(std::initializer_list<KeyId> keys) : keys_(keys) {}
  explicit KeySet(std::set<KeyId> keys) : keys_(std::move(keys)) {}
  static KeySet all() { KeySet s; s.all_ = true; return s; }

  bool is_all() const { return all_; }
  const std::set<KeyId>& keys() const { return keys_; }
  bool contains(const KeyId& id) const { return all_ || keys_.contains(id); }
  KeySet intersect(const KeySet& other) const;
  // True iff every member of this set is in |other|.
  bool subset_of(const KeySet& other) const;

  friend bool operator==(const KeySet&, const KeySet&) = default;

 private:
  bool all_ = false;
  std::set<KeyId> keys_;
};

template <typename T>
struct PolicyAttribute {
  std::optional<T> value;
  bool inherited = false;

  bool present() const { return value.has_value(); }
  // The inherited flag of an absent attribute is meaningless and not encoded.
  friend bool operator==(const PolicyAttribute& a, const PolicyAttribute& b) {
    return a.value == b.value && (!a.value || a.inherited == b.inherited);
  }
};

enum class Attribute : uint8_t {
  kIssuers = 0,
  kSubdomains = 1,
  kWildcardForbidden = 2,
  kMaxLifetime = 3,
};
constexpr std::array<Attribute, 4> kAllAttributes = {
    Attribute::kIssuers, Attribute::kSubdomains, Attribute::kWildcardForbidden,
    Attribute::kMaxLifetime};

constexpr uint64_t kUnlimitedLifetime = std::numeric_limits<uint64_t>::max();

// Domain-owner policy carried in a certificate. Attributes are independently
// present or absent; an inherited attribute also binds subdomains.
struct DomainPolicy {
  PolicyAttribute<KeySet> issuers;
  PolicyAttribute<NameRealm> subdomains;
  PolicyAttribute<bool> wildcard_forbidden;
  PolicyAttribute<uint64_t> max_lifetime;  // seconds

  // Every attribute present and permissive: any CA, any subdomain, wildcards
  // allowed, no lifetime cap.
  static DomainPolicy permissive();

  bool present(Attribute a) const;
  bool inherited(Attribute a) const;
  bool empty() const;
  bool complete() const;

  friend bool operator==(const DomainPolicy&, const DomainPolicy&) = default;
};

// Which attributes of a contributing policy take part in a fold.
class AttributeMask {
 public:
  AttributeMask() = default;
  static AttributeMask all() { AttributeMask m; m.bits_.fill(true); return m; }
  AttributeMask& set(Attribute a, bool on = true) { bits_[size_t(a)] = on; return *this; }
  bool test(Attribute a) const { return bits_[size_t(a)]; }

 private:
  std::array<bool, 4> bits_{};
};

struct PolicyContribution {
  DomainPolicy policy;
  AttributeMask applies;
};

// Attribute-wise strictest combination starting from |base| (which must be
// complete): booleans by AND, maxima by min, sets by intersection. Absent
// contributor attributes and attributes not in the mask are skipped.
DomainPolicy fold_policies(const DomainPolicy& base,
                           std::span<const PolicyContribution> others);

// Single-step fold of one attribute into |acc|.
void fold_attribute(DomainPolicy& acc, const DomainPolicy& other, Attribute a);

void encode_realm(tlv::Writer& w, const NameRealm& realm);
NameRealm read_realm(tlv::Reader& r);

void encode_to(tlv::Writer& w, const DomainPolicy& p);
DomainPolicy read_policy(tlv::Reader& r);
Bytes encode(const DomainPolicy& p);
DomainPolicy decode_policy(ByteView data);

// Compact text form used by scenario files and the trust config, e.g.
//   "issuers=<hex>,<hex> subdomains=www.example.com,*.dev.example.com
//    wildcard-forbidden=true max-lifetime=7776000 inherit=issuers,subdomains"
// Key identifiers are resolved through |resolve_key| so callers can accept
// symbolic names.
// Throws std::invalid_argument on malformed text.
DomainPolicy parse_policy(
    std::string_view text,
    const std::function<KeyId(std::string_view)>& resolve_key);
std::string to_string(const DomainPolicy& p);

}  // namespace fpki::cert

#endif  // FPKI_CERTMODEL_POLICY_H_
