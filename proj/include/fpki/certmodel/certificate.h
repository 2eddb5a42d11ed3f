#ifndef FPKI_CERTMODEL_CERTIFICATE_H_
#define FPKI_CERTMODEL_CERTIFICATE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fpki/certmodel/policy.h"
#include "fpki/common/crypto.h"
#include "fpki/common/tlv.h"
#include "fpki/naming/domain_name.h"
#include "fpki/naming/name_realm.h"

namespace fpki::cert {

// Closed interval of unix seconds.
struct Validity {
  int64_t not_before = 0;
  int64_t not_after = 0;

  bool contains(int64_t t) const { return not_before <= t && t <= not_after; }
  uint64_t lifetime() const { return uint64_t(not_after - not_before); }
  friend bool operator==(const Validity&, const Validity&) = default;
};

// Simplified canonical certificate. The signature covers tbs_bytes(), which
// is the full encoding with the signature field left out.
struct Certificate {
  std::optional<DomainName> subject_cn;
  std::vector<DomainName> san;
  PublicKey subject_key{};
  KeyId issuer_key_id{};
  Validity validity;
  bool is_ca = false;
  NameRealm issuance_realm;  // empty for end-entity certificates
  std::optional<DomainPolicy> policy;
  uint64_t serial = 0;
  Bytes signature;

  // CN (when present) followed by SAN entries, without duplicates.
  std::vector<DomainName> names() const;
  // CN, or the first SAN when the CN is empty.
  std::optional<DomainName> effective_cn() const;
  bool covers(const DomainName& name) const;
  bool has_wildcard_name() const;
  KeyId subject_key_id() const { return key_id(subject_key); }
  bool self_issued() const { return issuer_key_id == subject_key_id(); }

  Bytes tbs_bytes() const;
  // SHA-256 of the canonical encoding; what revocations refer to.
  Hash hash() const;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

// A logged certificate with the intermediates needed to reach a root,
// leaf-adjacent first. The root itself may be included as the last element.
struct ChainedCertificate {
  Certificate leaf;
  std::vector<Certificate> chain;

  // Key identifier of the root the chain ends at.
  KeyId root_key_id() const;
  Hash hash() const { return leaf.hash(); }

  friend bool operator==(const ChainedCertificate&, const ChainedCertificate&) = default;
};

void encode_to(tlv::Writer& w, const Certificate& c);
Certificate read_certificate(tlv::Reader& r);
Bytes encode(const Certificate& c);
Certificate decode_certificate(ByteView data);

void encode_to(tlv::Writer& w, const ChainedCertificate& c);
ChainedCertificate read_chained(tlv::Reader& r);
Bytes encode(const ChainedCertificate& c);
ChainedCertificate decode_chained(ByteView data);

bool verify_issued_by(const Certificate& cert, const Certificate& issuer);

// Path from |cert|'s issuer up to and including the trust-store root, or
// nullopt if the chain does not terminate at a root in |trust_store|.
// Signatures are not checked.
std::optional<std::vector<Certificate>> resolve_path(
    const Certificate& cert, std::span<const Certificate> chain,
    std::span<const Certificate> trust_store);

constexpr size_t kMaxChainLength = 4;

// X.509-style validation: every signature verifies, every issuer is a CA,
// the path ends at a trust-store root, |now| is inside every validity
// interval and every name of |cert| is inside every CA's issuance realm.
bool legacy_validate(const Certificate& cert, std::span<const Certificate> chain,
                     std::span<const Certificate> trust_store, int64_t now);
inline bool legacy_validate(const ChainedCertificate& c,
                            std::span<const Certificate> trust_store, int64_t now) {
  return legacy_validate(c.leaf, c.chain, trust_store, now);
}

// Signature-only variant used by map servers, which store certificates
// regardless of the current time.
bool chain_verifies(const Certificate& cert, std::span<const Certificate> chain,
                    std::span<const Certificate> trust_store);

}  // namespace fpki::cert

#endif  // FPKI_CERTMODEL_CERTIFICATE_H_
