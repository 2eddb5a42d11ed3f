#ifndef FPKI_CERTMODEL_REVOCATION_H_
#define FPKI_CERTMODEL_REVOCATION_H_

#include <span>

#include "fpki/certmodel/certificate.h"

namespace fpki::cert {

enum class RevocationScope : uint8_t {
  kCertificate = 0x01,
  kPolicyOnly = 0x02,
};

// Signed statement that a certificate (or only its policy) is revoked.
// The signature covers cert_hash || "revoke" || scope.
struct RevocationMessage {
  Hash cert_hash{};
  RevocationScope scope = RevocationScope::kCertificate;
  KeyId signer_key_id{};
  Bytes signature;

  Bytes signed_bytes() const;
  Hash hash() const;

  friend bool operator==(const RevocationMessage&, const RevocationMessage&) = default;
};

RevocationMessage make_revocation(const Certificate& cert, RevocationScope scope,
                                  const KeyPair& signer);

void encode_to(tlv::Writer& w, const RevocationMessage& r);
RevocationMessage read_revocation(tlv::Reader& r);
Bytes encode(const RevocationMessage& r);
RevocationMessage decode_revocation(ByteView data);

enum class RevocationEffect {
  kNo,
  kRevokesCertificate,
  kRevokesPolicyOnly,
};

// Accepted signers are the certificate's own subject key and every CA key on
// its path. |trust_store| lets a root that is not carried in |chain| revoke.
RevocationEffect revocation_applies(const RevocationMessage& r, const Certificate& cert,
                                    std::span<const Certificate> chain,
                                    std::span<const Certificate> trust_store = {});

}  // namespace fpki::cert

#endif  // FPKI_CERTMODEL_REVOCATION_H_
