#ifndef FPKI_CERTMODEL_TEST_CA_H_
#define FPKI_CERTMODEL_TEST_CA_H_

#include <memory>
#include <string>
#include <vector>

#include "fpki/certmodel/certificate.h"
#include "fpki/certmodel/revocation.h"

namespace fpki::cert {

struct IssueOptions {
  std::vector<std::string> names;  // first becomes the CN unless san_only
  bool san_only = false;
  Validity validity{0, 365 * 86400};
  std::optional<DomainPolicy> policy{};
  // Key of the subject. Defaults to a key derived from the CA and serial.
  std::optional<KeyPair> subject{};
};

// Deterministic signing authority used by tests, the scenario runner and
// the benchmark. Holds its own key and the chain above it.
class CertificateAuthority {
 public:
  // Self-signed root.
  static CertificateAuthority root(uint64_t seed, NameRealm realm = NameRealm::all(),
                                   Validity validity = {0, int64_t(1) << 40});

  // Intermediate issued by this CA.
  CertificateAuthority intermediate(uint64_t seed, NameRealm realm = NameRealm::all(),
                                    Validity validity = {0, int64_t(1) << 40});

  const Certificate& certificate() const { return cert_; }
  // Chain to use when presenting a certificate issued by this CA, leaf-adjacent
  // first, without the root.
  const std::vector<Certificate>& chain() const { return chain_; }
  const KeyPair& key() const { return key_; }
  KeyId key_id() const { return key_.id(); }
  // Key id of the root at the top of this CA's path.
  KeyId root_key_id() const;

  Certificate issue(const IssueOptions& opts);
  ChainedCertificate issue_chained(const IssueOptions& opts);
  // Re-signs a hand-edited certificate with this CA's key.
  Certificate sign(Certificate c) const;

  RevocationMessage revoke(const Certificate& c,
                           RevocationScope scope = RevocationScope::kCertificate) const {
    return make_revocation(c, scope, key_);
  }

  // Subject key of certificates issued with the default key.
  KeyPair subject_key_for(uint64_t serial) const;

 private:
  CertificateAuthority(KeyPair key, Certificate cert, std::vector<Certificate> chain,
                       KeyId root_id)
      : key_(std::move(key)), cert_(std::move(cert)), chain_(std::move(chain)),
        root_id_(root_id) {}

  KeyPair key_;
  Certificate cert_;
  std::vector<Certificate> chain_;
  KeyId root_id_;
  uint64_t next_serial_ = 1;
};

}  // namespace fpki::cert

#endif  // FPKI_CERTMODEL_TEST_CA_H_
