#include "fpki/certmodel/test_ca.h"

namespace fpki::cert {

CertificateAuthority CertificateAuthority::root(uint64_t seed, NameRealm realm,
                                                Validity validity) {
  KeyPair key = KeyPair::from_u64(seed);
  Certificate c;
  c.subject_key = key.public_key();
  c.issuer_key_id = key.id();
  c.validity = validity;
  c.is_ca = true;
  c.issuance_realm = std::move(realm);
  c.serial = seed;
  c.signature = key.sign(c.tbs_bytes());
  KeyId id = key.id();
  return CertificateAuthority(std::move(key), std::move(c), {}, id);
}

CertificateAuthority CertificateAuthority::intermediate(uint64_t seed, NameRealm realm,
                                                        Validity validity) {
  KeyPair key = KeyPair::from_u64(seed);
  Certificate c;
  c.subject_key = key.public_key();
  c.issuer_key_id = key_.id();
  c.validity = validity;
  c.is_ca = true;
  c.issuance_realm = std::move(realm);
  c.serial = next_serial_++;
  c = sign(std::move(c));
  std::vector<Certificate> chain{c};
  chain.insert(chain.end(), chain_.begin(), chain_.end());
  return CertificateAuthority(std::move(key), std::move(c), std::move(chain), root_id_);
}

KeyId CertificateAuthority::root_key_id() const { return root_id_; }

KeyPair CertificateAuthority::subject_key_for(uint64_t serial) const {
  Sha256 h;
  h.update(ByteView(key_.seed())).update(as_bytes("subject"));
  for (int i = 7; i >= 0; --i) h.update(uint8_t(serial >> (8 * i)));
  return KeyPair(h.finish());
}

Certificate CertificateAuthority::sign(Certificate c) const {
  c.issuer_key_id = key_.id();
  c.signature = key_.sign(c.tbs_bytes());
  return c;
}

Certificate CertificateAuthority::issue(const IssueOptions& opts) {
  if (opts.names.empty()) throw std::invalid_argument("certificate needs at least one name");
  Certificate c;
  for (size_t i = 0; i < opts.names.size(); ++i) {
    DomainName n = DomainName::parse(opts.names[i]);
    if (i == 0 && !opts.san_only) c.subject_cn = n;
    else c.san.push_back(n);
  }
  c.serial = next_serial_++;
  KeyPair subject = opts.subject ? *opts.subject : subject_key_for(c.serial);
  c.subject_key = subject.public_key();
  c.validity = opts.validity;
  c.policy = opts.policy;
  return sign(std::move(c));
}

ChainedCertificate CertificateAuthority::issue_chained(const IssueOptions& opts) {
  return ChainedCertificate{issue(opts), chain_};
}

}  // namespace fpki::cert
