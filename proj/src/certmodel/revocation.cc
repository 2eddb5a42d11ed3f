#include "fpki/certmodel/revocation.h"

namespace fpki::cert {

Bytes RevocationMessage::signed_bytes() const {
  Bytes out(cert_hash.begin(), cert_hash.end());
  append(out, as_bytes("revoke"));
  out.push_back(uint8_t(scope));
  return out;
}

Hash RevocationMessage::hash() const { return sha256(encode(*this)); }

RevocationMessage make_revocation(const Certificate& cert, RevocationScope scope,
                                  const KeyPair& signer) {
  RevocationMessage r;
  r.cert_hash = cert.hash();
  r.scope = scope;
  r.signer_key_id = signer.id();
  r.signature = signer.sign(r.signed_bytes());
  return r;
}

void encode_to(tlv::Writer& w, const RevocationMessage& r) {
  size_t mark = w.open(tlv::Tag::kRevocation);
  w.hash(r.cert_hash);
  w.integer(uint8_t(r.scope));
  w.hash(r.signer_key_id);
  w.bytes(r.signature);
  w.close(mark);
}

RevocationMessage read_revocation(tlv::Reader& outer) {
  tlv::Reader in = outer.object(tlv::Tag::kRevocation);
  RevocationMessage r;
  r.cert_hash = in.hash();
  uint64_t scope = in.integer();
  if (scope != 1 && scope != 2) throw tlv::DecodeError("unknown revocation scope");
  r.scope = RevocationScope(scope);
  r.signer_key_id = in.hash();
  r.signature = in.bytes();
  in.expect_end();
  return r;
}

Bytes encode(const RevocationMessage& r) {
  tlv::Writer w;
  encode_to(w, r);
  return std::move(w).take();
}

RevocationMessage decode_revocation(ByteView data) {
  tlv::Reader in(data);
  RevocationMessage r = read_revocation(in);
  in.expect_end();
  return r;
}

RevocationEffect revocation_applies(const RevocationMessage& r, const Certificate& cert,
                                    std::span<const Certificate> chain,
                                    std::span<const Certificate> trust_store) {
  if (r.cert_hash != cert.hash()) return RevocationEffect::kNo;

  std::vector<PublicKey> keys{cert.subject_key};
  for (const auto& ca : chain) keys.push_back(ca.subject_key);
  if (auto path = resolve_path(cert, chain, trust_store); path && !path->empty())
    keys.push_back(path->back().subject_key);

  Bytes msg = r.signed_bytes();
  for (const auto& k : keys) {
    if (key_id(k) != r.signer_key_id) continue;
    if (!verify_signature(k, msg, r.signature)) continue;
    return r.scope == RevocationScope::kCertificate ? RevocationEffect::kRevokesCertificate
                                                    : RevocationEffect::kRevokesPolicyOnly;
  }
  return RevocationEffect::kNo;
}

}  // namespace fpki::cert
