#include "fpki/certmodel/certificate.h"

#include <algorithm>

namespace fpki::cert {

namespace {

void encode_fields(tlv::Writer& w, const Certificate& c, bool with_signature) {
  size_t mark = w.open(tlv::Tag::kCertificate);
  w.optional(c.subject_cn, [](tlv::Writer& w, const DomainName& n) { w.string(n.str()); });
  w.list(c.san, [](tlv::Writer& w, const DomainName& n) { w.string(n.str()); });
  w.bytes(c.subject_key);
  w.hash(c.issuer_key_id);
  w.integer(uint64_t(c.validity.not_before));
  w.integer(uint64_t(c.validity.not_after));
  w.boolean(c.is_ca);
  encode_realm(w, c.issuance_realm);
  w.optional(c.policy, [](tlv::Writer& w, const DomainPolicy& p) { encode_to(w, p); });
  w.integer(c.serial);
  if (with_signature) w.bytes(c.signature);
  w.close(mark);
}

DomainName read_name(tlv::Reader& r) {
  std::string text = r.string();
  try {
    DomainName name = DomainName::parse(text);
    if (name.str() != text) throw tlv::DecodeError("non-canonical name " + text);
    return name;
  } catch (const naming::NameError& e) {
    throw tlv::DecodeError(e.what());
  }
}

// Shared path walk for legacy validation and signature-only checks.
bool walk_path(const Certificate& cert, std::span<const Certificate> chain,
               std::span<const Certificate> trust_store,
               std::optional<int64_t> now) {
  if (chain.size() > kMaxChainLength) return false;
  const std::vector<DomainName> names = cert.names();
  if (!cert.is_ca && names.empty()) return false;
  if (!cert.is_ca && !cert.issuance_realm.empty()) return false;
  if (now && !cert.validity.contains(*now)) return false;
  if (cert.validity.not_before >= cert.validity.not_after) return false;

  auto accept_issuer = [&](const Certificate& child, const Certificate& ca) {
    if (!ca.is_ca || child.issuer_key_id != ca.subject_key_id()) return false;
    if (!verify_issued_by(child, ca)) return false;
    if (now && !ca.validity.contains(*now)) return false;
    return std::all_of(names.begin(), names.end(), [&](const DomainName& n) {
      return ca.issuance_realm.covers(n);
    });
  };
  auto in_store = [&](const Certificate& c) {
    return std::find(trust_store.begin(), trust_store.end(), c) != trust_store.end();
  };

  const Certificate* child = &cert;
  for (size_t i = 0; i < chain.size(); ++i) {
    const Certificate& ca = chain[i];
    if (!accept_issuer(*child, ca)) return false;
    if (in_store(ca)) return i + 1 == chain.size();
    child = &ca;
  }
  for (const Certificate& root : trust_store)
    if (accept_issuer(*child, root)) return true;
  return false;
}

}  // namespace

std::vector<DomainName> Certificate::names() const {
  std::vector<DomainName> out;
  if (subject_cn) out.push_back(*subject_cn);
  for (const auto& n : san)
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  return out;
}

std::optional<DomainName> Certificate::effective_cn() const {
  if (subject_cn) return subject_cn;
  if (!san.empty()) return san.front();
  return std::nullopt;
}

bool Certificate::covers(const DomainName& name) const {
  auto all = names();
  return std::any_of(all.begin(), all.end(),
                     [&](const DomainName& n) { return naming::name_matches(n, name); });
}

bool Certificate::has_wildcard_name() const {
  auto all = names();
  return std::any_of(all.begin(), all.end(),
                     [](const DomainName& n) { return n.is_wildcard(); });
}

Bytes Certificate::tbs_bytes() const {
  tlv::Writer w;
  encode_fields(w, *this, false);
  return std::move(w).take();
}

Hash Certificate::hash() const { return sha256(encode(*this)); }

KeyId ChainedCertificate::root_key_id() const {
  const Certificate& top = chain.empty() ? leaf : chain.back();
  return top.issuer_key_id;
}

void encode_to(tlv::Writer& w, const Certificate& c) { encode_fields(w, c, true); }

Certificate read_certificate(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kCertificate);
  Certificate c;
  c.subject_cn = r.read_optional(read_name);
  c.san = r.read_list(read_name);
  Bytes key = r.bytes();
  if (key.size() != c.subject_key.size()) throw tlv::DecodeError("subject key must be 32 bytes");
  std::copy(key.begin(), key.end(), c.subject_key.begin());
  c.issuer_key_id = r.hash();
  c.validity.not_before = int64_t(r.integer());
  c.validity.not_after = int64_t(r.integer());
  c.is_ca = r.boolean();
  c.issuance_realm = read_realm(r);
  c.policy = r.read_optional(read_policy);
  c.serial = r.integer();
  c.signature = r.bytes();
  r.expect_end();
  return c;
}

Bytes encode(const Certificate& c) {
  tlv::Writer w;
  encode_to(w, c);
  return std::move(w).take();
}

Certificate decode_certificate(ByteView data) {
  tlv::Reader r(data);
  Certificate c = read_certificate(r);
  r.expect_end();
  return c;
}

void encode_to(tlv::Writer& w, const ChainedCertificate& c) {
  size_t mark = w.open(tlv::Tag::kChainedCertificate);
  encode_to(w, c.leaf);
  w.list(c.chain, [](tlv::Writer& w, const Certificate& ca) { encode_to(w, ca); });
  w.close(mark);
}

ChainedCertificate read_chained(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kChainedCertificate);
  ChainedCertificate c;
  c.leaf = read_certificate(r);
  c.chain = r.read_list(read_certificate);
  r.expect_end();
  return c;
}

Bytes encode(const ChainedCertificate& c) {
  tlv::Writer w;
  encode_to(w, c);
  return std::move(w).take();
}

ChainedCertificate decode_chained(ByteView data) {
  tlv::Reader r(data);
  ChainedCertificate c = read_chained(r);
  r.expect_end();
  return c;
}

bool verify_issued_by(const Certificate& cert, const Certificate& issuer) {
  return verify_signature(issuer.subject_key, cert.tbs_bytes(), cert.signature);
}

std::optional<std::vector<Certificate>> resolve_path(
    const Certificate& cert, std::span<const Certificate> chain,
    std::span<const Certificate> trust_store) {
  std::vector<Certificate> path;
  const Certificate* child = &cert;
  for (const Certificate& ca : chain) {
    if (child->issuer_key_id != ca.subject_key_id()) return std::nullopt;
    path.push_back(ca);
    if (std::find(trust_store.begin(), trust_store.end(), ca) != trust_store.end())
      return path;
    child = &ca;
  }
  for (const Certificate& root : trust_store) {
    if (root.subject_key_id() == child->issuer_key_id) {
      path.push_back(root);
      return path;
    }
  }
  return std::nullopt;
}

bool legacy_validate(const Certificate& cert, std::span<const Certificate> chain,
                     std::span<const Certificate> trust_store, int64_t now) {
  return walk_path(cert, chain, trust_store, now);
}

bool chain_verifies(const Certificate& cert, std::span<const Certificate> chain,
                    std::span<const Certificate> trust_store) {
  return walk_path(cert, chain, trust_store, std::nullopt);
}

}  // namespace fpki::cert
