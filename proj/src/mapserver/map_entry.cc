#include "fpki/mapserver/map_entry.h"

namespace fpki::map {

Hash item_hash(const ChainedCertificate& c) { return sha256(cert::encode(c)); }
Hash item_hash(const RevocationMessage& r) { return r.hash(); }

namespace {

template <typename T>
void check_sorted(const std::vector<T>& list) {
  for (size_t i = 1; i < list.size(); ++i)
    if (!(item_hash(list[i - 1]) < item_hash(list[i])))
      throw tlv::DecodeError("entry list not in canonical order");
}

}  // namespace

void encode_to(tlv::Writer& w, const MapEntry& e) {
  size_t mark = w.open(tlv::Tag::kMapEntry);
  auto cert = [](tlv::Writer& w, const ChainedCertificate& c) { cert::encode_to(w, c); };
  auto rev = [](tlv::Writer& w, const RevocationMessage& r) { cert::encode_to(w, r); };
  w.list(e.certs_exact, cert);
  w.list(e.revs_exact, rev);
  w.list(e.certs_wildcard, cert);
  w.list(e.revs_wildcard, rev);
  w.optional(e.subtree_root, [](tlv::Writer& w, const Hash& h) { w.hash(h); });
  w.close(mark);
}

MapEntry read_entry(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kMapEntry);
  MapEntry e;
  e.certs_exact = r.read_list(cert::read_chained);
  e.revs_exact = r.read_list(cert::read_revocation);
  e.certs_wildcard = r.read_list(cert::read_chained);
  e.revs_wildcard = r.read_list(cert::read_revocation);
  e.subtree_root = r.read_optional([](tlv::Reader& r) { return r.hash(); });
  r.expect_end();
  check_sorted(e.certs_exact);
  check_sorted(e.revs_exact);
  check_sorted(e.certs_wildcard);
  check_sorted(e.revs_wildcard);
  return e;
}

Bytes encode(const MapEntry& e) {
  tlv::Writer w;
  encode_to(w, e);
  return std::move(w).take();
}

MapEntry decode_entry(ByteView data) {
  tlv::Reader r(data);
  MapEntry e = read_entry(r);
  r.expect_end();
  return e;
}

namespace {

void encode_smh_fields(tlv::Writer& w, const SignedMapHead& h, bool with_signature) {
  size_t mark = w.open(tlv::Tag::kSignedMapHead);
  w.hash(h.root);
  w.integer(h.revision);
  w.integer(uint64_t(h.timestamp));
  w.hash(h.server_key_id);
  if (with_signature) w.bytes(h.signature);
  w.close(mark);
}

}  // namespace

Bytes SignedMapHead::tbs_bytes() const {
  tlv::Writer w;
  encode_smh_fields(w, *this, false);
  return std::move(w).take();
}

bool SignedMapHead::verify(const PublicKey& server_key) const {
  return key_id(server_key) == server_key_id &&
         verify_signature(server_key, tbs_bytes(), signature);
}

void encode_to(tlv::Writer& w, const SignedMapHead& h) { encode_smh_fields(w, h, true); }

SignedMapHead read_smh(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kSignedMapHead);
  SignedMapHead h;
  h.root = r.hash();
  h.revision = r.integer();
  h.timestamp = int64_t(r.integer());
  h.server_key_id = r.hash();
  h.signature = r.bytes();
  r.expect_end();
  return h;
}

Bytes encode(const SignedMapHead& h) {
  tlv::Writer w;
  encode_to(w, h);
  return std::move(w).take();
}

SignedMapHead decode_smh(ByteView data) {
  tlv::Reader r(data);
  SignedMapHead h = read_smh(r);
  r.expect_end();
  return h;
}

void encode_to(tlv::Writer& w, const DomainProofBundle& b) {
  size_t mark = w.open(tlv::Tag::kProofBundle);
  w.string(b.server_id);
  w.string(b.name.str());
  // Entries travel inside the proofs' leaf values.
  w.list(b.levels, [](tlv::Writer& w, const BundleLevel& l) { merkle::encode_to(w, l.proof); });
  encode_to(w, b.smh);
  w.close(mark);
}

DomainProofBundle read_bundle(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kProofBundle);
  DomainProofBundle b;
  b.server_id = r.string();
  try {
    b.name = DomainName::parse(r.string());
  } catch (const naming::NameError& e) {
    throw tlv::DecodeError(e.what());
  }
  b.levels = r.read_list([](tlv::Reader& r) {
    BundleLevel l;
    l.proof = merkle::read_proof(r);
    if (l.proof.leaf_value) l.entry = decode_entry(*l.proof.leaf_value);
    return l;
  });
  b.smh = read_smh(r);
  r.expect_end();
  return b;
}

Bytes encode(const DomainProofBundle& b) {
  tlv::Writer w;
  encode_to(w, b);
  return std::move(w).take();
}

DomainProofBundle decode_bundle(ByteView data) {
  tlv::Reader r(data);
  DomainProofBundle b = read_bundle(r);
  r.expect_end();
  return b;
}

std::vector<DomainName> level_domains(const DomainName& name,
                                      const naming::PublicSuffixList& psl) {
  if (name.is_wildcard()) throw naming::NameError("wildcard names cannot be queried");
  naming::NameClass c = naming::classify(name, psl);
  if (!naming::is_valid_class(c)) throw naming::NameError("not below a public suffix: " + name.str());
  std::vector<DomainName> out;
  if (naming::is_e2ld(c)) {
    out.push_back(name);
    return out;
  }
  const auto& sub = std::get<naming::Subdomain>(c);
  out.push_back(sub.e2ld);
  for (const auto& label : sub.chain) out.push_back(out.back().child(label));
  return out;
}

std::vector<Bytes> level_keys(const DomainName& name, const naming::PublicSuffixList& psl) {
  std::vector<DomainName> domains = level_domains(name, psl);
  std::vector<Bytes> keys;
  keys.push_back(to_bytes(domains[0].str()));
  for (size_t i = 1; i < domains.size(); ++i) keys.push_back(to_bytes(domains[i].leaf_label()));
  return keys;
}

std::optional<std::vector<VerifiedLevel>> verify_bundle_chain(
    const DomainProofBundle& bundle, const DomainName& name,
    const naming::PublicSuffixList& psl) {
  std::vector<DomainName> domains;
  std::vector<Bytes> keys;
  try {
    domains = level_domains(name, psl);
    keys = level_keys(name, psl);
  } catch (const naming::NameError&) {
    return std::nullopt;
  }
  if (bundle.levels.empty() || bundle.levels.size() > keys.size()) return std::nullopt;

  std::vector<VerifiedLevel> out;
  Hash expected = bundle.smh.root;
  for (size_t k = 0; k < bundle.levels.size(); ++k) {
    const BundleLevel& level = bundle.levels[k];
    const merkle::CompressedProof& proof = level.proof;
    if (proof.depth != merkle::kMaxDepth || proof.key != keys[k]) return std::nullopt;
    if (!merkle::smt_verify(proof, expected)) return std::nullopt;
    bool last = k + 1 == bundle.levels.size();
    if (!proof.leaf_value) {
      if (level.entry || !last) return std::nullopt;
      out.push_back({domains[k], std::nullopt});
      break;
    }
    MapEntry entry;
    try {
      entry = decode_entry(*proof.leaf_value);
    } catch (const tlv::DecodeError&) {
      return std::nullopt;
    }
    if (level.entry && *level.entry != entry) return std::nullopt;
    if (!entry.has_content() && !entry.subtree_root) return std::nullopt;
    if (!last) {
      if (!entry.subtree_root) return std::nullopt;
      expected = *entry.subtree_root;
    } else if (k + 1 < keys.size() && entry.subtree_root) {
      // Truncated: the chain stops although deeper levels exist.
      return std::nullopt;
    }
    out.push_back({domains[k], std::move(entry)});
  }
  return out;
}

}  // namespace fpki::map
