#ifndef FPKI_MAPSERVER_MAP_ENTRY_H_
#define FPKI_MAPSERVER_MAP_ENTRY_H_

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "fpki/certmodel/certificate.h"
#include "fpki/certmodel/revocation.h"
#include "fpki/merkle/sparse_tree.h"
#include "fpki/naming/public_suffix_list.h"

namespace fpki::map {

using cert::ChainedCertificate;
using cert::RevocationMessage;
using naming::DomainName;

// Per-domain value stored in the sparse trees. Lists are kept sorted by the
// SHA-256 of each item's encoding and free of duplicates.
struct MapEntry {
  std::vector<ChainedCertificate> certs_exact;
  std::vector<RevocationMessage> revs_exact;
  std::vector<ChainedCertificate> certs_wildcard;
  std::vector<RevocationMessage> revs_wildcard;
  std::optional<Hash> subtree_root;

  bool has_content() const {
    return !certs_exact.empty() || !revs_exact.empty() || !certs_wildcard.empty() ||
           !revs_wildcard.empty();
  }
  friend bool operator==(const MapEntry&, const MapEntry&) = default;
};

void encode_to(tlv::Writer& w, const MapEntry& e);
MapEntry read_entry(tlv::Reader& r);
Bytes encode(const MapEntry& e);
MapEntry decode_entry(ByteView data);

// Canonical list maintenance shared by the server and the auditor.
Hash item_hash(const ChainedCertificate& c);
Hash item_hash(const RevocationMessage& r);
// Returns false if an identical item is already present.
template <typename T>
bool insert_sorted(std::vector<T>& list, const T& item) {
  Hash h = item_hash(item);
  auto it = std::lower_bound(list.begin(), list.end(), h,
                             [](const T& x, const Hash& key) { return item_hash(x) < key; });
  if (it != list.end() && item_hash(*it) == h) return false;
  list.insert(it, item);
  return true;
}

struct SignedMapHead {
  Hash root{};
  uint64_t revision = 0;
  int64_t timestamp = 0;
  KeyId server_key_id{};
  Bytes signature;

  Bytes tbs_bytes() const;
  bool verify(const PublicKey& server_key) const;
  friend bool operator==(const SignedMapHead&, const SignedMapHead&) = default;
};

void encode_to(tlv::Writer& w, const SignedMapHead& h);
SignedMapHead read_smh(tlv::Reader& r);
Bytes encode(const SignedMapHead& h);
SignedMapHead decode_smh(ByteView data);

struct BundleLevel {
  merkle::CompressedProof proof;
  std::optional<MapEntry> entry;  // decoded from proof.leaf_value
  friend bool operator==(const BundleLevel&, const BundleLevel&) = default;
};

// Proof chain for one queried name from one server: level 0 is the e2LD in
// the top tree, level k the k-th label below it in its parent's subtree.
struct DomainProofBundle {
  std::string server_id;
  DomainName name;
  std::vector<BundleLevel> levels;
  SignedMapHead smh;
  friend bool operator==(const DomainProofBundle&, const DomainProofBundle&) = default;
};

void encode_to(tlv::Writer& w, const DomainProofBundle& b);
DomainProofBundle read_bundle(tlv::Reader& r);
Bytes encode(const DomainProofBundle& b);
DomainProofBundle decode_bundle(ByteView data);

// Tree key of each level for |name|: the e2LD text, then single labels.
// Throws naming::NameError for names that are not E2LD or Subdomain.
std::vector<Bytes> level_keys(const DomainName& name, const naming::PublicSuffixList& psl);

// Domain at each level, e2LD first.
std::vector<DomainName> level_domains(const DomainName& name, const naming::PublicSuffixList& psl);

struct VerifiedLevel {
  DomainName domain;
  std::optional<MapEntry> entry;
};

// Checks the proof chain of |bundle| for |name| against bundle.smh.root (the
// SMH signature is checked separately). Returns the entries per level, or
// nullopt on any inconsistency. A missing or subtree-less level proves that
// nothing exists further down.
std::optional<std::vector<VerifiedLevel>> verify_bundle_chain(
    const DomainProofBundle& bundle, const DomainName& name,
    const naming::PublicSuffixList& psl);

}  // namespace fpki::map

#endif  // FPKI_MAPSERVER_MAP_ENTRY_H_
