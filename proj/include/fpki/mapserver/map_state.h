#ifndef FPKI_MAPSERVER_MAP_STATE_H_
#define FPKI_MAPSERVER_MAP_STATE_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fpki/mapserver/map_entry.h"

namespace fpki::map {

// One domain in the nested hierarchy. Records are immutable once shared;
// updates copy the path from the touched domain up to the root.
struct DomainRecord {
  MapEntry content;  // subtree_root is never set here
  std::map<std::string, std::shared_ptr<const DomainRecord>> children;
  merkle::SparseMerkleTree subtree;  // child label -> encoded child entry

  bool exists() const { return content.has_content() || !children.empty(); }
  // Stored value: content plus the subtree root when children exist.
  MapEntry entry() const;
};
using RecordPtr = std::shared_ptr<const DomainRecord>;

using Item = std::variant<ChainedCertificate, RevocationMessage>;

struct Rejection {
  Item item;
  std::string name;  // offending name, empty when the item as a whole failed
  std::string reason;
};

// Staged additions keyed by level path (e2LD text, then labels).
struct IndexNode {
  MapEntry adds;
  std::map<std::string, IndexNode> children;
};

struct Index {
  IndexNode root;  // root.children are keyed by e2LD
  // Per-name rejections, then one entry with an empty name for each item
  // that could not be placed at all.
  std::vector<Rejection> rejected;
  std::vector<bool> placed;  // parallel to the input items
  size_t placements = 0;
};

// Finds the certificate a revocation refers to, by leaf hash.
using CertLookup = std::function<const ChainedCertificate*(const Hash&)>;

// Places every item under each of its names. Wildcard names go to the
// wildcard lists of their base domain; names that are public suffixes or
// invalid are rejected one by one.
Index build_index(std::span<const Item> items, const naming::PublicSuffixList& psl,
                  const CertLookup& lookup);

// Items introduced by one revision.
struct RevisionDelta {
  std::vector<ChainedCertificate> certs;
  std::vector<RevocationMessage> revocations;
  std::optional<int64_t> prune_before;  // drop certificates with not_after < t

  bool empty() const { return certs.empty() && revocations.empty() && !prune_before; }
  friend bool operator==(const RevisionDelta&, const RevisionDelta&) = default;
};

void encode_to(tlv::Writer& w, const RevisionDelta& d);
RevisionDelta read_delta(tlv::Reader& r);
Bytes encode(const RevisionDelta& d);
RevisionDelta decode_delta(ByteView data);

// The full map at one revision. Copies share structure.
class MapState {
 public:
  explicit MapState(naming::PublicSuffixList psl = naming::PublicSuffixList::builtin());

  Hash root() const { return root_->subtree.root(); }
  const naming::PublicSuffixList& psl() const { return *psl_; }

  // Record of |domain|, or nullptr if it holds no entry.
  const DomainRecord* find(const DomainName& domain) const;
  std::optional<MapEntry> entry(const DomainName& domain) const;

  // Proof chain for a queried name. Throws naming::NameError for names
  // without an e2LD and for wildcard names.
  std::vector<BundleLevel> prove(const DomainName& name) const;

  const ChainedCertificate* certificate(const Hash& leaf_hash) const;
  bool contains(const ChainedCertificate& c) const;
  bool contains(const RevocationMessage& r) const;
  size_t certificate_count() const { return cert_count_; }
  size_t revocation_count() const { return revs_->size(); }
  std::vector<ChainedCertificate> certificates() const;
  std::vector<RevocationMessage> revocations() const;
  size_t e2ld_count() const { return root_->children.size(); }

  // Adds the delta's items, then prunes. Items that cannot be placed at all
  // are reported and skipped.
  MapState apply(const RevisionDelta& delta, std::vector<Rejection>* rejected = nullptr) const;

 private:
  std::shared_ptr<const naming::PublicSuffixList> psl_;
  RecordPtr root_;
  // Stored items by hash (leaf hash for certificates).
  std::shared_ptr<const std::map<Hash, std::vector<ChainedCertificate>>> certs_;
  std::shared_ptr<const std::map<Hash, RevocationMessage>> revs_;
  size_t cert_count_ = 0;
};

struct LogCheckpoint {
  uint64_t size = 0;
  Hash root{};
};

struct AuditEvidence {
  LogCheckpoint old_log;  // ends with smh_old
  LogCheckpoint new_log;  // ends with smh_new
  std::vector<Hash> consistency;
  std::vector<Hash> old_inclusion;  // smh_old at index old_log.size - 1
  std::vector<Hash> inclusion;      // smh_new at index new_log.size - 1
};

// Replays |delta| on |old_state| and checks it against both heads. Deltas
// must be exact: no duplicates, nothing already stored, every revocation
// applying to a stored or co-delivered certificate.
bool audit_revision(const MapState& old_state, const PublicKey& server_key,
                    const SignedMapHead& smh_old, const SignedMapHead& smh_new,
                    const RevisionDelta& delta, const AuditEvidence& evidence,
                    std::span<const cert::Certificate> trust_store = {});

}  // namespace fpki::map

#endif  // FPKI_MAPSERVER_MAP_STATE_H_
