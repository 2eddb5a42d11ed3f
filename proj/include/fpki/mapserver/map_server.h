#ifndef FPKI_MAPSERVER_MAP_SERVER_H_
#define FPKI_MAPSERVER_MAP_SERVER_H_

#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpki/mapserver/map_state.h"
#include "fpki/merkle/consistency_tree.h"

namespace fpki::map {

class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MapServerConfig {
  std::string id = "mapserver";
  naming::PublicSuffixList psl = naming::PublicSuffixList::builtin();
  std::vector<cert::Certificate> trust_store;
  // Root key ids whose certificates this server accepts; empty accepts
  // every root in the trust store.
  std::set<KeyId> supported;
  int64_t mmd = 3600;
};

struct SubmitResult {
  bool staged = false;
  std::string reason;  // why it was rejected
  std::vector<std::string> rejected_names;
};

// Signs the TBS encoding of a map head. May throw; the revision is then
// abandoned and the server left as it was.
using Signer = std::function<Bytes(ByteView)>;

class MapServer {
 public:
  MapServer(MapServerConfig config, const KeyPair& key);
  MapServer(MapServerConfig config, PublicKey key, Signer signer);

  const std::string& id() const { return config_.id; }
  const MapServerConfig& config() const { return config_; }
  const PublicKey& public_key() const { return key_; }
  void set_signer(Signer signer);

  SubmitResult ingest(const ChainedCertificate& c);
  SubmitResult add_revocation(const RevocationMessage& r);
  // Schedules removal of certificates with not_after < now for the next
  // revision; returns how many distinct certificates that removes.
  size_t prune_expired(int64_t now);
  size_t pending_count() const;

  SignedMapHead commit(int64_t now);

  // Throws QueryError for wildcard names and names without an e2LD, and
  // before the first revision.
  DomainProofBundle lookup(const DomainName& name) const;
  DomainProofBundle lookup(std::string_view name) const;

  bool has_revision() const;
  SignedMapHead latest() const;
  std::vector<SignedMapHead> history() const;
  MapState state() const;  // latest committed state
  MapState state_at(uint64_t revision) const;
  RevisionDelta delta_at(uint64_t revision) const;

  LogCheckpoint log_checkpoint(uint64_t revision) const;
  std::vector<Hash> consistency_proof(uint64_t old_revision, uint64_t new_revision) const;
  std::vector<Hash> inclusion_proof(uint64_t revision, uint64_t log_revision) const;
  AuditEvidence audit_evidence(uint64_t new_revision) const;

  // Seconds a client may cache the latest head: mmd - (now - timestamp).
  int64_t ttl(int64_t now) const;

  // Canonical snapshot of the stored items, head history and pending items.
  Bytes snapshot() const;
  // Rebuilds a server from a snapshot. Throws tlv::DecodeError when the
  // snapshot does not reproduce its own latest root.
  static std::unique_ptr<MapServer> restore(ByteView snapshot, MapServerConfig config,
                                            const KeyPair& key);

 private:
  struct Published {
    MapState state;
    SignedMapHead smh;
  };

  SubmitResult check_certificate(const ChainedCertificate& c) const;
  const ChainedCertificate* find_certificate(const Hash& leaf_hash) const;
  std::shared_ptr<const Published> published() const;

  MapServerConfig config_;
  PublicKey key_;
  Signer signer_;

  mutable std::mutex writer_;  // serializes ingest, prune and commit
  MapState working_;           // latest committed state (writer side)
  RevisionDelta pending_;
  std::set<Hash> pending_hashes_;
  std::vector<MapState> states_;  // per revision
  std::vector<RevisionDelta> deltas_;
  std::vector<SignedMapHead> smhs_;
  merkle::ConsistencyTree log_;

  mutable std::mutex publish_;
  std::shared_ptr<const Published> current_;
};

}  // namespace fpki::map

#endif  // FPKI_MAPSERVER_MAP_SERVER_H_
