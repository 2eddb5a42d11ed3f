#include "fpki/mapserver/map_server.h"

#include <algorithm>

namespace fpki::map {

MapServer::MapServer(MapServerConfig config, const KeyPair& key)
    : MapServer(std::move(config), key.public_key(),
                [key](ByteView msg) { return key.sign(msg); }) {}

MapServer::MapServer(MapServerConfig config, PublicKey key, Signer signer)
    : config_(std::move(config)),
      key_(key),
      signer_(std::move(signer)),
      working_(config_.psl) {}

void MapServer::set_signer(Signer signer) {
  std::lock_guard lock(writer_);
  signer_ = std::move(signer);
}

const ChainedCertificate* MapServer::find_certificate(const Hash& leaf_hash) const {
  if (const ChainedCertificate* c = working_.certificate(leaf_hash)) return c;
  for (const auto& c : pending_.certs)
    if (c.hash() == leaf_hash) return &c;
  return nullptr;
}

SubmitResult MapServer::check_certificate(const ChainedCertificate& c) const {
  SubmitResult out;
  if (pending_hashes_.count(item_hash(c)) || working_.contains(c)) {
    out.reason = "duplicate";
    return out;
  }
  if (!cert::chain_verifies(c.leaf, c.chain, config_.trust_store)) {
    out.reason = "chain does not verify against the trust store";
    return out;
  }
  auto path = cert::resolve_path(c.leaf, c.chain, config_.trust_store);
  if (!path || (!config_.supported.empty() &&
                !config_.supported.count(path->back().subject_key_id()))) {
    out.reason = "issuing root not supported by this server";
    return out;
  }
  bool any = false;
  for (const DomainName& n : c.leaf.names()) {
    if (naming::is_valid_class(naming::classify(n.base(), config_.psl)))
      any = true;
    else
      out.rejected_names.push_back(n.str());
  }
  if (!any) {
    out.reason = "no registrable name";
    return out;
  }
  out.staged = true;
  return out;
}

SubmitResult MapServer::ingest(const ChainedCertificate& c) {
  std::lock_guard lock(writer_);
  SubmitResult out = check_certificate(c);
  if (out.staged) {
    pending_hashes_.insert(item_hash(c));
    pending_.certs.push_back(c);
  }
  return out;
}

SubmitResult MapServer::add_revocation(const RevocationMessage& r) {
  std::lock_guard lock(writer_);
  SubmitResult out;
  if (pending_hashes_.count(item_hash(r)) || working_.contains(r)) {
    out.reason = "duplicate";
    return out;
  }
  const ChainedCertificate* target = find_certificate(r.cert_hash);
  if (!target) {
    out.reason = "unknown certificate";
    return out;
  }
  if (cert::revocation_applies(r, target->leaf, target->chain, config_.trust_store) ==
      cert::RevocationEffect::kNo) {
    out.reason = "revocation not signed by the certificate or its issuers";
    return out;
  }
  pending_hashes_.insert(item_hash(r));
  pending_.revocations.push_back(r);
  out.staged = true;
  return out;
}

size_t MapServer::prune_expired(int64_t now) {
  std::lock_guard lock(writer_);
  pending_.prune_before = std::max(now, pending_.prune_before.value_or(now));
  std::set<Hash> doomed;
  for (const auto& c : working_.certificates())
    if (c.leaf.validity.not_after < *pending_.prune_before) doomed.insert(item_hash(c));
  for (const auto& c : pending_.certs)
    if (c.leaf.validity.not_after < *pending_.prune_before) doomed.insert(item_hash(c));
  return doomed.size();
}

size_t MapServer::pending_count() const {
  std::lock_guard lock(writer_);
  return pending_.certs.size() + pending_.revocations.size();
}

SignedMapHead MapServer::commit(int64_t now) {
  std::lock_guard lock(writer_);
  if (!smhs_.empty() && now < smhs_.back().timestamp)
    throw std::invalid_argument("map head timestamp would go backwards");
  if (pending_.prune_before && *pending_.prune_before > now)
    pending_.prune_before = now;
  if (pending_.prune_before) {
    // Items this revision would add and prune at once stay out of the
    // delta; keeping them would make their omission unobservable.
    int64_t t = *pending_.prune_before;
    std::erase_if(pending_.certs, [&](const ChainedCertificate& c) {
      return c.leaf.validity.not_after < t;
    });
    std::erase_if(pending_.revocations, [&](const RevocationMessage& r) {
      const ChainedCertificate* target = find_certificate(r.cert_hash);
      return !target || target->leaf.validity.not_after < t;
    });
    // A prune that removes nothing is dropped for the same reason.
    auto stored = working_.certificates();
    if (std::none_of(stored.begin(), stored.end(), [&](const ChainedCertificate& c) {
          return c.leaf.validity.not_after < t;
        }))
      pending_.prune_before.reset();
  }

  MapState next = working_.apply(pending_);
  SignedMapHead smh;
  smh.root = next.root();
  smh.revision = smhs_.size();
  smh.timestamp = now;
  smh.server_key_id = key_id(key_);
  smh.signature = signer_(smh.tbs_bytes());  // may throw; nothing changed yet

  log_.append(encode(smh));
  states_.push_back(next);
  deltas_.push_back(std::move(pending_));
  smhs_.push_back(smh);
  working_ = std::move(next);
  pending_ = {};
  pending_hashes_.clear();

  auto pub = std::make_shared<const Published>(Published{working_, smh});
  std::lock_guard plock(publish_);
  current_ = std::move(pub);
  return smh;
}

std::shared_ptr<const MapServer::Published> MapServer::published() const {
  std::lock_guard lock(publish_);
  return current_;
}

DomainProofBundle MapServer::lookup(const DomainName& name) const {
  auto pub = published();
  if (!pub) throw QueryError("no revision committed yet");
  if (name.is_wildcard()) throw QueryError("wildcard names cannot be queried");
  DomainProofBundle b;
  b.server_id = config_.id;
  b.name = name;
  b.smh = pub->smh;
  try {
    b.levels = pub->state.prove(name);
  } catch (const naming::NameError& e) {
    throw QueryError(e.what());
  }
  return b;
}

DomainProofBundle MapServer::lookup(std::string_view name) const {
  auto parsed = DomainName::try_parse(name);
  if (!parsed) throw QueryError("malformed name: " + std::string(name));
  return lookup(*parsed);
}

bool MapServer::has_revision() const { return published() != nullptr; }

SignedMapHead MapServer::latest() const {
  auto pub = published();
  if (!pub) throw std::logic_error("no revision committed yet");
  return pub->smh;
}

std::vector<SignedMapHead> MapServer::history() const {
  std::lock_guard lock(writer_);
  return smhs_;
}

MapState MapServer::state() const {
  auto pub = published();
  return pub ? pub->state : MapState(config_.psl);
}

MapState MapServer::state_at(uint64_t revision) const {
  std::lock_guard lock(writer_);
  return states_.at(revision);
}

RevisionDelta MapServer::delta_at(uint64_t revision) const {
  std::lock_guard lock(writer_);
  return deltas_.at(revision);
}

LogCheckpoint MapServer::log_checkpoint(uint64_t revision) const {
  std::lock_guard lock(writer_);
  return {revision + 1, log_.root_at(revision + 1)};
}

std::vector<Hash> MapServer::consistency_proof(uint64_t old_revision,
                                               uint64_t new_revision) const {
  std::lock_guard lock(writer_);
  return log_.prove_consistency(old_revision + 1, new_revision + 1);
}

std::vector<Hash> MapServer::inclusion_proof(uint64_t revision, uint64_t log_revision) const {
  std::lock_guard lock(writer_);
  return log_.prove_inclusion(revision, log_revision + 1);
}

AuditEvidence MapServer::audit_evidence(uint64_t new_revision) const {
  if (new_revision == 0) throw std::out_of_range("revision 0 has no predecessor");
  AuditEvidence ev;
  ev.old_log = log_checkpoint(new_revision - 1);
  ev.new_log = log_checkpoint(new_revision);
  ev.consistency = consistency_proof(new_revision - 1, new_revision);
  ev.old_inclusion = inclusion_proof(new_revision - 1, new_revision - 1);
  ev.inclusion = inclusion_proof(new_revision, new_revision);
  return ev;
}

int64_t MapServer::ttl(int64_t now) const {
  return config_.mmd - (now - latest().timestamp);
}

Bytes MapServer::snapshot() const {
  std::lock_guard lock(writer_);
  tlv::Writer w;
  size_t mark = w.open(tlv::Tag::kSnapshot);
  w.string(config_.id);
  w.bytes(key_);
  w.list(working_.certificates(),
         [](tlv::Writer& w, const ChainedCertificate& c) { cert::encode_to(w, c); });
  w.list(working_.revocations(),
         [](tlv::Writer& w, const RevocationMessage& r) { cert::encode_to(w, r); });
  w.list(smhs_, [](tlv::Writer& w, const SignedMapHead& h) { encode_to(w, h); });
  w.list(deltas_, [](tlv::Writer& w, const RevisionDelta& d) { encode_to(w, d); });
  encode_to(w, pending_);
  w.close(mark);
  return std::move(w).take();
}

std::unique_ptr<MapServer> MapServer::restore(ByteView data, MapServerConfig config,
                                              const KeyPair& key) {
  tlv::Reader outer(data);
  tlv::Reader r = outer.object(tlv::Tag::kSnapshot);
  config.id = r.string();
  Bytes stored_key = r.bytes();
  if (stored_key != Bytes(key.public_key().begin(), key.public_key().end()))
    throw tlv::DecodeError("snapshot belongs to a different server key");
  auto certs = r.read_list(cert::read_chained);
  auto revs = r.read_list(cert::read_revocation);
  auto smhs = r.read_list(read_smh);
  auto deltas = r.read_list(read_delta);
  RevisionDelta pending = read_delta(r);
  r.expect_end();
  outer.expect_end();
  if (smhs.size() != deltas.size()) throw tlv::DecodeError("head and delta counts differ");

  auto server = std::make_unique<MapServer>(std::move(config), key);
  MapServer& s = *server;
  for (size_t i = 0; i < smhs.size(); ++i) {
    MapState next = s.working_.apply(deltas[i]);
    if (next.root() != smhs[i].root || smhs[i].revision != i || !smhs[i].verify(s.key_))
      throw tlv::DecodeError("snapshot history does not replay");
    s.log_.append(encode(smhs[i]));
    s.states_.push_back(next);
    s.working_ = std::move(next);
  }
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return item_hash(a) < item_hash(b); });
    return v;
  };
  if (sorted(certs) != sorted(s.working_.certificates()) ||
      sorted(revs) != sorted(s.working_.revocations()))
    throw tlv::DecodeError("snapshot items disagree with the replayed map");
  s.deltas_ = std::move(deltas);
  s.smhs_ = std::move(smhs);
  for (const auto& c : pending.certs) s.pending_hashes_.insert(item_hash(c));
  for (const auto& rv : pending.revocations) s.pending_hashes_.insert(item_hash(rv));
  s.pending_ = std::move(pending);
  if (!s.smhs_.empty())
    s.current_ = std::make_shared<const Published>(Published{s.working_, s.smhs_.back()});
  return server;
}

}  // namespace fpki::map
