#include "fpki/mapserver/map_state.h"

#include <algorithm>
#include <set>

#include "fpki/merkle/consistency_tree.h"

namespace fpki::map {

MapEntry DomainRecord::entry() const {
  MapEntry e = content;
  if (!children.empty()) e.subtree_root = subtree.root();
  return e;
}

namespace {

const std::vector<DomainName>* names_of(const Item& item, const CertLookup& lookup,
                                        std::vector<DomainName>& storage) {
  if (const auto* c = std::get_if<ChainedCertificate>(&item)) {
    storage = c->leaf.names();
    return &storage;
  }
  const auto& r = std::get<RevocationMessage>(item);
  const ChainedCertificate* target = lookup ? lookup(r.cert_hash) : nullptr;
  if (!target) return nullptr;
  storage = target->leaf.names();
  return &storage;
}

bool place(MapEntry& e, const Item& item, bool wildcard) {
  if (const auto* c = std::get_if<ChainedCertificate>(&item))
    return insert_sorted(wildcard ? e.certs_wildcard : e.certs_exact, *c);
  const auto& r = std::get<RevocationMessage>(item);
  return insert_sorted(wildcard ? e.revs_wildcard : e.revs_exact, r);
}

}  // namespace

Index build_index(std::span<const Item> items, const naming::PublicSuffixList& psl,
                  const CertLookup& lookup) {
  Index index;
  std::vector<Rejection> whole;
  for (const Item& item : items) {
    std::vector<DomainName> storage;
    const std::vector<DomainName>* names = names_of(item, lookup, storage);
    if (!names) {
      index.placed.push_back(false);
      whole.push_back({item, "", "revoked certificate unknown"});
      continue;
    }
    bool any = false;
    for (const DomainName& name : *names) {
      DomainName base = name.base();
      std::vector<Bytes> keys;
      try {
        keys = level_keys(base, psl);
      } catch (const naming::NameError&) {
        index.rejected.push_back({item, name.str(), "public suffix or invalid name"});
        continue;
      }
      IndexNode* node = &index.root;
      for (const Bytes& k : keys) node = &node->children[std::string(k.begin(), k.end())];
      place(node->adds, item, name.is_wildcard());
      ++index.placements;
      any = true;
    }
    index.placed.push_back(any);
    if (!any) whole.push_back({item, "", "no registrable name"});
  }
  index.rejected.insert(index.rejected.end(), whole.begin(), whole.end());
  return index;
}

void encode_to(tlv::Writer& w, const RevisionDelta& d) {
  size_t mark = w.open(tlv::Tag::kRevisionDelta);
  w.list(d.certs, [](tlv::Writer& w, const ChainedCertificate& c) { cert::encode_to(w, c); });
  w.list(d.revocations,
         [](tlv::Writer& w, const RevocationMessage& r) { cert::encode_to(w, r); });
  w.optional(d.prune_before, [](tlv::Writer& w, int64_t t) { w.integer(uint64_t(t)); });
  w.close(mark);
}

RevisionDelta read_delta(tlv::Reader& outer) {
  tlv::Reader r = outer.object(tlv::Tag::kRevisionDelta);
  RevisionDelta d;
  d.certs = r.read_list(cert::read_chained);
  d.revocations = r.read_list(cert::read_revocation);
  d.prune_before = r.read_optional([](tlv::Reader& r) { return int64_t(r.integer()); });
  r.expect_end();
  return d;
}

Bytes encode(const RevisionDelta& d) {
  tlv::Writer w;
  encode_to(w, d);
  return std::move(w).take();
}

RevisionDelta decode_delta(ByteView data) {
  tlv::Reader r(data);
  RevisionDelta d = read_delta(r);
  r.expect_end();
  return d;
}

MapState::MapState(naming::PublicSuffixList psl)
    : psl_(std::make_shared<const naming::PublicSuffixList>(std::move(psl))),
      root_(std::make_shared<const DomainRecord>()),
      certs_(std::make_shared<const std::map<Hash, std::vector<ChainedCertificate>>>()),
      revs_(std::make_shared<const std::map<Hash, RevocationMessage>>()) {}

const DomainRecord* MapState::find(const DomainName& domain) const {
  std::vector<Bytes> keys;
  try {
    keys = level_keys(domain, *psl_);
  } catch (const naming::NameError&) {
    return nullptr;
  }
  const DomainRecord* rec = root_.get();
  for (const Bytes& k : keys) {
    auto it = rec->children.find(std::string(k.begin(), k.end()));
    if (it == rec->children.end()) return nullptr;
    rec = it->second.get();
  }
  return rec;
}

std::optional<MapEntry> MapState::entry(const DomainName& domain) const {
  const DomainRecord* rec = find(domain);
  if (!rec) return std::nullopt;
  return rec->entry();
}

std::vector<BundleLevel> MapState::prove(const DomainName& name) const {
  std::vector<Bytes> keys = level_keys(name, *psl_);
  std::vector<BundleLevel> levels;
  const DomainRecord* rec = root_.get();
  for (const Bytes& k : keys) {
    BundleLevel level;
    level.proof = rec->subtree.prove(k);
    auto it = rec->children.find(std::string(k.begin(), k.end()));
    if (it == rec->children.end()) {
      levels.push_back(std::move(level));
      break;
    }
    level.entry = it->second->entry();
    levels.push_back(std::move(level));
    rec = it->second.get();
    if (rec->children.empty()) break;
  }
  return levels;
}

const ChainedCertificate* MapState::certificate(const Hash& leaf_hash) const {
  auto it = certs_->find(leaf_hash);
  return it == certs_->end() ? nullptr : &it->second.front();
}

bool MapState::contains(const ChainedCertificate& c) const {
  auto it = certs_->find(c.hash());
  return it != certs_->end() &&
         std::find(it->second.begin(), it->second.end(), c) != it->second.end();
}

bool MapState::contains(const RevocationMessage& r) const { return revs_->count(r.hash()) > 0; }

std::vector<ChainedCertificate> MapState::certificates() const {
  std::vector<ChainedCertificate> out;
  out.reserve(cert_count_);
  for (const auto& [h, list] : *certs_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::vector<RevocationMessage> MapState::revocations() const {
  std::vector<RevocationMessage> out;
  out.reserve(revs_->size());
  for (const auto& [h, r] : *revs_) out.push_back(r);
  return out;
}

namespace {

template <typename T>
bool add_all(std::vector<T>& to, const std::vector<T>& from) {
  bool changed = false;
  for (const T& x : from) changed |= insert_sorted(to, x);
  return changed;
}

// Drops expired certificates and the revocations that referred to them.
bool prune_list(std::vector<ChainedCertificate>& certs, std::vector<RevocationMessage>& revs,
                int64_t before) {
  size_t n = certs.size(), m = revs.size();
  std::erase_if(certs, [&](const ChainedCertificate& c) {
    return c.leaf.validity.not_after < before;
  });
  if (certs.size() != n) {
    std::set<Hash> live;
    for (const auto& c : certs) live.insert(c.hash());
    std::erase_if(revs, [&](const RevocationMessage& r) { return !live.count(r.cert_hash); });
  }
  return certs.size() != n || revs.size() != m;
}

RecordPtr merge(const RecordPtr& old, const IndexNode* adds, std::optional<int64_t> prune) {
  auto rec = old ? std::make_shared<DomainRecord>(*old) : std::make_shared<DomainRecord>();
  bool changed = false;
  if (adds) {
    changed |= add_all(rec->content.certs_exact, adds->adds.certs_exact);
    changed |= add_all(rec->content.revs_exact, adds->adds.revs_exact);
    changed |= add_all(rec->content.certs_wildcard, adds->adds.certs_wildcard);
    changed |= add_all(rec->content.revs_wildcard, adds->adds.revs_wildcard);
  }
  if (prune) {
    changed |= prune_list(rec->content.certs_exact, rec->content.revs_exact, *prune);
    changed |= prune_list(rec->content.certs_wildcard, rec->content.revs_wildcard, *prune);
  }

  std::vector<std::pair<Bytes, std::optional<Bytes>>> changes;
  auto visit = [&](const std::string& label, const IndexNode* child_adds) {
    auto it = rec->children.find(label);
    RecordPtr before = it == rec->children.end() ? nullptr : it->second;
    RecordPtr after = merge(before, child_adds, prune);
    if (after == before) return;
    if (after) {
      rec->children[label] = after;
      changes.emplace_back(to_bytes(label), encode(after->entry()));
    } else {
      rec->children.erase(label);
      changes.emplace_back(to_bytes(label), std::nullopt);
    }
  };
  if (prune && old) {
    std::vector<std::string> labels;
    for (const auto& [label, child] : old->children) labels.push_back(label);
    if (adds)
      for (const auto& [label, node] : adds->children)
        if (!old->children.count(label)) labels.push_back(label);
    for (const std::string& label : labels) {
      const IndexNode* child_adds = nullptr;
      if (adds) {
        auto a = adds->children.find(label);
        if (a != adds->children.end()) child_adds = &a->second;
      }
      visit(label, child_adds);
    }
  } else if (adds) {
    for (const auto& [label, node] : adds->children) visit(label, &node);
  }

  if (!changed && changes.empty()) return old;
  if (!changes.empty()) rec->subtree.apply(std::move(changes));
  if (!rec->exists()) return nullptr;
  return rec;
}

}  // namespace

MapState MapState::apply(const RevisionDelta& delta, std::vector<Rejection>* rejected) const {
  MapState next = *this;
  auto certs = std::make_shared<std::map<Hash, std::vector<ChainedCertificate>>>(*certs_);
  auto revs = std::make_shared<std::map<Hash, RevocationMessage>>(*revs_);
  size_t cert_count = cert_count_;

  std::vector<Item> items;
  items.reserve(delta.certs.size() + delta.revocations.size());
  for (const auto& c : delta.certs) items.emplace_back(c);
  for (const auto& r : delta.revocations) items.emplace_back(r);

  // Revocations may refer to certificates of the same delta.
  std::map<Hash, const ChainedCertificate*> fresh;
  for (const auto& c : delta.certs) fresh.emplace(c.hash(), &c);
  CertLookup lookup = [&](const Hash& h) -> const ChainedCertificate* {
    if (const ChainedCertificate* c = certificate(h)) return c;
    auto it = fresh.find(h);
    return it == fresh.end() ? nullptr : it->second;
  };

  Index index = build_index(items, *psl_, lookup);
  if (rejected)
    for (const Rejection& r : index.rejected)
      if (r.name.empty()) rejected->push_back(r);

  for (size_t i = 0; i < items.size(); ++i) {
    if (!index.placed[i]) continue;
    if (const auto* c = std::get_if<ChainedCertificate>(&items[i])) {
      auto& list = (*certs)[c->hash()];
      if (std::find(list.begin(), list.end(), *c) == list.end()) {
        list.push_back(*c);
        ++cert_count;
      }
    } else {
      const auto& r = std::get<RevocationMessage>(items[i]);
      revs->emplace(r.hash(), r);
    }
  }

  if (delta.prune_before) {
    int64_t t = *delta.prune_before;
    for (auto it = certs->begin(); it != certs->end();) {
      if (it->second.front().leaf.validity.not_after < t) {
        cert_count -= it->second.size();
        it = certs->erase(it);
      } else {
        ++it;
      }
    }
    std::erase_if(*revs, [&](const auto& kv) { return !certs->count(kv.second.cert_hash); });
  }

  RecordPtr root = merge(root_, &index.root, delta.prune_before);
  next.root_ = root ? root : std::make_shared<const DomainRecord>();
  next.certs_ = std::move(certs);
  next.revs_ = std::move(revs);
  next.cert_count_ = cert_count;
  return next;
}

bool audit_revision(const MapState& old_state, const PublicKey& server_key,
                    const SignedMapHead& smh_old, const SignedMapHead& smh_new,
                    const RevisionDelta& delta, const AuditEvidence& ev,
                    std::span<const cert::Certificate> trust_store) {
  if (!smh_old.verify(server_key) || !smh_new.verify(server_key)) return false;
  if (smh_new.revision != smh_old.revision + 1) return false;
  if (smh_new.timestamp < smh_old.timestamp) return false;
  if (old_state.root() != smh_old.root) return false;

  // Exactness of the delta.
  std::set<Hash> seen;
  std::map<Hash, const ChainedCertificate*> fresh;
  for (const auto& c : delta.certs) {
    if (!seen.insert(item_hash(c)).second || old_state.contains(c)) return false;
    if (!trust_store.empty() && !cert::chain_verifies(c.leaf, c.chain, trust_store)) return false;
    fresh.emplace(c.hash(), &c);
  }
  for (const auto& r : delta.revocations) {
    if (!seen.insert(item_hash(r)).second || old_state.contains(r)) return false;
    const ChainedCertificate* target = old_state.certificate(r.cert_hash);
    if (!target) {
      auto it = fresh.find(r.cert_hash);
      if (it == fresh.end()) return false;
      target = it->second;
    }
    if (cert::revocation_applies(r, target->leaf, target->chain, trust_store) ==
        cert::RevocationEffect::kNo)
      return false;
  }
  if (delta.prune_before && *delta.prune_before > smh_new.timestamp) return false;
  if (delta.prune_before) {
    // Nothing added by the delta may be pruned by it as well.
    int64_t t = *delta.prune_before;
    for (const auto& c : delta.certs)
      if (c.leaf.validity.not_after < t) return false;
    for (const auto& r : delta.revocations) {
      const ChainedCertificate* target = old_state.certificate(r.cert_hash);
      if (!target) target = fresh.at(r.cert_hash);
      if (target->leaf.validity.not_after < t) return false;
    }
    auto stored = old_state.certificates();
    if (std::none_of(stored.begin(), stored.end(), [&](const ChainedCertificate& c) {
          return c.leaf.validity.not_after < t;
        }))
      return false;
  }

  std::vector<Rejection> rejected;
  MapState replayed = old_state.apply(delta, &rejected);
  if (!rejected.empty() || replayed.root() != smh_new.root) return false;

  // The new head extends the old head's log by exactly one entry.
  if (ev.old_log.size == 0 || ev.new_log.size != ev.old_log.size + 1) return false;
  if (!merkle::verify_inclusion(merkle::leaf_hash(encode(smh_old)), ev.old_log.size - 1,
                                ev.old_log.size, ev.old_inclusion, ev.old_log.root))
    return false;
  if (!merkle::verify_inclusion(merkle::leaf_hash(encode(smh_new)), ev.new_log.size - 1,
                                ev.new_log.size, ev.inclusion, ev.new_log.root))
    return false;
  return merkle::verify_consistency(ev.old_log.size, ev.new_log.size, ev.old_log.root,
                                    ev.new_log.root, ev.consistency);
}

}  // namespace fpki::map
