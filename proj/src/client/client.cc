#include "fpki/client/client.h"

#include <algorithm>

namespace fpki::client {

using cert::Attribute;
using cert::RevocationEffect;

void Evidence::add(const ChainedCertificate& c) {
  if (std::find(c_list.begin(), c_list.end(), c) == c_list.end()) c_list.push_back(c);
}

void Evidence::add(const RevocationMessage& r) {
  auto& list = revocations[r.cert_hash];
  if (std::find(list.begin(), list.end(), r) == list.end()) list.push_back(r);
}

void Evidence::merge(const Evidence& other) {
  for (const auto& c : other.c_list) add(c);
  for (const auto& [h, list] : other.revocations)
    for (const auto& r : list) add(r);
  for (const auto& s : other.servers)
    if (std::find(servers.begin(), servers.end(), s) == servers.end()) servers.push_back(s);
}

Evidence verify_bundles(std::span<const DomainProofBundle> bundles, const TrustConfig& config,
                        const DomainName& n, const naming::PublicSuffixList& psl) {
  std::set<std::string> allowed = config.servers_for(n);
  if (allowed.empty())
    for (const auto& [id, desc] : config.servers) allowed.insert(id);

  Evidence ev;
  std::set<std::string> seen;
  for (const DomainProofBundle& b : bundles) {
    auto discard = [&](const std::string& why) { ev.discarded.push_back(b.server_id + ": " + why); };
    const cert::MapServerDescriptor* desc = config.server(b.server_id);
    if (!desc || !allowed.count(b.server_id)) {
      discard("server not trusted for this name");
      continue;
    }
    if (seen.count(b.server_id)) {
      discard("repeated server");
      continue;
    }
    if (b.name != n) {
      discard("bundle for another name");
      continue;
    }
    if (!b.smh.verify(desc->key)) {
      discard("bad map head signature");
      continue;
    }
    auto levels = map::verify_bundle_chain(b, n, psl);
    if (!levels) {
      discard("proof chain does not verify");
      continue;
    }
    seen.insert(b.server_id);
    ev.servers.push_back(b.server_id);
    for (const auto& level : *levels) {
      if (!level.entry) continue;
      const map::MapEntry& e = *level.entry;
      for (const auto& c : e.certs_exact) ev.add(c);
      for (const auto& c : e.certs_wildcard) ev.add(c);
      for (const auto& r : e.revs_exact) ev.add(r);
      for (const auto& r : e.revs_wildcard) ev.add(r);
    }
  }

  for (const KeyId& ca : config.f(n)) {
    unsigned support = 0;
    for (const auto& id : ev.servers)
      if (config.server(id)->supported.count(ca)) ++support;
    if (support < config.quorum)
      throw QuorumError("only " + std::to_string(support) + " of " +
                        std::to_string(config.quorum) +
                        " required verifying servers support CA " + to_hex(ca).substr(0, 16));
  }
  return ev;
}

KeyId root_key_id(const ChainedCertificate& c, std::span<const cert::Certificate> trust_store) {
  if (auto path = cert::resolve_path(c.leaf, c.chain, trust_store)) return path->back().subject_key_id();
  return c.root_key_id();
}

bool violates_policy(const ChainedCertificate& c, const cert::DomainPolicy& p,
                     const DomainName& n, std::span<const cert::Certificate> trust_store,
                     std::span<const DomainName> subdomain_owners) {
  if (p.issuers.value && !p.issuers.value->contains(root_key_id(c, trust_store))) return true;
  if (p.subdomains.value && !p.subdomains.value->covers(n)) {
    if (subdomain_owners.empty()) return true;
    for (const DomainName& owner : subdomain_owners)
      if (n.is_below(owner)) return true;
  }
  if (p.wildcard_forbidden.value.value_or(false) && c.leaf.has_wildcard_name()) return true;
  if (p.max_lifetime.value && c.leaf.validity.lifetime() > *p.max_lifetime.value) return true;
  return false;
}

namespace {

struct RevocationStatus {
  bool revoked = false;
  bool policy_revoked = false;
};

RevocationStatus revocation_status(const ChainedCertificate& c, const Evidence& ev,
                                   std::span<const cert::Certificate> trust_store) {
  RevocationStatus s;
  auto it = ev.revocations.find(c.hash());
  if (it == ev.revocations.end()) return s;
  for (const auto& r : it->second) {
    switch (cert::revocation_applies(r, c.leaf, c.chain, trust_store)) {
      case RevocationEffect::kRevokesCertificate: s.revoked = true; break;
      case RevocationEffect::kRevokesPolicyOnly: s.policy_revoked = true; break;
      case RevocationEffect::kNo: break;
    }
  }
  return s;
}

}  // namespace

bool validate(const DomainName& n, const ChainedCertificate& c, const Evidence& evidence,
              const TrustConfig& config, int64_t now, ValidationTrace* trace) {
  ValidationTrace local;
  ValidationTrace& t = trace ? *trace : local;
  t = {};
  auto fail = [&](std::string why) {
    t.outcome = std::move(why);
    return false;
  };
  const auto& ts = config.trust_store;

  if (!cert::legacy_validate(c, ts, now)) return fail("legacy validation failed");
  if (!c.leaf.covers(n)) return fail("certificate does not cover the name");
  RevocationStatus own = revocation_status(c, evidence, ts);
  if (own.revoked) return fail("certificate is revoked");

  // Certificates whose policies take part: the presented one (unless its
  // policy was revoked) and the map's certificates that pass the filter.
  std::vector<const ChainedCertificate*> sources;
  if (!own.policy_revoked) sources.push_back(&c);
  const std::set<KeyId> trusted = config.f(n);
  for (const auto& x : evidence.c_list) {
    if (!cert::legacy_validate(x, ts, now) || !trusted.count(root_key_id(x, ts))) continue;
    RevocationStatus s = revocation_status(x, evidence, ts);
    if (s.revoked || s.policy_revoked) continue;
    sources.push_back(&x);
  }

  cert::DomainPolicy p = config.browser_policy;
  std::vector<DomainName> owners;
  for (const ChainedCertificate* x : sources) {
    if (!x->leaf.policy) continue;
    const cert::DomainPolicy& q = *x->leaf.policy;
    bool names_n = x->leaf.covers(n);
    bool used = false;
    for (Attribute a : cert::kAllAttributes) {
      if (!q.present(a) || !(q.inherited(a) || names_n)) continue;
      cert::fold_attribute(p, q, a);
      used = true;
      if (a != Attribute::kSubdomains) continue;
      // The deepest of the certificate's names that contains n defines the
      // subdomain restriction.
      std::optional<DomainName> owner;
      for (const DomainName& m : x->leaf.names()) {
        DomainName base = m.base();
        if (n.is_within(base) && (!owner || base.size() > owner->size())) owner = base;
      }
      owners.push_back(owner ? *owner : n.parent());
    }
    if (used) t.policy_sources.push_back(x->hash());
  }
  t.policy = p;
  if (violates_policy(c, p, n, ts, owners)) return fail("certificate violates the domain policy");
  t.outcome = "ok";
  return true;
}

DowngradeStatus http_downgrade_check(const DomainName& n, const Evidence& evidence,
                                     const TrustConfig& config, int64_t now) {
  for (const auto& x : evidence.c_list) {
    if (!x.leaf.covers(n) || !cert::legacy_validate(x, config.trust_store, now)) continue;
    if (revocation_status(x, evidence, config.trust_store).revoked) continue;
    return DowngradeStatus::kCertificatesExist;
  }
  return DowngradeStatus::kNoCertificates;
}

DowngradeStatus http_downgrade_check(const DomainName& n,
                                     std::span<const DomainProofBundle> bundles,
                                     const TrustConfig& config, int64_t now) {
  return http_downgrade_check(n, verify_bundles(bundles, config, n), config, now);
}

std::set<std::string> select_map_servers(std::span<const cert::MapServerDescriptor> servers,
                                         const std::set<KeyId>& cas, unsigned quorum) {
  std::map<KeyId, unsigned> covered;
  for (const KeyId& ca : cas) covered[ca] = 0;
  std::set<std::string> chosen;
  auto alive = [&] {
    return std::any_of(covered.begin(), covered.end(),
                       [&](const auto& kv) { return kv.second < quorum; });
  };
  while (alive()) {
    const cert::MapServerDescriptor* best = nullptr;
    size_t best_n = 0;
    for (const auto& m : servers) {
      if (chosen.count(m.id)) continue;
      size_t gain = 0;
      for (const auto& [ca, count] : covered)
        if (count < quorum && m.supported.count(ca)) ++gain;
      if (gain == 0) continue;
      // cost/gain < best_cost/best_gain, ties to the smaller id.
      if (!best || m.cost * double(best_n) < best->cost * double(gain) ||
          (m.cost * double(best_n) == best->cost * double(gain) && m.id < best->id)) {
        best = &m;
        best_n = gain;
      }
    }
    if (!best) return {};  // no multicover
    chosen.insert(best->id);
    for (auto& [ca, count] : covered)
      if (best->supported.count(ca)) ++count;
  }
  return chosen;
}

double total_cost(std::span<const cert::MapServerDescriptor> servers,
                  const std::set<std::string>& chosen) {
  double sum = 0;
  for (const auto& m : servers)
    if (chosen.count(m.id)) sum += m.cost;
  return sum;
}

bool is_multicover(std::span<const cert::MapServerDescriptor> servers,
                   const std::set<std::string>& chosen, const std::set<KeyId>& cas,
                   unsigned quorum) {
  for (const KeyId& ca : cas) {
    unsigned count = 0;
    for (const auto& m : servers)
      if (chosen.count(m.id) && m.supported.count(ca)) ++count;
    if (count < quorum) return false;
  }
  return true;
}

void SoftFailCache::put(const DomainName& n, const Evidence& evidence) {
  std::lock_guard lock(mu_);
  entries_[n.str()] = evidence;
}

std::optional<Evidence> SoftFailCache::get(const DomainName& n, int64_t now) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(n.str());
  if (it == entries_.end()) return std::nullopt;
  Evidence out;
  out.servers = it->second.servers;
  for (const auto& c : it->second.c_list) {
    if (c.leaf.validity.not_after < now) continue;
    out.add(c);
    auto r = it->second.revocations.find(c.hash());
    if (r != it->second.revocations.end())
      for (const auto& rv : r->second) out.add(rv);
  }
  if (out.c_list.empty()) return std::nullopt;
  return out;
}

size_t SoftFailCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Decision check_connection(const DomainName& n, const ChainedCertificate& c,
                          std::span<const DomainProofBundle> bundles, const TrustConfig& config,
                          int64_t now, SoftFailCache* cache) {
  Decision d;
  Evidence ev;
  try {
    ev = verify_bundles(bundles, config, n);
    if (cache) cache->put(n, ev);
  } catch (const QuorumError& e) {
    if (config.fail_mode == cert::FailMode::kHard) {
      d.verdict = Verdict::kUnavailable;
      d.reason = e.what();
      return d;
    }
    if (cache) {
      if (auto cached = cache->get(n, now)) {
        ev = std::move(*cached);
        d.used_cache = true;
      }
    }
  }
  ValidationTrace t;
  d.verdict = validate(n, c, ev, config, now, &t) ? Verdict::kAccept : Verdict::kReject;
  d.reason = t.outcome;
  return d;
}

}  // namespace fpki::client
