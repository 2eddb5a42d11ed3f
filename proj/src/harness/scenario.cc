#include "fpki/harness/scenario.h"

#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "fpki/certmodel/test_ca.h"
#include "fpki/client/client.h"
#include "fpki/mapserver/map_server.h"

namespace fpki::harness {

using cert::CertificateAuthority;
using cert::ChainedCertificate;
using naming::DomainName;
using naming::NameRealm;

namespace {

struct Arity {
  size_t min, max;
};

const std::map<std::string, Arity, std::less<>>& commands() {
  static const std::map<std::string, Arity, std::less<>> kCommands = {
      {"scenario", {1, 1}},       {"seed", {1, 1}},          {"time", {1, 1}},
      {"root", {1, 7}},           {"intermediate", {3, 8}},  {"highly-trusted", {1, 3}},
      {"server", {1, 5}},         {"quorum", {1, 1}},        {"fail-mode", {1, 1}},
      {"browser-policy", {1, 64}}, {"cert", {5, 64}},        {"ingest", {1, 3}},
      {"revoke", {1, 6}},         {"prune", {0, 2}},         {"commit", {0, 1}},
      {"fork", {3, 3}},           {"connect", {5, 7}},       {"http-connect", {3, 5}},
      {"monitor", {5, 7}},        {"gossip", {4, 4}},
  };
  return kCommands;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      if (i > start) out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& w, size_t from, size_t to, const char* sep = " ") {
  std::string out;
  for (size_t i = from; i < to && i < w.size(); ++i) {
    if (!out.empty()) out += sep;
    out += w[i];
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string default_name) {
  Scenario s;
  s.name = std::move(default_name);
  size_t line = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line;
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream words(raw);
    Step step{line, {}};
    for (std::string w; words >> w;) step.words.push_back(w);
    if (step.words.empty()) continue;
    auto it = commands().find(step.words[0]);
    if (it == commands().end()) throw ScenarioError(line, "unknown command '" + step.words[0] + "'");
    size_t args = step.words.size() - 1;
    if (args < it->second.min || args > it->second.max)
      throw ScenarioError(line, "wrong number of arguments for '" + step.words[0] + "'");
    if (step.words[0] == "scenario") {
      s.name = step.words[1];
    } else if (step.words[0] == "seed") {
      try {
        s.seed = std::stoull(step.words[1]);
      } catch (const std::exception&) {
        throw ScenarioError(line, "bad seed");
      }
    } else {
      s.steps.push_back(std::move(step));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find('.'));
  return parse_scenario(ss.str(), stem);
}

bool ScenarioReport::passed() const { return failures() == 0; }

size_t ScenarioReport::failures() const {
  size_t n = 0;
  for (const auto& c : checks) n += !c.pass();
  return n;
}

std::string ScenarioReport::str() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.pass() ? "PASS" : "FAIL") << "  line " << c.line << ": " << c.what << "  -> "
        << c.actual;
    if (!c.pass()) out << " (expected " << c.expected << ")";
    if (!c.detail.empty()) out << "  [" << c.detail << "]";
    out << "\n";
  }
  out << name << ": " << (checks.size() - failures()) << "/" << checks.size() << " checks passed\n";
  return out.str();
}

GossipResult compare_heads(const map::SignedMapHead& a, const map::SignedMapHead& b,
                           const PublicKey& server_key) {
  if (!a.verify(server_key) || !b.verify(server_key)) return GossipResult::kUnverifiable;
  if (a.revision != b.revision) return GossipResult::kUnverifiable;
  return a.root == b.root ? GossipResult::kConsistent : GossipResult::kSplitView;
}

namespace {

constexpr int64_t kDay = 86400;

class Runner {
 public:
  explicit Runner(const Scenario& s) : s_(s) { report_.name = s.name; }

  ScenarioReport run() {
    for (const Step& st : s_.steps) {
      step_ = &st;
      exec(st.words);
    }
    return std::move(report_);
  }

 private:
  struct CaRec {
    std::unique_ptr<CertificateAuthority> ca;
    bool in_trust_store = true;
    bool root = true;
  };
  struct CertRec {
    ChainedCertificate c;
    KeyPair owner;
  };
  struct ServerRec {
    ServerRec(std::string id, KeyPair key) : id(std::move(id)), key(std::move(key)) {}
    std::string id;  // forks share their original's id
    KeyPair key;
    std::set<std::string> supports;  // CA names; empty: every root
    double cost = 1;
    bool fork = false;
    std::unique_ptr<map::MapServer> server;
  };

  [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(step_->line, what); }

  int64_t parse_time(const std::string& w) const {
    try {
      size_t used = 0;
      int64_t v = std::stoll(w, &used);
      std::string unit = w.substr(used);
      if (unit.empty()) return v;
      if (unit == "d") return v * kDay;
      if (unit == "h") return v * 3600;
    } catch (const std::exception&) {
    }
    fail("bad time '" + w + "'");
  }

  NameRealm parse_realm(const std::string& w) const {
    try {
      return NameRealm::parse(w);
    } catch (const std::exception& e) {
      fail(std::string("bad realm: ") + e.what());
    }
  }

  // Optional "key value" pairs after position |from|; returns the value or
  // empty.
  static std::optional<std::string> opt(const std::vector<std::string>& w, size_t from,
                                        std::string_view key, size_t* index = nullptr) {
    for (size_t i = from; i < w.size(); ++i)
      if (w[i] == key) {
        if (index) *index = i;
        return i + 1 < w.size() ? std::optional(w[i + 1]) : std::optional(std::string());
      }
    return std::nullopt;
  }

  CaRec& ca(const std::string& name) {
    auto it = cas_.find(name);
    if (it == cas_.end()) fail("undefined CA '" + name + "'");
    return it->second;
  }
  CertRec& cert(const std::string& name) {
    auto it = certs_.find(name);
    if (it == certs_.end()) fail("undefined certificate '" + name + "'");
    return it->second;
  }
  ServerRec& server(const std::string& name) {
    auto it = servers_.find(name);
    if (it == servers_.end()) fail("undefined server '" + name + "'");
    return it->second;
  }

  uint64_t next_seed() { return s_.seed * 1000003 + ++counter_; }

  std::vector<cert::Certificate> roots(bool trusted_only) const {
    std::vector<cert::Certificate> out;
    for (const auto& name : ca_order_) {
      const CaRec& r = cas_.at(name);
      if (r.root && (r.in_trust_store || !trusted_only)) out.push_back(r.ca->certificate());
    }
    return out;
  }

  std::set<KeyId> supported_ids(const ServerRec& s) {
    std::set<KeyId> ids;
    if (s.supports.empty()) {
      for (const auto& root : roots(false)) ids.insert(root.subject_key_id());
    } else {
      for (const auto& n : s.supports) ids.insert(ca(n).ca->key_id());
    }
    return ids;
  }

  map::MapServer& live(ServerRec& s) {
    if (!s.server) {
      map::MapServerConfig mc;
      mc.id = s.id;
      mc.trust_store = roots(false);
      mc.supported = supported_ids(s);
      s.server = std::make_unique<map::MapServer>(mc, s.key);
    }
    return *s.server;
  }

  std::vector<ServerRec*> targets(const std::vector<std::string>& w, size_t from,
                                  const char* key) {
    std::vector<ServerRec*> out;
    if (auto list = opt(w, from, key)) {
      for (const auto& n : split(*list, ',')) out.push_back(&server(n));
      if (out.empty()) fail(std::string("empty server list after '") + key + "'");
    } else {
      for (const auto& n : server_order_)
        if (!servers_.at(n).fork) out.push_back(&servers_.at(n));
    }
    return out;
  }

  cert::TrustConfig config() {
    cert::TrustConfig c;
    c.trust_store = roots(true);
    c.quorum = quorum_;
    c.fail_mode = fail_mode_;
    c.browser_policy = browser_policy_;
    std::set<std::string> ids;
    for (const auto& n : server_order_) {
      ServerRec& s = servers_.at(n);
      if (s.fork) continue;
      cert::MapServerDescriptor d;
      d.id = s.id;
      d.key = s.key.public_key();
      d.supported = supported_ids(s);
      d.cost = s.cost;
      c.servers[d.id] = d;
      ids.insert(d.id);
    }
    for (const auto& [realm, cas] : tuples_) {
      cert::TrustTuple t;
      t.names = realm;
      for (const auto& n : cas) t.highly_trusted.insert(ca(n).ca->key_id());
      t.map_servers = ids;
      c.tuples.push_back(t);
    }
    return c;
  }

  cert::DomainPolicy parse_policy(const std::string& text) {
    try {
      return cert::parse_policy(text, [&](std::string_view name) -> KeyId {
        auto it = cas_.find(std::string(name));
        if (it == cas_.end()) throw std::invalid_argument("undefined CA '" + std::string(name) + "'");
        return it->second.ca->key_id();
      });
    } catch (const std::exception& e) {
      fail(std::string("bad policy: ") + e.what());
    }
  }

  DomainName domain(const std::string& w) const {
    auto n = DomainName::try_parse(w);
    if (!n) fail("bad domain name '" + w + "'");
    return *n;
  }

  std::vector<map::DomainProofBundle> bundles(const DomainName& n, const std::vector<std::string>& w,
                                              const cert::TrustConfig& config) {
    std::vector<ServerRec*> from;
    if (opt(w, 2, "via")) {
      from = targets(w, 2, "via");
    } else {
      std::set<std::string> ids = config.servers_for(n);
      for (ServerRec* s : targets(w, 2, "via"))
        if (ids.empty() || ids.count(s->id)) from.push_back(s);
    }
    std::vector<map::DomainProofBundle> out;
    for (ServerRec* s : from) {
      map::MapServer& m = live(*s);
      if (!m.has_revision()) continue;
      try {
        out.push_back(m.lookup(n));
      } catch (const map::QueryError&) {
      }
    }
    return out;
  }

  void check(std::string expected, std::string actual, std::string detail = {}) {
    CheckResult r;
    r.line = step_->line;
    r.what = join(step_->words, 0, step_->words.size());
    r.expected = std::move(expected);
    r.actual = std::move(actual);
    r.detail = std::move(detail);
    report_.checks.push_back(std::move(r));
  }

  std::string expectation(const std::vector<std::string>& w, std::initializer_list<const char*> ok) {
    auto e = opt(w, 1, "expect");
    if (!e || e->empty()) fail("missing 'expect'");
    for (const char* o : ok)
      if (*e == o) return *e;
    fail("unexpected outcome '" + *e + "'");
  }

  void exec(const std::vector<std::string>& w) {
    const std::string& cmd = w[0];
    if (cmd == "time") {
      now_ = parse_time(w[1]);
    } else if (cmd == "root" || cmd == "intermediate") {
      const std::string& name = w[1];
      if (cas_.count(name)) fail("CA '" + name + "' defined twice");
      NameRealm realm = NameRealm::all();
      if (auto r = opt(w, 2, "realm")) realm = parse_realm(*r);
      cert::Validity v{0, int64_t(1) << 40};
      size_t vi = 0;
      if (opt(w, 2, "validity", &vi)) {
        if (vi + 2 >= w.size()) fail("validity needs two times");
        v = {parse_time(w[vi + 1]), parse_time(w[vi + 2])};
      }
      CaRec rec;
      if (cmd == "root") {
        rec.ca = std::make_unique<CertificateAuthority>(CertificateAuthority::root(next_seed(), realm, v));
        rec.in_trust_store = std::find(w.begin(), w.end(), "untrusted") == w.end();
      } else {
        if (w[2] != "of") fail("expected 'intermediate CA of PARENT'");
        rec.ca = std::make_unique<CertificateAuthority>(
            ca(w[3]).ca->intermediate(next_seed(), realm, v));
        rec.root = false;
      }
      cas_[name] = std::move(rec);
      ca_order_.push_back(name);
    } else if (cmd == "highly-trusted") {
      auto names = split(w[1], ',');
      for (const auto& n : names) ca(n);
      NameRealm realm = NameRealm::all();
      if (auto r = opt(w, 2, "for")) realm = parse_realm(*r);
      tuples_.emplace_back(realm, names);
    } else if (cmd == "server") {
      const std::string& id = w[1];
      if (servers_.count(id)) fail("server '" + id + "' defined twice");
      ServerRec s{id, KeyPair::from_u64(next_seed() ^ 0x5e4e5)};
      if (auto list = opt(w, 2, "supports"))
        for (const auto& n : split(*list, ',')) {
          ca(n);
          s.supports.insert(n);
        }
      if (auto c = opt(w, 2, "cost")) s.cost = std::stod(*c);
      servers_.emplace(id, std::move(s));
      server_order_.push_back(id);
    } else if (cmd == "quorum") {
      quorum_ = unsigned(std::stoul(w[1]));
      if (quorum_ == 0) fail("quorum must be positive");
    } else if (cmd == "fail-mode") {
      if (w[1] == "hard") fail_mode_ = cert::FailMode::kHard;
      else if (w[1] == "soft") fail_mode_ = cert::FailMode::kSoft;
      else fail("fail-mode is hard or soft");
    } else if (cmd == "browser-policy") {
      cert::DomainPolicy p = parse_policy(join(w, 1, w.size()));
      browser_policy_ = cert::DomainPolicy::permissive();
      if (p.issuers.present()) browser_policy_.issuers = p.issuers;
      if (p.subdomains.present()) browser_policy_.subdomains = p.subdomains;
      if (p.wildcard_forbidden.present()) browser_policy_.wildcard_forbidden = p.wildcard_forbidden;
      if (p.max_lifetime.present()) browser_policy_.max_lifetime = p.max_lifetime;
    } else if (cmd == "cert") {
      exec_cert(w);
    } else if (cmd == "ingest") {
      for (ServerRec* s : targets(w, 2, "into"))
        for (const auto& n : split(w[1], ',')) {
          auto r = live(*s).ingest(cert(n).c);
          if (!r.staged && r.reason != "duplicate")
            fail("server " + s->id + " rejected " + n + ": " + r.reason);
        }
    } else if (cmd == "revoke") {
      CertRec& c = cert(w[1]);
      bool policy_only = std::find(w.begin(), w.end(), "policy-only") != w.end();
      KeyPair signer = c.owner;
      if (auto by = opt(w, 2, "by"); by && *by != "owner") signer = ca(*by).ca->key();
      auto rev = cert::make_revocation(
          c.c.leaf, policy_only ? cert::RevocationScope::kPolicyOnly : cert::RevocationScope::kCertificate,
          signer);
      for (ServerRec* s : targets(w, 2, "into")) {
        auto r = live(*s).add_revocation(rev);
        if (!r.staged && r.reason != "duplicate")
          fail("server " + s->id + " rejected the revocation: " + r.reason);
      }
    } else if (cmd == "prune") {
      for (ServerRec* s : targets(w, 1, "into")) live(*s).prune_expired(now_);
    } else if (cmd == "commit") {
      std::vector<ServerRec*> list;
      if (w.size() > 1) {
        for (const auto& n : split(w[1], ',')) list.push_back(&server(n));
      } else {
        list = targets(w, 1, "into");
      }
      for (ServerRec* s : list) live(*s).commit(now_);
    } else if (cmd == "fork") {
      if (w[2] != "as") fail("expected 'fork S as COPY'");
      ServerRec& orig = server(w[1]);
      if (servers_.count(w[3])) fail("server '" + w[3] + "' defined twice");
      map::MapServer& m = live(orig);
      ServerRec copy{orig.id, orig.key};
      copy.supports = orig.supports;
      copy.cost = orig.cost;
      copy.fork = true;
      copy.server = map::MapServer::restore(m.snapshot(), m.config(), orig.key);
      servers_.emplace(w[3], std::move(copy));
      server_order_.push_back(w[3]);
    } else if (cmd == "connect") {
      if (w[2] != "with") fail("expected 'connect DOMAIN with CERT'");
      std::string expected = expectation(w, {"accept", "reject", "unavailable"});
      DomainName n = domain(w[1]);
      cert::TrustConfig cfg = config();
      auto b = bundles(n, w, cfg);
      client::Decision d = client::check_connection(n, cert(w[3]).c, b, cfg, now_, &cache_);
      const char* verdicts[] = {"accept", "reject", "unavailable"};
      std::string detail = d.reason;
      if (d.used_cache) detail += ", from cache";
      check(expected, verdicts[int(d.verdict)], detail);
    } else if (cmd == "http-connect") {
      std::string expected = expectation(w, {"downgrade", "plain", "unavailable"});
      DomainName n = domain(w[1]);
      cert::TrustConfig cfg = config();
      auto b = bundles(n, w, cfg);
      try {
        auto st = client::http_downgrade_check(n, b, cfg, now_);
        check(expected, st == client::DowngradeStatus::kCertificatesExist ? "downgrade" : "plain");
      } catch (const client::QuorumError& e) {
        check(expected, "unavailable", e.what());
      }
    } else if (cmd == "monitor") {
      exec_monitor(w);
    } else if (cmd == "gossip") {
      exec_gossip(w);
    }
  }

  void exec_cert(const std::vector<std::string>& w) {
    const std::string& name = w[1];
    if (certs_.count(name)) fail("certificate '" + name + "' defined twice");
    if (w[2] != "by" || w[4] != "names") fail("expected 'cert NAME by CA names N,...'");
    CaRec& issuer = ca(w[3]);
    cert::IssueOptions o;
    o.names = split(w[5], ',');
    for (const auto& n : o.names)
      if (!DomainName::try_parse(n)) fail("bad name '" + n + "'");
    o.validity = {now_, now_ + 365 * kDay};
    size_t vi = 0, pi = 0;
    bool has_policy = opt(w, 6, "policy", &pi).has_value();
    size_t end = has_policy ? pi : w.size();
    if (opt(w, 6, "validity", &vi) && vi < end) {
      if (vi + 2 >= end) fail("validity needs two times");
      o.validity = {parse_time(w[vi + 1]), parse_time(w[vi + 2])};
    }
    if (has_policy) o.policy = parse_policy(join(w, pi + 1, w.size()));
    auto c = issuer.ca->issue_chained(o);
    certs_.emplace(name, CertRec{c, issuer.ca->subject_key_for(c.leaf.serial)});
  }

  void exec_monitor(const std::vector<std::string>& w) {
    if (w[2] != "owner") fail("expected 'monitor DOMAIN owner CA,...'");
    std::string expected = expectation(w, {"alert", "clean"});
    DomainName n = domain(w[1]);
    std::set<KeyId> allowed;
    for (const auto& c : split(w[3], ',')) allowed.insert(ca(c).ca->key_id());
    std::vector<ServerRec*> from = targets(w, 2, "via");
    std::set<std::string> found;
    auto psl = naming::PublicSuffixList::builtin();
    for (ServerRec* s : from) {
      map::MapServer& m = live(*s);
      if (!m.has_revision()) continue;
      map::DomainProofBundle b = m.lookup(n);
      auto levels = map::verify_bundle_chain(b, n, psl);
      if (!levels || !b.smh.verify(s->key.public_key())) {
        found.insert(s->id + " served an unverifiable proof");
        continue;
      }
      const auto& last = levels->back();
      if (!last.entry || !(last.domain == n)) continue;
      auto seen = [&](const ChainedCertificate& c) {
        if (!c.leaf.covers(n)) return;
        if (allowed.count(c.leaf.issuer_key_id) || allowed.count(c.root_key_id())) return;
        found.insert(c.leaf.effective_cn() ? c.leaf.effective_cn()->str() + " #" +
                                                 std::to_string(c.leaf.serial)
                                           : "#" + std::to_string(c.leaf.serial));
      };
      for (const auto& c : last.entry->certs_exact) seen(c);
      for (const auto& c : last.entry->certs_wildcard) seen(c);
    }
    std::string detail;
    for (const auto& f : found) detail += (detail.empty() ? "" : ", ") + f;
    check(expected, found.empty() ? "clean" : "alert", detail);
  }

  void exec_gossip(const std::vector<std::string>& w) {
    std::string expected = expectation(w, {"split-view", "consistent"});
    ServerRec& a = server(w[1]);
    ServerRec& b = server(w[2]);
    if (a.id != b.id) fail("gossip compares two views of the same server");
    map::MapServer& ma = live(a);
    map::MapServer& mb = live(b);
    if (!ma.has_revision() || !mb.has_revision()) fail("gossip needs committed heads");
    map::SignedMapHead ha = ma.latest(), hb = mb.latest();
    // Heads at different revisions are compared at the older revision using
    // the newer view's history.
    if (ha.revision > hb.revision) ha = ma.history()[hb.revision];
    if (hb.revision > ha.revision) hb = mb.history()[ha.revision];
    GossipResult r = compare_heads(ha, hb, a.key.public_key());
    check(expected, r == GossipResult::kSplitView ? "split-view" : "consistent",
          "revision " + std::to_string(ha.revision));
  }

  const Scenario& s_;
  const Step* step_ = nullptr;
  ScenarioReport report_;
  uint64_t counter_ = 0;
  int64_t now_ = 0;
  unsigned quorum_ = 1;
  cert::FailMode fail_mode_ = cert::FailMode::kHard;
  cert::DomainPolicy browser_policy_ = cert::DomainPolicy::permissive();
  std::map<std::string, CaRec> cas_;
  std::vector<std::string> ca_order_;
  std::map<std::string, CertRec> certs_;
  std::map<std::string, ServerRec> servers_;
  std::vector<std::string> server_order_;
  std::vector<std::pair<NameRealm, std::vector<std::string>>> tuples_;
  client::SoftFailCache cache_;
};

}  // namespace

ScenarioReport run_scenario(const Scenario& s) { return Runner(s).run(); }

}  // namespace fpki::harness

namespace fpki::harness {

Scenario random_downgrade_instance(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](size_t n) { return size_t(rng() % n); };
  std::ostringstream s;
  s << "scenario downgrade-" << seed << "\nseed " << seed << "\ntime 100d\n";

  size_t hts = 1 + pick(3), lows = 1 + pick(3);
  for (size_t i = 0; i < hts; ++i) s << "root ht" << i << "\n";
  std::vector<bool> has_sub(lows);
  for (size_t i = 0; i < lows; ++i) {
    s << "root low" << i << "\n";
    if ((has_sub[i] = pick(2))) s << "intermediate low" << i << "-sub of low" << i << "\n";
  }
  s << "highly-trusted ";
  for (size_t i = 0; i < hts; ++i) s << (i ? "," : "") << "ht" << i;
  s << "\n";

  size_t honest = 1 + pick(3), liars = pick(3);
  unsigned quorum = unsigned(1 + pick(honest));
  std::string honest_list, liar_list;
  for (size_t i = 0; i < honest; ++i) {
    s << "server h" << i << "\n";
    honest_list += (i ? "," : "") + std::string("h") + std::to_string(i);
  }
  for (size_t i = 0; i < liars; ++i) {
    s << "server x" << i << "\n";
    liar_list += (i ? "," : "") + std::string("x") + std::to_string(i);
  }
  s << "quorum " << quorum << "\n";
  if (pick(2)) s << "fail-mode soft\n";

  static const char* kTails[] = {"com", "net", "org", "co.uk"};
  std::string e2ld = "d" + std::to_string(pick(100000)) + "." + kTails[pick(4)];
  std::string victim = e2ld;
  for (size_t depth = pick(3); depth > 0; --depth) victim = "s" + std::to_string(pick(50)) + "." + victim;
  bool on_parent = victim != e2ld && pick(2);

  // The legitimate certificate, possibly for the e2LD with inherited
  // attributes.
  std::string issuers;
  size_t ht = pick(hts);
  issuers = "ht" + std::to_string(ht);
  for (size_t i = 0; i < hts; ++i)
    if (i != ht && pick(3) == 0) issuers += ",ht" + std::to_string(i);
  std::string policy = "issuers=" + issuers;
  std::string inherit = "issuers";
  if (pick(3) == 0) {
    policy += " wildcard-forbidden=true";
    if (pick(2)) inherit += ",wildcard-forbidden";
  }
  if (pick(3) == 0) policy += " max-lifetime=" + std::to_string((30 + pick(400)) * 86400);
  s << "cert legit by ht" << ht << " names " << (on_parent ? e2ld : victim) << " policy " << policy;
  if (on_parent || pick(2)) s << " inherit=" << inherit;
  s << "\n";

  // The attacker's certificate: any non-highly-trusted CA, exact or
  // wildcard, with an attacker-chosen permissive policy at times.
  size_t low = pick(lows);
  std::string ca = "low" + std::to_string(low);
  if (has_sub[low] && pick(2)) ca += "-sub";
  std::string name = victim;
  if (victim != e2ld && pick(3) == 0) name = "*" + victim.substr(victim.find('.'));
  s << "cert attack by " << ca << " names " << name;
  if (pick(3) == 0) s << " policy issuers=" << ca << " inherit=issuers";
  s << "\n";
  // Decoys from the attacker, and a certificate for an unrelated name.
  if (pick(2)) s << "cert decoy by " << ca << " names other" << pick(1000) << ".com\n";

  s << "ingest legit,attack into " << honest_list << "\n";
  if (!liar_list.empty()) s << "ingest attack into " << liar_list << "\n";
  s << "commit\n";
  s << "connect " << victim << " with attack expect reject\n";
  return parse_scenario(s.str());
}

}  // namespace fpki::harness
