#include "fpki/certmodel/trust_config.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fpki::cert {

using nlohmann::json;

std::set<KeyId> TrustConfig::f(const DomainName& name) const {
  std::set<KeyId> out;
  for (const auto& t : tuples)
    if (t.names.covers(name)) out.insert(t.highly_trusted.begin(), t.highly_trusted.end());
  return out;
}

std::set<std::string> TrustConfig::servers_for(const DomainName& name) const {
  std::set<std::string> out;
  for (const auto& t : tuples)
    if (t.names.covers(name)) out.insert(t.map_servers.begin(), t.map_servers.end());
  return out;
}

const MapServerDescriptor* TrustConfig::server(const std::string& id) const {
  auto it = servers.find(id);
  return it == servers.end() ? nullptr : &it->second;
}

void TrustConfig::check() const {
  if (quorum == 0) throw std::invalid_argument("quorum must be at least 1");
  if (!browser_policy.complete())
    throw std::invalid_argument("browser policy must define every attribute");
  for (const auto& t : tuples)
    for (const auto& id : t.map_servers)
      if (!servers.contains(id)) throw std::invalid_argument("unknown map server " + id);
}

namespace {

std::set<KeyId> key_set(const json& j) {
  std::set<KeyId> out;
  for (const auto& item : j) out.insert(hash_from_hex(item.get<std::string>()));
  return out;
}

json key_list(const std::set<KeyId>& keys) {
  json out = json::array();
  for (const auto& k : keys) out.push_back(to_hex(k));
  return out;
}

}  // namespace

TrustConfig parse_trust_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("trust config: ") + e.what());
  }
  TrustConfig c;
  try {
    c.quorum = j.value("quorum", 1u);
    c.mmd = j.value("mmd", uint64_t(3600));
    std::string mode = j.value("fail_mode", std::string("hard"));
    if (mode == "soft") c.fail_mode = FailMode::kSoft;
    else if (mode != "hard") throw std::invalid_argument("fail_mode must be hard or soft");

    if (j.contains("browser_policy")) {
      DomainPolicy p = parse_policy(j["browser_policy"].get<std::string>(),
                                    [](std::string_view s) { return hash_from_hex(s); });
      DomainPolicy base = DomainPolicy::permissive();
      if (p.issuers.present()) base.issuers = p.issuers;
      if (p.subdomains.present()) base.subdomains = p.subdomains;
      if (p.wildcard_forbidden.present()) base.wildcard_forbidden = p.wildcard_forbidden;
      if (p.max_lifetime.present()) base.max_lifetime = p.max_lifetime;
      c.browser_policy = base;
    }
    for (const auto& hex : j.value("trust_store", json::array()))
      c.trust_store.push_back(decode_certificate(from_hex(hex.get<std::string>())));
    for (const auto& s : j.value("servers", json::array())) {
      MapServerDescriptor d;
      d.id = s.at("id").get<std::string>();
      Bytes key = from_hex(s.at("key").get<std::string>());
      if (key.size() != d.key.size()) throw std::invalid_argument("server key must be 32 bytes");
      std::copy(key.begin(), key.end(), d.key.begin());
      d.supported = key_set(s.value("supported", json::array()));
      d.cost = s.value("cost", 1.0);
      if (d.cost < 0) throw std::invalid_argument("server cost must be nonnegative");
      d.address = s.value("address", std::string());
      c.servers[d.id] = std::move(d);
    }
    for (const auto& t : j.value("tuples", json::array())) {
      TrustTuple tuple;
      tuple.names = NameRealm::parse(t.value("names", std::string("*")));
      tuple.highly_trusted = key_set(t.value("highly_trusted", json::array()));
      for (const auto& id : t.value("servers", json::array()))
        tuple.map_servers.insert(id.get<std::string>());
      c.tuples.push_back(std::move(tuple));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("trust config: ") + e.what());
  } catch (const tlv::DecodeError& e) {
    throw std::invalid_argument(std::string("trust config certificate: ") + e.what());
  }
  c.check();
  return c;
}

TrustConfig load_trust_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trust_config(ss.str());
}

std::string dump_trust_config(const TrustConfig& c) {
  json j;
  j["quorum"] = c.quorum;
  j["mmd"] = c.mmd;
  j["fail_mode"] = c.fail_mode == FailMode::kSoft ? "soft" : "hard";
  j["browser_policy"] = to_string(c.browser_policy);
  j["trust_store"] = json::array();
  for (const auto& cert : c.trust_store) j["trust_store"].push_back(to_hex(encode(cert)));
  j["servers"] = json::array();
  for (const auto& [id, d] : c.servers) {
    j["servers"].push_back({{"id", id},
                            {"key", to_hex(ByteView(d.key))},
                            {"supported", key_list(d.supported)},
                            {"cost", d.cost},
                            {"address", d.address}});
  }
  j["tuples"] = json::array();
  for (const auto& t : c.tuples) {
    json ids = json::array();
    for (const auto& id : t.map_servers) ids.push_back(id);
    j["tuples"].push_back({{"names", t.names.str()},
                           {"highly_trusted", key_list(t.highly_trusted)},
                           {"servers", ids}});
  }
  return j.dump(2);
}

}  // namespace fpki::cert
