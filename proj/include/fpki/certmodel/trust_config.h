#ifndef FPKI_CERTMODEL_TRUST_CONFIG_H_
#define FPKI_CERTMODEL_TRUST_CONFIG_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fpki/certmodel/certificate.h"
#include "fpki/certmodel/policy.h"

namespace fpki::cert {

struct MapServerDescriptor {
  std::string id;
  std::set<KeyId> supported;
  double cost = 1.0;
  PublicKey key{};
  std::string address;  // host:port, empty for in-process servers
};

struct TrustTuple {
  NameRealm names;
  std::set<KeyId> highly_trusted;
  std::set<std::string> map_servers;
};

enum class FailMode { kHard, kSoft };

// The relying party's trust package.
struct TrustConfig {
  std::vector<TrustTuple> tuples;
  unsigned quorum = 1;
  DomainPolicy browser_policy = DomainPolicy::permissive();
  std::vector<Certificate> trust_store;
  std::map<std::string, MapServerDescriptor> servers;
  FailMode fail_mode = FailMode::kHard;
  uint64_t mmd = 3600;

  // Highly trusted CAs for |name|: union over covering tuples.
  std::set<KeyId> f(const DomainName& name) const;
  std::set<std::string> servers_for(const DomainName& name) const;
  const MapServerDescriptor* server(const std::string& id) const;

  // Throws std::invalid_argument when quorum is 0, the browser policy is
  // incomplete or a tuple names an unknown server.
  void check() const;
};

// JSON trust package:
// {
//   "quorum": 2, "fail_mode": "hard", "mmd": 3600,
//   "browser_policy": "issuers=* subdomains=* wildcard-forbidden=false",
//   "trust_store": ["<hex certificate encoding>", ...],
//   "servers": [{"id": "m1", "key": "<hex>", "supported": ["<hex key id>"],
//                "cost": 1, "address": "127.0.0.1:5300"}],
//   "tuples": [{"names": "*", "highly_trusted": ["<hex>"], "servers": ["m1"]}]
// }
// Missing browser policy attributes take the permissive default.
TrustConfig parse_trust_config(std::string_view json_text);
TrustConfig load_trust_config(const std::string& path);
std::string dump_trust_config(const TrustConfig& config);

}  // namespace fpki::cert

#endif  // FPKI_CERTMODEL_TRUST_CONFIG_H_
