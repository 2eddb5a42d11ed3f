#ifndef FPKI_CLIENT_CLIENT_H_
#define FPKI_CLIENT_CLIENT_H_

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpki/certmodel/revocation.h"
#include "fpki/certmodel/trust_config.h"
#include "fpki/mapserver/map_entry.h"

namespace fpki::client {

using cert::ChainedCertificate;
using cert::RevocationMessage;
using cert::TrustConfig;
using map::DomainProofBundle;
using naming::DomainName;

// Not enough verifying servers for some highly trusted CA. Distinct from a
// negative validation result.
class QuorumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Certificates for a name and its parents, with revocations by certificate
// hash, as vouched for by the verifying bundles.
struct Evidence {
  std::vector<ChainedCertificate> c_list;
  std::map<Hash, std::vector<RevocationMessage>> revocations;
  std::vector<std::string> servers;  // ids whose bundles verified
  std::vector<std::string> discarded;  // "id: reason"

  void add(const ChainedCertificate& c);
  void add(const RevocationMessage& r);
  void merge(const Evidence& other);
};

// Verifies every bundle (SMH signature under the configured server key, proof
// chain for |n|) and unions the verified entries. Bundles from unknown or
// untrusted servers, repeated servers and failing proofs are discarded.
// Throws QuorumError unless every CA in f(n) is supported by at least
// config.quorum verifying servers.
Evidence verify_bundles(std::span<const DomainProofBundle> bundles, const TrustConfig& config,
                        const DomainName& n,
                        const naming::PublicSuffixList& psl = naming::PublicSuffixList::builtin());

// Key id of the root the certificate's path ends at.
KeyId root_key_id(const ChainedCertificate& c, std::span<const cert::Certificate> trust_store);

// Policy check for the presented certificate. |subdomain_owners| are the
// domains whose policies contributed the SUBDOMAINS attribute; that attribute
// only constrains names strictly below one of them. With no owners given it
// constrains |n| directly.
bool violates_policy(const ChainedCertificate& c, const cert::DomainPolicy& p,
                     const DomainName& n, std::span<const cert::Certificate> trust_store,
                     std::span<const DomainName> subdomain_owners = {});

struct ValidationTrace {
  std::string outcome;  // why validation failed, or "ok"
  std::vector<Hash> policy_sources;  // certificates whose policies were folded
  cert::DomainPolicy policy;        // resolved policy
};

// The validation pipeline: legacy checks, revocation of the presented
// certificate, filtering of the map-provided certificates, policy fold and
// the final policy check.
bool validate(const DomainName& n, const ChainedCertificate& c, const Evidence& evidence,
              const TrustConfig& config, int64_t now, ValidationTrace* trace = nullptr);

enum class DowngradeStatus { kNoCertificates, kCertificatesExist };

// Whether a currently valid, unrevoked certificate for |n| from any trusted
// root is on record; if so, a plain HTTP connection signals a downgrade.
DowngradeStatus http_downgrade_check(const DomainName& n, const Evidence& evidence,
                                     const TrustConfig& config, int64_t now);
// Verifies the bundles first; QuorumError propagates.
DowngradeStatus http_downgrade_check(const DomainName& n,
                                     std::span<const DomainProofBundle> bundles,
                                     const TrustConfig& config, int64_t now);

// Greedy set multicover: every CA of |cas| must be supported by at least
// |quorum| chosen servers. Empty when no multicover exists.
std::set<std::string> select_map_servers(std::span<const cert::MapServerDescriptor> servers,
                                         const std::set<KeyId>& cas, unsigned quorum);
double total_cost(std::span<const cert::MapServerDescriptor> servers,
                  const std::set<std::string>& chosen);
bool is_multicover(std::span<const cert::MapServerDescriptor> servers,
                   const std::set<std::string>& chosen, const std::set<KeyId>& cas,
                   unsigned quorum);

// Previously verified evidence per domain; each certificate is kept until it
// expires. Used in soft-fail mode so that blocking the map servers cannot
// strip policies a client has already seen.
class SoftFailCache {
 public:
  void put(const DomainName& n, const Evidence& evidence);
  // Unexpired cached evidence, or nullopt.
  std::optional<Evidence> get(const DomainName& n, int64_t now) const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Evidence> entries_;
};

enum class Verdict { kAccept, kReject, kUnavailable };

struct Decision {
  Verdict verdict = Verdict::kReject;
  std::string reason;
  bool used_cache = false;
};

// End-to-end check of a TLS connection to |n| presenting |c|. Quorum
// failures are kUnavailable in hard-fail mode; in soft-fail mode the cache
// stands in, and without a cache entry only map-independent checks remain.
Decision check_connection(const DomainName& n, const ChainedCertificate& c,
                          std::span<const DomainProofBundle> bundles, const TrustConfig& config,
                          int64_t now, SoftFailCache* cache = nullptr);

}  // namespace fpki::client

#endif  // FPKI_CLIENT_CLIENT_H_
