#ifndef FPKI_TRANSPORT_NET_H_
#define FPKI_TRANSPORT_NET_H_

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fpki/certmodel/trust_config.h"
#include "fpki/mapserver/map_server.h"
#include "fpki/transport/wire.h"

namespace fpki::transport {

// Answers one request against the server's latest revision. |datagram|
// selects the 4096-byte cap with truncation.
Bytes serve(const map::MapServer& server, const DomainName& suffix, ByteView request,
            bool datagram, int64_t now);

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
  // "host:port"; throws std::invalid_argument.
  static Endpoint parse(std::string_view text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

// UDP and TCP listeners on the same port number serving one map server.
// Requests are answered concurrently from the server's latest snapshot.
class ProofServer {
 public:
  using Clock = std::function<int64_t()>;

  // Port 0 picks a free port (the same one for both protocols). |clock|
  // supplies "now" for TTLs; wall-clock time by default.
  ProofServer(const map::MapServer& server, DomainName suffix, std::string host = "127.0.0.1",
              uint16_t port = 0, Clock clock = nullptr);
  ~ProofServer();
  ProofServer(const ProofServer&) = delete;
  ProofServer& operator=(const ProofServer&) = delete;

  Endpoint endpoint() const { return {host_, port_}; }
  void stop();

  // Requests answered so far, and the largest datagram sent.
  size_t requests() const { return requests_; }
  size_t max_datagram() const { return max_datagram_; }

 private:
  void udp_loop();
  void tcp_loop();
  void handle_stream(int fd);
  int64_t now() const;

  const map::MapServer& server_;
  DomainName suffix_;
  Clock clock_;
  std::string host_;
  uint16_t port_ = 0;
  int udp_fd_ = -1;
  int tcp_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::atomic<size_t> requests_{0};
  std::atomic<size_t> max_datagram_{0};
  std::thread udp_thread_, tcp_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> conn_threads_;
};

enum class Mode {
  kDatagram,  // UDP first, stream on truncation
  kStream,    // TCP only
};

struct FetchOptions {
  Mode mode = Mode::kDatagram;
  std::chrono::milliseconds timeout{500};
  int attempts = 3;  // per server
};

struct FetchResult {
  DomainProofBundle bundle;
  uint32_t ttl = 0;
  bool truncated = false;      // the datagram answer said to retry over TCP
  size_t datagram_bytes = 0;   // size of the UDP answer, 0 if none
  std::string server;          // endpoint that answered
};

// Fetches the bundle for |name| from one server. Timeouts are retried up to
// options.attempts times. Throws TransportError when the server never
// answers or answers with an error status.
FetchResult fetch(const Endpoint& server, const DomainName& suffix, const DomainName& name,
                  const FetchOptions& options = {});

// Tries |servers| in order and returns the first answer.
FetchResult fetch_any(std::span<const std::pair<Endpoint, DomainName>> servers,
                      const DomainName& name, const FetchOptions& options = {});

// Query suffix a map server answers under: its id, as a name.
DomainName server_suffix(const std::string& server_id);

// Bundles for |name| from every server the trust config lists for it (with
// an address), fetched in parallel. Servers that fail are skipped and
// reported in |errors|.
std::vector<DomainProofBundle> fetch_bundles(const cert::TrustConfig& config,
                                             const DomainName& name,
                                             const FetchOptions& options = {},
                                             std::vector<std::string>* errors = nullptr);

// Per (server, name) cache honoring the response TTL.
class FetchCache {
 public:
  std::optional<DomainProofBundle> get(const std::string& server, const DomainName& name,
                                       int64_t now) const;
  void put(const std::string& server, const DomainName& name, const FetchResult& r,
           int64_t now);

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::pair<int64_t, DomainProofBundle>> entries_;
};

}  // namespace fpki::transport

#endif  // FPKI_TRANSPORT_NET_H_
