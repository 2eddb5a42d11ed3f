#include "fpki/transport/net.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <future>
#include <limits>
#include <set>
#include <utility>

namespace fpki::transport {

Bytes serve(const map::MapServer& server, const DomainName& suffix, ByteView request,
            bool datagram, int64_t now) {
  Response resp;
  try {
    Request req = decode_request(request);
    std::optional<DomainName> name;
    if (req.op == Op::kQueryName) {
      try {
        name = decode_query_name(req.name, suffix);
      } catch (const TransportError&) {
      }
    } else {
      name = DomainName::try_parse(req.name);
    }
    if (!name) {
      resp.status = Status::kNameError;
    } else if (!server.has_revision()) {
      resp.status = Status::kNotReady;
    } else {
      try {
        DomainProofBundle b = server.lookup(*name);
        int64_t ttl = server.config().mmd - (now - b.smh.timestamp);
        resp.ttl = uint32_t(std::clamp<int64_t>(ttl, 0, std::numeric_limits<uint32_t>::max()));
        resp.payload = map::encode(b);
      } catch (const map::QueryError&) {
        resp.status = Status::kNameError;
      }
    }
  } catch (const TransportError&) {
    resp = {Status::kBadRequest, 0, {}};
  } catch (const std::exception&) {
    resp = {Status::kServerFailure, 0, {}};
  }
  return datagram ? encode_datagram(resp) : encode(resp);
}

Endpoint Endpoint::parse(std::string_view text) {
  size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    throw std::invalid_argument("endpoint must be host:port: " + std::string(text));
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  std::string_view p = text.substr(colon + 1);
  unsigned v = 0;
  auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
  if (ec != std::errc() || end != p.data() + p.size() || v == 0 || v > 65535)
    throw std::invalid_argument("bad port in " + std::string(text));
  e.port = uint16_t(v);
  return e;
}

DomainName server_suffix(const std::string& server_id) { return DomainName::parse(server_id); }

namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

sockaddr_storage resolve(const std::string& host, uint16_t port, socklen_t& len) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  addrinfo* res = nullptr;
  int rc = getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
  if (rc != 0 || !res) throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
  sockaddr_storage out{};
  std::memcpy(&out, res->ai_addr, res->ai_addrlen);
  len = res->ai_addrlen;
  freeaddrinfo(res);
  return out;
}

void set_port(sockaddr_storage& a, uint16_t port) {
  if (a.ss_family == AF_INET) reinterpret_cast<sockaddr_in&>(a).sin_port = htons(port);
  else reinterpret_cast<sockaddr_in6&>(a).sin6_port = htons(port);
}

uint16_t bound_port(int fd) {
  sockaddr_storage a{};
  socklen_t len = sizeof a;
  getsockname(fd, reinterpret_cast<sockaddr*>(&a), &len);
  if (a.ss_family == AF_INET) return ntohs(reinterpret_cast<sockaddr_in&>(a).sin_port);
  return ntohs(reinterpret_cast<sockaddr_in6&>(a).sin6_port);
}

// Waits until |fd| is readable; false on timeout.
bool wait_readable(int fd, int timeout_ms) {
  pollfd p{fd, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&p, 1, timeout_ms);
  } while (rc < 0 && errno == EINTR);
  return rc > 0;
}

bool write_all(int fd, ByteView data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += size_t(n);
  }
  return true;
}

// Reads exactly |n| bytes, giving up after |timeout_ms| of silence or when
// |stop| becomes true.
bool read_exact(int fd, uint8_t* out, size_t n, int timeout_ms,
                const std::atomic<bool>* stop = nullptr) {
  size_t got = 0;
  while (got < n) {
    int waited = 0;
    while (!wait_readable(fd, 100)) {
      waited += 100;
      if ((stop && *stop) || waited >= timeout_ms) return false;
    }
    ssize_t r = ::recv(fd, out + got, n - got, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    got += size_t(r);
  }
  return true;
}

constexpr size_t kMaxRequest = 8 + 0xffff;
constexpr size_t kMaxStreamMessage = size_t(64) << 20;

std::optional<Bytes> read_frame(int fd, size_t limit, int timeout_ms,
                                const std::atomic<bool>* stop = nullptr) {
  uint8_t hdr[4];
  if (!read_exact(fd, hdr, 4, timeout_ms, stop)) return std::nullopt;
  size_t len = size_t(hdr[0]) << 24 | size_t(hdr[1]) << 16 | size_t(hdr[2]) << 8 | hdr[3];
  if (len > limit) return std::nullopt;
  Bytes body(len);
  if (len && !read_exact(fd, body.data(), len, timeout_ms, stop)) return std::nullopt;
  return body;
}

}  // namespace

ProofServer::ProofServer(const map::MapServer& server, DomainName suffix, std::string host,
                         uint16_t port, Clock clock)
    : server_(server), suffix_(std::move(suffix)), clock_(std::move(clock)),
      host_(std::move(host)) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    socklen_t len = 0;
    sockaddr_storage addr = resolve(host_, port, len);
    Fd tcp(::socket(addr.ss_family, SOCK_STREAM, 0));
    int one = 1;
    setsockopt(tcp.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (tcp.get() < 0 || ::bind(tcp.get(), reinterpret_cast<sockaddr*>(&addr), len) != 0 ||
        ::listen(tcp.get(), 64) != 0)
      throw TransportError("cannot listen on " + host_ + ":" + std::to_string(port) + ": " +
                           std::strerror(errno));
    uint16_t chosen = bound_port(tcp.get());
    set_port(addr, chosen);
    Fd udp(::socket(addr.ss_family, SOCK_DGRAM, 0));
    if (udp.get() >= 0 && ::bind(udp.get(), reinterpret_cast<sockaddr*>(&addr), len) == 0) {
      tcp_fd_ = tcp.release();
      udp_fd_ = udp.release();
      port_ = chosen;
      break;
    }
    // The UDP port was taken; with a fixed port that is fatal, otherwise
    // pick another one.
    if (port != 0) throw TransportError("UDP port " + std::to_string(port) + " unavailable");
  }
  if (tcp_fd_ < 0) throw TransportError("no port free for both UDP and TCP");
  udp_thread_ = std::thread([this] { udp_loop(); });
  tcp_thread_ = std::thread([this] { tcp_loop(); });
}

ProofServer::~ProofServer() { stop(); }

void ProofServer::stop() {
  if (stopping_.exchange(true)) return;
  if (udp_thread_.joinable()) udp_thread_.join();
  if (tcp_thread_.joinable()) tcp_thread_.join();
  std::vector<std::thread> conns;
  {
    std::lock_guard lock(conn_mu_);
    conns.swap(conn_threads_);
  }
  for (auto& t : conns) t.join();
  ::close(udp_fd_);
  ::close(tcp_fd_);
}

int64_t ProofServer::now() const {
  if (clock_) return clock_();
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void ProofServer::udp_loop() {
  std::vector<uint8_t> buf(65536);
  while (!stopping_) {
    if (!wait_readable(udp_fd_, 100)) continue;
    sockaddr_storage from{};
    socklen_t flen = sizeof from;
    ssize_t n = ::recvfrom(udp_fd_, buf.data(), buf.size(), 0,
                           reinterpret_cast<sockaddr*>(&from), &flen);
    if (n < 0) continue;
    Bytes resp = serve(server_, suffix_, ByteView(buf.data(), size_t(n)), true, now());
    ++requests_;
    size_t prev = max_datagram_;
    while (resp.size() > prev && !max_datagram_.compare_exchange_weak(prev, resp.size())) {
    }
    ::sendto(udp_fd_, resp.data(), resp.size(), 0, reinterpret_cast<sockaddr*>(&from), flen);
  }
}

void ProofServer::tcp_loop() {
  while (!stopping_) {
    if (!wait_readable(tcp_fd_, 100)) continue;
    int fd = ::accept(tcp_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard lock(conn_mu_);
    conn_threads_.emplace_back([this, fd] { handle_stream(fd); });
  }
}

void ProofServer::handle_stream(int raw) {
  Fd fd(raw);
  while (!stopping_) {
    auto req = read_frame(fd.get(), kMaxRequest, 30000, &stopping_);
    if (!req) return;
    Bytes resp = serve(server_, suffix_, *req, false, now());
    ++requests_;
    if (!write_all(fd.get(), frame(resp))) return;
  }
}

namespace {

Request make_request(const DomainName& suffix, const DomainName& name) {
  if (auto q = encode_query_name(name, suffix)) return {Op::kQueryName, *q};
  return {Op::kQueryTarget, name.str()};
}

std::optional<Bytes> udp_exchange(const Endpoint& ep, ByteView req, int timeout_ms) {
  socklen_t len = 0;
  sockaddr_storage addr = resolve(ep.host, ep.port, len);
  Fd fd(::socket(addr.ss_family, SOCK_DGRAM, 0));
  if (fd.get() < 0 || ::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), len) != 0)
    return std::nullopt;
  if (::send(fd.get(), req.data(), req.size(), 0) < 0) return std::nullopt;
  if (!wait_readable(fd.get(), timeout_ms)) return std::nullopt;
  Bytes buf(65536);
  ssize_t n = ::recv(fd.get(), buf.data(), buf.size(), 0);
  if (n < 0) return std::nullopt;
  buf.resize(size_t(n));
  return buf;
}

std::optional<Bytes> tcp_exchange(const Endpoint& ep, ByteView req, int timeout_ms) {
  socklen_t len = 0;
  sockaddr_storage addr = resolve(ep.host, ep.port, len);
  Fd fd(::socket(addr.ss_family, SOCK_STREAM, 0));
  if (fd.get() < 0) return std::nullopt;
  timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
  setsockopt(fd.get(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), len) != 0) return std::nullopt;
  if (!write_all(fd.get(), frame(req))) return std::nullopt;
  return read_frame(fd.get(), kMaxStreamMessage, timeout_ms);
}

}  // namespace

FetchResult fetch(const Endpoint& server, const DomainName& suffix, const DomainName& name,
                  const FetchOptions& options) {
  Bytes req = encode(make_request(suffix, name));
  int timeout = int(options.timeout.count());
  FetchResult out;
  out.server = server.str();
  std::optional<Response> resp;

  auto attempt = [&](auto&& exchange) -> std::optional<Bytes> {
    for (int i = 0; i < std::max(1, options.attempts); ++i)
      if (auto r = exchange(server, req, timeout)) return r;
    return std::nullopt;
  };

  if (options.mode == Mode::kDatagram) {
    auto raw = attempt(udp_exchange);
    if (!raw) throw TransportError(server.str() + ": no answer over UDP");
    out.datagram_bytes = raw->size();
    resp = decode_response(*raw);
    if (resp->status == Status::kTruncated) {
      out.truncated = true;
      resp.reset();
    }
  }
  if (!resp) {
    auto raw = attempt(tcp_exchange);
    if (!raw) throw TransportError(server.str() + ": no answer over TCP");
    resp = decode_response(*raw);
  }
  if (resp->status != Status::kOk)
    throw TransportError(server.str() + ": " + to_string(resp->status));
  try {
    out.bundle = map::decode_bundle(resp->payload);
  } catch (const tlv::DecodeError& e) {
    throw TransportError(server.str() + ": undecodable bundle: " + e.what());
  }
  out.ttl = resp->ttl;
  return out;
}

FetchResult fetch_any(std::span<const std::pair<Endpoint, DomainName>> servers,
                      const DomainName& name, const FetchOptions& options) {
  std::string errors;
  for (const auto& [ep, suffix] : servers) {
    try {
      return fetch(ep, suffix, name, options);
    } catch (const TransportError& e) {
      if (!errors.empty()) errors += "; ";
      errors += e.what();
    }
  }
  throw TransportError("every server failed: " + errors);
}

std::vector<DomainProofBundle> fetch_bundles(const cert::TrustConfig& config,
                                             const DomainName& name,
                                             const FetchOptions& options,
                                             std::vector<std::string>* errors) {
  std::set<std::string> ids = config.servers_for(name);
  if (ids.empty())
    for (const auto& [id, d] : config.servers) ids.insert(id);
  std::vector<std::pair<std::string, std::future<FetchResult>>> pending;
  for (const auto& id : ids) {
    const auto* d = config.server(id);
    if (!d || d->address.empty()) continue;
    pending.emplace_back(id, std::async(std::launch::async, [d, &name, &options] {
      return fetch(Endpoint::parse(d->address), server_suffix(d->id), name, options);
    }));
  }
  std::vector<DomainProofBundle> out;
  for (auto& [id, f] : pending) {
    try {
      out.push_back(f.get().bundle);
    } catch (const std::exception& e) {
      if (errors) errors->push_back(id + ": " + e.what());
    }
  }
  return out;
}

std::optional<DomainProofBundle> FetchCache::get(const std::string& server,
                                                 const DomainName& name, int64_t now) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find({server, name.str()});
  if (it == entries_.end() || now >= it->second.first) return std::nullopt;
  return it->second.second;
}

void FetchCache::put(const std::string& server, const DomainName& name, const FetchResult& r,
                     int64_t now) {
  std::lock_guard lock(mu_);
  entries_[{server, name.str()}] = {now + int64_t(r.ttl), r.bundle};
}

}  // namespace fpki::transport
