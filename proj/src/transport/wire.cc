#include "fpki/transport/wire.h"

#include <zlib.h>

#include <cstring>

namespace fpki::transport {

namespace {

constexpr char kMagic[4] = {'F', 'P', 'K', 'I'};

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}
void put_u32(Bytes& out, uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}
uint32_t get_u32(ByteView d, size_t at) {
  return uint32_t(d[at]) << 24 | uint32_t(d[at + 1]) << 16 | uint32_t(d[at + 2]) << 8 | d[at + 3];
}

}  // namespace

std::optional<std::string> encode_query_name(const DomainName& target,
                                              const DomainName& server_suffix) {
  if (target.is_wildcard()) throw TransportError("cannot query a wildcard name");
  std::string q = target.str() + "." + server_suffix.str();
  if (q.size() > kMaxQueryName) return std::nullopt;
  return q;
}

DomainName decode_query_name(std::string_view query, const DomainName& server_suffix) {
  std::string tail = "." + server_suffix.str();
  if (query.size() <= tail.size() || query.substr(query.size() - tail.size()) != tail)
    throw TransportError("query name '" + std::string(query) + "' is not under " +
                         server_suffix.str());
  auto n = DomainName::try_parse(query.substr(0, query.size() - tail.size()));
  if (!n) throw TransportError("malformed query name '" + std::string(query) + "'");
  return *n;
}

std::vector<std::string> chunk_txt(ByteView payload) {
  std::vector<std::string> out;
  size_t pos = 0;
  do {
    size_t n = std::min(kTxtChunk, payload.size() - pos);
    out.emplace_back(reinterpret_cast<const char*>(payload.data()) + pos, n);
    pos += n;
  } while (pos < payload.size());
  return out;
}

Bytes unchunk_txt(std::span<const std::string> chunks) {
  Bytes out;
  for (const auto& c : chunks) append(out, as_bytes(c));
  return out;
}

Bytes encode(const Request& r) {
  if (r.name.size() > 0xffff) throw TransportError("query name too long");
  Bytes out(kMagic, kMagic + 4);
  out.push_back(kWireVersion);
  out.push_back(uint8_t(r.op));
  put_u16(out, uint16_t(r.name.size()));
  append(out, as_bytes(r.name));
  return out;
}

Request decode_request(ByteView d) {
  if (d.size() < 8 || std::memcmp(d.data(), kMagic, 4) != 0)
    throw TransportError("not an FPKI request");
  if (d[4] != kWireVersion) throw TransportError("unsupported version " + std::to_string(d[4]));
  Request r;
  if (d[5] != uint8_t(Op::kQueryName) && d[5] != uint8_t(Op::kQueryTarget))
    throw TransportError("unknown op " + std::to_string(d[5]));
  r.op = Op(d[5]);
  size_t len = size_t(d[6]) << 8 | d[7];
  if (d.size() != 8 + len) throw TransportError("request length mismatch");
  r.name.assign(reinterpret_cast<const char*>(d.data()) + 8, len);
  return r;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::kOk: return "ok";
    case Status::kTruncated: return "truncated";
    case Status::kNameError: return "name error";
    case Status::kNotReady: return "not ready";
    case Status::kBadRequest: return "bad request";
    case Status::kServerFailure: return "server failure";
  }
  return "unknown";
}

Bytes encode(const Response& r) {
  Bytes out;
  out.push_back(uint8_t(r.status));
  put_u32(out, r.ttl);
  if (r.payload.empty()) return out;
  for (const auto& c : chunk_txt(r.payload)) {
    out.push_back(uint8_t(c.size()));
    append(out, as_bytes(c));
  }
  return out;
}

Response decode_response(ByteView d) {
  if (d.size() < 5) throw TransportError("short response");
  Response r;
  if (d[0] > uint8_t(Status::kServerFailure)) throw TransportError("unknown status");
  r.status = Status(d[0]);
  r.ttl = get_u32(d, 1);
  size_t pos = 5;
  while (pos < d.size()) {
    size_t n = d[pos++];
    if (pos + n > d.size()) throw TransportError("TXT string overruns the response");
    r.payload.insert(r.payload.end(), d.begin() + pos, d.begin() + pos + n);
    pos += n;
  }
  return r;
}

Bytes encode_datagram(const Response& r) {
  Bytes full = encode(r);
  if (full.size() <= kMaxDatagram) return full;
  return encode(Response{Status::kTruncated, r.ttl, {}});
}

Bytes frame(ByteView message) {
  Bytes out;
  put_u32(out, uint32_t(message.size()));
  append(out, message);
  return out;
}

Bytes deflate_raw(ByteView data) {
  z_stream z{};
  if (deflateInit2(&z, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK)
    throw std::runtime_error("deflateInit2 failed");
  Bytes out(deflateBound(&z, data.size()));
  z.next_in = const_cast<Bytef*>(data.data());
  z.avail_in = uInt(data.size());
  z.next_out = out.data();
  z.avail_out = uInt(out.size());
  int rc = deflate(&z, Z_FINISH);
  deflateEnd(&z);
  if (rc != Z_STREAM_END) throw std::runtime_error("deflate failed");
  out.resize(z.total_out);
  return out;
}

Bytes inflate_raw(ByteView data, size_t max_output) {
  z_stream z{};
  if (inflateInit2(&z, -15) != Z_OK) throw std::runtime_error("inflateInit2 failed");
  Bytes out;
  uint8_t buf[16384];
  z.next_in = const_cast<Bytef*>(data.data());
  z.avail_in = uInt(data.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    z.next_out = buf;
    z.avail_out = sizeof buf;
    rc = inflate(&z, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&z);
      throw tlv::DecodeError("corrupt DEFLATE stream");
    }
    out.insert(out.end(), buf, buf + (sizeof buf - z.avail_out));
    if (out.size() > max_output) {
      inflateEnd(&z);
      throw tlv::DecodeError("inflated data too large");
    }
    if (rc == Z_OK && z.avail_in == 0 && z.avail_out != 0) {
      inflateEnd(&z);
      throw tlv::DecodeError("truncated DEFLATE stream");
    }
  }
  bool trailing = z.avail_in != 0;
  inflateEnd(&z);
  if (trailing) throw tlv::DecodeError("data after DEFLATE stream");
  return out;
}

Bytes staple(std::span<const DomainProofBundle> bundles, StapleSizes* sizes) {
  tlv::Writer w;
  w.list(bundles, [](tlv::Writer& w, const DomainProofBundle& b) { map::encode_to(w, b); });
  Bytes plain = std::move(w).take();
  Bytes out{kStapleVersion};
  append(out, deflate_raw(plain));
  if (sizes) *sizes = {out.size(), plain.size()};
  return out;
}

std::vector<DomainProofBundle> unstaple(ByteView blob) {
  if (blob.empty()) throw tlv::DecodeError("empty staple");
  if (blob[0] != kStapleVersion) throw tlv::DecodeError("unsupported staple version");
  Bytes plain = inflate_raw(blob.subspan(1));
  tlv::Reader r(plain);
  auto out = r.read_list([](tlv::Reader& r) { return map::read_bundle(r); });
  r.expect_end();
  return out;
}

}  // namespace fpki::transport
