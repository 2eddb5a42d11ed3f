#ifndef FPKI_TRANSPORT_WIRE_H_
#define FPKI_TRANSPORT_WIRE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpki/mapserver/map_entry.h"

namespace fpki::transport {

using map::DomainProofBundle;
using naming::DomainName;

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr size_t kMaxDatagram = 4096;
constexpr size_t kMaxQueryName = 253;
constexpr size_t kTxtChunk = 255;
constexpr uint8_t kWireVersion = 1;
constexpr uint8_t kStapleVersion = 1;

// "www.example.com" under "mapserver1.net" -> "www.example.com.mapserver1.net".
// nullopt when the result would exceed 253 characters; the caller then has
// to use the binary query form.
std::optional<std::string> encode_query_name(const DomainName& target,
                                              const DomainName& server_suffix);
// Throws TransportError when |query| does not end in the suffix or the
// remainder is not a valid name.
DomainName decode_query_name(std::string_view query, const DomainName& server_suffix);

// TXT character-strings: maximal 255-byte chunks, at least one chunk.
std::vector<std::string> chunk_txt(ByteView payload);
Bytes unchunk_txt(std::span<const std::string> chunks);

enum class Op : uint8_t {
  kQueryName = 1,  // name is target + server suffix
  kQueryTarget = 2,  // binary fallback: name is the bare target
};

// "FPKI" | version | op | u16 name length | name.
struct Request {
  Op op = Op::kQueryName;
  std::string name;
  friend bool operator==(const Request&, const Request&) = default;
};
Bytes encode(const Request& r);
Request decode_request(ByteView data);  // throws TransportError

enum class Status : uint8_t {
  kOk = 0,
  kTruncated = 1,  // retry over the stream transport
  kNameError = 2,  // name has no registrable domain, is a wildcard, or the
                   // suffix does not match
  kNotReady = 3,   // no revision committed yet
  kBadRequest = 4,
  kServerFailure = 5,
};
const char* to_string(Status s);

// status | u32 TTL | TXT character-strings (u8 length | bytes)...
struct Response {
  Status status = Status::kOk;
  uint32_t ttl = 0;
  Bytes payload;  // encoded DomainProofBundle when kOk
  friend bool operator==(const Response&, const Response&) = default;
};
Bytes encode(const Response& r);
Response decode_response(ByteView data);  // throws TransportError

// Datagram form of |r|: the full encoding when it fits in kMaxDatagram,
// otherwise a payload-free kTruncated response with the same TTL.
Bytes encode_datagram(const Response& r);

// Stream framing: u32 big-endian length | message.
Bytes frame(ByteView message);

// Version byte followed by raw DEFLATE of a TLV list of bundles.
struct StapleSizes {
  size_t compressed = 0;
  size_t uncompressed = 0;
};
Bytes staple(std::span<const DomainProofBundle> bundles, StapleSizes* sizes = nullptr);
// Throws tlv::DecodeError on corrupt blobs.
std::vector<DomainProofBundle> unstaple(ByteView blob);

// Raw DEFLATE helpers, also used by the benchmark.
Bytes deflate_raw(ByteView data);
Bytes inflate_raw(ByteView data, size_t max_output = size_t(64) << 20);

}  // namespace fpki::transport

#endif  // FPKI_TRANSPORT_WIRE_H_
