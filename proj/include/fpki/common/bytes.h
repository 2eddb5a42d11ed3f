#ifndef FPKI_COMMON_BYTES_H_
#define FPKI_COMMON_BYTES_H_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpki {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

// SHA-256 output; also used for key identifiers and tree nodes.
using Hash = std::array<uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return Bytes(v.begin(), v.end());
}

inline Bytes to_bytes(const Hash& h) { return Bytes(h.begin(), h.end()); }

inline void append(Bytes& out, ByteView in) {
  out.insert(out.end(), in.begin(), in.end());
}

std::string to_hex(ByteView data);
inline std::string to_hex(const Hash& h) { return to_hex(ByteView(h)); }

// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);
Hash hash_from_hex(std::string_view hex);

}  // namespace fpki

#endif  // FPKI_COMMON_BYTES_H_
