#include "fpki/merkle/hashes.h"

#include <bit>

namespace fpki::merkle {

Hash leaf_hash(ByteView value) {
  Sha256 h;
  h.update(kLeafPrefix).update(value);
  return h.finish();
}

const Hash& empty_leaf_hash() { return default_hash(0); }

Hash node_hash(const Hash& left, const Hash& right) {
  uint8_t buf[65];
  buf[0] = kNodePrefix;
  std::copy(left.begin(), left.end(), buf + 1);
  std::copy(right.begin(), right.end(), buf + 33);
  return sha256(ByteView(buf, sizeof(buf)));
}

const Hash& default_hash(unsigned height) {
  static const std::array<Hash, kMaxDepth + 1> ladder = [] {
    std::array<Hash, kMaxDepth + 1> out;
    uint8_t zero = kLeafPrefix;
    out[0] = sha256(ByteView(&zero, 1));
    for (unsigned h = 1; h <= kMaxDepth; ++h) out[h] = node_hash(out[h - 1], out[h - 1]);
    return out;
  }();
  return ladder.at(height);
}

unsigned common_prefix_bits(const Hash& a, const Hash& b) {
  for (unsigned i = 0; i < a.size(); ++i) {
    uint8_t x = a[i] ^ b[i];
    if (x) return i * 8 + std::countl_zero(x);
  }
  return kMaxDepth;
}

}  // namespace fpki::merkle
