#ifndef FPKI_MERKLE_HASHES_H_
#define FPKI_MERKLE_HASHES_H_

#include "fpki/common/crypto.h"

namespace fpki::merkle {

constexpr uint8_t kLeafPrefix = 0x00;
constexpr uint8_t kNodePrefix = 0x01;
constexpr unsigned kMaxDepth = 256;

Hash leaf_hash(ByteView value);
// SHA-256(0x00): the hash of an empty leaf.
const Hash& empty_leaf_hash();
Hash node_hash(const Hash& left, const Hash& right);

// Root of an empty subtree of the given height (0 = a single empty leaf).
const Hash& default_hash(unsigned height);

// Bit |i| of a 256-bit index, most significant first.
inline bool index_bit(const Hash& index, unsigned i) {
  return (index[i / 8] >> (7 - i % 8)) & 1;
}

// Number of leading bits shared by |a| and |b| (256 if equal).
unsigned common_prefix_bits(const Hash& a, const Hash& b);

}  // namespace fpki::merkle

#endif  // FPKI_MERKLE_HASHES_H_
