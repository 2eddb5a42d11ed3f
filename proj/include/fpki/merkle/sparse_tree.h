#ifndef FPKI_MERKLE_SPARSE_TREE_H_
#define FPKI_MERKLE_SPARSE_TREE_H_

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fpki/common/tlv.h"
#include "fpki/merkle/hashes.h"

namespace fpki::merkle {

// Inclusion or absence proof with default siblings elided.
struct CompressedProof {
  Bytes key;
  std::optional<Bytes> leaf_value;  // nullopt: absence proof
  unsigned depth = kMaxDepth;
  // Bit i (root-adjacent first) set iff the sibling at depth i+1 is not the
  // default hash for its height.
  std::vector<bool> bitmap;
  std::vector<Hash> siblings;  // one per set bit, root-adjacent first

  bool present() const { return leaf_value.has_value(); }
  // Full sibling list, root-adjacent first; always |depth| entries.
  std::vector<Hash> expand() const;
  static CompressedProof compress(Bytes key, std::optional<Bytes> value,
                                  const std::vector<Hash>& full);
  // 32 bytes per sibling of the expanded proof.
  size_t uncompressed_size() const { return size_t(depth) * 32; }

  friend bool operator==(const CompressedProof&, const CompressedProof&) = default;
};

// key length (4) | key | presence (1) | [value as TLV bytes] |
// ceil(depth/8)-byte bitmap | siblings.
Bytes serialize(const CompressedProof& p);
// Throws tlv::DecodeError on malformed input.
CompressedProof deserialize_proof(ByteView data, unsigned depth = kMaxDepth);

void encode_to(tlv::Writer& w, const CompressedProof& p);
CompressedProof read_proof(tlv::Reader& r, unsigned depth = kMaxDepth);

Hash tree_index(ByteView key, const std::optional<Hash>& nonce, unsigned depth = kMaxDepth);

// Recomputes the root from the proof. False on any structural mismatch.
bool smt_verify(const CompressedProof& proof, const Hash& root,
                const std::optional<Hash>& nonce = std::nullopt);

struct UpdateStats {
  // Stored (branch) nodes of the compressed representation on the updated
  // key's path; the remaining path nodes are lifts of a single child and are
  // derived from the default ladder.
  unsigned changed_nodes = 0;
  // Path nodes whose subtree holds at least one other key (deepest shared
  // prefix with any other key, plus one).
  unsigned shared_path_nodes = 0;
};

// Persistent sparse Merkle tree of fixed depth. Copies share structure and
// are cheap, so a copy taken at a revision boundary is an immutable
// snapshot safe to read from other threads.
class SparseMerkleTree {
 public:
  explicit SparseMerkleTree(unsigned depth = kMaxDepth, std::optional<Hash> nonce = std::nullopt);

  unsigned depth() const { return depth_; }
  const std::optional<Hash>& nonce() const { return nonce_; }
  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  uint64_t revision() const { return revision_; }
  void set_revision(uint64_t r) { revision_ = r; }

  Hash root() const;
  Hash index_of(ByteView key) const { return tree_index(key, nonce_, depth_); }

  std::optional<Bytes> get(ByteView key) const;
  // value == nullopt deletes. Keys whose indices collide (only possible for
  // depth < 256) share a slot.
  UpdateStats update(ByteView key, std::optional<Bytes> value);
  void set(ByteView key, Bytes value) { update(key, std::move(value)); }
  void erase(ByteView key) { update(key, std::nullopt); }

  // Applies many changes; large batches rebuild from the sorted leaf set.
  void apply(std::vector<std::pair<Bytes, std::optional<Bytes>>> changes);
  static SparseMerkleTree build(std::vector<std::pair<Bytes, Bytes>> entries,
                                unsigned depth = kMaxDepth,
                                std::optional<Hash> nonce = std::nullopt);

  CompressedProof prove(ByteView key) const;

  // (key, value) pairs in index order.
  std::vector<std::pair<Bytes, Bytes>> entries() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  unsigned depth_;
  std::optional<Hash> nonce_;
  size_t size_ = 0;
  uint64_t revision_ = 0;
};

}  // namespace fpki::merkle

#endif  // FPKI_MERKLE_SPARSE_TREE_H_
