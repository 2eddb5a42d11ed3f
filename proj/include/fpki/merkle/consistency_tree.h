#ifndef FPKI_MERKLE_CONSISTENCY_TREE_H_
#define FPKI_MERKLE_CONSISTENCY_TREE_H_

#include <stdexcept>
#include <vector>

#include "fpki/merkle/hashes.h"

namespace fpki::merkle {

// Append-only Merkle log with the usual CT tree shape: a tree of n leaves
// splits at the largest power of two below n.
class ConsistencyTree {
 public:
  // Appends H(0x00 || entry) and returns the new root.
  Hash append(ByteView entry);
  Hash append_leaf_hash(const Hash& leaf);

  size_t size() const { return leaves_.size(); }
  const Hash& leaf(size_t i) const { return leaves_.at(i); }
  Hash root() const { return root_at(size()); }
  // Root of the first |n| entries. Throws std::out_of_range if n > size().
  Hash root_at(size_t n) const;

  std::vector<Hash> prove_inclusion(size_t index, size_t tree_size) const;
  std::vector<Hash> prove_consistency(size_t old_size, size_t new_size) const;

 private:
  Hash subtree(size_t lo, size_t hi) const;
  void path(size_t m, size_t lo, size_t hi, std::vector<Hash>& out) const;
  void subproof(size_t m, size_t lo, size_t hi, bool complete, std::vector<Hash>& out) const;

  std::vector<Hash> leaves_;
  // levels_[k][i] is the hash of the perfect subtree of 2^k leaves at i * 2^k.
  std::vector<std::vector<Hash>> levels_;
};

bool verify_inclusion(const Hash& leaf_hash, size_t index, size_t tree_size,
                      const std::vector<Hash>& proof, const Hash& root);
bool verify_consistency(size_t old_size, size_t new_size, const Hash& old_root,
                        const Hash& new_root, const std::vector<Hash>& proof);

// Root of an empty log: SHA-256 of the empty string.
Hash empty_log_root();

}  // namespace fpki::merkle

#endif  // FPKI_MERKLE_CONSISTENCY_TREE_H_
