#ifndef FPKI_MERKLE_SORTED_LIST_TREE_H_
#define FPKI_MERKLE_SORTED_LIST_TREE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpki/merkle/hashes.h"

namespace fpki::merkle {

// Leaf of the sorted-list tree: a stored domain, its entry, and the next
// stored domain in lexicographic order. The empty string is the sentinel
// that precedes every domain; d2 == "" marks the largest stored domain.
struct SortedLeaf {
  std::string d1;
  Bytes entry;
  std::string d2;

  Hash hash() const;
  friend bool operator==(const SortedLeaf&, const SortedLeaf&) = default;
};

struct SortedListProof {
  SortedLeaf leaf;
  size_t index = 0;
  size_t tree_size = 0;
  std::vector<Hash> path;

  bool present() const;
  size_t size_bytes() const;
};

// Merkle tree over domain-pair leaves (the DoS-resistant alternative to the
// sparse tree). Leaves are kept in insertion positions, not sorted order;
// sortedness lives in the d1 -> d2 links.
class SortedListTree {
 public:
  SortedListTree();

  // entry == nullopt deletes. Returns the number of internal node values
  // that changed.
  unsigned update(const std::string& domain, std::optional<Bytes> entry);

  Hash root() const { return levels_.back()[0]; }
  size_t size() const { return leaves_.size(); }  // including the sentinel
  const std::vector<SortedLeaf>& leaves() const { return leaves_; }

  SortedListProof prove(const std::string& domain) const;

  // Follows d2 links from the sentinel; true iff every stored domain is
  // visited once before returning to the sentinel.
  bool cycle_ok() const;

 private:
  unsigned set_leaf(size_t i, SortedLeaf leaf);
  unsigned push_leaf(SortedLeaf leaf);
  unsigned pop_leaf();
  unsigned recompute(size_t i, bool count);

  std::vector<SortedLeaf> leaves_;
  std::map<std::string, size_t> position_;  // d1 -> leaf index
  // levels_[0] are leaf hashes; an unpaired last node is promoted unchanged.
  std::vector<std::vector<Hash>> levels_;
};

// Proof of presence (leaf.d1 == domain) or absence (leaf brackets domain).
bool slt_verify(const SortedListProof& proof, const Hash& root, const std::string& domain);

}  // namespace fpki::merkle

#endif  // FPKI_MERKLE_SORTED_LIST_TREE_H_
