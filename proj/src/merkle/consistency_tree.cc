#include "fpki/merkle/consistency_tree.h"

#include <bit>

namespace fpki::merkle {

namespace {

// Largest power of two strictly below n (n >= 2).
size_t split_point(size_t n) { return std::bit_floor(n - 1); }

}  // namespace

Hash empty_log_root() { return sha256({}); }

Hash ConsistencyTree::append(ByteView entry) { return append_leaf_hash(leaf_hash(entry)); }

Hash ConsistencyTree::append_leaf_hash(const Hash& leaf) {
  leaves_.push_back(leaf);
  if (levels_.empty()) levels_.emplace_back();
  levels_[0].push_back(leaf);
  // Complete every perfect subtree that this leaf closes.
  for (size_t k = 0; levels_[k].size() % 2 == 0; ++k) {
    if (levels_.size() == k + 1) levels_.emplace_back();
    const auto& lv = levels_[k];
    levels_[k + 1].push_back(node_hash(lv[lv.size() - 2], lv[lv.size() - 1]));
  }
  return root();
}

Hash ConsistencyTree::subtree(size_t lo, size_t hi) const {
  size_t n = hi - lo;
  if (n == 0) return empty_log_root();
  // Perfect, aligned subtrees are cached.
  if (std::has_single_bit(n) && lo % n == 0) {
    size_t k = std::countr_zero(n);
    return levels_[k][lo >> k];
  }
  size_t k = split_point(n);
  return node_hash(subtree(lo, lo + k), subtree(lo + k, hi));
}

Hash ConsistencyTree::root_at(size_t n) const {
  if (n > size()) throw std::out_of_range("tree size beyond log length");
  return subtree(0, n);
}

void ConsistencyTree::path(size_t m, size_t lo, size_t hi, std::vector<Hash>& out) const {
  size_t n = hi - lo;
  if (n <= 1) return;
  size_t k = split_point(n);
  if (m < k) {
    path(m, lo, lo + k, out);
    out.push_back(subtree(lo + k, hi));
  } else {
    path(m - k, lo + k, hi, out);
    out.push_back(subtree(lo, lo + k));
  }
}

std::vector<Hash> ConsistencyTree::prove_inclusion(size_t index, size_t tree_size) const {
  if (tree_size > size() || index >= tree_size)
    throw std::out_of_range("inclusion proof index out of range");
  std::vector<Hash> out;
  path(index, 0, tree_size, out);
  return out;
}

void ConsistencyTree::subproof(size_t m, size_t lo, size_t hi, bool complete,
                               std::vector<Hash>& out) const {
  size_t n = hi - lo;
  if (m == n) {
    if (!complete) out.push_back(subtree(lo, hi));
    return;
  }
  size_t k = split_point(n);
  if (m <= k) {
    subproof(m, lo, lo + k, complete, out);
    out.push_back(subtree(lo + k, hi));
  } else {
    subproof(m - k, lo + k, hi, false, out);
    out.push_back(subtree(lo, lo + k));
  }
}

std::vector<Hash> ConsistencyTree::prove_consistency(size_t old_size, size_t new_size) const {
  if (old_size > new_size || new_size > size())
    throw std::out_of_range("consistency proof sizes out of range");
  std::vector<Hash> out;
  if (old_size == 0 || old_size == new_size) return out;
  subproof(old_size, 0, new_size, true, out);
  return out;
}

bool verify_inclusion(const Hash& leaf, size_t index, size_t tree_size,
                      const std::vector<Hash>& proof, const Hash& root) {
  if (index >= tree_size) return false;
  size_t fn = index, sn = tree_size - 1;
  Hash r = leaf;
  for (const Hash& p : proof) {
    if (sn == 0) return false;
    if ((fn & 1) || fn == sn) {
      r = node_hash(p, r);
      if (!(fn & 1))
        while (fn != 0 && !(fn & 1)) {
          fn >>= 1;
          sn >>= 1;
        }
    } else {
      r = node_hash(r, p);
    }
    fn >>= 1;
    sn >>= 1;
  }
  return sn == 0 && r == root;
}

bool verify_consistency(size_t old_size, size_t new_size, const Hash& old_root,
                        const Hash& new_root, const std::vector<Hash>& proof) {
  if (old_size > new_size) return false;
  if (old_size == new_size) return proof.empty() && old_root == new_root;
  if (old_size == 0) return proof.empty();
  if (proof.empty()) return false;

  size_t fn = old_size - 1, sn = new_size - 1;
  while (fn & 1) {
    fn >>= 1;
    sn >>= 1;
  }
  size_t start = 0;
  Hash fr, sr;
  if (std::has_single_bit(old_size)) {
    fr = sr = old_root;
  } else {
    fr = sr = proof[0];
    start = 1;
  }
  for (size_t i = start; i < proof.size(); ++i) {
    const Hash& c = proof[i];
    if (sn == 0) return false;
    if ((fn & 1) || fn == sn) {
      fr = node_hash(c, fr);
      sr = node_hash(c, sr);
      if (!(fn & 1))
        while (fn != 0 && !(fn & 1)) {
          fn >>= 1;
          sn >>= 1;
        }
    } else {
      sr = node_hash(sr, c);
    }
    fn >>= 1;
    sn >>= 1;
  }
  return sn == 0 && fr == old_root && sr == new_root;
}

}  // namespace fpki::merkle
