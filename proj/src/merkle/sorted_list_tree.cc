#include "fpki/merkle/sorted_list_tree.h"

#include <stdexcept>

#include "fpki/common/tlv.h"
#include "fpki/merkle/consistency_tree.h"

namespace fpki::merkle {

Hash SortedLeaf::hash() const {
  tlv::Writer w;
  w.string(d1);
  w.string(d2);
  Sha256 h;
  h.update(kLeafPrefix).update(w.data()).update(entry);
  return h.finish();
}

bool SortedListProof::present() const { return !leaf.d1.empty(); }

size_t SortedListProof::size_bytes() const {
  return path.size() * 32 + leaf.d1.size() + leaf.d2.size() + leaf.entry.size();
}

SortedListTree::SortedListTree() {
  leaves_.push_back(SortedLeaf{});
  position_[""] = 0;
  levels_.push_back({leaves_[0].hash()});
}

unsigned SortedListTree::recompute(size_t i, bool count) {
  // Resize the levels to the current leaf count, keeping existing values.
  size_t n = levels_[0].size();
  size_t k = 0;
  while (n > 1) {
    n = (n + 1) / 2;
    if (levels_.size() <= ++k) levels_.emplace_back();
    levels_[k].resize(n);
  }
  levels_.resize(k + 1);

  unsigned changed = 0;
  for (size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
    const auto& lv = levels_[lvl];
    size_t l = i & ~size_t(1), r = l + 1;
    bool real = r < lv.size();
    Hash h = real ? node_hash(lv[l], lv[r]) : lv[l];
    Hash& slot = levels_[lvl + 1][i / 2];
    if (slot != h) {
      slot = h;
      if (real && count) ++changed;
    }
    i /= 2;
  }
  return changed;
}

unsigned SortedListTree::set_leaf(size_t i, SortedLeaf leaf) {
  position_[leaf.d1] = i;
  leaves_[i] = std::move(leaf);
  levels_[0][i] = leaves_[i].hash();
  return recompute(i, true);
}

unsigned SortedListTree::push_leaf(SortedLeaf leaf) {
  position_[leaf.d1] = leaves_.size();
  leaves_.push_back(std::move(leaf));
  levels_[0].push_back(leaves_.back().hash());
  return recompute(leaves_.size() - 1, true);
}

unsigned SortedListTree::pop_leaf() {
  leaves_.pop_back();
  levels_[0].pop_back();
  return recompute(leaves_.size() - 1, true);
}

unsigned SortedListTree::update(const std::string& domain, std::optional<Bytes> entry) {
  if (domain.empty()) throw std::invalid_argument("empty domain is the sentinel");
  auto it = position_.find(domain);
  if (entry) {
    if (it != position_.end()) {
      SortedLeaf leaf = leaves_[it->second];
      leaf.entry = std::move(*entry);
      return set_leaf(it->second, std::move(leaf));
    }
    auto pred = std::prev(position_.lower_bound(domain));
    size_t pi = pred->second;
    SortedLeaf p = leaves_[pi];
    std::string succ = p.d2;
    p.d2 = domain;
    unsigned changed = set_leaf(pi, std::move(p));
    changed += push_leaf(SortedLeaf{domain, std::move(*entry), succ});
    return changed;
  }
  if (it == position_.end()) return 0;
  size_t di = it->second;
  std::string succ = leaves_[di].d2;
  auto pred = std::prev(it);
  size_t pi = pred->second;
  position_.erase(it);
  SortedLeaf p = leaves_[pi];
  p.d2 = succ;
  unsigned changed = set_leaf(pi, std::move(p));
  size_t last = leaves_.size() - 1;
  if (di != last) changed += set_leaf(di, leaves_[last]);
  changed += pop_leaf();
  return changed;
}

SortedListProof SortedListTree::prove(const std::string& domain) const {
  auto it = position_.upper_bound(domain);
  --it;  // largest d1 <= domain; the sentinel guarantees one exists
  SortedListProof p;
  p.index = it->second;
  p.leaf = leaves_[p.index];
  p.tree_size = leaves_.size();
  size_t i = p.index;
  for (size_t k = 0; k + 1 < levels_.size(); ++k) {
    size_t sib = i ^ 1;
    if (sib < levels_[k].size()) p.path.push_back(levels_[k][sib]);
    i /= 2;
  }
  return p;
}

bool SortedListTree::cycle_ok() const {
  std::string cur;
  size_t steps = 0;
  do {
    auto it = position_.find(cur);
    if (it == position_.end()) return false;
    const SortedLeaf& l = leaves_[it->second];
    if (!l.d2.empty() && l.d2 <= l.d1) return false;
    cur = l.d2;
    if (++steps > leaves_.size()) return false;
  } while (!cur.empty());
  return steps == leaves_.size();
}

bool slt_verify(const SortedListProof& proof, const Hash& root, const std::string& domain) {
  const SortedLeaf& l = proof.leaf;
  bool ok_pair = l.d2.empty() || l.d1 < l.d2;
  if (!ok_pair) return false;
  if (l.d1 != domain) {
    // Absence: d1 < domain < d2, with an empty d2 meaning "no successor".
    if (!(l.d1 < domain && (l.d2.empty() || domain < l.d2))) return false;
  }
  return verify_inclusion(l.hash(), proof.index, proof.tree_size, proof.path, root);
}

}  // namespace fpki::merkle
