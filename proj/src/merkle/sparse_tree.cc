#include "fpki/merkle/sparse_tree.h"

#include <algorithm>
#include <map>

namespace fpki::merkle {

struct SparseMerkleTree::Node {
  bool leaf = false;
  // Depth in the full tree at which |hash| sits: the tree depth for leaves,
  // the split bit for branches.
  unsigned bit = 0;
  Hash index{};  // leaf index, or the index of some leaf below a branch
  Hash hash{};
  Hash lifted[2]{};  // branch children lifted to depth bit + 1
  std::shared_ptr<const Node> child[2];
  Bytes key;
  Bytes value;
};

namespace {

using Node = SparseMerkleTree::Node;
using NodePtr = std::shared_ptr<const Node>;

// Hash of the ancestor at depth |to| of a node at depth |from| whose
// siblings along the way are all empty.
Hash lift(Hash h, const Hash& index, unsigned from, unsigned to, unsigned depth) {
  for (unsigned d = from; d > to; --d) {
    const Hash& dflt = default_hash(depth - d);
    h = index_bit(index, d - 1) ? node_hash(dflt, h) : node_hash(h, dflt);
  }
  return h;
}

NodePtr make_leaf(const Hash& index, Bytes key, Bytes value, unsigned depth) {
  auto n = std::make_shared<Node>();
  n->leaf = true;
  n->bit = depth;
  n->index = index;
  n->hash = leaf_hash(value);
  n->key = std::move(key);
  n->value = std::move(value);
  return n;
}

NodePtr make_branch(unsigned bit, NodePtr left, NodePtr right, unsigned depth) {
  auto n = std::make_shared<Node>();
  n->bit = bit;
  n->index = left->index;
  n->lifted[0] = lift(left->hash, left->index, left->bit, bit + 1, depth);
  n->lifted[1] = lift(right->hash, right->index, right->bit, bit + 1, depth);
  n->hash = node_hash(n->lifted[0], n->lifted[1]);
  n->child[0] = std::move(left);
  n->child[1] = std::move(right);
  return n;
}

NodePtr join(unsigned split, NodePtr existing, NodePtr fresh, const Hash& fresh_index,
             unsigned depth) {
  return index_bit(fresh_index, split) ? make_branch(split, std::move(existing), std::move(fresh), depth)
                                       : make_branch(split, std::move(fresh), std::move(existing), depth);
}

struct Walk {
  unsigned branches = 0;
  int deepest_branch = -1;
  bool changed = false;
  bool added = false;
};

unsigned prefix(const Hash& a, const Hash& b, unsigned depth) {
  return std::min(common_prefix_bits(a, b), depth);
}

NodePtr insert(const NodePtr& n, const Hash& idx, const Bytes& key, Bytes value, unsigned depth,
               Walk& w) {
  w.changed = true;
  if (!n) {
    w.added = true;
    return make_leaf(idx, key, std::move(value), depth);
  }
  unsigned s = prefix(n->index, idx, depth);
  if (n->leaf && s >= depth) return make_leaf(idx, key, std::move(value), depth);
  if (n->leaf || s < n->bit) {
    w.added = true;
    ++w.branches;
    w.deepest_branch = std::max<int>(w.deepest_branch, int(s));
    return join(s, n, make_leaf(idx, key, std::move(value), depth), idx, depth);
  }
  unsigned b = n->bit;
  bool dir = index_bit(idx, b);
  ++w.branches;
  w.deepest_branch = std::max<int>(w.deepest_branch, int(b));
  NodePtr c = insert(n->child[dir], idx, key, std::move(value), depth, w);
  return dir ? make_branch(b, n->child[0], std::move(c), depth)
             : make_branch(b, std::move(c), n->child[1], depth);
}

NodePtr remove(const NodePtr& n, const Hash& idx, unsigned depth, Walk& w) {
  if (!n) return n;
  unsigned s = prefix(n->index, idx, depth);
  if (n->leaf) {
    if (s < depth) return n;
    w.changed = true;
    return nullptr;
  }
  if (s < n->bit) return n;
  unsigned b = n->bit;
  bool dir = index_bit(idx, b);
  NodePtr c = remove(n->child[dir], idx, depth, w);
  if (!w.changed) return n;
  ++w.branches;
  w.deepest_branch = std::max<int>(w.deepest_branch, int(b));
  if (!c) return n->child[!dir];
  return dir ? make_branch(b, n->child[0], std::move(c), depth)
             : make_branch(b, std::move(c), n->child[1], depth);
}

struct Leaf {
  Hash index;
  Bytes key;
  Bytes value;
};

NodePtr build_range(std::vector<Leaf>& leaves, size_t lo, size_t hi, unsigned depth) {
  if (hi - lo == 1) {
    Leaf& l = leaves[lo];
    return make_leaf(l.index, std::move(l.key), std::move(l.value), depth);
  }
  unsigned s = prefix(leaves[lo].index, leaves[hi - 1].index, depth);
  auto mid = std::partition_point(leaves.begin() + lo, leaves.begin() + hi,
                                  [&](const Leaf& l) { return !index_bit(l.index, s); });
  size_t m = size_t(mid - leaves.begin());
  NodePtr left = build_range(leaves, lo, m, depth);
  NodePtr right = build_range(leaves, m, hi, depth);
  return make_branch(s, std::move(left), std::move(right), depth);
}

void collect(const NodePtr& n, std::vector<std::pair<Bytes, Bytes>>& out) {
  if (!n) return;
  if (n->leaf) {
    out.emplace_back(n->key, n->value);
    return;
  }
  collect(n->child[0], out);
  collect(n->child[1], out);
}

}  // namespace

Hash tree_index(ByteView key, const std::optional<Hash>& nonce, unsigned depth) {
  Sha256 h;
  if (nonce) h.update(ByteView(*nonce));
  h.update(key);
  Hash idx = h.finish();
  for (unsigned i = depth; i < kMaxDepth; ++i) idx[i / 8] &= uint8_t(~(0x80u >> (i % 8)));
  return idx;
}

SparseMerkleTree::SparseMerkleTree(unsigned depth, std::optional<Hash> nonce)
    : depth_(depth), nonce_(nonce) {
  if (depth == 0 || depth > kMaxDepth) throw std::invalid_argument("tree depth must be 1..256");
}

Hash SparseMerkleTree::root() const {
  if (!root_) return default_hash(depth_);
  return lift(root_->hash, root_->index, root_->bit, 0, depth_);
}

std::optional<Bytes> SparseMerkleTree::get(ByteView key) const {
  Hash idx = index_of(key);
  const Node* n = root_.get();
  while (n && !n->leaf) {
    if (prefix(n->index, idx, depth_) < n->bit) return std::nullopt;
    n = n->child[index_bit(idx, n->bit)].get();
  }
  if (n && prefix(n->index, idx, depth_) >= depth_) return n->value;
  return std::nullopt;
}

UpdateStats SparseMerkleTree::update(ByteView key, std::optional<Bytes> value) {
  Hash idx = index_of(key);
  Walk w;
  if (value) {
    root_ = insert(root_, idx, Bytes(key.begin(), key.end()), std::move(*value), depth_, w);
    if (w.added) ++size_;
  } else {
    root_ = remove(root_, idx, depth_, w);
    if (w.changed) --size_;
  }
  return UpdateStats{w.branches, unsigned(w.deepest_branch + 1)};
}

SparseMerkleTree SparseMerkleTree::build(std::vector<std::pair<Bytes, Bytes>> entries,
                                         unsigned depth, std::optional<Hash> nonce) {
  SparseMerkleTree t(depth, nonce);
  std::vector<Leaf> leaves;
  leaves.reserve(entries.size());
  for (auto& [k, v] : entries) leaves.push_back({t.index_of(k), std::move(k), std::move(v)});
  // Stable so that the last write to a slot wins after dedup below.
  std::stable_sort(leaves.begin(), leaves.end(),
                   [](const Leaf& a, const Leaf& b) { return a.index < b.index; });
  std::vector<Leaf> unique;
  unique.reserve(leaves.size());
  for (auto& l : leaves) {
    if (!unique.empty() && unique.back().index == l.index) unique.back() = std::move(l);
    else unique.push_back(std::move(l));
  }
  if (!unique.empty()) t.root_ = build_range(unique, 0, unique.size(), depth);
  t.size_ = unique.size();
  return t;
}

void SparseMerkleTree::apply(std::vector<std::pair<Bytes, std::optional<Bytes>>> changes) {
  if (changes.size() * 4 < size_ || changes.size() < 64) {
    for (auto& [k, v] : changes) update(k, std::move(v));
    return;
  }
  std::map<Hash, std::pair<Bytes, Bytes>> slots;
  for (auto& [k, v] : entries()) {
    Hash idx = index_of(k);
    slots[idx] = {std::move(k), std::move(v)};
  }
  for (auto& [k, v] : changes) {
    Hash idx = index_of(k);
    if (v) slots[idx] = {std::move(k), std::move(*v)};
    else slots.erase(idx);
  }
  std::vector<std::pair<Bytes, Bytes>> all;
  all.reserve(slots.size());
  for (auto& [idx, kv] : slots) all.push_back(std::move(kv));
  uint64_t rev = revision_;
  *this = build(std::move(all), depth_, nonce_);
  revision_ = rev;
}

std::vector<std::pair<Bytes, Bytes>> SparseMerkleTree::entries() const {
  std::vector<std::pair<Bytes, Bytes>> out;
  out.reserve(size_);
  collect(root_, out);
  return out;
}

CompressedProof SparseMerkleTree::prove(ByteView key) const {
  Hash idx = index_of(key);
  CompressedProof p;
  p.key.assign(key.begin(), key.end());
  p.depth = depth_;
  p.bitmap.assign(depth_, false);
  std::vector<std::pair<unsigned, Hash>> found;  // (depth, sibling)
  const Node* n = root_.get();
  while (n) {
    unsigned s = prefix(n->index, idx, depth_);
    if (n->leaf) {
      if (s >= depth_) p.leaf_value = n->value;
      else found.emplace_back(s + 1, lift(n->hash, n->index, depth_, s + 1, depth_));
      break;
    }
    if (s < n->bit) {
      found.emplace_back(s + 1, lift(n->hash, n->index, n->bit, s + 1, depth_));
      break;
    }
    bool dir = index_bit(idx, n->bit);
    found.emplace_back(n->bit + 1, n->lifted[!dir]);
    n = n->child[dir].get();
  }
  for (auto& [d, h] : found) {
    p.bitmap[d - 1] = true;
    p.siblings.push_back(h);
  }
  return p;
}

std::vector<Hash> CompressedProof::expand() const {
  std::vector<Hash> full(depth);
  size_t next = 0;
  for (unsigned d = 1; d <= depth; ++d) {
    if (d - 1 < bitmap.size() && bitmap[d - 1] && next < siblings.size())
      full[d - 1] = siblings[next++];
    else
      full[d - 1] = default_hash(depth - d);
  }
  return full;
}

CompressedProof CompressedProof::compress(Bytes key, std::optional<Bytes> value,
                                          const std::vector<Hash>& full) {
  CompressedProof p;
  p.key = std::move(key);
  p.leaf_value = std::move(value);
  p.depth = unsigned(full.size());
  p.bitmap.assign(p.depth, false);
  for (unsigned d = 1; d <= p.depth; ++d) {
    if (full[d - 1] != default_hash(p.depth - d)) {
      p.bitmap[d - 1] = true;
      p.siblings.push_back(full[d - 1]);
    }
  }
  return p;
}

bool smt_verify(const CompressedProof& proof, const Hash& root,
                const std::optional<Hash>& nonce) {
  const unsigned depth = proof.depth;
  if (depth == 0 || depth > kMaxDepth || proof.bitmap.size() != depth) return false;
  if (size_t(std::count(proof.bitmap.begin(), proof.bitmap.end(), true)) != proof.siblings.size())
    return false;
  Hash idx = tree_index(proof.key, nonce, depth);
  Hash h = proof.leaf_value ? leaf_hash(*proof.leaf_value) : empty_leaf_hash();
  size_t next = proof.siblings.size();
  for (unsigned d = depth; d >= 1; --d) {
    const Hash& sib = proof.bitmap[d - 1] ? proof.siblings[--next] : default_hash(depth - d);
    h = index_bit(idx, d - 1) ? node_hash(sib, h) : node_hash(h, sib);
  }
  return h == root;
}

Bytes serialize(const CompressedProof& p) {
  Bytes out;
  uint32_t klen = uint32_t(p.key.size());
  for (int i = 3; i >= 0; --i) out.push_back(uint8_t(klen >> (8 * i)));
  append(out, p.key);
  out.push_back(p.leaf_value ? 1 : 0);
  if (p.leaf_value) {
    tlv::Writer w;
    w.bytes(*p.leaf_value);
    append(out, w.data());
  }
  Bytes bitmap((p.depth + 7) / 8, 0);
  for (unsigned i = 0; i < p.depth && i < p.bitmap.size(); ++i)
    if (p.bitmap[i]) bitmap[i / 8] |= uint8_t(0x80 >> (i % 8));
  append(out, bitmap);
  for (const auto& s : p.siblings) append(out, s);
  return out;
}

CompressedProof deserialize_proof(ByteView data, unsigned depth) {
  auto need = [&](size_t pos, size_t n) {
    if (data.size() < pos + n) throw tlv::DecodeError("truncated proof");
  };
  CompressedProof p;
  p.depth = depth;
  size_t pos = 0;
  need(pos, 4);
  uint32_t klen = (uint32_t(data[0]) << 24) | (uint32_t(data[1]) << 16) |
                  (uint32_t(data[2]) << 8) | data[3];
  pos = 4;
  need(pos, klen);
  p.key.assign(data.begin() + pos, data.begin() + pos + klen);
  pos += klen;
  need(pos, 1);
  uint8_t presence = data[pos++];
  if (presence > 1) throw tlv::DecodeError("bad presence byte");
  if (presence) {
    need(pos, 5);
    uint32_t vlen = (uint32_t(data[pos + 1]) << 24) | (uint32_t(data[pos + 2]) << 16) |
                    (uint32_t(data[pos + 3]) << 8) | data[pos + 4];
    need(pos, 5 + size_t(vlen));
    tlv::Reader r(data.subspan(pos, 5 + size_t(vlen)));
    p.leaf_value = r.bytes();
    pos += 5 + vlen;
  }
  size_t bm = (depth + 7) / 8;
  need(pos, bm);
  p.bitmap.assign(depth, false);
  size_t set = 0;
  for (unsigned i = 0; i < bm * 8; ++i) {
    bool b = (data[pos + i / 8] >> (7 - i % 8)) & 1;
    if (b && i >= depth) throw tlv::DecodeError("bitmap bit beyond tree depth");
    if (b) {
      p.bitmap[i] = true;
      ++set;
    }
  }
  pos += bm;
  if (data.size() - pos != set * 32) throw tlv::DecodeError("sibling count mismatch");
  p.siblings.resize(set);
  for (size_t i = 0; i < set; ++i, pos += 32)
    std::copy(data.begin() + pos, data.begin() + pos + 32, p.siblings[i].begin());
  return p;
}

void encode_to(tlv::Writer& w, const CompressedProof& p) {
  size_t mark = w.open(tlv::Tag::kCompressedProof);
  w.raw(serialize(p));
  w.close(mark);
}

CompressedProof read_proof(tlv::Reader& r, unsigned depth) {
  if (r.peek_tag() != tlv::Tag::kCompressedProof)
    throw tlv::DecodeError("expected compressed proof");
  ByteView element = r.raw_element();
  return deserialize_proof(element.subspan(5), depth);
}

}  // namespace fpki::merkle
