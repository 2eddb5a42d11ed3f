#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fpki/merkle/consistency_tree.h"
#include "fpki/merkle/inflation.h"
#include "fpki/merkle/sorted_list_tree.h"
#include "fpki/merkle/sparse_tree.h"

namespace fpki::merkle {
namespace {

using Rng = std::mt19937_64;

Bytes B(std::string_view s) { return to_bytes(s); }

Bytes random_key(Rng& rng) {
  Bytes k(12);
  for (auto& b : k) b = uint8_t(rng());
  return k;
}

// Golden values from a naive recursive script over explicit leaf sets.
TEST(SparseTreeTest, EmptyRootIsDefaultLadder) {
  EXPECT_EQ(to_hex(SparseMerkleTree().root()),
            "c6689f10812a0980976d9533d83875282166159567ec35155716c1413af53d6a");
  EXPECT_EQ(to_hex(SparseMerkleTree(16).root()),
            "d83389ac9a207fb7dbdc492fbb56b9482f19170699e224be64694cc885a3a2a2");
  EXPECT_EQ(to_hex(empty_leaf_hash()), to_hex(sha256(Bytes{0})));
}

TEST(SparseTreeTest, GoldenRoots) {
  SparseMerkleTree t;
  t.set(B("alpha"), B("one"));
  t.set(B("beta"), B("two"));
  t.set(B("gamma"), B("three"));
  EXPECT_EQ(to_hex(t.root()),
            "98b793574da039ec9f4bb64da4e3ad6561cc8d4c842859b49982837766392461");
  Hash nonce;
  for (int i = 0; i < 32; ++i) nonce[i] = uint8_t(i);
  SparseMerkleTree n(kMaxDepth, nonce);
  n.set(B("alpha"), B("one"));
  EXPECT_EQ(to_hex(n.root()),
            "387d8c667cc734764c58fa5edb452d7ef58a8b71cbd0d579f1afcff02aa0d4ba");
}

TEST(SparseTreeTest, InsertThenDeleteRestoresEmptyRoot) {
  SparseMerkleTree t;
  Hash empty = t.root();
  t.set(B("example.com"), B("entry"));
  EXPECT_NE(t.root(), empty);
  t.erase(B("example.com"));
  EXPECT_EQ(t.root(), empty);
  EXPECT_EQ(t.size(), 0u);
}

TEST(SparseTreeTest, OrderIndependentAndBuildMatchesIncremental) {
  Rng rng(1);
  std::vector<std::pair<Bytes, Bytes>> kv;
  for (int i = 0; i < 300; ++i) kv.emplace_back(random_key(rng), random_key(rng));
  SparseMerkleTree a, b;
  for (auto& [k, v] : kv) a.set(k, v);
  std::shuffle(kv.begin(), kv.end(), rng);
  for (auto& [k, v] : kv) b.set(k, v);
  EXPECT_EQ(a.root(), b.root());
  EXPECT_EQ(SparseMerkleTree::build(kv).root(), a.root());
  EXPECT_EQ(a.entries().size(), 300u);
}

TEST(SparseTreeTest, BatchApplyMatchesSequential) {
  Rng rng(2);
  SparseMerkleTree base;
  std::vector<Bytes> keys;
  for (int i = 0; i < 200; ++i) {
    keys.push_back(random_key(rng));
    base.set(keys.back(), B("v"));
  }
  std::vector<std::pair<Bytes, std::optional<Bytes>>> changes;
  for (int i = 0; i < 150; ++i) {
    if (i % 3 == 0) changes.emplace_back(keys[rng() % keys.size()], std::nullopt);
    else changes.emplace_back(random_key(rng), random_key(rng));
  }
  SparseMerkleTree seq = base, batch = base;
  for (auto& [k, v] : changes) seq.update(k, v);
  batch.apply(changes);
  EXPECT_EQ(seq.root(), batch.root());
  EXPECT_EQ(seq.size(), batch.size());
}

TEST(SparseTreeTest, EmptyTreeAbsenceProof) {
  SparseMerkleTree t;
  CompressedProof p = t.prove(B("nothing.com"));
  EXPECT_FALSE(p.present());
  EXPECT_TRUE(p.siblings.empty());
  EXPECT_EQ(std::count(p.bitmap.begin(), p.bitmap.end(), true), 0);
  EXPECT_TRUE(smt_verify(p, t.root()));
}

TEST(SparseTreeTest, UncompressedProofIs8192Bytes) {
  SparseMerkleTree t;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) t.set(random_key(rng), B("x"));
  for (const Bytes& k : {random_key(rng), t.entries()[5].first}) {
    CompressedProof p = t.prove(k);
    EXPECT_EQ(p.expand().size() * 32, 8192u);
    EXPECT_EQ(p.uncompressed_size(), 8192u);
  }
}

TEST(SparseTreeTest, ProofsVerifyAndDetectTampering) {
  Rng rng(4);
  SparseMerkleTree t;
  std::vector<Bytes> keys;
  for (int i = 0; i < 1024; ++i) {
    keys.push_back(random_key(rng));
    t.set(keys.back(), random_key(rng));
  }
  Hash root = t.root();
  double total = 0;
  for (const Bytes& k : keys) {
    CompressedProof p = t.prove(k);
    ASSERT_TRUE(p.present());
    ASSERT_TRUE(smt_verify(p, root));
    total += p.siblings.size();
    // Round trip through the expanded form.
    CompressedProof again = CompressedProof::compress(p.key, p.leaf_value, p.expand());
    EXPECT_EQ(again, p);
  }
  double mean = total / keys.size();
  EXPECT_NEAR(mean, 10.0, 1.5);

  CompressedProof p = t.prove(keys[7]);
  CompressedProof bad = p;
  bad.siblings[0][3] ^= 0x01;
  EXPECT_FALSE(smt_verify(bad, root));
  bad = p;
  bad.leaf_value->push_back(0);
  EXPECT_FALSE(smt_verify(bad, root));
  // Claiming absence for a present key.
  bad = p;
  bad.leaf_value.reset();
  EXPECT_FALSE(smt_verify(bad, root));
  // Sibling count mismatch.
  bad = p;
  bad.siblings.pop_back();
  EXPECT_FALSE(smt_verify(bad, root));
  // Absence proofs verify too, and fail after the key is added.
  Bytes missing = random_key(rng);
  CompressedProof abs = t.prove(missing);
  EXPECT_FALSE(abs.present());
  EXPECT_TRUE(smt_verify(abs, root));
  t.set(missing, B("now here"));
  EXPECT_FALSE(smt_verify(abs, t.root()));
}

TEST(SparseTreeTest, NonceChangesIndexAndRoot) {
  Hash n1{}, n2{};
  n2[0] = 1;
  SparseMerkleTree a(kMaxDepth, n1), b(kMaxDepth, n2);
  for (int i = 0; i < 20; ++i) {
    Bytes k = B("d" + std::to_string(i) + ".com");
    EXPECT_NE(a.index_of(k), b.index_of(k));
    a.set(k, B("v"));
    b.set(k, B("v"));
  }
  EXPECT_NE(a.root(), b.root());
  CompressedProof p = a.prove(B("d3.com"));
  EXPECT_TRUE(smt_verify(p, a.root(), n1));
  EXPECT_FALSE(smt_verify(p, a.root(), n2));
}

TEST(SparseTreeTest, WireFormatRoundTrip) {
  Rng rng(5);
  SparseMerkleTree t;
  for (int i = 0; i < 50; ++i) t.set(random_key(rng), random_key(rng));
  for (const Bytes& k : {t.entries()[0].first, random_key(rng)}) {
    CompressedProof p = t.prove(k);
    Bytes wire = serialize(p);
    EXPECT_EQ(wire.size(), 4 + k.size() + 1 + (p.present() ? 5 + p.leaf_value->size() : 0) +
                               32 + 32 * p.siblings.size());
    EXPECT_EQ(deserialize_proof(wire), p);
    tlv::Writer w;
    encode_to(w, p);
    tlv::Reader r(w.data());
    EXPECT_EQ(read_proof(r), p);
    Bytes cut(wire.begin(), wire.end() - 1);
    EXPECT_THROW(deserialize_proof(cut), tlv::DecodeError);
  }
}

TEST(SparseTreeTest, UpdateLocality) {
  Rng rng(6);
  std::vector<std::pair<Bytes, Bytes>> kv;
  for (int i = 0; i < 4096; ++i) kv.emplace_back(random_key(rng), B("v"));
  SparseMerkleTree t = SparseMerkleTree::build(kv);
  double total = 0;
  for (int i = 0; i < 1000; ++i) {
    SparseMerkleTree copy = t;
    total += copy.update(random_key(rng), B("new")).changed_nodes;
  }
  EXPECT_NEAR(total / 1000, 12.0, 2.0);
}

// Dense oracle -------------------------------------------------------------

// Fully materialized depth-16 tree; nodes[d][i] is the i-th node at depth d.
class DenseTree {
 public:
  static constexpr unsigned kDepth = 16;
  DenseTree() {
    for (unsigned d = 0; d <= kDepth; ++d)
      nodes_[d].assign(size_t(1) << d, default_hash(kDepth - d));
  }
  static size_t slot(ByteView key) {
    Hash h = sha256(key);
    return (size_t(h[0]) << 8) | h[1];
  }
  void set(ByteView key, std::optional<Bytes> value) {
    size_t i = slot(key);
    nodes_[kDepth][i] = value ? leaf_hash(*value) : empty_leaf_hash();
    for (unsigned d = kDepth; d > 0; --d) {
      i /= 2;
      nodes_[d - 1][i] = node_hash(nodes_[d][2 * i], nodes_[d][2 * i + 1]);
    }
  }
  Hash root() const { return nodes_[0][0]; }
  std::vector<Hash> siblings(ByteView key) const {
    std::vector<Hash> out(kDepth);
    size_t i = slot(key);
    for (unsigned d = kDepth; d > 0; --d, i /= 2) out[d - 1] = nodes_[d][i ^ 1];
    return out;
  }

 private:
  std::vector<Hash> nodes_[kDepth + 1];
};

TEST(SparseTreeOracleTest, MatchesDenseTreeOnRandomSequences) {
  Rng rng(7);
  int sequences = 0;
  for (; sequences < 1000; ++sequences) {
    SparseMerkleTree t(DenseTree::kDepth);
    DenseTree dense;
    std::vector<Bytes> keys;
    size_t ops = sequences % 100 == 0 ? 4096 : 1 + rng() % 40;
    for (size_t op = 0; op < ops; ++op) {
      bool erase = !keys.empty() && rng() % 4 == 0;
      Bytes k = erase ? keys[rng() % keys.size()] : random_key(rng);
      std::optional<Bytes> v;
      if (!erase) {
        v = random_key(rng);
        keys.push_back(k);
      }
      t.update(k, v);
      dense.set(k, v);
    }
    ASSERT_EQ(t.root(), dense.root()) << "sequence " << sequences;
    for (int q = 0; q < 4; ++q) {
      Bytes k = (q % 2 && !keys.empty()) ? keys[rng() % keys.size()] : random_key(rng);
      CompressedProof p = t.prove(k);
      ASSERT_EQ(p.expand(), dense.siblings(k));
      ASSERT_TRUE(smt_verify(p, dense.root()));
    }
    // The batch builder agrees too.
    ASSERT_EQ(SparseMerkleTree::build(t.entries(), DenseTree::kDepth).root(), t.root());
  }
  EXPECT_EQ(sequences, 1000);
}

// Consistency tree -----------------------------------------------------------

const char* const kLeafHashes[8] = {
    "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d",
    "96a296d224f285c67bee93c30f8a309157f0daa35dc5b87e410b78630a09cfc7",
    "0298d122906dcfc10892cb53a73992fc5b9f493ea4c9badb27b791b4127a7fe7",
    "07506a85fd9dd2f120eb694f86011e5bb4662e5c415a62917033d4a9624487e7",
    "bc1a0643b12e4d2d7c77918f44e0f4f79a838b6cf9ec5b5c283e1f4d88599e6b",
    "4271a26be0d8a84f0bd54c8c302e7cb3a3b5d1fa6780a40bcce2873477dab658",
    "b08693ec2e721597130641e8211e7eedccb4c26413963eee6c1e2ed16ffb1a5f",
    "46f6ffadd3d06a09ff3c5860d2755c8b9819db7df44251788c7d8e3180de8eb1"};

const char* const kRootHashes[8] = {
    "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d",
    "fac54203e7cc696cf0dfcb42c92a1d9dbaf70ad9e621f4bd8d98662f00e3c125",
    "aeb6bcfe274b70a14fb067a5e5578264db0fa9b51af5e0ba159158f329e06e77",
    "d37ee418976dd95753c1c73862b9398fa2a2cf9b4ff0fdfe8b30cd95209614b7",
    "4e3bbb1f7b478dcfe71fb631631519a3bca12c9aefca1612bfce4c13a86264d4",
    "76e67dadbcdf1e10e1b74ddc608abd2f98dfb16fbce75277b5232a127f2087ef",
    "ddb89be403809e325750d3d263cd78929c2942b7942a34b77e122c9594a74c8c",
    "5dc9da79a70659a9ad559cb701ded9a2ab9d823aad2f4960cfe370eff4604328"};

struct ProofVector {
  size_t a, b;
  std::vector<const char*> proof;
};

const ProofVector kConsistencyProofs[] = {
    {1, 1, {}},
    {1, 8, {"96a296d224f285c67bee93c30f8a309157f0daa35dc5b87e410b78630a09cfc7",
            "5f083f0a1a33ca076a95279832580db3e0ef4584bdff1f54c8a360f50de3031e",
            "6b47aaf29ee3c2af9af889bc1fb9254dabd31177f16232dd6aab035ca39bf6e4"}},
    {6, 8, {"0ebc5d3437fbe2db158b9f126a1d118e308181031d0a949f8dededebc558ef6a",
            "ca854ea128ed050b41b35ffc1b87b8eb2bde461e9e3b5596ece6b9d5975a0ae0",
            "d37ee418976dd95753c1c73862b9398fa2a2cf9b4ff0fdfe8b30cd95209614b7"}},
    {2, 5, {"5f083f0a1a33ca076a95279832580db3e0ef4584bdff1f54c8a360f50de3031e",
            "bc1a0643b12e4d2d7c77918f44e0f4f79a838b6cf9ec5b5c283e1f4d88599e6b"}}};

const ProofVector kAuditProofs[] = {
    {0, 1, {}},
    {0, 8, {"96a296d224f285c67bee93c30f8a309157f0daa35dc5b87e410b78630a09cfc7",
            "5f083f0a1a33ca076a95279832580db3e0ef4584bdff1f54c8a360f50de3031e",
            "6b47aaf29ee3c2af9af889bc1fb9254dabd31177f16232dd6aab035ca39bf6e4"}},
    {5, 8, {"bc1a0643b12e4d2d7c77918f44e0f4f79a838b6cf9ec5b5c283e1f4d88599e6b",
            "ca854ea128ed050b41b35ffc1b87b8eb2bde461e9e3b5596ece6b9d5975a0ae0",
            "d37ee418976dd95753c1c73862b9398fa2a2cf9b4ff0fdfe8b30cd95209614b7"}},
    {2, 3, {"fac54203e7cc696cf0dfcb42c92a1d9dbaf70ad9e621f4bd8d98662f00e3c125"}},
    {1, 5, {"6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d",
            "5f083f0a1a33ca076a95279832580db3e0ef4584bdff1f54c8a360f50de3031e",
            "bc1a0643b12e4d2d7c77918f44e0f4f79a838b6cf9ec5b5c283e1f4d88599e6b"}}};

std::vector<Hash> hashes(const std::vector<const char*>& hex) {
  std::vector<Hash> out;
  for (const char* h : hex) out.push_back(hash_from_hex(h));
  return out;
}

class ConsistencyTreeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* h : kLeafHashes) tree.append_leaf_hash(hash_from_hex(h));
  }
  ConsistencyTree tree;
};

TEST_F(ConsistencyTreeTest, KnownRoots) {
  EXPECT_EQ(to_hex(ConsistencyTree().root()),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  for (size_t n = 1; n <= 8; ++n) EXPECT_EQ(to_hex(tree.root_at(n)), kRootHashes[n - 1]);
}

TEST_F(ConsistencyTreeTest, KnownConsistencyProofs) {
  for (const auto& v : kConsistencyProofs) {
    EXPECT_EQ(tree.prove_consistency(v.a, v.b), hashes(v.proof)) << v.a << "->" << v.b;
    EXPECT_TRUE(verify_consistency(v.a, v.b, tree.root_at(v.a), tree.root_at(v.b),
                                   hashes(v.proof)));
  }
}

TEST_F(ConsistencyTreeTest, KnownAuditProofs) {
  for (const auto& v : kAuditProofs) {
    EXPECT_EQ(tree.prove_inclusion(v.a, v.b), hashes(v.proof));
    EXPECT_TRUE(verify_inclusion(tree.leaf(v.a), v.a, v.b, hashes(v.proof), tree.root_at(v.b)));
  }
  EXPECT_EQ(tree.prove_inclusion(3, 8).size(), 3u);
}

TEST_F(ConsistencyTreeTest, SameSizeIsEmptyProof) {
  EXPECT_TRUE(tree.prove_consistency(5, 5).empty());
  EXPECT_TRUE(verify_consistency(5, 5, tree.root_at(5), tree.root_at(5), {}));
  EXPECT_THROW(tree.prove_consistency(3, 9), std::out_of_range);
  EXPECT_THROW(tree.prove_inclusion(8, 8), std::out_of_range);
}

// Naive recursive root over raw entries.
Hash naive_root(const std::vector<Bytes>& entries, size_t lo, size_t hi) {
  size_t n = hi - lo;
  if (n == 0) return sha256({});
  if (n == 1) return leaf_hash(entries[lo]);
  size_t k = 1;
  while (k * 2 < n) k *= 2;
  return node_hash(naive_root(entries, lo, lo + k), naive_root(entries, lo + k, hi));
}

TEST(ConsistencyProofTest, BruteForceAllSizes) {
  std::vector<Bytes> entries;
  ConsistencyTree t;
  for (int i = 0; i < 40; ++i) {
    entries.push_back(B("smh-" + std::to_string(i)));
    t.append(entries.back());
    ASSERT_EQ(t.root(), naive_root(entries, 0, entries.size()));
  }
  for (size_t a = 1; a <= 40; ++a) {
    for (size_t b = a; b <= 40; ++b) {
      auto proof = t.prove_consistency(a, b);
      ASSERT_TRUE(verify_consistency(a, b, naive_root(entries, 0, a), naive_root(entries, 0, b),
                                     proof));
      if (a < b) {
        ASSERT_FALSE(verify_consistency(a, b, naive_root(entries, 0, a),
                                        naive_root(entries, 0, b - 1), proof));
      }
    }
    for (size_t i = 0; i < a; ++i)
      ASSERT_TRUE(verify_inclusion(t.leaf(i), i, a, t.prove_inclusion(i, a), t.root_at(a)));
  }
}

TEST(ConsistencyProofTest, RewrittenHistoryIsDetected) {
  std::vector<Bytes> entries;
  for (int i = 0; i < 7; ++i) entries.push_back(B("head-" + std::to_string(i)));
  ConsistencyTree honest;
  for (auto& e : entries) honest.append(e);
  Hash old_root = honest.root_at(3);
  EXPECT_TRUE(verify_consistency(3, 7, old_root, honest.root(), honest.prove_consistency(3, 7)));

  entries[2] = B("rewritten");
  ConsistencyTree forked;
  for (auto& e : entries) forked.append(e);
  EXPECT_FALSE(verify_consistency(3, 7, old_root, forked.root(), forked.prove_consistency(3, 7)));
}

// Sorted-list tree -----------------------------------------------------------

TEST(SortedListTreeTest, FigureSevenAbsence) {
  SortedListTree t;
  for (const char* d : {"a.c.com", "b.c.com", "c.c.com", "d.c.com"}) t.update(d, B(d));
  EXPECT_TRUE(t.cycle_ok());
  SortedListProof p = t.prove("bb.c.com");
  EXPECT_EQ(p.leaf.d1, "b.c.com");
  EXPECT_EQ(p.leaf.d2, "c.c.com");
  EXPECT_TRUE(slt_verify(p, t.root(), "bb.c.com"));
  // The same leaf does not prove absence of a name outside the gap.
  EXPECT_FALSE(slt_verify(p, t.root(), "cc.c.com"));
  SortedListProof last = t.prove("zzz.com");
  EXPECT_EQ(last.leaf.d1, "d.c.com");
  EXPECT_EQ(last.leaf.d2, "");
  EXPECT_TRUE(slt_verify(last, t.root(), "zzz.com"));
  SortedListProof first = t.prove("0.com");
  EXPECT_EQ(first.leaf.d1, "");
  EXPECT_TRUE(slt_verify(first, t.root(), "0.com"));
}

TEST(SortedListTreeTest, EmptyTreeSentinel) {
  SortedListTree t;
  SortedListProof p = t.prove("example.com");
  EXPECT_EQ(p.leaf, SortedLeaf{});
  EXPECT_TRUE(p.path.empty());
  EXPECT_TRUE(slt_verify(p, t.root(), "example.com"));
  EXPECT_TRUE(t.cycle_ok());
}

TEST(SortedListTreeTest, PresenceProofShape) {
  SortedListTree t;
  Rng rng(8);
  std::vector<std::string> names;
  for (int i = 0; i < 1023; ++i) {
    names.push_back("n" + std::to_string(rng()) + ".com");
    t.update(names.back(), B("e"));
  }
  ASSERT_EQ(t.size(), 1024u);
  for (int i = 0; i < 50; ++i) {
    const std::string& n = names[rng() % names.size()];
    SortedListProof p = t.prove(n);
    EXPECT_TRUE(p.present());
    EXPECT_EQ(p.leaf.d1, n);
    EXPECT_EQ(p.path.size(), 10u);
    EXPECT_TRUE(slt_verify(p, t.root(), n));
    SortedListProof wrong = p;
    wrong.leaf.entry = B("forged");
    EXPECT_FALSE(slt_verify(wrong, t.root(), n));
  }
}

TEST(SortedListTreeTest, UpdateBoundAndCycleProperty) {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    SortedListTree t;
    std::vector<std::string> names;
    for (int i = 0; i < 1024; ++i) {
      names.push_back("d" + std::to_string(rng() % 100000) + ".org");
      t.update(names.back(), B("x"));
    }
    for (int op = 0; op < 500; ++op) {
      unsigned bound = 3 * unsigned(std::ceil(std::log2(double(t.size()))));
      unsigned changed;
      int kind = rng() % 3;
      if (kind == 0) {
        changed = t.update("d" + std::to_string(rng() % 100000) + ".org", B("y"));
      } else if (kind == 1) {
        changed = t.update(names[rng() % names.size()], std::nullopt);
      } else {
        changed = t.update(names[rng() % names.size()], B("z" + std::to_string(op)));
      }
      ASSERT_LE(changed, std::max(bound, 3u));
      ASSERT_TRUE(t.cycle_ok());
    }
    // Random absence and presence queries still verify.
    for (int q = 0; q < 50; ++q) {
      std::string n = "d" + std::to_string(rng() % 100000) + ".org";
      ASSERT_TRUE(slt_verify(t.prove(n), t.root(), n));
    }
  }
}

TEST(SortedListTreeTest, InsertIntoThousandLeafTreeWithinBound) {
  Rng rng(10);
  SortedListTree t;
  while (t.size() < 1024) t.update("k" + std::to_string(rng()) + ".net", B("v"));
  for (int i = 0; i < 200; ++i) {
    SortedListTree copy = t;
    EXPECT_LE(copy.update("k" + std::to_string(rng()) + ".net", B("v")), 30u);
  }
}

// Inflation ------------------------------------------------------------------

TEST(InflationTest, NoWorkNoInflation) {
  EXPECT_EQ(expected_proof_inflation(0, kSecondsPerYear, 1 << 20), 0.0);
}

TEST(InflationTest, OneYearAtOneGigahash) {
  double bytes = expected_proof_inflation(1e9, kSecondsPerYear, double(1 << 20));
  EXPECT_GE(bytes, 935.0);
  EXPECT_LE(bytes, 1265.0);
}

// Monte-Carlo estimate of the expected longest prefix shared by a target
// with any of m random values.
double monte_carlo_prefix(uint64_t m, int trials, Rng& rng) {
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    uint64_t target = rng();
    int best = 0;
    for (uint64_t i = 0; i < m; ++i) {
      uint64_t x = rng() ^ target;
      best = std::max(best, x ? std::countl_zero(x) : 64);
    }
    total += best;
  }
  return total / trials;
}

TEST(InflationTest, MatchesMonteCarloAtSmallM) {
  Rng rng(11);
  for (uint64_t m : {1, 2, 5, 16}) {
    double exact = expected_proof_inflation(1, double(m), 1);
    double mc = 32.0 * monte_carlo_prefix(m, 1000000 / int(m), rng);
    EXPECT_NEAR(mc, exact, 0.05 * exact) << "m=" << m;
  }
  EXPECT_NEAR(expected_proof_inflation(1, 1, 1), 32.0, 1e-9);
}

}  // namespace
}  // namespace fpki::merkle
