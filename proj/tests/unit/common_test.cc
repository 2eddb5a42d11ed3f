#include <random>

#include <gtest/gtest.h>

#include "fpki/common/crypto.h"
#include "fpki/common/tlv.h"

namespace fpki {
namespace {

TEST(Sha256Test, KnownDigests) {
  EXPECT_EQ(to_hex(sha256({})),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(sha256(as_bytes("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256Test, StreamingMatchesOneShot) {
  Bytes data = to_bytes("the quick brown fox jumps over the lazy dog");
  Sha256 h;
  h.update(ByteView(data).first(10)).update(ByteView(data).subspan(10));
  EXPECT_EQ(h.finish(), sha256(data));
}

TEST(HexTest, RoundTrip) {
  Bytes b{0x00, 0x7f, 0xff, 0x10};
  EXPECT_EQ(to_hex(b), "007fff10");
  EXPECT_EQ(from_hex("007FFF10"), b);
  EXPECT_THROW(from_hex("abc"), std::invalid_argument);
  EXPECT_THROW(from_hex("zz"), std::invalid_argument);
}

// RFC 8032 test 1.
TEST(Ed25519Test, Rfc8032Vector) {
  Bytes seed = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  Seed s;
  std::copy(seed.begin(), seed.end(), s.begin());
  KeyPair kp(s);
  EXPECT_EQ(to_hex(ByteView(kp.public_key())),
            "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  Bytes sig = kp.sign({});
  EXPECT_EQ(to_hex(sig),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155"
            "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  EXPECT_TRUE(verify_signature(kp.public_key(), {}, sig));
}

TEST(Ed25519Test, RejectsTampering) {
  KeyPair kp = KeyPair::from_u64(7);
  Bytes msg = to_bytes("hello");
  Bytes sig = kp.sign(msg);
  EXPECT_TRUE(verify_signature(kp.public_key(), msg, sig));
  msg[0] ^= 1;
  EXPECT_FALSE(verify_signature(kp.public_key(), msg, sig));
  msg[0] ^= 1;
  sig.pop_back();
  EXPECT_FALSE(verify_signature(kp.public_key(), msg, sig));
  EXPECT_FALSE(verify_signature(KeyPair::from_u64(8).public_key(), msg, kp.sign(msg)));
}

TEST(TlvTest, ElementLayout) {
  tlv::Writer w;
  w.bytes(to_bytes("ab"));
  w.integer(0x0102);
  w.list(std::vector<int>{}, [](tlv::Writer&, int) {});
  EXPECT_EQ(to_hex(w.data()),
            "01" "00000002" "6162"
            "02" "00000008" "0000000000000102"
            "03" "00000004" "00000000");
}

TEST(TlvTest, ReaderRejectsMalformedInput) {
  EXPECT_THROW(tlv::Reader(from_hex("0100000005aa")).bytes(), tlv::DecodeError);
  EXPECT_THROW(tlv::Reader(from_hex("020000000401020304")).integer(), tlv::DecodeError);
  EXPECT_THROW(tlv::Reader(from_hex("02000000080000000000000002")).boolean(),
               tlv::DecodeError);
  EXPECT_THROW(tlv::Reader(from_hex("0100000000")).integer(), tlv::DecodeError);
  Bytes trailing = from_hex("010000000001");
  tlv::Reader r(trailing);
  r.bytes();
  EXPECT_THROW(r.expect_end(), tlv::DecodeError);
}

TEST(TlvTest, NestedRoundTripProperty) {
  std::mt19937_64 rng(1);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Bytes> items(rng() % 6);
    for (auto& b : items) {
      b.resize(rng() % 40);
      for (auto& x : b) x = uint8_t(rng());
    }
    uint64_t n = rng();
    tlv::Writer w;
    size_t mark = w.open(tlv::Tag::kSnapshot);
    w.list(items, [](tlv::Writer& w, const Bytes& b) { w.bytes(b); });
    w.integer(n);
    w.close(mark);

    tlv::Reader r(w.data());
    tlv::Reader o = r.object(tlv::Tag::kSnapshot);
    EXPECT_EQ(o.read_list([](tlv::Reader& r) { return r.bytes(); }), items);
    EXPECT_EQ(o.integer(), n);
    o.expect_end();
    r.expect_end();
  }
}

}  // namespace
}  // namespace fpki
