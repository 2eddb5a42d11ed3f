#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fpki/certmodel/certificate.h"
#include "fpki/certmodel/policy.h"
#include "fpki/certmodel/revocation.h"
#include "fpki/certmodel/test_ca.h"
#include "fpki/certmodel/trust_config.h"
#include "generators.h"

namespace fpki::cert {
namespace {

using naming::DomainName;

constexpr int64_t kDay = 86400;

TEST(EncodingTest, EmptySanIsZeroLengthList) {
  Certificate c;
  c.subject_cn = DomainName::parse("example.com");
  c.validity = {0, 10};
  Bytes enc = encode(c);
  // 0x10 header, then the CN optional, then the SAN list with count 0.
  tlv::Reader r(enc);
  tlv::Reader body = r.object(tlv::Tag::kCertificate);
  body.raw_element();
  ByteView san = body.raw_element();
  EXPECT_EQ(to_hex(san), "030000000400000000");
}

TEST(EncodingTest, Deterministic) {
  testgen::Rng rng(11);
  Certificate c = testgen::random_certificate(rng);
  EXPECT_EQ(encode(c), encode(Certificate(c)));
}

TEST(EncodingTest, RandomCertificatesRoundTrip) {
  testgen::Rng rng(12);
  std::set<Bytes> seen;
  for (int i = 0; i < 1000; ++i) {
    Certificate c = testgen::random_certificate(rng);
    Bytes enc = encode(c);
    EXPECT_EQ(decode_certificate(enc), c);
    seen.insert(enc);
  }
  // Injective on the corpus.
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(EncodingTest, PolicyAndRevocationRoundTrip) {
  testgen::Rng rng(13);
  std::vector<KeyId> universe{testgen::random_hash(rng), testgen::random_hash(rng),
                              testgen::random_hash(rng)};
  for (int i = 0; i < 300; ++i) {
    DomainPolicy p = testgen::random_policy(rng, universe);
    EXPECT_EQ(decode_policy(encode(p)), p);
  }
  RevocationMessage r = make_revocation(testgen::random_certificate(rng),
                                        RevocationScope::kPolicyOnly, KeyPair::from_u64(1));
  EXPECT_EQ(decode_revocation(encode(r)), r);
}

TEST(EncodingTest, RejectsCorruption) {
  testgen::Rng rng(14);
  Certificate c = testgen::random_certificate(rng);
  Bytes enc = encode(c);
  Bytes truncated(enc.begin(), enc.end() - 1);
  EXPECT_THROW(decode_certificate(truncated), tlv::DecodeError);
  Bytes extra = enc;
  extra.push_back(0);
  EXPECT_THROW(decode_certificate(extra), tlv::DecodeError);
  Bytes wrong_tag = enc;
  wrong_tag[0] = 0x11;
  EXPECT_THROW(decode_certificate(wrong_tag), tlv::DecodeError);
}

// Frozen bytes for a fixed certificate; see docs/encoding.md. The expected
// hex was produced by a separate byte-level script, not by this encoder.
TEST(EncodingTest, GoldenCertificate) {
  Certificate c;
  c.subject_cn = DomainName::parse("example.com");
  c.san = {DomainName::parse("www.example.com")};
  c.subject_key.fill(0x11);
  c.issuer_key_id.fill(0x22);
  c.validity = {1000, 2000};
  c.serial = 7;
  c.signature.assign(64, 0x33);
  Bytes enc = encode(c);
  EXPECT_EQ(enc.size(), 294u);
  EXPECT_EQ(to_hex(c.hash()),
            "eb9d12a669e7213f4bac3de56ecbd2d9cebafd264cb281c42721c8efce691693");
  EXPECT_EQ(to_hex(ByteView(enc).first(40)),
            "1000000121030000001400000001010000000b6578616d706c652e636f6d"
            "03000000180000000101");
  // The signed part is the same element minus the trailing signature field.
  EXPECT_EQ(c.tbs_bytes().size(), enc.size() - (5 + 64));
}

class LegacyValidateTest : public ::testing::Test {
 protected:
  CertificateAuthority root = CertificateAuthority::root(100);
  std::vector<Certificate> store{root.certificate()};
};

TEST_F(LegacyValidateTest, DirectlyIssuedLeaf) {
  Certificate c = root.issue({.names = {"example.com"}, .validity = {0, 100 * kDay}});
  EXPECT_TRUE(legacy_validate(c, {}, store, 50 * kDay));
}

TEST_F(LegacyValidateTest, Expired) {
  Certificate c = root.issue({.names = {"example.com"}, .validity = {0, 100 * kDay}});
  EXPECT_FALSE(legacy_validate(c, {}, store, 101 * kDay));
  EXPECT_FALSE(legacy_validate(c, {}, store, -1));
}

TEST_F(LegacyValidateTest, UnknownSigner) {
  CertificateAuthority rogue = CertificateAuthority::root(101);
  Certificate c = rogue.issue({.names = {"example.com"}});
  EXPECT_FALSE(legacy_validate(c, {}, store, 10));
  EXPECT_FALSE(legacy_validate(c, rogue.chain(), store, 10));
  // Rogue root passed in the chain does not help either.
  std::vector<Certificate> chain{rogue.certificate()};
  EXPECT_FALSE(legacy_validate(c, chain, store, 10));
}

TEST_F(LegacyValidateTest, IntermediateChain) {
  CertificateAuthority inter = root.intermediate(102);
  ChainedCertificate c = inter.issue_chained({.names = {"a.example.com"}});
  EXPECT_TRUE(legacy_validate(c, store, 10));
  EXPECT_EQ(c.root_key_id(), root.key_id());
  // Missing intermediate.
  EXPECT_FALSE(legacy_validate(c.leaf, {}, store, 10));
  // Root included at the end of the chain is accepted.
  std::vector<Certificate> with_root = c.chain;
  with_root.push_back(root.certificate());
  EXPECT_TRUE(legacy_validate(c.leaf, with_root, store, 10));
  // Anything after the root is malformed.
  with_root.push_back(inter.certificate());
  EXPECT_FALSE(legacy_validate(c.leaf, with_root, store, 10));
}

TEST_F(LegacyValidateTest, IssuanceRealmAndCaFlag) {
  CertificateAuthority inter = root.intermediate(103, NameRealm::of({".example.com"}));
  EXPECT_TRUE(legacy_validate(inter.issue_chained({.names = {"x.example.com"}}), store, 10));
  EXPECT_FALSE(legacy_validate(inter.issue_chained({.names = {"x.example.org"}}), store, 10));

  // A leaf cannot act as an issuer.
  Certificate leaf = root.issue({.names = {"example.com"}, .subject = KeyPair::from_u64(104)});
  Certificate grandchild;
  grandchild.subject_cn = DomainName::parse("evil.example.com");
  grandchild.validity = {0, 100};
  grandchild.subject_key = KeyPair::from_u64(105).public_key();
  grandchild.issuer_key_id = leaf.subject_key_id();
  grandchild.signature = KeyPair::from_u64(104).sign(grandchild.tbs_bytes());
  std::vector<Certificate> chain{leaf};
  EXPECT_FALSE(legacy_validate(grandchild, chain, store, 10));
}

TEST_F(LegacyValidateTest, TamperedSignature) {
  Certificate c = root.issue({.names = {"example.com"}});
  c.san.push_back(DomainName::parse("evil.com"));
  EXPECT_FALSE(legacy_validate(c, {}, store, 10));
}

TEST(RevocationTest, IssuingCaRevokesCertificate) {
  CertificateAuthority root = CertificateAuthority::root(200);
  CertificateAuthority inter = root.intermediate(201);
  ChainedCertificate c = inter.issue_chained({.names = {"example.com"}});
  std::vector<Certificate> store{root.certificate()};
  EXPECT_EQ(revocation_applies(inter.revoke(c.leaf), c.leaf, c.chain),
            RevocationEffect::kRevokesCertificate);
  EXPECT_EQ(revocation_applies(root.revoke(c.leaf), c.leaf, c.chain, store),
            RevocationEffect::kRevokesCertificate);
  // Root not in chain and no trust store: not on the known path.
  EXPECT_EQ(revocation_applies(root.revoke(c.leaf), c.leaf, c.chain), RevocationEffect::kNo);
}

TEST(RevocationTest, HashBinding) {
  CertificateAuthority root = CertificateAuthority::root(210);
  Certificate a = root.issue({.names = {"a.com"}});
  Certificate b = root.issue({.names = {"b.com"}});
  EXPECT_EQ(revocation_applies(root.revoke(a), b, {}), RevocationEffect::kNo);
}

TEST(RevocationTest, OwnerRevokesPolicyOnly) {
  CertificateAuthority root = CertificateAuthority::root(220);
  KeyPair owner = KeyPair::from_u64(221);
  Certificate c = root.issue({.names = {"example.com"}, .subject = owner});
  RevocationMessage r = make_revocation(c, RevocationScope::kPolicyOnly, owner);
  EXPECT_EQ(revocation_applies(r, c, {}), RevocationEffect::kRevokesPolicyOnly);
}

TEST(RevocationTest, UnrelatedKeyNeverRevokes) {
  testgen::Rng rng(230);
  CertificateAuthority root = CertificateAuthority::root(231);
  CertificateAuthority inter = root.intermediate(232);
  std::vector<Certificate> store{root.certificate()};
  for (int i = 0; i < 100; ++i) {
    ChainedCertificate c = inter.issue_chained({.names = {testgen::random_name(rng).str()}});
    KeyPair stranger = KeyPair::from_u64(1000 + i);
    for (auto scope : {RevocationScope::kCertificate, RevocationScope::kPolicyOnly}) {
      RevocationMessage r = make_revocation(c.leaf, scope, stranger);
      EXPECT_EQ(revocation_applies(r, c.leaf, c.chain, store), RevocationEffect::kNo);
      // Claiming a legitimate signer id does not help.
      r.signer_key_id = inter.key_id();
      EXPECT_EQ(revocation_applies(r, c.leaf, c.chain, store), RevocationEffect::kNo);
    }
  }
}

// Fold -------------------------------------------------------------------

DomainPolicy only_wildcard(bool v) {
  DomainPolicy p;
  p.wildcard_forbidden.value = v;
  return p;
}

TEST(FoldTest, PaperExamples) {
  DomainPolicy base = DomainPolicy::permissive();
  std::vector<PolicyContribution> c{{only_wildcard(true), AttributeMask::all()}};
  EXPECT_TRUE(*fold_policies(base, c).wildcard_forbidden.value);

  DomainPolicy a, b;
  a.max_lifetime.value = 7776000;
  b.max_lifetime.value = 2592000;
  std::vector<PolicyContribution> lifetimes{{a, AttributeMask::all()}, {b, AttributeMask::all()}};
  EXPECT_EQ(*fold_policies(base, lifetimes).max_lifetime.value, 2592000u);

  KeyId A = sha256(as_bytes("A")), B = sha256(as_bytes("B")), C = sha256(as_bytes("C"));
  DomainPolicy x, y;
  x.issuers.value = KeySet{A, B};
  y.issuers.value = KeySet{B, C};
  std::vector<PolicyContribution> sets{{x, AttributeMask::all()}, {y, AttributeMask::all()}};
  EXPECT_EQ(*fold_policies(base, sets).issuers.value, (KeySet{B}));
}

TEST(FoldTest, MaskAndAbsentAttributesAreSkipped) {
  DomainPolicy base = DomainPolicy::permissive();
  DomainPolicy p;
  p.max_lifetime.value = 10;
  std::vector<PolicyContribution> masked{{p, AttributeMask().set(Attribute::kIssuers)}};
  EXPECT_EQ(fold_policies(base, masked), base);
  std::vector<PolicyContribution> empty{{DomainPolicy(), AttributeMask::all()}};
  EXPECT_EQ(fold_policies(base, empty), base);
  EXPECT_THROW(fold_policies(DomainPolicy(), empty), std::invalid_argument);
}

class FoldPropertyTest : public ::testing::Test {
 protected:
  testgen::Rng rng{300};
  std::vector<KeyId> universe{sha256(as_bytes("k1")), sha256(as_bytes("k2")),
                              sha256(as_bytes("k3")), sha256(as_bytes("k4"))};

  PolicyContribution random_contribution() {
    AttributeMask m;
    for (Attribute a : kAllAttributes) m.set(a, rng() % 4 != 0);
    return {testgen::random_policy(rng, universe), m};
  }
  DomainPolicy random_base() {
    DomainPolicy base = DomainPolicy::permissive();
    std::vector<PolicyContribution> c{{testgen::random_policy(rng, universe),
                                       AttributeMask::all()}};
    return fold_policies(base, c);
  }
};

TEST_F(FoldPropertyTest, CommutativeAndAssociative) {
  for (int i = 0; i < 500; ++i) {
    DomainPolicy base = random_base();
    std::vector<PolicyContribution> c(1 + rng() % 5);
    for (auto& x : c) x = random_contribution();
    DomainPolicy expected = fold_policies(base, c);
    std::shuffle(c.begin(), c.end(), rng);
    EXPECT_EQ(fold_policies(base, c), expected);
    // Fold in two halves.
    size_t cut = rng() % (c.size() + 1);
    DomainPolicy left = fold_policies(base, std::span(c).first(cut));
    EXPECT_EQ(fold_policies(left, std::span(c).subspan(cut)), expected);
  }
}

TEST_F(FoldPropertyTest, IdempotentAndRestrictive) {
  for (int i = 0; i < 500; ++i) {
    DomainPolicy base = random_base();
    std::vector<PolicyContribution> once{random_contribution()};
    DomainPolicy r1 = fold_policies(base, once);
    EXPECT_EQ(fold_policies(r1, once), r1);
    std::vector<PolicyContribution> full{{r1, AttributeMask::all()}};
    EXPECT_EQ(fold_policies(r1, full), r1);

    const PolicyContribution& c = once[0];
    if (c.applies.test(Attribute::kIssuers) && c.policy.issuers.present()) {
      EXPECT_TRUE(r1.issuers.value->subset_of(*c.policy.issuers.value));
    }
    if (c.applies.test(Attribute::kSubdomains) && c.policy.subdomains.present()) {
      EXPECT_EQ(r1.subdomains.value->intersect(*c.policy.subdomains.value),
                *r1.subdomains.value);
    }
    if (c.applies.test(Attribute::kWildcardForbidden) && c.policy.wildcard_forbidden.present()) {
      EXPECT_TRUE(!*c.policy.wildcard_forbidden.value || *r1.wildcard_forbidden.value);
    }
    if (c.applies.test(Attribute::kMaxLifetime) && c.policy.max_lifetime.present()) {
      EXPECT_LE(*r1.max_lifetime.value, *c.policy.max_lifetime.value);
    }
    // Also no looser than the base.
    EXPECT_TRUE(r1.issuers.value->subset_of(*base.issuers.value));
    EXPECT_LE(*r1.max_lifetime.value, *base.max_lifetime.value);
  }
}

TEST(PolicyTextTest, ParseAndPrint) {
  std::map<std::string, KeyId> keys{{"ca1", sha256(as_bytes("ca1"))},
                                    {"ca2", sha256(as_bytes("ca2"))}};
  auto resolve = [&](std::string_view s) { return keys.at(std::string(s)); };
  DomainPolicy p = parse_policy(
      "issuers=ca1,ca2 subdomains=www.example.com,*.dev.example.com "
      "wildcard-forbidden=true max-lifetime=7776000 inherit=issuers,subdomains",
      resolve);
  EXPECT_EQ(*p.issuers.value, (KeySet{keys["ca1"], keys["ca2"]}));
  EXPECT_TRUE(p.issuers.inherited);
  EXPECT_TRUE(p.subdomains.inherited);
  EXPECT_FALSE(p.max_lifetime.inherited);
  EXPECT_TRUE(p.subdomains.value->covers(DomainName::parse("x.dev.example.com")));
  EXPECT_EQ(*p.max_lifetime.value, 7776000u);

  DomainPolicy reparsed = parse_policy(to_string(p), [](std::string_view s) {
    return hash_from_hex(s);
  });
  EXPECT_EQ(reparsed, p);
  EXPECT_THROW(parse_policy("colour=blue", resolve), std::invalid_argument);
  EXPECT_THROW(parse_policy("wildcard-forbidden=maybe", resolve), std::invalid_argument);
}

TEST(TrustConfigTest, FunctionAndJsonRoundTrip) {
  CertificateAuthority r1 = CertificateAuthority::root(400);
  KeyId A = sha256(as_bytes("A")), B = sha256(as_bytes("B"));
  TrustConfig c;
  c.quorum = 2;
  c.trust_store = {r1.certificate()};
  c.servers["m1"] = MapServerDescriptor{"m1", {A}, 1.0, KeyPair::from_u64(9).public_key(), ""};
  c.servers["m2"] = MapServerDescriptor{"m2", {A, B}, 2.5, KeyPair::from_u64(10).public_key(),
                                        "127.0.0.1:5300"};
  c.tuples.push_back({NameRealm::all(), {A}, {"m1"}});
  c.tuples.push_back({NameRealm::of({".bank.com"}), {B}, {"m2"}});
  c.browser_policy.max_lifetime.value = 398 * kDay;

  EXPECT_EQ(c.f(DomainName::parse("example.com")), (std::set<KeyId>{A}));
  EXPECT_EQ(c.f(DomainName::parse("www.bank.com")), (std::set<KeyId>{A, B}));
  EXPECT_EQ(c.servers_for(DomainName::parse("bank.com")), (std::set<std::string>{"m1", "m2"}));

  TrustConfig back = parse_trust_config(dump_trust_config(c));
  EXPECT_EQ(back.quorum, 2u);
  EXPECT_EQ(back.trust_store, c.trust_store);
  EXPECT_EQ(back.browser_policy, c.browser_policy);
  EXPECT_EQ(back.servers.at("m2").supported, c.servers.at("m2").supported);
  EXPECT_EQ(back.servers.at("m2").key, c.servers.at("m2").key);
  EXPECT_EQ(back.servers.at("m2").address, "127.0.0.1:5300");
  EXPECT_EQ(back.f(DomainName::parse("www.bank.com")), c.f(DomainName::parse("www.bank.com")));

  EXPECT_THROW(parse_trust_config(R"({"quorum": 0})"), std::invalid_argument);
  EXPECT_THROW(parse_trust_config(R"({"tuples": [{"servers": ["nope"]}]})"),
               std::invalid_argument);
  EXPECT_THROW(parse_trust_config("not json"), std::invalid_argument);
}

}  // namespace
}  // namespace fpki::cert
