#include <random>

#include <gtest/gtest.h>

#include "fpki/naming/domain_name.h"
#include "fpki/naming/name_realm.h"
#include "fpki/naming/public_suffix_list.h"

namespace fpki::naming {
namespace {

DomainName N(std::string_view s) { return DomainName::parse(s); }

TEST(DomainNameTest, ParseNormalizes) {
  DomainName n = N("www.Example.COM");
  EXPECT_EQ(n.labels(), (std::vector<std::string>{"com", "example", "www"}));
  EXPECT_FALSE(n.is_wildcard());
  EXPECT_EQ(n.str(), "www.example.com");
  EXPECT_EQ(N("example.com.").str(), "example.com");
}

TEST(DomainNameTest, Wildcard) {
  DomainName n = N("*.example.com");
  EXPECT_EQ(n.labels(), (std::vector<std::string>{"com", "example"}));
  EXPECT_TRUE(n.is_wildcard());
  EXPECT_EQ(n.str(), "*.example.com");
  EXPECT_EQ(n.base(), N("example.com"));
}

TEST(DomainNameTest, RejectsMalformed) {
  for (const char* bad : {"a..com", "", ".", "-a.com", "a-.com", "a.*.com", "*.*.com",
                          "a_b.com", "*", "www.exa mple.com"})
    EXPECT_THROW(N(bad), NameError) << bad;
  EXPECT_THROW(N(std::string(64, 'a') + ".com"), NameError);
  std::string long_name;
  for (int i = 0; i < 51; ++i) long_name += "abcd.";
  long_name += "com";
  EXPECT_THROW(N(long_name), NameError);
  EXPECT_NO_THROW(N(std::string(63, 'a') + ".com"));
}

TEST(DomainNameTest, RoundTripProperty) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-";
  for (int i = 0; i < 1000; ++i) {
    std::string s = (rng() % 4 == 0) ? "*." : "";
    int labels = 1 + rng() % 5;
    for (int l = 0; l < labels; ++l) {
      int len = 1 + rng() % 12;
      std::string label;
      for (int k = 0; k < len; ++k) label += alphabet[rng() % (k == 0 || k == len - 1 ? 36 : 37)];
      s += label + (l + 1 < labels ? "." : "");
    }
    DomainName n = N(s);
    EXPECT_EQ(N(n.str()), n);
    EXPECT_EQ(n.str(), s);
  }
}

TEST(WildcardTest, SingleLabel) {
  EXPECT_TRUE(wildcard_matches(N("*.example.com"), N("www.example.com")));
  EXPECT_FALSE(wildcard_matches(N("*.example.com"), N("a.b.example.com")));
  EXPECT_TRUE(wildcard_matches(N("*.sub.example.com"), N("x.sub.example.com")));
  EXPECT_FALSE(wildcard_matches(N("*.example.com"), N("example.com")));
  EXPECT_TRUE(wildcard_matches(N("*.example.com"), N("example.com"),
                               WildcardSemantics::kIncludeBase));
  EXPECT_THROW(wildcard_matches(N("example.com"), N("www.example.com")),
               std::invalid_argument);
}

class ClassifyTest : public ::testing::Test {
 protected:
  PublicSuffixList psl = PublicSuffixList::builtin();
};

TEST_F(ClassifyTest, E2ldAndSubdomain) {
  EXPECT_TRUE(is_e2ld(classify(N("u-tokyo.ac.jp"), psl)));
  EXPECT_TRUE(is_e2ld(classify(N("example.com"), psl)));
  NameClass c = classify(N("a.b.example.com"), psl);
  ASSERT_TRUE(std::holds_alternative<Subdomain>(c));
  EXPECT_EQ(std::get<Subdomain>(c).e2ld, N("example.com"));
  EXPECT_EQ(std::get<Subdomain>(c).chain, (std::vector<std::string>{"b", "a"}));
}

TEST_F(ClassifyTest, PublicSuffixOrInvalid) {
  for (const char* s : {"ac.jp", "com", "co.uk", "test.invalid", "invalid", "jp",
                        "example.unknowntld", "uk"})
    EXPECT_FALSE(is_valid_class(classify(N(s), psl))) << s;
}

TEST_F(ClassifyTest, CustomListWithPrivateSuffix) {
  PublicSuffixList custom = PublicSuffixList::parse(
      "// comment\ncom\nuk\nco.uk\nblogspot.co.uk\n*.kawasaki.jp\n!city.kawasaki.jp\njp\n");
  EXPECT_TRUE(is_e2ld(classify(N("example.blogspot.co.uk"), custom)));
  EXPECT_FALSE(is_valid_class(classify(N("blogspot.co.uk"), custom)));
  EXPECT_FALSE(is_valid_class(classify(N("foo.kawasaki.jp"), custom)));
  EXPECT_TRUE(is_e2ld(classify(N("bar.foo.kawasaki.jp"), custom)));
  EXPECT_TRUE(is_e2ld(classify(N("city.kawasaki.jp"), custom)));
}

TEST_F(ClassifyTest, PartitionProperty) {
  std::mt19937_64 rng(5);
  const char* tails[] = {"com", "co.uk", "ac.jp", "uk", "invalid", "gov"};
  for (int i = 0; i < 500; ++i) {
    std::string s = tails[rng() % 6];
    int extra = rng() % 4;
    for (int k = 0; k < extra; ++k) s = "l" + std::to_string(rng() % 7) + "." + s;
    NameClass c = classify(N(s), psl);
    if (auto* sub = std::get_if<Subdomain>(&c)) {
      EXPECT_TRUE(is_e2ld(classify(sub->e2ld, psl)));
      EXPECT_EQ(sub->e2ld.size() + sub->chain.size(), N(s).size());
    }
  }
}

TEST(NameRealmTest, CoversAndIntersect) {
  NameRealm r = NameRealm::of({"www.example.com", "*.dev.example.com"});
  EXPECT_TRUE(r.covers(N("www.example.com")));
  EXPECT_TRUE(r.covers(N("a.dev.example.com")));
  EXPECT_FALSE(r.covers(N("a.b.dev.example.com")));
  EXPECT_FALSE(r.covers(N("example.com")));

  NameRealm sub = NameRealm::of({".example.com"});
  EXPECT_TRUE(sub.covers(N("example.com")));
  EXPECT_TRUE(sub.covers(N("x.y.example.com")));
  EXPECT_EQ(sub.intersect(r), r);
  EXPECT_EQ(NameRealm::all().intersect(r), r);
  EXPECT_TRUE(NameRealm::of({"a.com"}).intersect(NameRealm::of({"b.com"})).empty());
  EXPECT_EQ(NameRealm::of({"*.example.com"}).intersect(NameRealm::of({".x.example.com"})),
            NameRealm::of({"x.example.com"}));
}

TEST(NameRealmTest, ParseAndCanonicalForm) {
  EXPECT_TRUE(NameRealm::parse("*").is_all());
  EXPECT_TRUE(NameRealm::parse("{}").empty());
  NameRealm r = NameRealm::parse("{a.example.com, .example.com}");
  EXPECT_EQ(r.str(), "{.example.com}");
}

}  // namespace
}  // namespace fpki::naming
