#ifndef FPKI_NAMING_DOMAIN_NAME_H_
#define FPKI_NAMING_DOMAIN_NAME_H_

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpki::naming {

class NameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr size_t kMaxLabelLength = 63;
constexpr size_t kMaxNameLength = 253;

// A lowercase LDH domain name. Labels are stored root-most first, so
// "www.example.com" holds ["com", "example", "www"]. A leading "*." is
// stripped into the wildcard flag and never stored as a label.
//
// The default-constructed value is the empty name; parse() never produces it.
class DomainName {
 public:
  DomainName() = default;

  // Throws NameError on empty input, empty or malformed labels, overlong
  // names, or a '*' anywhere except a single leading "*." label.
  static DomainName parse(std::string_view raw);
  static std::optional<DomainName> try_parse(std::string_view raw);

  // Builds a name from root-most-first labels. Labels are validated.
  static DomainName from_labels(std::vector<std::string> labels,
                                bool wildcard = false);

  const std::vector<std::string>& labels() const { return labels_; }
  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  bool is_wildcard() const { return wildcard_; }

  // Presentation form, e.g. "*.example.com".
  const std::string& str() const { return text_; }

  // Same labels with the wildcard flag cleared.
  DomainName base() const;
  // Same labels with the wildcard flag set.
  DomainName as_wildcard() const;
  // Drops the leaf-most label (and the wildcard flag). Empty stays empty.
  DomainName parent() const;
  DomainName child(std::string_view label) const;
  const std::string& leaf_label() const { return labels_.back(); }

  // True iff this name equals |ancestor| or lies below it (labels only).
  bool is_within(const DomainName& ancestor) const;
  // True iff this name lies strictly below |ancestor|.
  bool is_below(const DomainName& ancestor) const {
    return size() > ancestor.size() && is_within(ancestor);
  }

  friend bool operator==(const DomainName& a, const DomainName& b) {
    return a.text_ == b.text_;
  }
  // Byte-wise order of the presentation form.
  friend std::strong_ordering operator<=>(const DomainName& a,
                                          const DomainName& b) {
    return a.text_.compare(b.text_) <=> 0;
  }

 private:
  DomainName(std::vector<std::string> labels, bool wildcard);

  std::vector<std::string> labels_;
  bool wildcard_ = false;
  std::string text_;
};

bool is_valid_label(std::string_view label);

// Single-label wildcard semantics by default: "*.example.com" matches
// "www.example.com" but neither "example.com" nor "a.b.example.com".
enum class WildcardSemantics {
  kSingleLabel,
  // Additionally matches the base name itself.
  kIncludeBase,
};

// Throws std::invalid_argument if |pattern| is not a wildcard name.
bool wildcard_matches(const DomainName& pattern, const DomainName& name,
                      WildcardSemantics semantics = WildcardSemantics::kSingleLabel);

// True iff |certified| (a certificate name, possibly wildcard) covers |name|.
bool name_matches(const DomainName& certified, const DomainName& name);

}  // namespace fpki::naming

#endif  // FPKI_NAMING_DOMAIN_NAME_H_
