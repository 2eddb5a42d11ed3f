#ifndef FPKI_COMMON_TLV_H_
#define FPKI_COMMON_TLV_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpki/common/bytes.h"

namespace fpki::tlv {

// Every element is: tag (1 byte) | length (4 bytes, big-endian) | payload.
// Lists carry a 4-byte big-endian item count at the start of the payload.
// See docs/encoding.md for the per-object field layouts.
enum class Tag : uint8_t {
  kBytes = 0x01,
  kInteger = 0x02,
  kList = 0x03,
  kCertificate = 0x10,
  kDomainPolicy = 0x11,
  kRevocation = 0x12,
  kMapEntry = 0x13,
  kSignedMapHead = 0x14,
  kChainedCertificate = 0x15,
  kProofBundle = 0x16,
  kCompressedProof = 0x17,
  kRevisionDelta = 0x18,
  kSnapshot = 0x19,
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Writer {
 public:
  void bytes(ByteView data);
  void string(std::string_view s) { bytes(as_bytes(s)); }
  void hash(const Hash& h) { bytes(ByteView(h)); }
  void integer(uint64_t value);
  void boolean(bool value) { integer(value ? 1 : 0); }

  // open_* write a placeholder length; close patches it.
  size_t open(Tag tag);
  void close(size_t mark);
  size_t open_list(uint32_t count);
  void close_list(size_t mark) { close(mark); }

  // Append a pre-encoded element verbatim.
  void raw(ByteView encoded) { append(out_, encoded); }

  template <typename Range, typename Fn>
  void list(const Range& items, Fn&& encode_item) {
    size_t mark = open_list(static_cast<uint32_t>(std::size(items)));
    for (const auto& item : items) encode_item(*this, item);
    close_list(mark);
  }

  template <typename T, typename Fn>
  void optional(const std::optional<T>& value, Fn&& encode_item) {
    size_t mark = open_list(value ? 1 : 0);
    if (value) encode_item(*this, *value);
    close_list(mark);
  }

  const Bytes& data() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  Bytes bytes();
  std::string string();
  Hash hash();
  uint64_t integer();
  bool boolean();

  // Returns a reader over the payload of the next element, which must carry
  // |tag|.
  Reader object(Tag tag);
  // Returns a reader over the list items and stores the item count.
  Reader list(uint32_t& count);

  template <typename Fn>
  auto read_list(Fn&& decode_item) {
    uint32_t count = 0;
    Reader items = list(count);
    std::vector<decltype(decode_item(items))> out;
    out.reserve(std::min<uint32_t>(count, 4096));
    for (uint32_t i = 0; i < count; ++i) out.push_back(decode_item(items));
    items.expect_end();
    return out;
  }

  template <typename Fn>
  auto read_optional(Fn&& decode_item) {
    uint32_t count = 0;
    Reader items = list(count);
    std::optional<decltype(decode_item(items))> out;
    if (count > 1) throw DecodeError("optional field with more than one item");
    if (count == 1) out = decode_item(items);
    items.expect_end();
    return out;
  }

  // Tag of the next element without consuming it.
  Tag peek_tag() const;
  // Next complete element (header included), consumed.
  ByteView raw_element();

  bool at_end() const { return pos_ == data_.size(); }
  void expect_end() const;

 private:
  ByteView header(Tag tag);

  ByteView data_;
  size_t pos_ = 0;
};

}  // namespace fpki::tlv

#endif  // FPKI_COMMON_TLV_H_
