#include "fpki/common/tlv.h"

#include <cstring>

namespace fpki::tlv {

namespace {

void put_u32(Bytes& out, uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 |
         uint32_t(p[3]);
}

}  // namespace

void Writer::bytes(ByteView data) {
  out_.push_back(uint8_t(Tag::kBytes));
  put_u32(out_, static_cast<uint32_t>(data.size()));
  append(out_, data);
}

void Writer::integer(uint64_t value) {
  out_.push_back(uint8_t(Tag::kInteger));
  put_u32(out_, 8);
  for (int i = 7; i >= 0; --i) out_.push_back(uint8_t(value >> (8 * i)));
}

size_t Writer::open(Tag tag) {
  out_.push_back(uint8_t(tag));
  size_t mark = out_.size();
  put_u32(out_, 0);
  return mark;
}

void Writer::close(size_t mark) {
  uint32_t len = static_cast<uint32_t>(out_.size() - mark - 4);
  for (int i = 0; i < 4; ++i) out_[mark + i] = uint8_t(len >> (8 * (3 - i)));
}

size_t Writer::open_list(uint32_t count) {
  size_t mark = open(Tag::kList);
  put_u32(out_, count);
  return mark;
}

ByteView Reader::header(Tag tag) {
  if (data_.size() - pos_ < 5) throw DecodeError("truncated element header");
  if (data_[pos_] != uint8_t(tag))
    throw DecodeError("unexpected tag " + std::to_string(data_[pos_]) +
                      ", wanted " + std::to_string(uint8_t(tag)));
  uint32_t len = get_u32(&data_[pos_ + 1]);
  pos_ += 5;
  if (data_.size() - pos_ < len) throw DecodeError("truncated element payload");
  ByteView payload = data_.subspan(pos_, len);
  pos_ += len;
  return payload;
}

Bytes Reader::bytes() {
  ByteView p = header(Tag::kBytes);
  return Bytes(p.begin(), p.end());
}

std::string Reader::string() {
  ByteView p = header(Tag::kBytes);
  return std::string(p.begin(), p.end());
}

Hash Reader::hash() {
  ByteView p = header(Tag::kBytes);
  if (p.size() != 32) throw DecodeError("expected 32-byte hash");
  Hash h;
  std::memcpy(h.data(), p.data(), 32);
  return h;
}

uint64_t Reader::integer() {
  ByteView p = header(Tag::kInteger);
  if (p.size() != 8) throw DecodeError("integer must be 8 bytes");
  uint64_t v = 0;
  for (uint8_t b : p) v = v << 8 | b;
  return v;
}

bool Reader::boolean() {
  uint64_t v = integer();
  if (v > 1) throw DecodeError("boolean out of range");
  return v == 1;
}

Reader Reader::object(Tag tag) { return Reader(header(tag)); }

Reader Reader::list(uint32_t& count) {
  ByteView p = header(Tag::kList);
  if (p.size() < 4) throw DecodeError("list without count");
  count = get_u32(p.data());
  return Reader(p.subspan(4));
}

Tag Reader::peek_tag() const {
  if (at_end()) throw DecodeError("no element to peek");
  return static_cast<Tag>(data_[pos_]);
}

ByteView Reader::raw_element() {
  size_t start = pos_;
  header(peek_tag());
  return data_.subspan(start, pos_ - start);
}

void Reader::expect_end() const {
  if (!at_end()) throw DecodeError("trailing bytes after element");
}

}  // namespace fpki::tlv
