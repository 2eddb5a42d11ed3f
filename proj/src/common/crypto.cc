#include "fpki/common/crypto.h"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

namespace fpki {

namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<uint8_t>(hi << 4 | lo);
  }
  return out;
}

Hash hash_from_hex(std::string_view hex) {
  Bytes b = from_hex(hex);
  if (b.size() != 32) throw std::invalid_argument("expected 32-byte hex value");
  Hash h;
  std::memcpy(h.data(), b.data(), 32);
  return h;
}

Hash sha256(ByteView data) {
  Hash out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

struct Sha256::Impl {
  MdCtxPtr ctx{EVP_MD_CTX_new()};
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  if (!impl_->ctx ||
      EVP_DigestInit_ex(impl_->ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 init failed");
}
Sha256::~Sha256() = default;

Sha256& Sha256::update(ByteView data) {
  EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size());
  return *this;
}

Hash Sha256::finish() {
  Hash out;
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len);
  return out;
}

KeyId key_id(const PublicKey& key) { return sha256(key); }

KeyPair::KeyPair(const Seed& seed) : seed_(seed) {
  PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                            seed_.data(), seed_.size()));
  if (!pkey) throw std::runtime_error("ed25519 key derivation failed");
  size_t len = public_key_.size();
  if (EVP_PKEY_get_raw_public_key(pkey.get(), public_key_.data(), &len) != 1 ||
      len != public_key_.size())
    throw std::runtime_error("ed25519 public key export failed");
}

KeyPair KeyPair::from_u64(uint64_t seed) {
  Bytes material = to_bytes("fpki-test-key");
  for (int i = 7; i >= 0; --i) material.push_back(uint8_t(seed >> (8 * i)));
  return KeyPair(sha256(material));
}

Bytes KeyPair::sign(ByteView message) const {
  PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                            seed_.data(), seed_.size()));
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!pkey || !ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1)
    throw std::runtime_error("ed25519 sign init failed");
  Bytes sig(kSignatureSize);
  size_t len = sig.size();
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                     message.size()) != 1 ||
      len != kSignatureSize)
    throw std::runtime_error("ed25519 signing failed");
  return sig;
}

bool verify_signature(const PublicKey& key, ByteView message,
                      ByteView signature) {
  if (signature.size() != kSignatureSize) return false;
  PkeyPtr pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                           key.data(), key.size()));
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!pkey || !ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) !=
          1)
    return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

}  // namespace fpki
