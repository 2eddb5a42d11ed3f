#ifndef FPKI_COMMON_CRYPTO_H_
#define FPKI_COMMON_CRYPTO_H_

#include <array>
#include <memory>

#include "fpki/common/bytes.h"

namespace fpki {

Hash sha256(ByteView data);

// Streaming SHA-256. Not copyable; one digest per instance.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteView data);
  Sha256& update(uint8_t byte) { return update(ByteView(&byte, 1)); }
  Hash finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Ed25519 key material. Keys are derived from a 32-byte seed so that test
// authorities and scenario runs are reproducible.
using PublicKey = std::array<uint8_t, 32>;
using Seed = std::array<uint8_t, 32>;
using KeyId = Hash;

constexpr size_t kSignatureSize = 64;

// Key identifier is the SHA-256 of the raw public key.
KeyId key_id(const PublicKey& key);

class KeyPair {
 public:
  explicit KeyPair(const Seed& seed);
  // Seed expanded from a 64-bit value; convenient for deterministic tests.
  static KeyPair from_u64(uint64_t seed);

  const PublicKey& public_key() const { return public_key_; }
  KeyId id() const { return key_id(public_key_); }
  const Seed& seed() const { return seed_; }

  // Throws std::runtime_error if the backend fails.
  Bytes sign(ByteView message) const;

 private:
  Seed seed_;
  PublicKey public_key_;
};

bool verify_signature(const PublicKey& key, ByteView message,
                      ByteView signature);

}  // namespace fpki

#endif  // FPKI_COMMON_CRYPTO_H_
