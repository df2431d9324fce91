// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef PROOFCHANNELS_CRYPTO_HPP
#define PROOFCHANNELS_CRYPTO_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <sodium.h>

namespace pfc {

using Digest32 = std::array<std::uint8_t, 32>;

inline void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium failed to initialize");
}

inline Digest32 sha256(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest32 out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

inline Digest32 sha256(std::string_view s) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

inline std::string to_hex(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

//! 256-bit revocation/payment secret.
struct Secret {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const Secret&) const = default;
};

//! SHA-256 image of a Secret; gates the immediate spend path of an htlc.
struct HashLock {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const HashLock&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

inline HashLock hash_secret(const Secret& s) {
    return HashLock{sha256(std::span<const std::uint8_t>(s.bytes.data(), s.bytes.size()))};
}

//! Hash-of-public-key identity. 20 bytes, byte equality.
struct Address {
    std::array<std::uint8_t, 20> bytes{};
    auto operator<=>(const Address&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

//! Hash root identifying a proposition on the chain.
struct PropositionId {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const PropositionId&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

inline PropositionId proposition_id(std::string_view name) {
    return PropositionId{sha256("prop:" + std::string(name))};
}

//! Detached Ed25519 signature. The public key travels with the signature so
//! that verification only needs the address.
struct Sig {
    std::array<std::uint8_t, 32> pubkey{};
    std::array<std::uint8_t, 64> bytes{};
    auto operator<=>(const Sig&) const = default;
};

struct PrivKey {
    std::array<std::uint8_t, 64> bytes{};
    std::array<std::uint8_t, 32> pubkey{};
};

inline Address derive_address(const std::array<std::uint8_t, 32>& pubkey) {
    Digest32 d = sha256(std::span<const std::uint8_t>(pubkey.data(), pubkey.size()));
    Address a;
    std::memcpy(a.bytes.data(), d.data(), a.bytes.size());
    return a;
}

struct Keypair {
    PrivKey priv;
    Address addr;
};

//! Deterministic keypair from arbitrary seed material.
inline Keypair keygen(std::string_view seed_material) {
    ensure_sodium();
    Digest32 seed = sha256("keyseed:" + std::string(seed_material));
    Keypair kp;
    crypto_sign_seed_keypair(kp.priv.pubkey.data(), kp.priv.bytes.data(), seed.data());
    kp.addr = derive_address(kp.priv.pubkey);
    return kp;
}

inline Sig sign(const PrivKey& priv, const Digest32& digest) {
    ensure_sodium();
    Sig s;
    s.pubkey = priv.pubkey;
    crypto_sign_detached(s.bytes.data(), nullptr, digest.data(), digest.size(),
                         priv.bytes.data());
    return s;
}

inline bool verify(const Address& addr, const Sig& sig, const Digest32& digest) {
    ensure_sodium();
    if (derive_address(sig.pubkey) != addr) return false;
    return crypto_sign_verify_detached(sig.bytes.data(), digest.data(), digest.size(),
                                       sig.pubkey.data()) == 0;
}

//! Deterministic secret derivation for scenario replayability.
inline Secret derive_secret(std::string_view material) {
    return Secret{sha256("secret:" + std::string(material))};
}

} // namespace pfc

#endif // PROOFCHANNELS_CRYPTO_HPP
