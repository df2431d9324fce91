// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <catch2/catch_amalgamated.hpp>

#include <proofchannels/crypto.hpp>

#include <set>

using namespace pfc;

namespace {

Secret secret_filled(std::uint8_t b) {
    Secret s;
    s.bytes.fill(b);
    return s;
}

} // namespace

TEST_CASE("hash_secret matches externally computed SHA-256 digests") {
    // Digests computed once with an independent SHA-256 implementation
    // (Python hashlib) and frozen here.
    CHECK(hash_secret(secret_filled(0x00)).hex() ==
          "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925");
    CHECK(hash_secret(secret_filled(0x01)).hex() ==
          "72cd6e8422c407fb6d098690f1130b7ded7ec2f7f5e1d30bd9d521f015363793");
    Secret counting;
    for (std::size_t i = 0; i < counting.bytes.size(); ++i)
        counting.bytes[i] = static_cast<std::uint8_t>(i);
    CHECK(hash_secret(counting).hex() ==
          "630dcd2966c4336691125448bbb25b4ff412a49c732db2c8abc1b8581bd710dd");
}

TEST_CASE("distinct secrets hash to distinct locks") {
    std::set<std::string> locks;
    for (int i = 0; i < 64; ++i)
        locks.insert(hash_secret(derive_secret("s" + std::to_string(i))).hex());
    CHECK(locks.size() == 64);
}

TEST_CASE("keygen is deterministic per seed") {
    Keypair a1 = keygen("alice");
    Keypair a2 = keygen("alice");
    Keypair b = keygen("bob");
    CHECK(a1.addr == a2.addr);
    CHECK(a1.priv.pubkey == a2.priv.pubkey);
    CHECK(a1.addr != b.addr);
}

TEST_CASE("sign/verify round-trip and tamper rejection") {
    Keypair alice = keygen("alice");
    Keypair bob = keygen("bob");
    Digest32 digest = sha256("some transaction bytes");

    Sig sig = sign(alice.priv, digest);
    CHECK(verify(alice.addr, sig, digest));
    CHECK_FALSE(verify(bob.addr, sig, digest));

    SECTION("mutated digest fails") {
        Digest32 other = digest;
        other[7] ^= 0x20;
        CHECK_FALSE(verify(alice.addr, sig, other));
    }
    SECTION("mutated signature fails") {
        Sig bad = sig;
        bad.bytes[3] ^= 0x01;
        CHECK_FALSE(verify(alice.addr, bad, digest));
    }
    SECTION("substituted pubkey fails the address check") {
        Sig forged = sig;
        forged.pubkey = bob.priv.pubkey;
        CHECK_FALSE(verify(alice.addr, forged, digest));
    }
}

TEST_CASE("address is derived from the public key by hashing") {
    Keypair alice = keygen("alice");
    CHECK(derive_address(alice.priv.pubkey) == alice.addr);
}
