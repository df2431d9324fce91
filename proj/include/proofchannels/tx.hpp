// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef PROOFCHANNELS_TX_HPP
#define PROOFCHANNELS_TX_HPP

#include <cstdint>
#include <vector>

#include "amount.hpp"
#include "crypto.hpp"
#include "script.hpp"

namespace pfc {

struct TxId {
    Digest32 bytes{};
    auto operator<=>(const TxId&) const = default;
    std::string hex() const { return to_hex(bytes); }
    //! Shortened id for log lines.
    std::string short_hex() const { return to_hex(bytes).substr(0, 12); }
};

struct OutPoint {
    TxId txid;
    std::uint32_t index = 0;
    auto operator<=>(const OutPoint&) const = default;
};

struct TxOutput {
    Amount amount;
    Script script;
    bool operator==(const TxOutput&) const = default;
};

struct TxInput {
    OutPoint prev;
    Witness witness;
};

struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
};

// ---- canonical serialization ----
//
// Length-prefixed fields in declaration order, witnesses excluded; byte
// stable across runs since test fixtures commit digests. Integers are
// little-endian.

namespace ser {

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <std::size_t N>
void put_bytes(std::vector<std::uint8_t>& out, const std::array<std::uint8_t, N>& a) {
    out.insert(out.end(), a.begin(), a.end());
}

inline void put_script(std::vector<std::uint8_t>& out, const Script& s);

inline void put_htlc_inner(std::vector<std::uint8_t>& out, const HtlcInner& inner) {
    if (const auto* p = std::get_if<PayToAddr>(&inner)) {
        put_script(out, Script{*p});
    } else {
        put_script(out, Script{std::get<Ptlc>(inner)});
    }
}

inline void put_script(std::vector<std::uint8_t>& out, const Script& s) {
    if (const auto* p = std::get_if<PayToAddr>(&s.v)) {
        put_u8(out, 1);
        put_bytes(out, p->addr.bytes);
    } else if (const auto* m = std::get_if<Multisig2>(&s.v)) {
        put_u8(out, 2);
        put_bytes(out, m->a.bytes);
        put_bytes(out, m->b.bytes);
    } else if (const auto* h = std::get_if<Htlc>(&s.v)) {
        put_u8(out, 3);
        put_bytes(out, h->lock.bytes);
        put_bytes(out, h->claimant.bytes);
        put_u32(out, h->delay.blocks);
        put_htlc_inner(out, h->inner);
    } else {
        const auto& p = std::get<Ptlc>(s.v);
        put_u8(out, 4);
        put_bytes(out, p.prop.bytes);
        put_bytes(out, p.prover.bytes);
        put_u32(out, p.timeout.height);
        put_bytes(out, p.refundee.bytes);
    }
}

} // namespace ser

inline std::vector<std::uint8_t> serialize_for_digest(const Transaction& tx) {
    std::vector<std::uint8_t> out;
    ser::put_u32(out, static_cast<std::uint32_t>(tx.inputs.size()));
    for (const auto& in : tx.inputs) {
        ser::put_bytes(out, in.prev.txid.bytes);
        ser::put_u32(out, in.prev.index);
    }
    ser::put_u32(out, static_cast<std::uint32_t>(tx.outputs.size()));
    for (const auto& o : tx.outputs) {
        ser::put_u64(out, o.amount.to_atoms());
        ser::put_script(out, o.script);
    }
    return out;
}

inline Digest32 tx_digest(const Transaction& tx) {
    auto bytes = serialize_for_digest(tx);
    return sha256(std::span<const std::uint8_t>(bytes.data(), bytes.size()));
}

inline TxId tx_id(const Transaction& tx) { return TxId{tx_digest(tx)}; }

inline Amount tx_output_sum(const Transaction& tx) {
    Amount sum;
    for (const auto& o : tx.outputs) sum += o.amount;
    return sum;
}

} // namespace pfc

#endif // PROOFCHANNELS_TX_HPP
