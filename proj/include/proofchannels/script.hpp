// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// The contract language used by channel transactions: pay-to-address,
// 2-of-2 multisig, hash timelock contracts (htlc), proposition timelock
// contracts (ptlc), and the htlc-wrapped ptlc used for revocable bet
// outputs. eval() decides whether a witness satisfies a script under a
// given chain context.

#ifndef PROOFCHANNELS_SCRIPT_HPP
#define PROOFCHANNELS_SCRIPT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "crypto.hpp"

namespace pfc {

//! CSV-style relative lock: the spending branch becomes valid once the utxo
//! has at least this many confirmations.
struct RelativeDelay {
    std::uint32_t blocks = 1;
    auto operator<=>(const RelativeDelay&) const = default;
};

//! CLTV-style absolute lock: the branch becomes valid once chain height has
//! reached this value.
struct AbsoluteHeight {
    std::uint32_t height = 0;
    auto operator<=>(const AbsoluteHeight&) const = default;
};

struct PayToAddr {
    Address addr;
    auto operator<=>(const PayToAddr&) const = default;
};

struct Multisig2 {
    Address a;
    Address b;
    auto operator<=>(const Multisig2&) const = default;
};

//! Proposition timelock contract: spendable by `prover` once `prop` is proven
//! on chain, or by `refundee` once the chain has reached `timeout`. Both
//! branches may be simultaneously live; first spend wins.
struct Ptlc {
    PropositionId prop;
    Address prover;
    AbsoluteHeight timeout;
    Address refundee;
    auto operator<=>(const Ptlc&) const = default;
};

//! The continuation of an htlc's delay branch. Restricting it here keeps
//! htlc nesting depth at one by construction.
using HtlcInner = std::variant<PayToAddr, Ptlc>;

//! Hash timelock contract: spendable immediately by `claimant` with the
//! secret behind `lock`, or through `inner` once the utxo has `delay`
//! confirmations.
struct Htlc {
    HashLock lock;
    Address claimant;
    RelativeDelay delay;
    HtlcInner inner;
    bool operator==(const Htlc&) const = default;
};

struct Script {
    std::variant<PayToAddr, Multisig2, Htlc, Ptlc> v;
    bool operator==(const Script&) const = default;
};

inline Script pay_to(const Address& a) { return Script{PayToAddr{a}}; }
inline Script multisig2(const Address& a, const Address& b) { return Script{Multisig2{a, b}}; }
inline Script htlc(const HashLock& lock, const Address& claimant, RelativeDelay delay,
                   HtlcInner inner) {
    return Script{Htlc{lock, claimant, delay, std::move(inner)}};
}
inline Script ptlc(const PropositionId& prop, const Address& prover, AbsoluteHeight timeout,
                   const Address& refundee) {
    return Script{Ptlc{prop, prover, timeout, refundee}};
}

// ---- witnesses ----

struct SigWitness {
    Sig sig;
    bool operator==(const SigWitness&) const = default;
};

//! Both halves of a 2-of-2 spend. Optionals model partially signed
//! transactions in flight during funding/closing handshakes.
struct Sig2Witness {
    std::optional<Sig> sig_a;
    std::optional<Sig> sig_b;
    bool operator==(const Sig2Witness&) const = default;
};

//! htlc way 1: secret plus claimant signature, spendable immediately.
struct SecretBranch {
    Secret secret;
    Sig sig;
    bool operator==(const SecretBranch&) const = default;
};

//! ptlc way 1: proposition proven plus prover signature.
struct ProvenBranch {
    Sig sig;
    bool operator==(const ProvenBranch&) const = default;
};

//! ptlc way 2: timeout reached plus refundee signature.
struct TimeoutBranch {
    Sig sig;
    bool operator==(const TimeoutBranch&) const = default;
};

using InnerWitness = std::variant<SigWitness, ProvenBranch, TimeoutBranch>;

//! htlc way 2: wait out the relative delay, then satisfy the inner script.
struct DelayBranch {
    InnerWitness inner;
    bool operator==(const DelayBranch&) const = default;
};

using Witness =
    std::variant<SigWitness, Sig2Witness, SecretBranch, DelayBranch, ProvenBranch, TimeoutBranch>;

// ---- evaluation ----

enum class ScriptError {
    None = 0,
    BadSecret,
    MissingSignature,
    BadSignature,
    DelayNotElapsed,
    PropositionNotProven,
    TimeoutNotReached,
    WitnessShapeMismatch,
};

inline const char* script_error_name(ScriptError e) {
    switch (e) {
        case ScriptError::None: return "ok";
        case ScriptError::BadSecret: return "BadSecret";
        case ScriptError::MissingSignature: return "MissingSignature";
        case ScriptError::BadSignature: return "BadSignature";
        case ScriptError::DelayNotElapsed: return "DelayNotElapsed";
        case ScriptError::PropositionNotProven: return "PropositionNotProven";
        case ScriptError::TimeoutNotReached: return "TimeoutNotReached";
        case ScriptError::WitnessShapeMismatch: return "WitnessShapeMismatch";
    }
    return "?";
}

//! Everything a script may consult about the spending transaction and the
//! chain. The digest covers all input outpoints and all outputs, so a
//! signature commits to the whole transaction.
struct EvalContext {
    Digest32 tx_digest{};
    std::uint32_t utxo_creation_height = 0;
    std::uint32_t chain_height = 0;
    std::function<bool(const PropositionId&)> proven;

    std::uint32_t confirmations() const { return chain_height - utxo_creation_height + 1; }
};

namespace detail {

inline ScriptError check_sig(const Address& signer, const Sig& sig, const EvalContext& ctx) {
    return verify(signer, sig, ctx.tx_digest) ? ScriptError::None : ScriptError::BadSignature;
}

inline ScriptError eval_ptlc(const Ptlc& p, const InnerWitness& w, const EvalContext& ctx) {
    if (const auto* pr = std::get_if<ProvenBranch>(&w)) {
        if (!ctx.proven || !ctx.proven(p.prop)) return ScriptError::PropositionNotProven;
        return check_sig(p.prover, pr->sig, ctx);
    }
    if (const auto* to = std::get_if<TimeoutBranch>(&w)) {
        if (ctx.chain_height < p.timeout.height) return ScriptError::TimeoutNotReached;
        return check_sig(p.refundee, to->sig, ctx);
    }
    return ScriptError::WitnessShapeMismatch;
}

} // namespace detail

//! Decide whether `w` satisfies `s` under `ctx`. Returns ScriptError::None on
//! success, otherwise the first failed condition of the branch the spender
//! chose.
inline ScriptError eval(const Script& s, const Witness& w, const EvalContext& ctx) {
    if (const auto* pay = std::get_if<PayToAddr>(&s.v)) {
        const auto* sw = std::get_if<SigWitness>(&w);
        if (!sw) return ScriptError::WitnessShapeMismatch;
        return detail::check_sig(pay->addr, sw->sig, ctx);
    }
    if (const auto* ms = std::get_if<Multisig2>(&s.v)) {
        const auto* s2 = std::get_if<Sig2Witness>(&w);
        if (!s2) return ScriptError::WitnessShapeMismatch;
        if (!s2->sig_a || !s2->sig_b) return ScriptError::MissingSignature;
        if (auto e = detail::check_sig(ms->a, *s2->sig_a, ctx); e != ScriptError::None) return e;
        return detail::check_sig(ms->b, *s2->sig_b, ctx);
    }
    if (const auto* h = std::get_if<Htlc>(&s.v)) {
        if (const auto* sb = std::get_if<SecretBranch>(&w)) {
            if (hash_secret(sb->secret) != h->lock) return ScriptError::BadSecret;
            return detail::check_sig(h->claimant, sb->sig, ctx);
        }
        if (const auto* db = std::get_if<DelayBranch>(&w)) {
            if (ctx.confirmations() < h->delay.blocks) return ScriptError::DelayNotElapsed;
            if (const auto* inner_pay = std::get_if<PayToAddr>(&h->inner)) {
                const auto* sw = std::get_if<SigWitness>(&db->inner);
                if (!sw) return ScriptError::WitnessShapeMismatch;
                return detail::check_sig(inner_pay->addr, sw->sig, ctx);
            }
            return detail::eval_ptlc(std::get<Ptlc>(h->inner), db->inner, ctx);
        }
        return ScriptError::WitnessShapeMismatch;
    }
    const auto& p = std::get<Ptlc>(s.v);
    if (const auto* pr = std::get_if<ProvenBranch>(&w))
        return detail::eval_ptlc(p, InnerWitness{*pr}, ctx);
    if (const auto* to = std::get_if<TimeoutBranch>(&w))
        return detail::eval_ptlc(p, InnerWitness{*to}, ctx);
    return ScriptError::WitnessShapeMismatch;
}

} // namespace pfc

#endif // PROOFCHANNELS_SCRIPT_HPP
