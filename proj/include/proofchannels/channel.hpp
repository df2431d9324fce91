// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Two-party payment channel with bet outputs: funding, per-revision
// commitment construction, the four-step update handshake (new templates,
// cross-signatures, revocation, revision bump), cooperative and unilateral
// close, breach detection with punishment sweeps, and on-chain claims.
//
// Each party owns one ChannelState; the two are never aliased. Everything a
// party sends to the other is returned from a method here and carried by the
// peer layer, so every handshake step is individually invocable and tests
// can abort mid-way.

#ifndef PROOFCHANNELS_CHANNEL_HPP
#define PROOFCHANNELS_CHANNEL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ledger.hpp"

namespace pfc {

enum class ChannelErrorCode {
    BadState,            // operation does not apply in the current status
    BalanceMismatch,     // proposed balances + stakes do not sum to capacity
    InsufficientBalance, // a stake or payment exceeds the payer's balance
    InsufficientFunds,   // funding utxo smaller than the pledged contribution
    NoSuchBet,
    NoSuchHtlc,
    StaleRevision,       // handshake message for a revision we are not at
    HostageRisk,         // funding signature requested before cross-signing
    ActiveBetsRemain,    // cooperative close with unresolved contract outputs
    NoRevealedSecret,    // punish attempted without the revocation secret
    DeadlineMismatch,    // hedged bet deadlines differ
    DeadlinePassed,      // bet proposed with deadline at or below chain height
    BadSecret,
    BadSignature,
};

inline const char* channel_error_name(ChannelErrorCode c) {
    switch (c) {
        case ChannelErrorCode::BadState: return "BadState";
        case ChannelErrorCode::BalanceMismatch: return "BalanceMismatch";
        case ChannelErrorCode::InsufficientBalance: return "InsufficientBalance";
        case ChannelErrorCode::InsufficientFunds: return "InsufficientFunds";
        case ChannelErrorCode::NoSuchBet: return "NoSuchBet";
        case ChannelErrorCode::NoSuchHtlc: return "NoSuchHtlc";
        case ChannelErrorCode::StaleRevision: return "StaleRevision";
        case ChannelErrorCode::HostageRisk: return "HostageRisk";
        case ChannelErrorCode::ActiveBetsRemain: return "ActiveBetsRemain";
        case ChannelErrorCode::NoRevealedSecret: return "NoRevealedSecret";
        case ChannelErrorCode::DeadlineMismatch: return "DeadlineMismatch";
        case ChannelErrorCode::DeadlinePassed: return "DeadlinePassed";
        case ChannelErrorCode::BadSecret: return "BadSecret";
        case ChannelErrorCode::BadSignature: return "BadSignature";
    }
    return "?";
}

class ChannelError : public std::runtime_error {
public:
    ChannelError(ChannelErrorCode code, const std::string& what)
        : std::runtime_error(std::string(channel_error_name(code)) + ": " + what), code_(code) {}
    ChannelErrorCode code() const { return code_; }

private:
    ChannelErrorCode code_;
};

struct ChannelParams {
    Address party_a;
    Address party_b;
    Amount contrib_a;
    Amount contrib_b;
    RelativeDelay csv_delay{48};

    Amount capacity() const { return contrib_a + contrib_b; }
};

//! A wager that `prop` will be proven on chain by `deadline`. The doubter
//! stakes against, the backer for; the winner takes both stakes.
struct Bet {
    PropositionId prop;
    Amount doubter_stake;
    Amount backer_stake;
    AbsoluteHeight deadline;
    Address backer;
    Address doubter;

    Amount total() const { return doubter_stake + backer_stake; }
    bool operator==(const Bet&) const = default;
};

//! An in-flight conditional payment: `payee` collects `amount` by presenting
//! the secret behind `lock`; otherwise the payer reclaims it. Used for
//! multi-hop routing where every hop shares one lock.
struct PaymentHtlc {
    HashLock lock;
    Amount amount;
    Address payee;
    AbsoluteHeight expiry;  // off-chain refund policy deadline

    bool operator==(const PaymentHtlc&) const = default;
};

//! The channel's full balance sheet at one revision.
struct RevisionTarget {
    Amount balance_a;
    Amount balance_b;
    std::vector<Bet> bets;
    std::vector<PaymentHtlc> htlcs;

    Amount total() const {
        Amount sum = balance_a + balance_b;
        for (const auto& b : bets) sum += b.total();
        for (const auto& h : htlcs) sum += h.amount;
        return sum;
    }
    bool operator==(const RevisionTarget&) const = default;
};

enum class ChannelStatus {
    Init,
    CommitmentsExchanged,
    Open,
    ClosedCooperative,
    ClosedUnilateral,
    Breached,
};

inline const char* channel_status_name(ChannelStatus s) {
    switch (s) {
        case ChannelStatus::Init: return "Init";
        case ChannelStatus::CommitmentsExchanged: return "CommitmentsExchanged";
        case ChannelStatus::Open: return "Open";
        case ChannelStatus::ClosedCooperative: return "ClosedCooperative";
        case ChannelStatus::ClosedUnilateral: return "ClosedUnilateral";
        case ChannelStatus::Breached: return "Breached";
    }
    return "?";
}

//! Build the output list of `owner`'s commitment at one revision. Output
//! order is fixed: party A's balance, party B's balance, bets, payment
//! htlcs; zero-amount outputs are skipped. The owner's own balance and every
//! bet are wrapped in an htlc on the owner's revision lock so the
//! counterparty can confiscate them if this revision is published after
//! being revoked. Payment htlc outputs are identical in both commitments:
//! the payee spends with the payment secret, the payer reclaims through the
//! delay.
inline std::vector<TxOutput> commitment_outputs(const ChannelParams& params,
                                                const RevisionTarget& t, const Address& owner,
                                                const HashLock& owner_lock) {
    const bool owner_is_a = owner == params.party_a;
    const Address& counterparty = owner_is_a ? params.party_b : params.party_a;
    std::vector<TxOutput> outs;

    auto balance_out = [&](const Address& who, Amount amt) {
        if (amt.is_zero()) return;
        if (who == owner) {
            outs.push_back({amt, htlc(owner_lock, counterparty, params.csv_delay,
                                      PayToAddr{owner})});
        } else {
            outs.push_back({amt, pay_to(who)});
        }
    };
    balance_out(params.party_a, t.balance_a);
    balance_out(params.party_b, t.balance_b);
    for (const auto& bet : t.bets) {
        AbsoluteHeight ptlc_timeout{bet.deadline.height + params.csv_delay.blocks};
        outs.push_back({bet.total(), htlc(owner_lock, counterparty, params.csv_delay,
                                          Ptlc{bet.prop, bet.backer, ptlc_timeout,
                                               bet.doubter})});
    }
    for (const auto& ph : t.htlcs) {
        const Address& payer = ph.payee == params.party_a ? params.party_b : params.party_a;
        outs.push_back({ph.amount, htlc(ph.lock, ph.payee, params.csv_delay,
                                        PayToAddr{payer})});
    }
    return outs;
}

class ChannelState {
public:
    //! `secret_seed` roots this party's per-revision revocation secrets;
    //! distinct per (scenario, channel, party) for deterministic replay.
    ChannelState(ChannelParams params, Keypair me, std::string secret_seed)
        : params_(std::move(params)), me_(std::move(me)), seed_(std::move(secret_seed)) {
        if (params_.capacity().is_zero())
            throw ChannelError(ChannelErrorCode::BadState, "channel capacity is zero");
        if (me_.addr != params_.party_a && me_.addr != params_.party_b)
            throw ChannelError(ChannelErrorCode::BadState, "keypair is not a channel party");
    }

    // ---- views ----

    const ChannelParams& params() const { return params_; }
    const Address& me() const { return me_.addr; }
    const Address& peer() const {
        return me_.addr == params_.party_a ? params_.party_b : params_.party_a;
    }
    const Keypair& keys() const { return me_; }
    ChannelStatus status() const { return status_; }
    std::uint32_t revision() const { return revision_; }
    bool has_pending() const { return pending_.has_value(); }
    std::uint32_t pending_revision() const { return require_pending().rev; }

    const RevisionTarget& current() const { return record_at(revision_).target; }
    Amount balance_a() const { return current().balance_a; }
    Amount balance_b() const { return current().balance_b; }
    Amount my_balance() const {
        return me_.addr == params_.party_a ? balance_a() : balance_b();
    }
    Amount peer_balance() const {
        return me_.addr == params_.party_a ? balance_b() : balance_a();
    }
    const std::vector<Bet>& bets() const { return current().bets; }
    const std::vector<PaymentHtlc>& htlcs() const { return current().htlcs; }
    const OutPoint& funding_outpoint() const { return funding_; }

    //! My revocation secret for revision m, derived from the seed so replay
    //! is deterministic. Only leaves this object through reveal_revocation.
    Secret revision_secret(std::uint32_t m) const {
        return derive_secret(seed_ + ":rev:" + std::to_string(m));
    }
    HashLock revision_lock(std::uint32_t m) const { return hash_secret(revision_secret(m)); }

    //! Counterparty revocation secrets learned through handshakes, keyed by
    //! revoked revision.
    const std::map<std::uint32_t, Secret>& revealed_secrets() const { return their_revealed_; }

    // ---- opening handshake ----
    //
    // Order matters: the funding transaction must not be signed until both
    // initial commitments are cross-signed, otherwise the counterparty could
    // confirm the funding and hold the coins hostage. sign_funding enforces
    // this with HostageRisk.

    void set_funding(const OutPoint& op) {
        if (status_ != ChannelStatus::Init)
            throw ChannelError(ChannelErrorCode::BadState, "funding already fixed");
        funding_ = op;
    }

    //! Open step 1: pledge revision 1 and hand out its lock.
    HashLock initial_lock() {
        if (status_ != ChannelStatus::Init || pending_)
            throw ChannelError(ChannelErrorCode::BadState, "initial lock already issued");
        RevisionTarget t;
        t.balance_a = params_.contrib_a;
        t.balance_b = params_.contrib_b;
        start_pending(1, std::move(t));
        return pending_->my_lock;
    }

    void receive_initial_lock(const HashLock& lock) {
        if (status_ != ChannelStatus::Init || !pending_ || pending_->rev != 1)
            throw ChannelError(ChannelErrorCode::BadState, "no initial revision pledged");
        set_their_lock(lock);
    }

    //! Digest of my own pending commitment — what the counterparty must sign.
    Digest32 pending_commitment_digest() const {
        const Pending& p = require_pending();
        if (!p.have_their_lock)
            throw ChannelError(ChannelErrorCode::BadState, "counterparty lock unknown");
        return tx_digest(unsigned_commitment(p.target, me_.addr, p.my_lock));
    }

    //! Handshake step 2 (outbound): sign the counterparty's new commitment.
    Sig sign_peer_commitment() const {
        const Pending& p = require_pending();
        if (!p.have_their_lock)
            throw ChannelError(ChannelErrorCode::BadState, "counterparty lock unknown");
        Transaction theirs = unsigned_commitment(p.target, peer(), p.their_lock);
        return sign(me_.priv, tx_digest(theirs));
    }

    //! Handshake step 2 (inbound): store the counterparty's signature over my
    //! new commitment. Completing both directions during opening moves the
    //! status to CommitmentsExchanged.
    void receive_commit_sig(const Sig& sig) {
        Pending& p = require_pending();
        if (!verify(peer(), sig, pending_commitment_digest()))
            throw ChannelError(ChannelErrorCode::BadSignature,
                               "commit signature does not cover my commitment");
        p.their_sig = sig;
        if (status_ == ChannelStatus::Init) status_ = ChannelStatus::CommitmentsExchanged;
    }

    bool commitments_exchanged() const {
        return pending_ && pending_->have_their_lock && pending_->their_sig.has_value();
    }

    //! Sign the funding transaction. Refused until my commitment is signed by
    //! the counterparty — before that point, confirmed funding would strand
    //! my contribution.
    Sig sign_funding(const Transaction& funding_tx) const {
        if (status_ != ChannelStatus::CommitmentsExchanged)
            throw ChannelError(ChannelErrorCode::HostageRisk,
                               "funding signature requested before commitments were cross-signed");
        return sign(me_.priv, tx_digest(funding_tx));
    }

    //! Funding confirmed on chain: adopt revision 1 and open.
    void mark_open() {
        if (status_ != ChannelStatus::CommitmentsExchanged)
            throw ChannelError(ChannelErrorCode::BadState, "commitments not exchanged");
        adopt_pending();
        status_ = ChannelStatus::Open;
    }

    // ---- update handshake ----
    //
    // (1) begin_update / receive_update_lock   new secrets and templates
    // (2) sign_peer_commitment / receive_commit_sig
    // (3) reveal_revocation / receive_revocation
    // (4) finalize_update                      bump the revision
    //
    // Aborting after (2) leaves two live revisions on purpose; tests assert
    // the invariant checker notices.

    //! Update step 1: validate the proposed balance sheet, pledge revision
    //! m+1, and hand out its lock.
    HashLock begin_update(const RevisionTarget& target) {
        if (status_ != ChannelStatus::Open)
            throw ChannelError(ChannelErrorCode::BadState, "channel not open");
        if (pending_)
            throw ChannelError(ChannelErrorCode::StaleRevision, "update already in flight");
        if (target.total() != params_.capacity())
            throw ChannelError(ChannelErrorCode::BalanceMismatch,
                               "balances and stakes do not sum to capacity");
        start_pending(revision_ + 1, target);
        return pending_->my_lock;
    }

    void receive_update_lock(const HashLock& lock) {
        if (status_ != ChannelStatus::Open || require_pending().rev != revision_ + 1)
            throw ChannelError(ChannelErrorCode::StaleRevision, "unexpected update lock");
        set_their_lock(lock);
    }

    //! Update step 3 (outbound): reveal my secret for the revision being
    //! replaced. Only reachable once I hold the counterparty's signature on
    //! the replacement, so revealing can never strand me.
    Secret reveal_revocation() {
        const Pending& p = require_pending();
        if (!p.their_sig)
            throw ChannelError(ChannelErrorCode::BadState,
                               "will not revoke before the new commitment is signed");
        revealed_mine_ = true;
        return revision_secret(revision_);
    }

    //! Update step 3 (inbound): the counterparty revokes its old revision.
    //! Replays with the same secret are idempotent.
    void receive_revocation(const Secret& secret) {
        const Pending& p = require_pending();
        if (!p.their_sig)
            throw ChannelError(ChannelErrorCode::BadState, "revocation before signatures");
        const HashLock expect = record_at(revision_).their_lock;
        if (hash_secret(secret) != expect)
            throw ChannelError(ChannelErrorCode::BadSecret,
                               "revocation secret does not match the revoked lock");
        their_revealed_.emplace(revision_, secret);  // no-op on replay
    }

    bool revealed_revocation() const { return revealed_mine_; }
    bool ready_to_finalize() const {
        return pending_ && pending_->their_sig && revealed_mine_ &&
               their_revealed_.count(revision_) != 0;
    }

    //! Update step 4: both secrets exchanged — adopt the new revision.
    void finalize_update() {
        if (!ready_to_finalize())
            throw ChannelError(ChannelErrorCode::BadState, "handshake incomplete");
        adopt_pending();
    }

    //! Drop a pledged update before any signature was exchanged.
    void abort_update() {
        const Pending& p = require_pending();
        if (p.their_sig)
            throw ChannelError(ChannelErrorCode::BadState,
                               "cannot abort: counterparty already signed");
        pending_.reset();
        revealed_mine_ = false;
    }

    // ---- closing ----

    //! My fully signed commitment for revision `rev`. Deliberately works for
    //! revoked revisions: publishing one is the breach under test.
    Transaction commitment_tx(std::uint32_t rev) const {
        const RevRecord* rec = find_record(rev);
        const Pending* p = pending_ && pending_->rev == rev ? &*pending_ : nullptr;
        if (!rec && !p)
            throw ChannelError(ChannelErrorCode::StaleRevision, "unknown revision");
        const RevisionTarget& target = rec ? rec->target : p->target;
        const HashLock& lock = rec ? rec->my_lock : p->my_lock;
        const std::optional<Sig>& their = rec ? rec->their_sig : p->their_sig;
        if (!their)
            throw ChannelError(ChannelErrorCode::BadState,
                               "no counterparty signature for this revision");
        Transaction tx = unsigned_commitment(target, me_.addr, lock);
        Sig mine = sign(me_.priv, tx_digest(tx));
        tx.inputs[0].witness = order_sigs(mine, *their);
        return tx;
    }

    //! Highest revision I can publish: the pending one once fully signed.
    std::uint32_t latest_signed_revision() const {
        if (pending_ && pending_->their_sig) return pending_->rev;
        return revision_;
    }

    //! Latest publishable commitment: the pending revision if fully signed,
    //! otherwise the current one.
    Transaction latest_commitment_tx() const { return commitment_tx(latest_signed_revision()); }

    //! Unsigned cooperative close at current balances.
    Transaction build_cooperative_close() const {
        if (status_ != ChannelStatus::Open)
            throw ChannelError(ChannelErrorCode::BadState, "channel not open");
        const RevisionTarget& t = current();
        if (!t.bets.empty() || !t.htlcs.empty())
            throw ChannelError(ChannelErrorCode::ActiveBetsRemain,
                               "settle bets and payments before a cooperative close");
        Transaction tx;
        tx.inputs.push_back({funding_, Sig2Witness{}});
        if (!t.balance_a.is_zero()) tx.outputs.push_back({t.balance_a, pay_to(params_.party_a)});
        if (!t.balance_b.is_zero()) tx.outputs.push_back({t.balance_b, pay_to(params_.party_b)});
        return tx;
    }

    //! My half of a 2-of-2 spend of the funding output (close transactions).
    Sig sign_tx(const Transaction& tx) const { return sign(me_.priv, tx_digest(tx)); }

    //! Merge both halves into the funding input's witness.
    Transaction attach_close_sigs(Transaction tx, const Sig& mine, const Sig& theirs) const {
        tx.inputs[0].witness =
            me_.addr == params_.party_a ? order_sigs(mine, theirs) : order_sigs(theirs, mine);
        return tx;
    }

    void note_cooperative_close() { status_ = ChannelStatus::ClosedCooperative; }
    void note_unilateral_close(const Address& by, std::uint32_t rev) {
        status_ = ChannelStatus::ClosedUnilateral;
        closed_by_ = by;
        closed_revision_ = rev;
    }
    void note_breach(const Address& by, std::uint32_t rev) {
        status_ = ChannelStatus::Breached;
        closed_by_ = by;
        closed_revision_ = rev;
    }
    const std::optional<Address>& closed_by() const { return closed_by_; }
    std::uint32_t closed_revision() const { return closed_revision_; }

    // ---- breach handling ----

    //! If `tx` is one of the counterparty's commitments, return its revision.
    std::optional<std::uint32_t> match_commitment(const Transaction& tx) const {
        if (tx.inputs.size() != 1 || !(tx.inputs[0].prev == funding_)) return std::nullopt;
        auto matches = [&](const RevisionTarget& t, const HashLock& lock) {
            return tx.outputs == commitment_outputs(params_, t, peer(), lock);
        };
        for (const auto& [rev, rec] : revisions_)
            if (matches(rec.target, rec.their_lock)) return rev;
        if (pending_ && pending_->have_their_lock &&
            matches(pending_->target, pending_->their_lock))
            return pending_->rev;
        return std::nullopt;
    }

    //! Watch-tower reaction: if `observed` is a revoked counterparty
    //! commitment, build the sweep that confiscates every output locked on
    //! its revision secret (plus payment htlcs whose secret I hold). Returns
    //! nothing when the commitment is current — that is a legitimate close.
    std::optional<Transaction> punish(const Transaction& observed) const {
        std::optional<std::uint32_t> rev = match_commitment(observed);
        if (!rev) return std::nullopt;
        auto it = their_revealed_.find(*rev);
        if (it == their_revealed_.end()) {
            // A revision below the current one must have been revoked during
            // the handshake that replaced it; anything else (current,
            // pending, or mid-handshake dual-live) is a legitimate close.
            if (*rev < revision_)
                throw ChannelError(ChannelErrorCode::NoRevealedSecret,
                                   "revoked revision whose secret was never revealed");
            return std::nullopt;
        }
        const Secret& rev_secret = it->second;
        const HashLock rev_lock = hash_secret(rev_secret);

        TxId breach_id = tx_id(observed);
        Transaction sweep;
        Amount total;
        std::vector<const Secret*> secrets;
        for (std::uint32_t i = 0; i < observed.outputs.size(); ++i) {
            const auto* h = std::get_if<Htlc>(&observed.outputs[i].script.v);
            if (!h || h->claimant != me_.addr) continue;
            const Secret* s = nullptr;
            if (h->lock == rev_lock) {
                s = &rev_secret;
            } else if (auto ps = payment_secrets_.find(h->lock); ps != payment_secrets_.end()) {
                s = &ps->second;
            }
            if (!s) continue;
            sweep.inputs.push_back({OutPoint{breach_id, i}, SigWitness{}});
            secrets.push_back(s);
            total += observed.outputs[i].amount;
        }
        if (sweep.inputs.empty()) return std::nullopt;  // nothing confiscable
        sweep.outputs.push_back({total, pay_to(me_.addr)});
        Digest32 d = tx_digest(sweep);
        Sig sig = sign(me_.priv, d);
        for (std::size_t i = 0; i < sweep.inputs.size(); ++i)
            sweep.inputs[i].witness = SecretBranch{*secrets[i], sig};
        return sweep;
    }

    // ---- payment secrets (invoices / routing) ----

    void learn_payment_secret(const Secret& s) { payment_secrets_[hash_secret(s)] = s; }
    const Secret* payment_secret(const HashLock& lock) const {
        auto it = payment_secrets_.find(lock);
        return it == payment_secrets_.end() ? nullptr : &it->second;
    }

    //! Snapshot of a past revision, for building claims after a close.
    //! The balance sheet at `rev`, including a still-pending revision: one
    //! that is fully signed is publishable even before it is adopted.
    const RevisionTarget& target_at(std::uint32_t rev) const {
        if (const RevRecord* r = find_record(rev)) return r->target;
        if (pending_ && pending_->rev == rev) return pending_->target;
        throw ChannelError(ChannelErrorCode::StaleRevision, "unknown revision");
    }
    bool knows_revision(std::uint32_t rev) const {
        return find_record(rev) != nullptr || (pending_ && pending_->rev == rev);
    }

private:
    struct RevRecord {
        RevisionTarget target;
        HashLock my_lock;
        HashLock their_lock;
        std::optional<Sig> their_sig;  // their signature over MY commitment
    };

    struct Pending {
        std::uint32_t rev = 0;
        RevisionTarget target;
        HashLock my_lock;
        HashLock their_lock;
        bool have_their_lock = false;
        std::optional<Sig> their_sig;
    };

    void start_pending(std::uint32_t rev, RevisionTarget target) {
        Pending p;
        p.rev = rev;
        p.target = std::move(target);
        p.my_lock = revision_lock(rev);
        pending_ = std::move(p);
        revealed_mine_ = false;
    }

    void set_their_lock(const HashLock& lock) {
        Pending& p = require_pending();
        if (p.have_their_lock && !(p.their_lock == lock))
            throw ChannelError(ChannelErrorCode::BadState, "conflicting counterparty lock");
        p.their_lock = lock;
        p.have_their_lock = true;
    }

    void adopt_pending() {
        Pending& p = require_pending();
        revisions_[p.rev] = RevRecord{p.target, p.my_lock, p.their_lock, p.their_sig};
        revision_ = p.rev;
        pending_.reset();
        revealed_mine_ = false;
    }

    Pending& require_pending() {
        if (!pending_) throw ChannelError(ChannelErrorCode::BadState, "no update in flight");
        return *pending_;
    }
    const Pending& require_pending() const {
        if (!pending_) throw ChannelError(ChannelErrorCode::BadState, "no update in flight");
        return *pending_;
    }

    const RevRecord* find_record(std::uint32_t rev) const {
        auto it = revisions_.find(rev);
        return it == revisions_.end() ? nullptr : &it->second;
    }
    const RevRecord& record_at(std::uint32_t rev) const {
        const RevRecord* r = find_record(rev);
        if (!r) throw ChannelError(ChannelErrorCode::StaleRevision, "unknown revision");
        return *r;
    }

    Transaction unsigned_commitment(const RevisionTarget& t, const Address& owner,
                                    const HashLock& owner_lock) const {
        Transaction tx;
        tx.inputs.push_back({funding_, Sig2Witness{}});
        tx.outputs = commitment_outputs(params_, t, owner, owner_lock);
        return tx;
    }

    //! Arrange two signatures into multisig2(party_a, party_b) order.
    Sig2Witness order_sigs(const Sig& mine, const Sig& theirs) const {
        if (me_.addr == params_.party_a) return Sig2Witness{mine, theirs};
        return Sig2Witness{theirs, mine};
    }

    ChannelParams params_;
    Keypair me_;
    std::string seed_;
    ChannelStatus status_ = ChannelStatus::Init;
    std::uint32_t revision_ = 0;
    OutPoint funding_;
    std::map<std::uint32_t, RevRecord> revisions_;
    std::map<std::uint32_t, Secret> their_revealed_;
    std::map<HashLock, Secret> payment_secrets_;
    std::optional<Pending> pending_;
    bool revealed_mine_ = false;
    std::optional<Address> closed_by_;
    std::uint32_t closed_revision_ = 0;
};

// ---- balance-sheet builders ----
//
// Each produces the next RevisionTarget from a party's current state,
// validating the business rules; the result feeds the shared handshake.

inline RevisionTarget target_update_balance(const ChannelState& s, Amount new_a, Amount new_b) {
    RevisionTarget t = s.current();
    t.balance_a = new_a;
    t.balance_b = new_b;
    return t;
}

inline RevisionTarget target_add_bet(const ChannelState& s, const Bet& bet,
                                     std::uint32_t chain_height) {
    if (bet.total().is_zero())
        throw ChannelError(ChannelErrorCode::BadState, "bet with zero stakes");
    if (bet.backer == bet.doubter)
        throw ChannelError(ChannelErrorCode::BadState, "backer and doubter must differ");
    const ChannelParams& p = s.params();
    auto is_party = [&](const Address& a) { return a == p.party_a || a == p.party_b; };
    if (!is_party(bet.backer) || !is_party(bet.doubter))
        throw ChannelError(ChannelErrorCode::BadState, "bet parties are not channel parties");
    if (bet.deadline.height <= chain_height)
        throw ChannelError(ChannelErrorCode::DeadlinePassed, "bet deadline not in the future");
    RevisionTarget t = s.current();
    Amount& doubter_bal = bet.doubter == p.party_a ? t.balance_a : t.balance_b;
    Amount& backer_bal = bet.backer == p.party_a ? t.balance_a : t.balance_b;
    if (doubter_bal < bet.doubter_stake || backer_bal < bet.backer_stake)
        throw ChannelError(ChannelErrorCode::InsufficientBalance,
                           "stake exceeds the staker's balance");
    doubter_bal -= bet.doubter_stake;
    backer_bal -= bet.backer_stake;
    t.bets.push_back(bet);
    return t;
}

inline RevisionTarget target_settle_bet(const ChannelState& s, const PropositionId& prop,
                                        const Address& winner) {
    RevisionTarget t = s.current();
    auto it = std::find_if(t.bets.begin(), t.bets.end(),
                           [&](const Bet& b) { return b.prop == prop; });
    if (it == t.bets.end())
        throw ChannelError(ChannelErrorCode::NoSuchBet, "no active bet on this proposition");
    if (winner != it->backer && winner != it->doubter)
        throw ChannelError(ChannelErrorCode::BadState, "winner is not a bet party");
    Amount& winner_bal = winner == s.params().party_a ? t.balance_a : t.balance_b;
    winner_bal += it->total();
    t.bets.erase(it);
    return t;
}

inline RevisionTarget target_add_htlc(const ChannelState& s, const PaymentHtlc& ph) {
    const ChannelParams& p = s.params();
    if (ph.amount.is_zero())
        throw ChannelError(ChannelErrorCode::BadState, "zero-amount payment");
    if (ph.payee != p.party_a && ph.payee != p.party_b)
        throw ChannelError(ChannelErrorCode::BadState, "payee is not a channel party");
    RevisionTarget t = s.current();
    Amount& payer_bal = ph.payee == p.party_a ? t.balance_b : t.balance_a;
    if (payer_bal < ph.amount)
        throw ChannelError(ChannelErrorCode::InsufficientBalance,
                           "payment exceeds the payer's balance");
    payer_bal -= ph.amount;
    t.htlcs.push_back(ph);
    return t;
}

inline RevisionTarget target_resolve_htlc(const ChannelState& s, const HashLock& lock,
                                          const Secret* secret) {
    RevisionTarget t = s.current();
    auto it = std::find_if(t.htlcs.begin(), t.htlcs.end(),
                           [&](const PaymentHtlc& h) { return h.lock == lock; });
    if (it == t.htlcs.end())
        throw ChannelError(ChannelErrorCode::NoSuchHtlc, "no payment with this lock");
    if (secret) {  // settle: payee collects
        if (hash_secret(*secret) != lock)
            throw ChannelError(ChannelErrorCode::BadSecret, "settlement secret does not match");
        Amount& payee_bal = it->payee == s.params().party_a ? t.balance_a : t.balance_b;
        payee_bal += it->amount;
    } else {  // fail: payer reclaims
        Amount& payer_bal = it->payee == s.params().party_a ? t.balance_b : t.balance_a;
        payer_bal += it->amount;
    }
    t.htlcs.erase(it);
    return t;
}

// ---- two-party drivers ----
//
// Convenience sequences for tests and policies that run both sides of a
// handshake to completion. Anything that must stop half-way calls the
// individual ChannelState methods instead.

//! Full four-step update handshake on an agreed balance sheet.
inline void run_update(ChannelState& a, ChannelState& b, const RevisionTarget& target) {
    HashLock la = a.begin_update(target);
    HashLock lb = b.begin_update(target);
    a.receive_update_lock(lb);
    b.receive_update_lock(la);
    Sig sig_for_b = a.sign_peer_commitment();
    Sig sig_for_a = b.sign_peer_commitment();
    a.receive_commit_sig(sig_for_a);
    b.receive_commit_sig(sig_for_b);
    Secret ra = a.reveal_revocation();
    Secret rb = b.reveal_revocation();
    a.receive_revocation(rb);
    b.receive_revocation(ra);
    a.finalize_update();
    b.finalize_update();
}

inline void update_balance(ChannelState& a, ChannelState& b, Amount new_a, Amount new_b) {
    run_update(a, b, target_update_balance(a, new_a, new_b));
}

inline void add_bet(ChannelState& a, ChannelState& b, const Bet& bet,
                    std::uint32_t chain_height) {
    run_update(a, b, target_add_bet(a, bet, chain_height));
}

inline void settle_bet(ChannelState& a, ChannelState& b, const PropositionId& prop,
                       const Address& winner) {
    run_update(a, b, target_settle_bet(a, prop, winner));
}

inline void add_htlc(ChannelState& a, ChannelState& b, const PaymentHtlc& ph) {
    run_update(a, b, target_add_htlc(a, ph));
}

inline void settle_htlc(ChannelState& a, ChannelState& b, const Secret& secret) {
    run_update(a, b, target_resolve_htlc(a, hash_secret(secret), &secret));
}

inline void fail_htlc(ChannelState& a, ChannelState& b, const HashLock& lock) {
    run_update(a, b, target_resolve_htlc(a, lock, nullptr));
}

//! Fund and open a channel from one faucet utxo per party. Builds the
//! funding transaction (capacity to the 2-of-2, change back to each party),
//! cross-signs the initial commitments, then signs and submits the funding
//! and advances one block.
struct OpenResult {
    Transaction funding_tx;
    OutPoint funding_outpoint;
};

inline OpenResult open_channel(ChainState& chain, ChannelState& a, ChannelState& b,
                               const OutPoint& utxo_a, const OutPoint& utxo_b) {
    const ChannelParams& p = a.params();
    const UtxoEntry* ua = chain.find_utxo(utxo_a);
    const UtxoEntry* ub = chain.find_utxo(utxo_b);
    if (!ua || ua->out.amount < p.contrib_a)
        throw ChannelError(ChannelErrorCode::InsufficientFunds,
                           "party A's utxo does not cover the contribution");
    if (!ub || ub->out.amount < p.contrib_b)
        throw ChannelError(ChannelErrorCode::InsufficientFunds,
                           "party B's utxo does not cover the contribution");

    Transaction funding;
    funding.inputs.push_back({utxo_a, SigWitness{}});
    funding.inputs.push_back({utxo_b, SigWitness{}});
    funding.outputs.push_back({p.capacity(), multisig2(p.party_a, p.party_b)});
    Amount change_a = ua->out.amount - p.contrib_a;
    Amount change_b = ub->out.amount - p.contrib_b;
    if (!change_a.is_zero()) funding.outputs.push_back({change_a, pay_to(p.party_a)});
    if (!change_b.is_zero()) funding.outputs.push_back({change_b, pay_to(p.party_b)});
    OutPoint funding_op{tx_id(funding), 0};  // id ignores witnesses: known pre-signing

    a.set_funding(funding_op);
    b.set_funding(funding_op);
    HashLock la = a.initial_lock();
    HashLock lb = b.initial_lock();
    a.receive_initial_lock(lb);
    b.receive_initial_lock(la);
    Sig sig_for_b = a.sign_peer_commitment();
    Sig sig_for_a = b.sign_peer_commitment();
    a.receive_commit_sig(sig_for_a);
    b.receive_commit_sig(sig_for_b);

    // Only now is it safe to sign the funding transaction.
    funding.inputs[0].witness = SigWitness{a.sign_funding(funding)};
    funding.inputs[1].witness = SigWitness{b.sign_funding(funding)};
    SubmitResult r = chain.submit(funding);
    if (!r.accepted())
        throw ChannelError(ChannelErrorCode::InsufficientFunds,
                           std::string("funding rejected: ") + reject_code_name(r.code));
    chain.advance_blocks(1);
    a.mark_open();
    b.mark_open();
    return OpenResult{funding, funding_op};
}

//! Both parties sign and submit a cooperative close at current balances.
inline Transaction close_cooperative(ChainState& chain, ChannelState& a, ChannelState& b) {
    Transaction tx = a.build_cooperative_close();
    Transaction check = b.build_cooperative_close();
    if (!(tx_digest(tx) == tx_digest(check)))
        throw ChannelError(ChannelErrorCode::BalanceMismatch,
                           "parties disagree on the closing balances");
    tx = a.attach_close_sigs(tx, a.sign_tx(tx), b.sign_tx(tx));
    SubmitResult r = chain.submit(tx);
    if (!r.accepted())
        throw ChannelError(ChannelErrorCode::BadState,
                           std::string("close rejected: ") + reject_code_name(r.code));
    a.note_cooperative_close();
    b.note_cooperative_close();
    return tx;
}

// ---- on-chain claims after a unilateral close ----

enum class ClaimPath {
    DelaySig,      // my balance, or payment refund, through the delay
    DelayProven,   // bet output, backer side
    DelayTimeout,  // bet output, doubter side
    Secret,        // htlc secret branch (payment settle or punishment)
};

//! One-input, one-output spend of a commitment output to `dest`.
inline Transaction build_claim(const OutPoint& op, Amount amount, const Keypair& signer,
                               const Address& dest, ClaimPath path,
                               const Secret* secret = nullptr) {
    Transaction tx;
    tx.inputs.push_back({op, SigWitness{}});
    tx.outputs.push_back({amount, pay_to(dest)});
    Sig sig = sign(signer.priv, tx_digest(tx));
    switch (path) {
        case ClaimPath::DelaySig: tx.inputs[0].witness = DelayBranch{SigWitness{sig}}; break;
        case ClaimPath::DelayProven: tx.inputs[0].witness = DelayBranch{ProvenBranch{sig}}; break;
        case ClaimPath::DelayTimeout:
            tx.inputs[0].witness = DelayBranch{TimeoutBranch{sig}};
            break;
        case ClaimPath::Secret:
            if (!secret)
                throw ChannelError(ChannelErrorCode::BadSecret, "secret claim without secret");
            tx.inputs[0].witness = SecretBranch{*secret, sig};
            break;
    }
    return tx;
}

//! What a party can eventually take from a published commitment of revision
//! `rev`. Pointers alias the state's revision record; valid until the next
//! update.
struct ClaimPlan {
    std::uint32_t vout = 0;
    Amount amount;
    ClaimPath path = ClaimPath::DelaySig;
    const Bet* bet = nullptr;          // set for bet outputs
    const PaymentHtlc* htlc = nullptr; // set for payment outputs
};

//! Claims available to `s`'s owner on the commitment `publisher` put on
//! chain. On my own commitment my balance sits behind the delay; on the
//! counterparty's it pays me directly and needs no claim. Bet outputs are
//! claimable from either commitment: the delay gates both ptlc branches.
inline std::vector<ClaimPlan> claim_plans(const ChannelState& s, std::uint32_t rev,
                                          const Address& publisher) {
    const RevisionTarget& t = s.target_at(rev);
    const ChannelParams& p = s.params();
    std::vector<ClaimPlan> plans;
    std::uint32_t vout = 0;
    auto balance = [&](const Address& who, Amount amt) {
        if (amt.is_zero()) return;
        if (who == s.me() && who == publisher)
            plans.push_back({vout, amt, ClaimPath::DelaySig, nullptr, nullptr});
        ++vout;
    };
    balance(p.party_a, t.balance_a);
    balance(p.party_b, t.balance_b);
    for (const auto& bet : t.bets) {
        ClaimPath path = s.me() == bet.backer ? ClaimPath::DelayProven : ClaimPath::DelayTimeout;
        plans.push_back({vout, bet.total(), path, &bet, nullptr});
        ++vout;
    }
    for (const auto& ph : t.htlcs) {
        if (ph.payee == s.me()) {
            if (s.payment_secret(ph.lock))
                plans.push_back({vout, ph.amount, ClaimPath::Secret, nullptr, &ph});
        } else {
            plans.push_back({vout, ph.amount, ClaimPath::DelaySig, nullptr, &ph});
        }
        ++vout;
    }
    return plans;
}

} // namespace pfc

#endif // PROOFCHANNELS_CHANNEL_HPP
