// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// The two-party wire protocol and the deterministic simulation harness.
//
// Actors exchange typed messages over a single in-order wire; a scheduler
// drains the wire to quiescence between scripted directives and hands every
// new block to every actor in declared order. All behavior — handshake
// mechanics, watch-tower sweeps, deadline reactions, on-chain claims — runs
// from these two entry points, so a run is a pure function of (scenario,
// seed) and the event log is byte-stable.
//
// Policies tune the decision points: honest actors settle and punish,
// cheaters publish revoked revisions, withholders keep proofs private until
// the last safe block, public revealers push every proof they see on chain.
// Faults (drops, silence, revoked publication, proof withholding) are
// modeled in the harness, not as errors.

#ifndef PROOFCHANNELS_PEER_HPP
#define PROOFCHANNELS_PEER_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "market.hpp"

namespace pfc {

// ---- proofs ----

//! Opaque stand-in for a proof document. Validity is decided by the
//! scenario's ground-truth oracle, not by real proof checking.
struct ProofBlob {
    PropositionId prop;
    std::vector<std::uint8_t> payload;
    bool operator==(const ProofBlob&) const = default;
};

//! Ground truth: which propositions are provable, and by which payload.
class ProofOracle {
public:
    void add(const PropositionId& prop, std::vector<std::uint8_t> payload) {
        truth_[prop] = std::move(payload);
    }
    bool provable(const PropositionId& prop) const { return truth_.count(prop) != 0; }
    const std::vector<std::uint8_t>* payload_for(const PropositionId& prop) const {
        auto it = truth_.find(prop);
        return it == truth_.end() ? nullptr : &it->second;
    }

private:
    std::map<PropositionId, std::vector<std::uint8_t>> truth_;
};

inline bool verify_proof(const ProofBlob& blob, const ProofOracle& oracle) {
    const auto* want = oracle.payload_for(blob.prop);
    return want && *want == blob.payload;
}

// ---- messages ----

struct OpenReq {
    std::string chan;
    ChannelParams params;
    OutPoint utxo;    // the sender's funding input
    HashLock lock;    // the sender's revision-1 lock
};
struct OpenAck {
    std::string chan;
    OutPoint utxo;
    HashLock lock;
};
struct FundingSig {
    std::string chan;
    Sig sig;
};
struct CommitSig {
    std::string chan;
    std::uint32_t revision = 0;
    Sig sig;
};
struct RevokeAck {
    std::string chan;
    std::uint32_t revision = 0;  // the revision being revoked
    Secret secret;
};
struct UpdateReq {
    std::string chan;
    RevisionTarget target;
    HashLock lock;
};
struct UpdateAck {
    std::string chan;
    std::uint32_t revision = 0;
    HashLock lock;
};
struct BetPropose {
    std::string chan;
    Bet bet;
};
struct BetAccept {
    std::string chan;
    Bet bet;
};
struct ProofReveal {
    ProofBlob blob;
};
struct SettleReq {
    std::string chan;
    PropositionId prop;
    Address winner;
};
struct SettleAck {
    std::string chan;
    PropositionId prop;
    Address winner;
};
struct HtlcAdd {
    std::string chan;
    PaymentHtlc htlc;
};
struct HtlcSettle {
    std::string chan;
    Secret secret;
};
struct HtlcFail {
    std::string chan;
    HashLock lock;
};
struct CloseReq {
    std::string chan;
    Amount balance_a;
    Amount balance_b;
};
struct CloseSig {
    std::string chan;
    Sig sig;
};

using Message = std::variant<OpenReq, OpenAck, FundingSig, CommitSig, RevokeAck, UpdateReq,
                             UpdateAck, BetPropose, BetAccept, ProofReveal, SettleReq, SettleAck,
                             HtlcAdd, HtlcSettle, HtlcFail, CloseReq, CloseSig>;

inline const char* message_name(const Message& m) {
    struct Namer {
        const char* operator()(const OpenReq&) { return "OpenReq"; }
        const char* operator()(const OpenAck&) { return "OpenAck"; }
        const char* operator()(const FundingSig&) { return "FundingSig"; }
        const char* operator()(const CommitSig&) { return "CommitSig"; }
        const char* operator()(const RevokeAck&) { return "RevokeAck"; }
        const char* operator()(const UpdateReq&) { return "UpdateReq"; }
        const char* operator()(const UpdateAck&) { return "UpdateAck"; }
        const char* operator()(const BetPropose&) { return "BetPropose"; }
        const char* operator()(const BetAccept&) { return "BetAccept"; }
        const char* operator()(const ProofReveal&) { return "ProofReveal"; }
        const char* operator()(const SettleReq&) { return "SettleReq"; }
        const char* operator()(const SettleAck&) { return "SettleAck"; }
        const char* operator()(const HtlcAdd&) { return "HtlcAdd"; }
        const char* operator()(const HtlcSettle&) { return "HtlcSettle"; }
        const char* operator()(const HtlcFail&) { return "HtlcFail"; }
        const char* operator()(const CloseReq&) { return "CloseReq"; }
        const char* operator()(const CloseSig&) { return "CloseSig"; }
    };
    return std::visit(Namer{}, m);
}

//! The channel a message belongs to, empty for channel-less messages.
inline std::string message_chan(const Message& m) {
    return std::visit(
        [](const auto& t) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(t)>, ProofReveal>)
                return "";
            else
                return t.chan;
        },
        m);
}

struct Envelope {
    std::string from;
    std::string to;
    std::uint64_t seq = 0;  // monotone per sender
    Message msg;
};

// ---- policies and faults ----

enum class PolicyKind {
    Manual,          // acts only on scripted directives
    Honest,          // settles, watches, punishes, claims
    Cheater,         // publishes a configured revoked revision instead of closing
    Withholder,      // never reveals proofs off-chain; claims at the last safe block
    PublicRevealer,  // pushes every proof it sees on chain immediately
};

inline const char* policy_kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::Manual: return "manual";
        case PolicyKind::Honest: return "honest";
        case PolicyKind::Cheater: return "cheater";
        case PolicyKind::Withholder: return "withholder";
        case PolicyKind::PublicRevealer: return "public-revealer";
    }
    return "?";
}

struct PolicySpec {
    PolicyKind kind = PolicyKind::Honest;
    std::uint32_t grace = 2;           // blocks of stall before going on-chain
    std::uint32_t cheat_revision = 1;  // Cheater: which revoked revision to publish
};

//! Matches messages to be discarded in flight.
struct DropRule {
    std::string message;  // message name, or "*"
    std::string from;     // actor name, or empty for any
    std::string to;
    std::uint32_t remaining = 1;
};

// ---- actors ----

//! A state change one side has agreed to and will recognize when the
//! corresponding UpdateReq arrives.
struct Intent {
    enum class Kind { AddBet, SettleBet, AddHtlc, SettleHtlc, FailHtlc };
    Kind kind = Kind::AddBet;
    Bet bet;             // AddBet
    PropositionId prop;  // SettleBet
    Address winner;      // SettleBet
    PaymentHtlc htlc;    // AddHtlc
    Secret secret;       // SettleHtlc
    HashLock lock;       // SettleHtlc / FailHtlc
};

//! An intermediary's standing instruction: when this htlc appears inbound,
//! offer the outbound one.
struct ForwardPlan {
    HashLock lock;
    std::string in_chan;
    std::string out_chan;
    PaymentHtlc out_htlc;
};

struct ChannelSlot {
    ChannelSlot(ChannelParams params, const Keypair& keys, std::string secret_seed,
                std::string peer)
        : state(std::move(params), keys, std::move(secret_seed)), peer_actor(std::move(peer)) {}

    ChannelState state;
    std::string peer_actor;

    // Opening scratch.
    bool i_initiated = false;
    OutPoint my_open_utxo;
    Transaction funding_tx;
    bool have_funding_tx = false;
    std::optional<Sig> peer_funding_sig;
    bool funding_submitted = false;

    // Update bookkeeping.
    std::vector<Intent> my_intents;        // outbound proposals awaiting their UpdateReq
    std::vector<Intent> accepted_intents;  // inbound proposals I agreed to
    std::deque<Intent> deferred_starts;    // updates waiting for the current one to land
    std::string update_desc;               // label for the in-flight update

    // Cooperative close scratch.
    Transaction close_tx;
    bool close_requested = false;

    // Published commitment tracking (mine or theirs).
    struct Published {
        TxId txid;
        std::uint32_t rev = 0;
        bool by_me = false;
    };
    std::optional<Published> published;
    bool breached = false;                    // peer published revoked; I swept
    std::set<std::uint32_t> resolved_vouts;   // claims done or abandoned

    // Deadline/stall bookkeeping.
    std::map<PropositionId, std::uint32_t> timeout_settle_height;
    std::map<HashLock, std::uint32_t> htlc_fail_height;
    std::optional<std::uint32_t> stall_since;
};

struct Actor {
    std::string name;
    Keypair keys;
    PolicySpec policy;
    std::map<std::string, ChannelSlot> channels;  // by channel id
    std::map<PropositionId, ProofBlob> proofs;    // proofs this actor holds
    std::map<PropositionId, bool> revealed_flags; // props already pushed to peers
    std::vector<ForwardPlan> forwards;
    std::vector<OutPoint> spendable;              // unspent faucet/change outpoints
    std::uint64_t next_seq = 1;
    std::map<std::string, std::uint64_t> expect_seq;
    bool silenced = false;
    bool withhold_proofs = false;
};

// ---- the harness ----

class Harness {
public:
    explicit Harness(std::uint64_t seed) : seed_(seed) {}

    ChainState& chain() { return chain_; }
    const ChainState& chain() const { return chain_; }
    ProofOracle& oracle() { return oracle_; }

    Actor& add_actor(const std::string& name, PolicySpec policy) {
        actors_.emplace_back();
        Actor& a = actors_.back();
        a.name = name;
        a.keys = keygen("actor:" + name + ":" + std::to_string(seed_));
        a.policy = policy;
        index_[name] = actors_.size() - 1;
        return a;
    }

    Actor& actor(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::invalid_argument("unknown actor: " + name);
        return actors_[it->second];
    }
    const Actor& actor(const std::string& name) const {
        return const_cast<Harness*>(this)->actor(name);
    }
    std::vector<std::string> actor_names() const {
        std::vector<std::string> out;
        for (const auto& a : actors_) out.push_back(a.name);
        return out;
    }

    void faucet(const std::string& name, Amount amount) {
        Actor& a = actor(name);
        a.spendable.push_back(chain_.faucet(a.keys.addr, amount));
    }

    //! Declare a channel; `a_name` becomes party A. Funding happens at the
    //! open directive.
    void declare_channel(const std::string& chan, const std::string& a_name,
                         const std::string& b_name, Amount contrib_a, Amount contrib_b,
                         RelativeDelay csv = RelativeDelay{48}) {
        Actor& a = actor(a_name);
        Actor& b = actor(b_name);
        ChannelParams params{a.keys.addr, b.keys.addr, contrib_a, contrib_b, csv};
        a.channels.try_emplace(chan, params, a.keys, secret_seed(chan, a_name), b_name);
        b.channels.try_emplace(chan, params, b.keys, secret_seed(chan, b_name), a_name);
    }

    // ---- directives ----

    //! Message-driven funding handshake, then one block so the funding
    //! confirms and both sides open.
    void open(const std::string& chan) {
        auto [initiator, slot] = party_a_side(chan);
        log(initiator->name, "directive", "kind=open,chan=" + chan);
        slot->i_initiated = true;
        slot->my_open_utxo = take_spendable(*initiator, slot->state.params().contrib_a);
        HashLock lock = slot->state.initial_lock();
        send(*initiator, slot->peer_actor,
             OpenReq{chan, slot->state.params(), slot->my_open_utxo, lock});
        pump();
        advance_one();
    }

    //! Plain balance shift: `from` pays `amount` to the other party.
    void pay(const std::string& chan, const std::string& from, Amount amount) {
        Actor& payer = actor(from);
        ChannelSlot& slot = slot_of(payer, chan);
        log(from, "directive",
            "kind=pay,chan=" + chan + ",amount=" + amount.to_bars_string());
        const ChannelParams& p = slot.state.params();
        RevisionTarget t = slot.state.current();
        if (payer.keys.addr == p.party_a) {
            t.balance_a = t.balance_a - amount;
            t.balance_b = t.balance_b + amount;
        } else {
            t.balance_b = t.balance_b - amount;
            t.balance_a = t.balance_a + amount;
        }
        initiate_update(payer, slot, t, "pay");
        pump();
    }

    //! The doubter proposes the bet; stakes come out of both balances.
    void bet(const std::string& chan, const std::string& doubter_name, Amount doubter_stake,
             Amount backer_stake, const std::string& prop_name, std::uint32_t deadline) {
        Actor& doubter = actor(doubter_name);
        ChannelSlot& slot = slot_of(doubter, chan);
        Actor& backer = actor(slot.peer_actor);
        Bet b{proposition_id(prop_name), doubter_stake, backer_stake, AbsoluteHeight{deadline},
              backer.keys.addr, doubter.keys.addr};
        log(doubter_name, "directive",
            "kind=bet,chan=" + chan + ",prop=" + prop_name +
                ",doubter=" + doubter_stake.to_bars_string() +
                ",backer=" + backer_stake.to_bars_string() +
                ",deadline=" + std::to_string(deadline));
        send(doubter, slot.peer_actor, BetPropose{chan, b});
        pump();
    }

    //! Hand an actor the ground-truth proof document. Honest backers run
    //! with it immediately.
    void give_proof(const std::string& name, const std::string& prop_name) {
        Actor& a = actor(name);
        PropositionId prop = proposition_id(prop_name);
        const auto* payload = oracle_.payload_for(prop);
        if (!payload)
            throw std::invalid_argument("proposition has no proof: " + prop_name);
        log(name, "directive", "kind=reveal,prop=" + prop_name);
        a.proofs[prop] = ProofBlob{prop, *payload};
        maybe_public_reveal(a, prop);
        backer_flow(a);
        pump();
    }

    //! Scripted settlement request from `winner_name`'s side.
    void settle(const std::string& chan, const std::string& prop_name,
                const std::string& winner_name) {
        Actor& w = actor(winner_name);
        ChannelSlot& slot = slot_of(w, chan);
        log(winner_name, "directive", "kind=settle,chan=" + chan + ",prop=" + prop_name);
        send(w, slot.peer_actor, SettleReq{chan, proposition_id(prop_name), w.keys.addr});
        pump();
    }

    //! Anyone may put a proof on the chain's registry directly; stands for
    //! third-party publication.
    void register_proof(const std::string& prop_name) {
        PropositionId prop = proposition_id(prop_name);
        if (!oracle_.provable(prop))
            throw std::invalid_argument("proposition has no proof: " + prop_name);
        log("-", "directive", "kind=register,prop=" + prop_name);
        chain_.register_proof(prop);
        log("-", "proof", "prop=" + prop_name.substr(0, 12));
    }

    //! Cooperative close initiated by party A's side.
    void close(const std::string& chan) {
        auto [initiator, slot] = party_a_side(chan);
        log(initiator->name, "directive", "kind=close,chan=" + chan);
        slot->close_tx = slot->state.build_cooperative_close();
        slot->close_requested = true;
        const RevisionTarget& t = slot->state.current();
        send(*initiator, slot->peer_actor, CloseReq{chan, t.balance_a, t.balance_b});
        pump();
        advance_one();  // confirm the close transaction
    }

    void close_unilateral(const std::string& chan, const std::string& name) {
        Actor& a = actor(name);
        ChannelSlot& slot = slot_of(a, chan);
        log(name, "directive", "kind=close-unilateral,chan=" + chan);
        publish_commitment(a, slot, slot.state.latest_signed_revision(), false);
        pump();
    }

    void advance(std::uint32_t k) {
        log("-", "directive", "kind=advance,blocks=" + std::to_string(k));
        for (std::uint32_t i = 0; i < k; ++i) advance_one();
    }

    //! Routed payment: one shared lock across every hop, forwarded by the
    //! intermediaries, settled backward from the payee.
    void route(Amount amount, const std::vector<std::string>& chans,
               const std::vector<Amount>& fees) {
        if (chans.size() < 1 || fees.size() + 1 != chans.size())
            throw std::invalid_argument("route: need n channels and n-1 fees");
        std::vector<Actor*> path = actors_along(chans);  // n+1 actors
        std::vector<Amount> hop_amounts = route_hop_amounts(amount, fees);

        Secret secret = derive_secret("route:" + std::to_string(seed_) + ":" +
                                      std::to_string(route_counter_++));
        HashLock lock = hash_secret(secret);
        Actor& payee = *path.back();
        slot_of(payee, chans.back()).state.learn_payment_secret(secret);

        std::ostringstream d;
        d << "kind=route,amount=" << amount.to_bars_string() << ",hops=" << chans.size();
        log(path.front()->name, "directive", d.str());

        // Expiries shrink toward the payee so each hop can refund upstream
        // after its downstream leg resolves.
        std::uint32_t h = chain_.height();
        auto expiry = [&](std::size_t i) {
            return AbsoluteHeight{h + 12 * static_cast<std::uint32_t>(chans.size() - i)};
        };
        for (std::size_t i = 0; i + 1 < chans.size(); ++i) {
            Actor& mid = *path[i + 1];
            PaymentHtlc out{lock, hop_amounts[i + 1], path[i + 2]->keys.addr, expiry(i + 1)};
            mid.forwards.push_back(ForwardPlan{lock, chans[i], chans[i + 1], out});
        }
        Actor& sender = *path.front();
        PaymentHtlc first{lock, hop_amounts[0], path[1]->keys.addr, expiry(0)};
        ChannelSlot& slot = slot_of(sender, chans.front());
        Intent it;
        it.kind = Intent::Kind::AddHtlc;
        it.htlc = first;
        slot.my_intents.push_back(it);
        send(sender, slot.peer_actor, HtlcAdd{chans.front(), first});
        pump();
    }

    //! Mirror the active bet on `up_chan` into `down_chan` through their
    //! shared actor, leaving that actor fully hedged.
    void hedge(const std::string& up_chan, const std::string& down_chan,
               const std::string& prop_name) {
        PropositionId prop = proposition_id(prop_name);
        Actor& middle = shared_actor(up_chan, down_chan);
        ChannelSlot& up = slot_of(middle, up_chan);
        ChannelSlot& down = slot_of(middle, down_chan);
        const Bet* upstream = nullptr;
        for (const Bet& b : up.state.bets())
            if (b.prop == prop) upstream = &b;
        if (!upstream)
            throw ChannelError(ChannelErrorCode::NoSuchBet, "no upstream bet to hedge");
        Actor& counterparty = actor(down.peer_actor);
        Bet mirrored = mirrored_hedge_bet(*upstream, middle.keys.addr, counterparty.keys.addr);
        validate_hedge(*upstream, mirrored);
        log(middle.name, "directive",
            "kind=hedge,up=" + up_chan + ",down=" + down_chan + ",prop=" + prop_name);
        send(middle, down.peer_actor, BetPropose{down_chan, mirrored});
        pump();
    }

    // ---- faults ----

    void fault_drop(const std::string& message, const std::string& from, const std::string& to,
                    std::uint32_t count) {
        log("-", "directive",
            "kind=fault-drop,msg=" + message + ",from=" + (from.empty() ? "*" : from) +
                ",to=" + (to.empty() ? "*" : to) + ",count=" + std::to_string(count));
        drops_.push_back(DropRule{message, from, to, count});
    }

    void fault_silence(const std::string& name) {
        log("-", "directive", "kind=fault-silence,actor=" + name);
        actor(name).silenced = true;
    }

    void fault_withhold(const std::string& name) {
        log("-", "directive", "kind=fault-withhold,actor=" + name);
        actor(name).withhold_proofs = true;
    }

    void fault_publish_revoked(const std::string& name, const std::string& chan,
                               std::uint32_t revision) {
        Actor& a = actor(name);
        ChannelSlot& slot = slot_of(a, chan);
        log(name, "directive",
            "kind=fault-publish-revoked,chan=" + chan + ",rev=" + std::to_string(revision));
        publish_commitment(a, slot, revision, false);
        pump();
    }

    //! Run the simulation out: advance blocks until every obligation is
    //! resolved or the round budget is exhausted (logged as a liveness
    //! failure).
    bool finish(std::uint32_t max_rounds) {
        log("-", "directive", "kind=finish,max-rounds=" + std::to_string(max_rounds));
        for (std::uint32_t i = 0; i < max_rounds; ++i) {
            pump();
            if (quiescent() && chain_.pending_tx_count() == 0) return true;
            advance_one();
        }
        log("-", "error", "reason=liveness,detail=round-budget-exhausted");
        return false;
    }

    // ---- inspection ----

    const std::vector<std::string>& log_lines() const { return log_; }
    const std::vector<std::string>& probability_lines() const { return probability_lines_; }
    Amount holdings(const std::string& name) const {
        return chain_.balance_of(actor(name).keys.addr);
    }
    std::string describe_address(const Address& addr) const {
        for (const auto& a : actors_)
            if (a.keys.addr == addr) return a.name;
        return addr.hex().substr(0, 8);
    }

private:
    // ---- plumbing ----

    std::string secret_seed(const std::string& chan, const std::string& who) const {
        return "chan:" + chan + ":" + who + ":" + std::to_string(seed_);
    }

    ChannelSlot& slot_of(Actor& a, const std::string& chan) {
        auto it = a.channels.find(chan);
        if (it == a.channels.end())
            throw std::invalid_argument("actor " + a.name + " has no channel " + chan);
        return it->second;
    }

    std::pair<Actor*, ChannelSlot*> party_a_side(const std::string& chan) {
        for (auto& a : actors_) {
            auto it = a.channels.find(chan);
            if (it != a.channels.end() && it->second.state.me() == it->second.state.params().party_a)
                return {&a, &it->second};
        }
        throw std::invalid_argument("unknown channel: " + chan);
    }

    Actor& shared_actor(const std::string& chan1, const std::string& chan2) {
        for (auto& a : actors_)
            if (a.channels.count(chan1) && a.channels.count(chan2)) return a;
        throw std::invalid_argument("no actor shares " + chan1 + " and " + chan2);
    }

    //! The n+1 actors along a channel path, endpoints outward.
    std::vector<Actor*> actors_along(const std::vector<std::string>& chans) {
        std::vector<Actor*> path;
        for (std::size_t i = 0; i + 1 < chans.size(); ++i) {
            Actor& mid = shared_actor(chans[i], chans[i + 1]);
            Actor& left = actor(slot_of(mid, chans[i]).peer_actor);
            if (i == 0) path.push_back(&left);
            path.push_back(&mid);
        }
        if (chans.size() == 1) {
            auto [a_side, slot] = party_a_side(chans[0]);
            path.push_back(a_side);
            path.push_back(&actor(slot->peer_actor));
        } else {
            Actor& last_mid = *path.back();
            path.push_back(&actor(slot_of(last_mid, chans.back()).peer_actor));
        }
        return path;
    }

    OutPoint take_spendable(Actor& a, Amount at_least) {
        for (auto it = a.spendable.begin(); it != a.spendable.end(); ++it) {
            const UtxoEntry* e = chain_.find_utxo(*it);
            if (!e) continue;
            if (e->out.amount >= at_least) {
                OutPoint op = *it;
                a.spendable.erase(it);
                return op;
            }
        }
        throw ChannelError(ChannelErrorCode::InsufficientFunds,
                           a.name + " has no utxo covering " + at_least.to_bars_string());
    }

    void log(const std::string& who, const std::string& event, const std::string& detail) {
        std::ostringstream os;
        os << "step=" << step_++ << " height=" << chain_.height() << " actor=" << who
           << " event=" << event << " detail=" << detail;
        log_.push_back(os.str());
    }

    void send(Actor& from, const std::string& to, Message msg) {
        if (from.silenced) return;  // a silenced actor's sends vanish
        std::string chan = message_chan(msg);
        std::ostringstream d;
        d << "msg=" << message_name(msg) << ",to=" << to;
        if (!chan.empty()) d << ",chan=" << chan;
        d << ",seq=" << from.next_seq;
        log(from.name, "send", d.str());
        wire_.push_back(Envelope{from.name, to, from.next_seq++, std::move(msg)});
    }

    bool drop_matches(const DropRule& r, const Envelope& env) const {
        if (r.message != "*" && r.message != message_name(env.msg)) return false;
        if (!r.from.empty() && r.from != env.from) return false;
        if (!r.to.empty() && r.to != env.to) return false;
        return true;
    }

    void pump() {
        while (!wire_.empty()) {
            Envelope env = std::move(wire_.front());
            wire_.pop_front();
            bool dropped = false;
            for (auto& rule : drops_) {
                if (rule.remaining > 0 && drop_matches(rule, env)) {
                    --rule.remaining;
                    log("-", "drop",
                        "msg=" + std::string(message_name(env.msg)) + ",from=" + env.from +
                            ",to=" + env.to + ",reason=fault");
                    dropped = true;
                    break;
                }
            }
            if (dropped) continue;
            Actor& to = actor(env.to);
            if (to.silenced) {
                log("-", "drop",
                    "msg=" + std::string(message_name(env.msg)) + ",from=" + env.from +
                        ",to=" + env.to + ",reason=silenced");
                continue;
            }
            std::uint64_t& expect = to.expect_seq[env.from];
            if (env.seq <= expect) {
                log(to.name, "error",
                    "reason=seq,from=" + env.from + ",seq=" + std::to_string(env.seq));
                continue;
            }
            expect = env.seq;
            std::string chan = message_chan(env.msg);
            std::ostringstream d;
            d << "msg=" << message_name(env.msg) << ",from=" << env.from;
            if (!chan.empty()) d << ",chan=" << chan;
            log(to.name, "recv", d.str());
            handle(to, env);
        }
    }

    SubmitResult submit_tx(const std::string& who, const std::string& kind,
                           const Transaction& tx) {
        SubmitResult r = chain_.submit(tx);
        std::ostringstream d;
        d << "kind=" << kind << ",tx=" << r.txid.short_hex()
          << ",result=" << reject_code_name(r.code);
        if (r.code == RejectCode::ScriptFailure) d << ",script=" << script_error_name(r.script_error);
        log(who, "submit", d.str());
        return r;
    }

    void advance_one() {
        chain_.advance_blocks(1);
        const ChainState::Block& blk = chain_.blocks().back();
        log("-", "block", "txs=" + std::to_string(blk.txs.size()));
        for (auto& a : actors_) {
            if (a.silenced) continue;
            on_block(a, blk);
        }
        pump();
    }

    // ---- protocol engine: message handlers ----

    void handle(Actor& a, const Envelope& env) {
        if (const auto* m = std::get_if<OpenReq>(&env.msg)) return on_open_req(a, *m);
        if (const auto* m = std::get_if<OpenAck>(&env.msg)) return on_open_ack(a, *m);
        if (const auto* m = std::get_if<FundingSig>(&env.msg)) return on_funding_sig(a, *m);
        if (const auto* m = std::get_if<CommitSig>(&env.msg)) return on_commit_sig(a, *m);
        if (const auto* m = std::get_if<RevokeAck>(&env.msg)) return on_revoke_ack(a, *m);
        if (const auto* m = std::get_if<UpdateReq>(&env.msg)) return on_update_req(a, *m);
        if (const auto* m = std::get_if<UpdateAck>(&env.msg)) return on_update_ack(a, *m);
        if (const auto* m = std::get_if<BetPropose>(&env.msg)) return on_bet_propose(a, *m);
        if (const auto* m = std::get_if<BetAccept>(&env.msg)) return on_bet_accept(a, *m);
        if (const auto* m = std::get_if<ProofReveal>(&env.msg)) return on_proof_reveal(a, *m);
        if (const auto* m = std::get_if<SettleReq>(&env.msg)) return on_settle_req(a, *m);
        if (const auto* m = std::get_if<SettleAck>(&env.msg)) return on_settle_ack(a, *m);
        if (const auto* m = std::get_if<HtlcAdd>(&env.msg)) return on_htlc_add(a, *m);
        if (const auto* m = std::get_if<HtlcSettle>(&env.msg)) return on_htlc_settle(a, *m);
        if (const auto* m = std::get_if<HtlcFail>(&env.msg)) return on_htlc_fail(a, *m);
        if (const auto* m = std::get_if<CloseReq>(&env.msg)) return on_close_req(a, *m);
        if (const auto* m = std::get_if<CloseSig>(&env.msg)) return on_close_sig(a, *m);
    }

    //! Identical on both sides: inputs ordered party A then party B.
    Transaction build_funding(const ChannelParams& p, const OutPoint& utxo_a,
                              const OutPoint& utxo_b) {
        const UtxoEntry* ua = chain_.find_utxo(utxo_a);
        const UtxoEntry* ub = chain_.find_utxo(utxo_b);
        if (!ua || ua->out.amount < p.contrib_a || !ub || ub->out.amount < p.contrib_b)
            throw ChannelError(ChannelErrorCode::InsufficientFunds,
                               "funding inputs do not cover the contributions");
        Transaction tx;
        tx.inputs.push_back({utxo_a, SigWitness{}});
        tx.inputs.push_back({utxo_b, SigWitness{}});
        tx.outputs.push_back({p.capacity(), multisig2(p.party_a, p.party_b)});
        Amount change_a = ua->out.amount - p.contrib_a;
        Amount change_b = ub->out.amount - p.contrib_b;
        if (!change_a.is_zero()) tx.outputs.push_back({change_a, pay_to(p.party_a)});
        if (!change_b.is_zero()) tx.outputs.push_back({change_b, pay_to(p.party_b)});
        return tx;
    }

    //! Remember my change output of a freshly built funding transaction so
    //! later channels can spend it once it confirms.
    void note_funding_change(Actor& a, const Transaction& funding) {
        TxId id = tx_id(funding);
        for (std::uint32_t i = 1; i < funding.outputs.size(); ++i) {
            const auto* pay = std::get_if<PayToAddr>(&funding.outputs[i].script.v);
            if (pay && pay->addr == a.keys.addr)
                a.spendable.push_back(OutPoint{id, i});
        }
    }

    void on_open_req(Actor& a, const OpenReq& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        const ChannelParams& p = slot.state.params();
        if (!(m.params.party_a == p.party_a) || !(m.params.party_b == p.party_b) ||
            m.params.contrib_a != p.contrib_a || m.params.contrib_b != p.contrib_b) {
            log(a.name, "error", "reason=open-params-mismatch,chan=" + m.chan);
            return;
        }
        bool i_am_a = a.keys.addr == p.party_a;
        Amount my_contrib = i_am_a ? p.contrib_a : p.contrib_b;
        slot.my_open_utxo = take_spendable(a, my_contrib);
        slot.funding_tx = build_funding(p, i_am_a ? slot.my_open_utxo : m.utxo,
                                        i_am_a ? m.utxo : slot.my_open_utxo);
        slot.have_funding_tx = true;
        note_funding_change(a, slot.funding_tx);
        slot.state.set_funding(OutPoint{tx_id(slot.funding_tx), 0});
        HashLock mine = slot.state.initial_lock();
        slot.state.receive_initial_lock(m.lock);
        send(a, slot.peer_actor, OpenAck{m.chan, slot.my_open_utxo, mine});
        send(a, slot.peer_actor, CommitSig{m.chan, 1, slot.state.sign_peer_commitment()});
    }

    void on_open_ack(Actor& a, const OpenAck& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        const ChannelParams& p = slot.state.params();
        bool i_am_a = a.keys.addr == p.party_a;
        slot.funding_tx = build_funding(p, i_am_a ? slot.my_open_utxo : m.utxo,
                                        i_am_a ? m.utxo : slot.my_open_utxo);
        slot.have_funding_tx = true;
        note_funding_change(a, slot.funding_tx);
        slot.state.set_funding(OutPoint{tx_id(slot.funding_tx), 0});
        slot.state.receive_initial_lock(m.lock);
        send(a, slot.peer_actor, CommitSig{m.chan, 1, slot.state.sign_peer_commitment()});
    }

    void on_funding_sig(Actor& a, const FundingSig& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        slot.peer_funding_sig = m.sig;
        try_submit_funding(a, slot, m.chan);
    }

    void try_submit_funding(Actor& a, ChannelSlot& slot, const std::string& chan) {
        // Party A's side submits once both funding signatures exist.
        if (a.keys.addr != slot.state.params().party_a) return;
        if (slot.funding_submitted || !slot.peer_funding_sig) return;
        if (slot.state.status() != ChannelStatus::CommitmentsExchanged) return;
        Sig mine = slot.state.sign_funding(slot.funding_tx);
        slot.funding_tx.inputs[0].witness = SigWitness{mine};
        slot.funding_tx.inputs[1].witness = SigWitness{*slot.peer_funding_sig};
        submit_tx(a.name, "funding", slot.funding_tx);
        slot.funding_submitted = true;
        (void)chan;
    }

    void on_commit_sig(Actor& a, const CommitSig& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        ChannelState& s = slot.state;
        try {
            s.receive_commit_sig(m.sig);
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + m.chan);
            return;
        }
        if (m.revision == 1 && s.status() == ChannelStatus::CommitmentsExchanged) {
            // Opening: it is now safe to sign the funding transaction.
            send(a, slot.peer_actor, FundingSig{m.chan, s.sign_funding(slot.funding_tx)});
            try_submit_funding(a, slot, m.chan);
            return;
        }
        if (!s.revealed_revocation())
            send(a, slot.peer_actor, RevokeAck{m.chan, s.revision(), s.reveal_revocation()});
        maybe_finalize(a, slot, m.chan);
    }

    void on_revoke_ack(Actor& a, const RevokeAck& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        ChannelState& s = slot.state;
        try {
            s.receive_revocation(m.secret);
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + m.chan);
            return;
        }
        if (!s.revealed_revocation())
            send(a, slot.peer_actor, RevokeAck{m.chan, s.revision(), s.reveal_revocation()});
        maybe_finalize(a, slot, m.chan);
    }

    void maybe_finalize(Actor& a, ChannelSlot& slot, const std::string& chan) {
        ChannelState& s = slot.state;
        if (!s.ready_to_finalize()) return;
        RevisionTarget before = s.current();
        s.finalize_update();
        log(a.name, "update",
            "chan=" + chan + ",rev=" + std::to_string(s.revision()) +
                ",kind=" + (slot.update_desc.empty() ? "update" : slot.update_desc));
        slot.update_desc.clear();
        after_update(a, slot, chan, before);
        // Start the next queued update. One that no longer applies (say the
        // other side settled the same bet in the revision that just landed)
        // is dropped; that is a resolution, not a failure.
        while (!slot.deferred_starts.empty() &&
               s.status() == ChannelStatus::Open && !s.has_pending()) {
            Intent it = std::move(slot.deferred_starts.front());
            slot.deferred_starts.pop_front();
            try {
                initiate_update(a, slot, apply_intent(s, it), intent_desc(it));
            } catch (const ChannelError& e) {
                log(a.name, "skip",
                    "chan=" + chan + ",kind=" + intent_desc(it) +
                        ",reason=" + e.what());
            }
        }
    }

    //! Reactions once a new revision is adopted: report fresh bets, forward
    //! routed htlcs, settle inbound htlcs we hold the secret for.
    void after_update(Actor& a, ChannelSlot& slot, const std::string& chan,
                      const RevisionTarget& before) {
        ChannelState& s = slot.state;
        const RevisionTarget& now = s.current();
        for (const Bet& b : now.bets) {
            bool fresh = true;
            for (const Bet& old : before.bets) fresh = fresh && !(old == b);
            if (!fresh) continue;
            if (s.me() == s.params().party_a) {
                std::string line = probability_report_line(b);
                probability_lines_.push_back(line);
                log(a.name, "probability", "chan=" + chan + "," + line);
            }
        }
        for (const PaymentHtlc& ph : now.htlcs) {
            bool fresh = true;
            for (const PaymentHtlc& old : before.htlcs) fresh = fresh && !(old == ph);
            if (!fresh || !(ph.payee == a.keys.addr)) continue;
            if (const Secret* sec = s.payment_secret(ph.lock)) {
                // Final recipient: push the secret back to the payer.
                Intent it;
                it.kind = Intent::Kind::SettleHtlc;
                it.secret = *sec;
                it.lock = ph.lock;
                slot.my_intents.push_back(it);
                send(a, slot.peer_actor, HtlcSettle{chan, *sec});
            } else {
                for (const ForwardPlan& fp : a.forwards) {
                    if (!(fp.lock == ph.lock) || fp.in_chan != chan) continue;
                    ChannelSlot& out = slot_of(a, fp.out_chan);
                    Intent it;
                    it.kind = Intent::Kind::AddHtlc;
                    it.htlc = fp.out_htlc;
                    out.my_intents.push_back(it);
                    send(a, out.peer_actor, HtlcAdd{fp.out_chan, fp.out_htlc});
                }
            }
        }
    }

    RevisionTarget apply_intent(const ChannelState& s, const Intent& it) {
        switch (it.kind) {
            case Intent::Kind::AddBet: return target_add_bet(s, it.bet, chain_.height());
            case Intent::Kind::SettleBet: return target_settle_bet(s, it.prop, it.winner);
            case Intent::Kind::AddHtlc: return target_add_htlc(s, it.htlc);
            case Intent::Kind::SettleHtlc:
                return target_resolve_htlc(s, it.lock, &it.secret);
            case Intent::Kind::FailHtlc: return target_resolve_htlc(s, it.lock, nullptr);
        }
        throw std::logic_error("unreachable");
    }

    const char* intent_desc(const Intent& it) const {
        switch (it.kind) {
            case Intent::Kind::AddBet: return "add-bet";
            case Intent::Kind::SettleBet: return "settle-bet";
            case Intent::Kind::AddHtlc: return "add-htlc";
            case Intent::Kind::SettleHtlc: return "settle-htlc";
            case Intent::Kind::FailHtlc: return "fail-htlc";
        }
        return "?";
    }

    //! Begin an update for an agreed intent, or queue it when another
    //! update is still in flight. Two settlements triggering in the same
    //! block would otherwise race: the second begin_update throws and the
    //! agreed change is lost. Queued intents restart in maybe_finalize.
    void start_or_defer(Actor& a, ChannelSlot& slot, const std::string& chan, Intent it) {
        ChannelState& s = slot.state;
        if (s.status() == ChannelStatus::Open && s.has_pending()) {
            slot.deferred_starts.push_back(std::move(it));
            return;
        }
        try {
            initiate_update(a, slot, apply_intent(s, it), intent_desc(it));
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + chan);
        }
    }

    //! A balance shift that cannot cost me anything: same bets and htlcs,
    //! my balance not reduced.
    bool benign_transfer(const ChannelState& s, const RevisionTarget& t) const {
        const RevisionTarget& cur = s.current();
        if (!(t.bets == cur.bets) || !(t.htlcs == cur.htlcs)) return false;
        bool i_am_a = s.me() == s.params().party_a;
        Amount mine_now = i_am_a ? cur.balance_a : cur.balance_b;
        Amount mine_then = i_am_a ? t.balance_a : t.balance_b;
        return mine_then >= mine_now;
    }

    void on_update_req(Actor& a, const UpdateReq& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        ChannelState& s = slot.state;
        if (s.status() != ChannelStatus::Open || s.has_pending()) {
            log(a.name, "error", "reason=update-not-acceptable,chan=" + m.chan);
            return;
        }
        std::string desc;
        bool matched = false;
        for (auto* list : {&slot.accepted_intents, &slot.my_intents}) {
            for (auto it = list->begin(); it != list->end(); ++it) {
                RevisionTarget want;
                try {
                    want = apply_intent(s, *it);
                } catch (const ChannelError&) {
                    continue;
                }
                if (want == m.target) {
                    desc = intent_desc(*it);
                    list->erase(it);
                    matched = true;
                    break;
                }
            }
            if (matched) break;
        }
        if (!matched) {
            if (benign_transfer(s, m.target)) {
                desc = "pay";
            } else {
                log(a.name, "error", "reason=update-rejected,chan=" + m.chan);
                return;
            }
        }
        try {
            s.begin_update(m.target);
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + m.chan);
            return;
        }
        slot.update_desc = desc;
        s.receive_update_lock(m.lock);
        send(a, slot.peer_actor,
             UpdateAck{m.chan, s.pending_revision(), s.revision_lock(s.pending_revision())});
        send(a, slot.peer_actor,
             CommitSig{m.chan, s.pending_revision(), s.sign_peer_commitment()});
    }

    void on_update_ack(Actor& a, const UpdateAck& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        try {
            slot.state.receive_update_lock(m.lock);
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + m.chan);
            return;
        }
        send(a, slot.peer_actor,
             CommitSig{m.chan, m.revision, slot.state.sign_peer_commitment()});
    }

    void initiate_update(Actor& a, ChannelSlot& slot, const RevisionTarget& target,
                         const std::string& desc) {
        HashLock lock = slot.state.begin_update(target);
        slot.update_desc = desc;
        send(a, slot.peer_actor, UpdateReq{chan_of(a, slot), target, lock});
    }

    std::string chan_of(Actor& a, ChannelSlot& slot) const {
        for (const auto& [id, s] : a.channels)
            if (&s == &slot) return id;
        return "?";
    }

    void on_bet_propose(Actor& a, const BetPropose& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        try {
            (void)target_add_bet(slot.state, m.bet, chain_.height());
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + m.chan);
            return;
        }
        Intent it;
        it.kind = Intent::Kind::AddBet;
        it.bet = m.bet;
        slot.accepted_intents.push_back(it);
        send(a, slot.peer_actor, BetAccept{m.chan, m.bet});
    }

    void on_bet_accept(Actor& a, const BetAccept& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        Intent it;
        it.kind = Intent::Kind::AddBet;
        it.bet = m.bet;
        start_or_defer(a, slot, m.chan, std::move(it));
    }

    void maybe_public_reveal(Actor& a, const PropositionId& prop) {
        if (a.policy.kind != PolicyKind::PublicRevealer) return;
        if (chain_.is_proven(prop)) return;
        chain_.register_proof(prop);
        log(a.name, "proof", "prop=" + prop.hex().substr(0, 12) + ",source=public-reveal");
    }

    //! An actor holding proofs presses its advantage: reveal to the
    //! counterparty of every channel where it backs a matching active bet
    //! and ask to settle. Withholders skip the reveal and go on-chain later.
    void backer_flow(Actor& a) {
        if (a.policy.kind == PolicyKind::Manual) return;
        bool withhold =
            a.withhold_proofs || a.policy.kind == PolicyKind::Withholder;
        for (auto& [chan, slot] : a.channels) {
            if (slot.state.status() != ChannelStatus::Open) continue;
            for (const Bet& b : slot.state.bets()) {
                if (!(b.backer == a.keys.addr)) continue;
                auto blob = a.proofs.find(b.prop);
                if (blob == a.proofs.end()) continue;
                if (withhold) continue;
                bool& sent = a.revealed_flags[b.prop];
                if (sent) continue;
                sent = true;
                send(a, slot.peer_actor, ProofReveal{blob->second});
                send(a, slot.peer_actor, SettleReq{chan, b.prop, a.keys.addr});
            }
        }
    }

    void on_proof_reveal(Actor& a, const ProofReveal& m) {
        if (!verify_proof(m.blob, oracle_)) {
            log(a.name, "error", "reason=invalid-proof");
            return;
        }
        a.proofs[m.blob.prop] = m.blob;
        maybe_public_reveal(a, m.blob.prop);
        backer_flow(a);  // propagate along hedge chains where I am a backer
    }

    void on_settle_req(Actor& a, const SettleReq& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        const Bet* bet = nullptr;
        for (const Bet& b : slot.state.bets())
            if (b.prop == m.prop) bet = &b;
        if (!bet) {
            log(a.name, "error", "reason=no-such-bet,chan=" + m.chan);
            return;
        }
        bool justified;
        if (m.winner == bet->backer) {
            // A backer win needs the proof shown to me first.
            justified = a.proofs.count(m.prop) != 0;
        } else {
            // A doubter win needs the deadline passed, no public proof, and
            // no private proof in my own hands.
            justified = chain_.height() >= bet->deadline.height &&
                        !chain_.is_proven(m.prop) && a.proofs.count(m.prop) == 0;
        }
        if (!justified) {
            log(a.name, "error", "reason=settle-refused,chan=" + m.chan);
            return;
        }
        Intent it;
        it.kind = Intent::Kind::SettleBet;
        it.prop = m.prop;
        it.winner = m.winner;
        slot.accepted_intents.push_back(it);
        send(a, slot.peer_actor, SettleAck{m.chan, m.prop, m.winner});
    }

    void on_settle_ack(Actor& a, const SettleAck& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        Intent it;
        it.kind = Intent::Kind::SettleBet;
        it.prop = m.prop;
        it.winner = m.winner;
        start_or_defer(a, slot, m.chan, std::move(it));
    }

    void on_htlc_add(Actor& a, const HtlcAdd& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        Intent it;
        it.kind = Intent::Kind::AddHtlc;
        it.htlc = m.htlc;
        start_or_defer(a, slot, m.chan, std::move(it));
    }

    void on_htlc_settle(Actor& a, const HtlcSettle& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        HashLock lock = hash_secret(m.secret);
        slot.state.learn_payment_secret(m.secret);
        Intent it;
        it.kind = Intent::Kind::SettleHtlc;
        it.secret = m.secret;
        it.lock = lock;
        start_or_defer(a, slot, m.chan, std::move(it));
        // Intermediary: the secret just became known; claim the matching
        // inbound htlc one hop upstream.
        for (auto& [other_chan, other] : a.channels) {
            if (other_chan == m.chan) continue;
            for (const PaymentHtlc& ph : other.state.htlcs()) {
                if (!(ph.lock == lock) || !(ph.payee == a.keys.addr)) continue;
                other.state.learn_payment_secret(m.secret);
                Intent it;
                it.kind = Intent::Kind::SettleHtlc;
                it.secret = m.secret;
                it.lock = lock;
                other.my_intents.push_back(it);
                send(a, other.peer_actor, HtlcSettle{other_chan, m.secret});
            }
        }
    }

    void on_htlc_fail(Actor& a, const HtlcFail& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        ChannelState& s = slot.state;
        // Agree to void the payment only if I cannot settle it myself.
        if (s.payment_secret(m.lock)) {
            log(a.name, "error", "reason=fail-refused-have-secret,chan=" + m.chan);
            return;
        }
        Intent it;
        it.kind = Intent::Kind::FailHtlc;
        it.lock = m.lock;
        start_or_defer(a, slot, m.chan, std::move(it));
    }

    void on_close_req(Actor& a, const CloseReq& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        if (a.policy.kind == PolicyKind::Cheater) {
            // Instead of co-signing, publish the configured revoked revision.
            publish_commitment(a, slot, a.policy.cheat_revision, false);
            return;
        }
        Transaction mine;
        try {
            mine = slot.state.build_cooperative_close();
        } catch (const ChannelError& e) {
            log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + m.chan);
            return;
        }
        const RevisionTarget& t = slot.state.current();
        if (t.balance_a != m.balance_a || t.balance_b != m.balance_b) {
            log(a.name, "error", "reason=close-balance-mismatch,chan=" + m.chan);
            return;
        }
        slot.close_tx = mine;
        send(a, slot.peer_actor, CloseSig{m.chan, slot.state.sign_tx(mine)});
    }

    void on_close_sig(Actor& a, const CloseSig& m) {
        ChannelSlot& slot = slot_of(a, m.chan);
        if (!slot.close_requested) return;  // unsolicited
        Transaction tx = slot.state.attach_close_sigs(slot.close_tx,
                                                      slot.state.sign_tx(slot.close_tx), m.sig);
        submit_tx(a.name, "close", tx);
        slot.close_requested = false;
    }

    // ---- protocol engine: chain watching ----

    void publish_commitment(Actor& a, ChannelSlot& slot, std::uint32_t rev,
                            bool register_proofs) {
        if (slot.published) return;
        Transaction tx = slot.state.commitment_tx(rev);
        SubmitResult r = submit_tx(a.name, "commitment", tx);
        if (!r.accepted()) return;
        slot.published = ChannelSlot::Published{r.txid, rev, true};
        slot.state.note_unilateral_close(a.keys.addr, rev);
        log(a.name, "status",
            "chan=" + chan_of(a, slot) + ",status=" +
                channel_status_name(slot.state.status()) + ",rev=" + std::to_string(rev));
        if (register_proofs) {
            for (const Bet& b : slot.state.target_at(rev).bets) {
                if (b.backer == a.keys.addr && a.proofs.count(b.prop) &&
                    !chain_.is_proven(b.prop)) {
                    chain_.register_proof(b.prop);
                    log(a.name, "proof", "prop=" + b.prop.hex().substr(0, 12));
                }
            }
        }
    }

    void on_block(Actor& a, const ChainState::Block& blk) {
        for (auto& [chan, slot] : a.channels) {
            watch_funding(a, chan, slot);
            watch_spends(a, chan, slot, blk);
            run_claims(a, chan, slot);
            run_deadlines(a, chan, slot);
            run_stall_check(a, chan, slot);
        }
    }

    void watch_funding(Actor& a, const std::string& chan, ChannelSlot& slot) {
        if (slot.state.status() != ChannelStatus::CommitmentsExchanged) return;
        if (!chain_.find_utxo(slot.state.funding_outpoint())) return;
        slot.state.mark_open();
        log(a.name, "status", "chan=" + chan + ",status=Open,rev=1");
    }

    void watch_spends(Actor& a, const std::string& chan, ChannelSlot& slot,
                      const ChainState::Block& blk) {
        const OutPoint& funding = slot.state.funding_outpoint();
        for (std::size_t i = 0; i < blk.txs.size(); ++i) {
            const Transaction& tx = blk.txs[i];
            bool spends_funding = false;
            for (const auto& in : tx.inputs) spends_funding |= in.prev == funding;
            if (!spends_funding) continue;
            // Whatever this spend turns out to be, the channel is beyond
            // cooperative updates now.
            slot.close_requested = false;
            slot.my_intents.clear();
            slot.accepted_intents.clear();
            if (slot.published && blk.txids[i] == slot.published->txid) continue;  // mine

            std::optional<Transaction> sweep;
            try {
                sweep = slot.state.punish(tx);
            } catch (const ChannelError& e) {
                // No revocation secret for this revision: treat it as a
                // plain unilateral close below.
                log(a.name, "error", std::string("reason=") + e.what() + ",chan=" + chan);
            }
            std::optional<std::uint32_t> rev = slot.state.match_commitment(tx);
            if (sweep) {
                SubmitResult r = submit_tx(a.name, "sweep", *sweep);
                slot.state.note_breach(actor(slot.peer_actor).keys.addr, rev.value_or(0));
                slot.published = ChannelSlot::Published{blk.txids[i], rev.value_or(0), false};
                slot.breached = true;
                log(a.name, "punish",
                    "chan=" + chan + ",rev=" + std::to_string(rev.value_or(0)) +
                        ",tx=" + r.txid.short_hex() +
                        ",amount=" + tx_output_sum(*sweep).to_bars_string());
            } else if (rev) {
                slot.state.note_unilateral_close(actor(slot.peer_actor).keys.addr, *rev);
                slot.published = ChannelSlot::Published{blk.txids[i], *rev, false};
                log(a.name, "status",
                    "chan=" + chan + ",status=ClosedUnilateral,rev=" + std::to_string(*rev));
            } else if (slot.state.status() == ChannelStatus::Open) {
                slot.state.note_cooperative_close();
                log(a.name, "status", "chan=" + chan + ",status=ClosedCooperative");
            }
        }
    }

    void run_claims(Actor& a, const std::string& chan, ChannelSlot& slot) {
        if (!slot.published || slot.breached) return;
        if (a.policy.kind == PolicyKind::Manual && !slot.published->by_me) return;
        ChannelState& s = slot.state;
        std::uint32_t rev = slot.published->rev;
        if (!s.knows_revision(rev)) return;
        const Address publisher =
            slot.published->by_me ? a.keys.addr : actor(slot.peer_actor).keys.addr;
        std::uint32_t csv = s.params().csv_delay.blocks;
        for (const ClaimPlan& plan : claim_plans(s, rev, publisher)) {
            if (slot.resolved_vouts.count(plan.vout)) continue;
            OutPoint op{slot.published->txid, plan.vout};
            const UtxoEntry* utxo = chain_.find_utxo(op);
            if (!utxo) {
                // Someone else took it (punished, or lost the race).
                slot.resolved_vouts.insert(plan.vout);
                log(a.name, "claim",
                    "chan=" + chan + ",vout=" + std::to_string(plan.vout) + ",result=lost");
                continue;
            }
            bool ready = false;
            const Secret* secret = nullptr;
            switch (plan.path) {
                case ClaimPath::DelaySig:
                    ready = chain_.confirmations(op) >= csv;
                    break;
                case ClaimPath::DelayProven:
                    // A held proof is worthless until registered; do that the
                    // moment a commitment with my winning bet is on chain.
                    if (!chain_.is_proven(plan.bet->prop) && a.proofs.count(plan.bet->prop)) {
                        chain_.register_proof(plan.bet->prop);
                        log(a.name, "proof", "prop=" + plan.bet->prop.hex().substr(0, 12));
                    }
                    ready = chain_.confirmations(op) >= csv && chain_.is_proven(plan.bet->prop);
                    // Unprovable and past the race window: give up.
                    if (!chain_.is_proven(plan.bet->prop) &&
                        chain_.height() > plan.bet->deadline.height + csv + a.policy.grace)
                        slot.resolved_vouts.insert(plan.vout);
                    break;
                case ClaimPath::DelayTimeout:
                    ready = chain_.confirmations(op) >= csv &&
                            chain_.height() >= plan.bet->deadline.height + csv;
                    break;
                case ClaimPath::Secret:
                    secret = s.payment_secret(plan.htlc->lock);
                    ready = secret != nullptr;
                    break;
            }
            if (!ready) continue;
            Transaction claim =
                build_claim(op, plan.amount, a.keys, a.keys.addr, plan.path, secret);
            SubmitResult r = submit_tx(a.name, "claim", claim);
            slot.resolved_vouts.insert(plan.vout);
            log(a.name, "claim",
                "chan=" + chan + ",vout=" + std::to_string(plan.vout) +
                    ",amount=" + plan.amount.to_bars_string() +
                    ",result=" + (r.accepted() ? "ok" : reject_code_name(r.code)));
        }
    }

    void run_deadlines(Actor& a, const std::string& chan, ChannelSlot& slot) {
        if (a.policy.kind == PolicyKind::Manual || a.policy.kind == PolicyKind::Cheater) return;
        ChannelState& s = slot.state;
        if (s.status() != ChannelStatus::Open) return;
        std::uint32_t h = chain_.height();

        for (const Bet& b : s.bets()) {
            if (b.backer == a.keys.addr && a.proofs.count(b.prop)) {
                // The last block a backer can publish and still win the claim
                // race outright is one before the deadline: the proven branch
                // then matures at deadline+delay-1, a block ahead of the
                // doubter's timeout. Honest backers reach this point only
                // after cooperative settlement failed.
                if (h >= b.deadline.height - 1) {
                    publish_commitment(a, slot, s.latest_signed_revision(), true);
                    return;
                }
            }
            if (b.doubter == a.keys.addr && h >= b.deadline.height &&
                !chain_.is_proven(b.prop) && a.proofs.count(b.prop) == 0) {
                auto it = slot.timeout_settle_height.find(b.prop);
                if (it == slot.timeout_settle_height.end()) {
                    slot.timeout_settle_height[b.prop] = h;
                    send(a, slot.peer_actor, SettleReq{chan, b.prop, a.keys.addr});
                } else if (h >= it->second + a.policy.grace) {
                    publish_commitment(a, slot, s.latest_signed_revision(), false);
                    return;
                }
            }
            // A backer who missed the deadline without a proof concedes so the
            // channel can move on. Waiting one grace period first leaves room
            // for a live doubter's own settle request, avoiding two parties
            // proposing the same settlement at once.
            if (b.backer == a.keys.addr && h >= b.deadline.height + a.policy.grace &&
                !chain_.is_proven(b.prop) && a.proofs.count(b.prop) == 0) {
                auto it = slot.timeout_settle_height.find(b.prop);
                if (it == slot.timeout_settle_height.end()) {
                    slot.timeout_settle_height[b.prop] = h;
                    send(a, slot.peer_actor, SettleReq{chan, b.prop, b.doubter});
                } else if (h >= it->second + a.policy.grace) {
                    publish_commitment(a, slot, s.latest_signed_revision(), false);
                    return;
                }
            }
        }
        for (const PaymentHtlc& ph : s.htlcs()) {
            if (ph.payee == a.keys.addr || h < ph.expiry.height) continue;
            auto it = slot.htlc_fail_height.find(ph.lock);
            if (it == slot.htlc_fail_height.end()) {
                slot.htlc_fail_height[ph.lock] = h;
                Intent intent;
                intent.kind = Intent::Kind::FailHtlc;
                intent.lock = ph.lock;
                slot.my_intents.push_back(intent);
                send(a, slot.peer_actor, HtlcFail{chan, ph.lock});
            } else if (h >= it->second + a.policy.grace) {
                publish_commitment(a, slot, s.latest_signed_revision(), false);
                return;
            }
        }
    }

    void run_stall_check(Actor& a, const std::string& chan, ChannelSlot& slot) {
        if (a.policy.kind == PolicyKind::Manual) return;
        ChannelState& s = slot.state;
        bool waiting = s.status() == ChannelStatus::Open &&
                       (s.has_pending() || !slot.my_intents.empty() ||
                        !slot.accepted_intents.empty() || slot.close_requested);
        if (!waiting) {
            slot.stall_since.reset();
            return;
        }
        std::uint32_t h = chain_.height();
        if (!slot.stall_since) {
            slot.stall_since = h;
            return;
        }
        if (h < *slot.stall_since + a.policy.grace) return;
        log(a.name, "stall", "chan=" + chan);
        if (a.policy.kind == PolicyKind::Cheater) {
            publish_commitment(a, slot, a.policy.cheat_revision, false);
        } else {
            publish_commitment(a, slot, s.latest_signed_revision(), true);
        }
        slot.stall_since.reset();
        (void)chan;
    }

    //! Nothing left to do: no messages, no handshakes, no open obligations.
    bool quiescent() const {
        if (!wire_.empty()) return false;
        for (const auto& a : actors_) {
            if (a.silenced) continue;
            for (const auto& [chan, slot] : a.channels) {
                const ChannelState& s = slot.state;
                if (s.status() == ChannelStatus::Open) {
                    if (s.has_pending()) return false;
                    if (!slot.my_intents.empty() || !slot.accepted_intents.empty()) return false;
                    if (!slot.deferred_starts.empty()) return false;
                    if (slot.close_requested) return false;
                    if (a.policy.kind != PolicyKind::Manual &&
                        (!s.bets().empty() || !s.htlcs().empty()))
                        return false;
                }
                if (slot.published && !slot.breached && s.knows_revision(slot.published->rev)) {
                    const Address publisher = slot.published->by_me
                                                  ? a.keys.addr
                                                  : actor(slot.peer_actor).keys.addr;
                    if (!(a.policy.kind == PolicyKind::Manual && !slot.published->by_me))
                        for (const ClaimPlan& p : claim_plans(s, slot.published->rev, publisher))
                            if (!slot.resolved_vouts.count(p.vout)) return false;
                }
            }
        }
        return true;
    }

    std::uint64_t seed_;
    ChainState chain_;
    ProofOracle oracle_;
    std::deque<Actor> actors_;
    std::map<std::string, std::size_t> index_;
    std::deque<Envelope> wire_;
    std::vector<DropRule> drops_;
    std::vector<std::string> log_;
    std::vector<std::string> probability_lines_;
    std::uint64_t step_ = 0;
    std::uint64_t route_counter_ = 0;
};

} // namespace pfc

#endif // PROOFCHANNELS_PEER_HPP
