// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Simulated Layer-1: a UTXO set with a block-height clock, script-checked
// transaction acceptance, and the registry of proven propositions consulted
// by ptlc proof branches.
//
// The model is deliberately simple and deterministic: submissions are
// validated against the current tip, queue in order, and all confirm in the
// first block of the next advance. Fees are zero; any input/output
// difference is burned and accounted for.

#ifndef PROOFCHANNELS_LEDGER_HPP
#define PROOFCHANNELS_LEDGER_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tx.hpp"

namespace pfc {

enum class RejectCode {
    None = 0,
    Malformed,        // no inputs/outputs, duplicate outpoint, zero-value output
    UnknownOutpoint,
    DoubleSpend,      // outpoint already claimed by a queued transaction
    ValueCreated,     // outputs exceed inputs
    ScriptFailure,
};

inline const char* reject_code_name(RejectCode c) {
    switch (c) {
        case RejectCode::None: return "ok";
        case RejectCode::Malformed: return "Malformed";
        case RejectCode::UnknownOutpoint: return "UnknownOutpoint";
        case RejectCode::DoubleSpend: return "DoubleSpend";
        case RejectCode::ValueCreated: return "ValueCreated";
        case RejectCode::ScriptFailure: return "ScriptFailure";
    }
    return "?";
}

struct SubmitResult {
    TxId txid;
    RejectCode code = RejectCode::None;
    ScriptError script_error = ScriptError::None;  // set when code == ScriptFailure

    bool accepted() const { return code == RejectCode::None; }
};

struct UtxoEntry {
    TxOutput out;
    std::uint32_t creation_height = 0;
};

class ChainState {
public:
    std::uint32_t height() const { return height_; }

    //! Mint a confirmed utxo at the current height. Stands in for coins the
    //! actors owned before the scenario begins.
    OutPoint faucet(const Address& addr, Amount amount) {
        if (amount.is_zero()) throw std::invalid_argument("faucet: zero amount");
        std::vector<std::uint8_t> seed;
        ser::put_u64(seed, 0xfa0ce7);
        ser::put_u64(seed, faucet_counter_++);
        ser::put_bytes(seed, addr.bytes);
        ser::put_u64(seed, amount.to_atoms());
        TxId id{sha256(std::span<const std::uint8_t>(seed.data(), seed.size()))};
        OutPoint op{id, 0};
        utxos_[op] = UtxoEntry{TxOutput{amount, pay_to(addr)}, height_};
        minted_ += amount;
        return op;
    }

    //! Validate against the current tip and queue for the next block.
    SubmitResult submit(const Transaction& tx) {
        SubmitResult res;
        res.txid = tx_id(tx);
        if (tx.inputs.empty() || tx.outputs.empty()) return reject(res, RejectCode::Malformed);
        for (const auto& o : tx.outputs)
            if (o.amount.is_zero()) return reject(res, RejectCode::Malformed);
        std::set<OutPoint> seen;
        for (const auto& in : tx.inputs)
            if (!seen.insert(in.prev).second) return reject(res, RejectCode::Malformed);

        Amount in_sum;
        Digest32 digest = tx_digest(tx);
        for (const auto& in : tx.inputs) {
            auto it = utxos_.find(in.prev);
            if (it == utxos_.end()) return reject(res, RejectCode::UnknownOutpoint);
            if (pending_spent_.count(in.prev)) return reject(res, RejectCode::DoubleSpend);
            in_sum += it->second.out.amount;
        }
        if (in_sum < tx_output_sum(tx)) return reject(res, RejectCode::ValueCreated);
        for (const auto& in : tx.inputs) {
            const UtxoEntry& entry = utxos_.at(in.prev);
            EvalContext ctx;
            ctx.tx_digest = digest;
            ctx.utxo_creation_height = entry.creation_height;
            ctx.chain_height = height_;
            ctx.proven = [this](const PropositionId& p) { return is_proven(p); };
            if (ScriptError e = eval(entry.out.script, in.witness, ctx); e != ScriptError::None) {
                res.script_error = e;
                return reject(res, RejectCode::ScriptFailure);
            }
        }
        for (const auto& in : tx.inputs) pending_spent_.insert(in.prev);
        pending_txs_.push_back(tx);
        return res;
    }

    void register_proof(const PropositionId& p) {
        if (proven_.count(p)) return;  // first registration wins
        for (const auto& q : pending_proofs_)
            if (q == p) return;
        pending_proofs_.push_back(p);
    }

    bool is_proven(const PropositionId& p) const { return proven_.count(p) != 0; }

    std::optional<std::uint32_t> proven_height(const PropositionId& p) const {
        auto it = proven_.find(p);
        if (it == proven_.end()) return std::nullopt;
        return it->second;
    }

    //! Advance the clock. Everything queued confirms in the first new block.
    void advance_blocks(std::uint32_t k) {
        if (k < 1) throw std::invalid_argument("advance_blocks: k must be >= 1");
        std::uint32_t confirm_height = height_ + 1;
        Block blk;
        blk.height = confirm_height;
        for (const auto& tx : pending_txs_) {
            TxId id = tx_id(tx);
            Amount in_sum, out_sum = tx_output_sum(tx);
            for (const auto& in : tx.inputs) {
                in_sum += utxos_.at(in.prev).out.amount;
                utxos_.erase(in.prev);
            }
            for (std::uint32_t i = 0; i < tx.outputs.size(); ++i)
                utxos_[OutPoint{id, i}] = UtxoEntry{tx.outputs[i], confirm_height};
            burned_ += in_sum - out_sum;
            blk.txs.push_back(tx);
            blk.txids.push_back(id);
        }
        pending_txs_.clear();
        pending_spent_.clear();
        for (const auto& p : pending_proofs_)
            proven_.emplace(p, confirm_height);
        pending_proofs_.clear();
        history_.push_back(std::move(blk));
        height_ += k;
    }

    const UtxoEntry* find_utxo(const OutPoint& op) const {
        auto it = utxos_.find(op);
        return it == utxos_.end() ? nullptr : &it->second;
    }

    std::uint32_t confirmations(const OutPoint& op) const {
        const UtxoEntry* e = find_utxo(op);
        if (!e) throw std::invalid_argument("confirmations: unknown outpoint");
        return height_ - e->creation_height + 1;
    }

    //! Sum of plain pay-to-address utxos owned by `addr`.
    Amount balance_of(const Address& addr) const {
        Amount sum;
        for (const auto& [op, e] : utxos_) {
            if (const auto* p = std::get_if<PayToAddr>(&e.out.script.v))
                if (p->addr == addr) sum += e.out.amount;
        }
        return sum;
    }

    Amount total_live() const {
        Amount sum;
        for (const auto& [op, e] : utxos_) sum += e.out.amount;
        return sum;
    }

    Amount minted() const { return minted_; }
    Amount burned() const { return burned_; }
    std::size_t utxo_count() const { return utxos_.size(); }
    std::size_t pending_tx_count() const { return pending_txs_.size(); }

    struct Block {
        std::uint32_t height = 0;
        std::vector<Transaction> txs;
        std::vector<TxId> txids;
    };

    const std::vector<Block>& blocks() const { return history_; }

    //! Blocks whose confirmation height lies in (after, current].
    std::vector<const Block*> blocks_since(std::uint32_t after) const {
        std::vector<const Block*> out;
        for (const auto& b : history_)
            if (b.height > after) out.push_back(&b);
        return out;
    }

    const std::map<OutPoint, UtxoEntry>& utxos() const { return utxos_; }

    //! Replay the recorded history and confirm no outpoint was ever spent
    //! twice and the value books balance.
    bool audit(std::string* why = nullptr) const {
        std::set<OutPoint> spent;
        for (const auto& b : history_) {
            for (const auto& tx : b.txs) {
                for (const auto& in : tx.inputs) {
                    if (!spent.insert(in.prev).second) {
                        if (why) *why = "outpoint spent twice: " + in.prev.txid.short_hex();
                        return false;
                    }
                }
            }
        }
        for (const auto& [op, e] : utxos_) {
            if (e.creation_height > height_) {
                if (why) *why = "utxo from the future";
                return false;
            }
        }
        for (const auto& [p, h] : proven_) {
            if (h > height_) {
                if (why) *why = "proof from the future";
                return false;
            }
        }
        if (minted_ != total_live() + burned_) {
            if (why) *why = "minted != live + burned";
            return false;
        }
        return true;
    }

private:
    SubmitResult& reject(SubmitResult& r, RejectCode c) {
        r.code = c;
        return r;
    }

    std::uint32_t height_ = 0;
    std::map<OutPoint, UtxoEntry> utxos_;
    std::map<PropositionId, std::uint32_t> proven_;
    std::vector<Transaction> pending_txs_;
    std::set<OutPoint> pending_spent_;
    std::vector<PropositionId> pending_proofs_;
    std::vector<Block> history_;
    Amount minted_;
    Amount burned_;
    std::uint64_t faucet_counter_ = 0;
};

} // namespace pfc

#endif // PROOFCHANNELS_LEDGER_HPP
