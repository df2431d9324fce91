// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <catch2/catch_amalgamated.hpp>

#include <proofchannels/ledger.hpp>

using namespace pfc;

namespace {

struct Chain {
    ChainState chain;
    Keypair alice = keygen("alice");
    Keypair bob = keygen("bob");

    //! Spend `op` (a pay-to-address utxo of `owner`) into the given outputs.
    Transaction spend(const OutPoint& op, const Keypair& owner,
                      std::vector<TxOutput> outs) {
        Transaction tx;
        tx.inputs.push_back({op, SigWitness{}});
        tx.outputs = std::move(outs);
        tx.inputs[0].witness = SigWitness{sign(owner.priv, tx_digest(tx))};
        return tx;
    }
};

} // namespace

TEST_CASE("faucet mints a confirmed utxo at the current height") {
    Chain t;
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(100));
    REQUIRE(t.chain.find_utxo(op) != nullptr);
    CHECK(t.chain.find_utxo(op)->creation_height == 0);
    CHECK(t.chain.confirmations(op) == 1);
    CHECK(t.chain.balance_of(t.alice.addr) == Amount::bars(100));
    CHECK(t.chain.minted() == Amount::bars(100));
    CHECK_THROWS_AS(t.chain.faucet(t.alice.addr, Amount{}), std::invalid_argument);
}

TEST_CASE("submitted transactions confirm in the next block") {
    Chain t;
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(10));
    Transaction tx = t.spend(op, t.alice, {{Amount::bars(10), pay_to(t.bob.addr)}});
    SubmitResult r = t.chain.submit(tx);
    REQUIRE(r.accepted());
    // Still queued: the old utxo exists, the new one does not.
    CHECK(t.chain.find_utxo(op) != nullptr);
    CHECK(t.chain.find_utxo(OutPoint{r.txid, 0}) == nullptr);
    t.chain.advance_blocks(1);
    CHECK(t.chain.find_utxo(op) == nullptr);
    REQUIRE(t.chain.find_utxo(OutPoint{r.txid, 0}) != nullptr);
    CHECK(t.chain.balance_of(t.bob.addr) == Amount::bars(10));
}

TEST_CASE("confirmation counting across a multi-block advance") {
    Chain t;
    // Raise the tip to 10 first.
    t.chain.advance_blocks(10);
    CHECK(t.chain.height() == 10);
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(1));
    Transaction tx = t.spend(op, t.alice, {{Amount::bars(1), pay_to(t.bob.addr)}});
    SubmitResult r = t.chain.submit(tx);
    REQUIRE(r.accepted());
    t.chain.advance_blocks(48);
    // Confirmed at height 11; tip is now 58; 58 - 11 + 1 = 48 confirmations.
    CHECK(t.chain.height() == 58);
    CHECK(t.chain.confirmations(OutPoint{r.txid, 0}) == 48);
}

TEST_CASE("structural rejects are reported as Malformed") {
    Chain t;
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(5));
    SECTION("no inputs") {
        Transaction tx;
        tx.outputs.push_back({Amount::bars(1), pay_to(t.bob.addr)});
        CHECK(t.chain.submit(tx).code == RejectCode::Malformed);
    }
    SECTION("no outputs") {
        Transaction tx;
        tx.inputs.push_back({op, SigWitness{}});
        CHECK(t.chain.submit(tx).code == RejectCode::Malformed);
    }
    SECTION("zero-value output") {
        Transaction tx = t.spend(op, t.alice, {{Amount{}, pay_to(t.bob.addr)}});
        CHECK(t.chain.submit(tx).code == RejectCode::Malformed);
    }
    SECTION("same outpoint twice in one transaction") {
        Transaction tx;
        tx.inputs.push_back({op, SigWitness{}});
        tx.inputs.push_back({op, SigWitness{}});
        tx.outputs.push_back({Amount::bars(5), pay_to(t.bob.addr)});
        CHECK(t.chain.submit(tx).code == RejectCode::Malformed);
    }
}

TEST_CASE("value conservation at submit") {
    Chain t;
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(5));
    SECTION("outputs above inputs are rejected") {
        Transaction tx = t.spend(op, t.alice, {{Amount::bars(6), pay_to(t.bob.addr)}});
        CHECK(t.chain.submit(tx).code == RejectCode::ValueCreated);
    }
    SECTION("outputs below inputs burn the difference") {
        Transaction tx = t.spend(op, t.alice, {{Amount::bars(3), pay_to(t.bob.addr)}});
        REQUIRE(t.chain.submit(tx).accepted());
        t.chain.advance_blocks(1);
        CHECK(t.chain.burned() == Amount::bars(2));
        CHECK(t.chain.total_live() == Amount::bars(3));
        CHECK(t.chain.minted() == Amount::bars(5));
        std::string why;
        CHECK(t.chain.audit(&why));
    }
}

TEST_CASE("unknown and already-claimed outpoints") {
    Chain t;
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(5));
    Transaction first = t.spend(op, t.alice, {{Amount::bars(5), pay_to(t.bob.addr)}});
    Transaction second = t.spend(op, t.alice, {{Amount::bars(5), pay_to(t.alice.addr)}});
    REQUIRE(t.chain.submit(first).accepted());
    // Same outpoint, same block window: the earlier submission claims it.
    CHECK(t.chain.submit(second).code == RejectCode::DoubleSpend);
    t.chain.advance_blocks(1);
    // After confirmation the outpoint is gone entirely.
    CHECK(t.chain.submit(second).code == RejectCode::UnknownOutpoint);
}

TEST_CASE("a queued transaction's outputs are not spendable until confirmed") {
    Chain t;
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(5));
    Transaction first = t.spend(op, t.alice, {{Amount::bars(5), pay_to(t.bob.addr)}});
    SubmitResult r = t.chain.submit(first);
    REQUIRE(r.accepted());
    Transaction chained =
        t.spend(OutPoint{r.txid, 0}, t.bob, {{Amount::bars(5), pay_to(t.alice.addr)}});
    CHECK(t.chain.submit(chained).code == RejectCode::UnknownOutpoint);
    t.chain.advance_blocks(1);
    CHECK(t.chain.submit(chained).accepted());
}

TEST_CASE("script failures carry the script error") {
    Chain t;
    Keypair carol = keygen("carol");
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(5));

    SECTION("wrong signer on a pay-to-address") {
        Transaction tx = t.spend(op, carol, {{Amount::bars(5), pay_to(t.bob.addr)}});
        SubmitResult r = t.chain.submit(tx);
        CHECK(r.code == RejectCode::ScriptFailure);
        CHECK(r.script_error == ScriptError::BadSignature);
    }

    SECTION("funding-style multisig needs both signatures") {
        // Move the coin into a 2-of-2 first.
        Transaction fund =
            t.spend(op, t.alice, {{Amount::bars(5), multisig2(t.alice.addr, t.bob.addr)}});
        SubmitResult fr = t.chain.submit(fund);
        REQUIRE(fr.accepted());
        t.chain.advance_blocks(1);
        OutPoint fop{fr.txid, 0};

        Transaction out;
        out.inputs.push_back({fop, SigWitness{}});
        out.outputs.push_back({Amount::bars(5), pay_to(t.alice.addr)});
        Digest32 d = tx_digest(out);

        out.inputs[0].witness = Sig2Witness{sign(t.alice.priv, d), std::nullopt};
        SubmitResult one = t.chain.submit(out);
        CHECK(one.code == RejectCode::ScriptFailure);
        CHECK(one.script_error == ScriptError::MissingSignature);

        out.inputs[0].witness = Sig2Witness{sign(t.alice.priv, d), sign(t.bob.priv, d)};
        CHECK(t.chain.submit(out).accepted());
    }

    SECTION("delay branch rejected one block early") {
        Secret s = derive_secret("x");
        Transaction lockup = t.spend(
            op, t.alice,
            {{Amount::bars(5),
              htlc(hash_secret(s), t.bob.addr, RelativeDelay{48}, PayToAddr{t.alice.addr})}});
        SubmitResult lr = t.chain.submit(lockup);
        REQUIRE(lr.accepted());
        t.chain.advance_blocks(1);  // confirmed at height 1
        OutPoint hop{lr.txid, 0};

        t.chain.advance_blocks(46);  // height 47: confirmations = 47
        CHECK(t.chain.confirmations(hop) == 47);
        Transaction claim;
        claim.inputs.push_back({hop, SigWitness{}});
        claim.outputs.push_back({Amount::bars(5), pay_to(t.alice.addr)});
        claim.inputs[0].witness =
            DelayBranch{SigWitness{sign(t.alice.priv, tx_digest(claim))}};
        SubmitResult early = t.chain.submit(claim);
        CHECK(early.code == RejectCode::ScriptFailure);
        CHECK(early.script_error == ScriptError::DelayNotElapsed);

        t.chain.advance_blocks(1);  // height 48: confirmations = 48
        CHECK(t.chain.confirmations(hop) == 48);
        CHECK(t.chain.submit(claim).accepted());
    }
}

TEST_CASE("proof registration is queued, monotone, and first-wins") {
    Chain t;
    PropositionId p = proposition_id("goldbach-up-to-2^70");
    CHECK_FALSE(t.chain.is_proven(p));
    t.chain.register_proof(p);
    // Not yet confirmed.
    CHECK_FALSE(t.chain.is_proven(p));
    t.chain.advance_blocks(3);
    CHECK(t.chain.is_proven(p));
    REQUIRE(t.chain.proven_height(p).has_value());
    CHECK(*t.chain.proven_height(p) == 1);
    // Re-registration cannot move the height.
    t.chain.register_proof(p);
    t.chain.advance_blocks(1);
    CHECK(*t.chain.proven_height(p) == 1);
}

TEST_CASE("ptlc spending through the chain respects the proof registry") {
    Chain t;
    PropositionId p = proposition_id("P");
    OutPoint op = t.chain.faucet(t.alice.addr, Amount::bars(8));
    Transaction lockup = t.spend(
        op, t.alice, {{Amount::bars(8), ptlc(p, t.bob.addr, AbsoluteHeight{60}, t.alice.addr)}});
    SubmitResult lr = t.chain.submit(lockup);
    REQUIRE(lr.accepted());
    t.chain.advance_blocks(1);
    OutPoint pop{lr.txid, 0};

    Transaction claim;
    claim.inputs.push_back({pop, SigWitness{}});
    claim.outputs.push_back({Amount::bars(8), pay_to(t.bob.addr)});
    claim.inputs[0].witness = ProvenBranch{sign(t.bob.priv, tx_digest(claim))};

    SubmitResult before = t.chain.submit(claim);
    CHECK(before.code == RejectCode::ScriptFailure);
    CHECK(before.script_error == ScriptError::PropositionNotProven);

    t.chain.register_proof(p);
    t.chain.advance_blocks(1);
    CHECK(t.chain.submit(claim).accepted());
    t.chain.advance_blocks(1);
    CHECK(t.chain.balance_of(t.bob.addr) == Amount::bars(8));
}

TEST_CASE("audit passes over a busy history") {
    Chain t;
    OutPoint a = t.chain.faucet(t.alice.addr, Amount::bars(100));
    OutPoint b = t.chain.faucet(t.bob.addr, Amount::bars(100));
    Transaction t1 = t.spend(a, t.alice, {{Amount::bars(60), pay_to(t.bob.addr)},
                                          {Amount::bars(40), pay_to(t.alice.addr)}});
    REQUIRE(t.chain.submit(t1).accepted());
    t.chain.advance_blocks(2);
    Transaction t2 = t.spend(b, t.bob, {{Amount::bars(99), pay_to(t.alice.addr)}});
    REQUIRE(t.chain.submit(t2).accepted());
    t.chain.advance_blocks(5);
    std::string why;
    CHECK(t.chain.audit(&why));
    CHECK(why.empty());
    CHECK(t.chain.minted() == Amount::bars(200));
    CHECK(t.chain.burned() == Amount::bars(1));
    CHECK(t.chain.total_live() == Amount::bars(199));
    CHECK(t.chain.blocks().size() == 2);
    CHECK(t.chain.blocks_since(1).size() == 1);
}
