// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Prediction-market arithmetic over bets: implied probabilities from stake
// ratios, counteroffer selection, mirrored bets for hedging through an
// intermediary, and the fee math for multi-hop routed payments. Everything
// here is pure; the message flows that act on these values live in the
// harness.

#ifndef PROOFCHANNELS_MARKET_HPP
#define PROOFCHANNELS_MARKET_HPP

#include <numeric>
#include <string>
#include <vector>

#include "channel.hpp"

namespace pfc {

//! Exact non-negative rational. Kept reduced; only the operations the
//! market arithmetic needs.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Ratio of(std::uint64_t n, std::uint64_t d) {
        if (d == 0) throw std::invalid_argument("ratio: zero denominator");
        std::uint64_t g = std::gcd(n, d);
        return Ratio{n / g, d / g};
    }
    bool operator==(const Ratio&) const = default;

    //! Decimal rendering rounded to `places` digits, e.g. 1/6 -> "0.1667".
    std::string to_decimal_string(unsigned places = 4) const {
        std::uint64_t scale = 1;
        for (unsigned i = 0; i < places; ++i) scale *= 10;
        // Round to nearest; num is bounded by stake totals, no overflow at
        // the magnitudes amounts can reach times 10^4.
        std::uint64_t scaled = (num * scale + den / 2) / den;
        std::string whole = std::to_string(scaled / scale);
        std::string frac = std::to_string(scaled % scale);
        return whole + "." + std::string(places - frac.size(), '0') + frac;
    }
};

//! The probability the market assigns to "proof appears by the deadline":
//! the backer's share of the pot. Exact rational over atoms.
inline Ratio implied_probability(Amount doubter_stake, Amount backer_stake) {
    Amount total = doubter_stake + backer_stake;
    if (total.is_zero())
        throw std::invalid_argument("implied probability: both stakes are zero");
    return Ratio::of(backer_stake.to_atoms(), total.to_atoms());
}

//! The report line format consumed by CLI fixtures.
inline std::string probability_report_line(const Bet& bet) {
    return "prop=" + bet.prop.hex().substr(0, 12) +
           " deadline=" + std::to_string(bet.deadline.height) +
           " doubter=" + bet.doubter_stake.to_bars_string() +
           " backer=" + bet.backer_stake.to_bars_string() +
           " p=" + implied_probability(bet.doubter_stake, bet.backer_stake).to_decimal_string();
}

//! A would-be backer's answer to an open doubter offer.
struct BetOffer {
    PropositionId prop;
    AbsoluteHeight deadline;
    Amount doubter_stake;
    Amount offered_backer_stake;
    Address offerer;
};

//! The doubter takes the highest backer stake; ties go to the earliest
//! arrival (stable scan).
inline const BetOffer& select_best_counteroffer(const std::vector<BetOffer>& offers) {
    if (offers.empty())
        throw std::invalid_argument("counteroffer selection: no offers");
    const BetOffer* best = &offers.front();
    for (const BetOffer& o : offers)
        if (o.offered_backer_stake > best->offered_backer_stake) best = &o;
    return *best;
}

//! The downstream half of a hedge: the middle actor re-takes its upstream
//! bet with roles swapped against `counterparty`, same proposition, same
//! deadline, same stakes — leaving the middle with zero net exposure.
inline Bet mirrored_hedge_bet(const Bet& upstream, const Address& middle,
                              const Address& counterparty) {
    if (upstream.backer != middle && upstream.doubter != middle)
        throw ChannelError(ChannelErrorCode::BadState, "middle actor is not in the upstream bet");
    Bet down = upstream;
    if (upstream.backer == middle) {
        down.doubter = middle;        // sold the backer side: now doubting
        down.backer = counterparty;
    } else {
        down.backer = middle;
        down.doubter = counterparty;
    }
    return down;
}

//! Guard for hand-built hedges: both halves must expire together, or the
//! middle actor is exposed between the deadlines.
inline void validate_hedge(const Bet& upstream, const Bet& downstream) {
    if (upstream.deadline != downstream.deadline)
        throw ChannelError(ChannelErrorCode::DeadlineMismatch,
                           "hedged bets have different deadlines");
    if (upstream.prop != downstream.prop)
        throw ChannelError(ChannelErrorCode::BadState,
                           "hedged bets reference different propositions");
}

//! Per-hop htlc amounts for routing `amount` through n channels with a fee
//! for each of the n-1 intermediaries: hop i carries the amount plus every
//! fee still owed downstream.
inline std::vector<Amount> route_hop_amounts(Amount amount,
                                             const std::vector<Amount>& intermediary_fees) {
    std::vector<Amount> hops(intermediary_fees.size() + 1, amount);
    for (std::size_t i = intermediary_fees.size(); i-- > 0;)
        hops[i] = hops[i + 1] + intermediary_fees[i];
    return hops;
}

} // namespace pfc

#endif // PROOFCHANNELS_MARKET_HPP
