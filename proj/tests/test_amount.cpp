// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <catch2/catch_amalgamated.hpp>

#include <proofchannels/amount.hpp>

using namespace pfc;

TEST_CASE("bar/atom conversion") {
    CHECK(Amount::bars(1).to_atoms() == 100'000'000ULL);
    CHECK(Amount::bars(200).to_atoms() == 20'000'000'000ULL);
    CHECK(Amount::atoms(1).to_atoms() == 1);
    CHECK(Amount{}.is_zero());
}

TEST_CASE("arithmetic rejects overflow instead of wrapping") {
    Amount max = Amount::atoms(UINT64_MAX);
    CHECK_THROWS_AS(max + Amount::atoms(1), std::overflow_error);
    CHECK_THROWS_AS(Amount::atoms(0) - Amount::atoms(1), std::overflow_error);
    CHECK_THROWS_AS(Amount::bars(UINT64_MAX / 10), std::overflow_error);
    CHECK(max + Amount::atoms(0) == max);
}

TEST_CASE("bar string parsing is exact") {
    CHECK(Amount::parse_bars("100") == Amount::bars(100));
    CHECK(Amount::parse_bars("0.1").to_atoms() == 10'000'000ULL);
    CHECK(Amount::parse_bars("1.00000001").to_atoms() == 100'000'001ULL);
    CHECK(Amount::parse_bars("0.00000001").to_atoms() == 1);
    CHECK_THROWS_AS(Amount::parse_bars("1.000000001"), std::invalid_argument);
    CHECK_THROWS_AS(Amount::parse_bars("1."), std::invalid_argument);
    CHECK_THROWS_AS(Amount::parse_bars("x"), std::invalid_argument);
    CHECK_THROWS_AS(Amount::parse_bars(""), std::invalid_argument);
    CHECK_THROWS_AS(Amount::parse_bars("-1"), std::invalid_argument);
}

TEST_CASE("bar string rendering round-trips") {
    for (const char* s : {"100", "0.1", "1.00000001", "0.00000001", "200", "99.9"}) {
        CHECK(Amount::parse_bars(s).to_bars_string() == s);
    }
    CHECK(Amount::atoms(0).to_bars_string() == "0");
}
