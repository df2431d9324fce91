// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef PROOFCHANNELS_AMOUNT_HPP
#define PROOFCHANNELS_AMOUNT_HPP

#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pfc {

//! Atoms per bar. All arithmetic is in whole atoms; bars only appear at the
//! parsing/formatting boundary.
inline constexpr std::uint64_t ATOMS_PER_BAR = 100'000'000ULL;

/** Non-negative monetary value in atoms. Arithmetic throws std::overflow_error
 * instead of wrapping. */
class Amount {
public:
    constexpr Amount() = default;

    static constexpr Amount atoms(std::uint64_t n) { return Amount(n); }

    static Amount bars(std::uint64_t n) {
        if (n > UINT64_MAX / ATOMS_PER_BAR)
            throw std::overflow_error("amount: bars value overflows");
        return Amount(n * ATOMS_PER_BAR);
    }

    constexpr std::uint64_t to_atoms() const { return atoms_; }
    constexpr bool is_zero() const { return atoms_ == 0; }

    Amount operator+(Amount rhs) const {
        if (atoms_ > UINT64_MAX - rhs.atoms_)
            throw std::overflow_error("amount: addition overflows");
        return Amount(atoms_ + rhs.atoms_);
    }
    Amount operator-(Amount rhs) const {
        if (rhs.atoms_ > atoms_)
            throw std::overflow_error("amount: subtraction underflows");
        return Amount(atoms_ - rhs.atoms_);
    }
    Amount& operator+=(Amount rhs) { *this = *this + rhs; return *this; }
    Amount& operator-=(Amount rhs) { *this = *this - rhs; return *this; }

    auto operator<=>(const Amount&) const = default;

    //! Canonical bar rendering: integer part, then up to 8 fractional digits
    //! with trailing zeros trimmed ("100", "0.1", "1.00000001").
    std::string to_bars_string() const {
        std::string s = std::to_string(atoms_ / ATOMS_PER_BAR);
        std::uint64_t frac = atoms_ % ATOMS_PER_BAR;
        if (frac == 0) return s;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%08llu", static_cast<unsigned long long>(frac));
        std::string f(buf);
        while (!f.empty() && f.back() == '0') f.pop_back();
        return s + "." + f;
    }

    //! Parse a bar string exactly into atoms. Accepts "100", "0.1",
    //! "1.00000001". More than 8 fractional digits or junk is rejected.
    static Amount parse_bars(std::string_view sv) {
        if (sv.empty()) throw std::invalid_argument("amount: empty string");
        std::uint64_t whole = 0, frac = 0;
        std::size_t i = 0;
        bool any_digit = false;
        for (; i < sv.size() && sv[i] != '.'; ++i) {
            if (sv[i] < '0' || sv[i] > '9')
                throw std::invalid_argument("amount: bad character in '" + std::string(sv) + "'");
            any_digit = true;
            if (whole > (UINT64_MAX - (sv[i] - '0')) / 10)
                throw std::overflow_error("amount: bar value overflows");
            whole = whole * 10 + static_cast<std::uint64_t>(sv[i] - '0');
        }
        if (i < sv.size()) { // fractional part
            ++i;
            std::size_t digits = 0;
            for (; i < sv.size(); ++i, ++digits) {
                if (sv[i] < '0' || sv[i] > '9')
                    throw std::invalid_argument("amount: bad character in '" + std::string(sv) + "'");
                if (digits >= 8)
                    throw std::invalid_argument("amount: more than 8 fractional digits");
                frac = frac * 10 + static_cast<std::uint64_t>(sv[i] - '0');
            }
            if (digits == 0)
                throw std::invalid_argument("amount: trailing '.'");
            for (; digits < 8; ++digits) frac *= 10;
        }
        if (!any_digit) throw std::invalid_argument("amount: no digits");
        if (whole > UINT64_MAX / ATOMS_PER_BAR)
            throw std::overflow_error("amount: bar value overflows");
        std::uint64_t base = whole * ATOMS_PER_BAR;
        if (base > UINT64_MAX - frac)
            throw std::overflow_error("amount: bar value overflows");
        return Amount(base + frac);
    }

private:
    explicit constexpr Amount(std::uint64_t a) : atoms_(a) {}
    std::uint64_t atoms_ = 0;
};

} // namespace pfc

#endif // PROOFCHANNELS_AMOUNT_HPP
