#pragma once

// Seeded generators for test points and intervals.

#include <random>
#include <utility>

#include "qinf/expansion.hpp"
#include "qinf/numeric.hpp"

namespace qinf {

using Rng = std::mt19937_64;

/// num / den with den in [2, max_den] and 0 <= num < den.
inline Rational random_rational(Rng& rng, long max_den = 1'000'000) {
    std::uniform_int_distribution<long> den_d(2, max_den);
    long den = den_d(rng);
    std::uniform_int_distribution<long> num_d(0, den - 1);
    Rational r(num_d(rng), den);
    r.canonicalize();
    return r;
}

/// Q-rational with 1..max_rank digits, each in [0, max_digit].
inline QRational random_qrational(Rng& rng, std::size_t max_rank = 4, long max_digit = 6) {
    std::uniform_int_distribution<std::size_t> rank_d(1, max_rank);
    std::uniform_int_distribution<long> digit_d(0, max_digit);
    CylinderAddress a;
    const std::size_t n = rank_d(rng);
    for (std::size_t i = 0; i < n; ++i) a.digits.emplace_back(digit_d(rng));
    return QRational::from_digits(std::move(a));
}

/// a < b; b is the right end 1 with probability 1/8.
inline std::pair<QRational, QRational> random_interval(Rng& rng, std::size_t max_rank = 4, long max_digit = 6) {
    std::bernoulli_distribution to_end(0.125);
    for (;;) {
        QRational a = random_qrational(rng, max_rank, max_digit);
        QRational b = to_end(rng) ? QRational::end() : random_qrational(rng, max_rank, max_digit);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        return {std::move(a), std::move(b)};
    }
}

}  // namespace qinf
