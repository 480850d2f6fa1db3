#pragma once

// Rigorous enclosures of  sum_{j=0}^{count-1} (start + j)^(-s)  for real s > 0,
// finite or infinite count. A block of explicit terms is followed by an
// Euler-Maclaurin expansion whose remainder is bounded by
//   |B_2P| / (2P)! * integral |f^(2P)|  <=  |B_2P| / (2P)! * (s)_{2P-1} * A^(-s-2P+1).

#include <cmath>
#include <optional>
#include <vector>

#include "qinf/error.hpp"
#include "qinf/numeric.hpp"

namespace qinf {

namespace detail {

inline constexpr unsigned kMaxBernoulliHalf = 60;

/// B_0 .. B_{2*kMaxBernoulliHalf}, B_1 = -1/2.
inline const std::vector<Rational>& bernoulli_table() {
    static const std::vector<Rational> table = [] {
        const unsigned n = 2 * kMaxBernoulliHalf + 1;
        std::vector<Rational> b(n);
        b[0] = 1;
        for (unsigned m = 1; m < n; ++m) {
            // sum_{k=0}^{m} C(m+1, k) B_k = 0
            Rational acc = 0;
            Index binom = 1;  // C(m+1, 0)
            for (unsigned k = 0; k < m; ++k) {
                acc += Rational(binom) * b[k];
                binom = binom * (m + 1 - k) / (k + 1);
            }
            b[m] = -acc / Rational(m + 1);
            b[m].canonicalize();
        }
        return b;
    }();
    return table;
}

/// B_{2k} / (2k)!
inline const std::vector<Rational>& bernoulli_over_factorial() {
    static const std::vector<Rational> table = [] {
        const auto& b = bernoulli_table();
        std::vector<Rational> t(kMaxBernoulliHalf + 1);
        Index fact = 1;
        unsigned done = 0;
        for (unsigned k = 0; k <= kMaxBernoulliHalf; ++k) {
            while (done < 2 * k) {
                ++done;
                fact *= done;
            }
            t[k] = b[2 * k] / Rational(fact);
            t[k].canonicalize();
        }
        return t;
    }();
    return table;
}

/// g(t, u) = expm1(t u) / t, with g(0, u) = u; increasing in t and in u.
inline Interval expm1_ratio(const Interval& t, const Interval& u) {
    auto at = [&](mpfr_srcptr tv) {
        if (mpfr_zero_p(tv)) return u;
        Interval tt = Interval::point(tv);
        return expm1(tt * u) / tt;
    };
    return Interval::hull(at(t.lo()), at(t.hi()));
}

/// integral_A^U x^-s dx, U = A + span; span = nullopt means U = infinity.
inline Interval power_integral(const Interval& s, const Rational& a, const std::optional<Rational>& span, Precision p) {
    Interval one = Interval::from(1L, p);
    Interval ai = Interval::from(a, p);
    if (!span) {
        if (!certainly_less(one, s)) throw InvalidArgument("infinite power sum needs exponent > 1");
        return pow(ai, one - s) / (s - one);
    }
    Interval u = log1p(Interval::from(Rational(*span / a), p));
    return pow(ai, one - s) * expm1_ratio(one - s, u);
}

}  // namespace detail

/// Options for power_sum.
struct PowerSumOptions {
    /// Cap on explicit terms before the asymptotic expansion takes over.
    unsigned long max_explicit_terms = 10'000'000;
};

/// sum_{j=0}^{count-1} (start + j)^(-s), count = nullopt for the infinite tail (needs s > 1).
inline Interval power_sum(const Interval& s, const Rational& start, const std::optional<Index>& count, Precision p,
                          const PowerSumOptions& opt = {}) {
    if (start <= 0) throw InvalidArgument("power_sum needs a positive start");
    if (!s.certainly_positive()) throw InvalidArgument("power_sum needs a positive exponent");
    if (count && *count <= 0) return Interval::from(0L, p);
    const Precision wp = p + 16;
    Interval neg_s = -s;
    auto term = [&](const Rational& x) { return pow(Interval::from(x, wp), neg_s); };

    const double s_hi = s.upper();
    const double s_lo = s.lower();
    const double log_start = std::log(start.get_d());
    // log of a value the sum is at least as large as: its first term.
    const double log_first = -s_hi * log_start;
    const double log_target = log_first - static_cast<double>(wp) * std::log(2.0);

    // Choose how many explicit terms J and the expansion order P.
    unsigned long explicit_terms = 0;
    unsigned order = 0;
    const auto& bf = detail::bernoulli_over_factorial();
    for (unsigned long j = 0;; j = (j == 0 ? 32 : 2 * j)) {
        if (count && Index(j) >= *count) {
            explicit_terms = count->fits_ulong_p() ? count->get_ui() : j;
            order = 0;
            break;
        }
        if (j > opt.max_explicit_terms) throw CapacityError("power_sum: explicit-term cap exceeded");
        const double log_a = std::log(start.get_d() + static_cast<double>(j));
        // least order whose remainder estimate reaches the target
        unsigned found = 0;
        for (unsigned k = 1; k <= detail::kMaxBernoulliHalf && found == 0; ++k) {
            const double lb = std::log(std::fabs(bf[k].get_d()));
            const double lr = std::lgamma(s_lo + 2.0 * k - 1.0) - std::lgamma(s_lo);
            const double lrh = std::lgamma(s_hi + 2.0 * k - 1.0) - std::lgamma(s_hi);
            const double bound = lb + std::max(lr, lrh) - (s_lo + 2.0 * k - 1.0) * log_a;
            if (bound <= log_target) found = k;
        }
        if (found != 0) {
            explicit_terms = j;
            order = found;
            break;
        }
    }

    Interval acc = Interval::from(0L, wp);
    for (unsigned long j = 0; j < explicit_terms; ++j) acc += term(start + Rational(j));
    if (count && Index(explicit_terms) >= *count) return acc;

    // Euler-Maclaurin over [A, U].
    const Rational a = start + Rational(explicit_terms);
    std::optional<Rational> span;
    if (count) span = Rational(*count - explicit_terms - 1);
    Interval ai = Interval::from(a, wp);

    Interval em = detail::power_integral(s, a, span, wp);
    Interval half = Interval::from(Rational(1, 2), wp);
    em += half * term(a);
    std::optional<Interval> ui;
    if (span) {
        ui = Interval::from(Rational(a + *span), wp);
        em += half * term(a + *span);
    }
    // f^(2k-1)(x) = -(s)_{2k-1} x^(-s-2k+1); term B_2k/(2k)! (f'(U) - f'(A)).
    // r = (s)_{2k-1}, pa = A^(-s-2k+1), pu = U^(-s-2k+1), all advanced by k.
    Interval r = s;
    Interval e1 = -(s + Interval::from(1L, wp));
    Interval pa = pow(ai, e1);
    Interval inv_a2 = Interval::from(Rational(1 / (a * a)), wp);
    std::optional<Interval> pu, inv_u2;
    if (ui) {
        pu = pow(*ui, e1);
        Rational u = a + *span;
        inv_u2 = Interval::from(Rational(1 / (u * u)), wp);
    }
    for (unsigned k = 1; k <= order; ++k) {
        if (k > 1) {
            r = r * (s + Interval::from(static_cast<long>(2 * k - 3), wp)) *
                (s + Interval::from(static_cast<long>(2 * k - 2), wp));
            pa = pa * inv_a2;
            if (pu) *pu = *pu * *inv_u2;
        }
        Interval diff = pu ? pa - *pu : pa;
        em += Interval::from(bf[k], wp) * r * diff;
    }
    // remainder bound from order P (the P-th term is included above).
    {
        Interval bound = Interval::from(Rational(abs(bf[order])), wp) * r * pa;
        em += Interval::hull(-bound, bound);
    }
    return acc + em;
}

}  // namespace qinf
