#pragma once

// Cantor-like set K = { x : k_j <= a_j(x) <= k_j + M_j for all j } built level by
// level so that each digit window violates the tail inequality while the
// delta/2-volume of the window unions stays under a budget L. The cylinder
// measure mu(Delta_{a_1..a_n}) = prod q_{a_j}^alpha / gamma_j lives on K.
//
// Volumes never enumerate addresses: every level sum factors into one-level sums.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qinf/error.hpp"
#include "qinf/numeric.hpp"
#include "qinf/qvector.hpp"

namespace qinf {

/// eps_n = first * ratio^(n-1)
struct EpsilonRule {
    Rational first{1, 1000};
    Rational ratio{1, 2};

    Rational at(std::size_t n) const {
        if (n == 0) throw InvalidArgument("levels are 1-based");
        Rational e = first;
        for (std::size_t i = 1; i < n; ++i) e *= ratio;
        return e;
    }

    void validate() const {
        if (first <= 0 || ratio <= 0 || ratio >= 1) throw InvalidArgument("eps rule needs first > 0 and 0 < ratio < 1");
    }
};

/// Windows reach indices far beyond what exact powers can hold.
inline QVectorSpec interval_mode(const QVectorSpec& q) { return q.with_mode(NumericMode::IntervalBounds); }

struct CantorLevel {
    Index k;
    Index M;
    Interval gamma;       // sum_{i=k}^{k+M} q_i^alpha
    Interval window_pow;  // (sum_{i=k}^{k+M} q_i)^(alpha-delta)
    Interval tail;        // tail_sum(k)
    Interval budget;      // delta/2-volume of the window unions over all prefixes, tail form
    Precision precision = 0;
};

struct CantorSpec {
    QVectorSpec qvec;
    Rational alpha;
    Rational delta;
    Rational L;
    EpsilonRule eps;
    Index N;
    std::vector<CantorLevel> levels;
    Precision precision = kDefaultPrecision;

    std::size_t depth() const { return levels.size(); }
    QVectorSpec working() const { return interval_mode(qvec).with_precision(precision); }
    const CantorLevel& level(std::size_t n) const {
        if (n == 0 || n > levels.size()) throw InvalidArgument("level " + std::to_string(n) + " is not built");
        return levels[n - 1];
    }
};

/// Digits (a_1 .. a_n) with k_j <= a_j <= k_j + M_j.
struct CantorAddress {
    std::vector<Index> digits;
    std::size_t rank() const { return digits.size(); }
};

enum class VolumeFamily { PhiSplit, BlockUnion };

inline const char* to_string(VolumeFamily f) { return f == VolumeFamily::PhiSplit ? "phi_split" : "block_union"; }

struct CantorBuildOptions {
    Precision base_precision = kDefaultPrecision;
    unsigned linear_scan = 4096;   // M values tried one by one before doubling
    unsigned max_m_doublings = 160;
    unsigned max_k_doublings = 1024;
};

namespace detail {

inline void check_cantor_params(const Rational& alpha, const Rational& delta, const Rational& L) {
    if (!(0 < delta && delta < alpha && alpha < 1)) throw InvalidArgument("need 0 < delta < alpha < 1");
    if (!(0 < L && L < 1)) throw InvalidArgument("L must lie in (0,1)");
}

inline Precision precision_for(Precision base, const Index& k) {
    return base + 2 * static_cast<Precision>(mpz_sizeinbase(k.get_mpz_t(), 2));
}

/// prod_{j<n} sum_{i=k_j}^{k_j+M_j} q_i^s over the built levels 1..n-1.
inline Interval prefix_product(const QVectorSpec& q, const std::vector<CantorLevel>& levels, std::size_t n,
                               const Interval& s) {
    Interval acc = Interval::from(1L, q.precision());
    for (std::size_t j = 0; j + 1 < n; ++j)
        acc = acc * q.power_range_sum(levels[j].k, levels[j].k + levels[j].M, s);
    return acc;
}

/// Least k > N with tail(k) <= eps and P tail(k)^(delta/2) <= L.
inline Index find_k(const QVectorSpec& q, const std::vector<CantorLevel>& levels, std::size_t n, const Rational& delta,
                    const Rational& L, const Rational& eps, const Index& N, unsigned max_doublings) {
    const Precision p = q.precision();
    Interval half_delta = Interval::from(Rational(delta / 2), p);
    Interval prod = prefix_product(q, levels, n, half_delta);
    Interval eps_i = Interval::from(eps, p);
    Interval L_i = Interval::from(L, p);
    auto ok = [&](const Index& k) {
        Interval t = q.tail_sum(k).enclose(p);
        return certainly_less_equal(t, eps_i) && certainly_less_equal(prod * pow(t, half_delta), L_i);
    };
    Index lo = N;  // the search domain is k > N
    Index step = 1;
    Index hi = N + step;
    unsigned d = 0;
    while (!ok(hi)) {
        lo = hi;
        step *= 2;
        hi = N + step;
        if (++d > max_doublings) throw BudgetInfeasible("build_cantor: volume budget unreachable at level " + std::to_string(n));
    }
    while (hi - lo > 1) {
        Index mid = (lo + hi) / 2;
        if (ok(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

/// Least M > N with (sum q)^(alpha-delta) < sum q^alpha over [k, k+M].
inline Index find_m(const QVectorSpec& q, const Index& k, const Rational& alpha, const Rational& delta, const Index& N,
                    const CantorBuildOptions& opt) {
    const Precision p = q.precision();
    Interval a = Interval::from(alpha, p);
    Interval ad = Interval::from(Rational(alpha - delta), p);
    Interval sq = q.range_sum(k, k + N).enclose(p);
    Interval sa = q.power_range_sum(k, k + N, a);
    Index m = N + 1;
    for (unsigned i = 0; i < opt.linear_scan; ++i, ++m) {
        Interval w = q.q(k + m).enclose(p);
        sq += w;
        sa += pow(w, a);
        if (certainly_less(pow(sq, ad), sa)) return m;
    }
    auto violated = [&](const Index& mm) {
        Interval lhs = pow(q.range_sum(k, k + mm).enclose(p), ad);
        return certainly_less(lhs, q.power_range_sum(k, k + mm, a));
    };
    // beyond the linear window the crossing is located by doubling and bisection
    Index lo = m - 1;
    Index hi = lo * 2;
    unsigned d = 0;
    while (!violated(hi)) {
        lo = hi;
        hi *= 2;
        if (++d > opt.max_m_doublings)
            throw NoViolation("build_cantor: no violating M at offset k = " + k.get_str());
    }
    while (hi - lo > 1) {
        Index mid = (lo + hi) / 2;
        if (violated(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

inline CantorLevel finish_level(const QVectorSpec& q, const std::vector<CantorLevel>& levels, std::size_t n,
                                Index k, Index M, const Rational& alpha, const Rational& delta) {
    const Precision p = q.precision();
    CantorLevel lv;
    lv.gamma = q.power_range_sum(k, k + M, Interval::from(alpha, p));
    lv.window_pow = pow(q.range_sum(k, k + M).enclose(p), Interval::from(Rational(alpha - delta), p));
    lv.tail = q.tail_sum(k).enclose(p);
    Interval half_delta = Interval::from(Rational(delta / 2), p);
    lv.budget = prefix_product(q, levels, n, half_delta) * pow(lv.tail, half_delta);
    lv.k = std::move(k);
    lv.M = std::move(M);
    lv.precision = p;
    return lv;
}

}  // namespace detail

/// Levels 1..depth with minimal k_n and then minimal M_n.
inline CantorSpec build_cantor(const QVectorSpec& qvec, const Rational& alpha, const Rational& delta,
                               const Rational& L, const EpsilonRule& eps, const Index& N, std::size_t depth,
                               const CantorBuildOptions& opt = {}) {
    detail::check_cantor_params(alpha, delta, L);
    eps.validate();
    if (depth == 0) throw InvalidArgument("depth must be at least 1");
    if (N < 0) throw InvalidArgument("N must be nonnegative");
    CantorSpec spec{qvec, alpha, delta, L, eps, N, {}, opt.base_precision};
    for (std::size_t n = 1; n <= depth; ++n) {
        // the working precision follows the size of the digits being resolved
        Precision p = detail::precision_for(opt.base_precision, n == 1 ? N : spec.levels.back().k);
        Index k;
        for (int pass = 0; pass < 4; ++pass) {
            QVectorSpec q = interval_mode(qvec).with_precision(p);
            k = detail::find_k(q, spec.levels, n, delta, L, eps.at(n), N, opt.max_k_doublings);
            Precision need = detail::precision_for(opt.base_precision, k);
            if (need <= p) break;
            p = need;
        }
        QVectorSpec q = interval_mode(qvec).with_precision(p);
        Index M = detail::find_m(q, k, alpha, delta, N, opt);
        Precision need = detail::precision_for(opt.base_precision, Index(k + M));
        if (need > p) {
            p = need;
            q = interval_mode(qvec).with_precision(p);
        }
        spec.levels.push_back(detail::finish_level(q, spec.levels, n, std::move(k), std::move(M), alpha, delta));
        spec.precision = std::max(spec.precision, p);
    }
    return spec;
}

/// A spec with prescribed windows (no minimality or violation requirement).
inline CantorSpec cantor_from_levels(const QVectorSpec& qvec, const Rational& alpha, const Rational& delta,
                                     const Rational& L, const EpsilonRule& eps, const Index& N,
                                     const std::vector<std::pair<Index, Index>>& windows,
                                     Precision base = kDefaultPrecision) {
    detail::check_cantor_params(alpha, delta, L);
    eps.validate();
    CantorSpec spec{qvec, alpha, delta, L, eps, N, {}, base};
    for (const auto& [k, M] : windows) {
        if (k < 0 || M < 0) throw InvalidArgument("windows need k >= 0 and M >= 0");
        spec.precision = std::max(spec.precision, detail::precision_for(base, Index(k + M)));
    }
    QVectorSpec q = interval_mode(qvec).with_precision(spec.precision);
    for (std::size_t n = 1; n <= windows.size(); ++n)
        spec.levels.push_back(detail::finish_level(q, spec.levels, n, windows[n - 1].first, windows[n - 1].second,
                                                   alpha, delta));
    return spec;
}

// --- queries ------------------------------------------------------------

/// Level-n s-volume. PhiSplit: prod_{j<=n} sum_j q^s. BlockUnion: prod_{j<n} sum_j q^s * (sum_n q)^s.
inline Interval level_volume(const CantorSpec& spec, std::size_t n, const Interval& s, VolumeFamily family) {
    (void)spec.level(n);
    if (!s.certainly_positive() || !certainly_less_equal(s, Interval::from(1L, s.precision())))
        throw InvalidArgument("level_volume needs s in (0,1]");
    QVectorSpec q = spec.working();
    const Precision p = q.precision();
    Interval acc = detail::prefix_product(q, spec.levels, n, s);
    const CantorLevel& lv = spec.level(n);
    if (family == VolumeFamily::PhiSplit) return acc * q.power_range_sum(lv.k, lv.k + lv.M, s);
    return acc * pow(q.range_sum(lv.k, lv.k + lv.M).enclose(p), s);
}

inline Interval level_volume(const CantorSpec& spec, std::size_t n, const Rational& s, VolumeFamily family) {
    return level_volume(spec, n, Interval::from(s, spec.precision), family);
}

inline void check_address(const CantorSpec& spec, const CantorAddress& addr) {
    if (addr.rank() > spec.depth()) throw InvalidArgument("address is deeper than the built spec");
    for (std::size_t j = 0; j < addr.rank(); ++j) {
        const CantorLevel& lv = spec.levels[j];
        if (addr.digits[j] < lv.k || addr.digits[j] > lv.k + lv.M)
            throw InvalidArgument("digit " + addr.digits[j].get_str() + " at level " + std::to_string(j + 1) +
                                  " is outside [" + lv.k.get_str() + ", " + Index(lv.k + lv.M).get_str() + "]");
    }
}

/// mu(Delta_addr) = prod q_{a_j}^alpha / gamma_j
inline Interval measure_cylinder(const CantorSpec& spec, const CantorAddress& addr) {
    check_address(spec, addr);
    QVectorSpec q = spec.working();
    const Precision p = q.precision();
    Interval a = Interval::from(spec.alpha, p);
    Interval acc = Interval::from(1L, p);
    for (std::size_t j = 0; j < addr.rank(); ++j) acc = acc * pow(q.q(addr.digits[j]).enclose(p), a) / spec.levels[j].gamma;
    return acc;
}

/// Total mass of all level-n cylinders, prod_{j<=n} (sum_j q^alpha) / gamma_j, with the sums recomputed.
inline Interval level_mass(const CantorSpec& spec, std::size_t n) {
    (void)spec.level(n);
    QVectorSpec q = interval_mode(spec.qvec).with_precision(2 * spec.precision);
    Interval a = Interval::from(spec.alpha, q.precision());
    Interval acc = Interval::from(1L, q.precision());
    for (std::size_t j = 0; j < n; ++j) {
        const CantorLevel& lv = spec.levels[j];
        acc = acc * q.power_range_sum(lv.k, lv.k + lv.M, a) / lv.gamma;
    }
    return acc;
}

struct RatioCertificate {
    Interval ratio;  // mu(Delta) / |Delta|^t
    Interval bound;  // eps_n^(delta - t)
    bool holds() const { return certainly_less_equal(ratio, bound); }
};

inline RatioCertificate local_dim_ratio(const CantorSpec& spec, const CantorAddress& addr, const Rational& t) {
    if (!(0 < t && t < spec.delta)) throw InvalidArgument("local_dim_ratio needs 0 < t < delta");
    if (addr.rank() == 0) throw InvalidArgument("local_dim_ratio needs a nonempty address");
    check_address(spec, addr);
    QVectorSpec q = spec.working();
    const Precision p = q.precision();
    Interval len = Interval::from(1L, p);
    for (const auto& d : addr.digits) len = len * q.q(d).enclose(p);
    RatioCertificate c;
    c.ratio = measure_cylinder(spec, addr) / pow(len, Interval::from(t, p));
    c.bound = pow(Interval::from(spec.eps.at(addr.rank()), p), Interval::from(Rational(spec.delta - t), p));
    return c;
}

struct CrossingEstimate {
    VolumeFamily family = VolumeFamily::BlockUnion;
    std::size_t level = 0;
    std::vector<std::pair<Rational, Interval>> curve;  // (s, V_level(s))
    std::optional<double> crossing;                    // log-linear interpolation of V = 1
    std::optional<Rational> last_above;                // largest grid s with V certainly > 1
    std::optional<Rational> first_below;               // least grid s with V certainly < 1
    bool low_confidence = false;
};

/// V(s) at the deepest level over s_grid and the s where it crosses 1.
inline CrossingEstimate estimate_critical_exponent(const CantorSpec& spec, VolumeFamily family,
                                                   std::vector<Rational> s_grid) {
    if (spec.depth() == 0) throw InvalidArgument("spec has no levels");
    if (s_grid.empty()) throw InvalidArgument("s grid is empty");
    std::sort(s_grid.begin(), s_grid.end());
    CrossingEstimate est;
    est.family = family;
    est.level = spec.depth();
    est.low_confidence = spec.depth() < 2;
    const Precision p = spec.precision;
    Interval one = Interval::from(1L, p);
    for (const auto& s : s_grid) {
        if (!(0 < s && s < 1)) throw InvalidArgument("grid values must lie in (0,1)");
        Interval v = level_volume(spec, est.level, s, family);
        if (certainly_less(one, v)) est.last_above = s;
        if (!est.first_below && certainly_less(v, one)) est.first_below = s;
        est.curve.emplace_back(s, std::move(v));
    }
    for (std::size_t i = 1; i < est.curve.size(); ++i) {
        double l0 = est.curve[i - 1].second.log_mid();
        double l1 = est.curve[i].second.log_mid();
        if (l0 >= 0 && l1 < 0) {
            double s0 = est.curve[i - 1].first.get_d();
            double s1 = est.curve[i].first.get_d();
            est.crossing = s0 + (s1 - s0) * l0 / (l0 - l1);
            break;
        }
    }
    return est;
}

struct GapReport {
    CrossingEstimate phi;
    CrossingEstimate block;
    /// The block-union volume is certainly below 1 at a grid point where the split volume is certainly above 1.
    bool separated() const {
        return block.first_below && phi.last_above && *block.first_below <= *phi.last_above;
    }
    std::optional<double> margin() const {
        if (!phi.crossing || !block.crossing) return std::nullopt;
        return *phi.crossing - *block.crossing;
    }
};

inline GapReport dimension_gap(const CantorSpec& spec, const std::vector<Rational>& s_grid) {
    return GapReport{estimate_critical_exponent(spec, VolumeFamily::PhiSplit, s_grid),
                     estimate_critical_exponent(spec, VolumeFamily::BlockUnion, s_grid)};
}

/// s = step, 2 step, ... below 1.
inline std::vector<Rational> uniform_grid(const Rational& step) {
    if (step <= 0 || step >= 1) throw InvalidArgument("grid step must lie in (0,1)");
    std::vector<Rational> g;
    for (Rational s = step; s < 1; s += step) g.push_back(s);
    return g;
}

}  // namespace qinf
