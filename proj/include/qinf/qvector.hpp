#pragma once

// Q-infinity vectors: positive weights q_0, q_1, ... with sum 1.
//
// Luroth, geometric and padded custom vectors have closed-form partial sums
// and can run in exact rational arithmetic. Power-law vectors are normalised
// by zeta(m0), which is only ever held as an enclosure.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qinf/error.hpp"
#include "qinf/numeric.hpp"
#include "qinf/power_sums.hpp"

namespace qinf {

enum class NumericMode { Exact, IntervalBounds };

/// q_i = 1 / ((i+1)(i+2))
struct LurothFamily {};

/// q_i = (1 - r) r^i
struct GeometricFamily {
    Rational ratio;
};

/// q_i = (i+1)^(-m0) / zeta(m0)
struct PowerLawFamily {
    std::string exponent_text;
    Interval exponent;
};

/// q_i = weights[i] for i < k, then q_{k+j} = pad_mass * 2^-(j+1).
struct CustomFamily {
    std::vector<Rational> weights;  // after the pad mass has been reserved
    Rational pad_mass;
    std::vector<Rational> user_weights;
};

using Family = std::variant<LurothFamily, GeometricFamily, PowerLawFamily, CustomFamily>;

/// Default mass reserved for the geometric tail of a custom vector.
inline Rational default_pad_mass() { return Rational(1, 1 << 20); }

struct MaxWeight {
    Scalar value;
    Index index;
    /// First index whose tail is certified below the maximum.
    Index stop;
};

class QVectorSpec {
public:
    static QVectorSpec luroth(NumericMode mode = NumericMode::Exact, Precision p = kDefaultPrecision) {
        return QVectorSpec(LurothFamily{}, mode, p);
    }

    static QVectorSpec geometric(Rational ratio, NumericMode mode = NumericMode::Exact,
                                 Precision p = kDefaultPrecision) {
        ratio.canonicalize();
        if (ratio <= 0 || ratio >= 1) throw InvalidArgument("geometric ratio must lie in (0,1)");
        return QVectorSpec(GeometricFamily{std::move(ratio)}, mode, p);
    }

    static QVectorSpec power_law(std::string_view exponent, Precision p = kDefaultPrecision) {
        Interval m0 = Interval::parse(exponent, p + 32);
        if (!certainly_less(Interval::from(1L, p), m0)) throw InvalidArgument("power-law exponent must exceed 1");
        return QVectorSpec(PowerLawFamily{std::string(exponent), std::move(m0)}, NumericMode::IntervalBounds, p);
    }

    /// Explicit weights. If they sum to 1 the pad mass is taken from the last entry;
    /// if they sum to less than 1 the remainder becomes the pad mass.
    static QVectorSpec custom(std::vector<Rational> weights, std::optional<Rational> pad_mass = std::nullopt,
                              NumericMode mode = NumericMode::Exact, Precision p = kDefaultPrecision) {
        if (weights.empty()) throw InvalidArgument("custom vector needs at least one weight");
        Rational total = 0;
        for (auto& w : weights) {
            w.canonicalize();
            if (w <= 0) throw InvalidArgument("custom weights must be positive");
            total += w;
        }
        CustomFamily fam;
        fam.user_weights = weights;
        if (total > 1) throw InvalidArgument("custom weights sum to more than 1");
        if (total == 1) {
            Rational m = pad_mass.value_or(default_pad_mass());
            if (m <= 0 || m >= weights.back())
                throw InvalidArgument("pad mass must be positive and smaller than the last weight");
            weights.back() -= m;
            fam.pad_mass = m;
        } else {
            fam.pad_mass = 1 - total;
        }
        fam.weights = std::move(weights);
        return QVectorSpec(std::move(fam), mode, p);
    }

    const Family& family() const { return family_; }
    NumericMode mode() const { return mode_; }
    bool exact() const { return mode_ == NumericMode::Exact; }
    Precision precision() const { return precision_; }

    QVectorSpec with_precision(Precision p) const {
        QVectorSpec copy = *this;
        copy.precision_ = p;
        if (auto* pl = std::get_if<PowerLawFamily>(&copy.family_)) {
            pl->exponent = Interval::parse(pl->exponent_text, p + 32);
            copy.init_power_law();
        }
        return copy;
    }

    QVectorSpec with_mode(NumericMode m) const {
        QVectorSpec copy = *this;
        copy.mode_ = std::holds_alternative<PowerLawFamily>(family_) ? NumericMode::IntervalBounds : m;
        return copy;
    }

    std::string name() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, LurothFamily>) return "luroth";
                else if constexpr (std::is_same_v<F, GeometricFamily>) return "geometric(" + to_string(f.ratio) + ")";
                else if constexpr (std::is_same_v<F, PowerLawFamily>) return "powerlaw(" + f.exponent_text + ")";
                else return "custom(" + std::to_string(f.user_weights.size()) + ")";
            },
            family_);
    }

    /// q_i
    Scalar q(const Index& i) const {
        check_index(i);
        return finish(std::visit([&](const auto& f) { return q_impl(f, i); }, family_));
    }

    /// sum_{i<n} q_i
    Scalar head_sum(const Index& n) const {
        check_index(n);
        if (n == 0) return finish(Scalar(Rational(0)));
        if (const auto* pl = std::get_if<PowerLawFamily>(&family_)) {
            if (n <= 64) return power_sum(pl->exponent, Rational(1), n, precision_) / zeta_;
            return Interval::from(1L, precision_) - tail_interval(*pl, n);
        }
        return finish(Scalar(Rational(1)) - raw_tail(n));
    }

    /// sum_{i>=n} q_i
    Scalar tail_sum(const Index& n) const {
        check_index(n);
        if (n == 0) return finish(Scalar(Rational(1)));
        if (const auto* pl = std::get_if<PowerLawFamily>(&family_)) return tail_interval(*pl, n);
        return finish(raw_tail(n));
    }

    /// sum_{i=first}^{last} q_i, inclusive; zero when last < first.
    Scalar range_sum(const Index& first, const Index& last) const {
        check_index(first);
        if (last < first) return finish(Scalar(Rational(0)));
        if (const auto* pl = std::get_if<PowerLawFamily>(&family_))
            return power_sum(pl->exponent, Rational(first + 1), Index(last - first + 1), precision_) / zeta_;
        return finish(raw_tail(first) - raw_tail(last + 1));
    }

    /// sum_{i=first}^{last} q_i^s as an enclosure.
    Interval power_range_sum(const Index& first, const Index& last, const Interval& s) const {
        check_index(first);
        if (last < first) return Interval::from(0L, precision_);
        const Index count = last - first + 1;
        return std::visit([&](const auto& f) { return power_range_impl(f, first, count, s); }, family_);
    }

    /// sum_{i>=n} q_i^s, or nullopt when the series diverges.
    std::optional<Interval> power_tail(const Index& n, const Interval& s) const {
        check_index(n);
        return std::visit([&](const auto& f) { return power_tail_impl(f, n, s); }, family_);
    }

    /// max_i q_i, found by scanning until the remaining tail is below the running maximum.
    MaxWeight max_weight() const {
        Scalar best = q(Index(0));
        Index best_i = 0;
        for (Index i = 1;; ++i) {
            Scalar rest = tail_sum(i);
            if (compare(rest, best, precision_) == Order::Less) return MaxWeight{best, best_i, i};
            Scalar qi = q(i);
            Order o = compare(qi, best, precision_);
            if (o == Order::Greater) {
                best = qi;
                best_i = i;
            } else if (o == Order::Unknown) {
                Interval a = qi.enclose(precision_);
                Interval b = best.enclose(precision_);
                best = Interval::hull(a, b);
                if (a.upper() > b.upper()) best_i = i;
            }
            if (i > 10'000'000) throw CapacityError("max_weight: scan did not terminate");
        }
    }

    /// Enclosure of zeta(m0) for power-law vectors.
    const Interval& normaliser() const { return zeta_; }

private:
    Family family_;
    NumericMode mode_;
    Precision precision_;
    Interval zeta_;

    QVectorSpec(Family f, NumericMode m, Precision p) : family_(std::move(f)), mode_(m), precision_(p), zeta_(p) {
        if (std::holds_alternative<PowerLawFamily>(family_)) {
            mode_ = NumericMode::IntervalBounds;
            init_power_law();
        }
    }

    void init_power_law() {
        const auto& pl = std::get<PowerLawFamily>(family_);
        zeta_ = power_sum(pl.exponent, Rational(1), std::nullopt, precision_);
    }

    static void check_index(const Index& i) {
        if (i < 0) throw InvalidArgument("indices must be non-negative");
    }

    Scalar finish(Scalar v) const {
        if (mode_ == NumericMode::IntervalBounds && v.is_exact()) return v.enclose(precision_);
        return v;
    }

    Interval tail_interval(const PowerLawFamily& pl, const Index& n) const {
        return power_sum(pl.exponent, Rational(n + 1), std::nullopt, precision_) / zeta_;
    }

    static constexpr double kMaxExactBits = 1 << 24;

    static unsigned long small(const Index& n, const char* what) {
        if (!n.fits_ulong_p()) throw CapacityError(std::string(what) + ": index too large for exact arithmetic");
        return n.get_ui();
    }

    /// r^n, exact when possible.
    Scalar geometric_power(const Rational& r, const Index& n) const {
        if (mode_ == NumericMode::Exact || n < 4096) {
            unsigned long e = small(n, "geometric");
            if (static_cast<double>(e) * static_cast<double>(mpz_sizeinbase(r.get_den().get_mpz_t(), 2)) > kMaxExactBits)
                throw CapacityError("geometric: exact power too large, use interval mode");
            Index num, den;
            mpz_pow_ui(num.get_mpz_t(), r.get_num().get_mpz_t(), e);
            mpz_pow_ui(den.get_mpz_t(), r.get_den().get_mpz_t(), e);
            Rational v(num, den);
            v.canonicalize();
            return v;
        }
        Interval lr = log(Interval::from(r, precision_ + 16));
        return exp(Interval::from(n, precision_ + 16) * lr);
    }

    /// sum_{i>=n} q_i for the closed-form families.
    Scalar raw_tail(const Index& n) const {
        return std::visit(
            [&](const auto& f) -> Scalar {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, LurothFamily>) {
                    return Rational(Index(1), Index(n + 1));
                } else if constexpr (std::is_same_v<F, GeometricFamily>) {
                    return geometric_power(f.ratio, n);
                } else if constexpr (std::is_same_v<F, CustomFamily>) {
                    const Index k = static_cast<unsigned long>(f.weights.size());
                    if (n >= k) return pad_scale(f.pad_mass, Index(n - k));
                    Rational acc = f.pad_mass;
                    for (unsigned long i = n.get_ui(); i < f.weights.size(); ++i) acc += f.weights[i];
                    return acc;
                } else {
                    throw Error("raw_tail called for a power-law vector");
                }
            },
            family_);
    }

    /// m * 2^-e
    Scalar pad_scale(const Rational& m, const Index& e) const {
        if (e.fits_ulong_p() && (mode_ == NumericMode::Exact || e < 100000)) {
            if (e > kMaxExactBits) throw CapacityError("custom: exact pad weight too small, use interval mode");
            Rational v = m;
            mpq_div_2exp(v.get_mpq_t(), m.get_mpq_t(), e.get_ui());
            return v;
        }
        if (!e.fits_slong_p()) throw CapacityError("pad index out of range");
        return mul_2si(Interval::from(m, precision_), -e.get_si());
    }

    Scalar q_impl(const LurothFamily&, const Index& i) const { return Rational(Index(1), Index((i + 1) * (i + 2))); }

    Scalar q_impl(const GeometricFamily& f, const Index& i) const {
        return Scalar(Rational(1 - f.ratio)) * geometric_power(f.ratio, i);
    }

    Scalar q_impl(const PowerLawFamily& f, const Index& i) const {
        return pow(Interval::from(Index(i + 1), precision_ + 16), -f.exponent) / zeta_;
    }

    Scalar q_impl(const CustomFamily& f, const Index& i) const {
        const Index k = static_cast<unsigned long>(f.weights.size());
        if (i < k) return f.weights[i.get_ui()];
        return pad_scale(f.pad_mass, Index(i - k + 1));
    }

    // --- sums of powers -------------------------------------------------

    Interval power_range_impl(const LurothFamily&, const Index& first, const Index& count, const Interval& s) const {
        const Precision wp = precision_ + 16;
        Interval neg = -s;
        auto explicit_sum = [&](const Index& from, unsigned long n) {
            Interval acc = Interval::from(0L, wp);
            for (unsigned long j = 0; j < n; ++j) {
                Index i = from + j;
                acc += pow(Interval::from(Index((i + 1) * (i + 2)), wp), neg);
            }
            return acc;
        };
        if (count <= 100000) return explicit_sum(first, count.get_ui());
        const unsigned long head = 1000;
        Interval acc = explicit_sum(first, head);
        Rational x0 = Rational(first + head) + Rational(3, 2);
        return acc + luroth_shifted(x0, Index(count - head), s, wp);
    }

    // (i+1)(i+2) = x^2 (1 - u) with x = i + 3/2, u = 1/(4x^2), and
    // (1-u)^-s - 1 - s u lies in s(s+1)/2 u^2 [1, (1 - u0)^(-s-2)] for u <= u0.
    static Interval luroth_shifted(const Rational& x0, const std::optional<Index>& count, const Interval& s,
                                   Precision wp) {
        Interval two = Interval::from(2L, wp);
        Interval two_s = two * s;
        Interval base = power_sum(two_s, x0, count, wp);
        Interval first = power_sum(two_s + two, x0, count, wp) * s * Interval::from(Rational(1, 4), wp);
        Interval second = power_sum(two_s + Interval::from(4L, wp), x0, count, wp) * s *
                          (s + Interval::from(1L, wp)) * Interval::from(Rational(1, 32), wp);
        Interval corr = pow(Interval::from(Rational(1 - 1 / (4 * x0 * x0)), wp), -(s + two));
        return base + first + Interval::hull(second, second * corr);
    }

    Interval power_range_impl(const GeometricFamily& f, const Index& first, const Index& count,
                              const Interval& s) const {
        const Precision wp = precision_ + 16;
        Interval ls = s * log(Interval::from(f.ratio, wp));
        Interval lead = pow(Interval::from(Rational(1 - f.ratio), wp), s) * exp(Interval::from(first, wp) * ls);
        return lead * (-expm1(Interval::from(count, wp) * ls)) / (-expm1(ls));
    }

    Interval power_range_impl(const PowerLawFamily& f, const Index& first, const Index& count,
                              const Interval& s) const {
        const Precision wp = precision_ + 16;
        return power_sum(f.exponent * s, Rational(first + 1), count, wp) * pow(zeta_, -s);
    }

    Interval pad_power_sum(const CustomFamily& f, const Index& j0, const std::optional<Index>& count,
                           const Interval& s) const {
        // sum over j of (m 2^-(j+1))^s for j = j0 .. j0+count-1
        const Precision wp = precision_ + 16;
        Interval ls = s * log(Interval::from(Rational(1, 2), wp));
        Interval lead = pow(Interval::from(f.pad_mass, wp), s) * exp(Interval::from(Index(j0 + 1), wp) * ls);
        Interval num = count ? -expm1(Interval::from(*count, wp) * ls) : Interval::from(1L, wp);
        return lead * num / (-expm1(ls));
    }

    Interval power_range_impl(const CustomFamily& f, const Index& first, const Index& count, const Interval& s) const {
        const Precision wp = precision_ + 16;
        const Index k = static_cast<unsigned long>(f.weights.size());
        Interval acc = Interval::from(0L, wp);
        Index i = first;
        Index left = count;
        while (i < k && left > 0) {
            acc += pow(Interval::from(f.weights[i.get_ui()], wp), s);
            ++i;
            --left;
        }
        if (left > 0) acc += pad_power_sum(f, Index(i - k), left, s);
        return acc;
    }

    std::optional<Interval> power_tail_impl(const LurothFamily&, const Index& n, const Interval& s) const {
        const Precision wp = precision_ + 16;
        Interval two_s = Interval::from(2L, wp) * s;
        Interval one = Interval::from(1L, wp);
        if (certainly_less_equal(two_s, one)) return std::nullopt;
        if (!certainly_less(one, two_s)) throw InvalidArgument("cannot decide convergence of the power tail");
        const unsigned long head = 1000;
        Interval acc = power_range_impl(LurothFamily{}, n, Index(head), s);
        Rational x0 = Rational(n + head) + Rational(3, 2);
        return acc + luroth_shifted(x0, std::nullopt, s, wp);
    }

    std::optional<Interval> power_tail_impl(const GeometricFamily& f, const Index& n, const Interval& s) const {
        const Precision wp = precision_ + 16;
        Interval ls = s * log(Interval::from(f.ratio, wp));
        Interval lead = pow(Interval::from(Rational(1 - f.ratio), wp), s) * exp(Interval::from(n, wp) * ls);
        return lead / (-expm1(ls));
    }

    std::optional<Interval> power_tail_impl(const PowerLawFamily& f, const Index& n, const Interval& s) const {
        const Precision wp = precision_ + 16;
        Interval e = f.exponent * s;
        Interval one = Interval::from(1L, wp);
        if (certainly_less_equal(e, one)) return std::nullopt;
        if (!certainly_less(one, e)) throw InvalidArgument("cannot decide convergence of the power tail");
        return power_sum(e, Rational(n + 1), std::nullopt, wp) * pow(zeta_, -s);
    }

    std::optional<Interval> power_tail_impl(const CustomFamily& f, const Index& n, const Interval& s) const {
        const Index k = static_cast<unsigned long>(f.weights.size());
        if (n >= k) return pad_power_sum(f, Index(n - k), std::nullopt, s);
        Interval acc = power_range_impl(f, n, Index(k - n), s);
        return acc + pad_power_sum(f, Index(0), std::nullopt, s);
    }
};

}  // namespace qinf
