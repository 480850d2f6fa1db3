#pragma once

// Exact rationals, big indices and directed-rounding interval enclosures.
//
// Rationals and digit indices are GMP values; enclosures are pairs of MPFR
// floats where the lower end is always rounded toward -inf and the upper end
// toward +inf. Every operation keeps the true value inside the result.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "qinf/error.hpp"

namespace qinf {

using Rational = mpq_class;
using Index = mpz_class;
using Precision = mpfr_prec_t;

inline constexpr Precision kDefaultPrecision = 96;

inline std::string to_string(const Index& i) { return i.get_str(); }

inline std::string to_string(const Rational& r) {
    Rational c = r;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_str();
}

/// Parses "p/q" or "p" (no decimal point, no exponent).
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty() || s.find_first_of(".eE ") != std::string::npos)
        throw ParseError("expected a rational \"p/q\", got \"" + s + "\"");
    Rational r;
    if (r.set_str(s, 10) != 0) throw ParseError("malformed rational \"" + s + "\"");
    if (r.get_den() == 0) throw ParseError("zero denominator in \"" + s + "\"");
    r.canonicalize();
    return r;
}

/// Exact value of a decimal literal "[-]d[.d][e[+-]d]", or of "p/q".
inline Rational parse_decimal(std::string_view text) {
    std::string s(text);
    if (s.find('/') != std::string::npos) return parse_rational(s);
    std::size_t pos = 0;
    bool neg = false;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) neg = s[pos++] == '-';
    std::string digits;
    long exp10 = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c >= '0' && c <= '9') {
            digits += c;
            seen_digit = true;
            if (seen_point) --exp10;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw ParseError("malformed real \"" + s + "\"");
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') throw ParseError("malformed real \"" + s + "\"");
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(s.substr(pos + 1), &used);
        } catch (const std::exception&) {
            throw ParseError("malformed exponent in \"" + s + "\"");
        }
        if (used != s.size() - pos - 1 || e > 100000 || e < -100000) throw ParseError("malformed exponent in \"" + s + "\"");
        exp10 += e;
    }
    Rational r{Index(digits, 10)};
    Index scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 < 0) r /= Rational(scale);
    else r *= Rational(scale);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

inline Index parse_index(std::string_view text) {
    std::string s(text);
    Index i;
    if (s.empty() || i.set_str(s, 10) != 0) throw ParseError("malformed integer \"" + s + "\"");
    return i;
}

/// Closed interval [lo, hi] of MPFR floats with outward rounding.
class Interval {
public:
    explicit Interval(Precision p = kDefaultPrecision) {
        mpfr_init2(lo_, p);
        mpfr_init2(hi_, p);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }

    Interval(const Interval& o) {
        mpfr_init2(lo_, mpfr_get_prec(o.lo_));
        mpfr_init2(hi_, mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }

    Interval(Interval&& o) noexcept {
        mpfr_init2(lo_, MPFR_PREC_MIN);
        mpfr_init2(hi_, MPFR_PREC_MIN);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }

    Interval& operator=(const Interval& o) {
        if (this != &o) {
            mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
            mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
            mpfr_set(lo_, o.lo_, MPFR_RNDD);
            mpfr_set(hi_, o.hi_, MPFR_RNDU);
        }
        return *this;
    }

    Interval& operator=(Interval&& o) noexcept {
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }

    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static Interval from(const Rational& r, Precision p) {
        Interval x(p);
        mpfr_set_q(x.lo_, r.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(x.hi_, r.get_mpq_t(), MPFR_RNDU);
        return x;
    }

    static Interval from(const Index& z, Precision p) {
        Interval x(p);
        mpfr_set_z(x.lo_, z.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(x.hi_, z.get_mpz_t(), MPFR_RNDU);
        return x;
    }

    static Interval from(long v, Precision p) {
        Interval x(p);
        mpfr_set_si(x.lo_, v, MPFR_RNDD);
        mpfr_set_si(x.hi_, v, MPFR_RNDU);
        return x;
    }

    /// The binary64 value itself, as a (possibly rounded when p < 53) enclosure.
    static Interval from_double(double v, Precision p) {
        Interval x(p);
        mpfr_set_d(x.lo_, v, MPFR_RNDD);
        mpfr_set_d(x.hi_, v, MPFR_RNDU);
        return x;
    }

    /// Encloses a decimal ("0.4", "1e-6") or rational ("2/5") literal exactly.
    static Interval parse(std::string_view text, Precision p) {
        std::string s(text);
        if (s.find('/') != std::string::npos) return from(parse_rational(s), p);
        Interval x(p);
        char* end = nullptr;
        mpfr_strtofr(x.lo_, s.c_str(), &end, 10, MPFR_RNDD);
        if (s.empty() || end == nullptr || *end != '\0') throw ParseError("malformed real \"" + s + "\"");
        mpfr_strtofr(x.hi_, s.c_str(), &end, 10, MPFR_RNDU);
        return x;
    }

    /// Degenerate enclosure of an existing MPFR value.
    static Interval point(mpfr_srcptr v) {
        Interval x(mpfr_get_prec(v));
        mpfr_set(x.lo_, v, MPFR_RNDD);
        mpfr_set(x.hi_, v, MPFR_RNDU);
        return x;
    }

    static Interval hull(const Interval& a, const Interval& b) {
        Interval x(std::max(a.precision(), b.precision()));
        mpfr_min(x.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_max(x.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return x;
    }

    static Interval positive_infinity(Precision p) {
        Interval x(p);
        mpfr_set_inf(x.lo_, 1);
        mpfr_set_inf(x.hi_, 1);
        return x;
    }

    Precision precision() const { return std::max(mpfr_get_prec(lo_), mpfr_get_prec(hi_)); }

    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }

    double lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double mid() const { return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN)); }

    /// Natural log of the midpoint computed from the MPFR values; finite even when mid() underflows.
    double log_mid() const {
        Interval x(53);
        mpfr_log(x.lo_, lo_, MPFR_RNDN);
        mpfr_log(x.hi_, hi_, MPFR_RNDN);
        return 0.5 * (mpfr_get_d(x.lo_, MPFR_RNDN) + mpfr_get_d(x.hi_, MPFR_RNDN));
    }

    bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
    bool is_finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

    bool contains(const Rational& r) const {
        return mpfr_cmp_q(lo_, r.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, r.get_mpq_t()) >= 0;
    }
    bool contains(const Interval& o) const {
        return mpfr_lessequal_p(lo_, o.lo_) && mpfr_greaterequal_p(hi_, o.hi_);
    }
    bool intersects(const Interval& o) const {
        return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
    }

    bool certainly_positive() const { return mpfr_sgn(lo_) > 0; }
    bool certainly_negative() const { return mpfr_sgn(hi_) < 0; }

    /// Upper bound of hi - lo.
    Interval width() const {
        Interval w(precision());
        mpfr_sub(w.hi_, hi_, lo_, MPFR_RNDU);
        mpfr_sub(w.lo_, hi_, lo_, MPFR_RNDD);
        return w;
    }

    /// floor(lo) as an integer (lo must be finite).
    Index floor_lower() const {
        Index z;
        mpfr_get_z(z.get_mpz_t(), lo_, MPFR_RNDD);
        return z;
    }
    Index ceil_upper() const {
        Index z;
        mpfr_get_z(z.get_mpz_t(), hi_, MPFR_RNDU);
        return z;
    }

    /// Decimal text of the lower end rounded down.
    std::string lower_string(int digits = 20) const { return format(lo_, digits, MPFR_RNDD); }
    /// Decimal text of the upper end rounded up.
    std::string upper_string(int digits = 20) const { return format(hi_, digits, MPFR_RNDU); }

    Interval operator-() const {
        Interval x(precision());
        mpfr_neg(x.lo_, hi_, MPFR_RNDD);
        mpfr_neg(x.hi_, lo_, MPFR_RNDU);
        return x;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Interval x(std::max(a.precision(), b.precision()));
        mpfr_add(x.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_add(x.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return x;
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        Interval x(std::max(a.precision(), b.precision()));
        mpfr_sub(x.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_sub(x.hi_, a.hi_, b.lo_, MPFR_RNDU);
        return x;
    }

    friend Interval operator*(const Interval& a, const Interval& b) {
        Precision p = std::max(a.precision(), b.precision());
        Interval x(p);
        if (mpfr_sgn(a.lo_) >= 0 && mpfr_sgn(b.lo_) >= 0) {
            mpfr_mul(x.lo_, a.lo_, b.lo_, MPFR_RNDD);
            mpfr_mul(x.hi_, a.hi_, b.hi_, MPFR_RNDU);
            return x;
        }
        corners(x, a, b, mpfr_mul);
        return x;
    }

    friend Interval operator/(const Interval& a, const Interval& b) {
        if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0)
            throw InvalidArgument("interval division by an enclosure containing zero");
        Precision p = std::max(a.precision(), b.precision());
        Interval x(p);
        if (mpfr_sgn(a.lo_) >= 0 && mpfr_sgn(b.lo_) > 0) {
            mpfr_div(x.lo_, a.lo_, b.hi_, MPFR_RNDD);
            mpfr_div(x.hi_, a.hi_, b.lo_, MPFR_RNDU);
            return x;
        }
        corners(x, a, b, mpfr_div);
        return x;
    }

    Interval& operator+=(const Interval& b) {
        mpfr_add(lo_, lo_, b.lo_, MPFR_RNDD);
        mpfr_add(hi_, hi_, b.hi_, MPFR_RNDU);
        return *this;
    }
    Interval& operator-=(const Interval& b) { return *this = *this - b; }
    Interval& operator*=(const Interval& b) { return *this = *this * b; }
    Interval& operator/=(const Interval& b) { return *this = *this / b; }

    /// x * 2^k, exact.
    friend Interval mul_2si(const Interval& a, long k) {
        Interval x(a.precision());
        mpfr_mul_2si(x.lo_, a.lo_, k, MPFR_RNDD);
        mpfr_mul_2si(x.hi_, a.hi_, k, MPFR_RNDU);
        return x;
    }

    /// x^e for x >= 0 (x > 0 when e may be non-positive).
    friend Interval pow(const Interval& x, const Interval& e) {
        if (mpfr_sgn(x.lo_) < 0 || (mpfr_sgn(x.lo_) == 0 && mpfr_sgn(e.lo_) <= 0))
            throw InvalidArgument("pow needs a positive base");
        Interval r(std::max(x.precision(), e.precision()));
        const bool e_nonneg = mpfr_sgn(e.lo_) >= 0;
        const bool e_nonpos = mpfr_sgn(e.hi_) <= 0;
        const bool x_le_one = mpfr_cmp_ui(x.hi_, 1) <= 0;
        const bool x_ge_one = mpfr_cmp_ui(x.lo_, 1) >= 0;
        auto set = [&](mpfr_srcptr blo, mpfr_srcptr elo, mpfr_srcptr bhi, mpfr_srcptr ehi) {
            mpfr_pow(r.lo_, blo, elo, MPFR_RNDD);
            mpfr_pow(r.hi_, bhi, ehi, MPFR_RNDU);
        };
        if (e_nonneg && x_le_one) set(x.lo_, e.hi_, x.hi_, e.lo_);
        else if (e_nonneg && x_ge_one) set(x.lo_, e.lo_, x.hi_, e.hi_);
        else if (e_nonpos && x_le_one) set(x.hi_, e.hi_, x.lo_, e.lo_);
        else if (e_nonpos && x_ge_one) set(x.hi_, e.lo_, x.lo_, e.hi_);
        else corners(r, x, e, mpfr_pow);
        return r;
    }

    friend Interval exp(const Interval& a) { return monotone(a, mpfr_exp); }
    friend Interval expm1(const Interval& a) { return monotone(a, mpfr_expm1); }

    friend Interval log(const Interval& a) {
        if (mpfr_sgn(a.lo_) <= 0) throw InvalidArgument("log needs a positive argument");
        return monotone(a, mpfr_log);
    }

    friend Interval log1p(const Interval& a) {
        if (mpfr_cmp_si(a.lo_, -1) <= 0) throw InvalidArgument("log1p needs an argument > -1");
        return monotone(a, mpfr_log1p);
    }

    /// True when a < b holds for every pair of enclosed values.
    friend bool certainly_less(const Interval& a, const Interval& b) { return mpfr_less_p(a.hi_, b.lo_) != 0; }
    friend bool certainly_less_equal(const Interval& a, const Interval& b) {
        return mpfr_lessequal_p(a.hi_, b.lo_) != 0;
    }

    /// Hull of two enclosures of the same quantity would lose information; this intersects them.
    friend Interval intersect(const Interval& a, const Interval& b) {
        if (!a.intersects(b)) throw InvalidArgument("disjoint enclosures of the same value");
        Interval x(std::max(a.precision(), b.precision()));
        mpfr_max(x.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_min(x.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return x;
    }

private:
    mpfr_t lo_;
    mpfr_t hi_;

    using BinaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    using UnaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

    static void corners(Interval& out, const Interval& a, const Interval& b, BinaryOp op) {
        Precision p = out.precision();
        mpfr_t t;
        mpfr_init2(t, p);
        mpfr_srcptr as[2] = {a.lo_, a.hi_};
        mpfr_srcptr bs[2] = {b.lo_, b.hi_};
        mpfr_set_inf(out.lo_, 1);
        mpfr_set_inf(out.hi_, -1);
        for (auto* u : as) {
            for (auto* v : bs) {
                op(t, u, v, MPFR_RNDD);
                mpfr_min(out.lo_, out.lo_, t, MPFR_RNDD);
                op(t, u, v, MPFR_RNDU);
                mpfr_max(out.hi_, out.hi_, t, MPFR_RNDU);
            }
        }
        mpfr_clear(t);
    }

    static Interval monotone(const Interval& a, UnaryOp op) {
        Interval x(a.precision());
        op(x.lo_, a.lo_, MPFR_RNDD);
        op(x.hi_, a.hi_, MPFR_RNDU);
        return x;
    }

    static std::string format(mpfr_srcptr v, int digits, mpfr_rnd_t rnd) {
        if (mpfr_inf_p(v)) return mpfr_sgn(v) > 0 ? "inf" : "-inf";
        if (mpfr_zero_p(v)) return "0";
        char* buf = nullptr;
        if (rnd == MPFR_RNDD) mpfr_asprintf(&buf, "%.*RDe", digits - 1, v);
        else if (rnd == MPFR_RNDU) mpfr_asprintf(&buf, "%.*RUe", digits - 1, v);
        else mpfr_asprintf(&buf, "%.*RNe", digits - 1, v);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }
};

inline Interval interval(long v, Precision p) { return Interval::from(v, p); }

/// Rising factorial s (s+1) ... (s+r-1).
inline Interval rising(const Interval& s, unsigned r) {
    Interval acc = Interval::from(1L, s.precision());
    for (unsigned k = 0; k < r; ++k) acc = acc * (s + Interval::from(static_cast<long>(k), s.precision()));
    return acc;
}

/// A value that is either an exact rational or an outward-rounded enclosure.
class Scalar {
public:
    Scalar() : v_(Rational(0)) {}
    Scalar(Rational r) : v_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    Scalar(Interval x) : v_(std::move(x)) {}  // NOLINT(google-explicit-constructor)

    bool is_exact() const { return std::holds_alternative<Rational>(v_); }

    const Rational& exact() const {
        if (!is_exact()) throw InvalidArgument("value is only known as an enclosure");
        return std::get<Rational>(v_);
    }

    Interval enclose(Precision p) const {
        if (is_exact()) return Interval::from(std::get<Rational>(v_), p);
        return std::get<Interval>(v_);
    }

    /// Precision used to mix this value with an exact one.
    std::optional<Precision> precision() const {
        if (is_exact()) return std::nullopt;
        return std::get<Interval>(v_).precision();
    }

    /// "p/q" for exact values, "[lo, hi]" otherwise.
    std::string to_string(int digits = 20) const {
        if (is_exact()) return qinf::to_string(std::get<Rational>(v_));
        const auto& x = std::get<Interval>(v_);
        return "[" + x.lower_string(digits) + ", " + x.upper_string(digits) + "]";
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto& x, auto& y) { return x + y; }); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto& x, auto& y) { return x - y; }); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto& x, auto& y) { return x * y; }); }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (b.is_exact() && b.exact() == 0) throw InvalidArgument("division by zero");
        return combine(a, b, [](auto& x, auto& y) { return x / y; });
    }

private:
    std::variant<Rational, Interval> v_;

    template <class Op>
    static Scalar combine(const Scalar& a, const Scalar& b, Op op) {
        if (a.is_exact() && b.is_exact()) {
            Rational r = op(std::get<Rational>(a.v_), std::get<Rational>(b.v_));
            r.canonicalize();
            return Scalar(std::move(r));
        }
        Precision p = std::max(a.precision().value_or(MPFR_PREC_MIN), b.precision().value_or(MPFR_PREC_MIN));
        Interval x = a.enclose(p);
        Interval y = b.enclose(p);
        return Scalar(op(x, y));
    }
};

/// Three-way comparison that may be undecided for overlapping enclosures.
enum class Order { Less, Equal, Greater, Unknown };

inline Order compare(const Scalar& a, const Scalar& b, Precision p) {
    if (a.is_exact() && b.is_exact()) {
        int c = cmp(a.exact(), b.exact());
        return c < 0 ? Order::Less : (c > 0 ? Order::Greater : Order::Equal);
    }
    Interval x = a.enclose(p);
    Interval y = b.enclose(p);
    if (certainly_less(x, y)) return Order::Less;
    if (certainly_less(y, x)) return Order::Greater;
    if (x.is_point() && y.is_point() && mpfr_equal_p(x.lo(), y.lo())) return Order::Equal;
    return Order::Unknown;
}

}  // namespace qinf
