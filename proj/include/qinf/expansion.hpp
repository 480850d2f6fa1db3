#pragma once

// Digit codec between points of [0,1) and Q-infinity addresses, plus exact
// cylinder arithmetic. Cylinders of equal rank are laid out left to right in
// digit order, so comparisons between Q-rational points are purely digitwise.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qinf/error.hpp"
#include "qinf/numeric.hpp"
#include "qinf/qvector.hpp"

namespace qinf {

/// Finite digit word (a_1 ... a_n); the empty word addresses [0,1).
struct CylinderAddress {
    std::vector<Index> digits;

    CylinderAddress() = default;
    CylinderAddress(std::vector<Index> d) : digits(std::move(d)) {}  // NOLINT(google-explicit-constructor)
    CylinderAddress(std::initializer_list<long> d) {
        for (long v : d) digits.emplace_back(v);
    }

    std::size_t rank() const { return digits.size(); }
    bool empty() const { return digits.empty(); }
    const Index& operator[](std::size_t i) const { return digits[i]; }

    CylinderAddress prefix(std::size_t n) const {
        return CylinderAddress(std::vector<Index>(digits.begin(), digits.begin() + static_cast<long>(n)));
    }

    CylinderAddress child(const Index& d) const {
        CylinderAddress c = *this;
        c.digits.push_back(d);
        return c;
    }

    std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (i) s += ",";
            s += digits[i].get_str();
        }
        return s + "]";
    }

    friend bool operator==(const CylinderAddress& a, const CylinderAddress& b) { return a.digits == b.digits; }
};

/// Half-open interval [left, left + length) of an address.
struct Cylinder {
    CylinderAddress address;
    Scalar left;
    Scalar length;

    Scalar right() const { return left + length; }
};

/// Point with finitely many nonzero digits, or the formal right end 1.
class QRational {
public:
    QRational() = default;

    /// Strips trailing zero digits.
    static QRational from_digits(CylinderAddress digits) {
        while (!digits.digits.empty() && digits.digits.back() == 0) digits.digits.pop_back();
        QRational q;
        q.digits_ = std::move(digits);
        return q;
    }

    static QRational end() {
        QRational q;
        q.end_ = true;
        return q;
    }

    /// Right endpoint of the cylinder of addr (the left endpoint of its next sibling).
    static QRational right_end_of(const CylinderAddress& addr) {
        if (addr.empty()) return end();
        CylinderAddress next = addr;
        next.digits.back() += 1;
        return from_digits(std::move(next));
    }

    bool is_end() const { return end_; }
    const CylinderAddress& digits() const { return digits_; }

    /// Digit at 1-based position `pos` of the expansion (zeros past the end).
    Index digit(std::size_t pos) const {
        if (end_) throw InvalidArgument("the right end 1 has no expansion");
        if (pos == 0 || pos > digits_.rank()) return Index(0);
        return digits_[pos - 1];
    }

    std::string to_string() const { return end_ ? std::string("end") : "digits:" + digits_.to_string(); }

    friend bool operator==(const QRational& a, const QRational& b) {
        return a.end_ == b.end_ && a.digits_ == b.digits_;
    }

    /// Lexicographic order of expansions, which is the order of the points.
    friend bool operator<(const QRational& a, const QRational& b) {
        if (a.end_) return false;
        if (b.end_) return true;
        const std::size_t n = std::max(a.digits_.rank(), b.digits_.rank());
        for (std::size_t i = 1; i <= n; ++i) {
            int c = cmp(a.digit(i), b.digit(i));
            if (c != 0) return c < 0;
        }
        return false;
    }

private:
    CylinderAddress digits_;
    bool end_ = false;
};

/// prod q_{a_i}
inline Scalar cylinder_length(const QVectorSpec& spec, const CylinderAddress& addr) {
    Scalar len = spec.exact() ? Scalar(Rational(1)) : Scalar(Interval::from(1L, spec.precision()));
    for (const auto& d : addr.digits) len = len * spec.q(d);
    return len;
}

/// Cylinder of addr: left = sum_k (prod_{i<k} q_{a_i}) head_sum(a_k).
inline Cylinder decode(const QVectorSpec& spec, const CylinderAddress& addr) {
    Scalar left = spec.exact() ? Scalar(Rational(0)) : Scalar(Interval::from(0L, spec.precision()));
    Scalar scale = spec.exact() ? Scalar(Rational(1)) : Scalar(Interval::from(1L, spec.precision()));
    for (const auto& d : addr.digits) {
        left = left + scale * spec.head_sum(d);
        scale = scale * spec.q(d);
    }
    return Cylinder{addr, std::move(left), std::move(scale)};
}

/// Value of a Q-rational point.
inline Scalar value_of(const QVectorSpec& spec, const QRational& x) {
    if (x.is_end()) return spec.exact() ? Scalar(Rational(1)) : Scalar(Interval::from(1L, spec.precision()));
    return decode(spec, x.digits()).left;
}

namespace detail {

/// Largest k with head_sum(k) <= x, by exponential then binary search.
inline Index first_digit(const QVectorSpec& spec, const Scalar& x) {
    const Precision p = spec.precision();
    auto head_le_x = [&](const Index& k) {
        Order o = compare(spec.head_sum(k), x, p);
        if (o == Order::Unknown) throw BoundaryAmbiguity(Index(k - 1).get_str(), k.get_str());
        return o != Order::Greater;
    };
    Index lo = 0;
    Index hi = 1;
    int doublings = 0;
    while (head_le_x(hi)) {
        lo = hi;
        hi *= 2;
        if (++doublings > 4096) throw CapacityError("encode: digit search did not terminate");
    }
    while (hi - lo > 1) {
        Index mid = (lo + hi) / 2;
        if (head_le_x(mid)) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace detail

/// First `depth` digits of the expansion of x in [0,1).
inline CylinderAddress encode(const QVectorSpec& spec, Scalar x, std::size_t depth) {
    const Precision p = spec.precision();
    if (x.is_exact()) {
        if (x.exact() < 0 || x.exact() >= 1) throw InvalidArgument("encode needs 0 <= x < 1");
    } else {
        Interval xi = x.enclose(p);
        if (xi.certainly_negative() || !certainly_less(xi, Interval::from(1L, p)))
            throw InvalidArgument("encode needs 0 <= x < 1");
    }
    if (!spec.exact() && x.is_exact()) x = x.enclose(p);
    CylinderAddress out;
    for (std::size_t n = 0; n < depth; ++n) {
        Index d = detail::first_digit(spec, x);
        out.digits.push_back(d);
        x = (x - spec.head_sum(d)) / spec.q(d);
    }
    return out;
}

/// Maximal cylinder containing [a, b): its address and a's digit just below it.
struct MaxCylinder {
    CylinderAddress prefix;
    Index beta1;
};

namespace detail {

/// Digit of b- (points just below b) at 1-based position pos; nullopt means unbounded.
inline std::optional<Index> digit_below(const QRational& b, std::size_t pos) {
    if (b.is_end()) return std::nullopt;
    const std::size_t m = b.digits().rank();
    if (pos < m) return b.digits()[pos - 1];
    if (pos == m) return Index(b.digits()[pos - 1] - 1);
    return std::nullopt;
}

}  // namespace detail

inline MaxCylinder locate_max_cylinder(const QRational& a, const QRational& b) {
    if (a.is_end() || !(a < b)) throw InvalidArgument("invalid interval: need a < b");
    MaxCylinder mc;
    for (std::size_t pos = 1;; ++pos) {
        auto db = detail::digit_below(b, pos);
        Index da = a.digit(pos);
        if (!db || *db != da) {
            mc.beta1 = da;
            return mc;
        }
        mc.prefix.digits.push_back(da);
    }
}

}  // namespace qinf
