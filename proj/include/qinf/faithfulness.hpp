#pragma once

// Certified search over the tail inequality
//   (sum_{i=n}^{n+M} q_i)^(alpha-delta)  >=  sum_{i=n}^{n+M} q_i^alpha
// whose validity for all n, M > N decides faithfulness of the cylinder family.
// A region can only be certified to hold; a single violated cell is conclusive.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "qinf/covering.hpp"
#include "qinf/error.hpp"
#include "qinf/numeric.hpp"
#include "qinf/qvector.hpp"

namespace qinf {

/// alpha and delta are exact so that every rung of the precision ladder encloses them afresh.
struct ConditionQuery {
    Rational alpha;
    Rational delta;
    Index N;
    Index n_max;
    Index M_max;
    bool infinite_cell = true;   // also check M -> infinity for every n
    unsigned threads = 1;

    void validate() const {
        if (!(0 < delta && delta < alpha && alpha < 1)) throw InvalidArgument("need 0 < delta < alpha < 1");
        if (N < 0) throw InvalidArgument("N must be nonnegative");
        if (n_max < N || M_max < N) throw InvalidArgument("search bounds must be at least N");
    }
};

/// One (n, M) cell; M = nullopt is the limit M -> infinity.
struct ConditionCell {
    Index n;
    std::optional<Index> M;
    Interval lhs;  // (sum q)^(alpha-delta)
    Interval rhs;  // sum q^alpha, +inf when divergent
    Precision precision = 0;

    bool holds() const { return certainly_less_equal(rhs, lhs); }
    bool violated() const { return certainly_less(lhs, rhs); }
    /// Lower bound of lhs - rhs.
    Interval margin() const {
        if (!rhs.is_finite()) return -Interval::positive_infinity(lhs.precision());
        return Interval::point((lhs - rhs).lo());
    }
    std::string m_string() const { return M ? M->get_str() : std::string("inf"); }
};

enum class ConditionOutcome { HoldsOnRegion, Violated, Inconclusive };

inline const char* to_string(ConditionOutcome o) {
    switch (o) {
        case ConditionOutcome::HoldsOnRegion: return "HoldsOnRegion";
        case ConditionOutcome::Violated: return "Violated";
        case ConditionOutcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct ConditionVerdict {
    ConditionOutcome outcome = ConditionOutcome::Inconclusive;
    std::optional<ConditionCell> witness;
    std::vector<ConditionCell> margins;  // per n, the cell of least margin (HoldsOnRegion)
    std::optional<ConditionCell> min_margin;
    std::string reason;
    std::size_t cells = 0;
};

inline const std::vector<Precision>& precision_ladder() {
    static const std::vector<Precision> ladder{64, 96, 192};
    return ladder;
}

/// Evaluate one cell directly from the spec's range sums.
inline ConditionCell evaluate_cell(const QVectorSpec& spec, const Interval& alpha, const Interval& delta,
                                   const Index& n, const std::optional<Index>& M) {
    const Precision p = spec.precision();
    Interval a = Interval::from(1L, p) * alpha;
    Interval ad = a - delta;
    ConditionCell c{n, M, Interval(p), Interval(p), p};
    if (M) {
        c.lhs = pow(spec.range_sum(n, n + *M).enclose(p), ad);
        c.rhs = spec.power_range_sum(n, n + *M, a);
    } else {
        c.lhs = pow(spec.tail_sum(n).enclose(p), ad);
        auto t = spec.power_tail(n, a);
        c.rhs = t ? *t : Interval::positive_infinity(p);
    }
    return c;
}

/// Re-evaluate a cell at twice its working precision.
inline bool reverify(const QVectorSpec& spec, const ConditionQuery& q, const ConditionCell& w) {
    QVectorSpec hi = spec.with_precision(2 * std::max(w.precision, spec.precision()));
    const Precision p = hi.precision();
    ConditionCell c = evaluate_cell(hi, Interval::from(q.alpha, p), Interval::from(q.delta, p), w.n, w.M);
    return c.violated() == w.violated() && c.holds() == w.holds();
}

namespace detail {

struct RowResult {
    Index n;
    std::optional<ConditionCell> violation;  // first violated cell in M order
    std::optional<ConditionCell> worst;      // least margin among cells that hold
    bool undecided = false;
    bool monotone = true;
    std::size_t cells = 0;
};

/// Weights q_i and q_i^alpha for i in [first, first + count).
struct WeightTable {
    Index first;
    std::vector<Interval> q;
    std::vector<Interval> qa;

    WeightTable(const QVectorSpec& spec, const Interval& alpha, Index f, std::size_t count) : first(std::move(f)) {
        const Precision p = spec.precision();
        q.reserve(count);
        qa.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            Interval v = spec.q(first + static_cast<unsigned long>(i)).enclose(p);
            qa.push_back(pow(v, alpha));
            q.push_back(std::move(v));
        }
    }
    std::size_t at(const Index& i) const { return static_cast<std::size_t>(Index(i - first).get_ui()); }
};

inline RowResult scan_row(const QVectorSpec& spec, const ConditionQuery& q, const Interval& alpha, const Interval& ad,
                          const WeightTable& table, const Index& n) {
    const Precision p = spec.precision();
    RowResult row;
    row.n = n;
    auto consider = [&](ConditionCell cell) {
        ++row.cells;
        if (cell.violated()) {
            if (!row.violation) row.violation = cell;
        } else if (cell.holds()) {
            if (!row.worst || mpfr_cmp(cell.margin().lo(), row.worst->margin().lo()) < 0) row.worst = cell;
        } else {
            row.undecided = true;
        }
    };
    // sums over i = n .. n + M, M from N + 1
    const std::size_t base = table.at(n);
    const std::size_t m0 = static_cast<std::size_t>(Index(q.N + 1).get_ui());
    const std::size_t m1 = static_cast<std::size_t>(q.M_max.get_ui());
    Interval sq = Interval::from(0L, p), sa = Interval::from(0L, p);
    for (std::size_t j = 0; j < m0 && j <= m1; ++j) {
        sq += table.q[base + j];
        sa += table.qa[base + j];
    }
    std::optional<Interval> prev_l, prev_r;
    for (std::size_t m = m0; m <= m1; ++m) {
        sq += table.q[base + m];
        sa += table.qa[base + m];
        Interval lhs = pow(sq, ad);
        if (prev_l && (certainly_less(lhs, *prev_l) || certainly_less(sa, *prev_r))) row.monotone = false;
        prev_l = lhs;
        prev_r = sa;
        consider(ConditionCell{n, Index(static_cast<unsigned long>(m)), lhs, sa, p});
        if (row.violation) return row;
    }
    if (q.infinite_cell) consider(evaluate_cell(spec, alpha, alpha - ad, n, std::nullopt));
    return row;
}

inline std::vector<RowResult> scan_rows(const QVectorSpec& spec, const ConditionQuery& q, const std::vector<Index>& ns,
                                        bool stop_at_violation) {
    const Precision p = spec.precision();
    Interval alpha = Interval::from(q.alpha, p);
    Interval ad = Interval::from(Rational(q.alpha - q.delta), p);
    std::vector<RowResult> rows(ns.size());
    if (ns.empty()) return rows;
    const std::size_t span = static_cast<std::size_t>(Index(ns.back() - ns.front() + q.M_max + 1).get_ui());
    WeightTable table(spec, alpha, ns.front(), span);
    const unsigned threads = std::max(1u, q.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            rows[i] = scan_row(spec, q, alpha, ad, table, ns[i]);
            if (stop_at_violation && rows[i].violation) {
                rows.resize(i + 1);
                break;
            }
        }
        return rows;
    }
    // MPFR keeps per-thread caches; every row is independent and rows are merged in n order.
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < ns.size(); i += threads) rows[i] = scan_row(spec, q, alpha, ad, table, ns[i]);
            mpfr_free_cache();
        });
    }
    for (auto& th : pool) th.join();
    if (stop_at_violation) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].violation) {
                rows.resize(i + 1);
                break;
            }
    }
    return rows;
}

}  // namespace detail

/// Scan n in (N, n_max] and M in (N, M_max] plus the infinite cell, returning the
/// first certified violation in (n, M) order, or the least margin on the region.
inline ConditionVerdict check_condition(const QVectorSpec& spec, const ConditionQuery& q) {
    q.validate();
    ConditionVerdict v;
    std::vector<Index> ns;
    for (Index n = q.N + 1; n <= q.n_max; ++n) ns.push_back(n);
    if (ns.empty()) {
        v.outcome = ConditionOutcome::HoldsOnRegion;
        v.reason = "empty region";
        return v;
    }
    const auto& ladder = precision_ladder();
    auto rows = detail::scan_rows(spec.with_precision(ladder.front()), q, ns, true);
    for (auto& r : rows) {
        // undecided rows climb the ladder on their own
        for (std::size_t rung = 1; r.undecided && !r.violation && rung < ladder.size(); ++rung)
            r = detail::scan_rows(spec.with_precision(ladder[rung]), q, {r.n}, true).front();
        if (!r.monotone) throw Error("check_condition: partial sums failed the monotonicity check");
        v.cells += r.cells;
        if (r.violation) {
            v.outcome = ConditionOutcome::Violated;
            v.witness = r.violation;
            return v;
        }
        if (r.undecided) {
            v.outcome = ConditionOutcome::Inconclusive;
            v.reason = "cells at n = " + r.n.get_str() + " not separable at " + std::to_string(ladder.back()) + " bits";
            return v;
        }
        if (r.worst) {
            v.margins.push_back(*r.worst);
            if (!v.min_margin || mpfr_cmp(r.worst->margin().lo(), v.min_margin->margin().lo()) < 0)
                v.min_margin = r.worst;
        }
    }
    v.outcome = ConditionOutcome::HoldsOnRegion;
    return v;
}

/// Least M > N violating the inequality at offset n: a linear scan up to M_max,
/// then doubling and bisection on the first crossing beyond it.
inline std::optional<ConditionCell> witness_at(const QVectorSpec& spec, const ConditionQuery& q, const Index& n,
                                               unsigned max_doublings = 256) {
    q.validate();
    for (Precision p : precision_ladder()) {
        QVectorSpec at = spec.with_precision(p);
        const Precision wp = at.precision();
        Interval alpha = Interval::from(q.alpha, wp);
        Interval delta = Interval::from(q.delta, wp);
        Interval ad = alpha - delta;
        bool undecided = false;
        Interval sq = at.range_sum(n, n + q.N).enclose(wp);
        Interval sa = at.power_range_sum(n, n + q.N, alpha);
        for (Index m = q.N + 1; m <= q.M_max; ++m) {
            Interval w = at.q(n + m).enclose(wp);
            sq += w;
            sa += pow(w, alpha);
            ConditionCell c{n, m, pow(sq, ad), sa, wp};
            if (c.violated()) return c;
            if (!c.holds()) undecided = true;
        }
        if (undecided) continue;
        auto cell = [&](const Index& m) { return evaluate_cell(at, alpha, delta, n, m); };
        Index lo = q.M_max;
        Index hi = q.M_max * 2 + 1;
        unsigned d = 0;
        while (!cell(hi).violated()) {
            lo = hi;
            hi = hi * 2;
            if (++d > max_doublings) return std::nullopt;
        }
        while (hi - lo > 1) {
            Index mid = (lo + hi) / 2;
            if (cell(mid).violated()) hi = mid;
            else lo = mid;
        }
        return cell(hi);
    }
    return std::nullopt;
}

/// Conservative margin table over a grid; M = nullopt marks the infinite cell.
inline std::vector<ConditionCell> scan_condition_region(const QVectorSpec& spec, const Rational& alpha_q,
                                                        const Rational& delta_q, const std::vector<Index>& n_grid,
                                                        std::vector<std::optional<Index>> m_grid) {
    if (!(0 < delta_q && delta_q < alpha_q && alpha_q < 1)) throw InvalidArgument("need 0 < delta < alpha < 1");
    const Interval alpha = Interval::from(alpha_q, spec.precision());
    const Interval delta = Interval::from(delta_q, spec.precision());
    if (n_grid.empty() || m_grid.empty()) throw InvalidArgument("scan grids must be nonempty");
    std::stable_sort(m_grid.begin(), m_grid.end(), [](const auto& a, const auto& b) {
        if (!a) return false;
        if (!b) return true;
        return *a < *b;
    });
    std::vector<ConditionCell> out;
    for (const auto& n : n_grid) {
        std::optional<ConditionCell> prev;
        for (const auto& m : m_grid) {
            ConditionCell c = evaluate_cell(spec, alpha, delta, n, m);
            if (prev && (certainly_less(c.lhs, prev->lhs) || certainly_less(c.rhs, prev->rhs)))
                throw Error("scan_condition_region: partial sums failed the monotonicity check");
            prev = c;
            out.push_back(std::move(c));
        }
    }
    return out;
}

inline void write_margin_csv(std::ostream& os, const std::vector<ConditionCell>& cells, int digits = 17) {
    os << "n,M,lhs_lower,rhs_upper,margin_lower\n";
    for (const auto& c : cells) {
        os << c.n.get_str() << ',' << c.m_string() << ',' << c.lhs.lower_string(digits) << ','
           << c.rhs.upper_string(digits) << ',' << c.margin().lower_string(digits) << '\n';
    }
}

}  // namespace qinf
