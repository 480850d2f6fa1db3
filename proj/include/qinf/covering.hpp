#pragma once

// Coverings of Q-rational intervals [a, b) by blocks: finite unions of
// consecutive same-rank cylinders under one prefix. The construction splits
// [a, b) at c = left end of the cylinder after a's at the first rank where a
// and b separate. [c, b) takes at most two blocks; [a, c) is a stack of
// infinite digit tails, one per rank, each cut into blocks whose alpha-volumes
// are dominated by the first block.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qinf/error.hpp"
#include "qinf/expansion.hpp"
#include "qinf/numeric.hpp"
#include "qinf/qvector.hpp"

namespace qinf {

/// Union of the cylinders prefix.first, ..., prefix.last (one element of the family of blocks).
struct Block {
    CylinderAddress prefix;
    Index first;
    Index last;

    std::size_t rank() const { return prefix.rank() + 1; }

    /// The rank-n cylinder addr as a one-digit block.
    static Block cylinder(const CylinderAddress& addr) {
        if (addr.empty()) throw InvalidArgument("[0,1) is not a finite block");
        return Block{addr.prefix(addr.rank() - 1), addr.digits.back(), addr.digits.back()};
    }

    friend bool operator==(const Block& a, const Block& b) {
        return a.prefix == b.prefix && a.first == b.first && a.last == b.last;
    }
};

inline Scalar block_length(const QVectorSpec& spec, const Block& b) {
    return cylinder_length(spec, b.prefix) * spec.range_sum(b.first, b.last);
}

inline Scalar block_left(const QVectorSpec& spec, const Block& b) {
    Cylinder parent = decode(spec, b.prefix);
    return parent.left + parent.length * spec.head_sum(b.first);
}

/// Upper-bounded enclosure of sum |block|^alpha.
inline Interval alpha_volume(const QVectorSpec& spec, const std::vector<Block>& blocks, const Interval& alpha) {
    if (!alpha.certainly_positive() || !certainly_less_equal(alpha, Interval::from(1L, alpha.precision())))
        throw InvalidArgument("alpha must lie in (0,1]");
    const Precision p = spec.precision();
    Interval acc = Interval::from(0L, p);
    for (const auto& b : blocks) acc += pow(block_length(spec, b).enclose(p), alpha);
    return acc;
}

// --- halving partition ----------------------------------------------------

/// A positive summable sequence a_0, a_1, ... with rigorous partial sums.
template <class S>
concept WeightStream = requires(const S& s, const Index& n) {
    { s.head_through(n) } -> std::convertible_to<Interval>;  // sum_{i<=n} a_i
    { s.tail_after(n) } -> std::convertible_to<Interval>;    // sum_{i>n} a_i
};

/// Streams that can also report tails as exact rationals (nullopt when unavailable).
template <class S>
concept ExactTailStream = WeightStream<S> && requires(const S& s, const Index& n) {
    { s.exact_tail_after(n) } -> std::convertible_to<std::optional<Rational>>;
};

/// a_i = q_{offset+i}. The spec must outlive the stream.
class QTailStream {
public:
    QTailStream(const QVectorSpec& spec, Index offset) : spec_(&spec), offset_(std::move(offset)) {}

    Interval head_through(const Index& n) const {
        return spec_->range_sum(offset_, offset_ + n).enclose(spec_->precision());
    }
    Interval tail_after(const Index& n) const { return spec_->tail_sum(offset_ + n + 1).enclose(spec_->precision()); }
    std::optional<Rational> exact_tail_after(const Index& n) const {
        if (!spec_->exact()) return std::nullopt;
        return spec_->tail_sum(offset_ + n + 1).exact();
    }

    const Index& offset() const { return offset_; }

private:
    const QVectorSpec* spec_;
    Index offset_;
};

struct Lemma1Certificate {
    Interval first_power;   // (sum_{i<=n_1} a_i)^alpha
    Interval rest_power;    // upper bound of sum_{m>=1} (group m)^alpha
    std::size_t explicit_groups = 0;

    bool holds() const { return certainly_less_equal(rest_power, first_power); }
};

/// Boundaries n_1 < n_2 < ... such that group 0 = [0, n_1] dominates the
/// alpha-power series of groups m = [n_m + 1, n_{m+1}].
///
/// n_1 is minimal with tail(n_1)^alpha / (1 - 2^-alpha) <= head(n_1)^alpha and
/// n_{k+1} is minimal with tail(n_{k+1}) <= tail(n_1) 2^-k, so every later group
/// sum is at most tail(n_1) 2^-(m-1).
template <WeightStream S>
class Lemma1Partition {
public:
    Lemma1Partition(S stream, Interval alpha, unsigned max_doublings = 512)
        : stream_(std::move(stream)), alpha_(std::move(alpha)), max_doublings_(max_doublings) {
        const Precision p = alpha_.precision();
        Interval one = Interval::from(1L, p);
        if (!alpha_.certainly_positive() || !certainly_less_equal(alpha_, one))
            throw InvalidArgument("lemma1_partition needs alpha in (0,1]");
        geometric_factor_ = one / (one - pow(Interval::from(Rational(1, 2), p), alpha_));
        auto ok = [&](const Index& n) {
            Interval lhs = pow(stream_.tail_after(n), alpha_) * geometric_factor_;
            Interval rhs = pow(stream_.head_through(n), alpha_);
            return certainly_less_equal(lhs, rhs);
        };
        bounds_.push_back(minimal(Index(0), ok, "n_1"));
        first_tail_ = stream_.tail_after(bounds_[0]);
    }

    const S& stream() const { return stream_; }
    const Interval& alpha() const { return alpha_; }

    /// n_k for k >= 1, extending the sequence on demand.
    const Index& boundary(std::size_t k) {
        if (k == 0) throw InvalidArgument("boundaries are 1-based");
        while (bounds_.size() < k) extend();
        return bounds_[k - 1];
    }

    std::size_t known_boundaries() const { return bounds_.size(); }

    /// Index range [lo, hi] of group m (m = 0 is the dominating head).
    std::pair<Index, Index> group(std::size_t m) {
        if (m == 0) return {Index(0), boundary(1)};
        Index lo = boundary(m) + 1;
        return {lo, boundary(m + 1)};
    }

    Interval group_sum(std::size_t m) {
        auto [lo, hi] = group(m);
        if (lo == 0) return stream_.head_through(hi);
        return stream_.head_through(hi) - stream_.head_through(Index(lo - 1));
    }

    /// Mass left after groups 0..m.
    Interval remaining_after(std::size_t m) { return stream_.tail_after(boundary(m + 1)); }

    /// Upper bound of sum_{m > g} (group m)^alpha.
    Interval series_bound_after(std::size_t g) const {
        Interval scale = pow(Interval::from(Rational(1, 2), alpha_.precision()),
                             alpha_ * Interval::from(static_cast<long>(g), alpha_.precision()));
        return pow(first_tail_, alpha_) * scale * geometric_factor_;
    }

    /// (first group)^alpha against the explicit groups 1..g plus the bound for the rest.
    Lemma1Certificate certify(std::size_t g) {
        Lemma1Certificate c;
        c.first_power = pow(group_sum(0), alpha_);
        Interval rest = Interval::from(0L, alpha_.precision());
        for (std::size_t m = 1; m <= g; ++m) rest += pow(group_sum(m), alpha_);
        c.rest_power = rest + series_bound_after(g);
        c.explicit_groups = g;
        return c;
    }

private:
    S stream_;
    Interval alpha_;
    unsigned max_doublings_;
    Interval geometric_factor_;
    Interval first_tail_;
    std::vector<Index> bounds_;

    /// Minimal n >= from with ok(n), assuming ok is monotone.
    template <class Pred>
    Index minimal(Index from, Pred ok, const char* what) const {
        if (ok(from)) return from;
        Index lo = from;  // !ok(lo)
        Index step = 1;
        Index hi = from + step;
        unsigned doublings = 0;
        while (!ok(hi)) {
            lo = hi;
            step *= 2;
            hi = from + step;
            if (++doublings > max_doublings_)
                throw CapacityError(std::string("lemma1_partition: search for ") + what + " exceeded its cap");
        }
        while (hi - lo > 1) {
            Index mid = (lo + hi) / 2;
            if (ok(mid)) hi = mid;
            else lo = mid;
        }
        return hi;
    }

    void extend() {
        const std::size_t k = bounds_.size();  // computing n_{k+1}
        if constexpr (ExactTailStream<S>) {
            if (auto t1 = stream_.exact_tail_after(bounds_[0])) {
                Rational target = *t1;
                mpq_div_2exp(target.get_mpq_t(), target.get_mpq_t(), k);
                auto ok = [&](const Index& n) { return *stream_.exact_tail_after(n) <= target; };
                bounds_.push_back(minimal(Index(bounds_.back() + 1), ok, "n_k"));
                return;
            }
        }
        Interval target = mul_2si(first_tail_, -static_cast<long>(k));
        // compare against the lower end of tail(n_1) 2^-k
        Interval lower_target = Interval::point(target.lo());
        auto ok = [&](const Index& n) { return certainly_less_equal(stream_.tail_after(n), lower_target); };
        bounds_.push_back(minimal(Index(bounds_.back() + 1), ok, "n_k"));
    }
};

template <WeightStream S>
Lemma1Partition<S> lemma1_partition(S stream, const Interval& alpha) {
    return Lemma1Partition<S>(std::move(stream), alpha);
}

// --- constants ------------------------------------------------------------

struct Kappa {
    Interval q_max;       // max_i q_i
    Interval q_root;      // q_max^(delta/2)
    Index w_argmax;       // integer s attaining W
    Interval w;           // W(delta) = max_s s q_root^s
    Interval k;           // K(alpha, delta)
};

inline void check_alpha_delta(const Interval& alpha, const Interval& delta) {
    const Precision p = alpha.precision();
    if (!delta.certainly_positive() || !certainly_less(delta, alpha) ||
        !certainly_less(alpha, Interval::from(1L, p)))
        throw InvalidArgument("need 0 < delta < alpha < 1");
}

/// W(delta) and K(alpha, delta) = 1 + q_0^-alpha + 2 W / ((1 - q^(delta/2)) q^(delta/2)).
inline Kappa kappa(const QVectorSpec& spec, const Interval& alpha, const Interval& delta) {
    check_alpha_delta(alpha, delta);
    const Precision p = spec.precision();
    Kappa out;
    out.q_max = spec.max_weight().value.enclose(p);
    Interval half_delta = mul_2si(delta, -1);
    out.q_root = pow(out.q_max, half_delta);
    Interval one = Interval::from(1L, p);
    // s q^s is unimodal in s with its peak at -1/log q.
    Interval peak = -(one / log(out.q_root));
    Index lo = peak.floor_lower() - 1;
    Index hi = peak.ceil_upper() + 1;
    if (lo < 1) lo = 1;
    auto g = [&](const Index& s) {
        Interval si = Interval::from(s, p);
        return si * pow(out.q_root, si);
    };
    // W lies in [max of lower ends, max of upper ends] over the candidates.
    std::optional<Interval> lo_best, hi_best;
    for (Index s = lo; s <= hi; ++s) {
        Interval v = g(s);
        if (!hi_best || mpfr_cmp(v.hi(), hi_best->hi()) > 0) {
            hi_best = Interval::point(v.hi());
            out.w_argmax = s;
        }
        if (!lo_best || mpfr_cmp(v.lo(), lo_best->lo()) > 0) lo_best = Interval::point(v.lo());
    }
    out.w = Interval::hull(*lo_best, *hi_best);
    Interval q0 = spec.q(Index(0)).enclose(p);
    out.k = one + pow(q0, -alpha) + Interval::from(2L, p) * out.w / ((one - out.q_root) * out.q_root);
    return out;
}

// --- covering -------------------------------------------------------------

enum class CoverMode { CertifiedResidual, LazyStream };

struct CoverParams {
    Interval alpha;
    Interval delta;
    Interval eps_res;
    CoverMode mode = CoverMode::CertifiedResidual;

    static CoverParams parse(std::string_view alpha, std::string_view delta, std::string_view eps,
                             Precision p = kDefaultPrecision) {
        CoverParams c{Interval::parse(alpha, p), Interval::parse(delta, p), Interval::parse(eps, p)};
        c.validate();
        return c;
    }

    void validate() const {
        check_alpha_delta(alpha, delta);
        if (!eps_res.certainly_positive()) throw InvalidArgument("eps_res must be positive");
    }
};

/// The non-block leftover  union_{i >= first} prefix.i  = [left, right).
struct Residual {
    CylinderAddress prefix;
    Index first;
    Scalar left;
    Scalar right;
    Scalar length;
};

/// One infinite digit tail  union_{i >= start} parent.i  of the construction.
struct TailRecord {
    std::size_t rank_offset = 0;  // k: the tail sits at rank n + k below the maximal cylinder
    bool right_part = false;
    CylinderAddress parent;
    Index start;
    std::size_t first_block = 0;
    std::size_t block_count = 0;
    std::optional<std::size_t> residual;
    Lemma1Certificate lemma;
    Interval series_tail;  // parent_len^alpha * bound on the unemitted groups
};

struct CoverCertificate {
    QRational a;
    QRational b;
    Scalar a_value;
    Scalar b_value;
    Scalar length;  // |E| = b - a

    MaxCylinder located;
    std::vector<Index> betas;  // beta_1 .. beta_l

    std::vector<Block> blocks;
    std::vector<Residual> residuals;
    std::vector<std::size_t> right_blocks;
    std::optional<std::size_t> j1_block;
    std::vector<TailRecord> tails;

    Kappa constants;
    Interval alpha_volume;   // blocks and residual intervals
    Interval series_volume;  // blocks and the lemma bound for the infinite continuation
    Interval bound_rhs;      // K |E|^(alpha - delta)
    Interval right_volume;   // pieces covering [c, b)
    Interval right_bound;    // (1 + q_0^-alpha) |E|^alpha
    Scalar residual_length;

    bool volume_holds() const {
        return certainly_less_equal(alpha_volume, bound_rhs) && certainly_less_equal(series_volume, bound_rhs);
    }
};

namespace detail {

struct TailPlan {
    std::size_t rank_offset;
    bool right_part;
    CylinderAddress parent;
    Index start;
};

struct CoverPlan {
    MaxCylinder located;
    std::vector<Index> betas;
    std::vector<Block> right_blocks;
    std::optional<std::size_t> j1;  // index into right_blocks
    std::vector<TailPlan> tails;
};

inline CoverPlan plan_cover(const QRational& a, const QRational& b) {
    CoverPlan plan;
    plan.located = locate_max_cylinder(a, b);
    const CylinderAddress& prefix = plan.located.prefix;
    const std::size_t n = prefix.rank();
    const auto& ad = a.digits().digits;
    for (std::size_t i = n; i < ad.size(); ++i) plan.betas.push_back(ad[i]);
    if (plan.betas.empty()) plan.betas.push_back(Index(0));
    const std::size_t l = plan.betas.size();
    const Index& beta1 = plan.betas[0];
    // With l = 1 the point a is the left end of prefix.beta1 and that cylinder joins the right part.
    const Index right_first = (l == 1) ? beta1 : Index(beta1 + 1);

    std::optional<Index> d = digit_below(b, n + 1);
    if (!d) {
        if (l == 1 && beta1 == 0 && n > 0) plan.right_blocks.push_back(Block::cylinder(prefix));
        else plan.tails.push_back(TailPlan{1, true, prefix, right_first});
    } else if (b.digits().rank() == n + 1) {
        plan.right_blocks.push_back(Block{prefix, right_first, *d});
    } else {
        if (right_first <= *d - 1) plan.right_blocks.push_back(Block{prefix, right_first, Index(*d - 1)});
        CylinderAddress j1 = prefix.child(*d);
        const auto& bd = b.digits().digits;
        for (std::size_t i = n + 1; i < bd.size() && bd[i] == 0; ++i) j1.digits.push_back(Index(0));
        plan.j1 = plan.right_blocks.size();
        plan.right_blocks.push_back(Block::cylinder(j1));
    }

    for (std::size_t k = 2; k <= l; ++k) {
        CylinderAddress parent = prefix;
        for (std::size_t j = 0; j + 1 < k; ++j) parent.digits.push_back(plan.betas[j]);
        Index start = (k < l) ? Index(plan.betas[k - 1] + 1) : plan.betas[k - 1];
        plan.tails.push_back(TailPlan{k, false, std::move(parent), std::move(start)});
    }
    return plan;
}

}  // namespace detail

/// Certified finite covering of [a, b) by blocks plus explicit residual tails.
inline CoverCertificate cover_interval(const QVectorSpec& spec, const QRational& a, const QRational& b,
                                       const CoverParams& params, std::size_t max_groups_per_tail = 100000) {
    params.validate();
    if (params.mode != CoverMode::CertifiedResidual)
        throw InvalidArgument("cover_interval builds finite certificates; use cover_stream for lazy coverings");
    const Precision p = spec.precision();
    const Interval& alpha = params.alpha;

    CoverCertificate cert;
    cert.a = a;
    cert.b = b;
    detail::CoverPlan plan = detail::plan_cover(a, b);
    cert.located = plan.located;
    cert.betas = plan.betas;
    cert.a_value = value_of(spec, a);
    cert.b_value = value_of(spec, b);
    cert.length = cert.b_value - cert.a_value;
    Interval e_len = cert.length.enclose(p);
    if (!e_len.certainly_positive()) throw InvalidArgument("interval length is not resolvable at this precision");

    cert.constants = kappa(spec, params.alpha, params.delta);

    for (auto& blk : plan.right_blocks) {
        cert.right_blocks.push_back(cert.blocks.size());
        cert.blocks.push_back(blk);
    }
    if (plan.j1) cert.j1_block = cert.right_blocks[*plan.j1];

    cert.residual_length = spec.exact() ? Scalar(Rational(0)) : Scalar(Interval::from(0L, p));
    Interval series_extra = Interval::from(0L, p);
    if (!plan.tails.empty()) {
        // per-tail residual threshold: eps |E| / (number of tails)
        Interval thr = params.eps_res * e_len / Interval::from(static_cast<long>(plan.tails.size()), p);
        Interval thr_lo = Interval::point(thr.lo());
        for (const auto& tp : plan.tails) {
            TailRecord rec;
            rec.rank_offset = tp.rank_offset;
            rec.right_part = tp.right_part;
            rec.parent = tp.parent;
            rec.start = tp.start;
            Cylinder parent = decode(spec, tp.parent);
            Interval parent_len = parent.length.enclose(p);
            Lemma1Partition<QTailStream> part(QTailStream(spec, tp.start), alpha);
            rec.first_block = cert.blocks.size();
            std::size_t g = 0;
            for (;; ++g) {
                auto [lo, hi] = part.group(g);
                cert.blocks.push_back(Block{tp.parent, Index(tp.start + lo), Index(tp.start + hi)});
                if (certainly_less_equal(parent_len * part.remaining_after(g), thr_lo)) break;
                if (g >= max_groups_per_tail) throw CapacityError("cover_interval: too many groups in one tail");
            }
            rec.block_count = g + 1;
            if (tp.right_part)
                for (std::size_t i = rec.first_block; i < cert.blocks.size(); ++i) cert.right_blocks.push_back(i);
            Index res_first = tp.start + part.boundary(g + 1) + 1;
            Scalar res_left = parent.left + parent.length * spec.head_sum(res_first);
            Scalar res_right = parent.left + parent.length;
            Scalar res_len = parent.length * spec.tail_sum(res_first);
            rec.residual = cert.residuals.size();
            cert.residuals.push_back(Residual{tp.parent, res_first, res_left, res_right, res_len});
            cert.residual_length = cert.residual_length + res_len;
            rec.lemma = part.certify(g);
            rec.series_tail = pow(parent_len, alpha) * part.series_bound_after(g);
            series_extra += rec.series_tail;
            cert.tails.push_back(std::move(rec));
        }
    }

    Interval blocks_vol = alpha_volume(spec, cert.blocks, alpha);
    Interval res_vol = Interval::from(0L, p);
    for (const auto& r : cert.residuals) res_vol += pow(r.length.enclose(p), alpha);
    cert.alpha_volume = blocks_vol + res_vol;
    cert.series_volume = blocks_vol + series_extra;
    cert.bound_rhs = cert.constants.k * pow(e_len, alpha - params.delta);

    Interval right = Interval::from(0L, p);
    for (std::size_t i : cert.right_blocks) right += pow(block_length(spec, cert.blocks[i]).enclose(p), alpha);
    for (const auto& t : cert.tails)
        if (t.right_part && t.residual) right += pow(cert.residuals[*t.residual].length.enclose(p), alpha);
    cert.right_volume = right;
    Interval q0 = spec.q(Index(0)).enclose(p);
    cert.right_bound = (Interval::from(1L, p) + pow(q0, -alpha)) * pow(e_len, alpha);
    return cert;
}

/// Sub-bound checks of a certificate, each as (name, holds).
struct CertificateChecks {
    bool volume = false;           // alpha_volume and series_volume <= K |E|^(alpha-delta)
    bool right_part = false;       // right_volume <= (1 + q_0^-alpha) |E|^alpha
    bool j1 = false;               // |J_1| <= |E| / q_0 (vacuous without J_1)
    bool rank_decay = false;       // |J_k(0)|^alpha / |E|^(alpha-delta) <= q^((k-1) delta)
    bool lemma = false;            // every tail's partition certificate
    bool residual = false;         // total residual length <= eps_res
    bool membership = false;       // every block is a finite consecutive digit range

    bool all() const { return volume && right_part && j1 && rank_decay && lemma && residual && membership; }
};

inline CertificateChecks check_certificate(const QVectorSpec& spec, const CoverCertificate& cert,
                                           const CoverParams& params) {
    const Precision p = spec.precision();
    CertificateChecks c;
    c.volume = cert.volume_holds();
    c.right_part = certainly_less_equal(cert.right_volume, cert.right_bound);
    Interval e_len = cert.length.enclose(p);
    Interval q0 = spec.q(Index(0)).enclose(p);
    if (cert.j1_block) {
        Interval j1 = block_length(spec, cert.blocks[*cert.j1_block]).enclose(p);
        c.j1 = certainly_less_equal(j1, e_len / q0);
    } else {
        c.j1 = true;
    }
    c.rank_decay = true;
    c.lemma = true;
    Interval e_pow = pow(e_len, params.alpha - params.delta);
    for (const auto& t : cert.tails) {
        c.lemma = c.lemma && t.lemma.holds();
        Interval j0 = pow(block_length(spec, cert.blocks[t.first_block]).enclose(p), params.alpha);
        Interval decay = pow(cert.constants.q_max,
                             Interval::from(static_cast<long>(t.rank_offset - 1), p) * params.delta);
        c.rank_decay = c.rank_decay && certainly_less_equal(j0 / e_pow, decay);
    }
    c.residual = certainly_less_equal(cert.residual_length.enclose(p), params.eps_res);
    c.membership = std::all_of(cert.blocks.begin(), cert.blocks.end(), [](const Block& b) { return b.first <= b.last; });
    return c;
}

/// Exact sweep: the blocks and residuals of an exact-mode certificate contain [a, b).
inline bool verify_coverage(const QVectorSpec& spec, const CoverCertificate& cert) {
    if (!spec.exact()) throw InvalidArgument("verify_coverage needs an exact Q-vector");
    std::vector<std::pair<Rational, Rational>> pieces;
    for (const auto& b : cert.blocks) {
        Rational l = block_left(spec, b).exact();
        pieces.emplace_back(l, l + block_length(spec, b).exact());
    }
    for (const auto& r : cert.residuals) pieces.emplace_back(r.left.exact(), r.right.exact());
    std::sort(pieces.begin(), pieces.end());
    Rational reach = cert.a_value.exact();
    const Rational end = cert.b_value.exact();
    for (const auto& [l, r] : pieces) {
        if (reach >= end) break;
        if (l > reach) return false;
        if (r > reach) reach = r;
    }
    return reach >= end;
}

/// Infinite covering of [a, b) yielded block by block: the [c, b) blocks, then
/// the first block of every tail, then further tail groups in round-robin order.
/// Single consumer only.
class CoverStream {
public:
    CoverStream(const QVectorSpec& spec, const QRational& a, const QRational& b, const CoverParams& params)
        : spec_(&spec) {
        params.validate();
        detail::CoverPlan plan = detail::plan_cover(a, b);
        finite_ = std::move(plan.right_blocks);
        for (auto& tp : plan.tails) {
            tails_.push_back(Tail{tp.parent, tp.start,
                                  Lemma1Partition<QTailStream>(QTailStream(spec, tp.start), params.alpha)});
        }
    }

    /// Next block, or nullopt once a covering without infinite tails is exhausted.
    std::optional<Block> next() {
        if (pos_ < finite_.size()) return finite_[pos_++];
        if (tails_.empty()) return std::nullopt;
        Tail& t = tails_[cursor_];
        auto [lo, hi] = t.partition.group(round_);
        Block blk{t.parent, Index(t.start + lo), Index(t.start + hi)};
        if (++cursor_ == tails_.size()) {
            cursor_ = 0;
            ++round_;
        }
        return blk;
    }

    bool infinite() const { return !tails_.empty(); }

private:
    struct Tail {
        CylinderAddress parent;
        Index start;
        Lemma1Partition<QTailStream> partition;
    };
    const QVectorSpec* spec_;
    std::vector<Block> finite_;
    std::vector<Tail> tails_;
    std::size_t pos_ = 0;
    std::size_t cursor_ = 0;
    std::size_t round_ = 0;
};

inline CoverStream cover_stream(const QVectorSpec& spec, const QRational& a, const QRational& b,
                                const CoverParams& params) {
    return CoverStream(spec, a, b, params);
}

}  // namespace qinf
