// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "cover_oracle.hpp"
#include "oracle.hpp"
#include "qinf/qinf.hpp"

using namespace qinf;
using oracle::Hp;

namespace {

/// Collects the first few failure messages of a criterion.
struct Outcome {
    bool ok = true;
    std::ostringstream notes;
    int failures = 0;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (++failures <= 3) notes << " [" << what << "]";
    }
};

int run(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char limit[64];
    std::snprintf(limit, sizeof limit, "%.2f s, limit %.0f s", secs, limit_s);
    out.require(secs < limit_s, "over time");
    std::cout << (out.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " (" << limit << ")"
              << out.notes.str() << std::endl;
    return out.ok ? 0 : 1;
}

Interval dec(const char* s, Precision p = kDefaultPrecision) { return Interval::parse(s, p); }

Hp power_law_q(const Index& i) {
    static const Hp zeta2 = Hp::pi() * Hp::pi() / Hp(6.0);
    Hp k(Index(i + 1));
    return Hp(1.0) / (k * k * zeta2);
}

// 1 -----------------------------------------------------------------------

void codec(Outcome& out) {
    Rng rng(1);
    for (auto q : {QVectorSpec::luroth(), QVectorSpec::geometric(Rational(1, 2))}) {
        for (int t = 0; t < 1000; ++t) {
            Rational x = random_rational(rng);
            CylinderAddress a = encode(q, x, 12);
            Cylinder c = decode(q, a);
            Rational prod = 1;
            for (const auto& d : a.digits) prod *= q.q(d).exact();
            out.require(a.rank() == 12, "depth");
            out.require(c.left.exact() <= x && x < c.right().exact(), q.name() + " containment " + x.get_str());
            out.require(c.length.exact() == prod, q.name() + " length " + x.get_str());
            out.require(cylinder_length(q, a).exact() == prod, q.name() + " cylinder_length");
        }
    }
}

// 2 -----------------------------------------------------------------------

void partition(Outcome& out) {
    // pinned case: a_i = 2^-(i+1), alpha = 1/2, n_1 = 3 by direct evaluation
    auto holds = [](long n) {
        Hp tail = pow(Hp(0.5), Hp(static_cast<double>(n + 1)));
        Hp lhs = pow(tail, Hp(0.5)) / (Hp(1.0) - pow(Hp(2.0), Hp(-0.5)));
        return !(pow(Hp(1.0) - tail, Hp(0.5)) < lhs);
    };
    long oracle_n1 = 0;
    while (!holds(oracle_n1)) ++oracle_n1;
    out.require(oracle_n1 == 3, "oracle n1");
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    auto pinned = lemma1_partition(QTailStream(geo, 0), dec("0.5"));
    out.require(pinned.boundary(1) == oracle_n1, "pinned n1 = " + pinned.boundary(1).get_str());

    auto lur = QVectorSpec::luroth();
    auto pl = QVectorSpec::power_law("2.0");
    struct Case {
        const QVectorSpec* q;
        long offset;
        const char* name;
    };
    std::vector<Case> cases = {{&geo, 0, "geometric"}, {&lur, 0, "luroth+0"},   {&lur, 10, "luroth+10"},
                               {&lur, 100, "luroth+100"}, {&pl, 0, "powerlaw+0"}, {&pl, 50, "powerlaw+50"}};
    for (const auto& c : cases) {
        for (const char* a : {"0.2", "0.5", "0.8"}) {
            auto part = lemma1_partition(QTailStream(*c.q, c.offset), dec(a));
            auto cert = part.certify(20);
            out.require(certainly_less(cert.rest_power, cert.first_power), std::string(c.name) + " alpha=" + a);
        }
    }
}

// 3 -----------------------------------------------------------------------

void covering_bound(Outcome& out) {
    std::vector<QVectorSpec> specs = {QVectorSpec::luroth(), QVectorSpec::geometric(Rational(1, 2)),
                                      QVectorSpec::custom({Rational(1, 6), Rational(1, 2), Rational(1, 12)})};
    std::vector<std::pair<const char*, const char*>> ad = {{"0.5", "0.2"}, {"0.8", "0.1"}};
    Rng rng(3);
    for (const auto& q : specs) {
        for (auto [a_s, d_s] : ad) {
            auto params = CoverParams::parse(a_s, d_s, "1e-6");
            for (int t = 0; t < 500; ++t) {
                auto [a, b] = random_interval(rng);
                auto cert = cover_interval(q, a, b, params);
                auto chk = check_certificate(q, cert, params);
                std::string tag = q.name() + " " + a.to_string() + " " + b.to_string();
                out.require(chk.volume, "volume " + tag);
                out.require(chk.right_part, "right part " + tag);
                out.require(chk.j1, "J1 " + tag);
                out.require(chk.rank_decay, "rank decay " + tag);
                out.require(chk.lemma && chk.membership, "lemma/membership " + tag);
                out.require(cert.residual_length.exact() <= Rational(1, 1000000), "residual " + tag);
                out.require(verify_coverage(q, cert), "coverage " + tag);
            }
        }
    }
    // power-law weights are enclosures: every certificate check, coverage by construction only
    auto pl = QVectorSpec::power_law("2.0");
    for (auto [a_s, d_s] : ad) {
        auto params = CoverParams::parse(a_s, d_s, "1e-6");
        for (int t = 0; t < 500; ++t) {
            auto [a, b] = random_interval(rng);
            auto cert = cover_interval(pl, a, b, params);
            std::string tag = "powerlaw " + a.to_string() + " " + b.to_string();
            out.require(check_certificate(pl, cert, params).all(), "checks " + tag);
            out.require(cert.residual_length.enclose(pl.precision()).upper() <= 1e-6, "residual " + tag);
        }
    }
}

// 4 -----------------------------------------------------------------------

void faithfulness(Outcome& out) {
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    ConditionQuery qa{Rational(1, 2), Rational(1, 10), Index(17), Index(200), Index(1000)};
    auto va = check_condition(geo, qa);
    out.require(va.outcome == ConditionOutcome::HoldsOnRegion, std::string("4a outcome ") + to_string(va.outcome));
    out.require(va.margins.size() == 183, "4a rows");
    out.require(va.min_margin && va.min_margin->margin().certainly_positive(), "4a margin");
    // direct-summation oracle at each row's tightest cell
    for (const auto& c : va.margins) {
        long n = c.n.get_si();
        Hp s, sa;
        long last = c.M ? n + c.M->get_si() : n + 4000;
        for (long i = n; i <= last; ++i) {
            Hp w = pow(Hp(0.5), Hp(static_cast<double>(i + 1)));
            s += w;
            sa += pow(w, Hp(0.5));
        }
        out.require(sa < pow(s, Hp("0.4")), "4a oracle n=" + c.n.get_str());
    }

    auto pl = QVectorSpec::power_law("2.0");
    ConditionQuery qb{Rational(2, 5), Rational(1, 10), Index(50), Index(200), Index(10000)};
    auto w = witness_at(pl, qb, 100);
    out.require(w && w->M && w->violated(), "4b witness");
    if (!w || !w->M) return;
    out.require(w->n == 100, "4b n");
    out.require(reverify(pl, qb, *w), "4b reverify");
    // minimal scan by direct summation over M > N
    Hp s, sa;
    long oracle_m = -1;
    for (long m = 0; m <= 10000 && oracle_m < 0; ++m) {
        Hp x = power_law_q(Index(100 + m));
        s += x;
        sa += pow(x, Hp("0.4"));
        if (m > 50 && pow(s, Hp("0.3")) < sa) oracle_m = m;
    }
    out.require(*w->M == oracle_m, "4b minimal M " + w->M->get_str());
    auto v = check_condition(pl, qb);
    out.require(v.outcome == ConditionOutcome::Violated, "4b check_condition");
}

// 5, 6 --------------------------------------------------------------------

const CantorSpec& cantor3() {
    static const CantorSpec s = build_cantor(QVectorSpec::power_law("2.0"), Rational(2, 5), Rational(1, 5),
                                             Rational(1, 2), EpsilonRule{}, Index(10), 3);
    return s;
}

void cantor(Outcome& out) {
    const CantorSpec& s = cantor3();
    out.require(s.depth() == 3, "depth");
    const Precision p = s.precision;
    Interval L = Interval::from(s.L, p);
    Rng rng(5);
    const Rational ts[] = {s.delta / 4, s.delta / 2, 3 * s.delta / 4};
    for (std::size_t n = 1; n <= s.depth(); ++n) {
        const auto& lv = s.level(n);
        const std::string tag = "level " + std::to_string(n);
        out.require(certainly_less(lv.window_pow, lv.gamma), "(i) " + tag);
        out.require(lv.k > s.N && lv.M > s.N, "k, M > N " + tag);
        out.require(certainly_less_equal(lv.tail, Interval::from(s.eps.at(n), p)), "(ii) " + tag);
        Interval v = level_volume(s, n, Rational(s.delta / 2), VolumeFamily::BlockUnion);
        out.require(certainly_less_equal(v, L) && certainly_less_equal(lv.budget, L), "(iii) " + tag);
        out.require(level_mass(s, n).contains(Rational(1)), "(iv) " + tag);
        for (int t = 0; t < 100; ++t) {
            CantorAddress a;
            for (std::size_t j = 1; j <= n; ++j) {
                const auto& l = s.level(j);
                std::uniform_int_distribution<unsigned long> dist(0, l.M.get_ui());
                a.digits.push_back(l.k + dist(rng));
            }
            for (const auto& tt : ts) out.require(local_dim_ratio(s, a, tt).holds(), "(v) " + tag);
        }
    }
}

void gap(Outcome& out) {
    const CantorSpec& s = cantor3();
    const std::size_t n = s.depth();
    for (Rational sv = s.delta / 2; sv <= s.delta; sv += Rational(1, 200)) {
        Interval phi = level_volume(s, n, sv, VolumeFamily::PhiSplit);
        Interval blk = level_volume(s, n, sv, VolumeFamily::BlockUnion);
        out.require(certainly_less(blk, phi), "volumes at s=" + sv.get_str());
    }
    auto g = dimension_gap(s, uniform_grid(Rational(1, 100)));
    out.require(g.separated(), "crossing bracket separation");
    out.require(g.margin() && *g.margin() > 0, "crossing margin");
}

// 7 -----------------------------------------------------------------------

void brute_force(Outcome& out) {
    auto pl = QVectorSpec::power_law("2.0");
    auto toy = cantor_from_levels(pl, Rational(2, 5), Rational(1, 5), Rational(1, 2), EpsilonRule{}, Index(5),
                                  {{Index(30), Index(20)}, {Index(8), Index(15)}});
    for (Rational sv : {Rational(1, 10), Rational(1, 5), Rational(3, 5), Rational(1)}) {
        Hp hs(sv);
        Hp phi, blk, inner;
        for (long b = 8; b <= 23; ++b) inner += power_law_q(Index(b));
        for (long a = 30; a <= 50; ++a) {
            Hp qa = power_law_q(Index(a));
            for (long b = 8; b <= 23; ++b) phi += pow(qa * power_law_q(Index(b)), hs);
            blk += pow(qa * inner, hs);
        }
        Interval vp = level_volume(toy, 2, sv, VolumeFamily::PhiSplit);
        Interval vb = level_volume(toy, 2, sv, VolumeFamily::BlockUnion);
        const std::string tag = " s=" + sv.get_str();
        out.require(oracle::encloses(vp, phi, 1e-20) && oracle::width(vp) <= 1e-10, "phi" + tag);
        out.require(oracle::encloses(vb, blk, 1e-20) && oracle::width(vb) <= 1e-10, "block" + tag);
    }

    Rng rng(7);
    std::vector<QVectorSpec> specs = {QVectorSpec::luroth(), QVectorSpec::geometric(Rational(1, 2))};
    auto params = CoverParams::parse("0.5", "0.2", "1e-6");
    for (int t = 0; t < 50; ++t) {
        const auto& q = specs[t % 2];
        auto [a, b] = random_interval(rng, 3, 4);
        auto cert = cover_interval(q, a, b, params);
        std::string tag = q.name() + " " + a.to_string() + " " + b.to_string();
        out.require(oracle::enumerate_coverage(q, cert).covered, "enumeration " + tag);
        Hp vol = oracle::piece_volume(oracle::pieces(q, cert), Hp(0.5));
        out.require(oracle::encloses(cert.alpha_volume, vol, 1e-20), "volume " + tag);
    }
}

}  // namespace

int main() {
    int failed = 0;
    failed += run(1, "codec exactness, 1000 rationals x 2 families at depth 12", 10, codec);
    failed += run(2, "halving partition certificates, 6 streams x 3 alphas, pinned n1 = 3", 5, partition);
    failed += run(3, "covering bound and sub-bounds, 500 intervals x 4 families x 2 (alpha, delta)", 120, covering_bound);
    failed += run(4, "faithfulness: geometric holds, power law violated at n = 100", 30, faithfulness);
    failed += run(5, "Cantor construction at depth 3, checks (i)-(v)", 120, cantor);
    failed += run(6, "dimension gap on [delta/2, delta] at depth 3", 60, gap);
    failed += run(7, "brute-force product volumes and rank-8 cover enumeration", 60, brute_force);
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
