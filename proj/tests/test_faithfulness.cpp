#include <catch_amalgamated.hpp>

#include <sstream>

#include "oracle.hpp"
#include "qinf/faithfulness.hpp"

using namespace qinf;
using oracle::Hp;

namespace {

ConditionQuery query(const char* a, const char* d, long N, long n_max, long M_max) {
    return ConditionQuery{parse_decimal(a), parse_decimal(d), Index(N), Index(n_max), Index(M_max)};
}

/// Direct (lhs, rhs) at offset n over M + 1 terms.
std::pair<Hp, Hp> direct_cell(const std::function<Hp(long)>& q, long n, long M, const Hp& alpha, const Hp& delta) {
    Hp s, sa;
    for (long i = n; i <= n + M; ++i) {
        Hp w = q(i);
        s += w;
        sa += pow(w, alpha);
    }
    return {pow(s, alpha - delta), sa};
}

Hp geometric_half(long i) { return pow(Hp(0.5), Hp(static_cast<double>(i + 1))); }

Hp power_law_2(long i) {
    static const Hp zeta2 = Hp::pi() * Hp::pi() / Hp(6.0);
    Hp k(static_cast<double>(i + 1));
    return Hp(1.0) / (k * k * zeta2);
}

}  // namespace

TEST_CASE("single cells agree with direct summation") {
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    auto pl = QVectorSpec::power_law("2.0");
    Interval a = Interval::parse("0.5", 96), d = Interval::parse("0.1", 96);
    for (auto [n, M] : {std::pair{5L, 3L}, {20L, 40L}, {150L, 900L}}) {
        auto c = evaluate_cell(geo, a, d, n, Index(M));
        auto [l, r] = direct_cell(geometric_half, n, M, Hp(0.5), Hp("0.1"));
        CHECK(oracle::encloses(c.lhs, l, 1e-24));
        CHECK(oracle::encloses(c.rhs, r, 1e-24));
    }
    Interval a4 = Interval::parse("0.4", 96);
    auto c = evaluate_cell(pl, a4, d, 100, Index(51));
    auto [l, r] = direct_cell(power_law_2, 100, 51, Hp("0.4"), Hp("0.1"));
    CHECK(oracle::encloses(c.lhs, l, 1e-24));
    CHECK(oracle::encloses(c.rhs, r, 1e-24));
    CHECK(c.violated());
    // M = 0 is one term: q^(alpha - delta) >= q^alpha
    auto one = evaluate_cell(pl, a4, d, 7, Index(0));
    CHECK(one.holds());
    // the infinite cell of a geometric vector
    auto inf = evaluate_cell(geo, a, d, 30, std::nullopt);
    Hp tail = pow(Hp(0.5), Hp(30.0));
    Hp rhs = pow(Hp(0.5), Hp(15.5)) / (Hp(1.0) - pow(Hp(0.5), Hp(0.5)));
    CHECK(oracle::encloses(inf.lhs, pow(tail, Hp("0.4")), 1e-24));
    CHECK(oracle::encloses(inf.rhs, rhs, 1e-24));
}

TEST_CASE("geometric 1/2 holds on the region") {
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    auto v = check_condition(geo, query("0.5", "0.1", 20, 200, 1000));
    CHECK(v.outcome == ConditionOutcome::HoldsOnRegion);
    CHECK(v.margins.size() == 180);
    REQUIRE(v.min_margin);
    CHECK(v.min_margin->margin().certainly_positive());
    // n = 13 is the first offset where the minimal margin is positive
    auto low = check_condition(geo, query("0.5", "0.1", 12, 40, 200));
    CHECK(low.outcome == ConditionOutcome::HoldsOnRegion);
    auto lower = check_condition(geo, query("0.5", "0.1", 11, 40, 200));
    CHECK(lower.outcome == ConditionOutcome::Violated);
    REQUIRE(lower.witness);
    CHECK(lower.witness->n == 12);
    // the oracle agrees on the sign at the witness
    const auto& w = *lower.witness;
    if (w.M) {
        auto [l, r] = direct_cell(geometric_half, 12, w.M->get_si(), Hp(0.5), Hp("0.1"));
        CHECK(l < r);
    }
}

TEST_CASE("geometric verdict does not depend on the thread count") {
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    auto q1 = query("0.5", "0.1", 17, 120, 400);
    auto q4 = q1;
    q4.threads = 4;
    auto v1 = check_condition(geo, q1);
    auto v4 = check_condition(geo, q4);
    REQUIRE(v1.outcome == v4.outcome);
    CHECK(v1.cells == v4.cells);
    REQUIRE(v1.margins.size() == v4.margins.size());
    for (std::size_t i = 0; i < v1.margins.size(); ++i) {
        CHECK(v1.margins[i].n == v4.margins[i].n);
        CHECK(v1.margins[i].M == v4.margins[i].M);
    }
}

TEST_CASE("power law violates the condition") {
    auto pl = QVectorSpec::power_law("2.0");
    auto q = query("0.4", "0.1", 50, 200, 10000);
    auto v = check_condition(pl, q);
    REQUIRE(v.outcome == ConditionOutcome::Violated);
    REQUIRE(v.witness);
    CHECK(v.witness->n == 51);
    REQUIRE(v.witness->M);
    CHECK(*v.witness->M == 51);
    CHECK(reverify(pl, q, *v.witness));

    auto w = witness_at(pl, q, 100);
    REQUIRE(w);
    CHECK(w->n == 100);
    CHECK(*w->M == 51);
    CHECK(w->violated());
    CHECK(reverify(pl, q, *w));
    auto [l, r] = direct_cell(power_law_2, 100, 51, Hp("0.4"), Hp("0.1"));
    CHECK(l < r);
}

TEST_CASE("witness_at finds the least violating M") {
    auto pl = QVectorSpec::power_law("2.0");
    auto q = query("0.4", "0.1", 0, 200, 100);
    for (long n : {51L, 60L, 100L, 150L}) {
        long want = -1;
        for (long M = 1; M <= 100 && want < 0; ++M) {
            auto [l, r] = direct_cell(power_law_2, n, M, Hp("0.4"), Hp("0.1"));
            if (l < r) want = M;
        }
        auto w = witness_at(pl, q, n);
        INFO("n=" << n);
        REQUIRE(w);
        CHECK(*w->M == want);
    }
    // beyond the linear range the search doubles and bisects
    auto far = witness_at(pl, query("0.4", "0.1", 0, 200, 2), 100);
    REQUIRE(far);
    CHECK(*far->M == 4);
}

TEST_CASE("divergent power tails count as violations") {
    auto lur = QVectorSpec::luroth();
    auto v = check_condition(lur, query("0.4", "0.1", 10, 12, 10));
    REQUIRE(v.outcome == ConditionOutcome::Violated);
    REQUIRE(v.witness);
    CHECK_FALSE(v.witness->M);
    CHECK_FALSE(v.witness->rhs.is_finite());
    CHECK(v.witness->m_string() == "inf");
    auto no_inf = query("0.4", "0.1", 10, 12, 10);
    no_inf.infinite_cell = false;
    CHECK(check_condition(lur, no_inf).outcome == ConditionOutcome::HoldsOnRegion);
}

TEST_CASE("query validation") {
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    CHECK_THROWS_AS(check_condition(geo, query("0.5", "0.6", 1, 2, 2)), InvalidArgument);
    CHECK_THROWS_AS(check_condition(geo, query("0.5", "0.1", 10, 5, 20)), InvalidArgument);
    CHECK_THROWS_AS(check_condition(geo, query("1.0", "0.1", 1, 5, 5)), InvalidArgument);
    CHECK(std::string(to_string(ConditionOutcome::Inconclusive)) == "Inconclusive");
}

TEST_CASE("margin tables") {
    std::vector<Index> ns = {10, 100, 1000};
    std::vector<std::optional<Index>> ms = {Index(10000), Index(10), std::nullopt, Index(100), Index(1000)};
    SECTION("Luroth shows negative margins at large M") {
        auto cells = scan_condition_region(QVectorSpec::luroth(), Rational(2, 5), Rational(1, 20), ns, ms);
        REQUIRE(cells.size() == 15);
        // M sorted ascending with the infinite cell last
        CHECK(*cells[0].M == 10);
        CHECK_FALSE(cells[4].M);
        for (std::size_t i = 0; i < cells.size(); i += 5) {
            CHECK(cells[i + 4].margin().certainly_negative());
            CHECK(cells[i + 3].margin().certainly_negative());
        }
        auto q = QVectorSpec::luroth();
        auto lur = [](long i) { return Hp(1.0) / Hp(static_cast<double>((i + 1) * (i + 2))); };
        auto [l, r] = direct_cell(lur, 100, 1000, Hp("0.4"), Hp("0.05"));
        CHECK(oracle::encloses(cells[5 + 2].lhs, l, 1e-24));
        CHECK(oracle::encloses(cells[5 + 2].rhs, r, 1e-24));
    }
    SECTION("geometric margins are positive from n = 100") {
        auto cells = scan_condition_region(QVectorSpec::geometric(Rational(1, 2)), Rational(2, 5), Rational(1, 20),
                                           ns, ms);
        for (const auto& c : cells)
            if (c.n >= 100) CHECK(c.margin().certainly_positive());
    }
    SECTION("custom padded vector, tiny grid") {
        auto q = QVectorSpec::custom({Rational(1, 6), Rational(1, 2), Rational(1, 12)});
        auto cells = scan_condition_region(q, Rational(1, 2), Rational(1, 5), {Index(1), Index(4)},
                                           {Index(2), std::nullopt});
        CHECK(cells.size() == 4);
        std::ostringstream os;
        write_margin_csv(os, cells);
        std::string csv = os.str();
        CHECK(csv.rfind("n,M,lhs_lower,rhs_upper,margin_lower\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
        CHECK(csv.find(",inf,") != std::string::npos);
    }
    CHECK_THROWS_AS(scan_condition_region(QVectorSpec::luroth(), Rational(2, 5), Rational(1, 20), {}, ms),
                    InvalidArgument);
}
