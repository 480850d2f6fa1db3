#include <catch_amalgamated.hpp>

#include "qinf/expansion.hpp"
#include "qinf/random.hpp"

using namespace qinf;

namespace {

/// Reference expansion: linear scan for the digit, exact rational recursion.
CylinderAddress reference_encode(const QVectorSpec& q, Rational x, std::size_t depth) {
    CylinderAddress out;
    for (std::size_t n = 0; n < depth; ++n) {
        Index k = 0;
        Rational acc = 0;
        while (acc + q.q(k).exact() <= x) {
            acc += q.q(k).exact();
            ++k;
        }
        out.digits.push_back(k);
        x = (x - acc) / q.q(k).exact();
        x.canonicalize();
    }
    return out;
}

/// Reference left endpoint by nesting: left(w d) = left(w) + |w| * sum_{i<d} q_i.
Rational reference_left(const QVectorSpec& q, const CylinderAddress& a) {
    Rational left = 0;
    Rational len = 1;
    for (const auto& d : a.digits) {
        Rational below = 0;
        for (Index i = 0; i < d; ++i) below += q.q(i).exact();
        left += len * below;
        len *= q.q(d).exact();
    }
    return left;
}

}  // namespace

TEST_CASE("encode examples") {
    auto lur = QVectorSpec::luroth();
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    CHECK(encode(lur, Rational(2, 3), 5) == CylinderAddress{2, 0, 0, 0, 0});
    CHECK(encode(lur, Rational(0), 3) == CylinderAddress{0, 0, 0});
    CHECK(encode(geo, Rational(0), 3) == CylinderAddress{0, 0, 0});
    CHECK(encode(geo, Rational(1, 2), 4) == CylinderAddress{1, 0, 0, 0});
    CHECK_THROWS_AS(encode(lur, Rational(1), 2), InvalidArgument);
    CHECK_THROWS_AS(encode(lur, Rational(-1, 3), 2), InvalidArgument);
}

TEST_CASE("decode and cylinder_length examples") {
    auto lur = QVectorSpec::luroth();
    auto geo = QVectorSpec::geometric(Rational(1, 2));
    Cylinder c = decode(lur, {1, 0});
    CHECK(c.left.exact() == Rational(1, 2));
    CHECK(c.length.exact() == Rational(1, 12));
    CHECK(c.right().exact() == Rational(7, 12));
    Cylinder root = decode(lur, {});
    CHECK(root.left.exact() == 0);
    CHECK(root.length.exact() == 1);
    Cylinder g = decode(geo, {0, 1});
    CHECK(g.left.exact() == Rational(1, 4));
    CHECK(g.length.exact() == Rational(1, 8));
    CHECK(cylinder_length(lur, {0, 1}).exact() == Rational(1, 12));
    CHECK(cylinder_length(geo, {}).exact() == 1);
    auto pl = QVectorSpec::power_law("2.0");
    Interval l2 = cylinder_length(pl, {0, 0}).enclose(96);
    Interval q0 = pl.q(0).enclose(96);
    CHECK(l2.intersects(q0 * q0));
    CHECK(l2.lower() > 0.3695);
    CHECK(l2.upper() < 0.3697);
}

TEST_CASE("encode agrees with a linear-scan reference") {
    Rng rng(7);
    for (auto q : {QVectorSpec::luroth(), QVectorSpec::geometric(Rational(1, 2)),
                   QVectorSpec::custom({Rational(1, 6), Rational(1, 2), Rational(1, 12)})}) {
        for (int t = 0; t < 100; ++t) {
            Rational x = random_rational(rng, 5000);
            INFO(q.name() << " x=" << x.get_str());
            REQUIRE(encode(q, x, 6) == reference_encode(q, x, 6));
        }
    }
}

TEST_CASE("round trip at depths up to 12") {
    Rng rng(11);
    for (auto q : {QVectorSpec::luroth(), QVectorSpec::geometric(Rational(1, 2))}) {
        for (int t = 0; t < 200; ++t) {
            Rational x = random_rational(rng);
            for (std::size_t d : {1u, 5u, 12u}) {
                CylinderAddress a = encode(q, x, d);
                Cylinder c = decode(q, a);
                INFO(q.name() << " x=" << x.get_str() << " d=" << d);
                REQUIRE(c.left.exact() <= x);
                REQUIRE(x < c.right().exact());
                REQUIRE(c.left.exact() == reference_left(q, a));
                Rational prod = 1;
                for (const auto& dig : a.digits) prod *= q.q(dig).exact();
                REQUIRE(c.length.exact() == prod);
            }
        }
    }
}

TEST_CASE("interval mode encode reports ambiguous boundaries") {
    auto q = QVectorSpec::luroth().with_mode(NumericMode::IntervalBounds).with_precision(64);
    CHECK(encode(q, Scalar(Rational(3, 10)), 3) == encode(QVectorSpec::luroth(), Rational(3, 10), 3));
    try {
        encode(q, Scalar(Rational(2, 3)), 2);
        FAIL("expected a boundary ambiguity");
    } catch (const BoundaryAmbiguity& e) {
        CHECK(e.lower_digit() == "1");
        CHECK(e.upper_digit() == "2");
    }
}

TEST_CASE("children tile their parent left to right") {
    for (auto q : {QVectorSpec::luroth(), QVectorSpec::geometric(Rational(1, 3)),
                   QVectorSpec::custom({Rational(1, 6), Rational(1, 2), Rational(1, 12)})}) {
        std::vector<CylinderAddress> prefixes = {{}, {0}, {3}, {1, 2}, {0, 4, 1}};
        for (const auto& p : prefixes) {
            Cylinder parent = decode(q, p);
            Rational acc = 0;
            Rational last_left = -1;
            for (long i = 0; i <= 25; ++i) {
                Cylinder child = decode(q, p.child(i));
                REQUIRE(child.left.exact() == parent.left.exact() + acc);
                REQUIRE(child.left.exact() > last_left);
                last_left = child.left.exact();
                acc += child.length.exact();
                Rational covered = acc + parent.length.exact() * q.tail_sum(i + 1).exact();
                REQUIRE(covered == parent.length.exact());
            }
        }
    }
}

TEST_CASE("Q-rational ordering and normalisation") {
    CHECK(QRational::from_digits({1, 2, 0, 0}) == QRational::from_digits({1, 2}));
    CHECK(QRational::from_digits({0, 0}) == QRational::from_digits({}));
    CHECK(QRational::from_digits({1, 2}) < QRational::from_digits({1, 3}));
    CHECK(QRational::from_digits({1}) < QRational::from_digits({1, 0, 1}));
    CHECK(QRational::from_digits({5, 9}) < QRational::end());
    CHECK_FALSE(QRational::end() < QRational::end());
    CHECK(QRational::right_end_of({1, 4}) == QRational::from_digits({1, 5}));
    CHECK(QRational::right_end_of({}).is_end());
    auto q = QVectorSpec::luroth();
    CHECK(value_of(q, QRational::end()).exact() == 1);
    CHECK(value_of(q, QRational::from_digits({1, 0})).exact() == Rational(1, 2));
    // digitwise order is the order of values
    Rng rng(3);
    for (int t = 0; t < 300; ++t) {
        QRational a = random_qrational(rng);
        QRational b = random_qrational(rng);
        Rational va = value_of(q, a).exact();
        Rational vb = value_of(q, b).exact();
        REQUIRE((a < b) == (va < vb));
        REQUIRE((a == b) == (va == vb));
    }
}

TEST_CASE("locate_max_cylinder examples and invariant") {
    auto m = locate_max_cylinder(QRational::from_digits({1, 2}), QRational::right_end_of({1, 4}));
    CHECK(m.prefix == CylinderAddress{1});
    CHECK(m.beta1 == 2);
    m = locate_max_cylinder(QRational::from_digits({}), QRational::end());
    CHECK(m.prefix.empty());
    CHECK(m.beta1 == 0);
    m = locate_max_cylinder(QRational::from_digits({0, 3}), QRational::from_digits({0, 3, 5}));
    CHECK(m.prefix == CylinderAddress{0, 3});
    CHECK(m.beta1 == 0);
    CHECK_THROWS_AS(locate_max_cylinder(QRational::from_digits({2}), QRational::from_digits({1})), InvalidArgument);
    CHECK_THROWS_AS(locate_max_cylinder(QRational::from_digits({2}), QRational::from_digits({2})), InvalidArgument);

    auto q = QVectorSpec::luroth();
    Rng rng(5);
    for (int t = 0; t < 500; ++t) {
        auto [a, b] = random_interval(rng);
        auto mc = locate_max_cylinder(a, b);
        Rational va = value_of(q, a).exact();
        Rational vb = value_of(q, b).exact();
        Cylinder c = decode(q, mc.prefix);
        INFO(a.to_string() << " " << b.to_string());
        REQUIRE(c.left.exact() <= va);
        REQUIRE(vb <= c.right().exact());
        Cylinder child = decode(q, mc.prefix.child(mc.beta1));
        REQUIRE(child.left.exact() <= va);
        REQUIRE(vb > child.right().exact());
    }
}
