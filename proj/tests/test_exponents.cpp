#include "rlab/error.hpp"
#include "rlab/exponents.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace rlab;

namespace {

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

ExponentPoint pt(const char* p, const char* q) { return ExponentPoint::from_strings(p, q); }

TypeTuple random_tuple(int d) {
    std::vector<int> a;
    int cur = 0;
    for (int i = 0; i < d; ++i) {
        cur += 1 + static_cast<int>(test::rng()() % 3);
        a.push_back(cur);
    }
    return TypeTuple(a);
}

// Direct transcription of the piecewise definition: the last ceil(alpha) orders,
// the first of them weighted by the fractional part.
Rational kappa_brute(const TypeTuple& a, const Rational& alpha) {
    const int d = a.dim();
    std::int64_t c = 1;
    while (Rational(c) < alpha) ++c;
    Rational sum = (alpha - Rational(c - 1)) * Rational(a[d - static_cast<int>(c)]);
    for (int i = d - static_cast<int>(c) + 1; i < d; ++i) sum += a[i];
    return sum;
}

}  // namespace

TEST_SUITE("exponents") {

TEST_CASE("ceil_of") {
    CHECK(ceil_of(2.0) == 2);
    CHECK(ceil_of(2.25) == 3);
    CHECK(ceil_of(R(5, 2)) == 3);
    CHECK(ceil_of(R(3)) == 3);
    CHECK(ceil_of(R(1, 7)) == 1);
}

TEST_CASE("kappa and beta endpoint identities") {
    for (int n = 0; n < 500; ++n) {
        const int d = 2 + static_cast<int>(test::rng()() % 5);
        const TypeTuple a = random_tuple(d);
        CHECK(kappa(a, R(d)) == R(a.norm1()));
        CHECK(kappa(a, R(d - 1)) == R(a.norm1() - a[0]));
        const Rational alpha(1 + static_cast<std::int64_t>(test::rng()() % (4 * d - 1)), 4);
        if (alpha > R(d)) continue;
        CHECK(kappa(a, alpha) == kappa_brute(a, alpha));
        CHECK(kappa(a, to_double(alpha)) == doctest::Approx(to_double(kappa(a, alpha))));
    }
    for (int d = 2; d <= 8; ++d) {
        CHECK(beta(d, R(d)) == R(d * (d + 1), 2));
        CHECK(beta(d, R(d - 1)) == R(d * (d + 1), 2) - 1);
    }
    CHECK(kappa(TypeTuple({1, 2, 3}), R(5, 2)) == R(11, 2));
    CHECK_THROWS_AS(kappa(TypeTuple({1, 2}), R(3)), Error);
    CHECK_THROWS_AS(kappa(TypeTuple({1, 2}), R(0)), Error);
}

TEST_CASE("kappa is continuous and increasing across integer breakpoints") {
    const Rational eps(1, 1000000);
    for (int n = 0; n < 100; ++n) {
        const int d = 2 + static_cast<int>(test::rng()() % 5);
        const TypeTuple a = random_tuple(d);
        for (int m = 1; m < d; ++m) {
            const Rational at = kappa(a, R(m));
            const Rational below = kappa(a, R(m) - eps), above = kappa(a, R(m) + eps);
            CHECK(below < at);
            CHECK(at < above);
            CHECK(at - below <= eps * a.back());
            CHECK(above - at <= eps * a.back());
        }
    }
}

TEST_CASE("sphere region thresholds") {
    const Region r2 = sphere_region(2);
    CHECK(r2.q_threshold == R(3));
    CHECK(r2.line_coefficient == R(2));
    const Region r3 = sphere_region(3);
    CHECK(r3.q_threshold == R(6));
    CHECK(r3.line_coefficient == R(5));

    CHECK(r3.classify(pt("inf", "7")) == PointClass::Interior);
    CHECK(r3.status(pt("inf", "7")) == EstimateStatus::Holds);
    CHECK(r2.classify(pt("inf", "3")) == PointClass::Boundary);
    CHECK(r2.status(pt("inf", "3")) == EstimateStatus::Open);
    CHECK(r2.classify(pt("3/2", "3")) == PointClass::Exterior);
    CHECK(r2.classify(pt("inf", "2")) == PointClass::Exterior);
    // On the line 1/p + 2/q = 1 with q > 3.
    CHECK(r2.classify(pt("2", "4")) == PointClass::Boundary);
    CHECK(r2.describe().find("q_c=3") != std::string::npos);
}

TEST_CASE("finite type boundary is included above the q threshold") {
    const Region r = finite_type_region(R(6), 3);
    CHECK(r.q_threshold == R(6));
    const ExponentPoint on_line = ExponentPoint::from_inverses(R(1, 7), R(1, 7));
    CHECK(r.classify(on_line) == PointClass::Boundary);
    CHECK(r.status(on_line) == EstimateStatus::Holds);
    const ExponentPoint corner = ExponentPoint::from_inverses(R(0), R(1, 6));
    CHECK(r.status(corner) == EstimateStatus::Open);
    CHECK_THROWS_AS(finite_type_region(R(4), 3), Error);
}

TEST_CASE("finite type region is contained in the nondegenerate one") {
    const Region nd = sphere_region(3);
    const Region ft = finite_type_region(R(7), 3);
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
            const ExponentPoint p = ExponentPoint::from_inverses(R(i, 40), R(j, 40));
            if (ft.status(p) == EstimateStatus::Holds) CHECK(nd.classify(p) != PointClass::Exterior);
            if (nd.status(p) == EstimateStatus::Fails) CHECK(ft.status(p) == EstimateStatus::Fails);
        }
}

TEST_CASE("hyperplane chart preserves pairings with the curve") {
    for (int n = 0; n < 20; ++n) {
        const int d = 3 + static_cast<int>(test::rng()() % 3);
        Eigen::VectorXd c(d);
        for (int i = 0; i < d; ++i) c[i] = test::uniform(-1, 1);
        const HyperplaneChart chart = hyperplane_project(c, d);
        Eigen::VectorXd xbar(d - 1);
        for (int i = 0; i < d - 1; ++i) xbar[i] = test::uniform(-1, 1);
        Eigen::VectorXd x(d);
        for (int i = 0, r = 0; i < d; ++i) x[i] = i == chart.k ? chart.h.dot(xbar) : xbar[r++];
        CHECK(std::abs(c.dot(x)) < 1e-12);
        const Curve m = Curve::moment(d);
        for (double t : {0.0, 0.3, 1.0}) CHECK(std::abs(x.dot(m(t)) - xbar.dot(chart.gamma_h(t))) < 1e-12);
    }
    CHECK_THROWS_AS(hyperplane_project(Eigen::Vector3d::Zero(), 3), Error);
    CHECK_THROWS_AS(hyperplane_project(Eigen::Vector2d(1, 0), 3), Error);
}

TEST_CASE("hyperplane omega") {
    CHECK(hyperplane_omega(Eigen::Vector3d(1, 0, 0), 3) == 2);
    CHECK(hyperplane_omega(Eigen::Vector3d(0, 1, 0), 3) == 1);
    CHECK(hyperplane_omega(Eigen::Vector3d(0, 0, 1), 3) == 0);
    for (int n = 0; n < 50; ++n) {
        const int d = 3 + static_cast<int>(test::rng()() % 2);
        Eigen::VectorXd c(d);
        for (int i = 0; i < d; ++i) c[i] = test::uniform(-1, 1);
        const int omega = hyperplane_omega(c, d, 128);
        CHECK(omega >= 0);
        CHECK(omega <= d - 1);
    }
    const Region r = hyperplane_region(3, 2);
    CHECK(r.q_threshold == R(4));
    CHECK(r.line_coefficient == R(5));
    CHECK_THROWS_AS(hyperplane_region(2, 0), Error);
}

TEST_CASE("kdim thresholds") {
    CHECK(kdim_threshold(4, 2) == R(8));
    CHECK(kdim_threshold(4, 3) == R(10));
    CHECK(kdim_threshold(5, 2) == R(10));
    CHECK_THROWS_AS(kdim_threshold(4, 1), Error);
    CHECK_THROWS_AS(kdim_threshold(4, 4), Error);
    const Region r = kdim_region(4, 2);
    CHECK(r.status(pt("inf", "7")) == EstimateStatus::Fails);
    CHECK(r.status(pt("inf", "9")) == EstimateStatus::Open);
}

TEST_CASE("predicted excess") {
    CHECK(predicted_excess(pt("inf", "3"), KnappFamily{}, 2) == R(-1, 12));
    CHECK(predicted_excess(pt("3/2", "3"), KnappFamily{}, 2) == R(1, 12));
    CHECK(predicted_excess(pt("6", "4"), KnappFamily{}, 2) == R(-1, 12));
    CHECK(predicted_excess(pt("inf", "3"), RandomFamily{}, 2) == R(0));
    CHECK(predicted_excess(pt("inf", "2"), RandomFamily{}, 2) > R(0));
    // The rectangle family at the nondegenerate type reproduces the Knapp exponent.
    for (int d = 2; d <= 4; ++d)
        for (int i = 0; i <= 10; ++i)
            for (int j = 1; j <= 10; ++j) {
                const ExponentPoint p = ExponentPoint::from_inverses(R(i, 10), R(j, 10));
                const AlphaRectFamily fam{TypeTuple::nondegenerate(d), R(d - 1), R(1, 2 * d)};
                CHECK(predicted_excess(p, fam, d) == predicted_excess(p, KnappFamily{}, d));
                // Positive excess exactly off the closed region line.
                const Region r = sphere_region(d);
                CHECK((predicted_excess(p, KnappFamily{}, d) > R(0)) == (r.line_value(p) > R(1)));
            }
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/2") == R(3, 2));
    CHECK(parse_rational(" 1.5 ") == R(3, 2));
    CHECK(parse_rational("-0.25") == R(-1, 4));
    CHECK(parse_rational("7") == R(7));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational(""), Error);
    CHECK(to_rational(0.375) == R(3, 8));
    CHECK_THROWS_AS(to_rational(M_PI), Error);
    CHECK(format_rational(R(5, 2)) == "5/2");
    CHECK(format_exponent(R(0)) == "inf");
    CHECK(format_exponent(R(2, 3)) == "3/2");
}

TEST_CASE("exponent points") {
    const ExponentPoint p = pt("inf", "3/2");
    CHECK(p.inv_p.numerator() == 0);
    CHECK(p.inv_q == R(2, 3));
    CHECK_THROWS_AS(pt("1/2", "3"), Error);
    CHECK_THROWS_AS(ExponentPoint::from_inverses(R(2), R(0)), Error);
}

}  // TEST_SUITE
