#include "rlab/error.hpp"
#include "rlab/exponents.hpp"
#include "rlab/measure.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace rlab;

namespace {

double weighted(const QuadMeasure& mu, const auto& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weights[i] * f(Eigen::VectorXd(mu.point(i)));
    return s;
}

// int_{-1}^{1} |s|^{-1/2} 2 sqrt(1 - s^2) ds = 2 B(1/4, 3/2).
double singular_mass_15() { return 2.0 * std::tgamma(0.25) * std::tgamma(1.5) / std::tgamma(1.75); }

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("sphere masses and moments") {
    const QuadMeasure c = sphere_measure(2, 256);
    CHECK(std::abs(c.total_mass() - 2 * M_PI) < 1e-12);
    const QuadMeasure s = sphere_measure(3, 32);
    CHECK(std::abs(s.total_mass() - 4 * M_PI) < 1e-12);
    CHECK(std::abs(weighted(s, [](const Eigen::VectorXd& x) { return x[2] * x[2]; }) - 4 * M_PI / 3) < 1e-12);
    CHECK(std::abs(weighted(s, [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[1] * x[1]; }) - 4 * M_PI / 15) < 1e-12);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s.point(i).norm() - 1.0) < 1e-14);
    CHECK_THROWS_AS(sphere_measure(4, 16), Error);
    CHECK_THROWS_AS(sphere_measure(2, 4), Error);
}

TEST_CASE("circle Fourier transform matches the Bessel function") {
    const QuadMeasure c = sphere_measure(2, 256);
    double re = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) re += c.weights[i] * std::cos(10.0 * c.point(i)[0]);
    CHECK(std::abs(re - 2 * M_PI * test::bessel_j0(10.0)) < 1e-6);
}

TEST_CASE("sphere resolution rule") {
    for (double lambda : {16.0, 64.0, 256.0}) {
        CHECK(sphere_measure(2, sphere_resolution_for(2, lambda)).spacing <= required_spacing(2, lambda) + 1e-15);
        CHECK(sphere_measure(3, sphere_resolution_for(3, lambda)).spacing <= required_spacing(3, lambda));
    }
}

TEST_CASE("sphere cap graph") {
    const GraphPatch cap = sphere_cap_graph(3, 0);
    Eigen::Vector2d y(0.3, -0.4);
    CHECK(cap.value(y) == doctest::Approx(1.0 - std::sqrt(0.75)));
    const Eigen::VectorXd x = cap.embed(y, true);
    CHECK(std::abs(x.norm() - 1.0) < 1e-14);
    CHECK(x[0] == doctest::Approx(-std::sqrt(0.75)));
    CHECK(x[1] == doctest::Approx(0.3));
    CHECK(x[2] == doctest::Approx(-0.4));

    const double h = 1e-6;
    for (int n = 0; n < 20; ++n) {
        const Eigen::Vector2d p(test::uniform(-0.6, 0.6), test::uniform(-0.6, 0.6));
        const Eigen::VectorXd g = cap.gradient(p);
        const Eigen::MatrixXd H = cap.hessian(p);
        for (int i = 0; i < 2; ++i) {
            const Eigen::Vector2d e = Eigen::Vector2d::Unit(i) * h;
            CHECK(std::abs((cap.value(p + e) - cap.value(p - e)) / (2 * h) - g[i]) < 1e-7);
            const Eigen::VectorXd dg = (cap.gradient(p + e) - cap.gradient(p - e)) / (2 * h);
            CHECK((dg - H.col(i)).norm() < 1e-6);
        }
    }
    CHECK_THROWS_AS(cap.value(Eigen::Vector2d(1.0, 0.5)), Error);
}

TEST_CASE("hyperplane measure") {
    const QuadMeasure e1 = hyperplane_measure(Eigen::Vector3d(1, 0, 0), 1.0, 16);
    CHECK(e1.total_mass() == doctest::Approx(4.0));
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK(e1.point(i)[0] == 0.0);
    const QuadMeasure tilted = hyperplane_measure(Eigen::Vector3d(1, 1, 0), 1.0, 16);
    CHECK(tilted.total_mass() == doctest::Approx(4.0 * std::sqrt(2.0)));
    for (std::size_t i = 0; i < tilted.size(); ++i) CHECK(std::abs(tilted.point(i)[0] + tilted.point(i)[1]) < 1e-15);
    CHECK_THROWS_AS(hyperplane_measure(Eigen::Vector3d::Zero(), 1.0, 8), Error);
}

TEST_CASE("singular measures") {
    const QuadMeasure line = singular_alpha_measure(2, 1.0, 64);
    CHECK(line.total_mass() == doctest::Approx(2.0));
    for (std::size_t i = 0; i < line.size(); ++i) CHECK(line.point(i)[0] == 0.0);

    const QuadMeasure mu = singular_alpha_measure(2, 1.5, 512);
    CHECK(std::abs(mu.total_mass() - singular_mass_15()) < 1e-3 * singular_mass_15());
    for (std::size_t i = 0; i < mu.size(); ++i) CHECK(mu.point(i).norm() <= 1.0);

    CHECK_THROWS_AS(singular_alpha_measure(2, 0.0, 64), Error);
    CHECK_THROWS_AS(singular_alpha_measure(2, 2.5, 64), Error);
    CHECK_THROWS_AS(singular_alpha_measure(4, 3.5, 64), Error);
}

TEST_CASE("singular measure converges with resolution") {
    double prev_gap = INFINITY;
    for (int res : {64, 128, 256, 512}) {
        const double gap = std::abs(singular_alpha_measure(2, 1.5, res).total_mass() - singular_mass_15());
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("windowed singular mass follows the rectangle exponent") {
    const double rho = 0.25;
    std::vector<double> xs, ys;
    for (double lambda : {16.0, 64.0, 256.0, 1024.0}) {
        Window w{Eigen::Vector2d(std::pow(lambda, -1 + rho), std::pow(lambda, -1 + 2 * rho))};
        const QuadMeasure mu = singular_alpha_measure(2, 1.5, 64, w);
        // Exact: 4 sqrt(w_0) * 2 w_1.
        CHECK(mu.total_mass() == doctest::Approx(8.0 * std::sqrt(w.half_width[0]) * w.half_width[1]).epsilon(1e-10));
        xs.push_back(std::log(lambda));
        ys.push_back(std::log(mu.total_mass()));
    }
    const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
    CHECK(slope == doctest::Approx(-1.5 + 2.5 * rho).epsilon(1e-9));
}

TEST_CASE("pushforward integrates the composed function") {
    const QuadMeasure mu = sphere_measure(3, 16);
    Eigen::Matrix3d L;
    L << 1, 2, 0, 0, 1, -1, 0.5, 0, 3;
    const QuadMeasure pf = pushforward_measure(mu, L, 0.7);
    auto f = [](const Eigen::VectorXd& x) { return std::cos(x[0]) + x[1] * x[2]; };
    const double lhs = weighted(pf, f);
    const double rhs = 0.7 * weighted(mu, [&](const Eigen::VectorXd& x) { return f(L.transpose() * x); });
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    CHECK_FALSE(pf.c_mu.has_value());
    CHECK_THROWS_AS(pushforward_measure(mu, Eigen::Matrix2d::Identity(), 1.0), Error);
    CHECK_THROWS_AS(pushforward_measure(mu, L, -1.0), Error);
}

TEST_CASE("scaled measure") {
    const QuadMeasure mu = sphere_measure(2, 64);
    const TypeTuple a({1, 2});
    const int ell = 3;
    const QuadMeasure sc = scaled_measure(mu, a, ell, 1.0);
    CHECK(sc.total_mass() == doctest::Approx(mu.total_mass() / 8.0));
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(sc.point(i)[0] == mu.point(i)[0] / 8.0);
        CHECK(sc.point(i)[1] == mu.point(i)[1] / 64.0);
    }
    CHECK_THROWS_AS(scaled_measure(mu, TypeTuple({1, 2, 3}), 1, 1.0), Error);
}

TEST_CASE("dimension audits") {
    const QuadMeasure circle = sphere_measure(2, 1024);
    const AuditResult ac = dimension_audit(circle, 1.0, 2000, 3);
    CHECK(ac.value > 1.0);
    CHECK(ac.value <= 2 * M_PI + 1);
    CHECK(ac.r_floor == doctest::Approx(4 * circle.spacing));

    // A one-dimensional measure audited at a larger exponent blows up as the floor shrinks.
    const double coarse = dimension_audit(sphere_measure(2, 128), 1.5, 2000, 3).value;
    const double fine = dimension_audit(sphere_measure(2, 4096), 1.5, 2000, 3).value;
    CHECK(fine > 2.0 * coarse);

    const AuditResult as = dimension_audit(singular_alpha_measure(2, 1.5, 256), 1.5, 4000, 5);
    CHECK(as.value <= 10.0);

    const QuadMeasure mu = singular_alpha_measure(2, 1.5, 128);
    for (int ell = 0; ell <= 5; ++ell) {
        const QuadMeasure sc = scaled_measure(mu, TypeTuple({1, 2}), ell, kappa(TypeTuple({1, 2}), 1.5));
        CHECK(dimension_audit(sc, 1.5, 1000, 9).value <= 20.0);
    }
    CHECK_THROWS_AS(dimension_audit(circle, 1.0, 10, 1), Error);
}

TEST_CASE("sphere integrals converge with resolution") {
    auto f = [](const Eigen::VectorXd& x) { return std::exp(x[0] + 0.5 * x[1] * x[2]); };
    const double coarse = weighted(sphere_measure(3, 24), f);
    const double fine = weighted(sphere_measure(3, 48), f);
    CHECK(std::abs(coarse - fine) < 1e-4);
}

TEST_CASE("submanifold blocks and stationary set") {
    const Curve m = Curve::moment(4);
    const Submanifold sub = submanifold_builder(4, 2, m, 1.0, 8);
    CHECK(sub.l == 2);
    CHECK(sub.measure.dim == 4);
    CHECK(sub.measure.alpha == 2.0);
    for (double t : {-0.5, 0.0, 0.3, 0.9}) {
        const Eigen::MatrixXd jet = sub.curve.jet(t, 4);
        Eigen::MatrixXd full(4, 4);
        full << sub.a1(t), sub.a2(t), sub.b1(t), sub.b2(t);
        CHECK((full - jet.block(0, 1, 4, 4)).norm() < 1e-13);

        // The first l mixed derivatives vanish on y = (t, ..., t).
        const Eigen::VectorXd y = sub.g(t);
        for (int j = 1; j <= sub.l; ++j) CHECK(sub.mixed(y, t, j).norm() < 1e-10);
        // The next k form the Schur complement B2 - B1 A1^{-1} A2.
        Eigen::MatrixXd s(2, 2);
        for (int j = 0; j < 2; ++j) s.col(j) = sub.mixed(y, t, sub.l + 1 + j);
        const Eigen::MatrixXd schur = sub.b2(t) - sub.b1(t) * sub.a1(t).inverse() * sub.a2(t);
        CHECK((s - schur).norm() < 1e-10);
        CHECK(s.determinant() == doctest::Approx(full.determinant() / sub.a1(t).determinant()));
    }
}

TEST_CASE("submanifold graph derivatives") {
    const Submanifold sub = submanifold_builder(4, 2, Curve::moment(4), 1.0, 8);
    CHECK(sub.patch.values(Eigen::Vector2d::Zero()).norm() < 1e-15);
    const double h = 1e-5;
    for (int n = 0; n < 10; ++n) {
        const Eigen::Vector2d y(test::uniform(-0.8, 0.8), test::uniform(-0.8, 0.8));
        const Eigen::MatrixXd g = sub.patch.gradients(y);
        for (int i = 0; i < 2; ++i) {
            const Eigen::Vector2d e = Eigen::Vector2d::Unit(i) * h;
            const Eigen::VectorXd fd = (sub.patch.values(y + e) - sub.patch.values(y - e)) / (2 * h);
            CHECK((fd - g.row(i).transpose()).norm() < 1e-8);
        }
        const Eigen::MatrixXd H = sub.patch.hessian(y, 1);
        const Eigen::Vector2d e = Eigen::Vector2d::Unit(0) * h;
        const Eigen::VectorXd fd = (sub.patch.gradients(y + e).col(1) - sub.patch.gradients(y - e).col(1)) / (2 * h);
        CHECK((fd - H.col(0)).norm() < 1e-7);
    }
    CHECK_THROWS_AS(submanifold_builder(4, 1, Curve::moment(4), 1.0, 8), Error);
}

}  // TEST_SUITE
