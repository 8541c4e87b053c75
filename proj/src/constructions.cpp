#include "rlab/constructions.hpp"

#include "rlab/error.hpp"
#include "rlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>

namespace rlab {

double Parallelepiped::volume() const {
    double v = 1.0;
    for (Eigen::Index i = 0; i < half_widths.size(); ++i) v *= 2.0 * half_widths[i];
    return v / std::abs(transform.determinant());
}

bool Parallelepiped::contains(const Eigen::VectorXd& y, double rel_tol) const {
    const Eigen::VectorXd u = transform.transpose() * (y - center);
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > half_widths[i] * (1.0 + rel_tol)) return false;
    return true;
}

Eigen::VectorXd Parallelepiped::from_rect(const Eigen::VectorXd& u) const {
    return center + transform.transpose().partialPivLu().solve(u);
}

std::vector<Eigen::VectorXd> Parallelepiped::corners() const {
    const int m = dim();
    std::vector<Eigen::VectorXd> out;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        Eigen::VectorXd u(m);
        for (int i = 0; i < m; ++i) u[i] = (mask >> i & 1u) ? half_widths[i] : -half_widths[i];
        out.push_back(from_rect(u));
    }
    return out;
}

namespace {

int default_rho_dim(const PhaseSpec& phase, const BoxShape& shape) { return shape.first_order - 1 + phase.y_dim(); }

double resolve_rho(const PhaseSpec& phase, const BoxShape& shape) {
    return shape.rho > 0.0 ? shape.rho : 1.0 / (2.0 * default_rho_dim(phase, shape));
}

std::string at_t(double t) { return " at t=" + std::to_string(t); }

}  // namespace

Eigen::VectorXd solve_stationary(const PhaseSpec& phase, double t) {
    const GraphPatch* patch = phase.patch();
    if (patch && patch->is_sphere_cap()) {
        const Eigen::VectorXd v1 = phase.lift_curve().derivative(t, 1);
        const double normal = v1[patch->output_coords()[0]];
        if (std::abs(normal) > 1e-14) {
            const auto base = patch->base_coords();
            Eigen::VectorXd v(static_cast<Eigen::Index>(base.size()));
            for (std::size_t i = 0; i < base.size(); ++i) v[static_cast<Eigen::Index>(i)] = -v1[base[i]] / normal;
            return v / std::sqrt(1.0 + v.squaredNorm());
        }
    }
    return solve_stationary(phase, t, Eigen::VectorXd::Zero(phase.y_dim()));
}

Eigen::VectorXd solve_stationary(const PhaseSpec& phase, double t, const Eigen::VectorXd& seed) {
    Eigen::VectorXd y = seed;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd residual;
        Eigen::MatrixXd jac;
        try {
            residual = phase.mixed(y, t, 1);
            if (residual.norm() <= 1e-12) return y;
            jac = phase.mixed_hessian(y, t);
        } catch (const Error& e) {
            fail(ErrorKind::StationarySolve, std::string("Newton left the chart") + at_t(t) + ": " + e.what());
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) fail(ErrorKind::StationarySolve, "singular Jacobian" + at_t(t));
        y -= lu.solve(residual);
    }
    fail(ErrorKind::StationarySolve, "Newton did not converge in 50 iterations" + at_t(t));
}

Eigen::MatrixXd curvature_matrix(const PhaseSpec& phase, double t, const Eigen::VectorXd& y, int first_order) {
    const int m = phase.y_dim();
    Eigen::MatrixXd out(m, m);
    for (int j = 0; j < m; ++j) out.col(j) = phase.mixed(y, t, first_order + j);
    return out;
}

Eigen::MatrixXd curvature_matrix(const PhaseSpec& phase, double t) {
    const Eigen::MatrixXd m = curvature_matrix(phase, t, solve_stationary(phase, t), 2);
    if (std::abs(m.determinant()) < 1e-8) fail(ErrorKind::Degeneracy, "curvature matrix is singular" + at_t(t));
    return m;
}

namespace {

Parallelepiped box_at(const Eigen::VectorXd& center, const Eigen::MatrixXd& m, double lambda, double c, int first_order,
                      double rho) {
    if (!(c > 0.0)) fail(ErrorKind::Argument, "box constant must be positive");
    if (std::abs(m.determinant()) < 1e-8) fail(ErrorKind::Degeneracy, "curvature matrix is singular");
    Parallelepiped box{center, m, Eigen::VectorXd(m.cols())};
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        box.half_widths[j] = c * std::pow(lambda, -1.0 + static_cast<double>(first_order + j) * rho);
    return box;
}

}  // namespace

Parallelepiped knapp_box(const PhaseSpec& phase, double t_k, double lambda, double c, const BoxShape& shape) {
    const Eigen::VectorXd y = solve_stationary(phase, t_k);
    return box_at(y, curvature_matrix(phase, t_k, y, shape.first_order), lambda, c, shape.first_order,
                  resolve_rho(phase, shape));
}

double reduced_phase(const PhaseSpec& phase, const Eigen::VectorXd& y, double t, const Eigen::VectorXd& y_k,
                     double t_k) {
    return phase.value(y, t) - phase.value(y_k, t) - phase.mixed(y_k, t_k, 0).dot(y - y_k);
}

double sampled_phase_max(const PhaseSpec& phase, const Parallelepiped& box, double t_k, double t0, double t1,
                         int samples) {
    const int m = box.dim();
    const int per_axis = m <= 2 ? samples : 9;
    const Curve& gamma = phase.lift_curve();
    std::vector<Eigen::VectorXd> gam;
    for (int s = 0; s < samples; ++s) gam.push_back(gamma(t0 + (t1 - t0) * s / (samples - 1)));
    const Eigen::VectorXd lk = phase.lift(box.center);
    const Eigen::VectorXd grad = phase.mixed(box.center, t_k, 0);

    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(per_axis);
    double worst = 0.0;
    Eigen::VectorXd u(m);
    for (std::size_t n = 0; n < count; ++n) {
        std::size_t r = n;
        for (int i = 0; i < m; ++i) {
            const auto s = static_cast<int>(r % static_cast<std::size_t>(per_axis));
            r /= static_cast<std::size_t>(per_axis);
            u[i] = box.half_widths[i] * (-1.0 + 2.0 * s / (per_axis - 1));
        }
        const Eigen::VectorXd y = box.from_rect(u);
        Eigen::VectorXd dl;
        try {
            dl = phase.lift(y) - lk;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
        const double lin = grad.dot(y - box.center);
        for (const auto& g : gam) worst = std::max(worst, std::abs(dl.dot(g) - lin));
    }
    return worst;
}

namespace {

template <class MakeBox, class Measure>
Calibration dyadic_search(double lambda, double threshold, MakeBox&& make_box, Measure&& measure) {
    const double bound = threshold / lambda;
    double c = 1.0;
    for (int e = 0; e <= 20; ++e, c *= 0.5) {
        const double v = measure(make_box(c));
        if (v <= bound) return {c, v, bound};
    }
    fail(ErrorKind::Calibration, "no admissible box constant down to 2^-20 at lambda=" + std::to_string(lambda));
}

}  // namespace

Calibration calibrate_c(const PhaseSpec& phase, double t_k, double lambda, const CalibrationOptions& opts) {
    const double rho = resolve_rho(phase, opts.shape);
    auto [t0, t1] = opts.interval.value_or(std::pair{t_k - std::pow(lambda, -rho), t_k});
    t0 = std::max(t0, phase.lift_curve().t_lo());
    t1 = std::min(t1, phase.lift_curve().t_hi());
    const Eigen::VectorXd y = solve_stationary(phase, t_k);
    const Eigen::MatrixXd m = curvature_matrix(phase, t_k, y, opts.shape.first_order);
    return dyadic_search(
        lambda, opts.threshold, [&](double c) { return box_at(y, m, lambda, c, opts.shape.first_order, rho); },
        [&](const Parallelepiped& b) { return sampled_phase_max(phase, b, t_k, t0, t1, opts.samples); });
}

PartitionFamily partition_family(const PhaseSpec& phase, double delta, double lambda, const BoxShape& shape) {
    const int d = default_rho_dim(phase, shape);
    const double count = delta * std::pow(lambda, 1.0 / (2.0 * d));
    if (!(count >= 1.0))
        fail(ErrorKind::Argument, "partition needs delta * lambda^{1/(2d)} >= 1, got " + std::to_string(count));
    const auto ell = static_cast<std::size_t>(std::llround(count));
    PartitionFamily part;
    part.delta = delta;
    part.lambda = lambda;
    for (std::size_t k = 0; k < ell; ++k) {
        const double a = delta * static_cast<double>(k) / static_cast<double>(ell);
        const double b = k + 1 == ell ? delta : delta * static_cast<double>(k + 1) / static_cast<double>(ell);
        part.intervals.emplace_back(a, b);
        part.t.push_back(b);
        try {
            const Eigen::VectorXd y = solve_stationary(phase, b);
            part.y.push_back(y);
            part.lift.push_back(phase.lift(y));
            part.curvature.push_back(curvature_matrix(phase, b, y, shape.first_order));
        } catch (const Error& e) {
            fail(e.kind(), "interval " + std::to_string(k) + ": " + e.what());
        }
    }
    return part;
}

TestFunction knapp_input(double t0, double lambda, double rho, const std::optional<CurvePhase>& modulation) {
    Segment s;
    s.start = t0;
    s.end = t0 + std::pow(lambda, -rho);
    s.modulation = modulation;
    return TestFunction({s});
}

TestFunction bump_input(const Curve& curve, double lambda, const Eigen::VectorXd& x0, double eps0) {
    if (x0.size() != curve.dim()) fail(ErrorKind::Argument, "bump centre has wrong dimension");
    Segment s;
    s.start = curve.t_lo();
    s.end = curve.t_lo() + eps0;
    s.modulation = CurvePhase{x0, lambda};
    return TestFunction({s});
}

TestFunction interval_input(const PartitionFamily& part, std::size_t k) {
    Segment s;
    s.start = part.intervals.at(k).first;
    s.end = part.intervals[k].second;
    s.modulation = CurvePhase{part.lift[k], part.lambda};
    return TestFunction({s});
}

std::vector<int> rademacher_signs(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<int> out(count);
    for (auto& s : out) s = (gen() >> 63) ? 1 : -1;
    return out;
}

TestFunction random_sign_input(const PartitionFamily& part, std::uint64_t seed) {
    const std::vector<int> signs = rademacher_signs(part.size(), seed);
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < part.size(); ++k) {
        Segment s = interval_input(part, k).segments().front();
        s.sign = signs[k];
        segs.push_back(std::move(s));
    }
    return TestFunction(std::move(segs));
}

namespace {

Eigen::MatrixXd nested_frame(const Curve& curve, double t0, const TypeTuple& a) {
    const int d = curve.dim();
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i) g.col(i) = curve.derivative(t0, a[i]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    for (int j = 0; j < d; ++j) {
        if (std::abs(r(j, j)) <= 1e-10 * std::max(g.col(j).norm(), 1e-300))
            fail(ErrorKind::Frame, "derivative columns are rank deficient");
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    // v_i = q_{d+1-i}: v_i is orthogonal to the first d-i columns.
    Eigen::MatrixXd v(d, d);
    for (int i = 0; i < d; ++i) v.col(i) = q.col(d - 1 - i);
    return v;
}

}  // namespace

NecessityRect necessity_rect_sphere(const Curve& curve, double t0, double lambda, double rho, double c) {
    const int d = curve.dim();
    const TypeTuple a = detect_type(curve, t0);
    if (!(rho > 0.0 && rho * (2.0 * a.back() - a[0]) < 1.0))
        fail(ErrorKind::Argument, "rho must lie in (0, 1/(2 a_d - a_1))");
    if (!(c > 0.0)) fail(ErrorKind::Argument, "box constant must be positive");
    const Eigen::MatrixXd v = nested_frame(curve, t0, a);
    Curve shifted = curve.compose(v.transpose(), 1.0, t0, true);
    PhaseSpec phase = PhaseSpec::graph(shifted, sphere_cap_graph(d, d - 1), true, Amplitude::none(d - 1));
    Parallelepiped box{Eigen::VectorXd::Zero(d - 1), Eigen::MatrixXd::Identity(d - 1, d - 1), Eigen::VectorXd(d - 1)};
    for (int i = 0; i < d - 1; ++i) box.half_widths[i] = c * std::pow(lambda, -1.0 + rho * a[d - 1 - i]);
    return NecessityRect{a, v, std::move(box), std::move(shifted), std::move(phase), rho};
}

double necessity_phase_max(const NecessityRect& rect, double lambda, int samples) {
    return sampled_phase_max(rect.phase, rect.box, 0.0, 0.0, std::pow(lambda, -rect.rho), samples);
}

Calibration calibrate_necessity(const Curve& curve, double t0, double lambda, double rho, double threshold,
                                int samples) {
    return dyadic_search(
        lambda, threshold, [&](double c) { return necessity_rect_sphere(curve, t0, lambda, rho, c); },
        [&](const NecessityRect& r) { return necessity_phase_max(r, lambda, samples); });
}

PhaseSpec submanifold_phase(const Submanifold& sub) {
    return PhaseSpec::graph(sub.curve, sub.patch, false, Amplitude::none(sub.k));
}

std::vector<KdimBox> kdim_boxes(const Submanifold& sub, double lambda, double c, double delta) {
    const PhaseSpec phase = submanifold_phase(sub);
    const double rho = 1.0 / (2.0 * sub.d);
    const double count = delta * std::pow(lambda, rho);
    if (!(count >= 1.0)) fail(ErrorKind::Argument, "partition needs delta * lambda^{1/(2d)} >= 1");
    const auto ell = static_cast<std::size_t>(std::llround(count));
    std::vector<KdimBox> out;
    for (std::size_t m = 0; m < ell; ++m) {
        const double a = delta * static_cast<double>(m) / static_cast<double>(ell);
        const double b = m + 1 == ell ? delta : delta * static_cast<double>(m + 1) / static_cast<double>(ell);
        const Eigen::VectorXd g = sub.g(b);
        const Eigen::MatrixXd mat = curvature_matrix(phase, b, g, sub.l + 1);
        out.push_back({a, b, b, box_at(g, mat, lambda, c, sub.l + 1, rho)});
    }
    return out;
}

Calibration calibrate_kdim(const Submanifold& sub, double lambda, double delta, double threshold) {
    const PhaseSpec phase = submanifold_phase(sub);
    return dyadic_search(
        lambda, threshold, [&](double c) { return kdim_boxes(sub, lambda, c, delta); },
        [&](const std::vector<KdimBox>& boxes) {
            double worst = 0.0;
            for (const auto& b : boxes) worst = std::max(worst, sampled_phase_max(phase, b.box, b.t_m, b.t0, b.t1));
            return worst;
        });
}

QuadMeasure graph_box_measure(const Parallelepiped& box, const GraphPatch* patch, int n_per_axis) {
    const int m = box.dim();
    if (patch && patch->base_dim() != m) fail(ErrorKind::Argument, "patch and box dimensions differ");
    const GaussRule g = gauss_legendre(n_per_axis);
    double gap = std::max(g.nodes.front() + 1.0, 1.0 - g.nodes.back());
    for (std::size_t i = 1; i < g.nodes.size(); ++i) gap = std::max(gap, g.nodes[i] - g.nodes[i - 1]);

    QuadMeasure mu;
    mu.dim = m;
    mu.alpha = m;
    mu.provenance = !patch ? Provenance::Hyperplane : patch->is_sphere_cap() ? Provenance::Sphere : Provenance::Submanifold;
    mu.resolution = n_per_axis;
    const Eigen::MatrixXd inv_t = box.transform.transpose().inverse();
    const double jac = std::abs(inv_t.determinant());
    mu.spacing = (inv_t * (gap * box.half_widths)).norm();

    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(n_per_axis);
    Eigen::VectorXd u(m);
    for (std::size_t n = 0; n < count; ++n) {
        std::size_t r = n;
        double w = jac;
        for (int i = m - 1; i >= 0; --i) {
            const auto s = r % static_cast<std::size_t>(n_per_axis);
            r /= static_cast<std::size_t>(n_per_axis);
            u[i] = box.half_widths[i] * g.nodes[s];
            w *= box.half_widths[i] * g.weights[s];
        }
        const Eigen::VectorXd y = box.center + inv_t * u;
        if (patch) {
            const Eigen::MatrixXd gr = patch->gradients(y);
            w *= std::sqrt((Eigen::MatrixXd::Identity(m, m) + gr * gr.transpose()).determinant());
        }
        mu.nodes.insert(mu.nodes.end(), y.data(), y.data() + m);
        mu.weights.push_back(w);
    }
    return mu;
}

QuadMeasure embed_measure(const QuadMeasure& y_measure, const GraphPatch& patch, bool with_offset) {
    if (y_measure.dim != patch.base_dim()) fail(ErrorKind::Argument, "measure is not in the patch base");
    QuadMeasure mu = y_measure;
    mu.dim = patch.ambient_dim();
    mu.alpha = patch.base_dim();
    mu.nodes.clear();
    double stretch = 1.0;
    for (std::size_t i = 0; i < y_measure.size(); ++i) {
        const Eigen::VectorXd y = y_measure.point(i);
        const Eigen::VectorXd x = patch.embed(y, with_offset);
        mu.nodes.insert(mu.nodes.end(), x.data(), x.data() + x.size());
        const Eigen::MatrixXd gr = patch.gradients(y);
        stretch = std::max(stretch, std::sqrt(1.0 + gr.squaredNorm()));
    }
    mu.spacing = y_measure.spacing * stretch;
    return mu;
}

void write_box_csv(std::ostream& os, const std::vector<BoxRow>& rows) {
    const int m = rows.empty() ? 0 : rows.front().box.dim();
    os << "k,t_k";
    for (int i = 1; i <= m; ++i) os << ",center_" << i;
    for (int i = 1; i <= m; ++i) os << ",half_width_" << i;
    os << ",volume,calibrated_c\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        os << buf;
    };
    for (const auto& r : rows) {
        os << r.k;
        put(r.t_k);
        for (int i = 0; i < m; ++i) put(r.box.center[i]);
        for (int i = 0; i < m; ++i) put(r.box.half_widths[i]);
        put(r.box.volume());
        put(r.c);
        os << '\n';
    }
}

}  // namespace rlab
