#include "rlab/measure.hpp"

#include "rlab/error.hpp"
#include "rlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace rlab {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Sphere: return "sphere";
        case Provenance::Hyperplane: return "hyperplane";
        case Provenance::Singular: return "singular";
        case Provenance::Pushforward: return "pushforward";
        case Provenance::Scaled: return "scaled";
        case Provenance::Submanifold: return "submanifold";
    }
    return "?";
}

double QuadMeasure::total_mass() const { return pairwise_sum(weights); }

double QuadMeasure::sum_terms(std::span<const double> terms) { return pairwise_sum(terms); }

GraphPatch::GraphPatch(std::shared_ptr<const GraphFunctions> fns, int ambient_dim, std::vector<int> output_coords,
                       std::vector<double> offsets)
    : fns_(std::move(fns)), ambient_(ambient_dim), outputs_(std::move(output_coords)), offsets_(std::move(offsets)) {
    if (static_cast<int>(outputs_.size()) != fns_->output_count() || offsets_.size() != outputs_.size())
        fail(ErrorKind::Argument, "graph patch output layout mismatch");
    if (fns_->base_dim() + fns_->output_count() != ambient_)
        fail(ErrorKind::Argument, "graph patch dimensions do not add up");
    std::vector<bool> used(static_cast<std::size_t>(ambient_), false);
    for (int c : outputs_) {
        if (c < 0 || c >= ambient_ || used[static_cast<std::size_t>(c)])
            fail(ErrorKind::Argument, "bad graph output coordinate");
        used[static_cast<std::size_t>(c)] = true;
    }
    for (int c = 0; c < ambient_; ++c)
        if (!used[static_cast<std::size_t>(c)]) base_.push_back(c);
}

void GraphPatch::check(const Eigen::VectorXd& y) const {
    if (y.size() != base_dim()) fail(ErrorKind::Argument, "graph point has wrong dimension");
    if (!fns_->in_domain(y)) fail(ErrorKind::Domain, "point outside the graph chart");
}

Eigen::VectorXd GraphPatch::values(const Eigen::VectorXd& y) const {
    check(y);
    return fns_->values(y);
}

Eigen::MatrixXd GraphPatch::gradients(const Eigen::VectorXd& y) const {
    check(y);
    return fns_->gradients(y);
}

Eigen::MatrixXd GraphPatch::hessian(const Eigen::VectorXd& y, int j) const {
    check(y);
    return fns_->hessian(y, j);
}

Eigen::VectorXd GraphPatch::embed(const Eigen::VectorXd& y, bool with_offset) const {
    const Eigen::VectorXd v = values(y);
    Eigen::VectorXd x(ambient_);
    for (std::size_t j = 0; j < outputs_.size(); ++j)
        x[outputs_[j]] = v[static_cast<Eigen::Index>(j)] - (with_offset ? offsets_[j] : 0.0);
    for (std::size_t i = 0; i < base_.size(); ++i) x[base_[i]] = y[static_cast<Eigen::Index>(i)];
    return x;
}

Eigen::MatrixXd GraphPatch::embed_jacobian(const Eigen::VectorXd& y) const {
    const Eigen::MatrixXd g = gradients(y);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(ambient_, base_dim());
    for (std::size_t j = 0; j < outputs_.size(); ++j) jac.row(outputs_[j]) = g.col(static_cast<Eigen::Index>(j)).transpose();
    for (std::size_t i = 0; i < base_.size(); ++i) jac(base_[i], static_cast<Eigen::Index>(i)) = 1.0;
    return jac;
}

namespace {

class SphereCap final : public GraphFunctions {
public:
    explicit SphereCap(int m) : m_(m) {}
    int base_dim() const override { return m_; }
    int output_count() const override { return 1; }
    bool in_domain(const Eigen::VectorXd& y) const override { return y.squaredNorm() < 1.0; }
    Eigen::VectorXd values(const Eigen::VectorXd& y) const override {
        const double r2 = y.squaredNorm();
        // 1 - sqrt(1 - r2) without cancellation
        return Eigen::VectorXd::Constant(1, r2 / (1.0 + std::sqrt(1.0 - r2)));
    }
    Eigen::MatrixXd gradients(const Eigen::VectorXd& y) const override {
        return y / std::sqrt(1.0 - y.squaredNorm());
    }
    Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int) const override {
        const double s = 1.0 - y.squaredNorm();
        return Eigen::MatrixXd::Identity(m_, m_) / std::sqrt(s) + y * y.transpose() / (s * std::sqrt(s));
    }
    bool is_sphere_cap() const override { return true; }

private:
    int m_;
};

double angular_spacing_s2(const GaussRule& polar, int azimuth) {
    std::vector<double> theta(polar.nodes.size());
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::acos(polar.nodes[j]);
    std::sort(theta.begin(), theta.end());
    double gap = std::max(theta.front(), M_PI - theta.back());
    for (std::size_t j = 1; j < theta.size(); ++j) gap = std::max(gap, theta[j] - theta[j - 1]);
    return std::max(gap, 2.0 * M_PI / azimuth);
}

}  // namespace

GraphPatch sphere_cap_graph(int d, int output_coord) {
    if (d < 2) fail(ErrorKind::Argument, "sphere cap needs d >= 2");
    return GraphPatch(std::make_shared<SphereCap>(d - 1), d, {output_coord}, {1.0});
}

QuadMeasure sphere_measure(int d, int resolution) {
    if (d != 2 && d != 3) fail(ErrorKind::Capability, "sphere quadrature supports d = 2, 3 only");
    if (resolution < 8) fail(ErrorKind::Argument, "sphere resolution must be at least 8");
    QuadMeasure mu;
    mu.dim = d;
    mu.alpha = d - 1;
    mu.provenance = Provenance::Sphere;
    mu.resolution = resolution;
    if (d == 2) {
        const auto n = static_cast<std::size_t>(resolution);
        mu.nodes.resize(2 * n);
        mu.weights.assign(n, 2.0 * M_PI / resolution);
        for (std::size_t m = 0; m < n; ++m) {
            const double th = 2.0 * M_PI * static_cast<double>(m) / resolution;
            mu.nodes[2 * m] = std::cos(th);
            mu.nodes[2 * m + 1] = std::sin(th);
        }
        mu.spacing = 2.0 * M_PI / resolution;
        mu.c_mu = M_PI;
        return mu;
    }
    const GaussRule polar = gauss_legendre(resolution);
    const int az = 2 * resolution;
    mu.nodes.reserve(static_cast<std::size_t>(3 * resolution * az));
    mu.weights.reserve(static_cast<std::size_t>(resolution * az));
    for (int j = 0; j < resolution; ++j) {
        const double u = polar.nodes[static_cast<std::size_t>(j)];
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        const double w = polar.weights[static_cast<std::size_t>(j)] * 2.0 * M_PI / az;
        for (int m = 0; m < az; ++m) {
            const double ph = 2.0 * M_PI * m / az;
            mu.nodes.push_back(s * std::cos(ph));
            mu.nodes.push_back(s * std::sin(ph));
            mu.nodes.push_back(u);
            mu.weights.push_back(w);
        }
    }
    mu.spacing = angular_spacing_s2(polar, az);
    return mu;
}

double required_spacing(int d, double lambda) {
    return d == 3 ? 1.0 / (8.0 * lambda) : 2.0 * M_PI / (10.0 * lambda);
}

int sphere_resolution_for(int d, double lambda) {
    if (d == 2) return std::max(8, static_cast<int>(std::ceil(10.0 * lambda - 1e-9)));
    if (d != 3) fail(ErrorKind::Capability, "sphere quadrature supports d = 2, 3 only");
    const double target = required_spacing(3, lambda);
    int n = std::max(8, static_cast<int>(std::floor(M_PI / target)) - 1);
    while (angular_spacing_s2(gauss_legendre(n), 2 * n) > target) n += std::max(1, n / 200);
    return n;
}

QuadMeasure hyperplane_measure(const Eigen::VectorXd& c_normal, double extent, int resolution) {
    const int d = static_cast<int>(c_normal.size());
    if (d < 2) fail(ErrorKind::Argument, "hyperplane needs d >= 2");
    if (!c_normal.allFinite() || c_normal.cwiseAbs().maxCoeff() == 0.0) fail(ErrorKind::Argument, "zero normal");
    if (!(extent > 0) || resolution < 1) fail(ErrorKind::Argument, "bad hyperplane grid");
    int k = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(c_normal[i]) > std::abs(c_normal[k])) k = i;
    Eigen::VectorXd h(d - 1);
    for (int i = 0, r = 0; i < d; ++i)
        if (i != k) h[r++] = -c_normal[i] / c_normal[k];
    const double cell = 2.0 * extent / resolution;
    const double area = std::sqrt(1.0 + h.squaredNorm());
    const int m = d - 1;
    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(resolution);

    QuadMeasure mu;
    mu.dim = d;
    mu.alpha = d - 1;
    mu.provenance = Provenance::Hyperplane;
    mu.resolution = resolution;
    mu.nodes.resize(count * static_cast<std::size_t>(d));
    mu.weights.assign(count, area * std::pow(cell, m));
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    Eigen::VectorXd xbar(m);
    for (std::size_t n = 0; n < count; ++n) {
        for (int i = 0; i < m; ++i) xbar[i] = -extent + (idx[static_cast<std::size_t>(i)] + 0.5) * cell;
        double* x = mu.nodes.data() + n * static_cast<std::size_t>(d);
        for (int i = 0, r = 0; i < d; ++i) x[i] = i == k ? h.dot(xbar) : xbar[r++];
        for (int i = m - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < resolution) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    mu.spacing = cell * std::sqrt(static_cast<double>(m)) * area;
    return mu;
}

QuadMeasure coordinate_box_measure(const Eigen::VectorXd& center, const Eigen::VectorXd& half_width, int resolution) {
    const int m = static_cast<int>(center.size());
    if (m < 1 || half_width.size() != m || resolution < 1) fail(ErrorKind::Argument, "bad box grid");
    if ((half_width.array() <= 0).any()) fail(ErrorKind::Argument, "box half-widths must be positive");
    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(resolution);
    const Eigen::VectorXd cell = 2.0 * half_width / resolution;
    QuadMeasure mu;
    mu.dim = m;
    mu.alpha = m;
    mu.provenance = Provenance::Hyperplane;
    mu.resolution = resolution;
    mu.nodes.resize(count * static_cast<std::size_t>(m));
    mu.weights.assign(count, cell.prod());
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    for (std::size_t n = 0; n < count; ++n) {
        double* x = mu.nodes.data() + n * static_cast<std::size_t>(m);
        for (int i = 0; i < m; ++i) x[i] = center[i] - half_width[i] + (idx[static_cast<std::size_t>(i)] + 0.5) * cell[i];
        for (int i = m - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < resolution) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    mu.spacing = cell.norm();
    return mu;
}

namespace {

// int_a^b |s|^beta ds and int_a^b s |s|^beta ds for a cell not straddling 0.
std::pair<double, double> power_moments(double a, double b, double beta) {
    const double sign = b <= 0.0 ? -1.0 : 1.0;
    const double lo = std::min(std::abs(a), std::abs(b)), hi = std::max(std::abs(a), std::abs(b));
    const double m0 = (std::pow(hi, beta + 1) - std::pow(lo, beta + 1)) / (beta + 1);
    const double m1 = (std::pow(hi, beta + 2) - std::pow(lo, beta + 2)) / (beta + 2);
    return {m0, sign * m1};
}

}  // namespace

QuadMeasure singular_alpha_measure(int d, double alpha, int resolution, const std::optional<Window>& window) {
    if (d < 2 || d > 3) fail(ErrorKind::Capability, "singular measure supports d = 2, 3");
    if (!(alpha > d - 2) || alpha > d) fail(ErrorKind::Argument, "alpha must lie in (d-2, d]");
    if (resolution < 16) fail(ErrorKind::Argument, "singular measure resolution must be at least 16");
    const int c = static_cast<int>(std::ceil(alpha - 1e-12));
    const double beta = alpha - c;
    if (beta <= -1.0) fail(ErrorKind::Argument, "inconsistent singular exponent");
    const int sidx = d - c;  // singular coordinate, earlier ones vanish
    const int m = c - 1;     // free coordinates after it
    const int ns = resolution + (resolution % 2);

    double s_half = 1.0;
    if (window) {
        if (window->half_width.size() != d || (window->half_width.array() <= 0).any())
            fail(ErrorKind::Argument, "window must have d positive half-widths");
        double r2 = 0.0;
        for (int i = sidx; i < d; ++i) r2 += window->half_width[i] * window->half_width[i];
        if (r2 > 1.0) fail(ErrorKind::Argument, "window must lie inside the unit ball");
        s_half = window->half_width[sidx];
    }
    const double ds = 2.0 * s_half / ns;
    const int nz = std::max(2, resolution / 2);

    QuadMeasure mu;
    mu.dim = d;
    mu.alpha = alpha;
    mu.provenance = Provenance::Singular;
    mu.resolution = resolution;
    double zspace = 0.0;
    auto push = [&](double s, const double* z, double w) {
        for (int i = 0; i < sidx; ++i) mu.nodes.push_back(0.0);
        mu.nodes.push_back(s);
        for (int i = 0; i < m; ++i) mu.nodes.push_back(z[i]);
        mu.weights.push_back(w);
    };
    for (int cidx = 0; cidx < ns; ++cidx) {
        // Symmetric indexing keeps the middle edge exactly at 0.
        const double a = (cidx - ns / 2) * ds, b = (cidx + 1 - ns / 2) * ds;
        const auto [m0, m1] = power_moments(a, b, beta);
        if (m0 <= 0.0) continue;
        const double s = m1 / m0;
        if (m == 0) {
            push(s, nullptr, m0);
            continue;
        }
        if (window) {
            Eigen::VectorXd hw(m);
            for (int i = 0; i < m; ++i) hw[i] = window->half_width[sidx + 1 + i];
            const Eigen::VectorXd cell = 2.0 * hw / nz;
            zspace = std::max(zspace, cell.maxCoeff());
            double z[2];
            if (m == 1) {
                for (int i = 0; i < nz; ++i) {
                    z[0] = -hw[0] + (i + 0.5) * cell[0];
                    push(s, z, m0 * cell[0]);
                }
            } else {
                for (int i = 0; i < nz; ++i)
                    for (int j = 0; j < nz; ++j) {
                        z[0] = -hw[0] + (i + 0.5) * cell[0];
                        z[1] = -hw[1] + (j + 0.5) * cell[1];
                        push(s, z, m0 * cell.prod());
                    }
            }
            continue;
        }
        const double radius = std::sqrt(std::max(0.0, 1.0 - s * s));
        if (radius == 0.0) continue;
        double z[2];
        if (m == 1) {
            const double dz = 2.0 * radius / nz;
            zspace = std::max(zspace, dz);
            for (int i = 0; i < nz; ++i) {
                z[0] = -radius + (i + 0.5) * dz;
                push(s, z, m0 * dz);
            }
        } else {
            // polar rings of equal width
            const int nr = std::max(2, resolution / 4), nphi = std::max(8, resolution / 2);
            const double dr = radius / nr;
            zspace = std::max({zspace, dr, 2.0 * M_PI * radius / nphi});
            for (int i = 0; i < nr; ++i) {
                const double r_in = i * dr, r_out = (i + 1) * dr;
                const double area = M_PI * (r_out * r_out - r_in * r_in) / nphi;
                const double rc = std::sqrt(0.5 * (r_in * r_in + r_out * r_out));
                for (int j = 0; j < nphi; ++j) {
                    const double ph = 2.0 * M_PI * (j + 0.5) / nphi;
                    z[0] = rc * std::cos(ph);
                    z[1] = rc * std::sin(ph);
                    push(s, z, m0 * area);
                }
            }
        }
    }
    mu.spacing = std::sqrt(ds * ds + m * zspace * zspace);
    return mu;
}

QuadMeasure pushforward_measure(const QuadMeasure& mu, const Eigen::MatrixXd& linear_map, double mass_scale) {
    if (linear_map.rows() != mu.dim || linear_map.cols() != mu.dim)
        fail(ErrorKind::Argument, "pushforward map has wrong shape");
    if (!linear_map.allFinite() || !std::isfinite(mass_scale) || !(mass_scale > 0))
        fail(ErrorKind::Argument, "pushforward map and scale must be finite, scale positive");
    QuadMeasure out = mu;
    out.provenance = Provenance::Pushforward;
    const Eigen::MatrixXd lt = linear_map.transpose();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        Eigen::Map<Eigen::VectorXd> x(out.nodes.data() + i * static_cast<std::size_t>(mu.dim), mu.dim);
        x = lt * mu.point(i);
        out.weights[i] *= mass_scale;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(linear_map);
    out.spacing = mu.spacing * svd.singularValues()[0];
    out.c_mu.reset();
    return out;
}

QuadMeasure scaled_measure(const QuadMeasure& mu, const TypeTuple& a, int ell, double kappa_val) {
    if (a.dim() != mu.dim) fail(ErrorKind::Argument, "type tuple dimension mismatch");
    if (ell < 0) fail(ErrorKind::Argument, "ell must be nonnegative");
    QuadMeasure out = mu;
    out.provenance = Provenance::Scaled;
    std::vector<double> f(static_cast<std::size_t>(mu.dim));
    for (int i = 0; i < mu.dim; ++i) f[static_cast<std::size_t>(i)] = std::ldexp(1.0, -ell * a[i]);
    const double wscale = std::exp2(-ell * kappa_val);
    for (std::size_t n = 0; n < mu.size(); ++n) {
        for (int i = 0; i < mu.dim; ++i) out.nodes[n * static_cast<std::size_t>(mu.dim) + static_cast<std::size_t>(i)] *= f[static_cast<std::size_t>(i)];
        out.weights[n] *= wscale;
    }
    out.spacing = mu.spacing * f[0];
    return out;
}

AuditResult dimension_audit(const QuadMeasure& mu, double alpha, int n_samples, std::uint64_t seed) {
    if (mu.size() == 0) fail(ErrorKind::Argument, "empty measure");
    if (n_samples < 100) fail(ErrorKind::Argument, "audit needs at least 100 samples");
    if (!(alpha > 0)) fail(ErrorKind::Argument, "alpha must be positive");
    const int d = mu.dim;
    Eigen::VectorXd lo = mu.point(0), hi = mu.point(0);
    for (std::size_t i = 1; i < mu.size(); ++i) {
        lo = lo.cwiseMin(mu.point(i));
        hi = hi.cwiseMax(mu.point(i));
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const double diameter = (hi - lo).norm();
    const double r_floor = 4.0 * mu.spacing;
    const double r_top = std::max(diameter, r_floor);

    // Nodes sorted along the widest axis, so each ball query scans one slab.
    std::vector<std::size_t> order(mu.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return mu.node(x)[axis] < mu.node(y)[axis]; });
    std::vector<double> keys(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) keys[i] = mu.node(order[i])[axis];

    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    AuditResult res{0.0, r_floor, r_floor};
    Eigen::VectorXd x(d);
    for (int s = 0; s < n_samples; ++s) {
        const double r = r_floor * std::pow(r_top / r_floor, unit());
        const std::size_t pick = static_cast<std::size_t>(rng() % mu.size());
        for (int i = 0; i < d; ++i) x[i] = mu.node(pick)[i] + r * (unit() - 0.5);
        const auto first = std::lower_bound(keys.begin(), keys.end(), x[axis] - r) - keys.begin();
        const auto last = std::upper_bound(keys.begin(), keys.end(), x[axis] + r) - keys.begin();
        double mass = 0.0;
        const double r2 = r * r;
        for (auto j = first; j < last; ++j) {
            const std::size_t n = order[static_cast<std::size_t>(j)];
            if ((mu.point(n) - x).squaredNorm() <= r2) mass += mu.weights[n];
        }
        const double v = mass / std::pow(r, alpha);
        if (v > res.value) {
            res.value = v;
            res.r_at_sup = r;
        }
    }
    return res;
}

namespace {

class SubmanifoldGraph final : public GraphFunctions {
public:
    SubmanifoldGraph(Curve curve, int k, int l, double extent) : curve_(std::move(curve)), k_(k), l_(l), extent_(extent) {}

    int base_dim() const override { return k_; }
    int output_count() const override { return l_; }
    bool in_domain(const Eigen::VectorXd& y) const override {
        return y.cwiseAbs().maxCoeff() <= extent_ * (1.0 + 1e-12);
    }

    // -B1 A1^{-1} at parameter s, k x l.
    Eigen::MatrixXd entry(double s) const {
        const Eigen::MatrixXd j = curve_.jet(s, l_);
        const Eigen::MatrixXd a1 = j.block(0, 1, l_, l_);
        const Eigen::MatrixXd b1 = j.block(l_, 1, k_, l_);
        return -(a1.transpose().partialPivLu().solve(b1.transpose())).transpose();
    }

    Eigen::MatrixXd entry_derivative(double s) const {
        const Eigen::MatrixXd j = curve_.jet(s, l_ + 1);
        const Eigen::MatrixXd a1 = j.block(0, 1, l_, l_), da1 = j.block(0, 2, l_, l_);
        const Eigen::MatrixXd b1 = j.block(l_, 1, k_, l_), db1 = j.block(l_, 2, k_, l_);
        const Eigen::MatrixXd inv = a1.inverse();
        return -db1 * inv + b1 * inv * da1 * inv;
    }

    Eigen::VectorXd values(const Eigen::VectorXd& y) const override {
        const GaussRule& g = gauss32();
        Eigen::VectorXd out = Eigen::VectorXd::Zero(l_);
        for (int i = 0; i < k_; ++i) {
            const double half = 0.5 * y[i];
            if (half == 0.0) continue;
            for (int q = 0; q < g.size(); ++q) {
                const double s = half * (g.nodes[static_cast<std::size_t>(q)] + 1.0);
                out += (half * g.weights[static_cast<std::size_t>(q)]) * entry(s).row(i).transpose();
            }
        }
        return out;
    }

    Eigen::MatrixXd gradients(const Eigen::VectorXd& y) const override {
        Eigen::MatrixXd g(k_, l_);
        for (int i = 0; i < k_; ++i) g.row(i) = entry(y[i]).row(i);
        return g;
    }

    Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int j) const override {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k_, k_);
        for (int i = 0; i < k_; ++i) h(i, i) = entry_derivative(y[i])(i, j);
        return h;
    }

private:
    Curve curve_;
    int k_, l_;
    double extent_;
};

}  // namespace

Eigen::MatrixXd Submanifold::a1(double t) const { return curve.jet(t, l).block(0, 1, l, l); }
Eigen::MatrixXd Submanifold::b1(double t) const { return curve.jet(t, l).block(l, 1, k, l); }
Eigen::MatrixXd Submanifold::a2(double t) const { return curve.jet(t, d).block(0, l + 1, l, k); }
Eigen::MatrixXd Submanifold::b2(double t) const { return curve.jet(t, d).block(l, l + 1, k, k); }

double Submanifold::psi(const Eigen::VectorXd& y, double t) const { return patch.embed(y, false).dot(curve(t)); }

Eigen::VectorXd Submanifold::mixed(const Eigen::VectorXd& y, double t, int j) const {
    return patch.embed_jacobian(y).transpose() * curve.derivative(t, j);
}

Submanifold submanifold_builder(int d, int k, const Curve& curve, double extent, int resolution) {
    if (curve.dim() != d) fail(ErrorKind::Argument, "curve dimension mismatch");
    if (k < 2 || k > d - 1) fail(ErrorKind::Argument, "k must lie in [2, d-1]");
    if (!(extent > 0) || resolution < 2) fail(ErrorKind::Argument, "bad submanifold grid");
    const int l = d - k;
    const Eigen::MatrixXd& coeffs = curve.coefficients();

    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<Curve> chosen;
    do {
        Eigen::MatrixXd pc(coeffs.rows(), coeffs.cols());
        for (int i = 0; i < d; ++i) pc.row(i) = coeffs.row(perm[static_cast<std::size_t>(i)]);
        Curve cand = Curve::polynomial(pc, curve.max_order());
        bool ok = true;
        for (int s = 0; s <= 200 && ok; ++s) {
            const double t = -extent + 2.0 * extent * s / 200.0;
            const Eigen::MatrixXd a1 = cand.jet(t, l).block(0, 1, l, l);
            double scale = 1.0;
            for (int c = 0; c < l; ++c) scale *= std::max(a1.col(c).norm(), 1e-300);
            ok = std::abs(a1.determinant()) > 1e-8 * scale;
        }
        if (ok) {
            chosen = std::move(cand);
            break;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!chosen) fail(ErrorKind::Construction, "no coordinate permutation makes A1 invertible on the domain");

    std::vector<int> outputs(static_cast<std::size_t>(l));
    std::iota(outputs.begin(), outputs.end(), 0);
    GraphPatch patch(std::make_shared<SubmanifoldGraph>(*chosen, k, l, extent), d, outputs,
                     std::vector<double>(static_cast<std::size_t>(l), 0.0));

    QuadMeasure mu;
    mu.dim = d;
    mu.alpha = k;
    mu.provenance = Provenance::Submanifold;
    mu.resolution = resolution;
    const double cell = 2.0 * extent / resolution;
    std::size_t count = 1;
    for (int i = 0; i < k; ++i) count *= static_cast<std::size_t>(resolution);
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    Eigen::VectorXd y(k);
    double stretch = 1.0;
    for (std::size_t n = 0; n < count; ++n) {
        for (int i = 0; i < k; ++i) y[i] = -extent + (idx[static_cast<std::size_t>(i)] + 0.5) * cell;
        const Eigen::VectorXd x = patch.embed(y, false);
        const Eigen::MatrixXd g = patch.gradients(y);
        const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(k, k) + g * g.transpose();
        mu.nodes.insert(mu.nodes.end(), x.data(), x.data() + d);
        mu.weights.push_back(std::sqrt(gram.determinant()) * std::pow(cell, k));
        stretch = std::max(stretch, std::sqrt(gram.eigenvalues().real().maxCoeff()));
        for (int i = k - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < resolution) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    mu.spacing = cell * std::sqrt(static_cast<double>(k)) * stretch;
    return Submanifold{d, k, l, perm, *chosen, std::move(patch), std::move(mu)};
}

}  // namespace rlab
