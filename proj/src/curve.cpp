#include "rlab/curve.hpp"

#include "rlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <variant>

namespace rlab {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

// n!/(n-k)!
double falling(int n, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= n - j;
    return r;
}

struct Poly {
    Eigen::MatrixXd c;
};

struct Helix {
    double r, w, h;
};

struct Composed {
    Curve base;
    Eigen::MatrixXd map;
    double u, t0;
    bool subtract;
};

}  // namespace

struct Curve::Rep {
    int d;
    double lo = 0.0, hi = 1.0;
    int max_order;
    std::variant<Poly, Helix, Composed> form;
};

TypeTuple::TypeTuple(std::vector<int> orders) : a_(std::move(orders)) {
    if (a_.empty()) fail(ErrorKind::Argument, "type tuple must be non-empty");
    if (a_.front() < 1) fail(ErrorKind::Argument, "type tuple entries must be positive");
    for (std::size_t i = 1; i < a_.size(); ++i)
        if (a_[i] <= a_[i - 1]) fail(ErrorKind::Argument, "type tuple must be strictly increasing");
}

TypeTuple TypeTuple::nondegenerate(int d) {
    std::vector<int> a(static_cast<std::size_t>(d));
    std::iota(a.begin(), a.end(), 1);
    return TypeTuple(std::move(a));
}

int TypeTuple::norm1() const { return std::accumulate(a_.begin(), a_.end(), 0); }

Curve Curve::polynomial(Eigen::MatrixXd coeffs, int max_order) {
    const int d = static_cast<int>(coeffs.rows());
    if (d < 1 || coeffs.cols() < 1) fail(ErrorKind::Argument, "empty coefficient table");
    if (!coeffs.allFinite()) fail(ErrorKind::Argument, "non-finite curve coefficient");
    const int deg = static_cast<int>(coeffs.cols()) - 1;
    if (max_order < 0) max_order = std::max(4 * d, deg + 1);
    auto rep = std::make_shared<Rep>(Rep{d, 0.0, 1.0, max_order, Poly{std::move(coeffs)}});
    return Curve(std::move(rep));
}

Curve Curve::moment(int d) {
    if (d < 1) fail(ErrorKind::Argument, "moment curve needs d >= 1");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d + 1);
    for (int i = 0; i < d; ++i) c(i, i + 1) = 1.0 / factorial(i + 1);
    return polynomial(std::move(c));
}

Curve Curve::monomial(std::span<const int> orders) {
    TypeTuple a(std::vector<int>(orders.begin(), orders.end()));
    const int d = a.dim();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, a.back() + 1);
    for (int i = 0; i < d; ++i) c(i, a[i]) = 1.0 / factorial(a[i]);
    return polynomial(std::move(c));
}

Curve Curve::helix(double radius, double frequency, double pitch, int max_order) {
    auto rep = std::make_shared<Rep>(Rep{3, 0.0, 1.0, max_order, Helix{radius, frequency, pitch}});
    return Curve(std::move(rep));
}

int Curve::dim() const { return rep_->d; }
double Curve::t_lo() const { return rep_->lo; }
double Curve::t_hi() const { return rep_->hi; }
int Curve::max_order() const { return rep_->max_order; }
bool Curve::is_polynomial() const { return std::holds_alternative<Poly>(rep_->form); }

const Eigen::MatrixXd& Curve::coefficients() const {
    if (!is_polynomial()) fail(ErrorKind::Capability, "curve has no polynomial coefficient table");
    return std::get<Poly>(rep_->form).c;
}

int Curve::degree() const { return static_cast<int>(coefficients().cols()) - 1; }

Eigen::VectorXd Curve::derivative(double t, int order) const {
    if (order < 0) fail(ErrorKind::Argument, "negative derivative order");
    if (order > rep_->max_order)
        fail(ErrorKind::Capability, "derivative order " + std::to_string(order) +
                                        " exceeds oracle capability " +
                                        std::to_string(rep_->max_order));
    const int d = rep_->d;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    if (const auto* p = std::get_if<Poly>(&rep_->form)) {
        const int deg = static_cast<int>(p->c.cols()) - 1;
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = deg; j >= order; --j) acc = acc * t + p->c(i, j) * falling(j, order);
            out[i] = acc;
        }
    } else if (const auto* h = std::get_if<Helix>(&rep_->form)) {
        const double wn = h->r * std::pow(h->w, order);
        const double arg = h->w * t + order * (M_PI / 2.0);
        out[0] = wn * std::cos(arg);
        out[1] = wn * std::sin(arg);
        out[2] = order == 0 ? h->h * t : (order == 1 ? h->h : 0.0);
    } else {
        const auto& c = std::get<Composed>(rep_->form);
        Eigen::VectorXd inner = c.base.derivative(c.u * t + c.t0, order);
        if (order == 0 && c.subtract) inner -= c.base.derivative(c.t0, 0);
        out = std::pow(c.u, order) * (c.map * inner);
    }
    return out;
}

Eigen::MatrixXd Curve::jet(double t, int max_ord) const {
    Eigen::MatrixXd j(rep_->d, max_ord + 1);
    for (int k = 0; k <= max_ord; ++k) j.col(k) = derivative(t, k);
    return j;
}

Curve Curve::compose(const Eigen::MatrixXd& map, double u, double t0, bool subtract) const {
    if (map.cols() != rep_->d) fail(ErrorKind::Argument, "composition map has wrong width");
    auto rep = std::make_shared<Rep>(Rep{static_cast<int>(map.rows()), 0.0, 1.0, rep_->max_order,
                                         Composed{*this, map, u, t0, subtract}});
    return Curve(std::move(rep));
}

Curve Curve::with_domain(double lo, double hi) const {
    if (!(lo < hi)) fail(ErrorKind::Argument, "empty parameter domain");
    auto rep = std::make_shared<Rep>(*rep_);
    rep->lo = lo;
    rep->hi = hi;
    return Curve(std::move(rep));
}

Eigen::VectorXd eval_derivative(const Curve& curve, double t, int order) {
    return curve.derivative(t, order);
}

double torsion_det(const Curve& curve, double t) {
    const int d = curve.dim();
    return curve.jet(t, d).rightCols(d).determinant();
}

namespace {

// All strictly increasing d-tuples from {1..a_max}, ordered by sum then lexicographically.
std::vector<std::vector<int>> ordered_tuples(int d, int a_max) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(d));
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == d) {
            out.push_back(cur);
            return;
        }
        for (int v = start; v <= a_max - (d - pos - 1); ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, v + 1);
        }
    };
    rec(rec, 0, 1);
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        const int sx = std::accumulate(x.begin(), x.end(), 0);
        const int sy = std::accumulate(y.begin(), y.end(), 0);
        return sx != sy ? sx < sy : x < y;
    });
    return out;
}

}  // namespace

TypeTuple detect_type(const Curve& curve, double t, int a_max, double det_tol) {
    const int d = curve.dim();
    if (a_max < d) fail(ErrorKind::Argument, "a_max must be at least d");
    if (!(det_tol > 0)) fail(ErrorKind::Argument, "det_tol must be positive");
    const Eigen::MatrixXd j = curve.jet(t, a_max);
    Eigen::MatrixXd m(d, d);
    for (const auto& a : ordered_tuples(d, a_max)) {
        double scale = 1.0;
        bool zero_col = false;
        for (int i = 0; i < d; ++i) {
            m.col(i) = j.col(a[static_cast<std::size_t>(i)]);
            const double n = m.col(i).norm();
            if (n == 0.0) zero_col = true;
            scale *= n;
        }
        if (zero_col) continue;
        if (std::abs(m.determinant()) > det_tol * scale) return TypeTuple(a);
    }
    fail(ErrorKind::NotFiniteType, "not finite type up to a_max=" + std::to_string(a_max) +
                                       " at t=" + std::to_string(t));
}

TypeTuple detect_type(const Curve& curve, double t) {
    return detect_type(curve, t, 2 * curve.dim(), default_det_tol);
}

Curve rescale_curve(const Curve& curve, double t0, double u, const TypeTuple& a, double det_tol) {
    const int d = curve.dim();
    if (a.dim() != d) fail(ErrorKind::Argument, "type tuple dimension mismatch");
    const double lo = std::min(t0, t0 + u), hi = std::max(t0, t0 + u);
    const double slack = 1e-12;
    if (u == 0.0 || lo < curve.t_lo() - slack || hi > curve.t_hi() + slack)
        fail(ErrorKind::Argument, "rescaling interval leaves the curve domain");
    Eigen::MatrixXd md(d, d);
    double scale = 1.0;
    for (int i = 0; i < d; ++i) {
        md.col(i) = curve.derivative(t0, a[i]) * std::pow(u, a[i]);
        scale *= md.col(i).norm();
    }
    if (!(std::abs(md.determinant()) > det_tol * scale) || scale == 0.0)
        fail(ErrorKind::Singularity, "derivative matrix at t0 is singular");
    const Eigen::MatrixXd inv = md.inverse();

    if (!curve.is_polynomial()) return curve.compose(inv, u, t0, true);

    // Taylor expansion at t0 in the variable u t.
    const int deg = curve.degree();
    Eigen::MatrixXd taylor = Eigen::MatrixXd::Zero(d, deg + 1);
    for (int j = 1; j <= deg; ++j) taylor.col(j) = curve.derivative(t0, j) * (std::pow(u, j) / factorial(j));
    return Curve::polynomial(inv * taylor, curve.max_order());
}

Curve dyadic_rescale(const Curve& curve, const TypeTuple& a, int ell) {
    const int d = curve.dim();
    if (a.dim() != d) fail(ErrorKind::Argument, "type tuple dimension mismatch");
    if (curve.is_polynomial()) {
        Eigen::MatrixXd c = curve.coefficients();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < c.cols(); ++j) c(i, j) *= std::ldexp(1.0, ell * (a[i] - j));
        return Curve::polynomial(std::move(c), curve.max_order());
    }
    Eigen::VectorXd diag(d);
    for (int i = 0; i < d; ++i) diag[i] = std::ldexp(1.0, ell * a[i]);
    return curve.compose(diag.asDiagonal(), std::ldexp(1.0, -ell), 0.0, false);
}

Membership class_membership(const Curve& curve, const TypeTuple& a, double eps, int grid_n) {
    const int d = curve.dim();
    if (a.dim() != d) fail(ErrorKind::Argument, "type tuple dimension mismatch");
    if (grid_n < 2) fail(ErrorKind::Argument, "grid_n must be at least 2");
    const Eigen::MatrixXd& c = curve.coefficients();
    const int kmax = a.back() + 1;
    double dev = 0.0;
    for (int i = 0; i < d; ++i) {
        const double scale = std::max(1.0, c.row(i).cwiseAbs().maxCoeff());
        // Division by t^{a_i}: lower coefficients must vanish.
        for (int j = 0; j < std::min<int>(a[i], static_cast<int>(c.cols())); ++j)
            if (std::abs(c(i, j)) > 1e-14 * scale)
                fail(ErrorKind::NormalForm, "not in monomial normal form: component " +
                                                std::to_string(i + 1) + " does not vanish to order " +
                                                std::to_string(a[i]));
        const int nphi = std::max<int>(1, static_cast<int>(c.cols()) - a[i]);
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(nphi);
        for (int j = a[i]; j < c.cols(); ++j) phi[j - a[i]] = c(i, j);
        const double target = 1.0 / factorial(a[i]);
        for (int g = 0; g < grid_n; ++g) {
            const double t = curve.t_lo() + (curve.t_hi() - curve.t_lo()) * g / (grid_n - 1);
            for (int k = 0; k <= kmax; ++k) {
                double acc = 0.0;
                for (int j = nphi - 1; j >= k; --j) acc = acc * t + phi[j] * falling(j, k);
                dev = std::max(dev, std::abs(acc - (k == 0 ? target : 0.0)));
            }
        }
    }
    return {dev <= eps, dev};
}

std::vector<TypeSample> type_scan(const Curve& curve, int grid_n) {
    if (grid_n < 2) fail(ErrorKind::Argument, "scan grid needs at least 2 points");
    const double lo = curve.t_lo(), hi = curve.t_hi();
    std::vector<double> ts(static_cast<std::size_t>(grid_n) + 1);
    std::vector<double> tau(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = lo + (hi - lo) * static_cast<double>(i) / grid_n;
        tau[i] = torsion_det(curve, ts[i]);
    }
    std::vector<double> points = ts;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (tau[i] == 0.0 || tau[i + 1] == 0.0 || (tau[i] > 0) == (tau[i + 1] > 0)) continue;
        double a = ts[i], b = ts[i + 1];
        double fa = tau[i];
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            const double fm = torsion_det(curve, m);
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm > 0) == (fa > 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        points.push_back(0.5 * (a + b));
    }
    // Even-order zeros do not change sign; look at interior local minima of |tau|.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        if (!(std::abs(tau[i]) < std::abs(tau[i - 1]) && std::abs(tau[i]) <= std::abs(tau[i + 1])))
            continue;
        double a = ts[i - 1], b = ts[i + 1];
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = std::abs(torsion_det(curve, x1)), f2 = std::abs(torsion_det(curve, x2));
        for (int it = 0; it < 120; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = std::abs(torsion_det(curve, x1));
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = std::abs(torsion_det(curve, x2));
            }
        }
        points.push_back(0.5 * (a + b));
    }
    std::vector<TypeSample> out;
    out.reserve(points.size());
    for (double t : points) out.push_back({t, detect_type(curve, t)});
    return out;
}

int kappa_max_scan(const Curve& curve, int grid_n) {
    int best = 0;
    for (const auto& s : type_scan(curve, grid_n)) best = std::max(best, s.type.norm1() - s.type[0]);
    return best;
}

}  // namespace rlab
