#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

namespace rlab {

/// Strictly increasing tuple of positive derivative orders.
class TypeTuple {
public:
    explicit TypeTuple(std::vector<int> orders);

    static TypeTuple nondegenerate(int d);

    int dim() const { return static_cast<int>(a_.size()); }
    int operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
    int norm1() const;
    int back() const { return a_.back(); }
    std::span<const int> values() const { return a_; }

    friend bool operator==(const TypeTuple&, const TypeTuple&) = default;

private:
    std::vector<int> a_;
};

/// Smooth curve t -> R^d with an exact derivative oracle.
///
/// Three representations: a polynomial coefficient table (row i holds the
/// monomial coefficients of component i), the circular helix, and the
/// composition x -> A (base(u t + t0) - s base(t0)) of another curve.
class Curve {
public:
    static Curve polynomial(Eigen::MatrixXd coeffs, int max_order = -1);
    static Curve moment(int d);
    /// Components t^{a_i} / a_i!.
    static Curve monomial(std::span<const int> orders);
    /// (r cos(w t), r sin(w t), h t) in R^3.
    static Curve helix(double radius, double frequency, double pitch, int max_order = 24);

    int dim() const;
    double t_lo() const;
    double t_hi() const;
    int max_order() const;
    bool is_polynomial() const;
    /// Coefficient table; throws a capability error for non-polynomial curves.
    const Eigen::MatrixXd& coefficients() const;
    int degree() const;

    Eigen::VectorXd derivative(double t, int order) const;
    Eigen::VectorXd operator()(double t) const { return derivative(t, 0); }
    /// Columns are derivatives of orders 0..max_ord.
    Eigen::MatrixXd jet(double t, int max_ord) const;

    /// x -> map (this(u t + t0) - (subtract ? this(t0) : 0)), domain [0,1].
    Curve compose(const Eigen::MatrixXd& map, double u, double t0, bool subtract) const;
    /// Restricts the parameter domain without changing the formula.
    Curve with_domain(double lo, double hi) const;

    struct Rep;

private:
    explicit Curve(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const Rep> rep_;
};

constexpr double default_det_tol = 1e-8;

Eigen::VectorXd eval_derivative(const Curve& curve, double t, int order);

double torsion_det(const Curve& curve, double t);

/// Minimal-norm derivative tuple whose columns span R^d at t.
TypeTuple detect_type(const Curve& curve, double t, int a_max, double det_tol = default_det_tol);
TypeTuple detect_type(const Curve& curve, double t);

/// (M D^u)^{-1} (curve(u t + t0) - curve(t0)) where M holds the a-derivatives at t0.
Curve rescale_curve(const Curve& curve, double t0, double u, const TypeTuple& a,
                    double det_tol = default_det_tol);

/// Component i scaled by 2^{l a_i}, parameter by 2^{-l}.
Curve dyadic_rescale(const Curve& curve, const TypeTuple& a, int ell);

struct Membership {
    bool member;
    double deviation;
};

/// Distance of the normalized components curve_i / t^{a_i} from 1/a_i! in C^{a_d+1}.
Membership class_membership(const Curve& curve, const TypeTuple& a, double eps, int grid_n);

struct TypeSample {
    double t;
    TypeTuple type;
};

/// Types on a uniform grid (endpoints included) plus torsion zeros located by
/// bisection at sign changes and by golden-section search at local minima.
std::vector<TypeSample> type_scan(const Curve& curve, int grid_n = 512);

/// max over t of |a(t)|_1 - a_1(t).
int kappa_max_scan(const Curve& curve, int grid_n = 512);

}  // namespace rlab
