#pragma once

#include "rlab/curve.hpp"
#include "rlab/measure.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rlab {

using cplx = std::complex<double>;

/// Factor exp(-i lambda x0 . curve(t)), the curve being the operator's curve.
struct CurvePhase {
    Eigen::VectorXd x0;
    double lambda;
};

struct Segment {
    double start;
    double end;
    cplx amplitude{1.0, 0.0};
    std::optional<CurvePhase> modulation;
    int sign = 1;
};

/// Piecewise input on the parameter interval; segments are pairwise disjoint.
class TestFunction {
public:
    TestFunction() = default;
    explicit TestFunction(std::vector<Segment> segments);

    static TestFunction indicator(double start, double end);

    const std::vector<Segment>& segments() const { return segs_; }
    double support_length() const;
    /// Union of two inputs with disjoint supports.
    TestFunction operator+(const TestFunction& other) const;

private:
    std::vector<Segment> segs_;
};

constexpr double inf = std::numeric_limits<double>::infinity();

double lp_norm(const TestFunction& f, double p);
double lorentz_norm(const TestFunction& f, double p, double q);

/// C-infinity cutoff: 1 on |s| <= 1, 0 on |s| >= 2.
double smooth_cutoff(double s);

/// Product bump a(y,t) = prod_i chi((y_i - c_i)/r_i) chi((t - t_c)/r_t); an infinite radius means no cutoff.
struct Amplitude {
    Eigen::VectorXd y_center;
    Eigen::VectorXd y_radius;
    double t_center = 0.0;
    double t_radius = inf;

    static Amplitude none(int y_dim);
    double y_factor(const Eigen::VectorXd& y) const;
    double t_factor(double t) const;
    /// Parameter interval where t_factor can be nonzero.
    std::pair<double, double> t_support() const;
};

class PhaseLift;

/// Phase Psi(y,t) written as lift(y) . Gamma(t).
///
/// graph:  lift(y) is the embedded graph point, Gamma the curve.
/// custom: Psi = sum_j P_j(y) t^j, lift(y) = (P_0(y), P_1(y), ...), Gamma(t) = (1, t, t^2, ...).
class PhaseSpec {
public:
    enum class Kind { Graph, CustomPolynomial };

    struct Term {
        double coef;
        std::vector<int> y_powers;
        int t_power;
    };

    static PhaseSpec graph(const Curve& curve, const GraphPatch& patch, bool with_offset, Amplitude amp);
    static PhaseSpec custom(int y_dim, std::vector<Term> terms, Amplitude amp);

    Kind kind() const { return kind_; }
    int y_dim() const;
    int lift_dim() const { return gamma_.dim(); }
    const Amplitude& amplitude() const { return amp_; }
    PhaseSpec with_amplitude(Amplitude amp) const;
    /// Curve through which test-function modulations act.
    const Curve& lift_curve() const { return gamma_; }
    const GraphPatch* patch() const { return patch_ ? &*patch_ : nullptr; }
    bool with_offset() const { return offset_; }

    Eigen::VectorXd lift(const Eigen::VectorXd& y) const;
    /// lift_dim x y_dim.
    Eigen::MatrixXd lift_jacobian(const Eigen::VectorXd& y) const;

    double value(const Eigen::VectorXd& y, double t) const;
    /// d_t^j grad_y Psi.
    Eigen::VectorXd mixed(const Eigen::VectorXd& y, double t, int j) const;
    /// grad_y d_t grad_y Psi.
    Eigen::MatrixXd mixed_hessian(const Eigen::VectorXd& y, double t) const;
    /// d_t^j Psi.
    double t_derivative(const Eigen::VectorXd& y, double t, int j) const;

private:
    Kind kind_ = Kind::Graph;
    Curve gamma_ = Curve::moment(2);
    std::optional<GraphPatch> patch_;
    bool offset_ = false;
    std::shared_ptr<const PhaseLift> lift_;
    Amplitude amp_;
};

struct QuadOptions {
    double phase_cap = M_PI / 2;
    int min_panels = 4;
    int bound_samples = 64;
    double safety = 2.0;
};

struct PanelCount {
    long long panels = 0;
    long long points = 0;
};

cplx extension_eval(const Curve& curve, double lambda, const TestFunction& f, const Eigen::VectorXd& x,
                    const QuadOptions& opts = {}, PanelCount* count = nullptr);

cplx phase_eval(const PhaseSpec& phase, double lambda, const TestFunction& f, const Eigen::VectorXd& y,
                const QuadOptions& opts = {}, PanelCount* count = nullptr);

struct FieldOptions {
    bool strict = false;
    QuadOptions quad;
    /// Ambient dimension used by the spacing rule; 0 means the operator's curve dimension.
    int rule_dim = 0;
    /// Off for measures whose nodes resolve |field| rather than its phase
    /// (Gauss rules on a box where the modulus is smooth).
    bool spacing_rule = true;
};

struct FieldResult {
    std::vector<cplx> values;
    long long max_panels = 0;        // per node, summed over segments
    double mean_points = 0.0;        // quadrature points per node
    bool resolution_ok = true;
    double required_spacing = 0.0;
    std::vector<std::string> warnings;
};

/// Parallel evaluation on every node of mu; node order is preserved.
FieldResult field(const Curve& curve, double lambda, const TestFunction& f, const QuadMeasure& mu,
                  const FieldOptions& opts = {});
FieldResult field(const PhaseSpec& phase, double lambda, const TestFunction& f, const QuadMeasure& mu,
                  const FieldOptions& opts = {});

/// Serial node-by-node evaluation through extension_eval / phase_eval.
FieldResult field_reference(const Curve& curve, double lambda, const TestFunction& f, const QuadMeasure& mu,
                            const FieldOptions& opts = {});
FieldResult field_reference(const PhaseSpec& phase, double lambda, const TestFunction& f, const QuadMeasure& mu,
                            const FieldOptions& opts = {});

/// sum_i w_i |v_i|^q with a fixed summation tree.
double lq_power(const std::vector<cplx>& values, const QuadMeasure& mu, double q);
double lq_norm(const std::vector<cplx>& values, const QuadMeasure& mu, double q);

void write_field_csv(std::ostream& os, const QuadMeasure& mu, const std::vector<cplx>& values);

}  // namespace rlab
