#pragma once

#include "rlab/curve.hpp"
#include "rlab/measure.hpp"
#include "rlab/oscillatory.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rlab {

/// {y : M^T (y - center) in prod [-h_i, h_i]}.
struct Parallelepiped {
    Eigen::VectorXd center;
    Eigen::MatrixXd transform;
    Eigen::VectorXd half_widths;

    int dim() const { return static_cast<int>(center.size()); }
    double volume() const;
    bool contains(const Eigen::VectorXd& y, double rel_tol = 1e-12) const;
    /// Point whose rectangle coordinates are u.
    Eigen::VectorXd from_rect(const Eigen::VectorXd& u) const;
    std::vector<Eigen::VectorXd> corners() const;
};

/// g(t) with d_t grad_y Psi(g(t), t) = 0.
Eigen::VectorXd solve_stationary(const PhaseSpec& phase, double t);
Eigen::VectorXd solve_stationary(const PhaseSpec& phase, double t, const Eigen::VectorXd& seed);

/// Columns d_t^{first_order + j} grad_y Psi(y, t), j = 0 .. y_dim - 1.
Eigen::MatrixXd curvature_matrix(const PhaseSpec& phase, double t, const Eigen::VectorXd& y, int first_order = 2);
/// Same at y = g(t); degeneracy error when |det| < 1e-8.
Eigen::MatrixXd curvature_matrix(const PhaseSpec& phase, double t);

/// Box shape. Axis j of the rectangle has half-width c lambda^{-1 + (first_order + j) rho};
/// rho = 0 selects 1/(2 lift_dim).
struct BoxShape {
    int first_order = 2;
    double rho = 0.0;
};

Parallelepiped knapp_box(const PhaseSpec& phase, double t_k, double lambda, double c, const BoxShape& shape = {});

/// Psi(y,t) - Psi(y_k,t) - <grad_y Psi(y_k,t_k), y - y_k>: the phase with the factors
/// removed that do not change |T f| for unimodular modulations of f.
double reduced_phase(const PhaseSpec& phase, const Eigen::VectorXd& y, double t, const Eigen::VectorXd& y_k,
                     double t_k);

struct Calibration {
    double c = 0.0;
    double max_phase = 0.0;  // sampled max |reduced phase| at c
    double bound = 0.0;      // threshold / lambda
};

struct CalibrationOptions {
    BoxShape shape;
    /// Parameter interval sampled; default [t_k - lambda^{-rho}, t_k] clipped to the curve domain.
    std::optional<std::pair<double, double>> interval;
    /// Bound is threshold / lambda.
    double threshold = 1.0;
    int samples = 33;
};

/// Largest dyadic c in {1, 1/2, ..., 2^-20} whose box keeps the sampled reduced phase within the bound.
Calibration calibrate_c(const PhaseSpec& phase, double t_k, double lambda, const CalibrationOptions& opts = {});

/// Sampled max of |reduced phase| over box x [t0, t1].
double sampled_phase_max(const PhaseSpec& phase, const Parallelepiped& box, double t_k, double t0, double t1,
                         int samples = 33);

struct PartitionFamily {
    double delta = 0.0;
    double lambda = 0.0;
    std::vector<std::pair<double, double>> intervals;
    std::vector<double> t;                  // right endpoints t_k
    std::vector<Eigen::VectorXd> y;         // g(t_k)
    std::vector<Eigen::VectorXd> lift;      // lifted stationary points, used for modulation
    std::vector<Eigen::MatrixXd> curvature;

    std::size_t size() const { return intervals.size(); }
};

/// l = round(delta lambda^{1/(2d)}) equal intervals of [0, delta]; requires delta lambda^{1/(2d)} >= 1.
PartitionFamily partition_family(const PhaseSpec& phase, double delta, double lambda, const BoxShape& shape = {});

/// chi on [t0, t0 + lambda^{-rho}], optionally modulated.
TestFunction knapp_input(double t0, double lambda, double rho, const std::optional<CurvePhase>& modulation = std::nullopt);
/// chi_[0, eps0] exp(-i lambda x0 . curve(t)).
TestFunction bump_input(const Curve& curve, double lambda, const Eigen::VectorXd& x0, double eps0);
/// chi_{I_k} times the modulation that removes Psi(y_k, t).
TestFunction interval_input(const PartitionFamily& part, std::size_t k);
/// sum_k eps_k interval_input(k); eps_k are the top bits of successive mt19937_64 draws.
TestFunction random_sign_input(const PartitionFamily& part, std::uint64_t seed);
std::vector<int> rademacher_signs(std::size_t count, std::uint64_t seed);

struct NecessityRect {
    TypeTuple type;
    Eigen::MatrixXd frame;  // columns v_1 .. v_d
    Parallelepiped box;     // y-coordinates of the graph over -v_d
    Curve shifted;          // V^T (curve(t + t0) - curve(t0))
    PhaseSpec phase;        // (y, phi(y) - 1) . shifted(t)
    double rho = 0.0;
};

/// Rectangle |y_i| <= c lambda^{-1 + rho a_{d+1-i}} over the sphere near -v_d.
NecessityRect necessity_rect_sphere(const Curve& curve, double t0, double lambda, double rho, double c);
/// Largest dyadic c with |Phi(y,t) - Phi(0,t)| <= threshold / lambda on the box x [0, lambda^{-rho}].
Calibration calibrate_necessity(const Curve& curve, double t0, double lambda, double rho, double threshold = 1e-2,
                                int samples = 33);
double necessity_phase_max(const NecessityRect& rect, double lambda, int samples = 33);

/// Graph phase (phi(y), y) . curve(t) of the submanifold construction.
PhaseSpec submanifold_phase(const Submanifold& sub);

struct KdimBox {
    double t0, t1;  // parameter interval I_m
    double t_m;
    Parallelepiped box;
};

/// Boxes along g(t) = (t,...,t) over the partition of [0, delta].
std::vector<KdimBox> kdim_boxes(const Submanifold& sub, double lambda, double c, double delta);
Calibration calibrate_kdim(const Submanifold& sub, double lambda, double delta, double threshold = 1.0);

/// Tensor Gauss-Legendre rule on a box, nodes in y-coordinates, weights
/// sqrt(det(I + G G^T)) of the graph (1 when patch is null).
QuadMeasure graph_box_measure(const Parallelepiped& box, const GraphPatch* patch, int n_per_axis);
/// Same nodes embedded in R^d.
QuadMeasure embed_measure(const QuadMeasure& y_measure, const GraphPatch& patch, bool with_offset);

struct BoxRow {
    std::size_t k;
    double t_k;
    Parallelepiped box;
    double c;
};
void write_box_csv(std::ostream& os, const std::vector<BoxRow>& rows);

}  // namespace rlab
