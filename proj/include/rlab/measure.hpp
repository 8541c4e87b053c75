#pragma once

#include "rlab/curve.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace rlab {

enum class Provenance { Sphere, Hyperplane, Singular, Pushforward, Scaled, Submanifold };

const char* to_string(Provenance p);

/// Positive measure represented by weighted nodes (row-major, dim doubles per node).
struct QuadMeasure {
    int dim = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
    double alpha = 0.0;
    std::optional<double> c_mu;
    Provenance provenance = Provenance::Sphere;
    /// Largest cell diameter of the underlying grid.
    double spacing = 0.0;
    int resolution = 0;

    std::size_t size() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    Eigen::Map<const Eigen::VectorXd> point(std::size_t i) const {
        return {nodes.data() + i * static_cast<std::size_t>(dim), dim};
    }
    double total_mass() const;

    template <class F>
    double integrate(F&& f) const {
        std::vector<double> terms(size());
        for (std::size_t i = 0; i < size(); ++i) terms[i] = weights[i] * f(point(i));
        return sum_terms(terms);
    }

private:
    static double sum_terms(std::span<const double> terms);
};

/// Graph functions y -> (phi_1(y), ..., phi_l(y)) over a base domain.
class GraphFunctions {
public:
    virtual ~GraphFunctions() = default;
    virtual int base_dim() const = 0;
    virtual int output_count() const = 0;
    virtual bool in_domain(const Eigen::VectorXd& y) const = 0;
    virtual Eigen::VectorXd values(const Eigen::VectorXd& y) const = 0;
    /// base_dim x output_count, column j is grad phi_j.
    virtual Eigen::MatrixXd gradients(const Eigen::VectorXd& y) const = 0;
    virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int j) const = 0;
    /// True for phi(y) = 1 - sqrt(1 - |y|^2), which has a closed-form stationary map.
    virtual bool is_sphere_cap() const { return false; }
};

/// A graph embedded in R^d: outputs go to output_coords (value minus offset when
/// requested), the base variables fill the remaining coordinates in order.
class GraphPatch {
public:
    GraphPatch(std::shared_ptr<const GraphFunctions> fns, int ambient_dim, std::vector<int> output_coords,
               std::vector<double> offsets);

    int base_dim() const { return fns_->base_dim(); }
    int ambient_dim() const { return ambient_; }
    int output_count() const { return fns_->output_count(); }
    std::span<const int> output_coords() const { return outputs_; }
    std::span<const int> base_coords() const { return base_; }

    bool in_domain(const Eigen::VectorXd& y) const { return fns_->in_domain(y); }
    bool is_sphere_cap() const { return fns_->is_sphere_cap(); }
    /// Domain errors are raised here for points outside the chart.
    Eigen::VectorXd values(const Eigen::VectorXd& y) const;
    double value(const Eigen::VectorXd& y) const { return values(y)[0]; }
    Eigen::MatrixXd gradients(const Eigen::VectorXd& y) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& y) const { return gradients(y).col(0); }
    Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int j = 0) const;

    Eigen::VectorXd embed(const Eigen::VectorXd& y, bool with_offset) const;
    /// d x base_dim.
    Eigen::MatrixXd embed_jacobian(const Eigen::VectorXd& y) const;

private:
    void check(const Eigen::VectorXd& y) const;

    std::shared_ptr<const GraphFunctions> fns_;
    int ambient_;
    std::vector<int> outputs_;
    std::vector<int> base_;
    std::vector<double> offsets_;
};

/// phi(y) = 1 - sqrt(1 - |y|^2) placed at ambient coordinate output_coord, offset 1
/// so that the embedding with offset lands on the unit sphere.
GraphPatch sphere_cap_graph(int d, int output_coord = 0);

constexpr int default_sphere_resolution(int d) { return d == 2 ? 256 : 32; }

QuadMeasure sphere_measure(int d, int resolution);
/// Smallest resolution meeting the lambda spacing rule.
int sphere_resolution_for(int d, double lambda);
/// Node spacing the lambda spacing rule asks for.
double required_spacing(int d, double lambda);

QuadMeasure hyperplane_measure(const Eigen::VectorXd& c_normal, double extent, int resolution);

/// Lebesgue measure on an axis box of R^m (center +- half_width), midpoint grid.
QuadMeasure coordinate_box_measure(const Eigen::VectorXd& center, const Eigen::VectorXd& half_width,
                                   int resolution);

/// Axis box used to restrict the singular measure.
struct Window {
    Eigen::VectorXd half_width;  // length d, centered at the origin
};

QuadMeasure singular_alpha_measure(int d, double alpha, int resolution,
                                   const std::optional<Window>& window = std::nullopt);

QuadMeasure pushforward_measure(const QuadMeasure& mu, const Eigen::MatrixXd& linear_map, double mass_scale);

QuadMeasure scaled_measure(const QuadMeasure& mu, const TypeTuple& a, int ell, double kappa_val);

struct AuditResult {
    double value;     // sup of mass(B(x,r)) / r^alpha over the samples
    double r_floor;   // smallest admissible radius
    double r_at_sup;
};

AuditResult dimension_audit(const QuadMeasure& mu, double alpha, int n_samples, std::uint64_t seed);

/// Graph (phi_1(y),...,phi_l(y), y) of the k-dimensional construction.
struct Submanifold {
    int d = 0, k = 0, l = 0;
    std::vector<int> permutation;  // curve component order used, original indices
    Curve curve;                   // permuted curve
    GraphPatch patch;
    QuadMeasure measure;

    Eigen::VectorXd g(double t) const { return Eigen::VectorXd::Constant(k, t); }
    Eigen::MatrixXd a1(double t) const;
    Eigen::MatrixXd a2(double t) const;
    Eigen::MatrixXd b1(double t) const;
    Eigen::MatrixXd b2(double t) const;
    double psi(const Eigen::VectorXd& y, double t) const;
    /// d_t^j grad_y psi(y, t).
    Eigen::VectorXd mixed(const Eigen::VectorXd& y, double t, int j) const;
};

Submanifold submanifold_builder(int d, int k, const Curve& curve, double extent, int resolution);

}  // namespace rlab
