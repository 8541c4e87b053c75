#pragma once

#include "rlab/curve.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace rlab {

using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);
/// Exact conversion for doubles that are ratios of small integers (denominator <= 2^20).
Rational to_rational(double x);
/// Parses "inf", integers, decimals ("1.5") and fractions ("3/2") exactly.
/// "inf" is returned as the reciprocal 0 when reciprocal is true.
Rational parse_rational(std::string_view text);
/// "3" or "5/2".
std::string format_rational(const Rational& r);
/// "inf" for a zero inverse, otherwise the reciprocal.
std::string format_exponent(const Rational& inverse);

/// (1/p, 1/q) inside the unit square; p = inf is 1/p = 0.
struct ExponentPoint {
    Rational inv_p;
    Rational inv_q;

    static ExponentPoint from_inverses(Rational inv_p, Rational inv_q);
    /// Accepts "inf" for either exponent.
    static ExponentPoint from_strings(std::string_view p, std::string_view q);
};

int ceil_of(double nu);
std::int64_t ceil_of(const Rational& nu);

Rational kappa(const TypeTuple& a, const Rational& alpha);
double kappa(const TypeTuple& a, double alpha);
Rational beta(int d, const Rational& alpha);
double beta(int d, double alpha);

enum class RegionKind { SphereNondegenerate, FiniteType, Hyperplane, Kdim, AlphaGeneral };
enum class PointClass { Interior, Boundary, Exterior };
enum class EstimateStatus { Holds, Fails, Open };

const char* to_string(RegionKind kind);
const char* to_string(PointClass cls);
const char* to_string(EstimateStatus status);

/// Exponent region cut out by a q-threshold and a line 1/p + L/q vs 1.
///
/// classify() is purely geometric: interior when both inequalities are strict,
/// exterior when one is violated, boundary otherwise. status() encodes which
/// part of the boundary the corresponding theorem includes.
struct Region {
    RegionKind kind;
    int d;
    Rational q_threshold;
    Rational line_coefficient;

    bool q_above(const ExponentPoint& pt) const;      // q > Q
    bool q_below(const ExponentPoint& pt) const;      // q < Q
    Rational line_value(const ExponentPoint& pt) const;  // 1/p + L/q

    PointClass classify(const ExponentPoint& pt) const;
    EstimateStatus status(const ExponentPoint& pt) const;
    std::string describe() const;
};

Region sphere_region(int d);
Region finite_type_region(const Rational& kappa_max, int d);
Region hyperplane_region(int d, int omega);
Region kdim_region(int d, int k);
Region alpha_general_region(int d, const TypeTuple& a, const Rational& alpha);

struct HyperplaneChart {
    int k;              // 0-based index of the solved coordinate
    Eigen::VectorXd h;  // length d-1, coefficients on the remaining coordinates
    Curve gamma_h;      // curve in R^{d-1}
};

/// Chart x_k = h . xbar of the hyperplane c . x = 0 and the projected moment curve.
HyperplaneChart hyperplane_project(const Eigen::VectorXd& c_normal, int d);
int hyperplane_omega(const Eigen::VectorXd& c_normal, int d, int grid_n = 512);

Rational kdim_threshold(int d, int k);

struct KnappFamily {};
struct RandomFamily {};
struct AlphaRectFamily {
    TypeTuple a;
    Rational alpha;
    Rational rho;
};
using ExcessFamily = std::variant<KnappFamily, RandomFamily, AlphaRectFamily>;

/// Predicted growth exponent (in log lambda) of the normalized ratio.
Rational predicted_excess(const ExponentPoint& pt, const ExcessFamily& family, int d);

}  // namespace rlab
