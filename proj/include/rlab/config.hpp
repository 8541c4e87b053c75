#pragma once

#include "rlab/curve.hpp"
#include "rlab/exponents.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlab {

/// Value in a call expression: a scalar token or a bracketed list.
struct ConfigValue {
    std::string scalar;
    std::vector<ConfigValue> items;
    bool is_list = false;

    Rational rational() const;
    double number() const;
    std::vector<double> numbers() const;
    Eigen::VectorXd vector() const;
};

/// name(arg, key=value, ...); a bare name has no arguments.
struct CallExpr {
    std::string name;
    std::vector<ConfigValue> positional;
    std::map<std::string, ConfigValue> named;

    const ConfigValue* find(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
};

CallExpr parse_call(std::string_view text);

/// moment(d) | poly([[c00, c01, ...], ...]) | monomial(a1, ..., ad) | helix(r, w, h)
Curve parse_curve(std::string_view text);

/// Comma list of numbers, "2^k" powers, or a dyadic range "2^a..2^b".
std::vector<double> parse_lambda_list(std::string_view text);
/// Comma list of exponents, "inf" allowed.
std::vector<Rational> parse_exponent_list(std::string_view text);

struct MeasureSpec {
    enum class Kind { Sphere, Box, Hyperplane, Singular, Submanifold };
    Kind kind = Kind::Sphere;
    int resolution = 0;  // 0 = automatic
    Eigen::VectorXd normal;
    double extent = 1.0;
    double alpha = 0.0;
    int k = 2;
    int box_points = 32;  // Gauss points per axis on Knapp boxes
};

MeasureSpec parse_measure(std::string_view text);

struct FamilySpec {
    enum class Kind { Knapp, Bump, Random };
    Kind kind = Kind::Bump;
    double rho = 0.0;   // 0 = 1/(2d)
    double t0 = 0.5;    // Knapp anchor: J = [t0 - lambda^-rho, t0]
    Eigen::VectorXd x0; // empty = e_d
    double eps0 = 1.0;
    double delta = 0.25;
    int n_samples = 64;
};

FamilySpec parse_family(std::string_view text);

struct SweepConfig {
    Curve curve = Curve::moment(2);
    MeasureSpec measure;
    FamilySpec family;
    std::vector<double> lambdas;
    std::vector<Rational> q_list;  // stored as 1/q
    std::vector<Rational> p_list;  // stored as 1/p
    std::string out;
    bool strict = false;
    std::uint64_t seed = 1;
    bool timing = false;

    void validate() const;
};

/// INI text with sections [curve], [measure], [family], [sweep].
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

}  // namespace rlab
