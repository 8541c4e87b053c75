#pragma once

#include "rlab/config.hpp"
#include "rlab/constructions.hpp"
#include "rlab/exponents.hpp"
#include "rlab/oscillatory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rlab {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;  // residual root mean square
};

/// Ordinary least squares y = slope x + intercept; needs two distinct x.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y);

struct RunStats {
    int resolution = 0;
    std::size_t nodes = 0;
    long long max_panels = 0;
    double mean_points = 0.0;
    bool resolution_ok = true;
};

struct SweepRecord {
    double lambda;
    Rational inv_p, inv_q;
    double f_norm;   // ||f||_p
    double t_norm;   // ||T f||_{L^q(mu)}
    double s;        // alpha / q
    double ratio;    // t_norm / (lambda^-s f_norm)
    RunStats stats;
    double wall_seconds;
};

struct SweepFit {
    Rational inv_p, inv_q;
    SlopeFit decay;   // log t_norm against log lambda
    SlopeFit excess;  // log ratio against log lambda
    double predicted_decay;
    double predicted_excess;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    std::vector<SweepFit> fits;
    std::vector<std::string> warnings;
};

SweepResult decay_sweep(const SweepConfig& cfg);

struct KhintchineRecord {
    double lambda;
    Rational inv_q;
    std::size_t intervals;
    double mean;        // sample mean of ||sum eps_k T chi_k||_q^q
    double std_error;
    double box_sum;     // sum |P_k|
    double lower;       // lambda^{-q/(2d)} sum |P_k|
    double ratio;       // mean / lower
    double upper;       // lambda^{-(d-1)} delta^{q/p}
    double c;
    RunStats stats;
};

/// Randomized lower bound for the graph-phase operator over y in R^{d-1}.
std::vector<KhintchineRecord> khintchine_experiment(const SweepConfig& cfg);

struct PhaseCell {
    Rational inv_p, inv_q;
    PointClass cls;
    EstimateStatus status;
    double predicted;
    double measured;
    bool off_band;
    bool agree;
};

struct PhaseDiagram {
    int d = 0;
    std::vector<PhaseCell> cells;
    std::size_t off_band = 0;
    std::size_t agreeing = 0;
    double agreement() const { return off_band ? static_cast<double>(agreeing) / static_cast<double>(off_band) : 1.0; }
};

inline constexpr double boundary_band = 0.02;

/// Cell centers ((i + 1/2)/n, (j + 1/2)/n); measured excess from the two-lambda difference.
PhaseDiagram phase_diagram(int d, int grid_n, const FamilySpec& family, const std::vector<double>& lambda_pair,
                           std::uint64_t seed = 1);

struct KdimConfig {
    int d = 4;
    int k = 2;
    Curve curve = Curve::moment(4);
    std::vector<double> lambdas;
    std::vector<Rational> q_list;  // q values, not inverses
    double delta = 1.0;
    double extent = 2.0;
    int box_points = 24;
};

struct KdimRecord {
    double lambda;
    Rational q;
    std::size_t boxes;
    double box_sum;       // sum over the partition of |P_m|
    double count;         // delta lambda^{1/(2d)}
    double box_volume;    // |P| at t = delta
    double lower;         // lambda^{-q/(2d)} count |P|
    double field_mass;    // count * int_P |T chi_J|^q
    double c;
};

struct KdimFit {
    Rational q;
    double predicted;
    double closed_form;
    double field;
};

struct KdimResult {
    std::vector<KdimRecord> records;
    std::vector<KdimFit> fits;
    Submanifold sub;
};

KdimResult kdim_experiment(const KdimConfig& cfg);

/// Measure from a spec at its configured resolution, or a moderate default when automatic.
QuadMeasure build_measure(const MeasureSpec& spec, const Curve& curve);

void write_sweep_csv(std::ostream& os, const SweepResult& res, bool timing);
void write_sweep_fits(std::ostream& os, const SweepResult& res);
void write_khintchine_csv(std::ostream& os, const std::vector<KhintchineRecord>& recs);
void write_phase_csv(std::ostream& os, const PhaseDiagram& pd);
void write_kdim_csv(std::ostream& os, const KdimResult& res);

}  // namespace rlab
