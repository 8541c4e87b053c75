#pragma once

// Compiled with different vector flags from the rest of the library, so nothing
// here may touch Eigen types: their allocation alignment depends on those flags.

#include <complex>
#include <functional>
#include <vector>

namespace rlab::detail {

struct SegmentPlan {
    double start = 0.0, end = 0.0;
    std::complex<double> weight{1.0, 0.0};  // amplitude times sign
    std::vector<double> mod;                // lambda_m x0, zero without modulation
};

struct KernelPlan {
    int dim = 0;
    double lambda = 0.0;
    double phase_cap = 0.0;
    int min_panels = 4;
    int bound_samples = 64;
    double safety = 2.0;
    std::vector<SegmentPlan> segments;
    std::function<void(double, double*)> curve;     // Gamma(t)
    std::function<void(double, double*)> velocity;  // Gamma'(t)
    std::function<double(double)> t_factor;         // empty means 1
};

struct KernelStats {
    long long max_panels = 0;
    double mean_points = 0.0;
};

/// Evaluates sum over segments of weight * int a_t(t) exp(i (lambda z - mod) . Gamma(t)) dt
/// at every lifted node z (row-major), times prefactor[i] when prefactor is non-empty.
void run_kernel(const KernelPlan& plan, const std::vector<double>& z, const std::vector<double>& prefactor,
                std::vector<std::complex<double>>& values, KernelStats& stats);

}  // namespace rlab::detail
