#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace test {

/// J0 by its power series in long double; fine for |x| <= 30.
inline double bessel_j0(double x) {
    long double term = 1.0L, sum = 1.0L;
    const long double h = 0.25L * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= -h / (static_cast<long double>(k) * k);
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-30) break;
    }
    return static_cast<double>(sum);
}

/// Gauss-Legendre nodes on [-1,1] by Newton on the three-term recurrence.
struct Gauss {
    std::vector<double> x, w;
    explicit Gauss(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

/// Composite Gauss rule for a smooth integrand on [a,b].
template <class F>
auto integrate(F&& f, double a, double b, int panels = 64, int order = 20) {
    static thread_local Gauss g(20);
    if (static_cast<int>(g.x.size()) != order) g = Gauss(order);
    using R = decltype(f(a));
    R acc{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) acc += (0.5 * h * g.w[i]) * f(c + 0.5 * h * g.x[i]);
    }
    return acc;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

}  // namespace test
