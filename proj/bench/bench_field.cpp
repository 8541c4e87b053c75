// Serial reference vs parallel field kernel on the sphere.
//
// Usage: rlab_bench [repeats]

#include "rlab/oscillatory.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace rlab;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void compare(const char* label, const Curve& curve, double lambda, const QuadMeasure& mu, int repeats) {
    const TestFunction f = TestFunction::indicator(0.0, 1.0);
    FieldResult fast, ref;
    const double t_ref = best_of(repeats, [&] { ref = field_reference(curve, lambda, f, mu); });
    const double t_fast = best_of(repeats, [&] { fast = field(curve, lambda, f, mu); });
    double diff = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) diff = std::max(diff, std::abs(fast.values[i] - ref.values[i]));
    std::printf("%-22s nodes=%-8zu serial %8.3f s  parallel %8.3f s  speedup %6.2fx  max|diff| %.2e\n", label, mu.size(),
                t_ref, t_fast, t_ref / t_fast, diff);
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::printf("threads=%d\n", omp_get_max_threads());
    for (double lambda : {256.0, 1024.0})
        compare(lambda == 256.0 ? "circle lambda=256" : "circle lambda=1024", Curve::moment(2), lambda,
                sphere_measure(2, sphere_resolution_for(2, lambda)), repeats);
    compare("2-sphere lambda=16", Curve::moment(3), 16.0, sphere_measure(3, sphere_resolution_for(3, 16.0)), repeats);
    return 0;
}
