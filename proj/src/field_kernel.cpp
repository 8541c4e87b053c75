// Built with vector math enabled; see CMakeLists.txt.
#include "field_kernel.hpp"

#include "rlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace rlab::detail {

namespace {

using cplx = std::complex<double>;

// Composite 16-point rule with a fixed panel count on one segment.
struct Table {
    int n = 0;
    std::vector<double> gam;  // m blocks of n values
    std::vector<double> wr, wi;
};

Table build_table(const KernelPlan& plan, const SegmentPlan& sp, long long panels) {
    const GaussRule& g = gauss16();
    const int m = plan.dim;
    std::vector<double> x(static_cast<std::size_t>(m));
    Table tb;
    tb.n = static_cast<int>(panels) * g.size();
    tb.gam.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(tb.n));
    tb.wr.resize(static_cast<std::size_t>(tb.n));
    tb.wi.resize(static_cast<std::size_t>(tb.n));
    const double h = (sp.end - sp.start) / static_cast<double>(panels);
    int j = 0;
    for (long long p = 0; p < panels; ++p) {
        const double a = sp.start + static_cast<double>(p) * h;
        for (int q = 0; q < g.size(); ++q, ++j) {
            const double t = a + 0.5 * h * (g.nodes[static_cast<std::size_t>(q)] + 1.0);
            plan.curve(t, x.data());
            for (int c = 0; c < m; ++c) tb.gam[static_cast<std::size_t>(c) * tb.n + j] = x[c];
            const double fac = plan.t_factor ? plan.t_factor(t) : 1.0;
            const cplx w = sp.weight * (0.5 * h * g.weights[static_cast<std::size_t>(q)] * fac);
            tb.wr[static_cast<std::size_t>(j)] = w.real();
            tb.wi[static_cast<std::size_t>(j)] = w.imag();
        }
    }
    return tb;
}

template <int M>
cplx table_sum(const Table& tb, const double* w, int m_runtime) {
    const int m = M > 0 ? M : m_runtime;
    const int n = tb.n;
    const double* gam = tb.gam.data();
    const double* wr = tb.wr.data();
    const double* wi = tb.wi.data();
    double re = 0.0, im = 0.0;
#pragma omp simd reduction(+ : re, im)
    for (int j = 0; j < n; ++j) {
        double ph = 0.0;
        for (int c = 0; c < m; ++c) ph += w[c] * gam[c * n + j];
        // Separate calls: the fused sincos has no vector variant in libmvec.
        const double cs = std::sin(ph + M_PI_2), sn = std::sin(ph);
        re += wr[j] * cs - wi[j] * sn;
        im += wr[j] * sn + wi[j] * cs;
    }
    return {re, im};
}

cplx dispatch_sum(const Table& tb, const double* w, int m) {
    switch (m) {
        case 2: return table_sum<2>(tb, w, m);
        case 3: return table_sum<3>(tb, w, m);
        case 4: return table_sum<4>(tb, w, m);
        default: return table_sum<0>(tb, w, m);
    }
}

}  // namespace

void run_kernel(const KernelPlan& plan, const std::vector<double>& z, const std::vector<double>& prefactor,
                std::vector<cplx>& values, KernelStats& stats) {
    const int m = plan.dim;
    const std::size_t n = z.size() / static_cast<std::size_t>(m);
    const std::size_t nseg = plan.segments.size();
    const KernelPlan& o = plan;
    values.assign(n, cplx{0.0, 0.0});
    stats = {};

    // Derivative samples for the per-node phase bound.
    std::vector<std::vector<double>> dsamp(nseg);
    for (std::size_t s = 0; s < nseg; ++s) {
        const auto& sp = plan.segments[s];
        dsamp[s].resize(static_cast<std::size_t>(o.bound_samples * m));
        for (int i = 0; i < o.bound_samples; ++i) {
            const double t = sp.start + (sp.end - sp.start) * i / (o.bound_samples - 1);
            plan.velocity(t, dsamp[s].data() + static_cast<std::ptrdiff_t>(i * m));
        }
    }

    // Pass 1: ladder level per (node, segment), panel count min_panels * 2^level.
    std::vector<signed char> level(n * nseg, -1);
    const auto n_signed = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n_signed; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        if (!prefactor.empty() && prefactor[i] == 0.0) continue;
        const double* zi = z.data() + i * static_cast<std::size_t>(m);
        double w[64];
        std::vector<double> wbig;
        double* wp = w;
        if (m > 64) {
            wbig.resize(static_cast<std::size_t>(m));
            wp = wbig.data();
        }
        for (std::size_t s = 0; s < nseg; ++s) {
            const auto& sp = plan.segments[s];
            for (int c = 0; c < m; ++c) wp[c] = plan.lambda * zi[c] - sp.mod[c];
            double bound = 0.0;
            for (int k = 0; k < o.bound_samples; ++k) {
                double v = 0.0;
                for (int c = 0; c < m; ++c) v += wp[c] * dsamp[s][static_cast<std::size_t>(k * m + c)];
                bound = std::max(bound, std::abs(v));
            }
            const double want = o.safety * bound * (sp.end - sp.start) / o.phase_cap;
            int lv = 0;
            while (static_cast<double>(o.min_panels) * std::ldexp(1.0, lv) < want && lv < 60) ++lv;
            level[i * nseg + s] = static_cast<signed char>(lv);
        }
    }

    std::vector<std::vector<Table>> tables(nseg);
    for (std::size_t s = 0; s < nseg; ++s) {
        int top = -1;
        for (std::size_t i = 0; i < n; ++i) top = std::max(top, static_cast<int>(level[i * nseg + s]));
        tables[s].resize(static_cast<std::size_t>(top + 1));
        std::vector<bool> used(static_cast<std::size_t>(top + 1), false);
        for (std::size_t i = 0; i < n; ++i)
            if (level[i * nseg + s] >= 0) used[static_cast<std::size_t>(level[i * nseg + s])] = true;
        for (int lv = 0; lv <= top; ++lv)
            if (used[static_cast<std::size_t>(lv)])
                tables[s][static_cast<std::size_t>(lv)] =
                    build_table(plan, plan.segments[s], static_cast<long long>(o.min_panels) << lv);
    }

    // Pass 2: table sums.
#pragma omp parallel for schedule(dynamic, 32)
    for (std::ptrdiff_t ii = 0; ii < n_signed; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        if (!prefactor.empty() && prefactor[i] == 0.0) continue;
        const double* zi = z.data() + i * static_cast<std::size_t>(m);
        std::vector<double> w(static_cast<std::size_t>(m));
        cplx acc{0.0, 0.0};
        for (std::size_t s = 0; s < nseg; ++s) {
            const auto& sp = plan.segments[s];
            for (int c = 0; c < m; ++c) w[static_cast<std::size_t>(c)] = plan.lambda * zi[c] - sp.mod[c];
            acc += dispatch_sum(tables[s][static_cast<std::size_t>(level[i * nseg + s])], w.data(), m);
        }
        values[i] = prefactor.empty() ? acc : prefactor[i] * acc;
    }

    long long total = 0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long long panels = 0;
        for (std::size_t s = 0; s < nseg; ++s)
            if (level[i * nseg + s] >= 0) panels += static_cast<long long>(o.min_panels) << level[i * nseg + s];
        if (panels == 0) continue;
        ++active;
        stats.max_panels = std::max(stats.max_panels, panels);
        total += panels * gauss16().size();
    }
    stats.mean_points = active ? static_cast<double>(total) / static_cast<double>(active) : 0.0;
}

}  // namespace rlab::detail
