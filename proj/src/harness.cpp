#include "rlab/harness.hpp"

#include "rlab/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace rlab {

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::Argument, "slope fit needs paired samples");
    const std::size_t n = x.size();
    if (n < 2) fail(ErrorKind::Argument, "slope fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) fail(ErrorKind::Argument, "slope fit needs two distinct abscissae");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / static_cast<double>(n));
    return f;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double inv_value(const Rational& r) { return to_double(r); }

double q_of(const Rational& inv_q) { return 1.0 / to_double(inv_q); }

/// ||f||_p for |f| = 1 on a set of measure len.
double unit_lp(double len, const Rational& inv_p) { return std::pow(len, inv_value(inv_p)); }

RunStats stats_of(const QuadMeasure& mu, const FieldResult& fr) {
    return {mu.resolution, mu.size(), fr.max_panels, fr.mean_points, fr.resolution_ok};
}

void merge_stats(RunStats& into, const FieldResult& fr, std::size_t parts) {
    into.max_panels = std::max(into.max_panels, fr.max_panels);
    into.mean_points += fr.mean_points / static_cast<double>(parts);
    into.resolution_ok = into.resolution_ok && fr.resolution_ok;
}

void collect(std::vector<std::string>& out, double lambda, const FieldResult& fr) {
    for (const auto& w : fr.warnings) out.push_back("lambda=" + fmt(lambda) + ": " + w);
}

PhaseSpec sphere_phase(const Curve& curve) {
    const int d = curve.dim();
    return PhaseSpec::graph(curve, sphere_cap_graph(d, 0), true, Amplitude::none(d - 1));
}

double family_rho(const FamilySpec& fam, int d) { return fam.rho > 0.0 ? fam.rho : 1.0 / (2.0 * d); }

/// Ambient measure meeting the spacing rule at lambda; finer grids are built by doubling.
QuadMeasure ambient_measure(const MeasureSpec& spec, const Curve& curve, double lambda) {
    const int d = curve.dim();
    const double need = required_spacing(d, lambda) * (1.0 + 1e-9);
    auto refine = [&](int start, int cap, auto&& build) {
        int res = start;
        QuadMeasure mu = build(res);
        while (mu.spacing > need && res < cap) {
            res = std::min(cap, 2 * res);
            mu = build(res);
        }
        return mu;
    };
    switch (spec.kind) {
        case MeasureSpec::Kind::Sphere:
            return sphere_measure(d, std::max(spec.resolution, sphere_resolution_for(d, lambda)));
        case MeasureSpec::Kind::Hyperplane:
            if (spec.normal.size() != d) fail(ErrorKind::Config, "hyperplane normal has the wrong dimension");
            return refine(spec.resolution > 0 ? spec.resolution : 64, 1 << 16,
                          [&](int r) { return hyperplane_measure(spec.normal, spec.extent, r); });
        case MeasureSpec::Kind::Singular:
            return refine(std::max(16, spec.resolution), 1 << 16,
                          [&](int r) { return singular_alpha_measure(d, spec.alpha, r); });
        case MeasureSpec::Kind::Submanifold:
            return refine(std::max(8, spec.resolution), 1 << 12, [&](int r) {
                return submanifold_builder(d, spec.k, curve, spec.extent, r).measure;
            });
        case MeasureSpec::Kind::Box:
            break;
    }
    fail(ErrorKind::Config, "box measures need the knapp family");
}

/// One lambda of a sweep: the field sampled on a measure, or the per-sample
/// powers of a random-sign family.
struct LambdaRun {
    QuadMeasure mu;
    std::vector<cplx> values;                 // deterministic families
    std::vector<std::vector<cplx>> samples;  // random family
    double support = 0.0;                    // |supp f|
    RunStats stats;
};

double knapp_c(const PhaseSpec& phase, double t_k, const std::vector<double>& lambdas, double rho) {
    CalibrationOptions opts;
    opts.shape.rho = rho;
    double c = 1.0;
    for (double l : lambdas) c = std::min(c, calibrate_c(phase, t_k, l, opts).c);
    return c;
}

LambdaRun run_knapp(const SweepConfig& cfg, double lambda, double c, std::vector<std::string>& warn) {
    const int d = cfg.curve.dim();
    const double rho = family_rho(cfg.family, d);
    const PhaseSpec phase = sphere_phase(cfg.curve);
    const double t_k = cfg.family.t0;
    const double len = std::pow(lambda, -rho);
    if (t_k - len < cfg.curve.t_lo() || t_k > cfg.curve.t_hi())
        fail(ErrorKind::Config, "Knapp interval [t0 - lambda^-rho, t0] leaves the curve domain at lambda=" + fmt(lambda));
    const Eigen::VectorXd y_k = solve_stationary(phase, t_k);
    const TestFunction f = knapp_input(t_k - len, lambda, rho, CurvePhase{phase.lift(y_k), lambda});

    LambdaRun run;
    run.support = len;
    FieldOptions opts;
    opts.strict = cfg.strict;
    FieldResult fr;
    if (cfg.measure.kind == MeasureSpec::Kind::Box) {
        BoxShape shape;
        shape.rho = rho;
        const Parallelepiped box = knapp_box(phase, t_k, lambda, c, shape);
        run.mu = graph_box_measure(box, phase.patch(), cfg.measure.box_points);
        opts.spacing_rule = false;
        fr = field(phase, lambda, f, run.mu, opts);
    } else {
        run.mu = ambient_measure(cfg.measure, cfg.curve, lambda);
        fr = field(cfg.curve, lambda, f, run.mu, opts);
    }
    collect(warn, lambda, fr);
    run.stats = stats_of(run.mu, fr);
    run.values = std::move(fr.values);
    return run;
}

LambdaRun run_bump(const SweepConfig& cfg, double lambda, std::vector<std::string>& warn) {
    const int d = cfg.curve.dim();
    Eigen::VectorXd x0 = cfg.family.x0;
    if (x0.size() == 0) x0 = Eigen::VectorXd::Unit(d, d - 1);
    const double eps0 = std::min(cfg.family.eps0, cfg.curve.t_hi() - cfg.curve.t_lo());
    const TestFunction f = bump_input(cfg.curve, lambda, x0, eps0);
    LambdaRun run;
    run.support = eps0;
    run.mu = ambient_measure(cfg.measure, cfg.curve, lambda);
    FieldOptions opts;
    opts.strict = cfg.strict;
    FieldResult fr = field(cfg.curve, lambda, f, run.mu, opts);
    collect(warn, lambda, fr);
    run.stats = stats_of(run.mu, fr);
    run.values = std::move(fr.values);
    return run;
}

/// Per-interval fields of the partition, then the signed sums of every sample.
LambdaRun run_random(const SweepConfig& cfg, double lambda, std::vector<std::string>& warn) {
    const PhaseSpec phase = sphere_phase(cfg.curve);
    const PartitionFamily part = partition_family(phase, cfg.family.delta, lambda);
    LambdaRun run;
    run.support = cfg.family.delta;
    run.mu = ambient_measure(cfg.measure, cfg.curve, lambda);
    run.stats = {run.mu.resolution, run.mu.size(), 0, 0.0, true};
    FieldOptions opts;
    opts.strict = cfg.strict;
    std::vector<std::vector<cplx>> parts;
    for (std::size_t k = 0; k < part.size(); ++k) {
        FieldResult fr = field(cfg.curve, lambda, interval_input(part, k), run.mu, opts);
        collect(warn, lambda, fr);
        merge_stats(run.stats, fr, part.size());
        parts.push_back(std::move(fr.values));
    }
    const auto n = static_cast<std::size_t>(cfg.family.n_samples);
    const std::vector<int> signs = rademacher_signs(n * part.size(), cfg.seed);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<cplx> sum(run.mu.size(), cplx{0.0, 0.0});
        for (std::size_t k = 0; k < part.size(); ++k) {
            const double e = signs[s * part.size() + k];
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += e * parts[k][i];
        }
        run.samples.push_back(std::move(sum));
    }
    return run;
}

/// ||T f||_q, or (E ||sum eps_k T f_k||_q^q)^{1/q} for the random family.
double run_norm(const LambdaRun& run, double q) {
    if (run.samples.empty()) return lq_norm(run.values, run.mu, q);
    double acc = 0.0;
    for (const auto& s : run.samples) acc += lq_power(s, run.mu, q);
    return std::pow(acc / static_cast<double>(run.samples.size()), 1.0 / q);
}

LambdaRun run_family(const SweepConfig& cfg, double lambda, double c, std::vector<std::string>& warn) {
    switch (cfg.family.kind) {
        case FamilySpec::Kind::Knapp: return run_knapp(cfg, lambda, c, warn);
        case FamilySpec::Kind::Bump: return run_bump(cfg, lambda, warn);
        case FamilySpec::Kind::Random: return run_random(cfg, lambda, warn);
    }
    fail(ErrorKind::Config, "unknown family");
}

double sweep_c(const SweepConfig& cfg) {
    if (cfg.family.kind != FamilySpec::Kind::Knapp || cfg.measure.kind != MeasureSpec::Kind::Box) return 0.0;
    const int d = cfg.curve.dim();
    return knapp_c(sphere_phase(cfg.curve), cfg.family.t0, cfg.lambdas, family_rho(cfg.family, d));
}

void check_family(const SweepConfig& cfg) {
    const int d = cfg.curve.dim();
    if (cfg.family.kind == FamilySpec::Kind::Bump) {
        if (cfg.measure.kind == MeasureSpec::Kind::Box) fail(ErrorKind::Config, "box measures need the knapp family");
        return;
    }
    if (d != 2 && d != 3) fail(ErrorKind::Capability, "knapp and random families need d = 2 or 3");
    if (cfg.family.kind == FamilySpec::Kind::Random && cfg.measure.kind != MeasureSpec::Kind::Sphere)
        fail(ErrorKind::Config, "the random family is measured on the sphere");
    if (cfg.family.kind == FamilySpec::Kind::Knapp && cfg.measure.kind != MeasureSpec::Kind::Sphere &&
        cfg.measure.kind != MeasureSpec::Kind::Box)
        fail(ErrorKind::Config, "the knapp family is measured on the sphere or on its box");
}

double predicted_excess_for(const SweepConfig& cfg, const ExponentPoint& pt) {
    const int d = cfg.curve.dim();
    switch (cfg.family.kind) {
        case FamilySpec::Kind::Bump: return 0.0;
        case FamilySpec::Kind::Random: return to_double(predicted_excess(pt, RandomFamily{}, d));
        case FamilySpec::Kind::Knapp: {
            const AlphaRectFamily fam{TypeTuple::nondegenerate(d), Rational(d - 1),
                                      to_rational(family_rho(cfg.family, d))};
            return to_double(predicted_excess(pt, fam, d));
        }
    }
    return 0.0;
}

/// log ||f||_p grows like -rho/p for the Knapp input; the others have fixed support.
double f_norm_slope(const SweepConfig& cfg, const Rational& inv_p) {
    if (cfg.family.kind != FamilySpec::Kind::Knapp) return 0.0;
    return -family_rho(cfg.family, cfg.curve.dim()) * inv_value(inv_p);
}

}  // namespace

SweepResult decay_sweep(const SweepConfig& cfg) {
    cfg.validate();
    if (cfg.lambdas.size() < 2) fail(ErrorKind::Config, "a slope needs at least two lambda values");
    check_family(cfg);
    SweepResult res;
    const double c = sweep_c(cfg);
    for (double lambda : cfg.lambdas) {
        const auto start = std::chrono::steady_clock::now();
        const LambdaRun run = run_family(cfg, lambda, c, res.warnings);
        const double build = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const auto& inv_p : cfg.p_list) {
            for (const auto& inv_q : cfg.q_list) {
                const auto t0 = std::chrono::steady_clock::now();
                SweepRecord r;
                r.lambda = lambda;
                r.inv_p = inv_p;
                r.inv_q = inv_q;
                const double q = q_of(inv_q);
                r.f_norm = unit_lp(run.support, inv_p);
                r.t_norm = run_norm(run, q);
                r.s = run.mu.alpha / q;
                r.ratio = r.t_norm / (std::pow(lambda, -r.s) * r.f_norm);
                if (!std::isfinite(r.ratio)) fail(ErrorKind::Numerical, "non-finite ratio at lambda=" + fmt(lambda));
                r.stats = run.stats;
                r.wall_seconds = build + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                res.records.push_back(r);
            }
        }
    }
    for (const auto& inv_p : cfg.p_list) {
        for (const auto& inv_q : cfg.q_list) {
            std::vector<double> x, yn, yr;
            double s = 0.0;
            for (const auto& r : res.records) {
                if (r.inv_p != inv_p || r.inv_q != inv_q) continue;
                x.push_back(std::log(r.lambda));
                yn.push_back(std::log(r.t_norm));
                yr.push_back(std::log(r.ratio));
                s = r.s;
            }
            SweepFit fit;
            fit.inv_p = inv_p;
            fit.inv_q = inv_q;
            fit.decay = fit_slope(x, yn);
            fit.excess = fit_slope(x, yr);
            fit.predicted_excess = predicted_excess_for(cfg, ExponentPoint::from_inverses(inv_p, inv_q));
            fit.predicted_decay = fit.predicted_excess - s + f_norm_slope(cfg, inv_p);
            res.fits.push_back(fit);
        }
    }
    return res;
}

std::vector<KhintchineRecord> khintchine_experiment(const SweepConfig& cfg) {
    cfg.validate();
    const int d = cfg.curve.dim();
    if (d != 2 && d != 3) fail(ErrorKind::Capability, "the randomized lower bound needs d = 2 or 3");
    const FamilySpec& fam = cfg.family;
    if (fam.n_samples < 32) fail(ErrorKind::Config, "the randomized lower bound needs at least 32 sign samples");
    for (const auto& iq : cfg.q_list)
        if (iq > Rational(1, 2)) fail(ErrorKind::Config, "the randomized lower bound needs q >= 2");
    const double delta = fam.delta;

    PhaseSpec phase = sphere_phase(cfg.curve);
    double r_y = 0.0;
    for (int i = 0; i <= 64; ++i) r_y = std::max(r_y, solve_stationary(phase, delta * i / 64.0).cwiseAbs().maxCoeff());
    r_y = std::max(1.25 * r_y, 0.05);
    if (!(2.0 * r_y * std::sqrt(d - 1.0) < 1.0)) fail(ErrorKind::Config, "delta too large for the sphere chart");
    Amplitude amp{Eigen::VectorXd::Zero(d - 1), Eigen::VectorXd::Constant(d - 1, r_y), delta / 2, delta / 2};
    phase = phase.with_amplitude(amp);

    std::vector<PartitionFamily> parts;
    double c = 1.0;
    for (double lambda : cfg.lambdas) {
        parts.push_back(partition_family(phase, delta, lambda));
        const auto& part = parts.back();
        for (std::size_t k = 0; k < part.size(); ++k) {
            CalibrationOptions opts;
            opts.interval = part.intervals[k];
            try {
                c = std::min(c, calibrate_c(phase, part.t[k], lambda, opts).c);
            } catch (const Error& e) {
                fail(e.kind(), "interval " + std::to_string(k) + ": " + e.what());
            }
        }
    }

    std::vector<KhintchineRecord> out;
    const auto n = static_cast<std::size_t>(fam.n_samples);
    const Rational inv_p = cfg.p_list.front();
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        const double lambda = cfg.lambdas[li];
        const PartitionFamily& part = parts[li];
        const double spacing = required_spacing(d, lambda);
        const double side = 4.0 * r_y;
        const int res = static_cast<int>(std::ceil(side * std::sqrt(d - 1.0) / spacing));
        const QuadMeasure mu = coordinate_box_measure(Eigen::VectorXd::Zero(d - 1),
                                                      Eigen::VectorXd::Constant(d - 1, 2.0 * r_y), res);
        FieldOptions opts;
        opts.strict = cfg.strict;
        opts.rule_dim = d;
        RunStats stats{mu.resolution, mu.size(), 0, 0.0, true};
        std::vector<std::vector<cplx>> fields;
        double box_sum = 0.0;
        for (std::size_t k = 0; k < part.size(); ++k) {
            FieldResult fr = field(phase, lambda, interval_input(part, k), mu, opts);
            merge_stats(stats, fr, part.size());
            fields.push_back(std::move(fr.values));
            box_sum += knapp_box(phase, part.t[k], lambda, c).volume();
        }
        const std::vector<int> signs = rademacher_signs(n * part.size(), cfg.seed);
        std::vector<std::vector<cplx>> sums;
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<cplx> sum(mu.size(), cplx{0.0, 0.0});
            for (std::size_t k = 0; k < part.size(); ++k) {
                const double e = signs[s * part.size() + k];
                for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += e * fields[k][i];
            }
            sums.push_back(std::move(sum));
        }
        for (const auto& inv_q : cfg.q_list) {
            const double q = q_of(inv_q);
            std::vector<double> vals;
            for (const auto& s : sums) vals.push_back(lq_power(s, mu, q));
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            var /= static_cast<double>(n - 1);
            KhintchineRecord r;
            r.lambda = lambda;
            r.inv_q = inv_q;
            r.intervals = part.size();
            r.mean = mean;
            r.std_error = std::sqrt(var / static_cast<double>(n));
            r.box_sum = box_sum;
            r.lower = std::pow(lambda, -q / (2.0 * d)) * box_sum;
            r.ratio = mean / r.lower;
            r.upper = std::pow(lambda, -(d - 1.0)) * std::pow(delta, q * inv_value(inv_p));
            r.c = c;
            r.stats = stats;
            out.push_back(r);
        }
    }
    return out;
}

PhaseDiagram phase_diagram(int d, int grid_n, const FamilySpec& family, const std::vector<double>& lambda_pair,
                           std::uint64_t seed) {
    if (lambda_pair.size() != 2) fail(ErrorKind::Argument, "phase diagram needs exactly two lambda values");
    if (grid_n < 1) fail(ErrorKind::Argument, "grid size must be positive");
    SweepConfig cfg;
    cfg.curve = Curve::moment(d);
    cfg.family = family;
    cfg.seed = seed;
    cfg.lambdas = lambda_pair;
    cfg.measure.kind = family.kind == FamilySpec::Kind::Knapp ? MeasureSpec::Kind::Box : MeasureSpec::Kind::Sphere;
    cfg.q_list = {Rational(1, 2)};
    cfg.p_list = {Rational(0)};
    cfg.validate();
    check_family(cfg);

    const double c = sweep_c(cfg);
    std::vector<std::string> warn;
    std::vector<LambdaRun> runs;
    for (double l : lambda_pair) runs.push_back(run_family(cfg, l, c, warn));
    const double dlog = std::log(lambda_pair[1]) - std::log(lambda_pair[0]);

    const Region region = sphere_region(d);
    PhaseDiagram pd;
    pd.d = d;
    for (int j = 0; j < grid_n; ++j) {
        const Rational inv_q(2 * j + 1, 2 * grid_n);
        const double q = q_of(inv_q);
        double log_t[2];
        for (int m = 0; m < 2; ++m) log_t[m] = std::log(run_norm(runs[static_cast<std::size_t>(m)], q));
        for (int i = 0; i < grid_n; ++i) {
            const Rational inv_p(2 * i + 1, 2 * grid_n);
            const ExponentPoint pt = ExponentPoint::from_inverses(inv_p, inv_q);
            PhaseCell cell;
            cell.inv_p = inv_p;
            cell.inv_q = inv_q;
            cell.cls = region.classify(pt);
            cell.status = region.status(pt);
            cell.predicted = predicted_excess_for(cfg, pt);
            double log_ratio[2];
            for (int m = 0; m < 2; ++m) {
                const double lambda = lambda_pair[static_cast<std::size_t>(m)];
                const double s = runs[static_cast<std::size_t>(m)].mu.alpha / q;
                log_ratio[m] = log_t[m] + s * std::log(lambda) -
                               std::log(unit_lp(runs[static_cast<std::size_t>(m)].support, inv_p));
            }
            cell.measured = (log_ratio[1] - log_ratio[0]) / dlog;
            cell.off_band = std::abs(cell.predicted) > boundary_band;
            cell.agree = cell.off_band && (cell.measured > 0) == (cell.predicted > 0);
            if (cell.off_band) ++pd.off_band;
            if (cell.agree) ++pd.agreeing;
            pd.cells.push_back(cell);
        }
    }
    return pd;
}

KdimResult kdim_experiment(const KdimConfig& cfg) {
    if (cfg.lambdas.size() < 2) fail(ErrorKind::Argument, "a slope needs at least two lambda values");
    if (cfg.q_list.empty()) fail(ErrorKind::Argument, "q list is empty");
    const int d = cfg.d;
    KdimResult res{{}, {}, submanifold_builder(d, cfg.k, cfg.curve, cfg.extent, 4)};
    const Submanifold& sub = res.sub;
    const PhaseSpec phase = submanifold_phase(sub);
    const double rho = 1.0 / (2.0 * d);

    double c = 1.0;
    for (double l : cfg.lambdas) c = std::min(c, calibrate_kdim(sub, l, cfg.delta).c);

    for (double lambda : cfg.lambdas) {
        const std::vector<KdimBox> boxes = kdim_boxes(sub, lambda, c, cfg.delta);
        double box_sum = 0.0;
        for (const auto& b : boxes) box_sum += b.box.volume();
        const Parallelepiped& last = boxes.back().box;
        const double count = cfg.delta * std::pow(lambda, rho);
        const double len = std::pow(lambda, -rho);
        if (cfg.delta - len < cfg.curve.t_lo()) fail(ErrorKind::Argument, "input interval leaves the curve domain");
        const TestFunction f = knapp_input(cfg.delta - len, lambda, rho, CurvePhase{phase.lift(sub.g(cfg.delta)), lambda});
        const QuadMeasure mu = graph_box_measure(last, &sub.patch, cfg.box_points);
        FieldOptions opts;
        opts.spacing_rule = false;
        const FieldResult fr = field(phase, lambda, f, mu, opts);
        for (const auto& q : cfg.q_list) {
            const double qd = to_double(q);
            KdimRecord r;
            r.lambda = lambda;
            r.q = q;
            r.boxes = boxes.size();
            r.box_sum = box_sum;
            r.count = count;
            r.box_volume = last.volume();
            r.lower = std::pow(lambda, -qd * rho) * count * r.box_volume;
            r.field_mass = count * lq_power(fr.values, mu, qd);
            r.c = c;
            res.records.push_back(r);
        }
    }
    const Rational thr = kdim_threshold(d, cfg.k);
    for (const auto& q : cfg.q_list) {
        std::vector<double> x, yc, yf;
        for (const auto& r : res.records) {
            if (r.q != q) continue;
            const double shift = cfg.k * std::log(r.lambda);  // divide by lambda^{-k}
            x.push_back(std::log(r.lambda));
            yc.push_back(std::log(r.lower) + shift);
            yf.push_back(std::log(r.field_mass) + shift);
        }
        res.fits.push_back({q, to_double((thr - q) / (2 * d)), fit_slope(x, yc).slope, fit_slope(x, yf).slope});
    }
    return res;
}

QuadMeasure build_measure(const MeasureSpec& spec, const Curve& curve) {
    const int d = curve.dim();
    const int res = spec.resolution;
    switch (spec.kind) {
        case MeasureSpec::Kind::Sphere: return sphere_measure(d, res > 0 ? res : default_sphere_resolution(d));
        case MeasureSpec::Kind::Hyperplane:
            if (spec.normal.size() != d) fail(ErrorKind::Config, "hyperplane normal has the wrong dimension");
            return hyperplane_measure(spec.normal, spec.extent, res > 0 ? res : 256);
        case MeasureSpec::Kind::Singular: return singular_alpha_measure(d, spec.alpha, res > 0 ? res : 256);
        case MeasureSpec::Kind::Submanifold:
            return submanifold_builder(d, spec.k, curve, spec.extent, res > 0 ? res : 32).measure;
        case MeasureSpec::Kind::Box: break;
    }
    fail(ErrorKind::Config, "box measures exist only around a Knapp box");
}

void write_sweep_csv(std::ostream& os, const SweepResult& res, bool timing) {
    os << "lambda,p,q,f_norm,t_norm,s,ratio,resolution,nodes,max_panels,mean_points,resolution_ok";
    if (timing) os << ",wall_seconds";
    os << '\n';
    for (const auto& r : res.records) {
        os << fmt(r.lambda) << ',' << format_exponent(r.inv_p) << ',' << format_exponent(r.inv_q) << ','
           << fmt(r.f_norm) << ',' << fmt(r.t_norm) << ',' << fmt(r.s) << ',' << fmt(r.ratio) << ','
           << r.stats.resolution << ',' << r.stats.nodes << ',' << r.stats.max_panels << ','
           << fmt(r.stats.mean_points) << ',' << (r.stats.resolution_ok ? 1 : 0);
        if (timing) os << ',' << fmt(r.wall_seconds);
        os << '\n';
    }
}

void write_sweep_fits(std::ostream& os, const SweepResult& res) {
    os << "p,q,decay_slope,decay_rms,predicted_decay,excess_slope,excess_rms,predicted_excess\n";
    for (const auto& f : res.fits)
        os << format_exponent(f.inv_p) << ',' << format_exponent(f.inv_q) << ',' << fmt(f.decay.slope) << ','
           << fmt(f.decay.rms) << ',' << fmt(f.predicted_decay) << ',' << fmt(f.excess.slope) << ','
           << fmt(f.excess.rms) << ',' << fmt(f.predicted_excess) << '\n';
}

void write_khintchine_csv(std::ostream& os, const std::vector<KhintchineRecord>& recs) {
    os << "lambda,q,intervals,mean,std_error,box_sum,lower,ratio,upper,c,resolution,nodes,max_panels,mean_points\n";
    for (const auto& r : recs)
        os << fmt(r.lambda) << ',' << format_exponent(r.inv_q) << ',' << r.intervals << ',' << fmt(r.mean) << ','
           << fmt(r.std_error) << ',' << fmt(r.box_sum) << ',' << fmt(r.lower) << ',' << fmt(r.ratio) << ','
           << fmt(r.upper) << ',' << fmt(r.c) << ',' << r.stats.resolution << ',' << r.stats.nodes << ','
           << r.stats.max_panels << ',' << fmt(r.stats.mean_points) << '\n';
}

void write_phase_csv(std::ostream& os, const PhaseDiagram& pd) {
    os << "inv_p,inv_q,class,status,predicted_excess,measured_excess,off_band,agree\n";
    for (const auto& c : pd.cells)
        os << format_rational(c.inv_p) << ',' << format_rational(c.inv_q) << ',' << to_string(c.cls) << ','
           << to_string(c.status) << ',' << fmt(c.predicted) << ',' << fmt(c.measured) << ',' << (c.off_band ? 1 : 0)
           << ',' << (c.agree ? 1 : 0) << '\n';
}

void write_kdim_csv(std::ostream& os, const KdimResult& res) {
    os << "lambda,q,boxes,box_sum,count,box_volume,lower,field_mass,c\n";
    for (const auto& r : res.records)
        os << fmt(r.lambda) << ',' << format_rational(r.q) << ',' << r.boxes << ',' << fmt(r.box_sum) << ','
           << fmt(r.count) << ',' << fmt(r.box_volume) << ',' << fmt(r.lower) << ',' << fmt(r.field_mass) << ','
           << fmt(r.c) << '\n';
}

}  // namespace rlab
