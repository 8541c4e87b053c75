// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: rlab_acceptance [criterion numbers...]

#include "rlab/cli.hpp"
#include "rlab/config.hpp"
#include "rlab/constructions.hpp"
#include "rlab/error.hpp"
#include "rlab/exponents.hpp"
#include "rlab/harness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#ifndef RLAB_CONFIG_DIR
#define RLAB_CONFIG_DIR "configs"
#endif

using namespace rlab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    // Set when the criterion cannot pass as stated; the line still reports FAIL.
    const char* known_deviation = nullptr;
};

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::string run_cli(std::vector<std::string> args, int* code = nullptr) {
    args.insert(args.begin(), "rlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code) *code = rc;
    return out.str();
}

PhaseSpec sphere_phase(int d) {
    return PhaseSpec::graph(Curve::moment(d), sphere_cap_graph(d, 0), true, Amplitude::none(d - 1));
}

double log_slope(const std::vector<double>& lambdas, const std::vector<double>& values) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        x.push_back(std::log(lambdas[i]));
        y.push_back(std::log(values[i]));
    }
    return fit_slope(x, y).slope;
}

std::vector<double> dyadic(int lo, int hi) {
    std::vector<double> out;
    for (int e = lo; e <= hi; ++e) out.push_back(std::ldexp(1.0, e));
    return out;
}

const SweepFit* find_fit(const SweepResult& r, const Rational& inv_p, const Rational& inv_q) {
    for (const auto& f : r.fits)
        if (f.inv_p == inv_p && f.inv_q == inv_q) return &f;
    return nullptr;
}

// 1
Outcome exponent_tables() {
    bool ok = true;
    std::string detail;
    for (int d = 2; d <= 6; ++d) {
        const std::string out = run_cli({"exponents", "--d", std::to_string(d)});
        const std::string qc = "q_c=" + std::to_string((d * d + d) / 2);
        const std::string line = "1/p+" + std::to_string((d * d + d - 2) / 2) + "/q=1";
        if (out.find(qc) == std::string::npos || out.find(line) == std::string::npos) {
            ok = false;
            detail += "d=" + std::to_string(d) + " mismatch; ";
        }
    }
    const std::string two = run_cli({"exponents", "--d", "2"});
    ok = ok && two.find("q_c=3") != std::string::npos && two.find("1/p+2/q=1") != std::string::npos;
    return {ok, detail.empty() ? "d=2..6 thresholds and lines exact" : detail};
}

// 2
Outcome kappa_identities() {
    std::mt19937_64 gen(2);
    int checked = 0, failures = 0;
    for (int n = 0; n < 500; ++n) {
        const int d = 3 + static_cast<int>(gen() % 4);
        std::vector<int> a;
        int cur = 0;
        for (int i = 0; i < d; ++i) {
            cur += 1 + static_cast<int>(gen() % 3);
            a.push_back(cur);
        }
        if (n % 50 == 0) std::iota(a.begin(), a.end(), 1);
        const TypeTuple t(a);
        const bool nondeg = t == TypeTuple::nondegenerate(d);
        const Rational k = kappa(t, Rational(d - 1)), b = beta(d, Rational(d - 1));
        if (k != Rational(t.norm1() - t[0])) ++failures;
        if (b != Rational(d * (d + 1), 2) - 1) ++failures;
        if (k < b || (k == b) != nondeg) ++failures;
        const Rational alpha(1 + static_cast<std::int64_t>(gen() % (8 * d)), 8);
        if (alpha <= Rational(d)) {
            const Rational ka = kappa(t, alpha), ba = beta(d, alpha);
            if (ka < ba || (ka == ba) != nondeg) ++failures;
        }
        ++checked;
    }
    return {failures == 0, std::to_string(checked) + " tuples, " + std::to_string(failures) + " violations"};
}

// 3
Outcome torsion_type() {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double t = i / 199.0;
        for (int d = 2; d <= 6; ++d) worst = std::max(worst, std::abs(torsion_det(Curve::moment(d), t) - 1.0));
    }
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 4);
    c(0, 1) = 1.0;
    c(1, 3) = 1.0 / 6.0;
    const TypeTuple a = detect_type(Curve::polynomial(c), 0.0);
    const bool ok = worst < 1e-9 && a == TypeTuple({1, 3});
    return {ok, "max torsion error " + num(worst) + ", type (" + std::to_string(a[0]) + "," + std::to_string(a[1]) + ")"};
}

// 4
Outcome stationary_identities() {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double res = 0.0, rel = 0.0;
    for (int d : {2, 3}) {
        const PhaseSpec ph = sphere_phase(d);
        const Curve& c = ph.lift_curve();
        for (int n = 0; n < 100; ++n) {
            const double t = u(gen);
            const Eigen::VectorXd y = solve_stationary(ph, t);
            res = std::max(res, ph.mixed(y, t, 1).norm());
            const double det = curvature_matrix(ph, t, y, 2).determinant();
            const double expect = torsion_det(c, t) / c.derivative(t, 1)[0];
            rel = std::max(rel, std::abs(det - expect) / std::abs(expect));
        }
    }
    return {res <= 1e-10 && rel <= 1e-8, "residual " + num(res) + ", det relative error " + num(rel)};
}

// 5
Outcome knapp_boxes() {
    std::string detail;
    bool ok = true;
    struct Case {
        int d;
        double delta;
        std::vector<double> lambdas;
        double slope;
    };
    for (const Case& cs : {Case{2, 0.5, dyadic(6, 12), -0.5}, Case{3, 1.0, dyadic(4, 7), -7.0 / 6.0}}) {
        const PhaseSpec ph = sphere_phase(cs.d);
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0, c_min = 1.0;
        std::size_t boxes = 0;
        for (double lambda : cs.lambdas) {
            const PartitionFamily part = partition_family(ph, cs.delta, lambda);
            for (std::size_t k = 0; k < part.size(); ++k) {
                CalibrationOptions o;
                o.interval = part.intervals[k];
                const Calibration cal = calibrate_c(ph, part.t[k], lambda, o);
                c_min = std::min(c_min, cal.c);
                const Parallelepiped box = knapp_box(ph, part.t[k], lambda, cal.c);
                double m = cal.max_phase * lambda;
                // Independent random probes of the same supremum.
                for (int s = 0; s < 400; ++s) {
                    Eigen::VectorXd w(box.dim());
                    for (int i = 0; i < box.dim(); ++i) w[i] = box.half_widths[i] * u(gen);
                    const auto [a, b] = part.intervals[k];
                    const double t = a + (b - a) * 0.5 * (u(gen) + 1.0);
                    m = std::max(m, std::abs(reduced_phase(ph, box.from_rect(w), t, box.center, part.t[k])) * lambda);
                }
                worst = std::max(worst, m);
                ++boxes;
            }
        }
        std::vector<double> vol;
        for (double lambda : cs.lambdas) vol.push_back(knapp_box(ph, cs.delta, lambda, c_min).volume());
        const double s = log_slope(cs.lambdas, vol);
        const bool case_ok = worst <= 1.0 && std::abs(s - cs.slope) < 1e-9;
        ok = ok && case_ok;
        detail += "d=" + std::to_string(cs.d) + ": " + std::to_string(boxes) + " boxes, max lambda*|phase| " + num(worst) +
                  ", volume slope " + num(s, 10) + "; ";
    }
    return {ok, detail};
}

// 6
Outcome optimal_decay() {
    const SweepConfig cfg = load_config(RLAB_CONFIG_DIR "/circle_bump.ini");
    const SweepResult r = decay_sweep(cfg);
    bool ok = r.fits.size() == 3;
    std::string detail = "d=2:";
    for (const auto& f : r.fits) {
        const double target = -to_double(f.inv_q);
        ok = ok && std::abs(f.decay.slope - target) <= 0.05 && f.decay.rms < 0.03;
        detail += " q=" + format_exponent(f.inv_q) + " slope " + num(f.decay.slope) + " rms " + num(f.decay.rms, 2) + ";";
    }
    SweepConfig c3 = cfg;
    c3.curve = Curve::moment(3);
    c3.lambdas = dyadic(4, 6);
    c3.q_list = {Rational(1, 7)};
    const SweepResult r3 = decay_sweep(c3);
    const double s3 = r3.fits.at(0).decay.slope;
    ok = ok && std::abs(s3 + 2.0 / 7.0) <= 0.1;
    detail += " d=3 q=7 slope " + num(s3);
    return {ok, detail};
}

// 7
Outcome knapp_necessity() {
    const SweepConfig cfg = load_config(RLAB_CONFIG_DIR "/circle_knapp.ini");
    const SweepResult r = decay_sweep(cfg);
    bool ok = true;
    std::string detail;
    const std::pair<Rational, Rational> cases[] = {
        {Rational(0), Rational(1, 3)}, {Rational(2, 3), Rational(1, 3)}, {Rational(1, 6), Rational(1, 4)}};
    for (const auto& [ip, iq] : cases) {
        const SweepFit* f = find_fit(r, ip, iq);
        if (!f) return {false, "missing fit"};
        const double target = to_double((ip + 2 * iq - 1) / 4);
        ok = ok && std::abs(f->excess.slope - target) <= 0.02;
        detail += "(" + format_exponent(ip) + "," + format_exponent(iq) + ") " + num(f->excess.slope) + " vs " +
                  num(target) + "; ";
    }
    return {ok, detail};
}

// 8
Outcome khintchine() {
    const SweepConfig cfg = load_config(RLAB_CONFIG_DIR "/circle_random.ini");
    const auto recs = khintchine_experiment(cfg);
    double lo = INFINITY, hi = 0.0;
    std::string detail = "ratios";
    for (const auto& r : recs) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
        detail += " " + num(r.ratio);
    }
    detail += ", spread " + num(hi / lo);
    return {recs.size() == 3 && lo > 0.0 && hi / lo <= 3.0, detail};
}

// 9
Outcome hyperplane() {
    bool ok = true;
    std::string detail;
    std::mt19937_64 gen(9);
    for (int d : {3, 4}) {
        const int w1 = hyperplane_omega(Eigen::VectorXd::Unit(d, 0), d);
        const int wd = hyperplane_omega(Eigen::VectorXd::Unit(d, d - 1), d);
        ok = ok && w1 == d - 1 && wd == 0;
        int lo = d, hi = -1;
        for (int n = 0; n < 50; ++n) {
            Eigen::VectorXd c(d);
            do {
                for (int i = 0; i < d; ++i)
                    c[i] = static_cast<double>(static_cast<int>(gen() % 11) - 5) / static_cast<double>(1 + gen() % 4);
            } while (c.cwiseAbs().maxCoeff() == 0.0);
            const int w = hyperplane_omega(c, d);
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        ok = ok && lo >= 0 && hi <= d - 1;
        detail += "d=" + std::to_string(d) + ": e1 " + std::to_string(w1) + ", e_d " + std::to_string(wd) +
                  ", random in [" + std::to_string(lo) + "," + std::to_string(hi) + "]; ";
    }
    return {ok, detail};
}

// 10
Outcome finite_type() {
    const Curve c = Curve::monomial(std::vector<int>{1, 2, 4});
    const int kmax = kappa_max_scan(c);
    const double rho = 1.0 / 8.0;
    const std::vector<double> lambdas = dyadic(8, 16);
    double c_min = 1.0;
    for (double lambda : lambdas) c_min = std::min(c_min, calibrate_necessity(c, 0.0, lambda, rho).c);
    std::vector<double> mass;
    for (double lambda : lambdas) {
        const NecessityRect r = necessity_rect_sphere(c, 0.0, lambda, rho, c_min);
        mass.push_back(graph_box_measure(r.box, r.phase.patch(), 8).total_mass());
    }
    const TypeTuple a({1, 2, 4});
    const double target = -2.0 + rho * (a.norm1() - a[0]);
    const double s = log_slope(lambdas, mass);
    const bool mass_ok = std::abs(s - target) <= 0.05;
    return {kmax == 5 && mass_ok, "kappa_max " + std::to_string(kmax) + " (criterion expects 5), mass slope " + num(s) +
                                      " vs " + num(target) + (mass_ok ? " ok" : " off")};
}

// 11
Outcome kdim() {
    const Submanifold sub = submanifold_builder(4, 2, Curve::moment(4), 2.0, 4);
    double abcd = 0.0, abcd_min_det = INFINITY, block = 0.0;
    for (int n = 0; n < 50; ++n) {
        const double t = n / 49.0;
        const Eigen::VectorXd y = sub.g(t);
        for (int j = 1; j <= sub.l; ++j) abcd = std::max(abcd, sub.mixed(y, t, j).norm());
        Eigen::MatrixXd m(sub.k, sub.k);
        for (int j = 0; j < sub.k; ++j) m.col(j) = sub.mixed(y, t, sub.l + 1 + j);
        abcd_min_det = std::min(abcd_min_det, std::abs(m.determinant()));
    }
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 50; ++n) {
        const double t = u(gen);
        Eigen::MatrixXd full(4, 4);
        full << sub.b2(t), sub.b1(t), sub.a2(t), sub.a1(t);
        const double lhs = full.determinant();
        const double rhs = (sub.b2(t) - sub.b1(t) * sub.a1(t).inverse() * sub.a2(t)).determinant() * sub.a1(t).determinant();
        block = std::max(block, std::abs(lhs - rhs) / std::abs(lhs));
    }
    KdimConfig cfg;
    cfg.lambdas = {16.0, 32.0};
    cfg.q_list = {Rational(7), Rational(8), Rational(10)};
    const KdimResult res = kdim_experiment(cfg);
    bool slopes = res.fits.size() == 3;
    std::string fits;
    for (const auto& f : res.fits) {
        const double q = to_double(f.q);
        slopes = slopes && std::abs(f.closed_form - f.predicted) <= 0.05;
        if (q < 8) slopes = slopes && f.field > 0.0;
        if (q > 8) slopes = slopes && f.field < 0.0;
        if (q == 8) slopes = slopes && std::abs(f.field) <= 0.05;
        fits += " q=" + format_rational(f.q) + " closed " + num(f.closed_form) + " field " + num(f.field) + ";";
    }
    const bool ok = abcd <= 1e-8 && abcd_min_det > 1e-6 && block <= 1e-9 && slopes;
    return {ok, "abcd " + num(abcd) + ", min |det| " + num(abcd_min_det) + ", block " + num(block) + ";" + fits};
}

// 12
Outcome audits() {
    const int n = 10000;
    const double circle = dimension_audit(sphere_measure(2, 1024), 1.0, n, 12).value;
    const double sphere = dimension_audit(sphere_measure(3, 64), 2.0, n, 12).value;
    const double singular = dimension_audit(singular_alpha_measure(2, 1.5, 256), 1.5, n, 12).value;
    const QuadMeasure base = singular_alpha_measure(2, 1.5, 128);
    const TypeTuple a = TypeTuple::nondegenerate(2);
    double scaled = 0.0;
    for (int ell = 0; ell <= 5; ++ell)
        scaled = std::max(scaled, dimension_audit(scaled_measure(base, a, ell, kappa(a, 1.5)), 1.5, n, 12).value);
    const double coarse = dimension_audit(sphere_measure(2, 256), 1.5, n, 12).value;
    const double fine = dimension_audit(sphere_measure(2, 4096), 1.5, n, 12).value;
    const bool ok = circle <= 2 * M_PI + 1 && sphere <= 4 * M_PI + 1 && singular <= 10.0 && scaled <= 10.0 && fine > 2.5 * coarse;
    return {ok, "circle " + num(circle) + ", sphere " + num(sphere) + ", singular " + num(singular) + ", scaled max " +
                    num(scaled) + ", wrong alpha " + num(coarse) + " -> " + num(fine)};
}

// 13
Outcome determinism() {
    auto sweep_csv = [] {
        SweepConfig cfg = load_config(RLAB_CONFIG_DIR "/circle_bump.ini");
        cfg.lambdas = dyadic(6, 8);
        std::ostringstream os;
        const SweepResult r = decay_sweep(cfg);
        write_sweep_csv(os, r, false);
        write_sweep_fits(os, r);
        return os.str();
    };
    auto khin_csv = [] {
        SweepConfig cfg = load_config(RLAB_CONFIG_DIR "/circle_random.ini");
        cfg.lambdas = {256.0, 1024.0};
        std::ostringstream os;
        write_khintchine_csv(os, khintchine_experiment(cfg));
        return os.str();
    };
    auto phase_csv = [] {
        std::ostringstream os;
        write_phase_csv(os, phase_diagram(2, 4, parse_family("random(delta=0.5, n_samples=32)"), {256.0, 1024.0}, 3));
        return os.str();
    };
    const std::vector<std::string> args{"knapp", "--d", "2", "--lambda", "4096", "--delta", "0.5"};
    const bool ok = sweep_csv() == sweep_csv() && khin_csv() == khin_csv() && phase_csv() == phase_csv() &&
                    run_cli(args) == run_cli(args);
    return {ok, "sweep, random-sign, phase-diagram and knapp outputs rerun byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<Criterion> criteria{
        {1, "exponent tables", exponent_tables},
        {2, "kappa/beta identities", kappa_identities},
        {3, "torsion and type", torsion_type},
        {4, "stationary map and curvature identity", stationary_identities},
        {5, "calibrated Knapp boxes", knapp_boxes},
        {6, "optimal decay of the bump family", optimal_decay},
        {7, "Knapp necessity slopes", knapp_necessity},
        {8, "randomized lower bound band", khintchine},
        {9, "hyperplane omega", hyperplane},
        {10, "finite-type region", finite_type,
         "the scan gives |a|_1 - a_1 = 6 at a(0) = (1,2,4); the stated value 5 is inconsistent with that definition"},
        {11, "k-dimensional construction", kdim},
        {12, "measure audits", audits},
        {13, "determinism", determinism},
    };

    int hard_failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << num(secs, 3) << " s): " << o.detail;
        if (!o.pass && c.known_deviation) std::cout << " [known deviation: " << c.known_deviation << "]";
        std::cout << std::endl;
        if (!o.pass && !c.known_deviation) ++hard_failures;
    }
    return hard_failures == 0 ? 0 : 1;
}
