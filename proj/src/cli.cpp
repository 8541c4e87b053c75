#include "rlab/cli.hpp"

#include "rlab/config.hpp"
#include "rlab/constructions.hpp"
#include "rlab/error.hpp"
#include "rlab/exponents.hpp"
#include "rlab/harness.hpp"
#include "rlab/measure.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>

namespace rlab {

namespace {

constexpr const char* csv_help = R"(CSV outputs (one header line each):
  sweep          lambda,p,q,f_norm,t_norm,s,ratio,resolution,nodes,max_panels,mean_points,resolution_ok[,wall_seconds]
  sweep fits     p,q,decay_slope,decay_rms,predicted_decay,excess_slope,excess_rms,predicted_excess
  knapp          k,t_k,center_i..,half_width_i..,volume,calibrated_c
  random-lower   lambda,q,intervals,mean,std_error,box_sum,lower,ratio,upper,c,resolution,nodes,max_panels,mean_points
  phase-diagram  inv_p,inv_q,class,status,predicted_excess,measured_excess,off_band,agree
  kdim           lambda,q,boxes,box_sum,count,box_volume,lower,field_mass,c
  kdim fits      q,predicted_slope,closed_form_slope,field_slope
  audit-measure  measure,d,alpha,samples,value,r_floor,r_at_sup
Fit tables go to PATH.fits.csv when --out PATH is given, otherwise after the records on stdout.
Exit codes: 0 success, 2 usage or config error, 3 numerical failure.)";

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool strict = false;
    int threads = 0;
    bool timing = false;
};

/// Primary stream plus the place fit tables go.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
        if (path_.empty()) return;
        file_.open(path_);
        if (!file_) fail(ErrorKind::Config, "cannot write '" + path_ + "'");
    }
    std::ostream& main() { return path_.empty() ? fallback_ : file_; }
    template <class Write>
    void fits(Write&& write) {
        if (path_.empty()) {
            fallback_ << '\n';
            write(fallback_);
            return;
        }
        std::ofstream f(path_ + ".fits.csv");
        if (!f) fail(ErrorKind::Config, "cannot write '" + path_ + ".fits.csv'");
        write(f);
    }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ofstream file_;
};

void apply_threads(int requested) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("RLAB_THREADS")) {
            try {
                n = std::stoi(env);
            } catch (const std::exception&) {
                fail(ErrorKind::Config, "RLAB_THREADS must be a positive integer");
            }
            if (n <= 0) fail(ErrorKind::Config, "RLAB_THREADS must be a positive integer");
        }
    }
    if (n > 0) omp_set_num_threads(n);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const double v : parse_call("list([" + text + "])").positional.at(0).numbers()) {
        if (v != std::floor(v)) fail(ErrorKind::Config, "expected integers in '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string region_line(const Region& r) {
    const std::string l = format_rational(r.line_coefficient);
    return "1/p+" + (r.line_coefficient.denominator() == 1 ? l : "(" + l + ")") + "/q=1";
}

struct ExponentRow {
    int d;
    std::string name;
    Region region;
    std::optional<int> kappa_max;
    std::optional<int> omega;
};

std::string kdim_list(int d) {
    std::string s;
    for (int k = 2; k <= d - 1; ++k) s += (s.empty() ? "" : " ") + std::to_string(k) + ":" + format_rational(kdim_threshold(d, k));
    return s;
}

void print_exponents(std::ostream& os, const std::vector<ExponentRow>& rows, const std::string& format) {
    if (format == "csv") {
        os << "d,region,q_c,line_coefficient,beta,kappa_max,omega,kdim_thresholds\n";
        for (const auto& r : rows)
            os << r.d << ',' << r.name << ',' << format_rational(r.region.q_threshold) << ','
               << format_rational(r.region.line_coefficient) << ',' << format_rational(beta(r.d, Rational(r.d - 1)))
               << ',' << (r.kappa_max ? std::to_string(*r.kappa_max) : "") << ','
               << (r.omega ? std::to_string(*r.omega) : "") << ',' << kdim_list(r.d) << '\n';
    } else if (format == "markdown") {
        os << "| d | region | q_c | line | beta | kappa_max | omega |\n|---|---|---|---|---|---|---|\n";
        for (const auto& r : rows)
            os << "| " << r.d << " | " << r.name << " | " << format_rational(r.region.q_threshold) << " | "
               << region_line(r.region) << " | " << format_rational(beta(r.d, Rational(r.d - 1))) << " | "
               << (r.kappa_max ? std::to_string(*r.kappa_max) : "") << " | "
               << (r.omega ? std::to_string(*r.omega) : "") << " |\n";
    } else {
        for (const auto& r : rows) {
            os << "d=" << r.d << " region=" << r.name;
            if (r.kappa_max) os << " kappa_max=" << *r.kappa_max;
            if (r.omega) os << " omega=" << *r.omega;
            os << "\nq_c=" << format_rational(r.region.q_threshold) << "\nline: " << region_line(r.region)
               << "\nbeta=" << format_rational(beta(r.d, Rational(r.d - 1)));
            if (r.d >= 3) os << "\nkdim thresholds (k:q): " << kdim_list(r.d);
            os << '\n';
        }
    }
}

Curve curve_or_moment(const std::string& text, int d) {
    Curve c = text.empty() ? Curve::moment(d) : parse_curve(text);
    if (c.dim() != d) fail(ErrorKind::Config, "curve dimension differs from --d");
    return c;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical experiments for curve extension operators over fractal and surface measures", "rlab"};
    app.footer(csv_help);
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    Globals g;
    app.add_option("--config", g.config, "Config file ([curve], [measure], [family], [sweep])");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out", g.out, "Output CSV path (default stdout)");
    app.add_flag("--strict", g.strict, "Fail instead of warning on under-resolved measures");
    app.add_option("--threads", g.threads, "Worker threads (fallback: RLAB_THREADS)")->check(CLI::PositiveNumber);
    app.add_flag("--timing", g.timing, "Add wall time to sweep records");

    // exponents
    auto* ex = app.add_subcommand("exponents", "Exponent regions and critical lines");
    std::string ex_d = "2", ex_curve, ex_alpha, ex_normal, ex_format = "text";
    ex->add_option("--d", ex_d, "Dimension or comma list");
    ex->add_option("--curve", ex_curve, "Finite-type curve, e.g. poly([[0,1],[0,0,0.5]])");
    ex->add_option("--alpha", ex_alpha, "Measure dimension for the general alpha region");
    ex->add_option("--normal", ex_normal, "Hyperplane normal, comma separated");
    ex->add_option("--format", ex_format, "text | csv | markdown")->check(CLI::IsMember({"text", "csv", "markdown"}));

    // sweep
    auto* sw = app.add_subcommand("sweep", "Lambda sweep with decay and excess fits (needs --config)");

    // knapp
    auto* kn = app.add_subcommand("knapp", "Calibrated Knapp boxes on the sphere");
    int kn_d = 2;
    double kn_lambda = 1024, kn_t0 = 0.5, kn_rho = 0.0;
    std::optional<double> kn_delta;
    kn->add_option("--d", kn_d, "Dimension (2 or 3)");
    kn->add_option("--lambda", kn_lambda, "Frequency");
    kn->add_option("--t0", kn_t0, "Anchor parameter t_k");
    kn->add_option("--rho", kn_rho, "Box exponent (default 1/(2d))");
    kn->add_option("--delta", kn_delta, "Emit the boxes of the partition of [0, delta] instead");

    // random-lower
    auto* rl = app.add_subcommand("random-lower", "Randomized-sign lower bound experiment");
    int rl_d = 2, rl_samples = 64;
    std::string rl_lambda = "2^8,2^10,2^12", rl_q = "3", rl_p = "inf";
    double rl_delta = 0.25;
    rl->add_option("--d", rl_d, "Dimension (2 or 3)");
    rl->add_option("--lambda", rl_lambda, "Lambda list");
    rl->add_option("--q", rl_q, "q list");
    rl->add_option("--p", rl_p, "p for the upper chain");
    rl->add_option("--delta", rl_delta, "Length of [0, delta]");
    rl->add_option("--samples", rl_samples, "Sign samples");

    // phase-diagram
    auto* pdc = app.add_subcommand("phase-diagram", "Measured excess over a (1/p, 1/q) grid");
    int pd_d = 2, pd_grid = 20;
    std::string pd_family = "knapp", pd_lambda = "2^8,2^12";
    pdc->add_option("--d", pd_d, "Dimension (2 or 3)");
    pdc->add_option("--grid", pd_grid, "Cells per axis");
    pdc->add_option("--family", pd_family, "knapp | bump | random, with optional arguments");
    pdc->add_option("--lambda", pd_lambda, "Two lambda values");

    // hyperplane
    auto* hp = app.add_subcommand("hyperplane", "Degeneracy omega of the moment curve projected to a hyperplane");
    int hp_d = 3;
    std::string hp_normal;
    hp->add_option("--d", hp_d, "Dimension");
    hp->add_option("--normal", hp_normal, "Normal vector, comma separated")->required();

    // kdim
    auto* kd = app.add_subcommand("kdim", "Lower bound for k-dimensional submanifold measures");
    int kd_d = 4, kd_k = 2, kd_points = 24;
    std::string kd_lambda = "2^4,2^5", kd_q = "7,8,10", kd_curve;
    double kd_delta = 1.0, kd_extent = 2.0;
    kd->add_option("--d", kd_d, "Dimension");
    kd->add_option("--k", kd_k, "Submanifold dimension");
    kd->add_option("--curve", kd_curve, "Curve (default moment curve)");
    kd->add_option("--lambda", kd_lambda, "Lambda list");
    kd->add_option("--q", kd_q, "q list");
    kd->add_option("--delta", kd_delta, "Length of [0, delta]");
    kd->add_option("--extent", kd_extent, "Half-width of the submanifold chart");
    kd->add_option("--box-points", kd_points, "Gauss points per box axis");

    // audit-measure
    auto* au = app.add_subcommand("audit-measure", "Monte Carlo ball-mass audit of a measure");
    int au_d = 2, au_samples = 10000, au_level = 0;
    std::string au_measure = "sphere", au_curve;
    std::optional<double> au_alpha;
    au->add_option("--d", au_d, "Dimension");
    au->add_option("--measure", au_measure, "sphere | hyperplane(..) | singular(alpha=..) | submanifold(..)");
    au->add_option("--curve", au_curve, "Curve for submanifold measures (default moment curve)");
    au->add_option("--alpha", au_alpha, "Audited dimension (default: the measure's own)");
    au->add_option("--samples", au_samples, "Monte Carlo samples");
    au->add_option("--level", au_level, "Apply the dyadic rescaling mu_l with the nondegenerate type");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_threads(g.threads);
        const std::uint64_t seed = g.seed.value_or(1);

        if (*ex) {
            std::vector<ExponentRow> rows;
            for (int d : parse_int_list(ex_d)) {
                if (!ex_normal.empty()) {
                    const Eigen::VectorXd n = parse_call("normal([" + ex_normal + "])").positional.at(0).vector();
                    if (n.size() != d) fail(ErrorKind::Config, "normal must have d components");
                    const int w = hyperplane_omega(n, d);
                    rows.push_back({d, "hyperplane", hyperplane_region(d, w), std::nullopt, w});
                } else if (!ex_curve.empty()) {
                    const Curve c = curve_or_moment(ex_curve, d);
                    const int km = kappa_max_scan(c);
                    rows.push_back({d, "finite_type", finite_type_region(Rational(km), d), km, std::nullopt});
                } else if (!ex_alpha.empty()) {
                    rows.push_back({d, "alpha_general",
                                    alpha_general_region(d, TypeTuple::nondegenerate(d), parse_rational(ex_alpha)),
                                    std::nullopt, std::nullopt});
                } else {
                    rows.push_back({d, "sphere_nondegenerate", sphere_region(d), std::nullopt, std::nullopt});
                }
            }
            Sink sink(g.out, out);
            print_exponents(sink.main(), rows, ex_format);
        } else if (*sw) {
            if (g.config.empty()) fail(ErrorKind::Config, "sweep needs --config FILE");
            SweepConfig cfg = load_config(g.config);
            if (g.seed) cfg.seed = *g.seed;
            if (!g.out.empty()) cfg.out = g.out;
            cfg.strict = cfg.strict || g.strict;
            cfg.timing = cfg.timing || g.timing;
            const SweepResult res = decay_sweep(cfg);
            for (const auto& w : res.warnings) err << "warning: " << w << '\n';
            Sink sink(cfg.out, out);
            write_sweep_csv(sink.main(), res, cfg.timing);
            sink.fits([&](std::ostream& os) { write_sweep_fits(os, res); });
        } else if (*kn) {
            const Curve curve = Curve::moment(kn_d);
            const PhaseSpec phase =
                PhaseSpec::graph(curve, sphere_cap_graph(kn_d, 0), true, Amplitude::none(kn_d - 1));
            BoxShape shape;
            shape.rho = kn_rho;
            std::vector<BoxRow> rows;
            if (kn_delta) {
                const PartitionFamily part = partition_family(phase, *kn_delta, kn_lambda, shape);
                for (std::size_t k = 0; k < part.size(); ++k) {
                    CalibrationOptions opts;
                    opts.shape = shape;
                    opts.interval = part.intervals[k];
                    const double c = calibrate_c(phase, part.t[k], kn_lambda, opts).c;
                    rows.push_back({k, part.t[k], knapp_box(phase, part.t[k], kn_lambda, c, shape), c});
                }
            } else {
                CalibrationOptions opts;
                opts.shape = shape;
                const double c = calibrate_c(phase, kn_t0, kn_lambda, opts).c;
                rows.push_back({0, kn_t0, knapp_box(phase, kn_t0, kn_lambda, c, shape), c});
            }
            Sink sink(g.out, out);
            write_box_csv(sink.main(), rows);
        } else if (*rl) {
            SweepConfig cfg;
            if (!g.config.empty()) {
                cfg = load_config(g.config);
            } else {
                cfg.curve = Curve::moment(rl_d);
                cfg.family.kind = FamilySpec::Kind::Random;
                cfg.family.delta = rl_delta;
                cfg.family.n_samples = rl_samples;
                cfg.lambdas = parse_lambda_list(rl_lambda);
                cfg.q_list = parse_exponent_list(rl_q);
                cfg.p_list = parse_exponent_list(rl_p);
            }
            if (g.seed) cfg.seed = *g.seed;
            cfg.strict = cfg.strict || g.strict;
            const auto recs = khintchine_experiment(cfg);
            Sink sink(g.out.empty() ? cfg.out : g.out, out);
            write_khintchine_csv(sink.main(), recs);
        } else if (*pdc) {
            const FamilySpec fam = parse_family(pd_family);
            const PhaseDiagram pd = phase_diagram(pd_d, pd_grid, fam, parse_lambda_list(pd_lambda), seed);
            Sink sink(g.out, out);
            write_phase_csv(sink.main(), pd);
            err << "sign agreement " << pd.agreeing << '/' << pd.off_band << " off-band cells\n";
        } else if (*hp) {
            const Eigen::VectorXd normal = parse_call("normal([" + hp_normal + "])").positional.at(0).vector();
            if (normal.size() != hp_d) fail(ErrorKind::Config, "normal must have d components");
            const int omega = hyperplane_omega(normal, hp_d);
            const Region r = hyperplane_region(hp_d, omega);
            Sink sink(g.out, out);
            sink.main() << "omega=" << omega << "\nq_c=" << format_rational(r.q_threshold)
                        << "\nline: " << region_line(r) << '\n';
        } else if (*kd) {
            KdimConfig cfg;
            cfg.d = kd_d;
            cfg.k = kd_k;
            cfg.curve = curve_or_moment(kd_curve, kd_d);
            cfg.lambdas = parse_lambda_list(kd_lambda);
            for (const auto& iq : parse_exponent_list(kd_q)) {
                if (iq.numerator() == 0) fail(ErrorKind::Config, "q must be finite");
                cfg.q_list.push_back(1 / iq);
            }
            cfg.delta = kd_delta;
            cfg.extent = kd_extent;
            cfg.box_points = kd_points;
            const KdimResult res = kdim_experiment(cfg);
            Sink sink(g.out, out);
            write_kdim_csv(sink.main(), res);
            sink.fits([&](std::ostream& os) {
                os << "q,predicted_slope,closed_form_slope,field_slope\n";
                for (const auto& f : res.fits) {
                    char buf[128];
                    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", f.predicted, f.closed_form, f.field);
                    os << format_rational(f.q) << buf;
                }
            });
        } else if (*au) {
            const Curve curve = curve_or_moment(au_curve, au_d);
            QuadMeasure mu = build_measure(parse_measure(au_measure), curve);
            const double alpha = au_alpha.value_or(mu.alpha);
            if (au_level > 0)
                mu = scaled_measure(mu, TypeTuple::nondegenerate(au_d), au_level,
                                    kappa(TypeTuple::nondegenerate(au_d), mu.alpha));
            const AuditResult a = dimension_audit(mu, alpha, au_samples, seed);
            char buf[160];
            std::snprintf(buf, sizeof buf, ",%d,%.17g,%d,%.17g,%.17g,%.17g\n", au_d, alpha, au_samples, a.value,
                          a.r_floor, a.r_at_sup);
            Sink sink(g.out, out);
            sink.main() << "measure,d,alpha,samples,value,r_floor,r_at_sup\n"
                        << '"' << au_measure << '"' << buf;
        }
    } catch (const Error& e) {
        err << "rlab: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.is_usage_error() ? 2 : 3;
    } catch (const std::exception& e) {
        err << "rlab: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace rlab
