#include "rlab/oscillatory.hpp"

#include "field_kernel.hpp"
#include "rlab/error.hpp"
#include "rlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace rlab {

TestFunction::TestFunction(std::vector<Segment> segments) : segs_(std::move(segments)) {
    std::vector<std::pair<double, double>> spans;
    double total = 0.0;
    for (const auto& s : segs_) {
        if (!std::isfinite(s.start) || !std::isfinite(s.end) || s.end < s.start)
            fail(ErrorKind::Argument, "segment endpoints must be finite and ordered");
        if (!std::isfinite(s.amplitude.real()) || !std::isfinite(s.amplitude.imag()))
            fail(ErrorKind::Argument, "segment amplitude must be finite");
        if (s.sign != 1 && s.sign != -1) fail(ErrorKind::Argument, "segment sign must be +-1");
        if (s.modulation && !(s.modulation->x0.allFinite() && std::isfinite(s.modulation->lambda)))
            fail(ErrorKind::Argument, "modulation must be finite");
        spans.emplace_back(s.start, s.end);
        total += s.end - s.start;
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i)
        if (spans[i].first < spans[i - 1].second) fail(ErrorKind::Argument, "segments overlap");
    if (total > 1.0 + 1e-12) fail(ErrorKind::Argument, "total support exceeds the parameter interval");
}

TestFunction TestFunction::indicator(double start, double end) { Segment s;
    s.start = start;
    s.end = end;
    return TestFunction({s}); }

double TestFunction::support_length() const {
    double total = 0.0;
    for (const auto& s : segs_) total += s.end - s.start;
    return total;
}

TestFunction TestFunction::operator+(const TestFunction& other) const {
    std::vector<Segment> all = segs_;
    all.insert(all.end(), other.segs_.begin(), other.segs_.end());
    return TestFunction(std::move(all));
}

double lp_norm(const TestFunction& f, double p) {
    if (!(p >= 1.0)) fail(ErrorKind::Argument, "p must be at least 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& s : f.segments())
            if (s.end > s.start) m = std::max(m, std::abs(s.amplitude));
        return m;
    }
    double acc = 0.0;
    for (const auto& s : f.segments()) acc += std::pow(std::abs(s.amplitude), p) * (s.end - s.start);
    return std::pow(acc, 1.0 / p);
}

double lorentz_norm(const TestFunction& f, double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0)) fail(ErrorKind::Argument, "Lorentz exponents must be at least 1");
    if (std::isinf(p) && !std::isinf(q)) fail(ErrorKind::Argument, "L^{inf,q} with q < inf is trivial");
    // Decreasing rearrangement of a piecewise-constant modulus.
    std::vector<std::pair<double, double>> steps;
    for (const auto& s : f.segments())
        if (s.end > s.start && std::abs(s.amplitude) > 0.0) steps.emplace_back(std::abs(s.amplitude), s.end - s.start);
    std::stable_sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (std::isinf(p)) return steps.empty() ? 0.0 : steps.front().first;
    double t_prev = 0.0, acc = 0.0;
    for (const auto& [v, len] : steps) {
        const double t = t_prev + len;
        if (std::isinf(q))
            acc = std::max(acc, v * std::pow(t, 1.0 / p));
        else
            acc += std::pow(v, q) * (p / q) * (std::pow(t, q / p) - std::pow(t_prev, q / p));
        t_prev = t;
    }
    return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double smooth_cutoff(double s) {
    const double a = std::abs(s);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    const double up = h(2.0 - a), down = h(a - 1.0);
    return up / (up + down);
}

Amplitude Amplitude::none(int y_dim) {
    return {Eigen::VectorXd::Zero(y_dim), Eigen::VectorXd::Constant(y_dim, inf), 0.0, inf};
}

double Amplitude::y_factor(const Eigen::VectorXd& y) const {
    double v = 1.0;
    for (Eigen::Index i = 0; i < y_radius.size(); ++i)
        if (std::isfinite(y_radius[i])) v *= smooth_cutoff((y[i] - y_center[i]) / y_radius[i]);
    return v;
}

double Amplitude::t_factor(double t) const {
    return std::isfinite(t_radius) ? smooth_cutoff((t - t_center) / t_radius) : 1.0;
}

std::pair<double, double> Amplitude::t_support() const {
    if (!std::isfinite(t_radius)) return {-inf, inf};
    return {t_center - 2.0 * t_radius, t_center + 2.0 * t_radius};
}

class PhaseLift {
public:
    virtual ~PhaseLift() = default;
    virtual int y_dim() const = 0;
    virtual Eigen::VectorXd lift(const Eigen::VectorXd& y) const = 0;
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const = 0;
    /// Hessian in y of lifted coordinate c.
    virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int c) const = 0;
};

namespace {

class GraphLift final : public PhaseLift {
public:
    GraphLift(GraphPatch patch, bool offset) : patch_(std::move(patch)), offset_(offset) {}
    int y_dim() const override { return patch_.base_dim(); }
    Eigen::VectorXd lift(const Eigen::VectorXd& y) const override { return patch_.embed(y, offset_); }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const override { return patch_.embed_jacobian(y); }
    Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int c) const override {
        const auto outs = patch_.output_coords();
        for (std::size_t j = 0; j < outs.size(); ++j)
            if (outs[j] == c) return patch_.hessian(y, static_cast<int>(j));
        return Eigen::MatrixXd::Zero(y_dim(), y_dim());
    }

private:
    GraphPatch patch_;
    bool offset_;
};

class PolyLift final : public PhaseLift {
public:
    PolyLift(int y_dim, std::vector<PhaseSpec::Term> terms, int tdim)
        : ydim_(y_dim), terms_(std::move(terms)), tdim_(tdim) {}
    int y_dim() const override { return ydim_; }

    Eigen::VectorXd lift(const Eigen::VectorXd& y) const override {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(tdim_);
        for (const auto& t : terms_) out[t.t_power] += t.coef * monomial(y, t.y_powers, -1, -1);
        return out;
    }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const override {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(tdim_, ydim_);
        for (const auto& t : terms_)
            for (int i = 0; i < ydim_; ++i) j(t.t_power, i) += t.coef * monomial(y, t.y_powers, i, -1);
        return j;
    }
    Eigen::MatrixXd hessian(const Eigen::VectorXd& y, int c) const override {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ydim_, ydim_);
        for (const auto& t : terms_) {
            if (t.t_power != c) continue;
            for (int i = 0; i < ydim_; ++i)
                for (int k = 0; k < ydim_; ++k) h(i, k) += t.coef * monomial(y, t.y_powers, i, k);
        }
        return h;
    }

private:
    // Monomial with up to two partial derivatives taken (index -1 for none).
    static double monomial(const Eigen::VectorXd& y, const std::vector<int>& pw, int d1, int d2) {
        double v = 1.0;
        for (std::size_t i = 0; i < pw.size(); ++i) {
            int e = pw[i];
            double c = 1.0;
            for (int d : {d1, d2})
                if (d == static_cast<int>(i)) {
                    c *= e;
                    --e;
                }
            if (c == 0.0) return 0.0;
            v *= c * std::pow(y[static_cast<Eigen::Index>(i)], e);
        }
        return v;
    }

    int ydim_;
    std::vector<PhaseSpec::Term> terms_;
    int tdim_;
};

}  // namespace

PhaseSpec PhaseSpec::graph(const Curve& curve, const GraphPatch& patch, bool with_offset, Amplitude amp) {
    if (curve.dim() != patch.ambient_dim()) fail(ErrorKind::Argument, "curve and graph dimensions differ");
    if (amp.y_center.size() != patch.base_dim()) fail(ErrorKind::Argument, "amplitude has wrong dimension");
    PhaseSpec p;
    p.kind_ = Kind::Graph;
    p.gamma_ = curve;
    p.patch_ = patch;
    p.offset_ = with_offset;
    p.lift_ = std::make_shared<GraphLift>(patch, with_offset);
    p.amp_ = std::move(amp);
    return p;
}

PhaseSpec PhaseSpec::custom(int y_dim, std::vector<Term> terms, Amplitude amp) {
    if (y_dim < 1) fail(ErrorKind::Argument, "custom phase needs y_dim >= 1");
    if (amp.y_center.size() != y_dim) fail(ErrorKind::Argument, "amplitude has wrong dimension");
    int tmax = 0;
    for (const auto& t : terms) {
        if (static_cast<int>(t.y_powers.size()) != y_dim || t.t_power < 0 ||
            std::any_of(t.y_powers.begin(), t.y_powers.end(), [](int e) { return e < 0; }))
            fail(ErrorKind::Argument, "malformed custom phase term");
        if (!std::isfinite(t.coef)) fail(ErrorKind::Argument, "non-finite custom phase coefficient");
        tmax = std::max(tmax, t.t_power);
    }
    PhaseSpec p;
    p.kind_ = Kind::CustomPolynomial;
    p.gamma_ = Curve::polynomial(Eigen::MatrixXd::Identity(tmax + 1, tmax + 1));
    p.lift_ = std::make_shared<PolyLift>(y_dim, std::move(terms), tmax + 1);
    p.amp_ = std::move(amp);
    return p;
}

int PhaseSpec::y_dim() const { return lift_->y_dim(); }

PhaseSpec PhaseSpec::with_amplitude(Amplitude amp) const {
    if (amp.y_center.size() != y_dim()) fail(ErrorKind::Argument, "amplitude has wrong dimension");
    PhaseSpec p = *this;
    p.amp_ = std::move(amp);
    return p;
}

Eigen::VectorXd PhaseSpec::lift(const Eigen::VectorXd& y) const { return lift_->lift(y); }
Eigen::MatrixXd PhaseSpec::lift_jacobian(const Eigen::VectorXd& y) const { return lift_->jacobian(y); }

double PhaseSpec::value(const Eigen::VectorXd& y, double t) const { return lift(y).dot(gamma_(t)); }

Eigen::VectorXd PhaseSpec::mixed(const Eigen::VectorXd& y, double t, int j) const {
    return lift_jacobian(y).transpose() * gamma_.derivative(t, j);
}

Eigen::MatrixXd PhaseSpec::mixed_hessian(const Eigen::VectorXd& y, double t) const {
    const Eigen::VectorXd dg = gamma_.derivative(t, 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(y_dim(), y_dim());
    for (int c = 0; c < lift_dim(); ++c)
        if (dg[c] != 0.0) h += dg[c] * lift_->hessian(y, c);
    return h;
}

double PhaseSpec::t_derivative(const Eigen::VectorXd& y, double t, int j) const {
    return lift(y).dot(gamma_.derivative(t, j));
}

namespace {

std::pair<double, double> clipped(const Segment& sg, const Amplitude* amp) {
    double s = sg.start, e = sg.end;
    if (amp) {
        const auto [lo, hi] = amp->t_support();
        s = std::max(s, lo);
        e = std::min(e, hi);
    }
    return {s, e};
}

Eigen::VectorXd combined_frequency(const Segment& sg, const Eigen::VectorXd& z, double lambda) {
    Eigen::VectorXd w = lambda * z;
    if (sg.modulation) {
        if (sg.modulation->x0.size() != z.size()) fail(ErrorKind::Argument, "modulation point has wrong dimension");
        w -= sg.modulation->lambda * sg.modulation->x0;
    }
    return w;
}

cplx lifted_integral(const Curve& gamma, const Eigen::VectorXd& z, double lambda, const TestFunction& f,
                     const Amplitude* amp, const QuadOptions& o, PanelCount* count) {
    if (z.size() != gamma.dim()) fail(ErrorKind::Argument, "evaluation point has wrong dimension");
    const GaussRule& g = gauss16();
    cplx total{0.0, 0.0};
    for (const Segment& sg : f.segments()) {
        const auto [s, e] = clipped(sg, amp);
        if (!(e > s)) continue;
        const Eigen::VectorXd w = combined_frequency(sg, z, lambda);
        double bound = 0.0;
        for (int i = 0; i < o.bound_samples; ++i) {
            const double t = s + (e - s) * i / (o.bound_samples - 1);
            bound = std::max(bound, std::abs(w.dot(gamma.derivative(t, 1))));
        }
        bound *= o.safety;
        const long long np = std::max<long long>(o.min_panels, static_cast<long long>(std::ceil(bound * (e - s) / o.phase_cap)));
        const double h = (e - s) / static_cast<double>(np);
        cplx acc{0.0, 0.0};
        for (long long p = 0; p < np; ++p) {
            const double a = s + static_cast<double>(p) * h;
            for (int j = 0; j < g.size(); ++j) {
                const double t = a + 0.5 * h * (g.nodes[static_cast<std::size_t>(j)] + 1.0);
                const double fac = amp ? amp->t_factor(t) : 1.0;
                if (fac == 0.0) continue;
                acc += (0.5 * h * g.weights[static_cast<std::size_t>(j)] * fac) * std::polar(1.0, w.dot(gamma(t)));
            }
        }
        if (count) {
            count->panels += np;
            count->points += np * g.size();
        }
        total += sg.amplitude * static_cast<double>(sg.sign) * acc;
    }
    return total;
}

void check_resolution(FieldResult& res, const QuadMeasure& mu, int dim, double lambda, const FieldOptions& opts) {
    if (!opts.spacing_rule) return;
    res.required_spacing = required_spacing(opts.rule_dim > 0 ? opts.rule_dim : dim, lambda);
    if (mu.spacing <= res.required_spacing * (1.0 + 1e-9)) return;
    res.resolution_ok = false;
    std::ostringstream os;
    os << "measure spacing " << mu.spacing << " exceeds " << res.required_spacing << " required at lambda=" << lambda;
    if (opts.strict) fail(ErrorKind::Resolution, os.str());
    res.warnings.push_back(os.str());
}

detail::KernelPlan make_plan(const Curve& gamma, double lambda, const TestFunction& f, const Amplitude* amp,
                             const QuadOptions& quad) {
    detail::KernelPlan plan;
    const int m = gamma.dim();
    plan.dim = m;
    plan.lambda = lambda;
    plan.phase_cap = quad.phase_cap;
    plan.min_panels = quad.min_panels;
    plan.bound_samples = quad.bound_samples;
    plan.safety = quad.safety;
    plan.curve = [&gamma, m](double t, double* out) { Eigen::Map<Eigen::VectorXd>(out, m) = gamma(t); };
    plan.velocity = [&gamma, m](double t, double* out) { Eigen::Map<Eigen::VectorXd>(out, m) = gamma.derivative(t, 1); };
    if (amp) plan.t_factor = [amp](double t) { return amp->t_factor(t); };
    for (const Segment& sg : f.segments()) {
        const auto [s, e] = clipped(sg, amp);
        if (!(e > s)) continue;
        detail::SegmentPlan sp;
        sp.start = s;
        sp.end = e;
        sp.weight = sg.amplitude * static_cast<double>(sg.sign);
        sp.mod.assign(static_cast<std::size_t>(m), 0.0);
        if (sg.modulation) {
            if (sg.modulation->x0.size() != m) fail(ErrorKind::Argument, "modulation point has wrong dimension");
            for (int c = 0; c < m; ++c) sp.mod[static_cast<std::size_t>(c)] = sg.modulation->lambda * sg.modulation->x0[c];
        }
        plan.segments.push_back(std::move(sp));
    }
    return plan;
}

void execute(const detail::KernelPlan& plan, const std::vector<double>& z, const std::vector<double>& pre,
             FieldResult& res) {
    detail::KernelStats st;
    detail::run_kernel(plan, z, pre, res.values, st);
    res.max_panels = st.max_panels;
    res.mean_points = st.mean_points;
}

}  // namespace

cplx extension_eval(const Curve& curve, double lambda, const TestFunction& f, const Eigen::VectorXd& x,
                    const QuadOptions& opts, PanelCount* count) {
    if (!x.allFinite()) fail(ErrorKind::Argument, "evaluation point must be finite");
    return lifted_integral(curve, x, lambda, f, nullptr, opts, count);
}

cplx phase_eval(const PhaseSpec& phase, double lambda, const TestFunction& f, const Eigen::VectorXd& y,
                const QuadOptions& opts, PanelCount* count) {
    if (y.size() != phase.y_dim()) fail(ErrorKind::Argument, "evaluation point has wrong dimension");
    const double ay = phase.amplitude().y_factor(y);
    if (ay == 0.0) return {0.0, 0.0};
    return ay * lifted_integral(phase.lift_curve(), phase.lift(y), lambda, f, &phase.amplitude(), opts, count);
}

FieldResult field(const Curve& curve, double lambda, const TestFunction& f, const QuadMeasure& mu,
                  const FieldOptions& opts) {
    if (mu.dim != curve.dim()) fail(ErrorKind::Argument, "measure and curve dimensions differ");
    FieldResult res;
    check_resolution(res, mu, curve.dim(), lambda, opts);
    const detail::KernelPlan plan = make_plan(curve, lambda, f, nullptr, opts.quad);
    execute(plan, mu.nodes, {}, res);
    return res;
}

FieldResult field(const PhaseSpec& phase, double lambda, const TestFunction& f, const QuadMeasure& mu,
                  const FieldOptions& opts) {
    if (mu.dim != phase.y_dim()) fail(ErrorKind::Argument, "measure and phase dimensions differ");
    FieldResult res;
    check_resolution(res, mu, phase.lift_dim(), lambda, opts);
    const int m = phase.lift_dim();
    std::vector<double> z(mu.size() * static_cast<std::size_t>(m), 0.0);
    std::vector<double> pre(mu.size(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const Eigen::VectorXd y = mu.point(i);
        pre[i] = phase.amplitude().y_factor(y);
        if (pre[i] == 0.0) continue;
        const Eigen::VectorXd l = phase.lift(y);
        std::copy(l.data(), l.data() + m, z.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(m)));
    }
    const detail::KernelPlan plan = make_plan(phase.lift_curve(), lambda, f, &phase.amplitude(), opts.quad);
    execute(plan, z, pre, res);
    return res;
}

namespace {

template <class Eval>
FieldResult reference_loop(const QuadMeasure& mu, Eval&& eval) {
    FieldResult res;
    res.values.resize(mu.size());
    long long total = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        PanelCount c;
        res.values[i] = eval(Eigen::VectorXd(mu.point(i)), &c);
        res.max_panels = std::max(res.max_panels, c.panels);
        total += c.points;
    }
    res.mean_points = mu.size() ? static_cast<double>(total) / static_cast<double>(mu.size()) : 0.0;
    return res;
}

}  // namespace

FieldResult field_reference(const Curve& curve, double lambda, const TestFunction& f, const QuadMeasure& mu,
                            const FieldOptions& opts) {
    if (mu.dim != curve.dim()) fail(ErrorKind::Argument, "measure and curve dimensions differ");
    FieldResult check;
    check_resolution(check, mu, curve.dim(), lambda, opts);
    FieldResult res = reference_loop(mu, [&](const Eigen::VectorXd& x, PanelCount* c) {
        return extension_eval(curve, lambda, f, x, opts.quad, c);
    });
    res.resolution_ok = check.resolution_ok;
    res.required_spacing = check.required_spacing;
    res.warnings = std::move(check.warnings);
    return res;
}

FieldResult field_reference(const PhaseSpec& phase, double lambda, const TestFunction& f, const QuadMeasure& mu,
                            const FieldOptions& opts) {
    if (mu.dim != phase.y_dim()) fail(ErrorKind::Argument, "measure and phase dimensions differ");
    FieldResult check;
    check_resolution(check, mu, phase.lift_dim(), lambda, opts);
    FieldResult res = reference_loop(mu, [&](const Eigen::VectorXd& y, PanelCount* c) {
        return phase_eval(phase, lambda, f, y, opts.quad, c);
    });
    res.resolution_ok = check.resolution_ok;
    res.required_spacing = check.required_spacing;
    res.warnings = std::move(check.warnings);
    return res;
}

double lq_power(const std::vector<cplx>& values, const QuadMeasure& mu, double q) {
    if (!(q >= 1.0) || std::isinf(q)) fail(ErrorKind::Argument, "q must be finite and at least 1");
    if (values.size() != mu.size()) fail(ErrorKind::Argument, "field is not sampled on this measure");
    std::vector<double> terms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) terms[i] = mu.weights[i] * std::pow(std::abs(values[i]), q);
    return pairwise_sum(terms);
}

double lq_norm(const std::vector<cplx>& values, const QuadMeasure& mu, double q) {
    if (!(q >= 1.0)) fail(ErrorKind::Argument, "q must be at least 1");
    if (values.size() != mu.size()) fail(ErrorKind::Argument, "field is not sampled on this measure");
    if (std::isinf(q)) {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
    return std::pow(lq_power(values, mu, q), 1.0 / q);
}

void write_field_csv(std::ostream& os, const QuadMeasure& mu, const std::vector<cplx>& values) {
    if (values.size() != mu.size()) fail(ErrorKind::Argument, "field is not sampled on this measure");
    os << "node_index";
    for (int i = 1; i <= mu.dim; ++i) os << ",x" << i;
    os << ",weight,re,im\n";
    char buf[64];
    for (std::size_t n = 0; n < mu.size(); ++n) {
        os << n;
        for (double x : mu.node(n)) {
            std::snprintf(buf, sizeof buf, ",%.17g", x);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g", mu.weights[n]);
        os << buf;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", values[n].real(), values[n].imag());
        os << buf;
    }
}

}  // namespace rlab
