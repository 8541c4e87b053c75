#include "rlab/exponents.hpp"

#include "rlab/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace rlab {

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational to_rational(double x) {
    if (!std::isfinite(x)) fail(ErrorKind::Argument, "cannot convert non-finite value to a rational");
    // Continued fraction expansion, accepted only when it reproduces x exactly.
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(v);
        if (std::abs(a) > 1e15) break;
        const auto ai = static_cast<std::int64_t>(a);
        const std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > (std::int64_t{1} << 20)) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (static_cast<double>(h1) / static_cast<double>(k1) == x) return Rational(h1, k1);
        const double frac = v - a;
        if (frac == 0.0) break;
        v = 1.0 / frac;
    }
    fail(ErrorKind::Argument, "value is not a small-denominator rational");
}

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        fail(ErrorKind::Config, "malformed number '" + std::string(s) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    text = trim(text);
    if (text.empty()) fail(ErrorKind::Config, "empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto den = parse_int(trim(text.substr(slash + 1)));
        if (den == 0) fail(ErrorKind::Config, "zero denominator in '" + std::string(text) + "'");
        return Rational(parse_int(trim(text.substr(0, slash))), den);
    }
    bool neg = false;
    std::string_view body = text;
    if (body.front() == '-' || body.front() == '+') {
        neg = body.front() == '-';
        body.remove_prefix(1);
    }
    std::int64_t num = 0, den = 1;
    const auto dot = body.find('.');
    const std::string_view whole = body.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (whole.empty() && frac.empty()) fail(ErrorKind::Config, "malformed number '" + std::string(text) + "'");
    if (frac.size() > 15) fail(ErrorKind::Config, "too many decimals in '" + std::string(text) + "'");
    if (!whole.empty()) num = parse_int(whole);
    for (char ch : frac) {
        if (ch < '0' || ch > '9') fail(ErrorKind::Config, "malformed number '" + std::string(text) + "'");
        num = num * 10 + (ch - '0');
        den *= 10;
    }
    return Rational(neg ? -num : num, den);
}

ExponentPoint ExponentPoint::from_inverses(Rational inv_p, Rational inv_q) {
    if (inv_p < 0 || inv_p > 1 || inv_q < 0 || inv_q > 1)
        fail(ErrorKind::Argument, "exponent point outside the unit square");
    return {inv_p, inv_q};
}

ExponentPoint ExponentPoint::from_strings(std::string_view p, std::string_view q) {
    auto inv = [](std::string_view s) -> Rational {
        s = trim(s);
        if (s == "inf" || s == "infinity") return Rational(0);
        const Rational v = parse_rational(s);
        if (v < 1) fail(ErrorKind::Argument, "exponent must be at least 1");
        return Rational(1) / v;
    };
    return from_inverses(inv(p), inv(q));
}

int ceil_of(double nu) { return static_cast<int>(std::ceil(nu)); }

std::int64_t ceil_of(const Rational& nu) {
    const std::int64_t n = nu.numerator(), d = nu.denominator();
    return n >= 0 ? (n + d - 1) / d : -((-n) / d);
}

Rational kappa(const TypeTuple& a, const Rational& alpha) {
    const int d = a.dim();
    if (alpha <= 0 || alpha > d) fail(ErrorKind::Argument, "alpha must lie in (0, d]");
    const auto c = static_cast<int>(ceil_of(alpha));
    const int first = d - c;  // 0-based index of a_{d-c+1}
    Rational k = (alpha + 1 - c) * a[first];
    for (int i = first + 1; i < d; ++i) k += a[i];
    return k;
}

double kappa(const TypeTuple& a, double alpha) {
    const int d = a.dim();
    if (!(alpha > 0) || alpha > d) fail(ErrorKind::Argument, "alpha must lie in (0, d]");
    const int c = ceil_of(alpha);
    const int first = d - c;
    double k = (alpha + 1 - c) * a[first];
    for (int i = first + 1; i < d; ++i) k += a[i];
    return k;
}

Rational beta(int d, const Rational& alpha) { return kappa(TypeTuple::nondegenerate(d), alpha); }
double beta(int d, double alpha) { return kappa(TypeTuple::nondegenerate(d), alpha); }

const char* to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::SphereNondegenerate: return "sphere_nondegenerate";
        case RegionKind::FiniteType: return "finite_type";
        case RegionKind::Hyperplane: return "hyperplane";
        case RegionKind::Kdim: return "kdim";
        case RegionKind::AlphaGeneral: return "alpha_general";
    }
    return "?";
}

const char* to_string(PointClass cls) {
    switch (cls) {
        case PointClass::Interior: return "interior";
        case PointClass::Boundary: return "boundary";
        case PointClass::Exterior: return "exterior";
    }
    return "?";
}

const char* to_string(EstimateStatus status) {
    switch (status) {
        case EstimateStatus::Holds: return "holds";
        case EstimateStatus::Fails: return "fails";
        case EstimateStatus::Open: return "open";
    }
    return "?";
}

bool Region::q_above(const ExponentPoint& pt) const { return pt.inv_q * q_threshold < 1; }
bool Region::q_below(const ExponentPoint& pt) const { return pt.inv_q * q_threshold > 1; }
Rational Region::line_value(const ExponentPoint& pt) const { return pt.inv_p + line_coefficient * pt.inv_q; }

PointClass Region::classify(const ExponentPoint& pt) const {
    const Rational line = line_value(pt);
    if (q_below(pt) || line > 1) return PointClass::Exterior;
    if (q_above(pt) && line < 1) return PointClass::Interior;
    return PointClass::Boundary;
}

EstimateStatus Region::status(const ExponentPoint& pt) const {
    const Rational line = line_value(pt);
    switch (kind) {
        case RegionKind::SphereNondegenerate:
            if (q_below(pt) || line > 1) return EstimateStatus::Fails;
            if (q_above(pt) && line < 1) return EstimateStatus::Holds;
            return EstimateStatus::Open;
        case RegionKind::FiniteType:
            if (q_below(pt) || line > 1) return EstimateStatus::Fails;
            if (q_above(pt)) return EstimateStatus::Holds;
            return EstimateStatus::Open;
        case RegionKind::Hyperplane:
            return q_above(pt) && line <= 1 ? EstimateStatus::Holds : EstimateStatus::Fails;
        case RegionKind::Kdim:
            if (q_below(pt)) return EstimateStatus::Fails;
            return EstimateStatus::Open;
        case RegionKind::AlphaGeneral:
            if (line > 1) return EstimateStatus::Fails;
            if (q_above(pt)) return EstimateStatus::Holds;
            return EstimateStatus::Open;
    }
    return EstimateStatus::Open;
}

std::string format_rational(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string format_exponent(const Rational& inverse) {
    if (inverse.numerator() == 0) return "inf";
    return format_rational(1 / inverse);
}

std::string Region::describe() const {
    const std::string l = format_rational(line_coefficient);
    return std::string(to_string(kind)) + "(d=" + std::to_string(d) + "): q_c=" + format_rational(q_threshold) +
           ", line 1/p+" + (line_coefficient.denominator() == 1 ? l : "(" + l + ")") + "/q=1";
}

Region sphere_region(int d) {
    if (d < 2) fail(ErrorKind::Argument, "d must be at least 2");
    return {RegionKind::SphereNondegenerate, d, Rational(d * d + d, 2), Rational(d * d + d - 2, 2)};
}

Region finite_type_region(const Rational& kappa_max, int d) {
    if (d < 2) fail(ErrorKind::Argument, "d must be at least 2");
    if (kappa_max < Rational(d * d + d - 2, 2))
        fail(ErrorKind::Argument, "kappa_max below the nondegenerate value");
    return {RegionKind::FiniteType, d, Rational(d * d + d, 2), kappa_max};
}

Region hyperplane_region(int d, int omega) {
    if (d < 3) fail(ErrorKind::Argument, "hyperplane regions need d >= 3");
    if (omega < 0 || omega > d - 1) fail(ErrorKind::Argument, "omega must lie in [0, d-1]");
    return {RegionKind::Hyperplane, d, Rational(d * (d - 1), 2) + 1, Rational(d * (d - 1), 2) + omega};
}

Region kdim_region(int d, int k) {
    const Rational thr = kdim_threshold(d, k);
    return {RegionKind::Kdim, d, thr, thr - 1};
}

Region alpha_general_region(int d, const TypeTuple& a, const Rational& alpha) {
    if (a.dim() != d) fail(ErrorKind::Argument, "type tuple dimension mismatch");
    return {RegionKind::AlphaGeneral, d, beta(d, alpha) + 1, kappa(a, alpha)};
}

HyperplaneChart hyperplane_project(const Eigen::VectorXd& c_normal, int d) {
    if (c_normal.size() != d) fail(ErrorKind::Argument, "normal has wrong dimension");
    if (d < 2) fail(ErrorKind::Argument, "d must be at least 2");
    if (!c_normal.allFinite() || c_normal.cwiseAbs().maxCoeff() == 0.0)
        fail(ErrorKind::Argument, "zero normal");
    int k = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(c_normal[i]) > std::abs(c_normal[k])) k = i;
    Eigen::VectorXd h(d - 1);
    const Eigen::MatrixXd mc = Curve::moment(d).coefficients();
    Eigen::MatrixXd coeffs(d - 1, d + 1);
    for (int i = 0, r = 0; i < d; ++i) {
        if (i == k) continue;
        h[r] = -c_normal[i] / c_normal[k];
        coeffs.row(r) = mc.row(i) + h[r] * mc.row(k);
        ++r;
    }
    return {k, h, Curve::polynomial(std::move(coeffs))};
}

int hyperplane_omega(const Eigen::VectorXd& c_normal, int d, int grid_n) {
    const HyperplaneChart chart = hyperplane_project(c_normal, d);
    int best = 0;
    for (const auto& s : type_scan(chart.gamma_h, grid_n)) best = std::max(best, s.type.norm1());
    return best - d * (d - 1) / 2;
}

Rational kdim_threshold(int d, int k) {
    if (k < 2 || k > d - 1) fail(ErrorKind::Argument, "k must lie in [2, d-1]");
    return Rational((2 * d - k + 1) * k, 2) + 1;
}

Rational predicted_excess(const ExponentPoint& pt, const ExcessFamily& family, int d) {
    if (d < 2) fail(ErrorKind::Argument, "d must be at least 2");
    if (std::holds_alternative<KnappFamily>(family))
        return (pt.inv_p + Rational(d * d + d - 2, 2) * pt.inv_q - 1) / (2 * d);
    if (std::holds_alternative<RandomFamily>(family))
        return (Rational(d * d + d, 2) * pt.inv_q - 1) / (2 * d);
    const auto& f = std::get<AlphaRectFamily>(family);
    return f.rho * (pt.inv_p + kappa(f.a, f.alpha) * pt.inv_q - 1);
}

}  // namespace rlab
