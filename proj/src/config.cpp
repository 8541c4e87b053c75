#include "rlab/config.hpp"

#include "rlab/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace rlab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad(std::string_view text, const std::string& why) {
    fail(ErrorKind::Config, "cannot parse '" + std::string(text) + "': " + why);
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    CallExpr call() {
        CallExpr out;
        out.name = identifier();
        skip();
        if (done()) return out;
        expect('(');
        skip();
        if (peek() != ')') {
            while (true) {
                skip();
                const std::size_t mark = pos_;
                std::string key = identifier_or_empty();
                skip();
                if (!key.empty() && peek() == '=') {
                    ++pos_;
                    out.named[key] = value();
                } else {
                    pos_ = mark;
                    out.positional.push_back(value());
                }
                skip();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        expect(')');
        skip();
        if (!done()) bad(text_, "trailing characters");
        return out;
    }

    ConfigValue value() {
        skip();
        ConfigValue v;
        if (peek() == '[') {
            ++pos_;
            v.is_list = true;
            skip();
            if (peek() == ']') {
                ++pos_;
                return v;
            }
            while (true) {
                v.items.push_back(value());
                skip();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                expect(']');
                return v;
            }
        }
        const std::size_t start = pos_;
        while (!done() && peek() != ',' && peek() != ')' && peek() != ']') ++pos_;
        v.scalar = std::string(trim(text_.substr(start, pos_ - start)));
        if (v.scalar.empty()) bad(text_, "empty value");
        return v;
    }

private:
    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }
    void skip() {
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    void expect(char c) {
        skip();
        if (peek() != c) bad(text_, std::string("expected '") + c + "'");
        ++pos_;
    }
    std::string identifier_or_empty() {
        const std::size_t start = pos_;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        std::string id(text_.substr(start, pos_ - start));
        if (!id.empty() && !std::isalpha(static_cast<unsigned char>(id.front()))) {
            pos_ = start;
            return {};
        }
        return id;
    }
    std::string identifier() {
        skip();
        std::string id = identifier_or_empty();
        if (id.empty()) bad(text_, "expected a name");
        return id;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::vector<std::string_view> split_commas(std::string_view text) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(trim(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

double power_of_two(std::string_view tok) {
    tok = trim(tok);
    if (tok.starts_with("2^")) {
        const Rational e = parse_rational(tok.substr(2));
        return std::pow(2.0, to_double(e));
    }
    return to_double(parse_rational(tok));
}

std::uint64_t parse_seed(const std::string& text) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    bad(text, "seed must be a non-negative integer");
}

bool parse_flag(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    bad(text, "expected true or false");
}

}  // namespace

Rational ConfigValue::rational() const {
    if (is_list) fail(ErrorKind::Config, "expected a number, got a list");
    return parse_rational(scalar);
}

double ConfigValue::number() const {
    if (!is_list && (scalar == "inf" || scalar == "infinity")) return std::numeric_limits<double>::infinity();
    return to_double(rational());
}

std::vector<double> ConfigValue::numbers() const {
    if (!is_list) return {number()};
    std::vector<double> out;
    for (const auto& v : items) out.push_back(v.number());
    return out;
}

Eigen::VectorXd ConfigValue::vector() const {
    const auto n = numbers();
    return Eigen::Map<const Eigen::VectorXd>(n.data(), static_cast<Eigen::Index>(n.size()));
}

const ConfigValue* CallExpr::find(const std::string& key) const {
    const auto it = named.find(key);
    return it == named.end() ? nullptr : &it->second;
}

double CallExpr::number_or(const std::string& key, double fallback) const {
    const ConfigValue* v = find(key);
    return v ? v->number() : fallback;
}

CallExpr parse_call(std::string_view text) { return Parser(trim(text)).call(); }

Curve parse_curve(std::string_view text) {
    const CallExpr e = parse_call(text);
    auto need = [&](std::size_t n) {
        if (e.positional.size() != n) bad(text, e.name + " expects " + std::to_string(n) + " argument(s)");
    };
    if (e.name == "moment") {
        need(1);
        const double d = e.positional[0].number();
        if (d != std::floor(d) || d < 2) bad(text, "dimension must be an integer >= 2");
        return Curve::moment(static_cast<int>(d));
    }
    if (e.name == "monomial") {
        std::vector<int> a;
        const auto& args = e.positional.size() == 1 && e.positional[0].is_list ? e.positional[0].items : e.positional;
        for (const auto& v : args) a.push_back(static_cast<int>(v.number()));
        return Curve::monomial(a);
    }
    if (e.name == "poly") {
        need(1);
        const auto& rows = e.positional[0];
        if (!rows.is_list || rows.items.empty()) bad(text, "poly expects a list of coefficient rows");
        std::size_t width = 0;
        for (const auto& r : rows.items) {
            if (!r.is_list) bad(text, "each poly row must be a list");
            width = std::max(width, r.items.size());
        }
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.items.size()),
                                                  static_cast<Eigen::Index>(width));
        for (std::size_t i = 0; i < rows.items.size(); ++i)
            for (std::size_t j = 0; j < rows.items[i].items.size(); ++j)
                c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows.items[i].items[j].number();
        return Curve::polynomial(c);
    }
    if (e.name == "helix") {
        need(3);
        return Curve::helix(e.positional[0].number(), e.positional[1].number(), e.positional[2].number());
    }
    bad(text, "unknown curve '" + e.name + "'");
}

std::vector<double> parse_lambda_list(std::string_view text) {
    std::vector<double> out;
    for (auto tok : split_commas(text)) {
        if (tok.empty()) bad(text, "empty entry");
        if (const auto dots = tok.find(".."); dots != std::string_view::npos) {
            const std::string_view lo = trim(tok.substr(0, dots)), hi = trim(tok.substr(dots + 2));
            if (!lo.starts_with("2^") || !hi.starts_with("2^")) bad(text, "ranges must be written 2^a..2^b");
            const Rational a = parse_rational(lo.substr(2)), b = parse_rational(hi.substr(2));
            if (a.denominator() != 1 || b.denominator() != 1 || b < a) bad(text, "range exponents must be ordered integers");
            for (auto e = a.numerator(); e <= b.numerator(); ++e) out.push_back(std::ldexp(1.0, static_cast<int>(e)));
        } else {
            out.push_back(power_of_two(tok));
        }
    }
    return out;
}

std::vector<Rational> parse_exponent_list(std::string_view text) {
    std::vector<Rational> out;
    for (auto tok : split_commas(text)) {
        if (tok == "inf" || tok == "infinity") {
            out.emplace_back(0);
            continue;
        }
        const Rational v = parse_rational(tok);
        if (v < 1) bad(text, "exponents must be at least 1");
        out.push_back(Rational(1) / v);
    }
    return out;
}

MeasureSpec parse_measure(std::string_view text) {
    const CallExpr e = parse_call(text);
    MeasureSpec m;
    m.resolution = static_cast<int>(e.number_or("resolution", 0));
    if (e.name == "sphere") {
        m.kind = MeasureSpec::Kind::Sphere;
    } else if (e.name == "box" || e.name == "knapp_box") {
        m.kind = MeasureSpec::Kind::Box;
        m.box_points = static_cast<int>(e.number_or("points", 32));
    } else if (e.name == "hyperplane") {
        m.kind = MeasureSpec::Kind::Hyperplane;
        const ConfigValue* n = e.find("normal");
        if (!n) bad(text, "hyperplane needs normal=[..]");
        m.normal = n->vector();
        m.extent = e.number_or("extent", 1.0);
    } else if (e.name == "singular") {
        m.kind = MeasureSpec::Kind::Singular;
        const ConfigValue* a = e.find("alpha");
        if (!a) bad(text, "singular needs alpha=..");
        m.alpha = a->number();
    } else if (e.name == "submanifold") {
        m.kind = MeasureSpec::Kind::Submanifold;
        m.k = static_cast<int>(e.number_or("k", 2));
        m.extent = e.number_or("extent", 1.0);
    } else {
        bad(text, "unknown measure '" + e.name + "'");
    }
    return m;
}

FamilySpec parse_family(std::string_view text) {
    const CallExpr e = parse_call(text);
    FamilySpec f;
    if (e.name == "knapp") {
        f.kind = FamilySpec::Kind::Knapp;
        f.rho = e.number_or("rho", 0.0);
        f.t0 = e.number_or("t0", 0.5);
    } else if (e.name == "bump") {
        f.kind = FamilySpec::Kind::Bump;
        if (const ConfigValue* x = e.find("x0")) f.x0 = x->vector();
        f.eps0 = e.number_or("eps0", 1.0);
    } else if (e.name == "random") {
        f.kind = FamilySpec::Kind::Random;
        f.delta = e.number_or("delta", 0.25);
        f.n_samples = static_cast<int>(e.number_or("n_samples", 64));
    } else {
        bad(text, "unknown family '" + e.name + "'");
    }
    return f;
}

void SweepConfig::validate() const {
    if (lambdas.empty()) fail(ErrorKind::Config, "lambda list is empty");
    if (q_list.empty()) fail(ErrorKind::Config, "q list is empty");
    if (p_list.empty()) fail(ErrorKind::Config, "p list is empty");
    std::set<double> seen;
    for (double l : lambdas) {
        if (!(l >= 16.0)) fail(ErrorKind::Config, "lambda values must be at least 16");
        if (!seen.insert(l).second) fail(ErrorKind::Config, "lambda values must be distinct");
    }
    for (const auto& iq : q_list)
        if (iq.numerator() == 0) fail(ErrorKind::Config, "q = inf is not supported in sweeps");
    if (family.kind == FamilySpec::Kind::Random && family.n_samples < 1)
        fail(ErrorKind::Config, "n_samples must be positive");
}

SweepConfig parse_config(std::istream& in) {
    // '#' comments are accepted in addition to the ini ';' style.
    std::stringstream clean;
    for (std::string line; std::getline(in, line);) {
        const auto t = trim(line);
        if (!t.empty() && t.front() == '#') continue;
        clean << line << '\n';
    }
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(clean, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorKind::Config, std::string("malformed config: ") + e.what());
    }
    static const std::set<std::string> sections{"curve", "measure", "family", "sweep"};
    for (const auto& [name, sub] : tree) {
        if (!sections.count(name)) fail(ErrorKind::Config, "unknown section [" + name + "]");
        if (sub.empty()) fail(ErrorKind::Config, "key '" + name + "' outside a section");
    }
    auto get = [&](const char* path) { return tree.get_optional<std::string>(path); };

    SweepConfig cfg;
    if (auto v = get("curve.curve")) cfg.curve = parse_curve(*v);
    if (auto v = get("measure.measure")) cfg.measure = parse_measure(*v);
    if (auto v = get("family.family")) cfg.family = parse_family(*v);
    if (auto v = get("family.seed")) cfg.seed = parse_seed(*v);
    if (auto v = get("sweep.lambda")) cfg.lambdas = parse_lambda_list(*v);
    if (auto v = get("sweep.q_list")) cfg.q_list = parse_exponent_list(*v);
    if (auto v = get("sweep.p")) cfg.p_list = parse_exponent_list(*v);
    if (auto v = get("sweep.p_list")) cfg.p_list = parse_exponent_list(*v);
    if (auto v = get("sweep.out")) cfg.out = *v;
    if (auto v = get("sweep.seed")) cfg.seed = parse_seed(*v);
    if (auto v = get("sweep.strict_resolution")) cfg.strict = parse_flag(*v);
    if (auto v = get("sweep.timing")) cfg.timing = parse_flag(*v);
    if (cfg.p_list.empty()) cfg.p_list.emplace_back(0);
    cfg.validate();
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace rlab
