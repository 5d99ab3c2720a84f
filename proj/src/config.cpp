#include "plap/config.hpp"

#include "plap/errors.hpp"
#include "plap/field_io.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace plap {

namespace {

constexpr const char* kSubcommands[] = {"eigen", "solve", "sweep-low", "sweep-high",
                                        "obstacle", "vi", "verify-all"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& text, int line, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
        throw ParseError(line, "'" + key + "' expects a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& text, int line, const std::string& key) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size())
        throw ParseError(line, "'" + key + "' expects an integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string& text, int line, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ParseError(line, "'" + key + "' expects true or false, got '" + text + "'");
}

GrowthRate to_growth(const std::string& text, int line) {
    const std::string head = "lambda1";
    if (text.rfind(head, 0) == 0) {
        const std::string rest = text.substr(head.size());
        if (rest.empty()) return {GrowthRate::Kind::lambda1_plus, 0.0};
        if (rest[0] == '+' || rest[0] == '-') {
            const double v = to_number(rest.substr(1), line, "a");
            return {GrowthRate::Kind::lambda1_plus, rest[0] == '+' ? v : -v};
        }
        if (rest[0] == '*') return {GrowthRate::Kind::lambda1_times, to_number(rest.substr(1), line, "a")};
        throw ParseError(line, "'a' expects a number, lambda1+x or lambda1*x, got '" + text + "'");
    }
    return {GrowthRate::Kind::absolute, to_number(text, line, "a")};
}

void assign(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line) {
    if (key == "subcommand") cfg.subcommand = parse_subcommand(value);
    else if (key == "p") cfg.p = to_number(value, line, key);
    else if (key == "a") cfg.a = to_growth(value, line);
    else if (key == "q") cfg.q = to_number(value, line, key);
    else if (key == "schedule") cfg.schedule = value;
    else if (key == "coef") {
        try {
            cfg.coef = parse_coefficient(value);
        } catch (const Error& e) {
            throw ParseError(line, e.what());
        }
    }
    else if (key == "x_left") cfg.x_left = to_number(value, line, key);
    else if (key == "x_right") cfg.x_right = to_number(value, line, key);
    else if (key == "omega0_left") cfg.omega0_left = to_number(value, line, key);
    else if (key == "omega0_right") cfg.omega0_right = to_number(value, line, key);
    else if (key == "n_cells") cfg.n_cells = static_cast<int>(to_integer(value, line, key));
    else if (key == "tol") cfg.tol = to_number(value, line, key);
    else if (key == "out") cfg.out = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_integer(value, line, key));
    else if (key == "emit_gnuplot") cfg.emit_gnuplot = to_bool(value, line, key);
    else if (key == "k") cfg.k = static_cast<int>(to_integer(value, line, key));
    else throw UnknownKey("'" + key + "'");
}

void check_ranges(const ExperimentConfig& c) {
    if (!(c.p > 1.0)) throw RangeError("p must exceed 1, got " + short_num(c.p));
    if (c.subcommand == Subcommand::solve && !(c.q > c.p - 1.0))
        throw RangeError("q must exceed p - 1");
    if (!(c.x_left < c.x_right)) throw RangeError("x_left must be below x_right");
    if (c.n_cells < 4) throw RangeError("n_cells must be at least 4");
    if (!(c.tol > 0.0)) throw RangeError("tol must be positive");
    if (c.k < 2) throw RangeError("k must be at least 2");
    if (c.omega0_left.has_value() != c.omega0_right.has_value())
        throw RangeError("omega0_left and omega0_right go together");
    if (c.omega0_left && !(c.x_left < *c.omega0_left && *c.omega0_left < *c.omega0_right &&
                           *c.omega0_right < c.x_right))
        throw RangeError("need x_left < omega0_left < omega0_right < x_right");
    if (c.a.kind == GrowthRate::Kind::lambda1_times && !(c.a.value > 0.0))
        throw RangeError("lambda1*x needs x > 0");
    if (c.out.empty()) throw RangeError("out must not be empty");
    try {
        coefficient_field(build_grid(c.x_left, c.x_right, 4), c.coef);
    } catch (const Error& e) {
        throw RangeError(std::string("coef: ") + e.what());
    }
    schedule_values(c);
}

}  // namespace

std::string to_string(Subcommand s) { return kSubcommands[static_cast<int>(s)]; }

Subcommand parse_subcommand(const std::string& name) {
    for (int i = 0; i < 7; ++i)
        if (name == kSubcommands[i]) return static_cast<Subcommand>(i);
    throw UnknownKey("subcommand '" + name + "'");
}

double GrowthRate::resolve(double lambda1) const {
    switch (kind) {
        case Kind::absolute: return value;
        case Kind::lambda1_plus: return lambda1 + value;
        case Kind::lambda1_times: return lambda1 * value;
    }
    return value;
}

std::string to_string(const GrowthRate& a) {
    switch (a.kind) {
        case GrowthRate::Kind::absolute: return format_double(a.value);
        case GrowthRate::Kind::lambda1_plus:
            return a.value < 0.0 ? "lambda1-" + format_double(-a.value) : "lambda1+" + format_double(a.value);
        case GrowthRate::Kind::lambda1_times: return "lambda1*" + format_double(a.value);
    }
    return "";
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ParseError(line, "missing key");
        if (value.empty()) throw ParseError(line, "missing value for '" + key + "'");
        assign(cfg, key, value, line);
    }
    for (const auto& [k, v] : overrides) {
        std::string key = k;
        for (char& ch : key)
            if (ch == '-') ch = '_';
        assign(cfg, key, v, 0);
    }
    check_ranges(cfg);
    return cfg;
}

std::vector<double> schedule_values(const ExperimentConfig& cfg) {
    std::string spec = cfg.schedule;
    if (spec.empty()) {
        if (cfg.subcommand == Subcommand::sweep_low) spec = "halving:8";
        else if (cfg.subcommand == Subcommand::sweep_high) spec = "doubling:4:64";
        else return {};
    }
    std::vector<double> out;
    if (spec.rfind("halving:", 0) == 0) {
        const long long k = to_integer(spec.substr(8), 0, "schedule");
        if (k < 1 || k > 60) throw RangeError("halving:k needs 1 <= k <= 60");
        for (int i = 1; i <= k; ++i) out.push_back(cfg.p - 1.0 + std::ldexp(1.0, -i));
    } else if (spec.rfind("doubling:", 0) == 0) {
        const std::string rest = spec.substr(9);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) throw ParseError(0, "schedule doubling:<lo>:<hi>");
        const double lo = to_number(rest.substr(0, colon), 0, "schedule");
        const double hi = to_number(rest.substr(colon + 1), 0, "schedule");
        if (!(lo > cfg.p - 1.0) || !(hi >= lo)) throw RangeError("doubling schedule needs p-1 < lo <= hi");
        for (double q = lo; q <= hi; q *= 2.0) out.push_back(q);
    } else {
        std::istringstream is(spec);
        std::string item;
        while (std::getline(is, item, ',')) out.push_back(to_number(trim(item), 0, "schedule"));
    }
    if (out.empty()) throw RangeError("empty schedule");
    for (double q : out)
        if (!(q > cfg.p - 1.0)) throw RangeError("schedule entries must exceed p - 1");
    return out;
}

std::string canonical_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "subcommand = " << to_string(c.subcommand) << '\n'
       << "p = " << format_double(c.p) << '\n'
       << "a = " << to_string(c.a) << '\n'
       << "q = " << format_double(c.q) << '\n'
       << "schedule = " << c.schedule << '\n'
       << "coef = " << to_string(c.coef) << '\n'
       << "x_left = " << format_double(c.x_left) << '\n'
       << "x_right = " << format_double(c.x_right) << '\n'
       << "omega0_left = " << (c.omega0_left ? format_double(*c.omega0_left) : "") << '\n'
       << "omega0_right = " << (c.omega0_right ? format_double(*c.omega0_right) : "") << '\n'
       << "n_cells = " << c.n_cells << '\n'
       << "tol = " << format_double(c.tol) << '\n'
       << "seed = " << c.seed << '\n'
       << "emit_gnuplot = " << (c.emit_gnuplot ? "true" : "false") << '\n'
       << "k = " << c.k << '\n';
    return os.str();
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace plap
