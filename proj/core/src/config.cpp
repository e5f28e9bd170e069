#include "hesseig/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "hesseig/radial.hpp"

namespace hesseig {

namespace {

struct Location {
    int line = 0;
    int column = 0;
};

std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

double parse_real(const std::string& text)
{
    const std::string t = trim(text);
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
        const double num = parse_real(t.substr(0, slash));
        const double den = parse_real(t.substr(slash + 1));
        if (den == 0.0) {
            throw ParameterError("division by zero in '" + t + "'");
        }
        return num / den;
    }
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last) {
        throw ParameterError("expected a number, got '" + t + "'");
    }
    return v;
}

int parse_int(const std::string& text)
{
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ParameterError("expected an integer, got '" + t + "'");
    }
    return v;
}

bool parse_bool(const std::string& text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "yes" || t == "on" || t == "1") {
        return true;
    }
    if (t == "false" || t == "no" || t == "off" || t == "0") {
        return false;
    }
    throw ParameterError("expected true or false, got '" + t + "'");
}

std::vector<double> parse_reals(const std::string& text)
{
    std::vector<double> out;
    if (trim(text).empty()) {
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_real(item));
    }
    return out;
}

std::string fmt(double v)
{
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + fmt(v[i]);
    }
    return out;
}

std::string fmt_bool(bool b)
{
    return b ? "true" : "false";
}

RunMode parse_mode(const std::string& t)
{
    static const std::map<std::string, RunMode> modes = {{"eigen", RunMode::eigen},
                                                         {"oracle", RunMode::oracle},
                                                         {"sweep", RunMode::sweep},
                                                         {"verify", RunMode::verify},
                                                         {"flow", RunMode::flow}};
    const auto it = modes.find(t);
    if (it == modes.end()) {
        throw ParameterError("unknown mode '" + t + "' (eigen, oracle, sweep, verify, flow)");
    }
    return it->second;
}

EigenMethod parse_method(const std::string& t)
{
    if (t == "bisection") {
        return EigenMethod::bisection;
    }
    if (t == "power") {
        return EigenMethod::power;
    }
    throw ParameterError("unknown eigen method '" + t + "' (bisection, power)");
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define HESSEIG_REAL(field) \
    [](RunConfig& c, const std::string& v) { c.field = parse_real(v); }, [](const RunConfig& c) { return fmt(c.field); }
#define HESSEIG_INT(field) \
    [](RunConfig& c, const std::string& v) { c.field = parse_int(v); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }
#define HESSEIG_BOOL(field) \
    [](RunConfig& c, const std::string& v) { c.field = parse_bool(v); }, \
        [](const RunConfig& c) { return fmt_bool(c.field); }
#define HESSEIG_TEXT(field) \
    [](RunConfig& c, const std::string& v) { c.field = v; }, [](const RunConfig& c) { return c.field; }

const std::vector<Key>& registry()
{
    static const std::vector<Key> keys = {
        {"run.mode", [](RunConfig& c, const std::string& v) { c.mode = parse_mode(v); },
         [](const RunConfig& c) { return to_string(c.mode); }},
        {"run.method", [](RunConfig& c, const std::string& v) { c.method = parse_method(v); },
         [](const RunConfig& c) { return to_string(c.method); }},
        {"run.jobs", HESSEIG_INT(jobs)},
        {"problem.n", HESSEIG_INT(spec.n)},
        {"problem.k", HESSEIG_INT(spec.k)},
        {"problem.s", HESSEIG_REAL(spec.s)},
        {"problem.domain", [](RunConfig& c, const std::string& v) { c.spec.domain = parse_domain(v); },
         [](const RunConfig& c) { return c.spec.domain.describe(); }},
        {"problem.delta", [](RunConfig& c, const std::string& v) { c.deltas = parse_reals(v); },
         [](const RunConfig& c) { return fmt_list(c.deltas); }},
        {"solver.h", HESSEIG_REAL(spec.h)},
        {"solver.picard_tol", HESSEIG_REAL(spec.controls.picard_tol)},
        {"solver.max_picard", HESSEIG_INT(spec.controls.max_picard)},
        {"solver.blowup_cap", HESSEIG_REAL(spec.controls.blowup_cap)},
        {"solver.growth_window", HESSEIG_INT(spec.controls.growth_window)},
        {"solver.ratio_confirm", HESSEIG_INT(spec.controls.ratio_confirm)},
        {"solver.monotone_tol", HESSEIG_REAL(spec.controls.monotone_tol)},
        {"solver.bracket_tol", HESSEIG_REAL(spec.controls.bracket_tol)},
        {"solver.lambda_ceiling", HESSEIG_REAL(spec.controls.lambda_ceiling)},
        {"solver.max_bisections", HESSEIG_INT(spec.controls.max_bisections)},
        {"solver.ma_tol", HESSEIG_REAL(spec.controls.ma_tol)},
        {"solver.ma_max_iter", HESSEIG_INT(spec.controls.ma_max_iter)},
        {"solver.ma_scheme",
         [](RunConfig& c, const std::string& v) { c.spec.controls.ma_scheme = parse_ma_scheme(v); },
         [](const RunConfig& c) { return to_string(c.spec.controls.ma_scheme); }},
        {"solver.power_tol", HESSEIG_REAL(spec.controls.power_tol)},
        {"solver.power_max_outer", HESSEIG_INT(spec.controls.power_max_outer)},
        {"solver.beta", HESSEIG_REAL(spec.controls.beta)},
        {"solver.oracle_tol", HESSEIG_REAL(oracle_tol)},
        {"solver.radial_steps", HESSEIG_INT(radial_steps)},
        {"flow.M", HESSEIG_REAL(flow.options.M)},
        {"flow.p", HESSEIG_REAL(flow.options.p)},
        {"flow.t_end", HESSEIG_REAL(flow.options.t_end)},
        {"flow.dt0", HESSEIG_REAL(flow.options.dt0)},
        {"flow.dt_max", HESSEIG_REAL(flow.options.dt_max)},
        {"flow.dt_min", HESSEIG_REAL(flow.options.dt_min)},
        {"flow.max_steps", HESSEIG_INT(flow.options.max_steps)},
        {"flow.residual_tol", HESSEIG_REAL(flow.options.residual_tol)},
        {"flow.descent_slack", HESSEIG_REAL(flow.options.descent_slack)},
        {"flow.scheme", [](RunConfig& c, const std::string& v) { c.flow.options.scheme = parse_flow_scheme(v); },
         [](const RunConfig& c) { return to_string(c.flow.options.scheme); }},
        {"flow.radial", HESSEIG_BOOL(flow.radial)},
        {"flow.radial_samples", HESSEIG_INT(flow.radial_samples)},
        {"verify.snapshot", HESSEIG_TEXT(verify.snapshot)},
        {"verify.lambda", HESSEIG_REAL(verify.lambda)},
        {"verify.scaling", [](RunConfig& c, const std::string& v) { c.verify.scaling = parse_reals(v); },
         [](const RunConfig& c) { return fmt_list(c.verify.scaling); }},
        {"outputs.dir", HESSEIG_TEXT(outputs.dir)},
        {"outputs.csv", HESSEIG_BOOL(outputs.csv)},
        {"outputs.json", HESSEIG_BOOL(outputs.json)},
        {"outputs.binary", HESSEIG_BOOL(outputs.binary)},
    };
    return keys;
}

#undef HESSEIG_REAL
#undef HESSEIG_INT
#undef HESSEIG_BOOL
#undef HESSEIG_TEXT

const Key* find_key(const std::string& name)
{
    for (const auto& k : registry()) {
        if (k.name == name) {
            return &k;
        }
    }
    return nullptr;
}

const std::vector<std::string> kRequired = {"run.mode", "problem.n", "problem.k"};

bool grid_mode(const RunConfig& c)
{
    switch (c.mode) {
    case RunMode::eigen:
    case RunMode::sweep:
    case RunMode::verify:
        return true;
    case RunMode::flow:
        return !c.flow.radial && c.spec.n == 2;
    case RunMode::oracle:
        return false;
    }
    return false;
}

void validate(const RunConfig& c, const std::map<std::string, Location>& where)
{
    auto fail = [&](const std::string& key, const std::string& what) {
        const auto it = where.find(key);
        const Location loc = it == where.end() ? Location{} : it->second;
        throw ConfigError(key + ": " + what, loc.line, loc.column);
    };
    const auto& s = c.spec;
    if (s.n < 1 || s.k < 1 || s.k > s.n) {
        fail("problem.k", "need 1 <= k <= n (n = " + std::to_string(s.n) + ", k = " + std::to_string(s.k) + ")");
    }
    const double floor = weight_exponent_floor(s.n, s.k);
    if (!(s.s > floor)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "violates s > -s0 with s0 = min(1, n/2k) = %g (s = %g)", -floor, s.s);
        fail("problem.s", buf);
    }
    if (c.deltas.empty()) {
        fail("problem.delta", "needs at least one value");
    }
    for (double d : c.deltas) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            fail("problem.delta", "values must be finite and >= 0");
        }
    }
    if (!(s.h > 0.0) || !std::isfinite(s.h)) {
        fail("solver.h", "grid spacing must be positive");
    }
    if (c.jobs < 1) {
        fail("run.jobs", "must be >= 1");
    }
    if (grid_mode(c)) {
        if (s.n != 2 || s.k > 2) {
            fail("problem.k", "grid modes support n = 2 with k in {1, 2}");
        }
        if (s.s < 0.0 && *std::min_element(c.deltas.begin(), c.deltas.end()) <= 0.0) {
            fail("problem.delta", "s < 0 on a grid needs every delta > 0");
        }
    }
    if (c.mode == RunMode::sweep) {
        for (std::size_t i = 1; i < c.deltas.size(); ++i) {
            if (!(c.deltas[i] < c.deltas[i - 1])) {
                fail("problem.delta", "sweep deltas must be strictly decreasing");
            }
        }
        if (c.deltas.back() <= 0.0) {
            fail("problem.delta", "sweep deltas must be > 0");
        }
    }
    if ((c.mode == RunMode::oracle || (c.mode == RunMode::flow && !grid_mode(c))) &&
        s.domain.kind() != DomainKind::disk) {
        fail("problem.domain", "radial modes need a disk domain");
    }
    if (c.mode == RunMode::flow) {
        if (!(c.deltas.front() > 0.0)) {
            fail("problem.delta", "the flow needs delta > 0");
        }
        if (!(c.flow.options.p >= 0.0 && c.flow.options.p < s.k)) {
            fail("flow.p", "needs 0 <= p < k");
        }
        if (!(c.flow.options.M > 1.0)) {
            fail("flow.M", "needs M > 1");
        }
        if (c.flow.radial_samples < 4) {
            fail("flow.radial_samples", "needs >= 4");
        }
    }
    if (c.mode == RunMode::verify && c.verify.snapshot.empty()) {
        fail("verify.snapshot", "verify mode needs a snapshot path");
    }
    try {
        RunConfig probe = c;
        probe.spec.delta = c.deltas.front();
        probe.spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("solver: ") + e.what(), 0, 0);
    }
}

}  // namespace

std::string ConfigError::format(const std::string& what, int line, int column)
{
    if (line <= 0) {
        return what;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}

std::string to_string(RunMode mode)
{
    switch (mode) {
    case RunMode::eigen:
        return "eigen";
    case RunMode::oracle:
        return "oracle";
    case RunMode::sweep:
        return "sweep";
    case RunMode::verify:
        return "verify";
    case RunMode::flow:
        return "flow";
    }
    return "eigen";
}

std::string to_string(EigenMethod method)
{
    return method == EigenMethod::bisection ? "bisection" : "power";
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides)
{
    RunConfig cfg;
    std::map<std::string, Location> where;

    auto assign = [&](const std::string& name, const std::string& value, Location loc) {
        const Key* key = find_key(name);
        if (!key) {
            throw ConfigError("unknown key '" + name + "'", loc.line, loc.column);
        }
        try {
            key->set(cfg, value);
        } catch (const Error& e) {
            throw ConfigError(name + ": " + e.what(), loc.line, loc.column);
        }
        where[name] = loc;
    };

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3) {
                throw ConfigError("malformed section header", line_no, indent);
            }
            section = trim(body.substr(1, body.size() - 2));
            static const std::vector<std::string> sections = {"run", "problem", "solver", "flow", "verify", "outputs"};
            if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
                throw ConfigError("unknown section [" + section + "]", line_no, indent + 1);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", line_no, indent);
        }
        if (section.empty()) {
            throw ConfigError("key outside of any [section]", line_no, indent);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("missing key before '='", line_no, static_cast<int>(eq) + 1);
        }
        const auto value_col = line.find_first_not_of(" \t", eq + 1);
        const int col = value_col == std::string::npos ? static_cast<int>(eq) + 2 : static_cast<int>(value_col) + 1;
        if (where.count(section + "." + key)) {
            throw ConfigError("duplicate key '" + section + "." + key + "'", line_no, indent);
        }
        if (!find_key(section + "." + key)) {
            throw ConfigError("unknown key '" + section + "." + key + "'", line_no, indent);
        }
        assign(section + "." + key, value, {line_no, col});
    }

    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + o + "' is not section.key=value", 0, 0);
        }
        assign(trim(o.substr(0, eq)), trim(o.substr(eq + 1)), {});
    }

    std::vector<std::string> missing;
    for (const auto& r : kRequired) {
        if (!where.count(r)) {
            missing.push_back(r);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) {
            list += (list.empty() ? "" : ", ") + m;
        }
        throw ConfigError("missing required keys: " + list, 0, 0);
    }
    validate(cfg, where);
    cfg.spec.delta = cfg.deltas.front();
    return cfg;
}

std::string to_ini(const RunConfig& config)
{
    std::string out;
    std::string section;
    for (const auto& key : registry()) {
        const auto dot = key.name.find('.');
        const std::string sec = key.name.substr(0, dot);
        if (sec != section) {
            out += (section.empty() ? "" : "\n") + ("[" + sec + "]\n");
            section = sec;
        }
        out += key.name.substr(dot + 1) + " = " + key.get(config) + "\n";
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : registry()) {
        out.emplace_back(k.name, k.get(config));
    }
    return out;
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> out;
    for (const auto& k : registry()) {
        out.push_back(k.name);
    }
    return out;
}

}  // namespace hesseig
