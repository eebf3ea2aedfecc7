#include "vfsk/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "vfsk/cli/recipes.hpp"
#include "vfsk/io.hpp"

namespace vfsk::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Call {
    std::string name;
    std::vector<double> args;
};

Call parse_call(std::string_view expr, const char* what) {
    expr = trim(expr);
    Call c;
    const auto open = expr.find('(');
    if (open == std::string_view::npos) {
        c.name = std::string(expr);
        return c;
    }
    if (expr.back() != ')') throw InvalidArgument(std::string(what) + " expression missing ')': " + std::string(expr));
    c.name = std::string(trim(expr.substr(0, open)));
    const auto inner = expr.substr(open + 1, expr.size() - open - 2);
    if (!trim(inner).empty()) {
        for (auto part : split(inner, ',')) {
            const auto v = to_double(part);
            if (!v) throw InvalidArgument(std::string(what) + " argument is not a number: '" + std::string(part) + "'");
            c.args.push_back(*v);
        }
    }
    return c;
}

[[noreturn]] void bad_arity(const Call& c, const char* expected) {
    throw InvalidArgument(c.name + " takes " + expected + " arguments, got " + std::to_string(c.args.size()));
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& message)
    : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

FrictionField parse_friction(std::string_view expr, int dimension) {
    const Call c = parse_call(expr, "friction");
    const auto& a = c.args;
    if (c.name == "constant") {
        if (a.size() != 1) bad_arity(c, "1");
        return fields::constant(a[0], dimension);
    }
    if (c.name == "sinusoidal") {
        if (a.size() == 3) return fields::sinusoidal(a[0], a[1], {a[2], 0, 0}, dimension);
        if (a.size() == 4) return fields::sinusoidal(a[0], a[1], {a[2], a[3], 0}, 2);
        bad_arity(c, "3 (c0, c1, k) or 4 (c0, c1, k1, k2)");
    }
    if (c.name == "tanh_ramp") {
        if (a.size() != 3) bad_arity(c, "3");
        return fields::tanh_ramp(a[0], a[1], a[2]);
    }
    if (c.name == "step") {
        if (a.size() != 2) bad_arity(c, "2");
        return fields::step(a[0], a[1]);
    }
    if (c.name == "clipped_linear") {
        if (a.size() != 3) bad_arity(c, "3");
        return fields::clipped_linear(a[0], a[1], a[2], dimension);
    }
    throw InvalidArgument("unknown friction '" + c.name +
                          "' (expected constant, sinusoidal, tanh_ramp, step or clipped_linear)");
}

DriftField parse_drift(std::string_view expr, int dimension) {
    const Call c = parse_call(expr, "drift");
    const auto& a = c.args;
    if (c.name == "zero") {
        if (!a.empty()) bad_arity(c, "no");
        return drifts::zero(dimension);
    }
    if (c.name == "constant") {
        if (a.size() == 1) return drifts::constant({a[0], 0, 0}, dimension);
        if (a.size() == 2) return drifts::constant({a[0], a[1], 0}, 2);
        bad_arity(c, "1 or 2");
    }
    if (c.name == "sinusoidal") {
        if (a.size() == 2) return drifts::sinusoidal({a[0], 0, 0}, {a[1], 0, 0}, dimension);
        if (a.size() == 4) return drifts::sinusoidal({a[0], a[1], 0}, {a[2], a[3], 0}, 2);
        bad_arity(c, "2 (a, k) or 4 (a1, a2, k1, k2)");
    }
    throw InvalidArgument("unknown drift '" + c.name + "' (expected zero, constant or sinusoidal)");
}

const std::vector<ParamSpec>& common_params() {
    static const std::vector<ParamSpec> p{
        {"seed", ParamType::Integer, "1", "master seed", false, 1, {}},
        {"workers", ParamType::Integer, "0", "worker threads (0: one per hardware thread)", false, 1, {}},
    };
    return p;
}

namespace {

const char* type_name(ParamType t) {
    switch (t) {
        case ParamType::Real: return "a real number";
        case ParamType::Integer: return "a non-negative integer";
        case ParamType::RealList: return "a comma-separated list of real numbers";
        case ParamType::Friction:
        case ParamType::SmoothFriction: return "a friction expression";
        case ParamType::Drift: return "a drift expression";
        case ParamType::Choice: return "one of the listed choices";
    }
    return "a value";
}

ConfigValue resolve(const ParamSpec& spec, std::string text, int line) {
    ConfigValue v;
    v.spec = spec;
    v.text = std::move(text);
    v.line = line;
    auto mismatch = [&](const std::string& why = {}) -> ConfigError {
        return ConfigError(line, "type mismatch for '" + spec.key + "': expected " + type_name(spec.type) +
                                     ", got '" + v.text + "'" + (why.empty() ? "" : " (" + why + ")"));
    };
    switch (spec.type) {
        case ParamType::Real: {
            const auto d = to_double(v.text);
            if (!d) throw mismatch();
            v.real = *d;
            if (spec.positive && !(v.real > 0.0)) throw ConfigError(line, "'" + spec.key + "' must be positive");
            break;
        }
        case ParamType::Integer: {
            const auto d = to_double(v.text);
            if (!d || *d < 0.0 || *d != std::floor(*d) || *d > 9.0e15) throw mismatch();
            v.integer = static_cast<std::int64_t>(*d);
            if (spec.positive && v.integer == 0) throw ConfigError(line, "'" + spec.key + "' must be positive");
            break;
        }
        case ParamType::RealList: {
            for (auto part : split(v.text, ',')) {
                const auto d = to_double(part);
                if (!d) throw mismatch();
                if (spec.positive && !(*d > 0.0))
                    throw ConfigError(line, "'" + spec.key + "' entries must be positive");
                v.list.push_back(*d);
            }
            break;
        }
        case ParamType::Friction:
        case ParamType::SmoothFriction: {
            try {
                v.friction = parse_friction(v.text, spec.dimension);
            } catch (const InvalidArgument& e) {
                throw mismatch(e.what());
            }
            if (spec.type == ParamType::SmoothFriction && v.friction->is_piecewise_constant())
                throw ConfigError(line, "'" + spec.key + "': step friction unsupported by integrators");
            if (!(v.friction->lower_bound() > 0.0))
                throw ConfigError(line, "'" + spec.key + "': λ lower bound ≤ 0");
            break;
        }
        case ParamType::Drift: {
            try {
                v.drift = parse_drift(v.text, spec.dimension);
            } catch (const InvalidArgument& e) {
                throw mismatch(e.what());
            }
            break;
        }
        case ParamType::Choice: {
            if (std::find(spec.choices.begin(), spec.choices.end(), v.text) == spec.choices.end()) {
                std::string all;
                for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
                throw ConfigError(line, "'" + spec.key + "' must be one of: " + all + "; got '" + v.text + "'");
            }
            break;
        }
    }
    return v;
}

std::vector<ParamSpec> schema_for(const Recipe& r) {
    std::vector<ParamSpec> all = r.params;
    for (const auto& p : common_params()) all.push_back(p);
    return all;
}

}  // namespace

const ConfigValue& RunConfig::at(std::string_view key) const {
    for (const auto& v : values)
        if (v.spec.key == key) return v;
    throw InvalidArgument("config has no key '" + std::string(key) + "'");
}

void RunConfig::set(std::string_view key, const std::string& text) {
    for (auto& v : values) {
        if (v.spec.key == key) {
            v = resolve(v.spec, text, 0);
            return;
        }
    }
    throw InvalidArgument("config has no key '" + std::string(key) + "'");
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << '[' << experiment << "]\n";
    for (const auto& v : values) os << v.spec.key << " = " << v.text << '\n';
    return os.str();
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    const Recipe* recipe = nullptr;
    std::vector<ParamSpec> schema;
    std::map<std::string, std::pair<std::string, int>> given;
    int header_line = 0;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
            if (recipe) throw ConfigError(line_no, "only one experiment section per file");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            recipe = find_recipe(name);
            if (!recipe) throw ConfigError(line_no, "unknown experiment '" + name + "'");
            cfg.experiment = recipe->name;
            header_line = line_no;
            schema = schema_for(*recipe);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        if (!recipe) throw ConfigError(line_no, "key outside an [experiment] section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        const bool known = std::any_of(schema.begin(), schema.end(), [&](const ParamSpec& p) { return p.key == key; });
        if (!known) throw ConfigError(line_no, "unknown key '" + key + "' for experiment '" + cfg.experiment + "'");
        if (given.count(key)) throw ConfigError(line_no, "key '" + key + "' given twice");
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
        given[key] = {value, line_no};
    }
    if (!recipe) throw ConfigError(0, "no [experiment] section");

    for (const auto& p : schema) {
        const auto it = given.find(p.key);
        if (it != given.end()) {
            cfg.values.push_back(resolve(p, it->second.first, it->second.second));
        } else if (p.default_value) {
            cfg.values.push_back(resolve(p, *p.default_value, 0));
        } else {
            throw ConfigError(header_line, "missing required key '" + p.key + "' for experiment '" + cfg.experiment + "'");
        }
    }
    return cfg;
}

}  // namespace vfsk::cli
