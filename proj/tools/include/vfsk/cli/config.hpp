#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfsk/error.hpp"
#include "vfsk/model.hpp"

namespace vfsk::cli {

enum class ParamType {
    Real,
    Integer,
    RealList,
    Friction,
    /// Friction that must be usable by the SDE integrators (no step fields).
    SmoothFriction,
    Drift,
    Choice,
};

struct ParamSpec {
    std::string key;
    ParamType type = ParamType::Real;
    /// Absent means the key is required.
    std::optional<std::string> default_value;
    std::string help;
    bool positive = false;
    /// Friction/drift expressions with ambiguous dimension resolve to this.
    int dimension = 1;
    std::vector<std::string> choices;
};

/// Parse or validation failure tied to a line of the config text (0 when the
/// problem is not attached to one line, e.g. a missing key).
class ConfigError : public InvalidArgument {
public:
    ConfigError(int line, const std::string& message);
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct ConfigValue {
    ParamSpec spec;
    std::string text;
    int line = 0;  // 0 for defaults
    double real = 0.0;
    std::int64_t integer = 0;
    std::vector<double> list;
    std::optional<FrictionField> friction;
    std::optional<DriftField> drift;
};

/// A fully resolved experiment configuration; values appear in the recipe's
/// declaration order.
struct RunConfig {
    std::string experiment;
    std::vector<ConfigValue> values;

    const ConfigValue& at(std::string_view key) const;
    double real(std::string_view key) const { return at(key).real; }
    std::int64_t integer(std::string_view key) const { return at(key).integer; }
    const std::vector<double>& list(std::string_view key) const { return at(key).list; }
    const FrictionField& friction(std::string_view key) const { return *at(key).friction; }
    const DriftField& drift(std::string_view key) const { return *at(key).drift; }
    const std::string& text(std::string_view key) const { return at(key).text; }

    /// Overrides one value, re-checking its type.
    void set(std::string_view key, const std::string& text);
    /// The config in the input format, every key spelled out.
    std::string canonical_text() const;
};

/// Keys accepted by every experiment.
const std::vector<ParamSpec>& common_params();

/// Parses "key = value" lines under one "[experiment]" header. `#` starts a
/// comment. Unknown experiments and keys, missing required keys, repeated
/// keys and malformed values raise ConfigError with the offending line.
RunConfig parse_config(std::string_view text);

FrictionField parse_friction(std::string_view expr, int dimension = 1);
DriftField parse_drift(std::string_view expr, int dimension = 1);

}  // namespace vfsk::cli
