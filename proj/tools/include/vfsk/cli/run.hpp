#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vfsk/cli/config.hpp"
#include "vfsk/cli/recipes.hpp"

namespace vfsk::cli {

inline constexpr const char* kToolkitVersion = "vfsk 0.1.0";

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::filesystem::path out = "runs";
};

struct RunManifest {
    std::string recipe;
    std::string toolkit_version;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string config_text;
    std::string started_utc;
    std::string finished_utc;
    double wall_seconds = 0.0;
    std::filesystem::path directory;
    std::vector<Artifact> artifacts;
    std::vector<Check> checks;
    /// Set when the recipe threw instead of finishing.
    std::string error;

    bool passed() const noexcept;
    std::string to_json() const;
};

/// Runs the configured recipe into out/<recipe>/<UTC timestamp>/ and writes
/// manifest.json there. Command-line seed and workers override the config.
/// Exceptions thrown by the recipe are recorded in the manifest as a failure.
RunManifest run(RunConfig config, const RunOptions& options);

}  // namespace vfsk::cli
