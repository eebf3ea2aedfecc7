#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "vfsk/cli/config.hpp"

namespace vfsk::cli {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Artifact {
    std::string file;
    std::string sha256;
    std::size_t bytes = 0;
};

/// What a recipe sees while running: its config, the resolved seed and
/// worker cap, and sinks for output files and assertion results.
class RunContext {
public:
    RunContext(const RunConfig& config, std::filesystem::path directory, std::uint64_t seed, unsigned workers);

    const RunConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    unsigned workers() const noexcept { return workers_; }
    const std::filesystem::path& directory() const noexcept { return dir_; }

    /// Writes `content` to directory()/name and records its digest.
    void write_artifact(const std::string& name, const std::string& content);
    void check(const std::string& name, bool passed, const std::string& detail);

    const std::vector<Artifact>& artifacts() const noexcept { return artifacts_; }
    const std::vector<Check>& checks() const noexcept { return checks_; }

private:
    const RunConfig& config_;
    std::filesystem::path dir_;
    std::uint64_t seed_;
    unsigned workers_;
    std::vector<Artifact> artifacts_;
    std::vector<Check> checks_;
};

struct Recipe {
    std::string name;
    std::string summary;
    std::vector<std::string> aliases;
    std::vector<ParamSpec> params;
    std::function<void(RunContext&)> run;
};

const std::vector<Recipe>& registry();
/// Looks a recipe up by name or alias; nullptr when unknown.
const Recipe* find_recipe(std::string_view name);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace vfsk::cli
