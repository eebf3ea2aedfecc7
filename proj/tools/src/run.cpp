#include "vfsk/cli/run.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <json.hpp>

#include "vfsk/error.hpp"
#include "vfsk/parallel.hpp"

namespace vfsk::cli {

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw Error("sha256: OpenSSL digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

RunContext::RunContext(const RunConfig& config, std::filesystem::path directory, std::uint64_t seed, unsigned workers)
    : config_(config), dir_(std::move(directory)), seed_(seed), workers_(workers) {}

void RunContext::write_artifact(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    artifacts_.push_back({name, sha256_hex(content), content.size()});
}

void RunContext::check(const std::string& name, bool passed, const std::string& detail) {
    checks_.push_back({name, passed, detail});
}

bool RunManifest::passed() const noexcept {
    if (!error.empty() || checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["recipe"] = recipe;
    j["toolkit_version"] = toolkit_version;
    j["seed"] = seed;
    j["workers"] = workers;
    j["config"] = config_text;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    j["wall_seconds"] = wall_seconds;
    j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& a : artifacts)
        j["artifacts"].push_back({{"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["error"] = error;
    j["passed"] = passed();
    return j.dump(2) + "\n";
}

namespace {

std::string utc_stamp(std::chrono::system_clock::time_point t, const char* format) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, format, &tm);
    return buf;
}

std::filesystem::path fresh_directory(const std::filesystem::path& base, const std::string& stamp) {
    std::filesystem::create_directories(base);
    for (int k = 0;; ++k) {
        const auto dir = base / (k == 0 ? stamp : stamp + "-" + std::to_string(k));
        if (std::filesystem::create_directory(dir)) return dir;
    }
}

}  // namespace

RunManifest run(RunConfig config, const RunOptions& options) {
    const Recipe* recipe = find_recipe(config.experiment);
    if (!recipe) throw InvalidArgument("unknown experiment '" + config.experiment + "'");
    if (options.seed) config.set("seed", std::to_string(*options.seed));
    if (options.workers) config.set("workers", std::to_string(*options.workers));

    RunManifest m;
    m.recipe = recipe->name;
    m.toolkit_version = kToolkitVersion;
    m.seed = static_cast<std::uint64_t>(config.integer("seed"));
    const auto w = config.integer("workers");
    m.workers = w > 0 ? static_cast<unsigned>(w) : default_workers();
    m.config_text = config.canonical_text();

    const auto start = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();
    m.started_utc = utc_stamp(start, "%Y-%m-%dT%H:%M:%SZ");
    m.directory = fresh_directory(options.out / recipe->name, utc_stamp(start, "%Y%m%dT%H%M%SZ"));

    RunContext ctx(config, m.directory, m.seed, m.workers);
    try {
        recipe->run(ctx);
    } catch (const std::exception& e) {
        m.error = e.what();
    }
    m.artifacts = ctx.artifacts();
    m.checks = ctx.checks();
    m.finished_utc = utc_stamp(std::chrono::system_clock::now(), "%Y-%m-%dT%H:%M:%SZ");
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream f(m.directory / "manifest.json", std::ios::binary);
    f << m.to_json();
    return m;
}

}  // namespace vfsk::cli
