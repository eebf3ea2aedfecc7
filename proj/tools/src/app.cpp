#include "vfsk/cli/app.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vfsk/cli/run.hpp"

namespace vfsk::cli {

namespace {

void list_param(std::ostream& out, const ParamSpec& p) {
    out << "    " << p.key << " = " << (p.default_value ? *p.default_value : "<required>");
    if (!p.help.empty()) out << "    # " << p.help;
    out << '\n';
}

int list_recipes(std::ostream& out) {
    out << "keys accepted by every recipe\n";
    for (const auto& p : common_params()) list_param(out, p);
    for (const auto& r : registry()) {
        out << r.name;
        for (const auto& a : r.aliases) out << " (alias " << a << ')';
        out << "\n    " << r.summary << '\n';
        for (const auto& p : r.params) list_param(out, p);
    }
    return 0;
}

int run_file(const std::string& path, const RunOptions& options, std::ostream& out, std::ostream& err) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err << "vfsk: cannot open " << path << '\n';
        return 2;
    }
    std::ostringstream text;
    text << f.rdbuf();
    RunConfig config;
    try {
        config = parse_config(text.str());
    } catch (const InvalidArgument& e) {
        err << path << ": " << e.what() << '\n';
        return 2;
    }
    RunManifest m;
    try {
        m = run(std::move(config), options);
    } catch (const InvalidArgument& e) {
        err << path << ": " << e.what() << '\n';
        return 2;
    }
    for (const auto& c : m.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    if (!m.error.empty()) err << "vfsk: " << m.recipe << " aborted: " << m.error << '\n';
    out << "output: " << m.directory.string() << '\n';
    if (m.passed()) return 0;
    std::string failed;
    for (const auto& c : m.checks)
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    if (!failed.empty()) err << "vfsk: failing checks: " << failed << '\n';
    return 1;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Small-mass Langevin experiments with variable friction", "vfsk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolkitVersion);

    std::string config_path;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out_dir = "runs";
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "config file")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "master seed (overrides the config)");
    auto* workers_opt = run_cmd->add_option("--workers", workers, "worker cap, 0 for all cores (overrides the config)");
    run_cmd->add_option("--out", out_dir, "output root")->capture_default_str();
    auto* list_cmd = app.add_subcommand("list", "print the recipe registry with defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) return list_recipes(out);
    RunOptions options;
    if (seed_opt->count()) options.seed = seed;
    if (workers_opt->count()) options.workers = workers;
    options.out = out_dir;
    return run_file(config_path, options, out, err);
}

}  // namespace vfsk::cli
