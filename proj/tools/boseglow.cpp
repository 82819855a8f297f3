#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "boseglow/cli/config.hpp"
#include "boseglow/cli/run.hpp"
#include "boseglow/version.hpp"

namespace bc = boseglow::cli;

namespace {

int doValidate(const std::string& path) {
    const bc::RunConfig cfg = bc::loadConfig(path);
    const auto diags = bc::validate(cfg);
    for (const bc::Diagnostic& d : diags) fmt::print(stderr, "{}\n", d.str());
    if (bc::hasErrors(diags)) return bc::kExitConfig;
    fmt::print("{}: ok ({} scan point(s))\n", path, bc::scanPoints(cfg).size());
    return bc::kExitOk;
}

int doRun(const std::string& path, const bc::RunOptions& opts) {
    const bc::RunConfig cfg = bc::loadConfig(path);
    for (const bc::Diagnostic& d : bc::validate(cfg)) {
        if (d.severity == bc::Severity::Warning) fmt::print(stderr, "{}\n", d.str());
    }
    const bc::RunResult res = bc::run(cfg, opts);
    std::size_t failed = 0;
    for (const bc::OutputEntry& e : res.entries) {
        if (e.ok) continue;
        ++failed;
        fmt::print(stderr, "point {} {}: {}: {}\n", e.point, e.product, e.errorKind, e.message);
    }
    fmt::print("{} output(s), {} error(s); manifest {}\n", res.entries.size(), failed, res.manifest.string());
    return res.exitCode;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pion-laser model spectra, correlations and oracle checks"};
    app.set_version_flag("--version", std::string(boseglow::kVersion));
    app.require_subcommand(1);

    std::string runPath;
    std::optional<std::string> outputDir;
    std::optional<std::size_t> threads;
    CLI::App* runCmd = app.add_subcommand("run", "run every product of a config file");
    runCmd->add_option("config", runPath, "config file")->required();
    runCmd->add_option("--output-dir", outputDir, "override [run] output_dir");
    runCmd->add_option("--threads", threads, "scan points computed concurrently (0 = all cores)");

    std::string validatePath;
    CLI::App* validateCmd = app.add_subcommand("validate", "check a config file without running it");
    validateCmd->add_option("config", validatePath, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bc::kExitConfig;
    }

    try {
        if (*runCmd) return doRun(runPath, {outputDir, threads});
        return doValidate(validatePath);
    } catch (const boseglow::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return bc::kExitConfig;
    } catch (const boseglow::IoError& e) {
        fmt::print(stderr, "i/o error: {}\n", e.what());
        return bc::kExitIo;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return bc::kExitComputation;
    }
}
