#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <ctime>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>
#include <json.hpp>

#include "boseglow/cli/config.hpp"
#include "boseglow/error.hpp"
#include "boseglow/io.hpp"
#include "boseglow/multiplicity.hpp"
#include "boseglow/oracle/check.hpp"
#include "boseglow/params.hpp"
#include "boseglow/raregas.hpp"
#include "boseglow/tables.hpp"
#include "boseglow/version.hpp"

namespace boseglow::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitComputation = 2, kExitIo = 3 };

inline constexpr double kRingThreshold = 1e-10;
inline constexpr double kBridgeThreshold = 1e-8;
inline constexpr double kMcPullThreshold = 3.0;
inline constexpr double kMcPeakErrorThreshold = 0.02;
inline constexpr std::size_t kOracleRingPairs = 256;

struct RunOptions {
    std::optional<std::string> outputDir;
    std::optional<std::size_t> threads;
};

struct OutputEntry {
    std::size_t point = 0;
    std::string product;            ///< file stem, e.g. spectrum_exclusive_n2
    std::vector<std::string> files; ///< relative to the output directory
    bool ok = true;
    std::string errorKind;
    std::string message;
};

struct RunResult {
    int exitCode = kExitOk;
    std::filesystem::path outputDir;
    std::filesystem::path manifest;
    std::vector<OutputEntry> entries;
};

inline std::string errorKind(const std::exception& e) {
    if (dynamic_cast<const DivergentMean*>(&e)) return "DivergentMean";
    if (dynamic_cast<const TruncationLimit*>(&e)) return "TruncationLimit";
    if (dynamic_cast<const UnderflowRegime*>(&e)) return "UnderflowRegime";
    if (dynamic_cast<const InvalidOrder*>(&e)) return "InvalidOrder";
    if (dynamic_cast<const DegenerateDenominator*>(&e)) return "DegenerateDenominator";
    if (dynamic_cast<const NumericalBreakdown*>(&e)) return "NumericalBreakdown";
    if (dynamic_cast<const InvalidParameter*>(&e)) return "InvalidParameter";
    if (dynamic_cast<const SeedRequired*>(&e)) return "SeedRequired";
    if (dynamic_cast<const InsufficientSamples*>(&e)) return "InsufficientSamples";
    if (dynamic_cast<const SizeLimit*>(&e)) return "SizeLimit";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    return "Error";
}

inline std::string pointDirName(std::size_t i) { return fmt::format("point_{:04d}", i); }

namespace detail {

using io::Cell;
using io::formatDouble;

inline std::int64_t integer(std::size_t v) { return static_cast<std::int64_t>(v); }

/// Header shared by every file of one scan point: the echoed point config and derived values.
inline std::vector<std::string> pointHeader(const RunConfig& pointConfig, const DerivedParams& d,
                                            std::string_view product, std::size_t index) {
    std::vector<std::string> h;
    h.push_back(fmt::format("boseglow {}", kVersion));
    h.push_back(fmt::format("product = {}", product));
    h.push_back(fmt::format("point = {}", index));
    h.push_back("units: momenta, masses, widths in MeV; lengths in fm; densities in MeV^-3");
    h.push_back("--- config ---");
    std::string text = echo(pointConfig);
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        h.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    h.push_back("--- end config ---");
    h.push_back(fmt::format("sigmaT2 = {}", formatDouble(d.sigmaT2)));
    h.push_back(fmt::format("Re2 = {}", formatDouble(d.Re2)));
    h.push_back(fmt::format("x = {}", formatDouble(d.x)));
    h.push_back(fmt::format("gamma_plus = {}", formatDouble(d.gammaPlus)));
    h.push_back(fmt::format("gamma_minus = {}", formatDouble(d.gammaMinus)));
    h.push_back(fmt::format("nc = {}", formatDouble(d.nc)));
    if (d.Te) h.push_back(fmt::format("Te = {}", formatDouble(*d.Te)));
    h.push_back(fmt::format("regime = {}", toString(classifyRegime(d, pointConfig.model.n0))));
    return h;
}

struct PointContext {
    const RunConfig& config; ///< point config: scan removed, model at the point
    std::size_t index;
    DerivedParams derived;
    std::size_t mcThreads;

    io::Table table(std::string product) const {
        io::Table t;
        t.header = pointHeader(config, derived, product, index);
        t.product = std::move(product);
        return t;
    }
};

inline io::Table multiplicityTable(const PointContext& ctx) {
    const SeriesControl ctl = ctx.config.numerics.series();
    const double n0 = ctx.config.model.n0;
    const CombinantSeries cs = combinantsToTolerance(ctx.derived, n0, ctl);
    const MultiplicityDistribution md = multiplicityDistribution(cs, ctl);
    io::Table t = ctx.table("multiplicity");
    t.header.push_back(fmt::format("mean = {}", formatDouble(md.mean)));
    t.header.push_back(fmt::format("sum_C = {}", formatDouble(md.sumC)));
    t.header.push_back(fmt::format("combinant_truncation_bound = {}", formatDouble(cs.truncationError())));
    t.header.push_back(fmt::format("mass = {}", formatDouble(md.mass())));
    t.columns = {"n", "C_n", "p_n", "n_C_n", "cumulative"};
    CompensatedSum cum;
    for (std::size_t n = 0; n < md.p.size(); ++n) {
        cum += md.p[n];
        const double cn = n == 0 ? 0.0 : cs.c(n);
        t.rows.push_back({integer(n), cn, md.p[n], static_cast<double>(n) * cn, cum.value()});
    }
    return t;
}

inline io::Table spectrumInclusiveTable(const PointContext& ctx) {
    const SpectrumTable s =
        inclusiveSpectrum(ctx.derived, ctx.config.model.n0, ctx.config.kGrid(), ctx.config.numerics.series());
    io::Table t = ctx.table("spectrum_inclusive");
    t.header.push_back("k along z");
    t.header.push_back(fmt::format("max_series_terms = {}", s.maxTerms));
    t.columns = {"k", "N1"};
    for (std::size_t i = 0; i < s.k.size(); ++i) t.rows.push_back({s.k[i], s.values[i]});
    return t;
}

inline io::Table spectrumExclusiveTable(const PointContext& ctx, std::size_t n) {
    const SpectrumTable s = exclusiveSpectrum(ctx.derived, ctx.config.model.n0, n, ctx.config.kGrid());
    io::Table t = ctx.table(fmt::format("spectrum_exclusive_n{}", n));
    t.header.push_back("k along z");
    t.header.push_back(fmt::format("n = {}", n));
    t.columns = {"k", "N1_n", "N1_n_over_n"};
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        t.rows.push_back({s.k[i], s.values[i], s.values[i] / static_cast<double>(n)});
    }
    return t;
}

inline std::vector<CorrelationPoint> pairGrid(const RunConfig& c) {
    return correlationGrid(c.grids.K, c.dkGrid(), c.grids.side, c.grids.out);
}

inline void correlationRows(io::Table& t, const CorrelationTable& c) {
    t.header.push_back("K along z; side: dk along x; out: dk along z");
    t.columns = {"K", "dk", "direction", "C2"};
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        const CorrelationPoint& p = c.pairs[i];
        t.rows.push_back({p.K, p.dk, std::string(toString(p.direction)), c.values[i]});
    }
}

inline io::Table correlationInclusiveTable(const PointContext& ctx) {
    const CorrelationTable c =
        inclusiveCorrelation(ctx.derived, ctx.config.model.n0, pairGrid(ctx.config), ctx.config.numerics.series());
    io::Table t = ctx.table("correlation_inclusive");
    correlationRows(t, c);
    return t;
}

inline io::Table correlationExclusiveTable(const PointContext& ctx, std::size_t n) {
    const CorrelationTable c = exclusiveCorrelation(ctx.derived, ctx.config.model.n0, n, pairGrid(ctx.config));
    io::Table t = ctx.table(fmt::format("correlation_exclusive_n{}", n));
    t.header.push_back(fmt::format("n = {}", n));
    correlationRows(t, c);
    return t;
}

inline io::Table raregasTable(const PointContext& ctx, std::size_t n) {
    const RunConfig& c = ctx.config;
    const ComparisonGrid grid{c.grids.K, c.dkGrid(), c.grids.side, c.grids.out};
    const DeviationReport rep = compareExactVsRare(ctx.derived, c.model.n0, n, grid);
    io::Table t = ctx.table(fmt::format("raregas_n{}", n));
    t.header.push_back(fmt::format("n = {}", n));
    t.header.push_back(fmt::format("valid = {}", rep.valid));
    t.header.push_back(fmt::format("expansion_parameter = {}", formatDouble(rep.expansionParameter)));
    for (const RareGasPrediction& p : rep.predictions) {
        t.header.push_back(fmt::format("prediction K = {} lambda = {} Rside2 = {} Rout2 = {}", formatDouble(p.K),
                                       formatDouble(p.lambdaK), formatDouble(p.Rside2), formatDouble(p.Rout2)));
    }
    t.header.push_back(fmt::format("max_abs_deviation = {}", formatDouble(rep.maxAbsDeviation)));
    t.header.push_back(fmt::format("mean_abs_deviation = {}", formatDouble(rep.meanAbsDeviation)));
    t.header.push_back(fmt::format("max_rel_deviation = {}", formatDouble(rep.maxRelDeviation)));
    t.columns = {"K", "dk", "direction", "exact", "rare_gas", "abs_deviation", "rel_deviation"};
    for (const DeviationRow& r : rep.rows) {
        t.rows.push_back({r.K, r.dk, std::string(toString(r.direction)), r.exact, r.rare, r.absDeviation,
                          r.relDeviation});
    }
    return t;
}

/// Summary of ring, quadrature and MC oracles, plus one MC spectrum table per n.
inline std::vector<io::Table> oracleTables(const PointContext& ctx) {
    const RunConfig& c = ctx.config;
    const Numerics& nm = c.numerics;
    // Closed-form/ring/quadrature ratios do not depend on n0; n0 = 0 would zero every kernel.
    const double n0 = c.model.n0 > 0.0 ? c.model.n0 : 1.0;
    const std::uint64_t seed = nm.seed.value_or(0);

    io::Table summary = ctx.table("oracle_check");
    summary.columns = {"oracle", "n", "metric", "value", "threshold", "pass"};
    const auto add = [&summary](const char* oracle, std::size_t n, const char* metric, double v, double thr) {
        summary.rows.push_back({std::string(oracle), integer(n), std::string(metric), v, thr,
                                integer(v <= thr ? 1 : 0)});
    };

    const auto pairs = oracle::randomPairs(ctx.derived, kOracleRingPairs, seed);
    for (const oracle::OrderDeviation& d : oracle::ringDeviation(ctx.derived, n0, nm.ringMaxN, pairs)) {
        add("ring", d.n, "max_rel_deviation", d.maxRelDeviation, kRingThreshold);
    }
    for (const oracle::OrderDeviation& d : oracle::bridgeDeviation(ctx.derived, n0, nm.ringMaxN, nm.quadratureOrder)) {
        add("kernel_combinant_bridge", d.n, "rel_deviation", d.maxRelDeviation, kBridgeThreshold);
    }

    std::vector<io::Table> out;
    oracle::McOptions opt;
    opt.samples = nm.mcSamples;
    opt.seed = nm.seed;
    opt.streams = nm.mcStreams;
    opt.threads = ctx.mcThreads;
    const std::vector<double> kGrid = c.kGrid();
    ModelParams p = c.model;
    p.n0 = n0;
    for (std::size_t n = 2; n <= nm.oracleMaxN; ++n) {
        const oracle::McComparison cmp = oracle::mcCompare(p, n, kGrid, opt);
        add("monte_carlo", n, "max_abs_pull", cmp.maxAbsPull, kMcPullThreshold);
        add("monte_carlo", n, "peak_rel_error", cmp.peakRelError, kMcPeakErrorThreshold);

        io::Table t = ctx.table(fmt::format("oracle_mc_n{}", n));
        t.header.push_back(fmt::format("n = {}", n));
        t.header.push_back(fmt::format("seed = {}", cmp.mc.seed));
        t.header.push_back(fmt::format("streams = {}", cmp.mc.streams));
        t.header.push_back(fmt::format("samples = {}", cmp.mc.samples));
        t.header.push_back(fmt::format("mean_weight = {} +- {}", formatDouble(cmp.mc.meanWeight),
                                       formatDouble(cmp.mc.meanWeightError)));
        t.header.push_back(fmt::format("weight_range = [{}, {}]", formatDouble(cmp.mc.minWeight),
                                       formatDouble(cmp.mc.maxWeight)));
        t.header.push_back("k along x, y, z averaged; density = N1_n / n");
        t.columns = {"k", "mc_density", "mc_error", "exact_density", "pull"};
        for (std::size_t i = 0; i < kGrid.size(); ++i) {
            t.rows.push_back({kGrid[i], cmp.mc.density[i], cmp.mc.error[i], cmp.exact[i], cmp.pull[i]});
        }
        out.push_back(std::move(t));
    }
    out.insert(out.begin(), std::move(summary));
    return out;
}

struct Job {
    std::string name;
    std::function<std::vector<io::Table>()> make;
};

inline std::vector<Job> jobsFor(const PointContext& ctx) {
    const RunConfig& c = ctx.config;
    const auto one = [](auto f) { return [f] { return std::vector<io::Table>{f()}; }; };
    std::vector<Job> jobs;
    if (c.wants(Product::Multiplicity)) {
        jobs.push_back({"multiplicity", one([&ctx] { return multiplicityTable(ctx); })});
    }
    if (c.wants(Product::Spectrum)) {
        jobs.push_back({"spectrum_inclusive", one([&ctx] { return spectrumInclusiveTable(ctx); })});
        for (std::size_t n : c.grids.exclusiveN) {
            jobs.push_back({fmt::format("spectrum_exclusive_n{}", n),
                            one([&ctx, n] { return spectrumExclusiveTable(ctx, n); })});
        }
    }
    if (c.wants(Product::Correlation)) {
        jobs.push_back({"correlation_inclusive", one([&ctx] { return correlationInclusiveTable(ctx); })});
        for (std::size_t n : c.grids.exclusiveN) {
            jobs.push_back({fmt::format("correlation_exclusive_n{}", n),
                            one([&ctx, n] { return correlationExclusiveTable(ctx, n); })});
        }
    }
    if (c.wants(Product::RaregasCompare)) {
        for (std::size_t n : c.grids.exclusiveN) {
            jobs.push_back({fmt::format("raregas_n{}", n), one([&ctx, n] { return raregasTable(ctx, n); })});
        }
    }
    if (c.wants(Product::OracleCheck)) {
        jobs.push_back({"oracle_check", [&ctx] { return oracleTables(ctx); }});
    }
    return jobs;
}

inline std::vector<OutputEntry> runPoint(const RunConfig& config, const ModelParams& params, std::size_t index,
                                         const std::filesystem::path& root, std::size_t mcThreads) {
    RunConfig pc = config;
    pc.scan.reset();
    pc.model = params;
    const std::string dirName = pointDirName(index);
    const std::filesystem::path dir = root / dirName;
    std::vector<OutputEntry> entries;

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        entries.push_back({index, "point", {}, false, "IoError", fmt::format("cannot create {}: {}", dir.string(),
                                                                               ec.message())});
        return entries;
    }

    const PointContext ctx{pc, index, derive(params), mcThreads};
    for (const Job& job : jobsFor(ctx)) {
        OutputEntry e;
        e.point = index;
        e.product = job.name;
        try {
            for (const io::Table& t : job.make()) {
                io::writeTable(t, dir / t.product);
                e.files.push_back(dirName + "/" + t.product + ".csv");
                e.files.push_back(dirName + "/" + t.product + ".json");
            }
        } catch (const std::exception& ex) {
            e.ok = false;
            e.errorKind = errorKind(ex);
            e.message = ex.what();
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::string utcTimestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json paramsJson(const ModelParams& p) {
    return {{"n0", p.n0}, {"R", p.R}, {"T", p.T}, {"m", p.m}, {"sigma", p.sigma}, {"t0", p.t0}};
}

inline nlohmann::json derivedJson(const DerivedParams& d) {
    nlohmann::json j{{"sigmaT2", d.sigmaT2}, {"Re2", d.Re2},   {"x", d.x},
                     {"gamma_plus", d.gammaPlus}, {"gamma_minus", d.gammaMinus}, {"nc", d.nc}};
    if (d.Te) j["Te"] = *d.Te;
    return j;
}

} // namespace detail

/// Exit status of a finished run: I/O failures dominate, DivergentMean alone is not a failure.
inline int exitCodeFor(const std::vector<OutputEntry>& entries) {
    int code = kExitOk;
    for (const OutputEntry& e : entries) {
        if (e.ok || e.errorKind == "DivergentMean") continue;
        code = std::max(code, e.errorKind == "IoError" ? int{kExitIo} : int{kExitComputation});
    }
    return code;
}

/**
 * Runs every requested product at every scan point and writes the manifest.
 *
 * Output layout: <dir>/point_NNNN/<product>.{csv,json} and <dir>/manifest.json.
 * Throws ConfigError when validate() reports errors and IoError when the
 * output directory or the manifest cannot be written.
 */
inline RunResult run(const RunConfig& config, const RunOptions& options = {}) {
    const std::vector<Diagnostic> diags = validate(config);
    if (hasErrors(diags)) {
        std::string msg = "configuration is invalid:";
        for (const Diagnostic& d : diags) {
            if (d.severity == Severity::Error) msg += "\n  " + d.str();
        }
        throw ConfigError(msg);
    }

    RunResult result;
    result.outputDir = options.outputDir.value_or(config.outputDir);
    std::error_code ec;
    std::filesystem::create_directories(result.outputDir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", result.outputDir.string(), ec.message()));

    const std::vector<ModelParams> points = scanPoints(config);
    std::size_t threads = options.threads.value_or(1);
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(threads, points.size());
    const std::size_t mcThreads = points.size() == 1 ? threads : 1;

    std::vector<std::vector<OutputEntry>> perPoint(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            perPoint[i] = detail::runPoint(config, points[i], i, result.outputDir, mcThreads);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    for (auto& v : perPoint) {
        for (OutputEntry& e : v) result.entries.push_back(std::move(e));
    }
    result.exitCode = exitCodeFor(result.entries);

    nlohmann::json m;
    m["tool"] = "boseglow";
    m["version"] = kVersion;
    m["created"] = detail::utcTimestamp();
    m["config"] = echo(config);
    m["exit_code"] = result.exitCode;
    auto pts = nlohmann::json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const DerivedParams d = derive(points[i]);
        pts.push_back({{"index", i},
                       {"dir", pointDirName(i)},
                       {"params", detail::paramsJson(points[i])},
                       {"derived", detail::derivedJson(d)},
                       {"regime", std::string(toString(classifyRegime(d, points[i].n0)))}});
    }
    m["points"] = std::move(pts);
    auto outs = nlohmann::json::array();
    for (const OutputEntry& e : result.entries) {
        nlohmann::json j{{"point", e.point}, {"product", e.product}, {"files", e.files},
                         {"status", e.ok ? "ok" : "error"}};
        if (!e.ok) j["error"] = {{"kind", e.errorKind}, {"message", e.message}};
        outs.push_back(std::move(j));
    }
    m["outputs"] = std::move(outs);
    result.manifest = result.outputDir / "manifest.json";
    io::writeText(result.manifest, m.dump(2) + "\n");
    return result;
}

} // namespace boseglow::cli
