#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "boseglow/error.hpp"
#include "boseglow/io.hpp"
#include "boseglow/multiplicity.hpp"
#include "boseglow/oracle/montecarlo.hpp"
#include "boseglow/params.hpp"
#include "boseglow/quadrature.hpp"
#include "boseglow/raregas.hpp"
#include "boseglow/tables.hpp"

namespace boseglow::cli {

enum class Product { Multiplicity, Spectrum, Correlation, RaregasCompare, OracleCheck };

inline std::string_view toString(Product p) noexcept {
    switch (p) {
    case Product::Multiplicity: return "multiplicity";
    case Product::Spectrum: return "spectrum";
    case Product::Correlation: return "correlation";
    case Product::RaregasCompare: return "raregas-compare";
    case Product::OracleCheck: return "oracle-check";
    }
    return "?";
}

inline std::optional<Product> productFromString(std::string_view s) {
    for (Product p : {Product::Multiplicity, Product::Spectrum, Product::Correlation, Product::RaregasCompare,
                      Product::OracleCheck}) {
        if (toString(p) == s) return p;
    }
    return std::nullopt;
}

inline const std::vector<std::string>& scanParameters() {
    static const std::vector<std::string> names{"n0", "R", "T", "m", "sigma"};
    return names;
}

struct ScanAxis {
    std::string parameter = "n0";
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 1;
};

struct GridSpec {
    double kMax = 600.0;                    ///< |k| grid upper end [MeV]
    std::size_t kSteps = 13;
    std::vector<std::size_t> exclusiveN{2}; ///< multiplicities for exclusive products
    std::vector<double> K{0.0, 150.0, 300.0, 450.0};
    double dkMax = 120.0;                   ///< [MeV]
    std::size_t dkSteps = 13;
    bool side = true;
    bool out = true;
};

struct Numerics {
    double truncationEps = 1e-14;
    std::size_t nMax = 100000;
    std::size_t quadratureOrder = kDefaultQuadratureOrder;
    std::size_t mcSamples = 1000000;
    std::optional<std::uint64_t> seed;
    std::size_t mcStreams = 64;
    std::size_t oracleMaxN = 3; ///< MC oracle runs n = 2..oracleMaxN
    std::size_t ringMaxN = 20;  ///< ring and quadrature oracles run n = 1..ringMaxN

    SeriesControl series() const { return {truncationEps, nMax}; }
};

struct RunConfig {
    ModelParams model;
    std::optional<ScanAxis> scan;
    std::vector<Product> outputs{Product::Multiplicity};
    GridSpec grids;
    Numerics numerics;
    std::string outputDir = "boseglow-out";

    bool wants(Product p) const { return std::find(outputs.begin(), outputs.end(), p) != outputs.end(); }
    std::vector<double> kGrid() const { return linspace(0.0, grids.kMax, grids.kSteps); }
    std::vector<double> dkGrid() const { return linspace(0.0, grids.dkMax, grids.dkSteps); }
};

inline double& modelField(ModelParams& p, std::string_view name) {
    if (name == "n0") return p.n0;
    if (name == "R") return p.R;
    if (name == "T") return p.T;
    if (name == "m") return p.m;
    if (name == "sigma") return p.sigma;
    if (name == "t0") return p.t0;
    throw ConfigError(fmt::format("unknown model parameter '{}'", name));
}

/// Model parameters at every scan point; a single point without a scan.
inline std::vector<ModelParams> scanPoints(const RunConfig& c) {
    if (!c.scan) return {c.model};
    std::vector<ModelParams> pts;
    for (double v : linspace(c.scan->min, c.scan->max, c.scan->steps)) {
        ModelParams p = c.model;
        modelField(p, c.scan->parameter) = v;
        pts.push_back(p);
    }
    return pts;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> splitList(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const std::string item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// Line of `key` inside `[section]` in the raw text, for error messages.
inline std::optional<std::size_t> locate(const std::string& text, std::string_view section, std::string_view key) {
    std::istringstream in(text);
    std::string line;
    std::string current;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(std::string_view(t).substr(1, t.size() - 2));
        } else if (current == section) {
            const auto eq = t.find('=');
            if (eq != std::string::npos && trim(std::string_view(t).substr(0, eq)) == key) return no;
        }
    }
    return std::nullopt;
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {
        std::istringstream in(text);
        try {
            boost::property_tree::read_ini(in, tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(fmt::format("{}:{}: {}", source_, e.line(), e.message()));
        }
    }

    const boost::property_tree::ptree& tree() const noexcept { return tree_; }

    [[noreturn]] void fail(std::string_view section, std::string_view key, std::string_view what) const {
        const auto line = locate(text_, section, key);
        throw ConfigError(fmt::format("{}:{}: {}.{}: {}", source_, line ? std::to_string(*line) : "?", section, key,
                                      what));
    }

    std::optional<std::string> raw(std::string_view section, std::string_view key) const {
        const auto sec = tree_.get_child_optional(std::string(section));
        if (!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(boost::property_tree::ptree::path_type(std::string(key), '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    double toDouble(std::string_view section, std::string_view key, const std::string& s) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(section, key, fmt::format("'{}' is not a number", s));
        return v;
    }

    std::uint64_t toUnsigned(std::string_view section, std::string_view key, const std::string& s) const {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            fail(section, key, fmt::format("'{}' is not a non-negative integer", s));
        }
        return v;
    }

    void number(std::string_view section, std::string_view key, double& out) const {
        if (auto s = raw(section, key)) out = toDouble(section, key, *s);
    }

    template <class U>
    void count(std::string_view section, std::string_view key, U& out) const {
        if (auto s = raw(section, key)) out = static_cast<U>(toUnsigned(section, key, *s));
    }

    void flag(std::string_view section, std::string_view key, bool& out) const {
        if (auto s = raw(section, key)) {
            if (*s == "true") {
                out = true;
            } else if (*s == "false") {
                out = false;
            } else {
                fail(section, key, "expected true or false");
            }
        }
    }

    void checkKnown(const std::map<std::string, std::set<std::string>>& known) const {
        for (const auto& [section, body] : tree_) {
            const auto it = known.find(section);
            if (it == known.end()) throw ConfigError(fmt::format("{}: unknown section [{}]", source_, section));
            for (const auto& kv : body) {
                if (!it->second.contains(kv.first)) fail(section, kv.first, "unknown key");
            }
        }
    }

private:
    const std::string& text_;
    std::string source_;
    boost::property_tree::ptree tree_;
};

} // namespace detail

/**
 * Parses the INI-style run configuration.
 *
 *   [run]      output_dir
 *   [model]    n0 R T m sigma t0
 *   [scan]     parameter min max steps
 *   [outputs]  products = multiplicity, spectrum, ...
 *   [grids]    k_max k_steps exclusive_n K dk_max dk_steps side out
 *   [numerics] truncation_eps n_max quadrature_order mc_samples seed mc_streams oracle_max_n ring_max_n
 *
 * Syntax errors and malformed values raise ConfigError with the line and key.
 * Range checks are left to validate().
 */
inline RunConfig parseConfig(const std::string& text, const std::string& source = "<config>") {
    const detail::Reader r(text, source);
    r.checkKnown({
        {"run", {"output_dir"}},
        {"model", {"n0", "R", "T", "m", "sigma", "t0"}},
        {"scan", {"parameter", "min", "max", "steps"}},
        {"outputs", {"products"}},
        {"grids", {"k_max", "k_steps", "exclusive_n", "K", "dk_max", "dk_steps", "side", "out"}},
        {"numerics",
         {"truncation_eps", "n_max", "quadrature_order", "mc_samples", "seed", "mc_streams", "oracle_max_n",
          "ring_max_n"}},
    });

    RunConfig c;
    if (auto dir = r.raw("run", "output_dir")) c.outputDir = *dir;

    for (const char* f : {"n0", "R", "T", "m", "sigma", "t0"}) r.number("model", f, modelField(c.model, f));

    if (r.tree().get_child_optional("scan")) {
        ScanAxis axis;
        const auto param = r.raw("scan", "parameter");
        if (!param) r.fail("scan", "parameter", "missing");
        axis.parameter = *param;
        if (std::find(scanParameters().begin(), scanParameters().end(), axis.parameter) == scanParameters().end()) {
            r.fail("scan", "parameter", fmt::format("'{}' is not one of n0, R, T, m, sigma", axis.parameter));
        }
        for (const char* key : {"min", "max", "steps"}) {
            if (!r.raw("scan", key)) r.fail("scan", key, "missing");
        }
        r.number("scan", "min", axis.min);
        r.number("scan", "max", axis.max);
        r.count("scan", "steps", axis.steps);
        c.scan = axis;
    }

    if (auto products = r.raw("outputs", "products")) {
        c.outputs.clear();
        for (const std::string& item : detail::splitList(*products)) {
            const auto p = productFromString(item);
            if (!p) r.fail("outputs", "products", fmt::format("unknown product '{}'", item));
            if (!c.wants(*p)) c.outputs.push_back(*p);
        }
    }

    r.number("grids", "k_max", c.grids.kMax);
    r.count("grids", "k_steps", c.grids.kSteps);
    if (auto list = r.raw("grids", "exclusive_n")) {
        c.grids.exclusiveN.clear();
        for (const std::string& item : detail::splitList(*list)) {
            c.grids.exclusiveN.push_back(static_cast<std::size_t>(r.toUnsigned("grids", "exclusive_n", item)));
        }
    }
    if (auto list = r.raw("grids", "K")) {
        c.grids.K.clear();
        for (const std::string& item : detail::splitList(*list)) c.grids.K.push_back(r.toDouble("grids", "K", item));
    }
    r.number("grids", "dk_max", c.grids.dkMax);
    r.count("grids", "dk_steps", c.grids.dkSteps);
    r.flag("grids", "side", c.grids.side);
    r.flag("grids", "out", c.grids.out);

    Numerics& nm = c.numerics;
    r.number("numerics", "truncation_eps", nm.truncationEps);
    r.count("numerics", "n_max", nm.nMax);
    r.count("numerics", "quadrature_order", nm.quadratureOrder);
    r.count("numerics", "mc_samples", nm.mcSamples);
    if (auto s = r.raw("numerics", "seed")) nm.seed = r.toUnsigned("numerics", "seed", *s);
    r.count("numerics", "mc_streams", nm.mcStreams);
    r.count("numerics", "oracle_max_n", nm.oracleMaxN);
    r.count("numerics", "ring_max_n", nm.ringMaxN);
    return c;
}

inline RunConfig loadConfig(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
    std::ostringstream ss;
    ss << f.rdbuf();
    return parseConfig(ss.str(), path.string());
}

/// Canonical config text; parseConfig(echo(c)) reproduces c. `run.output_dir` is left out.
inline std::string echo(const RunConfig& c) {
    const auto num = [](double v) { return io::formatDouble(v); };
    std::string s;
    s += "[model]\n";
    s += fmt::format("n0 = {}\nR = {}\nT = {}\nm = {}\nsigma = {}\nt0 = {}\n", num(c.model.n0), num(c.model.R),
                     num(c.model.T), num(c.model.m), num(c.model.sigma), num(c.model.t0));
    if (c.scan) {
        s += "[scan]\n";
        s += fmt::format("parameter = {}\nmin = {}\nmax = {}\nsteps = {}\n", c.scan->parameter, num(c.scan->min),
                         num(c.scan->max), c.scan->steps);
    }
    s += "[outputs]\nproducts = ";
    for (std::size_t i = 0; i < c.outputs.size(); ++i) s += (i ? ", " : "") + std::string(toString(c.outputs[i]));
    s += "\n[grids]\n";
    s += fmt::format("k_max = {}\nk_steps = {}\nexclusive_n = ", num(c.grids.kMax), c.grids.kSteps);
    for (std::size_t i = 0; i < c.grids.exclusiveN.size(); ++i) s += (i ? ", " : "") + std::to_string(c.grids.exclusiveN[i]);
    s += "\nK = ";
    for (std::size_t i = 0; i < c.grids.K.size(); ++i) s += (i ? ", " : "") + num(c.grids.K[i]);
    s += fmt::format("\ndk_max = {}\ndk_steps = {}\nside = {}\nout = {}\n", num(c.grids.dkMax), c.grids.dkSteps,
                     c.grids.side, c.grids.out);
    const Numerics& nm = c.numerics;
    s += "[numerics]\n";
    s += fmt::format("truncation_eps = {}\nn_max = {}\nquadrature_order = {}\nmc_samples = {}\n", num(nm.truncationEps),
                     nm.nMax, nm.quadratureOrder, nm.mcSamples);
    if (nm.seed) s += fmt::format("seed = {}\n", *nm.seed);
    s += fmt::format("mc_streams = {}\noracle_max_n = {}\nring_max_n = {}\n", nm.mcStreams, nm.oracleMaxN, nm.ringMaxN);
    return s;
}

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string field; ///< section.key
    std::string message;

    std::string str() const {
        return fmt::format("{}: {}: {}", severity == Severity::Error ? "error" : "warning", field, message);
    }
};

inline bool hasErrors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Range and consistency checks. No errors means run() will start.
inline std::vector<Diagnostic> validate(const RunConfig& c) {
    std::vector<Diagnostic> out;
    const auto error = [&out](std::string field, std::string msg) {
        out.push_back({Severity::Error, std::move(field), std::move(msg)});
    };
    const auto warn = [&out](std::string field, std::string msg) {
        out.push_back({Severity::Warning, std::move(field), std::move(msg)});
    };

    const auto checkModel = [&](const ModelParams& p, const std::string& where) {
        try {
            boseglow::validate(p);
        } catch (const InvalidParameter& e) {
            const std::string field = c.scan && c.scan->parameter == e.field() ? "scan." + where : "model." + e.field();
            error(field, fmt::format("{} is invalid ({})", e.field(), e.what()));
        }
    };
    checkModel(c.model, "model");
    if (c.scan) {
        if (c.scan->steps < 1) error("scan.steps", "must be >= 1");
        if (!(c.scan->max >= c.scan->min)) error("scan.max", "scan range is empty (max < min)");
        ModelParams lo = c.model, hi = c.model;
        modelField(lo, c.scan->parameter) = c.scan->min;
        modelField(hi, c.scan->parameter) = c.scan->max;
        checkModel(lo, "min");
        checkModel(hi, "max");
    }

    if (c.outputs.empty()) error("outputs.products", "no products requested");

    const GridSpec& g = c.grids;
    if (!(g.kMax >= 0.0) || !std::isfinite(g.kMax)) error("grids.k_max", "must be finite and >= 0");
    if (g.kSteps < 1) error("grids.k_steps", "must be >= 1");
    if (!(g.dkMax >= 0.0) || !std::isfinite(g.dkMax)) error("grids.dk_max", "must be finite and >= 0");
    if (g.dkSteps < 1) error("grids.dk_steps", "must be >= 1");
    for (double K : g.K) {
        if (!(K >= 0.0) || !std::isfinite(K)) error("grids.K", "entries must be finite and >= 0");
    }
    const bool pairProducts = c.wants(Product::Correlation) || c.wants(Product::RaregasCompare);
    if (pairProducts) {
        if (g.K.empty()) error("grids.K", "correlation products need at least one K");
        if (!g.side && !g.out) error("grids.side", "side and out are both disabled");
    }
    for (std::size_t n : g.exclusiveN) {
        if (n < 1) error("grids.exclusive_n", "multiplicities must be >= 1");
        if (n < 2 && pairProducts) error("grids.exclusive_n", "correlation products need n >= 2");
    }
    if (c.wants(Product::RaregasCompare) && g.exclusiveN.empty()) {
        error("grids.exclusive_n", "raregas-compare needs at least one n");
    }

    const Numerics& nm = c.numerics;
    if (!(nm.truncationEps > 0.0 && nm.truncationEps < 1.0)) error("numerics.truncation_eps", "must lie in (0, 1)");
    if (nm.nMax < 1) error("numerics.n_max", "must be >= 1");
    if (nm.quadratureOrder < 1) error("numerics.quadrature_order", "must be >= 1");

    if (c.wants(Product::OracleCheck)) {
        if (!nm.seed) error("numerics.seed", "Monte Carlo oracle requested without a seed; runs must be reproducible");
        if (nm.mcSamples < oracle::kMinMcSamples) {
            error("numerics.mc_samples", fmt::format("must be >= {}", oracle::kMinMcSamples));
        }
        if (nm.mcStreams < 1) error("numerics.mc_streams", "must be >= 1");
        if (nm.oracleMaxN < 2 || nm.oracleMaxN > oracle::kMaxMcMultiplicity) {
            error("numerics.oracle_max_n", fmt::format("must lie in [2, {}]", oracle::kMaxMcMultiplicity));
        }
        if (nm.ringMaxN < 1) error("numerics.ring_max_n", "must be >= 1");
    }

    if (c.wants(Product::RaregasCompare) && !hasErrors(out)) {
        for (const ModelParams& p : scanPoints(c)) {
            const DerivedParams d = derive(p);
            if (!rareGasValid(d)) {
                warn("outputs.products",
                     fmt::format("raregas-compare at x = {:.6g} < {:g}: the expansion is outside its validity range",
                                 d.x, kRareGasMinX));
                break;
            }
        }
    }
    return out;
}

} // namespace boseglow::cli
