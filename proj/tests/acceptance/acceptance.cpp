// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "boseglow/cli/config.hpp"
#include "boseglow/cli/run.hpp"
#include "boseglow/kernel.hpp"
#include "boseglow/multiplicity.hpp"
#include "boseglow/oracle/check.hpp"
#include "boseglow/quadrature.hpp"
#include "boseglow/raregas.hpp"
#include "boseglow/spectra.hpp"

using namespace boseglow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, std::string what) {
        if (!ok) pass = false;
        notes.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ModelParams randomParams(std::mt19937_64& eng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto logUniform = [&](double lo, double hi) { return std::exp(std::log(lo) + u(eng) * std::log(hi / lo)); };
    ModelParams p;
    p.n0 = logUniform(1e-3, 10.0);
    p.R = logUniform(0.1, 20.0);
    p.T = logUniform(10.0, 300.0);
    p.m = logUniform(100.0, 1000.0);
    p.sigma = logUniform(10.0, 1000.0);
    return p;
}

std::vector<DerivedParams> parameterSets() {
    return {DerivedParams::natural(0.1, 1.0), DerivedParams::natural(1.0, 1.0), derive(oracle::paramsForX(10.0)),
            derive(ModelParams{}), DerivedParams::natural(1e3, 1.0)};
}

// 1. Algebraic identities
Outcome algebraicIdentities() {
    Outcome o;
    std::mt19937_64 eng(1);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p = randomParams(eng);
        const DerivedParams d = derive(p);
        const double x = d.x;
        const double s = std::sqrt(d.gammaPlus) - std::sqrt(d.gammaMinus);
        const double devs[] = {
            rel(d.gammaPlus * d.gammaMinus, x * x / 4.0),
            rel(d.gammaPlus + d.gammaMinus, 1.0 + x),
            std::abs(s * s - 1.0),
            rel(combinants(d, p.n0, 1).c(1), p.n0),
            rel(kernel(d, p.n0, 1).bn(), 1.0 / d.sigmaT2),
        };
        for (double v : devs) worst = std::max(worst, v);
    }
    o.check(worst <= 1e-12, fmt::format("1000 draws, worst relative deviation {:.3g} (limit 1e-12)", worst));
    return o;
}

// 2. Kernel-combinant bridge
Outcome kernelCombinantBridge() {
    Outcome o;
    for (const DerivedParams& d : parameterSets()) {
        double worst = 0.0;
        for (const oracle::OrderDeviation& dev : oracle::bridgeDeviation(d, 1.0, 20)) {
            worst = std::max(worst, dev.maxRelDeviation);
        }
        o.check(worst <= 1e-8, fmt::format("x = {:.4g}: max |∫G_n(k,k) / (n C_n) - 1| over n <= 20 = {:.3g}", d.x,
                                           worst));
    }
    return o;
}

// 3. Ring recursion against closed-form kernels
Outcome ringEquivalence() {
    Outcome o;
    for (const DerivedParams& d : parameterSets()) {
        const auto pairs = oracle::randomPairs(d, 500, 3);
        double worst = 0.0;
        for (const oracle::OrderDeviation& dev : oracle::ringDeviation(d, 1.0, 20, pairs)) {
            worst = std::max(worst, dev.maxRelDeviation);
        }
        o.check(worst <= 1e-10, fmt::format("x = {:.4g}: 500 pairs, n <= 20, max relative deviation {:.3g}", d.x,
                                            worst));
    }
    return o;
}

// 4. Monte Carlo packet ensemble against exclusive spectra
Outcome monteCarloEquivalence() {
    Outcome o;
    oracle::McOptions opt;
    opt.samples = 1000000;
    opt.seed = 20240917;
    for (double x : {1.0, 10.0}) {
        const ModelParams p = oracle::paramsForX(x);
        const double sT = std::sqrt(derive(p).sigmaT2);
        std::vector<double> k;
        for (int i = 0; i <= 12; ++i) k.push_back(0.25 * i * sT);
        for (std::size_t n : {2, 3}) {
            const oracle::McComparison c = oracle::mcCompare(p, n, k, opt);
            o.check(c.maxAbsPull <= 3.0 && c.peakRelError <= 0.02,
                    fmt::format("x = {:g}, n = {}: max |pull| {:.2f} (limit 3), peak error {:.2f}% (limit 2%), "
                                "peak deviation {:.2f}%",
                                x, n, c.maxAbsPull, 100.0 * c.peakRelError, 100.0 * c.peakRelDeviation));
        }
    }
    return o;
}

/// ∫∫ N₂⁽ⁿ⁾ with each term factorized over Cartesian axes.
double integrateN2(const ExclusiveSpectra& ex, const GaussHermite& gh) {
    double total = 0.0;
    for (const ExclusiveSpectra::PairTerm& t : ex.pairTerms()) {
        const GaussianKernel& a = ex.kernelOf(t.first);
        const GaussianKernel& b = ex.kernelOf(t.second);
        for (bool crossed : {false, true}) {
            const double axis = gh.integrate2([&](double u, double v) {
                const Momentum3 k1{u, 0, 0};
                const Momentum3 k2{v, 0, 0};
                const double la = crossed ? a.logValue(k1, k2) : a.logValue(k1, k1);
                const double lb = crossed ? b.logValue(k2, k1) : b.logValue(k2, k2);
                return std::exp(la - a.logJn + lb - b.logJn);
            });
            total += std::exp(t.logWeight + a.logJn + b.logJn) * axis * axis * axis;
        }
    }
    return total;
}

// 5. Normalizations
Outcome normalizations() {
    Outcome o;
    for (const DerivedParams& d : {DerivedParams::natural(1.0, 1.0), derive(ModelParams{})}) {
        const double n0 = 0.6 * d.nc;
        const CombinantSeries cs = combinantsToTolerance(d, n0);
        const MultiplicityDistribution md = multiplicityDistribution(cs);
        o.check(std::abs(md.mass() - 1.0) <= 1e-9, fmt::format("x = {:.4g}: |Σp_n - 1| = {:.3g}", d.x,
                                                               std::abs(md.mass() - 1.0)));
        const double sumNC = detail::partialMoment(cs);
        o.check(rel(md.firstMoment(), sumNC) <= 1e-8,
                fmt::format("x = {:.4g}: Σn p_n vs Σn C_n relative {:.3g}", d.x, rel(md.firstMoment(), sumNC)));

        const GaussHermite gh(kDefaultQuadratureOrder, oracle::bridgeScale(d));
        double w1 = 0.0, w2 = 0.0;
        for (std::size_t n = 1; n <= 6; ++n) {
            const ExclusiveSpectra ex(d, n0, n);
            const double dn = static_cast<double>(n);
            w1 = std::max(w1, rel(gh.integrate3([&](const Momentum3& k) { return ex.n1(k); }), dn));
            if (n >= 2 && n <= 4) w2 = std::max(w2, rel(integrateN2(ex, gh), dn * (dn - 1.0)));
        }
        o.check(w1 <= 1e-6, fmt::format("x = {:.4g}: ∫N1^(n) = n for n <= 6, worst relative {:.3g}", d.x, w1));
        o.check(w2 <= 1e-5, fmt::format("x = {:.4g}: ∫∫N2^(n) = n(n-1) for n <= 4, worst relative {:.3g}", d.x, w2));
        const double i1 = gh.integrate3([&](const Momentum3& k) { return inclusiveN1(d, n0, k); });
        o.check(rel(i1, md.mean) <= 1e-6, fmt::format("x = {:.4g}: ∫N1 = <n> relative {:.3g}", d.x, rel(i1, md.mean)));
    }
    return o;
}

// 6. Trichotomy at the critical multiplicity
Outcome trichotomy() {
    Outcome o;
    const DerivedParams d = DerivedParams::natural(1.0, 1.0);
    const double nc = d.nc;
    const CombinantSeries below = combinants(d, 0.9 * nc, 1000);
    const CombinantSeries at = combinants(d, nc, 1000);
    const CombinantSeries above = combinants(d, 1.1 * nc, 1000);
    const double nC1000 = 1000.0 * below.c(1000);
    o.check(nC1000 < 1e-40, fmt::format("n0 = 0.9 n_c: 1000 C_1000 = {:.3g}", nC1000));
    o.check(std::abs(1000.0 * at.c(1000) - 1.0) <= 1e-6,
            fmt::format("n0 = n_c: |1000 C_1000 - 1| = {:.3g}", std::abs(1000.0 * at.c(1000) - 1.0)));
    const double partial = detail::partialMoment(above);
    o.check(partial > 1e6, fmt::format("n0 = 1.1 n_c: Σ_{{n<=1000}} n C_n = {:.3g}", partial));
    o.check(classifyRegime(d, 0.9 * nc) == Regime::Convergent && classifyRegime(d, nc) == Regime::Critical &&
                classifyRegime(d, 1.1 * nc) == Regime::Condensed,
            "classifier returns Convergent / Critical / Condensed");
    return o;
}

// 7. Inclusive intercept and the very rare limit
Outcome inclusiveIntercept() {
    Outcome o;
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        ModelParams p = randomParams(eng);
        const DerivedParams d = derive(p);
        const double n0 = 0.95 * u(eng) * d.nc + 1e-6;
        const double sT = std::sqrt(d.sigmaT2);
        for (double k : {0.0, 0.5, 1.0, 2.0}) {
            const Momentum3 kv{k * sT, 0.3 * k * sT, -0.2 * k * sT};
            worst = std::max(worst, std::abs(inclusiveC2(d, n0, kv, kv) - 2.0));
        }
    }
    o.check(worst <= 1e-12, fmt::format("200 convergent draws x 4 momenta: max |C2(k,k) - 2| = {:.3g}", worst));

    const DerivedParams d = derive(ModelParams{});
    const double n0 = 1e-4;
    const double hc = d.hbarc;
    double worstLambda = 0.0, worstR = 0.0;
    for (double K : {0.0, 100.0, 300.0}) {
        const Momentum3 Kv{0, 0, K};
        worstLambda = std::max(worstLambda, std::abs(inclusiveC2(d, n0, Kv, Kv) - 2.0));
        for (double dk : {10.0, 20.0, 40.0}) {
            const auto [k1, k2] = pairFromMean(Kv, {dk, 0, 0});
            const double rstar2 = -std::log(inclusiveC2(d, n0, k1, k2) - 1.0) * hc * hc / (dk * dk);
            worstR = std::max(worstR, rel(rstar2, d.Re2));
        }
    }
    o.check(worstLambda <= 1e-4, fmt::format("n0 = 1e-4: |lambda - 1| = {:.3g}", worstLambda));
    o.check(worstR <= 1e-4, fmt::format("n0 = 1e-4: max |R*^2/R_e^2 - 1| = {:.3g}", worstR));
    return o;
}

// 8. Rare-gas claims
Outcome rareGasClaims() {
    Outcome o;
    const DerivedParams d = derive(oracle::paramsForX(1e3));
    const double sT = std::sqrt(d.sigmaT2);
    const auto at = [&](double K) { return radiusParams(d, 1.0, 2, K); };

    o.check(at(0.0).lambdaK < 1.0, fmt::format("lambda(K=0) = {:.8f} < 1", at(0.0).lambdaK));
    bool increasing = true, nonNegative = true;
    double prevLambda = -INFINITY;
    for (double K = 0.0; K <= 5.0 * sT; K += 0.05 * sT) {
        const RareGasPrediction p = at(K);
        increasing = increasing && p.lambdaK > prevLambda;
        nonNegative = nonNegative && p.Rout2 - p.Rside2 >= 0.0;
        prevLambda = p.lambdaK;
    }
    o.check(increasing, "lambda_K increasing in K on [0, 5 sigma_T]");
    o.check(at(0.0).Rside2 < d.Re2 && d.Re2 < at(10.0 * sT).Rside2,
            fmt::format("R_s^2(0) = {:.6f} < R_e^2 = {:.6f} < R_s^2(inf) = {:.6f} fm^2", at(0.0).Rside2, d.Re2,
                        at(10.0 * sT).Rside2));
    const auto diff = [&](double K) { return at(K).Rout2 - at(K).Rside2; };
    o.check(nonNegative && diff(0.0) == 0.0 && diff(10.0 * sT) < 1e-30,
            "R_o^2 - R_s^2 >= 0, zero at K = 0 and K -> inf");
    double argmax = 0.0, best = -1.0;
    for (double K = 0.0; K <= 3.0 * sT; K += 1e-3 * sT) {
        if (diff(K) > best) {
            best = diff(K);
            argmax = K;
        }
    }
    o.check(std::abs(argmax / sT - 1.0) <= 2e-3, fmt::format("out-side maximum at K/sigma_T = {:.4f}", argmax / sT));

    std::vector<double> dev;
    for (double x : {1e2, 1e3, 1e4}) {
        const DerivedParams dx = derive(oracle::paramsForX(x));
        const double s = std::sqrt(dx.sigmaT2);
        const double qs = dx.hbarc / std::sqrt(dx.Re2);
        ComparisonGrid grid;
        grid.K = {0.0, 0.5 * s, s, 2.0 * s};
        for (int i = 0; i <= 12; ++i) grid.dk.push_back(0.25 * i * qs);
        const DeviationReport rep = compareExactVsRare(dx, 1.0, 2, grid);
        dev.push_back(rep.maxAbsDeviation);
        o.check(rep.valid && rep.maxAbsDeviation <= 20.0 * rep.expansionParameter,
                fmt::format("x = {:g}: max |C2_exact - C2_rare| = {:.3g}, n(2x)^-3/2 = {:.3g}", x,
                            rep.maxAbsDeviation, rep.expansionParameter));
    }
    const double expect = std::pow(10.0, 1.5);
    for (std::size_t i = 1; i < dev.size(); ++i) {
        const double ratio = dev[i - 1] / dev[i];
        o.check(ratio >= expect / 2.0 && ratio <= expect * 2.0,
                fmt::format("deviation ratio per decade of x: {:.2f} (x^-3/2 scaling gives {:.2f})", ratio, expect));
    }
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 9. Determinism of the batch front-end
Outcome determinism(const fs::path& root) {
    Outcome o;
    const cli::RunConfig cfg = cli::parseConfig(R"(
[model]
n0 = 1
R = 0.5
T = 100
m = 139.57
sigma = 300
[scan]
parameter = n0
min = 0.5
max = 2
steps = 2
[outputs]
products = multiplicity, spectrum, correlation, oracle-check
[grids]
k_max = 900
k_steps = 7
exclusive_n = 2, 3
K = 0, 250
dk_max = 400
dk_steps = 5
[numerics]
seed = 9
mc_samples = 100000
mc_streams = 8
oracle_max_n = 2
ring_max_n = 8
)",
                                                "acceptance-determinism");
    const fs::path a = root / "determinism_a";
    const fs::path b = root / "determinism_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const cli::RunResult ra = cli::run(cfg, {a.string(), 1});
    const cli::RunResult rb = cli::run(cfg, {b.string(), 2});
    std::size_t files = 0, identical = 0;
    for (const cli::OutputEntry& e : ra.entries) {
        for (const std::string& f : e.files) {
            ++files;
            if (slurp(a / f) == slurp(b / f)) ++identical;
        }
    }
    o.check(ra.exitCode == 0 && rb.exitCode == 0, fmt::format("exit codes {} and {}", ra.exitCode, rb.exitCode));
    o.check(files > 0 && files == identical, fmt::format("{} of {} data files byte-identical", identical, files));
    return o;
}

struct Criterion {
    int id;
    std::string name;
    double limitSeconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "boseglow-acceptance";
    fs::create_directories(root);

    const std::vector<Criterion> criteria{
        {1, "algebraic identities", 1.0, algebraicIdentities},
        {2, "kernel-combinant bridge", 10.0, kernelCombinantBridge},
        {3, "ring recursion vs closed-form kernels", 5.0, ringEquivalence},
        {4, "Monte Carlo packets vs exclusive spectra", 300.0, monteCarloEquivalence},
        {5, "normalizations", 120.0, normalizations},
        {6, "trichotomy at n_c", 5.0, trichotomy},
        {7, "inclusive intercept and rare limit", 10.0, inclusiveIntercept},
        {8, "rare-gas claims", 120.0, rareGasClaims},
        {9, "determinism", 60.0, [&root] { return determinism(root); }},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.check(false, fmt::format("exception: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.check(secs <= c.limitSeconds, fmt::format("runtime {:.2f} s (limit {:g} s)", secs, c.limitSeconds));
        fmt::print("[{}] {}. {} ({:.2f} s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs);
        for (const std::string& note : out.notes) fmt::print("       {}\n", note);
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
