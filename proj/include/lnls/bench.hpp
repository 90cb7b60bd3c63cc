#pragma once

// Benchmark harness: ground-state estimates, relative error, median curves
// with distribution-free confidence bands, SA (n, S) sweeps, reports, and
// manifest-driven studies.

#include "lnls/lnls.hpp"
#include "lnls/samplers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lnls {

/// r = (E0 - H) / E0. Requires E0 < 0.
double relative_error(double e0, double energy);

enum class E0Provenance { planted_exact, brute_force, long_sa };
std::string_view to_string(E0Provenance p);

/// Long-SA budget: one run_sa per (n, S) pair, all from the same seed.
struct E0Budget {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> runs{{4, 1u << 14}};
    std::uint64_t seed = 0;

    std::string describe() const;
};

struct GroundEstimate {
    double e0 = 0.0;
    E0Provenance provenance = E0Provenance::long_sa;
    std::string budget;
};

inline constexpr std::size_t brute_force_e0_limit = 20;

/// Planted instances use the planted energy; N <= 20 uses brute force;
/// otherwise the best energy over the budget's SA runs.
GroundEstimate estimate_e0(const IsingModel& model, const E0Budget& budget,
                           std::optional<double> planted_energy = std::nullopt);

struct MedianCI {
    double median = 0.0;
    double low = 0.0;
    double high = 0.0;
};

/// Sample median with a distribution-free confidence interval from the
/// binomial(n, 1/2) order statistics, interpolated between adjacent order
/// statistics (Hettmansperger-Sheather) to reach the nominal level.
MedianCI median_ci(std::vector<double> values, double level = 0.68);

struct CurvePoint {
    double time_ms = 0.0;
    double median_r = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct AggregateCurve {
    std::string series;
    std::vector<CurvePoint> points;
};

enum class TimeAxis { simulated, wall };

/// Per iteration: median relative error across traces (paired with their
/// E0) and median time. Traces must share an iteration count.
AggregateCurve aggregate_median(const std::vector<BurnDownRecord>& traces,
                                const std::vector<double>& e0s, std::string series,
                                TimeAxis axis = TimeAxis::simulated);

struct HullCell {
    std::uint64_t n = 1;
    std::uint64_t S = 1;
    MedianCI r;
    double median_wall_ms = 0.0;
    std::uint64_t spin_updates = 0;
};

/// Grid of run_sa over n = 2^x (x in `exponents`, n <= budget) and
/// S = budget / n for every budget (powers of two).
std::vector<HullCell> sa_hull_sweep(const std::vector<IsingModel>& instances,
                                    const std::vector<double>& e0s,
                                    const std::vector<std::uint64_t>& budgets,
                                    const std::vector<int>& exponents, std::uint64_t seed);

/// CSV with columns series,time_ms,median_r,ci_low,ci_high. Reals are written
/// in shortest round-trip form.
void write_curves_csv(std::ostream& out, const std::vector<AggregateCurve>& curves);
std::vector<AggregateCurve> read_curves_csv(std::istream& in);

/// Log-log burn-down plot, one polyline and legend entry per series.
void write_curves_svg(std::ostream& out, const std::vector<AggregateCurve>& curves,
                      const std::string& title = "burn-down");

enum class ReportFormat { csv, svg };
void emit_report(const std::vector<AggregateCurve>& curves, ReportFormat format,
                 const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Studies

struct StudyMethod {
    std::string label;
    /// lnls | sa | sgd
    std::string type;
    std::map<std::string, std::string> params;
};

struct StudyManifest {
    std::filesystem::path output = "study";
    LatticeKind lattice = LatticeKind::cubic;
    int L = 6;
    /// pmj | ferro | planted
    std::string ensemble = "pmj";
    double target_energy = -1.8;
    std::vector<std::uint64_t> seeds;
    E0Budget e0_budget;
    std::vector<StudyMethod> methods;
};

/// Flat key = value file with [method <label>] sections. See README.
StudyManifest parse_manifest(std::istream& in);
StudyManifest load_manifest(const std::filesystem::path& path);

struct StudyResult {
    std::vector<AggregateCurve> curves;
    std::vector<GroundEstimate> e0;
    /// Best energy any method reached per instance.
    std::vector<double> best_energy;
};

/// Runs every method on every instance, aggregates, checks that no method
/// beats E0, and writes <output>/<label>.csv and <output>/burndown.svg.
StudyResult run_study(const StudyManifest& manifest, unsigned threads = 1);

}  // namespace lnls
