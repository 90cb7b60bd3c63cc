#include "lnls/bench.hpp"
#include "lnls/generators.hpp"
#include "lnls/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lnls;

TEST_CASE("relative error") {
    CHECK(relative_error(-100.0, -90.0) == doctest::Approx(0.1));
    CHECK(relative_error(-100.0, -100.0) == 0.0);
    CHECK_THROWS_AS(relative_error(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(relative_error(5.0, -1.0), std::invalid_argument);
}

TEST_CASE("E0 provenance follows the available information") {
    const auto small = gen_pm_j(build_cubic(3), 1);
    CHECK(estimate_e0(small, {}).provenance == E0Provenance::long_sa);
    CHECK(estimate_e0(small, {}, -50.0).provenance == E0Provenance::planted_exact);
    CHECK(estimate_e0(small, {}, -50.0).e0 == -50.0);
    CHECK(to_string(E0Provenance::long_sa) == "long-SA");
    E0Budget b;
    b.runs = {{2, 64}, {1, 128}};
    b.seed = 3;
    CHECK(b.describe() == "n=2,S=64;n=1,S=128;seed=3");
}

TEST_CASE("median and its distribution-free interval") {
    const auto m = median_ci({3.0, 1.0, 2.0});
    CHECK(m.median == 2.0);
    CHECK(m.low <= m.median);
    CHECK(m.high >= m.median);
    CHECK(median_ci({1.0, 2.0, 3.0, 4.0}).median == 2.5);
    const auto one = median_ci({7.0});
    CHECK(one.low == 7.0);
    CHECK(one.high == 7.0);
    CHECK_THROWS_AS(median_ci({}), std::invalid_argument);
}

TEST_CASE("interval coverage is close to the nominal level") {
    // Uniform(0, 1) samples: the true median is 0.5.
    Rng rng(17);
    for (int n : {9, 25, 60}) {
        int hits = 0;
        const int reps = 4000;
        for (int r = 0; r < reps; ++r) {
            std::vector<double> x(static_cast<std::size_t>(n));
            for (auto& v : x) {
                v = rng.uniform();
            }
            const auto ci = median_ci(x);
            hits += ci.low <= 0.5 && 0.5 <= ci.high;
        }
        CAPTURE(n);
        CHECK(std::abs(hits / double(reps) - 0.68) < 0.045);
    }
}

TEST_CASE("aggregate_median pairs traces with their E0") {
    BurnDownRecord a;
    a.initial_energy = 0;
    BurnDownRecord b = a;
    for (int i = 1; i <= 3; ++i) {
        IterationRecord r;
        r.iteration = static_cast<std::uint64_t>(i);
        r.energy = -10.0 * i;
        r.sim_time_ms = 17.5 * i;
        a.iterations.push_back(r);
        r.energy = -20.0 * i;
        b.iterations.push_back(r);
    }
    const auto c = aggregate_median({a, b}, {-40.0, -80.0}, "x");
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].median_r == doctest::Approx(0.75));
    CHECK(c.points[2].time_ms == doctest::Approx(52.5));
    b.iterations.pop_back();
    CHECK_THROWS_AS(aggregate_median({a, b}, {-40.0, -80.0}, "x"), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_median({a}, {-40.0, -80.0}, "x"), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_median({}, {}, "x"), std::invalid_argument);
}

TEST_CASE("SA hull sweep covers the (n, S) grid at fixed budgets") {
    std::vector<IsingModel> inst;
    std::vector<double> e0;
    for (std::uint64_t s = 0; s < 3; ++s) {
        inst.push_back(gen_pm_j(build_cubic(4), s));
        e0.push_back(estimate_e0(inst.back(), {}).e0);
    }
    const auto cells = sa_hull_sweep(inst, e0, {16, 64}, {0, 2, 4, 6}, 1);
    CHECK(cells.size() == 3 + 4);
    for (const auto& c : cells) {
        CHECK((c.n * c.S == 16 || c.n * c.S == 64));
        CHECK(c.spin_updates == c.n * c.S * 64);
        CHECK(c.r.median >= 0.0);
    }
    CHECK_THROWS_AS(sa_hull_sweep(inst, e0, {24}, {0}, 1), std::invalid_argument);
}

TEST_CASE("curve CSV round trips byte for byte") {
    std::vector<AggregateCurve> curves{{"lnls", {{17.5, 0.25, 0.2, 0.3}, {35, 0.1, 1e-3, 0.2}}},
                                       {"sa", {{0.1, 0.9, 0.8, 1.0}}}};
    std::stringstream a;
    write_curves_csv(a, curves);
    const auto back = read_curves_csv(a);
    REQUIRE(back.size() == 2);
    CHECK(back[0].points[1].ci_low == 1e-3);
    std::stringstream b;
    write_curves_csv(b, back);
    CHECK(a.str() == b.str());
    std::stringstream bad("series,time\n");
    CHECK_THROWS(read_curves_csv(bad));
    CHECK_THROWS(write_curves_csv(b, {{"a,b", {}}}));
}

TEST_CASE("SVG report has one polyline and legend entry per series") {
    std::vector<AggregateCurve> curves{{"lnls", {{17.5, 0.25, 0.2, 0.3}, {35, 0.0, 0.0, 0.2}}},
                                       {"sgd", {{1, 0.5, 0.4, 0.6}}}};
    std::ostringstream out;
    write_curves_svg(out, curves, "t");
    const auto s = out.str();
    auto count = [&](const std::string& needle) {
        std::size_t n = 0;
        for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) {
            ++n;
        }
        return n;
    };
    CHECK(count("<polyline class=\"series\"") == 2);
    CHECK(count("class=\"legend\"") == 2);
    CHECK(s.find("nan") == std::string::npos);
    CHECK(s.find("inf") == std::string::npos);
}

TEST_CASE("manifest parsing") {
    std::istringstream in(R"(# study
output = out/study
lattice = cubic
L = 4
ensemble = planted
target_energy = -1.7
instances = 3
seed_base = 10
e0_runs = 2:128, 1:256

[method lnls-3]
type = lnls
shapes = 3x3x3
max_iterations = 5

[method sgd]
type = sgd
restarts = 1, 4
)");
    const auto m = parse_manifest(in);
    CHECK(m.output == "out/study");
    CHECK(m.L == 4);
    CHECK(m.seeds == std::vector<std::uint64_t>{10, 11, 12});
    CHECK(m.e0_budget.runs.size() == 2);
    REQUIRE(m.methods.size() == 2);
    CHECK(m.methods[0].params.at("shapes") == "3x3x3");

    std::istringstream unknown("L = 4\nfoo = 1\n");
    CHECK_THROWS_AS(parse_manifest(unknown), std::invalid_argument);
    std::istringstream no_methods("instances = 2\n");
    CHECK_THROWS_AS(parse_manifest(no_methods), std::invalid_argument);
    std::istringstream bad_type("instances = 2\n[method a]\ntype = qbsolv\n");
    CHECK_THROWS_AS(parse_manifest(bad_type), std::invalid_argument);
    std::istringstream dup("seeds = 1, 1\n[method a]\ntype = sa\n");
    CHECK_THROWS_AS(parse_manifest(dup), std::invalid_argument);
}

TEST_CASE("a small study writes per-method curves and a plot") {
    const auto dir = std::filesystem::temp_directory_path() / "lnls_study_test";
    std::filesystem::remove_all(dir);
    StudyManifest m;
    m.output = dir;
    m.L = 4;
    m.ensemble = "planted";
    m.target_energy = -1.7;
    m.seeds = {1, 2, 3};
    m.methods = {{"lnls", "lnls", {{"shapes", "3x3x3"}, {"max_iterations", "8"}}},
                 {"sa", "sa", {{"sweeps", "4,16,64"}}},
                 {"sgd", "sgd", {{"restarts", "1,8"}}}};
    const auto r = run_study(m, 2);
    REQUIRE(r.curves.size() == 3);
    CHECK(r.curves[0].points.size() == 8);
    CHECK(r.curves[1].points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.e0[i].provenance == E0Provenance::planted_exact);
        CHECK(r.best_energy[i] >= r.e0[i].e0);
    }
    CHECK(std::filesystem::exists(dir / "lnls.csv"));
    CHECK(std::filesystem::exists(dir / "sgd.csv"));
    CHECK(std::filesystem::exists(dir / "burndown.svg"));
    CHECK(std::filesystem::exists(dir / "e0.csv"));

    // The same study with one thread gives the same curves (up to time).
    m.output = dir / "serial";
    const auto s = run_study(m, 1);
    CHECK(s.curves[0].points.back().median_r == r.curves[0].points.back().median_r);
    std::filesystem::remove_all(dir);
}

TEST_CASE("a study whose E0 is beaten is rejected") {
    StudyManifest m;
    m.output = std::filesystem::temp_directory_path() / "lnls_study_dominance";
    m.L = 4;
    m.seeds = {1};
    // A deliberately weak E0 budget: a single one-sweep quench.
    m.e0_budget.runs = {{1, 1}};
    m.methods = {{"sa", "sa", {{"sweeps", "4096"}, {"samples", "4"}}}};
    CHECK_THROWS_AS(run_study(m), std::runtime_error);
    std::filesystem::remove_all(m.output);
}
