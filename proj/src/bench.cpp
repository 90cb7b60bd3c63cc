#include "lnls/bench.hpp"

#include "lnls/generators.hpp"
#include "lnls/instance_io.hpp"
#include "lnls/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <mutex>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lnls {

double relative_error(double e0, double energy) {
    if (!(e0 < 0.0)) {
        throw std::invalid_argument("relative error needs a negative ground-energy estimate, got E0=" +
                                    format_real(e0));
    }
    return (e0 - energy) / e0;
}

std::string_view to_string(E0Provenance p) {
    switch (p) {
        case E0Provenance::planted_exact: return "planted-exact";
        case E0Provenance::brute_force: return "brute-force";
        case E0Provenance::long_sa: return "long-SA";
    }
    return "long-SA";
}

std::string E0Budget::describe() const {
    std::string s;
    for (const auto& [n, S] : runs) {
        if (!s.empty()) {
            s += ";";
        }
        s += "n=" + std::to_string(n) + ",S=" + std::to_string(S);
    }
    return s + ";seed=" + std::to_string(seed);
}

GroundEstimate estimate_e0(const IsingModel& model, const E0Budget& budget,
                           std::optional<double> planted_energy) {
    if (planted_energy) {
        return {*planted_energy, E0Provenance::planted_exact, "-"};
    }
    if (model.size() <= brute_force_e0_limit) {
        return {brute_force(model).energy, E0Provenance::brute_force, "exhaustive"};
    }
    if (budget.runs.empty()) {
        throw std::invalid_argument("E0 budget has no SA runs");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < budget.runs.size(); ++i) {
        SaRun run;
        run.samples = budget.runs[i].first;
        run.sweeps = budget.runs[i].second;
        run.seed = derive_seed(budget.seed, i);
        best = std::min(best, run_sa(model, run).best_energy);
    }
    return {best, E0Provenance::long_sa, budget.describe()};
}

// ---------------------------------------------------------------------------
// Medians

namespace {

/// P(k <= B <= n - k) for B ~ Binomial(n, 1/2).
double central_mass(int n, int k) {
    if (k > n - k) {
        return 0.0;
    }
    double total = 0.0;
    for (int i = k; i <= n - k; ++i) {
        total += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                          n * std::log(2.0));
    }
    return total;
}

}  // namespace

MedianCI median_ci(std::vector<double> values, double level) {
    if (values.empty()) {
        throw std::invalid_argument("median of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    MedianCI out;
    out.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    // x(i) with 1-based rank.
    const auto x = [&](int i) { return values[static_cast<std::size_t>(i - 1)]; };
    if (central_mass(n, 1) < level) {
        out.low = x(1);
        out.high = x(n);
        return out;
    }
    int k = 1;
    while (central_mass(n, k + 1) >= level) {
        ++k;
    }
    const double gk = central_mass(n, k);
    const double gk1 = central_mass(n, k + 1);
    if (k + 1 > n - k || gk == gk1) {
        out.low = x(k);
        out.high = x(n - k + 1);
        return out;
    }
    const double I = (gk - level) / (gk - gk1);
    const double lambda = (n - k) * I / (k + (n - 2 * k) * I);
    out.low = lambda * x(k + 1) + (1.0 - lambda) * x(k);
    out.high = lambda * x(n - k) + (1.0 - lambda) * x(n - k + 1);
    return out;
}

AggregateCurve aggregate_median(const std::vector<BurnDownRecord>& traces,
                                const std::vector<double>& e0s, std::string series,
                                TimeAxis axis) {
    if (traces.empty()) {
        throw std::invalid_argument("aggregate_median: empty trace set");
    }
    if (e0s.size() != traces.size()) {
        throw std::invalid_argument("aggregate_median: one E0 per trace required");
    }
    const std::size_t T = traces.front().iterations.size();
    for (const auto& t : traces) {
        if (t.iterations.size() != T) {
            throw std::invalid_argument("aggregate_median: traces have different iteration counts");
        }
    }
    AggregateCurve curve;
    curve.series = std::move(series);
    for (std::size_t it = 0; it < T; ++it) {
        std::vector<double> r;
        std::vector<double> t;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            const auto& rec = traces[i].iterations[it];
            r.push_back(relative_error(e0s[i], rec.energy));
            t.push_back(axis == TimeAxis::simulated ? rec.sim_time_ms : rec.wall_time_ms);
        }
        const auto ci = median_ci(r);
        curve.points.push_back({median_ci(t).median, ci.median, ci.low, ci.high});
    }
    return curve;
}

std::vector<HullCell> sa_hull_sweep(const std::vector<IsingModel>& instances,
                                    const std::vector<double>& e0s,
                                    const std::vector<std::uint64_t>& budgets,
                                    const std::vector<int>& exponents, std::uint64_t seed) {
    if (instances.size() != e0s.size() || instances.empty()) {
        throw std::invalid_argument("sa_hull_sweep: one E0 per instance required");
    }
    std::vector<HullCell> out;
    for (const auto budget : budgets) {
        if (budget == 0 || (budget & (budget - 1)) != 0) {
            throw std::invalid_argument("sa_hull_sweep: budgets must be powers of two");
        }
        for (const int x : exponents) {
            if (x < 0 || x > 62) {
                throw std::invalid_argument("sa_hull_sweep: exponent out of range");
            }
            const std::uint64_t n = std::uint64_t{1} << x;
            if (n > budget) {
                continue;
            }
            HullCell cell;
            cell.n = n;
            cell.S = budget / n;
            std::vector<double> r;
            std::vector<double> wall;
            for (std::size_t i = 0; i < instances.size(); ++i) {
                SaRun run;
                run.samples = cell.n;
                run.sweeps = cell.S;
                run.seed = derive_seed(seed, i);
                const auto t0 = std::chrono::steady_clock::now();
                const auto res = run_sa(instances[i], run);
                wall.push_back(std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count());
                r.push_back(relative_error(e0s[i], res.best_energy));
                cell.spin_updates = res.spin_updates;
            }
            cell.r = median_ci(r);
            cell.median_wall_ms = median_ci(wall).median;
            out.push_back(cell);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports

void write_curves_csv(std::ostream& out, const std::vector<AggregateCurve>& curves) {
    out << "series,time_ms,median_r,ci_low,ci_high\n";
    for (const auto& c : curves) {
        if (c.series.find_first_of(",\n\"") != std::string::npos) {
            throw std::invalid_argument("series label may not contain commas, quotes or newlines");
        }
        for (const auto& p : c.points) {
            out << c.series << "," << format_real(p.time_ms) << "," << format_real(p.median_r)
                << "," << format_real(p.ci_low) << "," << format_real(p.ci_high) << "\n";
        }
    }
}

std::vector<AggregateCurve> read_curves_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "series,time_ms,median_r,ci_low,ci_high") {
        throw std::runtime_error("curve CSV: missing or unexpected header");
    }
    std::vector<AggregateCurve> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            f.push_back(cell);
        }
        if (f.size() != 5) {
            throw std::runtime_error("curve CSV: expected 5 fields in '" + line + "'");
        }
        if (out.empty() || out.back().series != f[0]) {
            out.push_back({f[0], {}});
        }
        out.back().points.push_back(
            {parse_real(f[1]), parse_real(f[2]), parse_real(f[3]), parse_real(f[4])});
    }
    return out;
}

void write_curves_svg(std::ostream& out, const std::vector<AggregateCurve>& curves,
                      const std::string& title) {
    constexpr double W = 720.0;
    constexpr double H = 480.0;
    constexpr double left = 80.0;
    constexpr double right = 200.0;
    constexpr double top = 40.0;
    constexpr double bottom = 60.0;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    // Zero errors (optimum reached) cannot sit on a log axis; they are drawn
    // at the floor, one decade under the smallest positive value.
    double tmin = std::numeric_limits<double>::infinity();
    double tmax = 0.0;
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            if (p.time_ms > 0) {
                tmin = std::min(tmin, p.time_ms);
                tmax = std::max(tmax, p.time_ms);
            }
            if (p.median_r > 0) {
                rmin = std::min(rmin, p.median_r);
                rmax = std::max(rmax, p.median_r);
            }
        }
    }
    if (!(tmax > 0)) {
        tmin = 1.0;
        tmax = 10.0;
    }
    if (!(rmax > 0)) {
        rmin = 1e-3;
        rmax = 1.0;
    }
    const double lt0 = std::floor(std::log10(tmin));
    const double lt1 = std::max(std::ceil(std::log10(tmax)), lt0 + 1);
    const double floor_r = rmin / 10.0;
    const double lr0 = std::floor(std::log10(floor_r));
    const double lr1 = std::max(std::ceil(std::log10(rmax)), lr0 + 1);
    const auto px = [&](double t) {
        const double lt = std::log10(std::max(t, std::pow(10.0, lt0)));
        return left + (lt - lt0) / (lt1 - lt0) * (W - left - right);
    };
    const auto py = [&](double r) {
        const double lr = std::log10(std::max(r, floor_r));
        return H - bottom - (lr - lr0) / (lr1 - lr0) * (H - top - bottom);
    };

    out << std::setprecision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << title << "</text>\n";
    out << "<g stroke=\"#888\" stroke-width=\"1\" fill=\"none\">\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right
        << "\" height=\"" << H - top - bottom << "\"/>\n";
    out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double e = lt0; e <= lt1; e += 1) {
        out << "<text x=\"" << px(std::pow(10.0, e)) << "\" y=\"" << H - bottom + 16
            << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    for (double e = lr0; e <= lr1; e += 1) {
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(std::pow(10.0, e)) + 4
            << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    out << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 16
        << "\" text-anchor=\"middle\">time (ms)</text>\n";
    out << "<text x=\"18\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << (top + H - bottom) / 2
        << ")\">median relative error</text>\n</g>\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const char* color = palette[i % std::size(palette)];
        out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : curves[i].points) {
            out << px(p.time_ms) << "," << py(p.median_r) << " ";
        }
        out << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(i);
        out << "<g class=\"legend\"><line x1=\"" << W - right + 12 << "\" y1=\"" << ly << "\" x2=\""
            << W - right + 36 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/><text x=\"" << W - right + 42 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << curves[i].series
            << "</text></g>\n";
    }
    out << "</svg>\n";
}

void emit_report(const std::vector<AggregateCurve>& curves, ReportFormat format,
                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write report " + path.string());
    }
    if (format == ReportFormat::csv) {
        write_curves_csv(out, curves);
    } else {
        write_curves_svg(out, curves);
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::invalid_argument("manifest key '" + key + "': expected an unsigned integer, got '" +
                                    s + "'");
    }
    return v;
}

std::vector<std::uint64_t> to_u64_list(const std::string& key, const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(s)) {
        out.push_back(to_u64(key, item));
    }
    if (out.empty()) {
        throw std::invalid_argument("manifest key '" + key + "': empty list");
    }
    return out;
}

double to_real(const std::string& key, const std::string& s) {
    try {
        return parse_real(s);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("manifest key '" + key + "': expected a number, got '" + s +
                                    "'");
    }
}

}  // namespace

StudyManifest parse_manifest(std::istream& in) {
    StudyManifest m;
    std::uint64_t instances = 0;
    std::uint64_t seed_base = 1;
    std::string line;
    std::size_t line_no = 0;
    StudyMethod* current = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                            ": malformed section header");
            }
            std::stringstream ss(line.substr(1, line.size() - 2));
            std::string word;
            std::string label;
            ss >> word >> label;
            if (word != "method" || label.empty()) {
                throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                            ": expected [method <label>]");
            }
            for (const auto& other : m.methods) {
                if (other.label == label) {
                    throw std::invalid_argument("manifest: duplicate method label '" + label + "'");
                }
            }
            m.methods.push_back({label, "", {}});
            current = &m.methods.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (current) {
            if (key == "type") {
                current->type = value;
            } else {
                current->params[key] = value;
            }
            continue;
        }
        if (key == "output") {
            m.output = value;
        } else if (key == "lattice") {
            m.lattice = parse_lattice_kind(value);
        } else if (key == "L") {
            m.L = static_cast<int>(to_u64(key, value));
        } else if (key == "ensemble") {
            m.ensemble = value;
        } else if (key == "target_energy") {
            m.target_energy = to_real(key, value);
        } else if (key == "instances") {
            instances = to_u64(key, value);
        } else if (key == "seed_base") {
            seed_base = to_u64(key, value);
        } else if (key == "seeds") {
            m.seeds = to_u64_list(key, value);
        } else if (key == "e0_runs") {
            // n:S pairs, comma separated.
            m.e0_budget.runs.clear();
            for (const auto& item : split_list(value)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) {
                    throw std::invalid_argument("manifest key 'e0_runs': expected n:S pairs");
                }
                m.e0_budget.runs.emplace_back(to_u64(key, item.substr(0, colon)),
                                              to_u64(key, item.substr(colon + 1)));
            }
        } else if (key == "e0_seed") {
            m.e0_budget.seed = to_u64(key, value);
        } else {
            throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    if (m.seeds.empty()) {
        if (instances == 0) {
            throw std::invalid_argument("manifest: give 'seeds' or 'instances'");
        }
        for (std::uint64_t i = 0; i < instances; ++i) {
            m.seeds.push_back(seed_base + i);
        }
    } else if (instances != 0 && instances != m.seeds.size()) {
        throw std::invalid_argument("manifest: 'instances' disagrees with the number of seeds");
    }
    auto sorted = m.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("manifest: instance seeds must be distinct");
    }
    if (m.methods.empty()) {
        throw std::invalid_argument("manifest: no [method ...] sections");
    }
    for (const auto& method : m.methods) {
        if (method.type != "lnls" && method.type != "sa" && method.type != "sgd") {
            throw std::invalid_argument("manifest: method '" + method.label +
                                        "' needs type = lnls, sa or sgd");
        }
    }
    if (m.ensemble != "pmj" && m.ensemble != "ferro" && m.ensemble != "planted") {
        throw std::invalid_argument("manifest: unknown ensemble '" + m.ensemble + "'");
    }
    return m;
}

StudyManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open manifest " + path.string());
    }
    return parse_manifest(in);
}

// ---------------------------------------------------------------------------
// Study runner

namespace {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

class Params {
public:
    Params(const StudyMethod& m) : m_(m) {}

    std::string str(const std::string& key, const std::string& def) const {
        const auto it = m_.params.find(key);
        return it == m_.params.end() ? def : it->second;
    }
    std::uint64_t u64(const std::string& key, std::uint64_t def) const {
        const auto it = m_.params.find(key);
        return it == m_.params.end() ? def : to_u64(m_.label + "." + key, it->second);
    }
    std::vector<std::uint64_t> list(const std::string& key, std::uint64_t def) const {
        const auto it = m_.params.find(key);
        return it == m_.params.end() ? std::vector<std::uint64_t>{def}
                                     : to_u64_list(m_.label + "." + key, it->second);
    }
    double real(const std::string& key, double def) const {
        const auto it = m_.params.find(key);
        return it == m_.params.end() ? def : to_real(m_.label + "." + key, it->second);
    }

private:
    const StudyMethod& m_;
};

double ms_between(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

StudyResult run_study(const StudyManifest& manifest, unsigned threads) {
    const std::size_t count = manifest.seeds.size();
    auto topo = build_lattice(manifest.lattice, manifest.L);

    std::vector<std::optional<IsingModel>> models(count);
    std::vector<std::optional<double>> planted(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto seed = manifest.seeds[i];
        if (manifest.ensemble == "pmj") {
            models[i] = gen_pm_j(topo, seed);
        } else if (manifest.ensemble == "ferro") {
            models[i] = gen_ferromagnet(topo);
            planted[i] = energy(*models[i], SpinState(topo->num_vertices(), 1));
        } else {
            if (manifest.lattice != LatticeKind::cubic) {
                throw std::invalid_argument("tile planting is defined for cubic lattices only");
            }
            auto p = gen_tile_planted(manifest.L, solve_tile_distribution(manifest.target_energy),
                                      seed);
            planted[i] = p.ground_energy;
            models[i] = std::move(p.model);
        }
    }

    StudyResult result;
    result.e0.resize(count);
    parallel_for(count, threads, [&](std::size_t i) {
        E0Budget budget = manifest.e0_budget;
        budget.seed = derive_seed(manifest.e0_budget.seed, manifest.seeds[i]);
        result.e0[i] = estimate_e0(*models[i], budget, planted[i]);
    });
    result.best_energy.assign(count, std::numeric_limits<double>::infinity());
    std::mutex best_mutex;
    const auto observe = [&](std::size_t i, double e) {
        std::lock_guard lock(best_mutex);
        result.best_energy[i] = std::min(result.best_energy[i], e);
    };
    std::vector<double> e0s(count);
    for (std::size_t i = 0; i < count; ++i) {
        e0s[i] = result.e0[i].e0;
    }

    for (const auto& method : manifest.methods) {
        const Params p(method);
        const std::uint64_t method_seed = p.u64("seed", 0);
        AggregateCurve curve;
        curve.series = method.label;
        if (method.type == "lnls") {
            LnlsConfig base;
            const auto shape_specs = split_list(p.str("shapes", "4x4x4"));
            const bool rotations = p.str("rotations", "false") == "true";
            for (const auto& s : shape_specs) {
                auto shape = SubspaceShape::parse(manifest.lattice, s);
                if (rotations && manifest.lattice == LatticeKind::cubic) {
                    const auto e = shape.extent();
                    for (auto& r : cuboid_rotations(e[0], e[1], e[2])) {
                        base.shapes.push_back(std::move(r));
                    }
                } else {
                    base.shapes.push_back(std::move(shape));
                }
            }
            base.subsolver.kind = parse_subsolver_kind(p.str("subsolver", "sa"));
            base.subsolver.sweeps = p.u64("sweeps", base.subsolver.sweeps);
            base.subsolver.samples = p.u64("samples", base.subsolver.samples);
            base.subsolver.reads = p.u64("reads", base.subsolver.reads);
            base.subsolver.chain_strength = p.real("chain_strength", base.subsolver.chain_strength);
            base.subsolver.auto_scale = p.str("auto_scale", "false") == "true";
            base.timing.t_p = p.real("t_p", base.timing.t_p);
            base.timing.t_ro = p.real("t_ro", base.timing.t_ro);
            base.timing.t_a = p.real("t_a", base.timing.t_a);
            base.timing.network_overhead = p.real("network_overhead", base.timing.network_overhead);
            base.timing.ns_per_update = p.real("ns_per_update", base.timing.ns_per_update);
            base.clock = parse_clock_mode(p.str("clock", "auto"));
            base.variant = parse_workflow_variant(p.str("variant", "default"));
            base.max_iterations = p.u64("max_iterations", base.max_iterations);
            if (base.subsolver.kind == SubsolverKind::programmed_sa ||
                base.subsolver.kind == SubsolverKind::programmed_random) {
                auto hw = std::make_shared<const HardwareGraph>(
                    static_cast<int>(p.u64("hardware_m", 16)),
                    DefectSpec{{}, {}, p.real("qubit_defect_rate", 0.0),
                               p.real("coupler_defect_rate", 0.0), p.u64("defect_seed", 0)});
                for (const auto& shape : base.shapes) {
                    for (auto& e : make_origin_embeddings(*hw, shape)) {
                        base.embeddings.push_back(std::move(e));
                    }
                }
                base.hardware = hw;
            }
            const std::uint64_t runs = p.u64("runs", 1);
            std::vector<BurnDownRecord> traces(count * runs);
            parallel_for(count * runs, threads, [&](std::size_t j) {
                const std::size_t i = j / runs;
                LnlsConfig cfg = base;
                cfg.seed = derive_seed(method_seed, j);
                const auto res = run_lnls(*models[i], cfg);
                observe(i, res.energy);
                traces[j] = res.trace;
            });
            std::vector<double> pair_e0;
            for (std::size_t j = 0; j < traces.size(); ++j) {
                pair_e0.push_back(e0s[j / runs]);
            }
            curve = aggregate_median(traces, pair_e0, method.label, TimeAxis::simulated);
        } else {
            // Wall-clock baselines: one point per budget.
            const bool is_sa = method.type == "sa";
            const auto budgets = is_sa ? p.list("sweeps", 1024) : p.list("restarts", 1);
            const auto samples = p.u64("samples", 1);
            for (const auto b : budgets) {
                std::vector<double> r(count);
                std::vector<double> wall(count);
                parallel_for(count, threads, [&](std::size_t i) {
                    const auto t0 = std::chrono::steady_clock::now();
                    double e = 0.0;
                    if (is_sa) {
                        SaRun run;
                        run.samples = samples;
                        run.sweeps = b;
                        run.seed = derive_seed(method_seed, i);
                        e = run_sa(*models[i], run).best_energy;
                    } else {
                        e = run_sgd(*models[i], b, derive_seed(method_seed, i)).best_energy;
                    }
                    wall[i] = ms_between(t0, std::chrono::steady_clock::now());
                    observe(i, e);
                    r[i] = relative_error(e0s[i], e);
                });
                const auto ci = median_ci(r);
                curve.points.push_back({median_ci(wall).median, ci.median, ci.low, ci.high});
            }
            std::sort(curve.points.begin(), curve.points.end(),
                      [](const auto& a, const auto& b) { return a.time_ms < b.time_ms; });
        }
        result.curves.push_back(std::move(curve));
    }

    // E0 dominance: a method beating the estimate invalidates the study.
    for (std::size_t i = 0; i < count; ++i) {
        const double tol = 1e-9 * std::max(1.0, std::abs(e0s[i]));
        if (result.best_energy[i] < e0s[i] - tol) {
            throw std::runtime_error(
                "E0 estimate " + format_real(e0s[i]) + " for instance seed " +
                std::to_string(manifest.seeds[i]) + " was beaten (energy " +
                format_real(result.best_energy[i]) +
                "); refresh the estimate with a larger e0_runs budget and rerun the study");
        }
    }

    std::filesystem::create_directories(manifest.output);
    for (const auto& c : result.curves) {
        emit_report({c}, ReportFormat::csv, manifest.output / (c.series + ".csv"));
    }
    emit_report(result.curves, ReportFormat::svg, manifest.output / "burndown.svg");
    {
        std::ofstream e0(manifest.output / "e0.csv");
        e0 << "seed,e0,provenance,budget\n";
        for (std::size_t i = 0; i < count; ++i) {
            e0 << manifest.seeds[i] << "," << format_real(result.e0[i].e0) << ","
               << to_string(result.e0[i].provenance) << "," << result.e0[i].budget << "\n";
        }
    }
    return result;
}

}  // namespace lnls
