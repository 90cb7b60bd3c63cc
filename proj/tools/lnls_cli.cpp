// Command-line entry point: generate, lattice export, embed, solve, estimate,
// bench, report. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include "lnls/bench.hpp"
#include "lnls/embedding.hpp"
#include "lnls/generators.hpp"
#include "lnls/instance_io.hpp"
#include "lnls/lnls.hpp"
#include "lnls/rng.hpp"
#include "lnls/samplers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lnls;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string format = "text";
};

/// Thrown for validation failures that are reported but are not usage errors.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const Globals& g, const json& record) {
    if (g.format == "json") {
        std::cout << record.dump(2) << "\n";
        return;
    }
    for (const auto& [key, value] : record.items()) {
        std::cout << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump())
                  << "\n";
    }
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string kind = "cubic";
    int L = 6;
    std::string ensemble = "pmj";
    double target = -1.8;
    std::string out;
};

void run_generate(const Globals& g, const GenerateArgs& a) {
    const auto kind = parse_lattice_kind(a.kind);
    if (fs::path(a.out).has_parent_path()) {
        fs::create_directories(fs::path(a.out).parent_path());
    }
    InstanceHeader header{a.ensemble, g.seed};
    json rec;
    if (a.ensemble == "planted") {
        if (kind != LatticeKind::cubic) {
            throw std::invalid_argument("tile planting is defined for cubic lattices only");
        }
        const auto inst = gen_tile_planted(a.L, solve_tile_distribution(a.target), g.seed);
        save_instance(a.out, inst.model, header);
        auto side = open_out(sidecar_path(a.out, "planted"));
        write_planted(side, inst.model.topology(), {inst.planted, inst.ground_energy});
        rec["planted"] = sidecar_path(a.out, "planted").string();
        rec["ground_energy"] = inst.ground_energy;
    } else if (a.ensemble == "pmj" || a.ensemble == "ferro") {
        auto topo = build_lattice(kind, a.L);
        const auto model = a.ensemble == "pmj" ? gen_pm_j(topo, g.seed) : gen_ferromagnet(topo);
        save_instance(a.out, model, header);
    } else {
        throw std::invalid_argument("unknown ensemble '" + a.ensemble +
                                    "' (expected pmj, ferro or planted)");
    }
    rec["instance"] = a.out;
    emit(g, rec);
}

// ---------------------------------------------------------------------------

struct DefectArgs {
    int m = 16;
    double qubit_rate = 0.0;
    double coupler_rate = 0.0;
    std::uint64_t defect_seed = 0;

    HardwareGraph build() const {
        return HardwareGraph(m, DefectSpec{{}, {}, qubit_rate, coupler_rate, defect_seed});
    }
};

void add_defect_flags(CLI::App* cmd, DefectArgs& d) {
    cmd->add_option("--m", d.m, "Pegasus size P[m]")->capture_default_str();
    cmd->add_option("--qubit-defect-rate", d.qubit_rate, "i.i.d. qubit defect rate");
    cmd->add_option("--coupler-defect-rate", d.coupler_rate, "i.i.d. coupler defect rate");
    cmd->add_option("--defect-seed", d.defect_seed, "seed of the random defect mask");
}

struct EmbedMakeArgs {
    std::string kind = "cubic";
    std::string shape;
    int placements = 1;
    DefectArgs hw;
    std::string out;
};

void run_embed_make(const Globals& g, const EmbedMakeArgs& a) {
    const auto hw = a.hw.build();
    const auto shape = SubspaceShape::parse(parse_lattice_kind(a.kind), a.shape);
    const auto embs = make_origin_embeddings(hw, shape, EmbeddingOptions{a.placements});
    json rec;
    rec["embeddings"] = json::array();
    for (std::size_t i = 0; i < embs.size(); ++i) {
        fs::path path = a.out;
        if (embs.size() > 1) {
            path.replace_filename(path.stem().string() + "-" + std::to_string(i) +
                                  path.extension().string());
        }
        auto out = open_out(path);
        write_embedding(out, embs[i], hw);
        rec["embeddings"].push_back({{"path", path.string()},
                                     {"variables", embs[i].num_variables()},
                                     {"vacancies", embs[i].num_vacancies()},
                                     {"greedy_cover", embs[i].greedy_cover}});
    }
    emit(g, rec);
}

struct EmbedValidateArgs {
    std::string file;
    DefectArgs hw;
};

void run_embed_validate(const Globals& g, const EmbedValidateArgs& a) {
    const auto hw = a.hw.build();
    auto in = open_in(a.file);
    const auto emb = read_embedding(in, hw);
    const auto errors = validate_embedding(emb, hw);
    json rec;
    rec["file"] = a.file;
    rec["variables"] = emb.num_variables();
    rec["vacancies"] = emb.num_vacancies();
    rec["valid"] = errors.empty();
    rec["violations"] = errors;
    emit(g, rec);
    if (!errors.empty()) {
        throw CheckFailed(std::to_string(errors.size()) + " embedding violation(s)");
    }
}

// ---------------------------------------------------------------------------

struct SolveSaArgs {
    std::string instance;
    std::uint64_t n = 1;
    std::uint64_t S = 1024;
    std::optional<double> t_max;
    std::optional<double> t_min;
};

void run_solve_sa(const Globals& g, const SolveSaArgs& a) {
    const auto inst = load_instance(a.instance);
    SaRun run;
    run.samples = a.n;
    run.sweeps = a.S;
    run.seed = g.seed;
    run.t_max = a.t_max;
    run.t_min = a.t_min;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_sa(inst.model, run);
    json rec;
    rec["instance"] = a.instance;
    rec["best_energy"] = res.best_energy;
    rec["spin_updates"] = res.spin_updates;
    rec["wall_time_ms"] = ms_since(t0);
    emit(g, rec);
}

struct SolveGreedyArgs {
    std::string instance;
    std::uint64_t n = 1;
};

void run_solve_greedy(const Globals& g, const SolveGreedyArgs& a) {
    const auto inst = load_instance(a.instance);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_sgd(inst.model, a.n, g.seed);
    json rec;
    rec["instance"] = a.instance;
    rec["best_energy"] = res.best_energy;
    rec["flips"] = res.flips;
    rec["wall_time_ms"] = ms_since(t0);
    emit(g, rec);
}

struct SolveLnlsArgs {
    std::string instance;
    std::vector<std::string> shapes;
    bool rotations = false;
    std::vector<std::string> embeddings;
    std::string subsolver = "sa";
    std::uint64_t sweeps = 198;
    std::uint64_t samples = 1;
    std::uint64_t reads = 25;
    double chain_strength = 2.0;
    bool auto_scale = false;
    DefectArgs hw;
    TimingModel timing;
    std::string clock = "auto";
    std::string variant = "default";
    std::optional<double> e_target;
    std::uint64_t max_iterations = 128;
    std::optional<double> e0;
    std::string e0_file;
    std::string out;
};

void run_solve_lnls(const Globals& g, const SolveLnlsArgs& a) {
    const auto inst = load_instance(a.instance);
    const auto kind = inst.model.topology().kind();
    LnlsConfig cfg;
    for (const auto& s : a.shapes) {
        auto shape = SubspaceShape::parse(kind, s);
        if (a.rotations && kind == LatticeKind::cubic) {
            const auto e = shape.extent();
            for (auto& r : cuboid_rotations(e[0], e[1], e[2])) {
                cfg.shapes.push_back(std::move(r));
            }
        } else {
            cfg.shapes.push_back(std::move(shape));
        }
    }
    cfg.subsolver.kind = parse_subsolver_kind(a.subsolver);
    cfg.subsolver.sweeps = a.sweeps;
    cfg.subsolver.samples = a.samples;
    cfg.subsolver.reads = a.reads;
    cfg.subsolver.chain_strength = a.chain_strength;
    cfg.subsolver.auto_scale = a.auto_scale;
    cfg.timing = a.timing;
    cfg.clock = parse_clock_mode(a.clock);
    cfg.variant = parse_workflow_variant(a.variant);
    if (a.e_target) {
        cfg.e_target = *a.e_target;
    }
    cfg.max_iterations = a.max_iterations;
    cfg.seed = g.seed;
    const bool programmed = cfg.subsolver.kind == SubsolverKind::programmed_sa ||
                            cfg.subsolver.kind == SubsolverKind::programmed_random;
    if (programmed || !a.embeddings.empty()) {
        auto hw = std::make_shared<const HardwareGraph>(a.hw.build());
        for (const auto& path : a.embeddings) {
            auto in = open_in(path);
            auto emb = read_embedding(in, *hw);
            const auto errors = validate_embedding(emb, *hw);
            if (!errors.empty()) {
                throw std::invalid_argument("embedding " + path + " is invalid: " + errors.front());
            }
            cfg.embeddings.push_back(std::move(emb));
        }
        if (cfg.embeddings.empty()) {
            for (const auto& shape : cfg.shapes) {
                for (auto& e : make_origin_embeddings(*hw, shape)) {
                    cfg.embeddings.push_back(std::move(e));
                }
            }
        }
        cfg.hardware = std::move(hw);
    }

    std::optional<double> e0 = a.e0;
    if (!a.e0_file.empty()) {
        auto in = open_in(a.e0_file);
        e0 = read_e0(in).e0;
    }
    if (e0 && !(*e0 < 0.0)) {
        throw std::invalid_argument("E0 must be negative");
    }

    const auto res = run_lnls(inst.model, cfg);

    std::ofstream file;
    if (!a.out.empty()) {
        file = open_out(a.out);
    }
    std::ostream& csv = a.out.empty() ? std::cout : file;
    csv << "iteration,energy," << (e0 ? "relative_error," : "") << "sim_time_ms,wall_time_ms\n";
    csv << "0," << format_real(res.trace.initial_energy) << ","
        << (e0 ? format_real(relative_error(*e0, res.trace.initial_energy)) + "," : "") << "0,0\n";
    for (const auto& r : res.trace.iterations) {
        csv << r.iteration << "," << format_real(r.energy) << ","
            << (e0 ? format_real(relative_error(*e0, r.energy)) + "," : "")
            << format_real(r.sim_time_ms) << "," << format_real(r.wall_time_ms) << "\n";
    }
    if (!a.out.empty()) {
        json rec;
        rec["instance"] = a.instance;
        rec["iterations"] = res.trace.iterations.size();
        rec["final_energy"] = res.energy;
        if (e0) {
            rec["relative_error"] = relative_error(*e0, res.energy);
        }
        rec["sim_time_ms"] = res.trace.iterations.empty() ? 0.0 : res.trace.iterations.back().sim_time_ms;
        rec["trace"] = a.out;
        emit(g, rec);
    }
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::vector<std::string> instances;
    std::vector<std::string> runs;
};

void run_estimate(const Globals& g, const EstimateArgs& a) {
    E0Budget budget;
    if (!a.runs.empty()) {
        budget.runs.clear();
        for (const auto& item : a.runs) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                throw std::invalid_argument("--runs expects n:S pairs, got '" + item + "'");
            }
            budget.runs.emplace_back(std::stoull(item.substr(0, colon)),
                                     std::stoull(item.substr(colon + 1)));
        }
    }
    json rec;
    rec["estimates"] = json::array();
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        const auto& path = a.instances[i];
        const auto inst = load_instance(path);
        std::optional<double> planted;
        const auto side = sidecar_path(path, "planted");
        if (fs::exists(side)) {
            auto in = open_in(side);
            planted = read_planted(in, inst.model.topology()).ground_energy;
        }
        E0Budget b = budget;
        b.seed = derive_seed(g.seed, i);
        const auto est = estimate_e0(inst.model, b, planted);
        auto out = open_out(sidecar_path(path, "e0"));
        write_e0(out, {est.e0, std::string{to_string(est.provenance)}, est.budget});
        rec["estimates"].push_back({{"instance", path},
                                    {"e0", est.e0},
                                    {"provenance", std::string{to_string(est.provenance)}}});
    }
    emit(g, rec);
}

void run_bench(const Globals& g, const std::string& manifest_path) {
    const auto manifest = load_manifest(manifest_path);
    const auto res = run_study(manifest, g.threads);
    json rec;
    rec["output"] = manifest.output.string();
    rec["instances"] = manifest.seeds.size();
    rec["series"] = json::array();
    for (const auto& c : res.curves) {
        const auto& last = c.points.back();
        rec["series"].push_back(
            {{"label", c.series}, {"final_time_ms", last.time_ms}, {"final_median_r", last.median_r}});
    }
    emit(g, rec);
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string type = "svg";
    std::string title = "burn-down";
    std::string out;
};

void run_report(const Globals& g, const ReportArgs& a) {
    std::vector<AggregateCurve> curves;
    for (const auto& path : a.inputs) {
        auto in = open_in(path);
        for (auto& c : read_curves_csv(in)) {
            curves.push_back(std::move(c));
        }
    }
    auto out = open_out(a.out);
    if (a.type == "svg") {
        write_curves_svg(out, curves, a.title);
    } else {
        write_curves_csv(out, curves);
    }
    json rec;
    rec["report"] = a.out;
    rec["series"] = curves.size();
    emit(g, rec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Large-neighborhood local search for lattice Ising ground states", "lnls"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for bench")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    app.add_option("--format", g.format, "summary output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "generate an instance file");
    generate->add_option("--kind", gen.kind, "cubic or toric-pegasus")->capture_default_str();
    generate->add_option("--L", gen.L, "lattice scale")->capture_default_str();
    generate->add_option("--ensemble", gen.ensemble, "pmj, ferro or planted")->capture_default_str();
    generate->add_option("--target-energy", gen.target, "planted energy per spin")
        ->capture_default_str();
    generate->add_option("--out", gen.out, "instance path")->required();

    auto* lattice = app.add_subcommand("lattice", "lattice utilities");
    lattice->require_subcommand(1);
    std::string lat_kind = "cubic";
    int lat_L = 4;
    std::string lat_out;
    auto* lexport = lattice->add_subcommand("export", "write the topology as text");
    lexport->add_option("--kind", lat_kind, "cubic or toric-pegasus")->capture_default_str();
    lexport->add_option("--L", lat_L, "lattice scale")->capture_default_str();
    lexport->add_option("--out", lat_out, "output path (stdout when omitted)");

    auto* embed = app.add_subcommand("embed", "origin embeddings");
    embed->require_subcommand(1);
    EmbedMakeArgs mk;
    auto* emake = embed->add_subcommand("make", "build and write origin embeddings");
    emake->add_option("--kind", mk.kind, "lattice kind of the shape")->capture_default_str();
    emake->add_option("--shape", mk.shape, "e.g. 8x8x8 (cubic), 15x15 or P16 (toric-pegasus)")->required();
    emake->add_option("--placements", mk.placements, "cell-grid placements per orientation")
        ->capture_default_str();
    add_defect_flags(emake, mk.hw);
    emake->add_option("--out", mk.out, "embedding path")->required();
    EmbedValidateArgs ev;
    auto* evalidate = embed->add_subcommand("validate", "check an embedding against hardware");
    evalidate->add_option("--file", ev.file, "embedding path")->required();
    add_defect_flags(evalidate, ev.hw);

    SolveSaArgs sa;
    auto* solve_sa = app.add_subcommand("solve-sa", "simulated annealing");
    solve_sa->add_option("--instance", sa.instance)->required();
    solve_sa->add_option("--n", sa.n, "samples")->capture_default_str();
    solve_sa->add_option("--S", sa.S, "sweeps per sample")->capture_default_str();
    solve_sa->add_option("--t-max", sa.t_max, "override T_max");
    solve_sa->add_option("--t-min", sa.t_min, "override T_min");

    SolveGreedyArgs gr;
    auto* solve_greedy = app.add_subcommand("solve-greedy", "steepest greedy descent");
    solve_greedy->add_option("--instance", gr.instance)->required();
    solve_greedy->add_option("--n", gr.n, "restarts")->capture_default_str();

    SolveLnlsArgs ln;
    auto* solve_lnls = app.add_subcommand("solve-lnls", "large-neighborhood local search");
    solve_lnls->add_option("--instance", ln.instance)->required();
    solve_lnls->add_option("--shape", ln.shapes, "subspace shape (repeatable)");
    solve_lnls->add_flag("--rotations", ln.rotations, "add all cuboid orientations");
    solve_lnls->add_option("--embedding", ln.embeddings, "origin embedding file (repeatable)");
    solve_lnls->add_option("--subsolver", ln.subsolver,
                           "sa, greedy, brute-force, programmed-sa, programmed-random")
        ->capture_default_str();
    solve_lnls->add_option("--sweeps", ln.sweeps)->capture_default_str();
    solve_lnls->add_option("--samples", ln.samples)->capture_default_str();
    solve_lnls->add_option("--n-r,--reads", ln.reads, "reads per QPU call")->capture_default_str();
    solve_lnls->add_option("--chain-strength", ln.chain_strength)->capture_default_str();
    solve_lnls->add_flag("--auto-scale", ln.auto_scale,
                         "rescale programmed values into the hardware ranges");
    add_defect_flags(solve_lnls, ln.hw);
    solve_lnls->add_option("--t-p", ln.timing.t_p, "programming time (ms)")->capture_default_str();
    solve_lnls->add_option("--t-ro", ln.timing.t_ro, "readout time (ms)")->capture_default_str();
    solve_lnls->add_option("--t-a", ln.timing.t_a, "anneal time (ms)")->capture_default_str();
    solve_lnls->add_option("--network-overhead", ln.timing.network_overhead, "per call (ms)")
        ->capture_default_str();
    solve_lnls->add_option("--ns-per-update", ln.timing.ns_per_update)->capture_default_str();
    solve_lnls->add_option("--clock", ln.clock, "auto, qpu or updates")->capture_default_str();
    solve_lnls->add_option("--variant", ln.variant, "default, post-process, parallel-process")
        ->capture_default_str();
    solve_lnls->add_option("--e-target", ln.e_target, "stop at or below this energy");
    solve_lnls->add_option("--max-iterations", ln.max_iterations)->capture_default_str();
    solve_lnls->add_option("--e0", ln.e0, "ground-energy estimate for relative error");
    solve_lnls->add_option("--e0-file", ln.e0_file, "E0 sidecar file");
    solve_lnls->add_option("--out", ln.out, "CSV path (stdout when omitted)");

    EstimateArgs es;
    auto* estimate = app.add_subcommand("estimate-e0", "write <instance>.e0 sidecars");
    estimate->add_option("instances", es.instances, "instance files")->required();
    estimate->add_option("--runs", es.runs, "SA budget as n:S pairs");

    std::string manifest;
    auto* bench = app.add_subcommand("bench", "run a study manifest");
    bench->add_option("manifest", manifest, "manifest file")->required();

    ReportArgs rp;
    auto* report = app.add_subcommand("report", "combine curve CSVs into a plot or table");
    report->add_option("inputs", rp.inputs, "curve CSV files")->required();
    report->add_option("--type", rp.type, "svg or csv")
        ->check(CLI::IsMember({"svg", "csv"}))
        ->capture_default_str();
    report->add_option("--title", rp.title)->capture_default_str();
    report->add_option("--out", rp.out, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) {
            run_generate(g, gen);
        } else if (lexport->parsed()) {
            const auto topo = build_lattice(parse_lattice_kind(lat_kind), lat_L);
            if (lat_out.empty()) {
                export_topology(std::cout, *topo);
            } else {
                auto out = open_out(lat_out);
                export_topology(out, *topo);
            }
        } else if (emake->parsed()) {
            run_embed_make(g, mk);
        } else if (evalidate->parsed()) {
            run_embed_validate(g, ev);
        } else if (solve_sa->parsed()) {
            run_solve_sa(g, sa);
        } else if (solve_greedy->parsed()) {
            run_solve_greedy(g, gr);
        } else if (solve_lnls->parsed()) {
            run_solve_lnls(g, ln);
        } else if (estimate->parsed()) {
            run_estimate(g, es);
        } else if (bench->parsed()) {
            run_bench(g, manifest);
        } else if (report->parsed()) {
            run_report(g, rp);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
