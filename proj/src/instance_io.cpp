#include "lnls/instance_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lnls {

namespace {

std::runtime_error format_error(const std::string& what, std::size_t line) {
    return std::runtime_error("instance format error at line " + std::to_string(line) + ": " +
                              what);
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty, non-comment line split on whitespace.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            if (line.empty() || line[0] == '#') {
                continue;
            }
            tokens.clear();
            std::istringstream ss(line);
            std::string t;
            while (ss >> t) {
                tokens.push_back(t);
            }
            if (!tokens.empty()) {
                return true;
            }
        }
        return false;
    }

    std::vector<std::string> expect(const std::string& key, std::size_t count) {
        std::vector<std::string> tokens;
        if (!next(tokens)) {
            throw format_error("unexpected end of file, expected '" + key + "'", number_);
        }
        if (tokens[0] != key || tokens.size() != count) {
            throw format_error("expected '" + key + "' record with " + std::to_string(count - 1) +
                                   " fields",
                               number_);
        }
        return tokens;
    }

    std::size_t line() const { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw format_error("expected an unsigned integer, got '" + s + "'", line);
    }
    return v;
}

}  // namespace

std::string format_real(double v) {
    if (v == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

double parse_real(std::string_view text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) {
        throw std::invalid_argument("expected a real number, got '" + std::string{text} + "'");
    }
    return v;
}

void write_instance(std::ostream& out, const IsingModel& model, const InstanceHeader& header) {
    const auto& topo = model.topology();
    const auto kind = topo.kind();
    out << "# lnls-instance v1\n";
    out << "lattice " << to_string(kind) << " " << topo.scale() << "\n";
    out << "ensemble " << header.ensemble << "\n";
    out << "seed " << header.seed << "\n";
    const auto edges = topo.edges();
    const auto J = model.J();
    out << "couplers " << edges.size() << "\n";
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out << "J " << format_coord(kind, topo.coord(edges[e].a)) << " "
            << format_coord(kind, topo.coord(edges[e].b)) << " " << format_real(J[e]) << "\n";
    }
    const auto h = model.h();
    std::size_t nonzero = 0;
    for (double v : h) {
        nonzero += v != 0.0 ? 1 : 0;
    }
    out << "fields " << nonzero << "\n";
    for (VertexId v = 0; v < h.size(); ++v) {
        if (h[v] != 0.0) {
            out << "h " << format_coord(kind, topo.coord(v)) << " " << format_real(h[v]) << "\n";
        }
    }
}

Instance read_instance(std::istream& in) {
    LineReader reader(in);
    auto lat = reader.expect("lattice", 3);
    const auto kind = parse_lattice_kind(lat[1]);
    const int L = static_cast<int>(parse_u64(lat[2], reader.line()));
    auto topo = build_lattice(kind, L);

    InstanceHeader header;
    header.ensemble = reader.expect("ensemble", 2)[1];
    header.seed = parse_u64(reader.expect("seed", 2)[1], reader.line());

    const auto ncouplers = parse_u64(reader.expect("couplers", 2)[1], reader.line());
    if (ncouplers != topo->num_edges()) {
        throw format_error("coupler count " + std::to_string(ncouplers) +
                               " does not match lattice edge count " +
                               std::to_string(topo->num_edges()),
                           reader.line());
    }
    std::vector<double> J(topo->num_edges(), 0.0);
    std::vector<std::uint8_t> seen(topo->num_edges(), 0);
    for (std::uint64_t i = 0; i < ncouplers; ++i) {
        auto t = reader.expect("J", 4);
        try {
            const VertexId a = topo->index_of(parse_coord(kind, t[1]));
            const VertexId b = topo->index_of(parse_coord(kind, t[2]));
            const auto e = topo->find_edge(a, b);
            if (e < 0) {
                throw format_error("coupler " + t[1] + " " + t[2] + " is not a lattice edge",
                                   reader.line());
            }
            if (seen[static_cast<std::size_t>(e)]++) {
                throw format_error("duplicate coupler " + t[1] + " " + t[2], reader.line());
            }
            J[static_cast<std::size_t>(e)] = parse_real(t[3]);
        } catch (const std::invalid_argument& err) {
            throw format_error(err.what(), reader.line());
        }
    }
    const auto nfields = parse_u64(reader.expect("fields", 2)[1], reader.line());
    std::vector<double> h(topo->num_vertices(), 0.0);
    for (std::uint64_t i = 0; i < nfields; ++i) {
        auto t = reader.expect("h", 3);
        try {
            h[topo->index_of(parse_coord(kind, t[1]))] = parse_real(t[2]);
        } catch (const std::invalid_argument& err) {
            throw format_error(err.what(), reader.line());
        }
    }
    return Instance{std::move(header), IsingModel(std::move(topo), std::move(h), std::move(J))};
}

void save_instance(const std::filesystem::path& path, const IsingModel& model,
                   const InstanceHeader& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_instance(out, model, header);
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open instance " + path.string());
    }
    return read_instance(in);
}

void write_planted(std::ostream& out, const LatticeTopology& topo, const PlantedSolution& planted) {
    out << "# lnls-planted v1\n";
    out << "lattice " << to_string(topo.kind()) << " " << topo.scale() << "\n";
    out << "ground_energy " << format_real(planted.ground_energy) << "\n";
    out << "spins " << planted.state.size() << "\n";
    for (VertexId v = 0; v < planted.state.size(); ++v) {
        out << "s " << format_coord(topo.kind(), topo.coord(v)) << " "
            << static_cast<int>(planted.state[v]) << "\n";
    }
}

PlantedSolution read_planted(std::istream& in, const LatticeTopology& topo) {
    LineReader reader(in);
    auto lat = reader.expect("lattice", 3);
    if (parse_lattice_kind(lat[1]) != topo.kind() ||
        static_cast<int>(parse_u64(lat[2], reader.line())) != topo.scale()) {
        throw format_error("planted sidecar lattice does not match instance", reader.line());
    }
    PlantedSolution p;
    p.ground_energy = parse_real(reader.expect("ground_energy", 2)[1]);
    const auto n = parse_u64(reader.expect("spins", 2)[1], reader.line());
    if (n != topo.num_vertices()) {
        throw format_error("spin count does not match lattice", reader.line());
    }
    p.state.assign(n, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto t = reader.expect("s", 3);
        const VertexId v = topo.index_of(parse_coord(topo.kind(), t[1]));
        const int s = t[2] == "1" ? 1 : (t[2] == "-1" ? -1 : 0);
        if (s == 0) {
            throw format_error("spin must be 1 or -1", reader.line());
        }
        p.state[v] = static_cast<std::int8_t>(s);
    }
    return p;
}

void write_e0(std::ostream& out, const E0Record& rec) {
    out << "# lnls-e0 v1\n";
    out << "e0 " << format_real(rec.e0) << "\n";
    out << "provenance " << rec.provenance << "\n";
    out << "budget " << (rec.budget.empty() ? "-" : rec.budget) << "\n";
}

E0Record read_e0(std::istream& in) {
    LineReader reader(in);
    E0Record rec;
    rec.e0 = parse_real(reader.expect("e0", 2)[1]);
    rec.provenance = reader.expect("provenance", 2)[1];
    rec.budget = reader.expect("budget", 2)[1];
    return rec;
}

std::filesystem::path sidecar_path(const std::filesystem::path& instance, std::string_view ext) {
    auto p = instance;
    p += ".";
    p += std::string{ext};
    return p;
}

}  // namespace lnls
