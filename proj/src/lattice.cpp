#include "lnls/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace lnls {

namespace {

constexpr int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
constexpr int wrap(int a, int L) { return ((a % L) + L) % L; }

std::uint64_t coord_key(const Coord& c) {
    // Shifted so small negative components remain distinct.
    std::uint64_t key = 0;
    for (int v : c) {
        key = key * 4096 + static_cast<std::uint64_t>(v + 1024);
    }
    return key;
}

std::vector<Edge> sorted_unique(std::vector<Edge> edges) {
    for (auto& e : edges) {
        if (e.a > e.b) {
            std::swap(e.a, e.b);
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace

std::string_view to_string(LatticeKind kind) {
    return kind == LatticeKind::cubic ? "cubic" : "pegasus";
}

LatticeKind parse_lattice_kind(std::string_view text) {
    if (text == "cubic") {
        return LatticeKind::cubic;
    }
    if (text == "pegasus" || text == "toric-pegasus" || text == "toric_pegasus") {
        return LatticeKind::toric_pegasus;
    }
    throw std::invalid_argument("unknown lattice kind '" + std::string{text} +
                                "' (expected cubic or pegasus)");
}

// ---------------------------------------------------------------------------
// Pegasus frame

namespace pegasus {

CellCoord to_cell(const PegasusCoord& q) {
    if (q.u == 0) {
        const int t = 12 * q.w + q.k - 4;
        const int x = floor_div(t, 12);
        return {0, x, q.z, t - 12 * x};
    }
    const int t = 12 * q.w + q.k - 8;
    const int y = floor_div(t, 12);
    return {1, q.z, y, t - 12 * y};
}

PegasusCoord from_cell(const CellCoord& c) {
    if (c.u == 0) {
        const int t = 12 * c.x + c.slot + 4;
        const int w = floor_div(t, 12);
        return {0, w, t - 12 * w, c.y};
    }
    const int t = 12 * c.y + c.slot + 8;
    const int w = floor_div(t, 12);
    return {1, w, t - 12 * w, c.x};
}

PegasusCoord internal_partner(int w, int k, int kk, int z) {
    return {1, z + (kk < offsets_vertical[k] ? 1 : 0), kk, w - (k < offsets_horizontal[kk] ? 1 : 0)};
}

}  // namespace pegasus

// ---------------------------------------------------------------------------
// LatticeTopology

LatticeTopology::LatticeTopology(LatticeKind kind, int L, std::vector<Coord> coords,
                                 std::vector<Edge> edges)
    : kind_(kind), L_(L), coords_(std::move(coords)), edges_(sorted_unique(std::move(edges))) {
    const std::size_t n = coords_.size();
    std::vector<std::uint32_t> degree(n, 0);
    for (const auto& e : edges_) {
        ++degree[e.a];
        ++degree[e.b];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        offsets_[v + 1] = offsets_[v] + degree[v];
    }
    nbr_.resize(offsets_[n]);
    nbr_edge_.resize(offsets_[n]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        nbr_[fill[e.a]] = e.b;
        nbr_edge_[fill[e.a]++] = i;
        nbr_[fill[e.b]] = e.a;
        nbr_edge_[fill[e.b]++] = i;
    }
    // Neighbor lists in ascending id order.
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::pair<VertexId, std::uint32_t>> row;
        for (auto k = offsets_[v]; k < offsets_[v + 1]; ++k) {
            row.emplace_back(nbr_[k], nbr_edge_[k]);
        }
        std::sort(row.begin(), row.end());
        for (std::size_t j = 0; j < row.size(); ++j) {
            nbr_[offsets_[v] + j] = row[j].first;
            nbr_edge_[offsets_[v] + j] = row[j].second;
        }
    }
}

CubicCoord LatticeTopology::cubic_coord(VertexId v) const {
    const auto& c = coords_[v];
    return {c[0], c[1], c[2]};
}

PegasusCoord LatticeTopology::pegasus_coord(VertexId v) const {
    const auto& c = coords_[v];
    return {c[0], c[1], c[2], c[3]};
}

VertexId LatticeTopology::index_of(const CubicCoord& c) const {
    return static_cast<VertexId>((wrap(c.i1, L_) * L_ + wrap(c.i2, L_)) * L_ + wrap(c.i3, L_));
}

VertexId LatticeTopology::index_of(const PegasusCoord& c) const {
    return static_cast<VertexId>(((c.u * L_ + wrap(c.w, L_)) * 12 + c.k) * L_ + wrap(c.z, L_));
}

VertexId LatticeTopology::index_of(const Coord& c) const {
    if (kind_ == LatticeKind::cubic) {
        return index_of(CubicCoord{c[0], c[1], c[2]});
    }
    return index_of(PegasusCoord{c[0], c[1], c[2], c[3]});
}

std::int64_t LatticeTopology::find_edge(VertexId a, VertexId b) const {
    const auto row = neighbors(a);
    const auto it = std::lower_bound(row.begin(), row.end(), b);
    if (it == row.end() || *it != b) {
        return -1;
    }
    return incident_edges(a)[static_cast<std::size_t>(it - row.begin())];
}

VertexId LatticeTopology::displace(VertexId v, const Displacement& d) const {
    const auto& c = coords_[v];
    if (kind_ == LatticeKind::cubic) {
        return index_of(CubicCoord{c[0] + d[0], c[1] + d[1], c[2] + d[2]});
    }
    if (c[0] == 0) {
        return index_of(PegasusCoord{0, c[1] + d[0], c[2], c[3] + d[1]});
    }
    return index_of(PegasusCoord{1, c[1] + d[1], c[2], c[3] + d[0]});
}

std::size_t LatticeTopology::num_displacements() const {
    const auto L = static_cast<std::size_t>(L_);
    return kind_ == LatticeKind::cubic ? L * L * L : L * L;
}

Displacement LatticeTopology::displacement(std::size_t index) const {
    const auto L = static_cast<std::size_t>(L_);
    if (kind_ == LatticeKind::cubic) {
        return {static_cast<int>(index / (L * L)), static_cast<int>((index / L) % L),
                static_cast<int>(index % L)};
    }
    return {static_cast<int>(index / L), static_cast<int>(index % L), 0};
}

TopologyPtr build_cubic(int L) {
    if (L < 3) {
        throw std::invalid_argument("cubic lattice requires L >= 3 (smaller L would create "
                                    "duplicate wrap-around edges), got L=" +
                                    std::to_string(L));
    }
    std::vector<Coord> coords;
    coords.reserve(static_cast<std::size_t>(L) * L * L);
    for (int i1 = 0; i1 < L; ++i1) {
        for (int i2 = 0; i2 < L; ++i2) {
            for (int i3 = 0; i3 < L; ++i3) {
                coords.push_back({i1, i2, i3, 0});
            }
        }
    }
    auto id = [L](int i1, int i2, int i3) {
        return static_cast<VertexId>((wrap(i1, L) * L + wrap(i2, L)) * L + wrap(i3, L));
    };
    std::vector<Edge> edges;
    edges.reserve(coords.size() * 3);
    for (const auto& c : coords) {
        const VertexId v = id(c[0], c[1], c[2]);
        edges.push_back({v, id(c[0] + 1, c[1], c[2])});
        edges.push_back({v, id(c[0], c[1] + 1, c[2])});
        edges.push_back({v, id(c[0], c[1], c[2] + 1)});
    }
    return TopologyPtr(new LatticeTopology(LatticeKind::cubic, L, std::move(coords), std::move(edges)));
}

TopologyPtr build_toric_pegasus(int L) {
    if (L < 3) {
        throw std::invalid_argument("toric-Pegasus lattice requires L >= 3 (at L=2 the z "
                                    "boundary coupler duplicates an existing one), got L=" +
                                    std::to_string(L));
    }
    std::vector<Coord> coords;
    coords.reserve(24 * static_cast<std::size_t>(L) * L);
    for (int u = 0; u < 2; ++u) {
        for (int w = 0; w < L; ++w) {
            for (int k = 0; k < 12; ++k) {
                for (int z = 0; z < L; ++z) {
                    coords.push_back({u, w, k, z});
                }
            }
        }
    }
    auto id = [L](int u, int w, int k, int z) {
        return static_cast<VertexId>(((u * L + wrap(w, L)) * 12 + k) * L + wrap(z, L));
    };
    std::vector<Edge> edges;
    edges.reserve(coords.size() * 15 / 2);
    for (const auto& c : coords) {
        const VertexId v = id(c[0], c[1], c[2], c[3]);
        // External couplers along the qubit, closed across the z boundary.
        edges.push_back({v, id(c[0], c[1], c[2], c[3] + 1)});
        // Odd couplers pair tracks 2j and 2j+1.
        if (c[2] % 2 == 0) {
            edges.push_back({v, id(c[0], c[1], c[2] + 1, c[3])});
        }
        if (c[0] == 0) {
            for (int kk = 0; kk < 12; ++kk) {
                const auto p = pegasus::internal_partner(c[1], c[2], kk, c[3]);
                edges.push_back({v, id(1, p.w, p.k, p.z)});
            }
        }
    }
    return TopologyPtr(
        new LatticeTopology(LatticeKind::toric_pegasus, L, std::move(coords), std::move(edges)));
}

TopologyPtr build_lattice(LatticeKind kind, int L) {
    return kind == LatticeKind::cubic ? build_cubic(L) : build_toric_pegasus(L);
}

std::string format_coord(LatticeKind kind, const Coord& c) {
    std::string s = std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]);
    if (kind == LatticeKind::toric_pegasus) {
        s += "," + std::to_string(c[3]);
    }
    return s;
}

Coord parse_coord(LatticeKind kind, std::string_view text) {
    Coord c{0, 0, 0, 0};
    const int want = kind == LatticeKind::cubic ? 3 : 4;
    int got = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    while (p < end && got < 4) {
        int v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc{}) {
            break;
        }
        c[static_cast<std::size_t>(got++)] = v;
        p = next;
        if (p < end && *p == ',') {
            ++p;
        } else {
            break;
        }
    }
    if (got != want || p != end) {
        throw std::invalid_argument("malformed " + std::string{to_string(kind)} +
                                    " coordinate '" + std::string{text} + "'");
    }
    return c;
}

void export_topology(std::ostream& out, const LatticeTopology& topo) {
    const auto kind = topo.kind();
    out << "# lnls-lattice v1\n";
    out << "kind " << to_string(kind) << "\n";
    out << "L " << topo.scale() << "\n";
    out << "vertices " << topo.num_vertices() << "\n";
    for (VertexId v = 0; v < topo.num_vertices(); ++v) {
        out << "v " << v << " " << format_coord(kind, topo.coord(v)) << "\n";
    }
    out << "edges " << topo.num_edges() << "\n";
    for (const auto& e : topo.edges()) {
        out << "e " << format_coord(kind, topo.coord(e.a)) << " "
            << format_coord(kind, topo.coord(e.b)) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Shapes

SubspaceShape::SubspaceShape(LatticeKind lattice, std::array<int, 3> extent, PegasusShapeKind pk,
                             std::vector<Coord> relative)
    : lattice_(lattice), extent_(extent), pegasus_kind_(pk), relative_(std::move(relative)) {
    compute_native_edges();
}

SubspaceShape SubspaceShape::cuboid(int a, int b, int c) {
    if (a < 1 || b < 1 || c < 1) {
        throw std::invalid_argument("cuboid extents must be positive");
    }
    std::vector<Coord> rel;
    rel.reserve(static_cast<std::size_t>(a) * b * c);
    for (int r1 = 0; r1 < a; ++r1) {
        for (int r2 = 0; r2 < b; ++r2) {
            for (int r3 = 0; r3 < c; ++r3) {
                rel.push_back({r1, r2, r3, 0});
            }
        }
    }
    return SubspaceShape(LatticeKind::cubic, {a, b, c}, PegasusShapeKind::nice, std::move(rel));
}

SubspaceShape SubspaceShape::pegasus_square(int cells) {
    if (cells < 1) {
        throw std::invalid_argument("Pegasus square extent must be positive");
    }
    std::vector<Coord> rel;
    rel.reserve(24 * static_cast<std::size_t>(cells) * cells);
    for (int u = 0; u < 2; ++u) {
        for (int x = 0; x < cells; ++x) {
            for (int y = 0; y < cells; ++y) {
                for (int slot = 0; slot < 12; ++slot) {
                    rel.push_back({u, x, y, slot});
                }
            }
        }
    }
    return SubspaceShape(LatticeKind::toric_pegasus, {cells, cells, 0}, PegasusShapeKind::nice,
                         std::move(rel));
}

SubspaceShape SubspaceShape::pegasus_fabric(int m) {
    if (m < 2) {
        throw std::invalid_argument("Pegasus fabric requires m >= 2");
    }
    std::vector<Coord> rel;
    const int m1 = m - 1;
    for (int u = 0; u < 2; ++u) {
        for (int w = 0; w < m; ++w) {
            for (int k = 0; k < 12; ++k) {
                // Fabric: drop the two dangling tracks at each end of w.
                if ((w == 0 && k < 2) || (w == m1 && k >= 10)) {
                    continue;
                }
                for (int z = 0; z < m1; ++z) {
                    const auto c = pegasus::to_cell({u, w, k, z});
                    rel.push_back({c.u, c.x, c.y, c.slot});
                }
            }
        }
    }
    return SubspaceShape(LatticeKind::toric_pegasus, {m, m, 0}, PegasusShapeKind::fabric,
                         std::move(rel));
}

void SubspaceShape::compute_native_edges() {
    native_edges_.clear();
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    index.reserve(relative_.size() * 2);
    if (lattice_ == LatticeKind::cubic) {
        for (std::uint32_t i = 0; i < relative_.size(); ++i) {
            index.emplace(coord_key(relative_[i]), i);
        }
        for (std::uint32_t i = 0; i < relative_.size(); ++i) {
            for (int axis = 0; axis < 3; ++axis) {
                Coord n = relative_[i];
                n[static_cast<std::size_t>(axis)] += 1;
                if (auto it = index.find(coord_key(n)); it != index.end()) {
                    native_edges_.push_back({i, it->second});
                }
            }
        }
        return;
    }
    std::vector<PegasusCoord> q(relative_.size());
    for (std::uint32_t i = 0; i < relative_.size(); ++i) {
        const auto& r = relative_[i];
        const auto p = pegasus::from_cell({r[0], r[1], r[2], r[3]});
        q[i] = p;
        index.emplace(coord_key({p.u, p.w, p.k, p.z}), i);
    }
    auto lookup = [&](const PegasusCoord& p) -> std::int64_t {
        auto it = index.find(coord_key({p.u, p.w, p.k, p.z}));
        return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
    };
    for (std::uint32_t i = 0; i < q.size(); ++i) {
        const auto& p = q[i];
        if (auto j = lookup({p.u, p.w, p.k, p.z + 1}); j >= 0) {
            native_edges_.push_back({i, static_cast<VertexId>(j)});
        }
        if (p.k % 2 == 0) {
            if (auto j = lookup({p.u, p.w, p.k + 1, p.z}); j >= 0) {
                native_edges_.push_back({i, static_cast<VertexId>(j)});
            }
        }
        if (p.u == 0) {
            for (int kk = 0; kk < 12; ++kk) {
                if (auto j = lookup(pegasus::internal_partner(p.w, p.k, kk, p.z)); j >= 0) {
                    native_edges_.push_back({i, static_cast<VertexId>(j)});
                }
            }
        }
    }
    native_edges_ = sorted_unique(std::move(native_edges_));
}

std::int64_t SubspaceShape::index_of(const Coord& rel) const {
    const auto it = std::find(relative_.begin(), relative_.end(), rel);
    return it == relative_.end() ? -1 : static_cast<std::int64_t>(it - relative_.begin());
}

std::string SubspaceShape::describe() const {
    if (lattice_ == LatticeKind::cubic) {
        return std::to_string(extent_[0]) + "x" + std::to_string(extent_[1]) + "x" +
               std::to_string(extent_[2]);
    }
    if (pegasus_kind_ == PegasusShapeKind::fabric) {
        return "P" + std::to_string(extent_[0]);
    }
    return std::to_string(extent_[0]) + "x" + std::to_string(extent_[1]);
}

SubspaceShape SubspaceShape::parse(LatticeKind kind, std::string_view text) {
    auto fail = [&]() {
        return std::invalid_argument("malformed " + std::string{to_string(kind)} + " shape '" +
                                     std::string{text} + "'");
    };
    std::vector<int> parts;
    std::string_view rest = text;
    const bool fabric = !rest.empty() && (rest.front() == 'P' || rest.front() == 'p');
    if (fabric) {
        rest.remove_prefix(1);
    }
    while (!rest.empty()) {
        int v = 0;
        auto [next, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc{}) {
            throw fail();
        }
        parts.push_back(v);
        rest.remove_prefix(static_cast<std::size_t>(next - rest.data()));
        if (!rest.empty()) {
            if (rest.front() != 'x' && rest.front() != 'X') {
                throw fail();
            }
            rest.remove_prefix(1);
        }
    }
    if (kind == LatticeKind::cubic) {
        if (fabric || parts.size() != 3) {
            throw fail();
        }
        return cuboid(parts[0], parts[1], parts[2]);
    }
    if (fabric) {
        if (parts.size() != 1) {
            throw fail();
        }
        return pegasus_fabric(parts[0]);
    }
    if (parts.size() == 1 || (parts.size() == 2 && parts[0] == parts[1])) {
        return pegasus_square(parts[0]);
    }
    throw fail();
}

std::vector<SubspaceShape> cuboid_rotations(int a, int b, int c) {
    std::vector<SubspaceShape> out;
    const std::array<std::array<int, 3>, 3> orders{{{a, b, c}, {a, c, b}, {c, b, a}}};
    for (const auto& o : orders) {
        auto s = SubspaceShape::cuboid(o[0], o[1], o[2]);
        if (std::find(out.begin(), out.end(), s) == out.end()) {
            out.push_back(std::move(s));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Selections

namespace {

VertexId place(const LatticeTopology& topo, const Coord& rel, const Displacement& d) {
    if (topo.kind() == LatticeKind::cubic) {
        return topo.index_of(CubicCoord{rel[0] + d[0], rel[1] + d[1], rel[2] + d[2]});
    }
    const auto p = pegasus::from_cell({rel[0], rel[1] + d[0], rel[2] + d[1], rel[3]});
    return topo.index_of(p);
}

}  // namespace

void check_shape_fits(const LatticeTopology& topo, const SubspaceShape& shape) {
    if (shape.lattice() != topo.kind()) {
        throw std::invalid_argument("shape " + shape.describe() + " is for a " +
                                    std::string{to_string(shape.lattice())} +
                                    " lattice, topology is " + std::string{to_string(topo.kind())});
    }
    const int L = topo.scale();
    if (shape.lattice() == LatticeKind::cubic) {
        for (int e : shape.extent()) {
            if (e > L) {
                throw std::invalid_argument("shape " + shape.describe() +
                                            " exceeds lattice extent L=" + std::to_string(L));
            }
        }
        return;
    }
    std::vector<std::uint8_t> seen(topo.num_vertices(), 0);
    for (const auto& rel : shape.relative()) {
        const VertexId v = place(topo, rel, {0, 0, 0});
        if (seen[v]++) {
            throw std::invalid_argument("shape " + shape.describe() +
                                        " exceeds lattice extent L=" + std::to_string(L));
        }
    }
}

SubspaceSelection select_subspace(const LatticeTopology& topo, const SubspaceShape& shape,
                                  const Displacement& offset, std::span<const std::uint8_t> vacant) {
    if (!vacant.empty() && vacant.size() != shape.size()) {
        throw std::invalid_argument("vacancy mask size does not match shape");
    }
    SubspaceSelection sel;
    sel.offset = offset;
    const auto rel = shape.relative();
    sel.members.reserve(rel.size());
    sel.variables.reserve(rel.size());
    // 0 = outside, 1 = member, 2 = vacant shape variable, 3 = recorded boundary.
    // Scratch marks, cleared again before returning.
    thread_local std::vector<std::uint8_t> state;
    if (state.size() != topo.num_vertices()) {
        state.assign(topo.num_vertices(), 0);
    }
    std::vector<VertexId> placed;
    placed.reserve(rel.size());
    const auto clear = [&] {
        for (const VertexId v : placed) {
            state[v] = 0;
        }
        for (const VertexId v : sel.boundary) {
            state[v] = 0;
        }
    };
    for (std::uint32_t i = 0; i < rel.size(); ++i) {
        const VertexId v = place(topo, rel[i], offset);
        if (state[v] != 0) {
            clear();
            throw std::invalid_argument("shape " + shape.describe() +
                                        " exceeds lattice extent L=" +
                                        std::to_string(topo.scale()));
        }
        placed.push_back(v);
        const bool is_vacant = !vacant.empty() && vacant[i] != 0;
        state[v] = is_vacant ? 2 : 1;
        if (!is_vacant) {
            sel.members.push_back(v);
            sel.variables.push_back(i);
        }
    }
    for (const VertexId v : sel.members) {
        for (const VertexId n : topo.neighbors(v)) {
            if (state[n] != 1 && state[n] != 3) {
                state[n] = 3;
                sel.boundary.push_back(n);
            }
        }
    }
    clear();
    std::sort(sel.boundary.begin(), sel.boundary.end());
    return sel;
}

std::vector<SubspaceSelection> enumerate_subspaces(const LatticeTopology& topo,
                                                   const SubspaceShape& shape) {
    check_shape_fits(topo, shape);
    std::vector<SubspaceSelection> out;
    out.reserve(topo.num_displacements());
    for (std::size_t i = 0; i < topo.num_displacements(); ++i) {
        out.push_back(select_subspace(topo, shape, topo.displacement(i)));
    }
    return out;
}

}  // namespace lnls
