#pragma once

// Periodic lattice topologies (simple cubic and toric-Pegasus) and the
// subspace geometry that the LNLS driver displaces around them.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lnls {

using VertexId = std::uint32_t;

enum class LatticeKind { cubic, toric_pegasus };

std::string_view to_string(LatticeKind kind);
LatticeKind parse_lattice_kind(std::string_view text);

struct CubicCoord {
    int i1 = 0;
    int i2 = 0;
    int i3 = 0;
    friend bool operator==(const CubicCoord&, const CubicCoord&) = default;
};

/// Pegasus coordinates: orientation u, perpendicular offset w, track k, and
/// position z along the qubit.
struct PegasusCoord {
    int u = 0;
    int w = 0;
    int k = 0;
    int z = 0;
    friend bool operator==(const PegasusCoord&, const PegasusCoord&) = default;
};

struct Edge {
    VertexId a;
    VertexId b;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Lattice translation. Cubic uses all three components; toric-Pegasus uses
/// the first two as a cell displacement (dx, dy).
using Displacement = std::array<int, 3>;

/// Generic coordinate tuple: cubic (i1, i2, i3, 0), Pegasus (u, w, k, z).
using Coord = std::array<int, 4>;

namespace pegasus {

inline constexpr int tracks = 12;

/// Track offsets of the standard Pegasus layout, per orientation.
inline constexpr std::array<int, 12> offsets_vertical{2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6};
inline constexpr std::array<int, 12> offsets_horizontal{6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10};

/// Position of a qubit in the unit-cell frame: cell (x, y) and slot 0..11.
/// Vertical qubits have cell x from w and y from z; horizontal qubits the
/// reverse. Cells are aligned with the nice-coordinate tiling.
struct CellCoord {
    int u = 0;
    int x = 0;
    int y = 0;
    int slot = 0;
    friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

CellCoord to_cell(const PegasusCoord& q);
PegasusCoord from_cell(const CellCoord& c);

/// Internal coupler partner rule: returns the horizontal qubit coupled to
/// vertical qubit (0, w, k, z) at track kk, before any periodic wrap.
PegasusCoord internal_partner(int w, int k, int kk, int z);

}  // namespace pegasus

class LatticeTopology {
public:
    LatticeKind kind() const { return kind_; }
    int scale() const { return L_; }
    /// Lattice connectivity k: 6 for cubic, 15 for toric-Pegasus.
    int connectivity() const { return kind_ == LatticeKind::cubic ? 6 : 15; }

    std::size_t num_vertices() const { return coords_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const Coord& coord(VertexId v) const { return coords_[v]; }
    CubicCoord cubic_coord(VertexId v) const;
    PegasusCoord pegasus_coord(VertexId v) const;

    VertexId index_of(const CubicCoord& c) const;
    VertexId index_of(const PegasusCoord& c) const;
    VertexId index_of(const Coord& c) const;

    /// Edges sorted lexicographically, each with a < b.
    std::span<const Edge> edges() const { return edges_; }

    std::span<const VertexId> neighbors(VertexId v) const {
        return {nbr_.data() + offsets_[v], nbr_.data() + offsets_[v + 1]};
    }
    /// Edge indices aligned with neighbors(v).
    std::span<const std::uint32_t> incident_edges(VertexId v) const {
        return {nbr_edge_.data() + offsets_[v], nbr_edge_.data() + offsets_[v + 1]};
    }
    std::span<const std::uint32_t> csr_offsets() const { return offsets_; }

    /// Index of edge {a, b}, or -1 when absent.
    std::int64_t find_edge(VertexId a, VertexId b) const;

    /// Image of v under a lattice translation.
    VertexId displace(VertexId v, const Displacement& d) const;

    /// Number of distinct translations (L^3 cubic, L^2 Pegasus).
    std::size_t num_displacements() const;
    Displacement displacement(std::size_t index) const;

    friend std::shared_ptr<const LatticeTopology> build_cubic(int L);
    friend std::shared_ptr<const LatticeTopology> build_toric_pegasus(int L);

private:
    LatticeTopology(LatticeKind kind, int L, std::vector<Coord> coords, std::vector<Edge> edges);

    LatticeKind kind_;
    int L_;
    std::vector<Coord> coords_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> offsets_;
    std::vector<VertexId> nbr_;
    std::vector<std::uint32_t> nbr_edge_;
};

using TopologyPtr = std::shared_ptr<const LatticeTopology>;

/// Periodic L x L x L simple cubic lattice. Requires L >= 3.
TopologyPtr build_cubic(int L);

/// Toric-Pegasus lattice: P[L+1] with w = L contracted onto w = 0 and the
/// z boundary closed. 24 L^2 vertices of degree 15. Requires L >= 3.
TopologyPtr build_toric_pegasus(int L);

TopologyPtr build_lattice(LatticeKind kind, int L);

/// Writes the topology as text: header, vertex lines, edge lines (by coordinates).
void export_topology(std::ostream& out, const LatticeTopology& topo);

std::string format_coord(LatticeKind kind, const Coord& c);
Coord parse_coord(LatticeKind kind, std::string_view text);

// ---------------------------------------------------------------------------
// Subspaces

enum class PegasusShapeKind { nice, fabric };

/// A region shape rooted at the origin. Cubic shapes are a x b x c cuboids;
/// Pegasus shapes are either an m_s x m_s square of unit cells ("nice") or
/// the full fabric of P[m] placed in the lattice.
///
/// Relative coordinates are (r1, r2, r3, 0) for cubic and (u, x, y, slot) in
/// the unit-cell frame for Pegasus. Their order defines variable order.
class SubspaceShape {
public:
    static SubspaceShape cuboid(int a, int b, int c);
    static SubspaceShape pegasus_square(int cells);
    static SubspaceShape pegasus_fabric(int m);

    LatticeKind lattice() const { return lattice_; }
    std::array<int, 3> extent() const { return extent_; }
    PegasusShapeKind pegasus_kind() const { return pegasus_kind_; }
    std::span<const Coord> relative() const { return relative_; }
    std::size_t size() const { return relative_.size(); }

    /// Edges among the shape's variables when placed in a lattice much larger
    /// than the shape (no wrap-around), as pairs of relative indices.
    const std::vector<Edge>& native_edges() const { return native_edges_; }

    /// Index of a relative coordinate, or -1.
    std::int64_t index_of(const Coord& rel) const;

    std::string describe() const;
    static SubspaceShape parse(LatticeKind kind, std::string_view text);

    friend bool operator==(const SubspaceShape& a, const SubspaceShape& b) {
        return a.lattice_ == b.lattice_ && a.extent_ == b.extent_ &&
               a.pegasus_kind_ == b.pegasus_kind_;
    }

private:
    SubspaceShape(LatticeKind lattice, std::array<int, 3> extent, PegasusShapeKind pk,
                  std::vector<Coord> relative);
    void compute_native_edges();

    LatticeKind lattice_;
    std::array<int, 3> extent_;
    PegasusShapeKind pegasus_kind_ = PegasusShapeKind::nice;
    std::vector<Coord> relative_;
    std::vector<Edge> native_edges_;
};

/// The three axis orderings of a cuboid (deduplicated).
std::vector<SubspaceShape> cuboid_rotations(int a, int b, int c);

struct SubspaceSelection {
    Displacement offset{};
    /// Member vertex ids in shape order, excluding vacancies.
    std::vector<VertexId> members;
    /// Shape variable index of each member.
    std::vector<std::uint32_t> variables;
    /// Vertices outside the member set adjacent to it, sorted.
    std::vector<VertexId> boundary;
};

/// Places the shape at the given offset. `vacant` flags shape variables that
/// are excluded from the member set (they become boundary if adjacent).
/// Throws if the shape does not fit (two relative coordinates collide).
SubspaceSelection select_subspace(const LatticeTopology& topo, const SubspaceShape& shape,
                                  const Displacement& offset,
                                  std::span<const std::uint8_t> vacant = {});

/// One selection per distinct lattice displacement.
std::vector<SubspaceSelection> enumerate_subspaces(const LatticeTopology& topo,
                                                   const SubspaceShape& shape);

/// Throws std::invalid_argument when the shape exceeds the lattice extent.
void check_shape_fits(const LatticeTopology& topo, const SubspaceShape& shape);

}  // namespace lnls
