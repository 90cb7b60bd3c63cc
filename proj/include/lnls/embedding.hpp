#pragma once

// Hardware graph model (Pegasus P[m] with a yield mask), origin embeddings of
// subspace shapes, defect trimming, and the simplified programming/readout
// rules: fields and couplers go on the first qubit or coupler of a chain, and
// a variable reads out as its chain's first qubit.

#include "lnls/ising.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lnls {

using QubitId = std::uint32_t;
using QubitPair = std::pair<QubitId, QubitId>;

struct Range {
    double lo;
    double hi;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Defects for build_hardware: explicit lists, plus optional i.i.d. random
/// defects at the given rates.
struct DefectSpec {
    std::vector<QubitId> qubits;
    std::vector<QubitPair> couplers;
    double qubit_rate = 0.0;
    double coupler_rate = 0.0;
    std::uint64_t seed = 0;
};

/// Pegasus P[m] fabric. Qubit ids are the standard linear Pegasus index
/// ((u m + w) 12 + k)(m - 1) + z; ids of the dangling non-fabric positions
/// are not qubits.
class HardwareGraph {
public:
    HardwareGraph(int m, const DefectSpec& defects = {});

    int m() const { return m_; }
    std::size_t id_space() const { return exists_.size(); }
    const std::vector<QubitId>& qubits() const { return qubits_; }
    const std::vector<QubitPair>& couplers() const { return couplers_; }

    QubitId linear_index(const PegasusCoord& c) const;
    PegasusCoord coord(QubitId q) const;
    bool in_range(const PegasusCoord& c) const;

    bool has_qubit(QubitId q) const { return q < exists_.size() && exists_[q]; }
    bool has_coupler(QubitId a, QubitId b) const;
    std::span<const QubitId> neighbors(QubitId q) const;

    bool qubit_yielded(QubitId q) const { return has_qubit(q) && !dead_qubit_[q]; }
    /// A coupler is usable when it exists, is not itself defective, and both
    /// endpoint qubits are yielded.
    bool coupler_yielded(QubitId a, QubitId b) const;

    const std::vector<QubitId>& unyielded_qubits() const { return bad_qubits_; }
    const std::vector<QubitPair>& unyielded_couplers() const { return bad_couplers_; }
    std::size_t yielded_qubit_count() const { return qubits_.size() - bad_qubits_.size(); }
    std::size_t yielded_coupler_count() const;

    Range h_range{-4.0, 4.0};
    Range J_range{-2.0, 1.0};

private:
    int m_;
    std::vector<std::uint8_t> exists_;
    std::vector<std::uint8_t> dead_qubit_;
    std::vector<QubitId> qubits_;
    std::vector<QubitPair> couplers_;
    std::vector<std::uint32_t> offsets_;
    std::vector<QubitId> adjacency_;
    std::vector<QubitId> bad_qubits_;
    std::vector<QubitPair> bad_couplers_;
    std::unordered_set<std::uint64_t> bad_coupler_keys_;
};

HardwareGraph build_hardware(int m, const DefectSpec& defects = {});

/// Embedding of a subspace shape rooted at the origin.
struct OriginEmbedding {
    SubspaceShape shape;
    /// Ordered chain per shape variable; the first qubit carries the field.
    std::vector<std::vector<QubitId>> chains;
    /// Hardware couplers realizing each shape edge, aligned with
    /// shape.native_edges().
    std::vector<std::vector<QubitPair>> edge_couplers;
    /// Variables omitted because of defects.
    std::vector<std::uint8_t> vacant;
    std::size_t max_chain_length = 1;
    /// Set when a conflict component was too large for the exact cover.
    bool greedy_cover = false;

    std::size_t num_variables() const { return chains.size(); }
    std::size_t num_vacancies() const;
    /// Intra-chain couplers of a chain (consecutive qubits).
    std::vector<QubitPair> chain_couplers(std::size_t variable) const;
};

/// Every invariant violation found, as readable messages. Empty means valid.
std::vector<std::string> validate_embedding(const OriginEmbedding& embedding,
                                            const HardwareGraph& hardware);

/// Marks vacancies: chains touching a defect, then a minimum vertex cover of
/// the shape edges left without a working coupler. Vacancies already present
/// are kept.
OriginEmbedding trim_for_defects(OriginEmbedding embedding, const HardwareGraph& hardware);

/// Recomputes edge_couplers from the hardware (all existing couplers between
/// the two chains, in ascending order).
void attach_couplers(OriginEmbedding& embedding, const HardwareGraph& hardware);

struct EmbeddingOptions {
    /// Distinct cell-grid placements per orientation (cubic shapes smaller
    /// than the hardware only).
    int placements = 1;
};

/// Pegasus shapes: identity chains (length 1). Cubic cuboids: chain-length-2
/// layouts at `placements` cell offsets. Outputs are defect-trimmed.
std::vector<OriginEmbedding> make_origin_embeddings(const HardwareGraph& hardware,
                                                    const SubspaceShape& shape,
                                                    const EmbeddingOptions& options = {});

/// Cell layout used by the cubic construction: per vertical slot a, the
/// paired horizontal slot, and the path order of the 12 chains through a cell.
struct CubicCellLayout {
    std::array<int, 12> partner{};
    std::array<int, 12> path{};
};
const CubicCellLayout& cubic_cell_layout();

/// The programmed hardware problem over the qubits of non-vacant chains.
struct ProgrammedProblem {
    /// Qubit per local index, ascending.
    std::vector<QubitId> qubits;
    std::vector<double> h;
    /// Couplers in local indices with their programmed values.
    std::vector<Coupling> couplers;
    double chain_strength = 0.0;
    /// Factor all programmed values were divided by (1 without auto-scaling).
    double scale = 1.0;
    std::size_t intra_chain_couplers = 0;
    /// Local index of each subproblem variable's first qubit.
    std::vector<std::uint32_t> readout_index;

    SparseIsing sparse() const;
};

/// Places the subproblem on the hardware. Out-of-range values throw unless
/// `auto_scale` is set, in which case every h and J is divided by the
/// smallest factor >= 1 that brings all of them into range.
ProgrammedProblem program(const Subproblem& subproblem, const OriginEmbedding& embedding,
                          const HardwareGraph& hardware, double chain_strength,
                          bool auto_scale = false);

/// First-qubit readout of one programmed-problem sample.
SpinState readout(std::span<const std::int8_t> sample, const ProgrammedProblem& programmed);
std::vector<SpinState> readout(const std::vector<SpinState>& samples,
                               const ProgrammedProblem& programmed);

/// Vacancy mask for select_subspace.
inline std::span<const std::uint8_t> vacancy_mask(const OriginEmbedding& e) { return e.vacant; }

/// Checks that placing the shape in the lattice induces exactly its native
/// edges (no wrap-around couplings the hardware could not realize).
void check_embedding_lattice(const OriginEmbedding& embedding, const LatticeTopology& topo);

void write_embedding(std::ostream& out, const OriginEmbedding& embedding,
                     const HardwareGraph& hardware);
/// Reads an embedding file. Chains are taken as given; couplers are
/// recomputed from the hardware. Structural problems throw; invariant
/// violations are left to validate_embedding.
OriginEmbedding read_embedding(std::istream& in, const HardwareGraph& hardware);

}  // namespace lnls
