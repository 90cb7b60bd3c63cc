#pragma once

#include "lnls/lattice.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lnls {

/// Spin assignment, one +-1 entry per variable.
using SpinState = std::vector<std::int8_t>;

struct Coupling {
    std::uint32_t a;
    std::uint32_t b;
    double J;
};

/// A standalone sparse Ising problem H(x) = sum_e J_e x_a x_b + sum_i h_i x_i.
///
/// Couplings are stored both as an edge list (structure of arrays, for energy
/// evaluation) and as a symmetric CSR adjacency (for local-field updates).
/// This is what the samplers operate on; whole lattice models and
/// conditioned subproblems both expose one.
struct Subproblem;
class IsingModel;

class SparseIsing {
public:
    SparseIsing() = default;
    SparseIsing(std::vector<double> h, std::span<const Coupling> couplings);

    std::size_t size() const { return h_.size(); }
    std::size_t num_couplings() const { return J_.size(); }

    std::span<const double> fields() const { return h_; }
    std::span<const std::uint32_t> edge_a() const { return ea_; }
    std::span<const std::uint32_t> edge_b() const { return eb_; }
    std::span<const double> edge_J() const { return J_; }

    std::span<const std::uint32_t> offsets() const { return offsets_; }
    std::span<const std::uint32_t> adjacency() const { return nbr_; }
    std::span<const double> weights() const { return w_; }

    /// Exact energy via the dispatched kernels.
    double energy(std::span<const std::int8_t> x) const;

    /// Local fields f_i = h_i + sum_j J_ij x_j.
    void local_fields(std::span<const std::int8_t> x, std::span<double> out) const;

    std::size_t max_degree() const;

private:
    // Fills the CSR rows straight from lattice adjacency.
    friend Subproblem build_subproblem(const IsingModel& model, std::span<const std::int8_t> state,
                                       const SubspaceSelection& selection);

    std::vector<double> h_;
    std::vector<std::uint32_t> ea_, eb_;
    std::vector<double> J_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> nbr_;
    std::vector<double> w_;
};

/// Ising model over a lattice: one field per vertex and one coupler per
/// lattice edge, in the topology's edge order.
class IsingModel {
public:
    IsingModel(TopologyPtr topology, std::vector<double> h, std::vector<double> J);

    const LatticeTopology& topology() const { return *topo_; }
    const TopologyPtr& topology_ptr() const { return topo_; }
    std::size_t size() const { return h_.size(); }

    std::span<const double> h() const { return h_; }
    std::span<const double> J() const { return J_; }
    const SparseIsing& sparse() const { return sparse_; }

    /// Coupler between adjacent vertices a and b (0 if not adjacent).
    double coupler(VertexId a, VertexId b) const;

    friend bool operator==(const IsingModel& x, const IsingModel& y) {
        return x.topo_->kind() == y.topo_->kind() && x.topo_->scale() == y.topo_->scale() &&
               x.h_ == y.h_ && x.J_ == y.J_;
    }

private:
    TopologyPtr topo_;
    std::vector<double> h_;
    std::vector<double> J_;
    SparseIsing sparse_;
};

/// H(x). Throws std::invalid_argument on a dimension mismatch.
double energy(const IsingModel& model, std::span<const std::int8_t> state);

/// Term-by-term accumulation in edge order; no kernels, no CSR. Test oracle.
double energy_reference(const IsingModel& model, std::span<const std::int8_t> state);

/// Problem over a subspace R conditioned on the spins outside R:
/// H_R(y) = sum_{ij in R} J_ij y_i y_j + sum_{i in R} (h_i + sum_{j not in R} J_ij x_j) y_i.
struct Subproblem {
    std::vector<VertexId> members;
    /// Shape variable index of each member (from the selection).
    std::vector<std::uint32_t> variables;
    /// Local problem; variable i corresponds to members[i].
    SparseIsing problem;
    /// Current assignment of the members (the conditioning snapshot's restriction).
    SpinState current;

    std::span<const double> effective_fields() const { return problem.fields(); }
    std::size_t size() const { return members.size(); }
};

Subproblem build_subproblem(const IsingModel& model, std::span<const std::int8_t> state,
                            const SubspaceSelection& selection);

/// Writes `assignment` (aligned with selection.members) into the state and
/// returns the exact energy change, computed from local fields around R.
double apply_proposal(const IsingModel& model, SpinState& state, const SubspaceSelection& selection,
                      std::span<const std::int8_t> assignment);

/// h'_i = s_i h_i, J'_ij = s_i s_j J_ij.
IsingModel gauge_transform(const IsingModel& model, std::span<const std::int8_t> signs);

/// Elementwise product s o x.
SpinState gauge_state(std::span<const std::int8_t> signs, std::span<const std::int8_t> state);

}  // namespace lnls
