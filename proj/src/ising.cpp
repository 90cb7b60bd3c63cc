#include "lnls/ising.hpp"

#include "lnls/kernels.hpp"

#include <stdexcept>
#include <string>

namespace lnls {

namespace {

std::span<const double> widened(std::span<const std::int8_t> x) {
    thread_local std::vector<double> scratch;
    if (scratch.size() < x.size()) {
        scratch.resize(x.size());
    }
    kernels::widen_spins(x, {scratch.data(), x.size()});
    return {scratch.data(), x.size()};
}

void check_dimension(std::size_t want, std::size_t got, const char* what) {
    if (want != got) {
        throw std::invalid_argument(std::string{what} + ": state has " + std::to_string(got) +
                                    " entries, model has " + std::to_string(want) + " variables");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseIsing

SparseIsing::SparseIsing(std::vector<double> h, std::span<const Coupling> couplings)
    : h_(std::move(h)) {
    const std::size_t n = h_.size();
    ea_.reserve(couplings.size());
    eb_.reserve(couplings.size());
    J_.reserve(couplings.size());
    std::vector<std::uint32_t> degree(n, 0);
    for (const auto& c : couplings) {
        if (c.a >= n || c.b >= n || c.a == c.b) {
            throw std::invalid_argument("coupling endpoints out of range or self-loop");
        }
        ea_.push_back(c.a);
        eb_.push_back(c.b);
        J_.push_back(c.J);
        ++degree[c.a];
        ++degree[c.b];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        offsets_[i + 1] = offsets_[i] + degree[i];
    }
    nbr_.resize(offsets_[n]);
    w_.resize(offsets_[n]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& c : couplings) {
        nbr_[fill[c.a]] = c.b;
        w_[fill[c.a]++] = c.J;
        nbr_[fill[c.b]] = c.a;
        w_[fill[c.b]++] = c.J;
    }
}

double SparseIsing::energy(std::span<const std::int8_t> x) const {
    check_dimension(size(), x.size(), "energy");
    const auto xd = widened(x);
    return kernels::edge_energy(ea_, eb_, J_, xd) + kernels::dot(h_, xd);
}

void SparseIsing::local_fields(std::span<const std::int8_t> x, std::span<double> out) const {
    check_dimension(size(), x.size(), "local_fields");
    const auto xd = widened(x);
    kernels::local_fields(offsets_, nbr_, w_, h_, xd, out);
}

std::size_t SparseIsing::max_degree() const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        d = std::max<std::size_t>(d, offsets_[i + 1] - offsets_[i]);
    }
    return d;
}

// ---------------------------------------------------------------------------
// IsingModel

namespace {

std::vector<Coupling> lattice_couplings(const LatticeTopology& topo, std::span<const double> J) {
    std::vector<Coupling> out;
    out.reserve(J.size());
    const auto edges = topo.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out.push_back({edges[e].a, edges[e].b, J[e]});
    }
    return out;
}

}  // namespace

IsingModel::IsingModel(TopologyPtr topology, std::vector<double> h, std::vector<double> J)
    : topo_(std::move(topology)), h_(std::move(h)), J_(std::move(J)) {
    if (!topo_) {
        throw std::invalid_argument("IsingModel requires a topology");
    }
    if (h_.size() != topo_->num_vertices()) {
        throw std::invalid_argument("field vector size " + std::to_string(h_.size()) +
                                    " does not match vertex count " +
                                    std::to_string(topo_->num_vertices()));
    }
    if (J_.size() != topo_->num_edges()) {
        throw std::invalid_argument("coupler vector size " + std::to_string(J_.size()) +
                                    " does not match edge count " +
                                    std::to_string(topo_->num_edges()));
    }
    const auto couplings = lattice_couplings(*topo_, J_);
    sparse_ = SparseIsing(h_, couplings);
}

double IsingModel::coupler(VertexId a, VertexId b) const {
    const auto e = topo_->find_edge(a, b);
    return e < 0 ? 0.0 : J_[static_cast<std::size_t>(e)];
}

double energy(const IsingModel& model, std::span<const std::int8_t> state) {
    return model.sparse().energy(state);
}

double energy_reference(const IsingModel& model, std::span<const std::int8_t> state) {
    check_dimension(model.size(), state.size(), "energy_reference");
    const auto edges = model.topology().edges();
    const auto J = model.J();
    const auto h = model.h();
    double sum = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        sum += J[e] * static_cast<double>(state[edges[e].a] * state[edges[e].b]);
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
        sum += h[i] * static_cast<double>(state[i]);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Conditioning

Subproblem build_subproblem(const IsingModel& model, std::span<const std::int8_t> state,
                            const SubspaceSelection& selection) {
    check_dimension(model.size(), state.size(), "build_subproblem");
    const auto& topo = model.topology();
    const auto h = model.h();
    const auto J = model.J();
    const std::size_t m = selection.members.size();

    // Scratch map vertex -> local index, reset after use.
    thread_local std::vector<std::int32_t> local;
    if (local.size() != model.size()) {
        local.assign(model.size(), -1);
    }
    for (std::size_t i = 0; i < m; ++i) {
        local[selection.members[i]] = static_cast<std::int32_t>(i);
    }

    Subproblem sub;
    sub.members = selection.members;
    sub.variables = selection.variables;
    sub.current.resize(m);
    SparseIsing& p = sub.problem;
    p.h_.resize(m);
    p.offsets_.resize(m + 1);
    std::size_t cap = 0;
    for (const VertexId v : selection.members) {
        cap += topo.neighbors(v).size();
    }
    p.nbr_.resize(cap);
    p.w_.resize(cap);
    p.ea_.resize(cap / 2);
    p.eb_.resize(cap / 2);
    p.J_.resize(cap / 2);
    std::uint32_t* nbr = p.nbr_.data();
    double* wt = p.w_.data();
    std::size_t fill = 0;
    std::size_t edges = 0;
    p.offsets_[0] = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const VertexId v = selection.members[i];
        sub.current[i] = state[v];
        double f = h[v];
        const auto nbrs = topo.neighbors(v);
        const auto eids = topo.incident_edges(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const std::int32_t j = local[nbrs[k]];
            const double w = J[eids[k]];
            if (j < 0) {
                f += w * static_cast<double>(state[nbrs[k]]);
                continue;
            }
            nbr[fill] = static_cast<std::uint32_t>(j);
            wt[fill++] = w;
            if (static_cast<std::size_t>(j) > i) {
                p.ea_[edges] = static_cast<std::uint32_t>(i);
                p.eb_[edges] = static_cast<std::uint32_t>(j);
                p.J_[edges++] = w;
            }
        }
        p.h_[i] = f;
        p.offsets_[i + 1] = static_cast<std::uint32_t>(fill);
    }
    p.nbr_.resize(fill);
    p.w_.resize(fill);
    p.ea_.resize(edges);
    p.eb_.resize(edges);
    p.J_.resize(edges);
    for (const VertexId v : selection.members) {
        local[v] = -1;
    }
    return sub;
}

double apply_proposal(const IsingModel& model, SpinState& state, const SubspaceSelection& selection,
                      std::span<const std::int8_t> assignment) {
    if (assignment.size() != selection.members.size()) {
        throw std::invalid_argument("assignment covers " + std::to_string(assignment.size()) +
                                    " variables, selection has " +
                                    std::to_string(selection.members.size()));
    }
    check_dimension(model.size(), state.size(), "apply_proposal");
    const auto& topo = model.topology();
    const auto h = model.h();
    const auto J = model.J();

    thread_local std::vector<std::int8_t> next;
    next.assign(state.begin(), state.end());
    thread_local std::vector<std::uint8_t> changed;
    changed.assign(state.size(), 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const std::int8_t s = assignment[i];
        if (s != 1 && s != -1) {
            throw std::invalid_argument("assignment values must be +-1");
        }
        const VertexId v = selection.members[i];
        if (state[v] != s) {
            next[v] = s;
            changed[v] = 1;
        }
    }
    double delta = 0.0;
    for (const VertexId v : selection.members) {
        if (!changed[v]) {
            continue;
        }
        delta += h[v] * static_cast<double>(next[v] - state[v]);
        const auto nbrs = topo.neighbors(v);
        const auto eids = topo.incident_edges(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const VertexId u = nbrs[k];
            if (changed[u] && u < v) {
                continue;
            }
            delta += J[eids[k]] *
                     static_cast<double>(next[v] * next[u] - state[v] * state[u]);
        }
    }
    for (const VertexId v : selection.members) {
        state[v] = next[v];
    }
    return delta;
}

// ---------------------------------------------------------------------------
// Gauge

IsingModel gauge_transform(const IsingModel& model, std::span<const std::int8_t> signs) {
    check_dimension(model.size(), signs.size(), "gauge_transform");
    for (auto s : signs) {
        if (s != 1 && s != -1) {
            throw std::invalid_argument("gauge signs must be +-1");
        }
    }
    std::vector<double> h(model.h().begin(), model.h().end());
    std::vector<double> J(model.J().begin(), model.J().end());
    for (std::size_t i = 0; i < h.size(); ++i) {
        h[i] = h[i] == 0.0 ? 0.0 : h[i] * signs[i];
    }
    const auto edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int s = signs[edges[e].a] * signs[edges[e].b];
        J[e] = J[e] == 0.0 ? 0.0 : J[e] * s;
    }
    return IsingModel(model.topology_ptr(), std::move(h), std::move(J));
}

SpinState gauge_state(std::span<const std::int8_t> signs, std::span<const std::int8_t> state) {
    if (signs.size() != state.size()) {
        throw std::invalid_argument("gauge_state: size mismatch");
    }
    SpinState out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        out[i] = static_cast<std::int8_t>(signs[i] * state[i]);
    }
    return out;
}

}  // namespace lnls
