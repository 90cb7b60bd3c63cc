#include "lnls/embedding.hpp"

#include "lnls/rng.hpp"
#include "lnls/vertex_cover.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace lnls {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Adjacency in the unbounded Pegasus pattern (no wrap, no fabric cut).
bool pegasus_adjacent(const PegasusCoord& a, const PegasusCoord& b) {
    if (a.u == b.u) {
        if (a.w != b.w) {
            return false;
        }
        if (a.k == b.k) {
            return a.z - b.z == 1 || b.z - a.z == 1;
        }
        return a.z == b.z && a.k / 2 == b.k / 2;
    }
    const auto& v = a.u == 0 ? a : b;
    const auto& h = a.u == 0 ? b : a;
    return pegasus::internal_partner(v.w, v.k, h.k, v.z) == h;
}

std::string format_relative(LatticeKind kind, const Coord& c) {
    std::string s = std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]);
    if (kind == LatticeKind::toric_pegasus) {
        s += "," + std::to_string(c[3]);
    }
    return s;
}

Coord parse_relative(LatticeKind kind, const std::string& text) {
    Coord c{0, 0, 0, 0};
    const std::size_t want = kind == LatticeKind::cubic ? 3 : 4;
    std::size_t n = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    while (p < end) {
        if (n == want) {
            throw std::invalid_argument("too many components in coordinate '" + text + "'");
        }
        auto [next, ec] = std::from_chars(p, end, c[n]);
        if (ec != std::errc{}) {
            throw std::invalid_argument("malformed coordinate '" + text + "'");
        }
        ++n;
        p = next;
        if (p < end) {
            if (*p != ',') {
                throw std::invalid_argument("malformed coordinate '" + text + "'");
            }
            ++p;
        }
    }
    if (n != want) {
        throw std::invalid_argument("coordinate '" + text + "' needs " + std::to_string(want) +
                                    " components");
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hardware

HardwareGraph::HardwareGraph(int m, const DefectSpec& defects) : m_(m) {
    if (m < 2) {
        throw std::invalid_argument("Pegasus hardware requires m >= 2, got " + std::to_string(m));
    }
    if (!(defects.qubit_rate >= 0.0 && defects.qubit_rate <= 1.0) ||
        !(defects.coupler_rate >= 0.0 && defects.coupler_rate <= 1.0)) {
        throw std::invalid_argument("defect rates must lie in [0, 1]");
    }
    const std::size_t space = 24 * static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1);
    exists_.assign(space, 0);
    dead_qubit_.assign(space, 0);
    for (int u = 0; u < 2; ++u) {
        for (int w = 0; w < m; ++w) {
            for (int k = 0; k < 12; ++k) {
                if ((w == 0 && k < 2) || (w == m - 1 && k >= 10)) {
                    continue;
                }
                for (int z = 0; z < m - 1; ++z) {
                    const QubitId q = linear_index({u, w, k, z});
                    exists_[q] = 1;
                    qubits_.push_back(q);
                }
            }
        }
    }
    std::sort(qubits_.begin(), qubits_.end());

    auto add = [&](QubitId a, const PegasusCoord& bc) {
        if (!in_range(bc)) {
            return;
        }
        const QubitId b = linear_index(bc);
        if (exists_[b]) {
            couplers_.emplace_back(std::min(a, b), std::max(a, b));
        }
    };
    for (const QubitId q : qubits_) {
        const auto c = coord(q);
        add(q, {c.u, c.w, c.k, c.z + 1});
        if (c.k % 2 == 0) {
            add(q, {c.u, c.w, c.k + 1, c.z});
        }
        if (c.u == 0) {
            for (int kk = 0; kk < 12; ++kk) {
                add(q, pegasus::internal_partner(c.w, c.k, kk, c.z));
            }
        }
    }
    std::sort(couplers_.begin(), couplers_.end());
    couplers_.erase(std::unique(couplers_.begin(), couplers_.end()), couplers_.end());

    std::vector<std::uint32_t> degree(space, 0);
    for (const auto& [a, b] : couplers_) {
        ++degree[a];
        ++degree[b];
    }
    offsets_.assign(space + 1, 0);
    for (std::size_t i = 0; i < space; ++i) {
        offsets_[i + 1] = offsets_[i] + degree[i];
    }
    adjacency_.resize(offsets_[space]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : couplers_) {
        adjacency_[fill[a]++] = b;
        adjacency_[fill[b]++] = a;
    }
    for (std::size_t i = 0; i < space; ++i) {
        std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
    }

    // Defects: explicit lists first, then i.i.d. draws in id order.
    for (const QubitId q : defects.qubits) {
        if (!has_qubit(q)) {
            throw std::invalid_argument("defect list names qubit " + std::to_string(q) +
                                        " which is not in P[" + std::to_string(m) + "]");
        }
        dead_qubit_[q] = 1;
    }
    for (auto [a, b] : defects.couplers) {
        if (!has_coupler(a, b)) {
            throw std::invalid_argument("defect list names coupler (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") which is not in P[" +
                                        std::to_string(m) + "]");
        }
        bad_coupler_keys_.insert(pair_key(a, b));
    }
    if (defects.qubit_rate > 0.0 || defects.coupler_rate > 0.0) {
        Rng rng(defects.seed);
        for (const QubitId q : qubits_) {
            if (rng.uniform() < defects.qubit_rate) {
                dead_qubit_[q] = 1;
            }
        }
        Rng crng(defects.seed, 1);
        for (const auto& [a, b] : couplers_) {
            if (crng.uniform() < defects.coupler_rate) {
                bad_coupler_keys_.insert(pair_key(a, b));
            }
        }
    }
    for (const QubitId q : qubits_) {
        if (dead_qubit_[q]) {
            bad_qubits_.push_back(q);
        }
    }
    for (const auto& [a, b] : couplers_) {
        if (bad_coupler_keys_.count(pair_key(a, b))) {
            bad_couplers_.emplace_back(a, b);
        }
    }
}

QubitId HardwareGraph::linear_index(const PegasusCoord& c) const {
    return static_cast<QubitId>(((c.u * m_ + c.w) * 12 + c.k) * (m_ - 1) + c.z);
}

PegasusCoord HardwareGraph::coord(QubitId q) const {
    PegasusCoord c;
    const int m1 = m_ - 1;
    int r = static_cast<int>(q);
    c.z = r % m1;
    r /= m1;
    c.k = r % 12;
    r /= 12;
    c.w = r % m_;
    c.u = r / m_;
    return c;
}

bool HardwareGraph::in_range(const PegasusCoord& c) const {
    return c.u >= 0 && c.u < 2 && c.w >= 0 && c.w < m_ && c.k >= 0 && c.k < 12 && c.z >= 0 &&
           c.z < m_ - 1;
}

bool HardwareGraph::has_coupler(QubitId a, QubitId b) const {
    if (!has_qubit(a) || !has_qubit(b)) {
        return false;
    }
    const auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

std::span<const QubitId> HardwareGraph::neighbors(QubitId q) const {
    return {adjacency_.data() + offsets_[q], adjacency_.data() + offsets_[q + 1]};
}

bool HardwareGraph::coupler_yielded(QubitId a, QubitId b) const {
    return qubit_yielded(a) && qubit_yielded(b) && has_coupler(a, b) &&
           !bad_coupler_keys_.count(pair_key(a, b));
}

std::size_t HardwareGraph::yielded_coupler_count() const {
    std::size_t n = 0;
    for (const auto& [a, b] : couplers_) {
        n += coupler_yielded(a, b) ? 1 : 0;
    }
    return n;
}

HardwareGraph build_hardware(int m, const DefectSpec& defects) {
    return HardwareGraph(m, defects);
}

// ---------------------------------------------------------------------------
// Embeddings

std::size_t OriginEmbedding::num_vacancies() const {
    return static_cast<std::size_t>(std::count(vacant.begin(), vacant.end(), 1));
}

std::vector<QubitPair> OriginEmbedding::chain_couplers(std::size_t variable) const {
    std::vector<QubitPair> out;
    const auto& c = chains[variable];
    for (std::size_t i = 1; i < c.size(); ++i) {
        out.emplace_back(std::min(c[i - 1], c[i]), std::max(c[i - 1], c[i]));
    }
    return out;
}

void attach_couplers(OriginEmbedding& embedding, const HardwareGraph& hardware) {
    const auto& edges = embedding.shape.native_edges();
    embedding.edge_couplers.assign(edges.size(), {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto& out = embedding.edge_couplers[e];
        for (const QubitId p : embedding.chains[edges[e].a]) {
            for (const QubitId q : embedding.chains[edges[e].b]) {
                if (hardware.has_coupler(p, q)) {
                    out.emplace_back(std::min(p, q), std::max(p, q));
                }
            }
        }
        std::sort(out.begin(), out.end());
    }
}

namespace {

bool chain_intact(const std::vector<QubitId>& chain, const HardwareGraph& hw) {
    if (chain.empty()) {
        return false;
    }
    for (const QubitId q : chain) {
        if (!hw.qubit_yielded(q)) {
            return false;
        }
    }
    // Connectivity over yielded couplers.
    std::vector<std::uint8_t> reached(chain.size(), 0);
    std::vector<std::size_t> stack{0};
    reached[0] = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < chain.size(); ++j) {
            if (!reached[j] && hw.coupler_yielded(chain[i], chain[j])) {
                reached[j] = 1;
                stack.push_back(j);
            }
        }
    }
    return std::all_of(reached.begin(), reached.end(), [](auto r) { return r != 0; });
}

bool edge_realized(const OriginEmbedding& emb, std::size_t e, const HardwareGraph& hw) {
    const auto& edge = emb.shape.native_edges()[e];
    for (const QubitId p : emb.chains[edge.a]) {
        for (const QubitId q : emb.chains[edge.b]) {
            if (hw.coupler_yielded(p, q)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<std::string> validate_embedding(const OriginEmbedding& embedding,
                                            const HardwareGraph& hardware) {
    std::vector<std::string> issues;
    const auto& shape = embedding.shape;
    const auto kind = shape.lattice();
    if (embedding.chains.size() != shape.size()) {
        issues.push_back("chain count " + std::to_string(embedding.chains.size()) +
                         " does not match shape size " + std::to_string(shape.size()));
        return issues;
    }
    if (!embedding.vacant.empty() && embedding.vacant.size() != shape.size()) {
        issues.push_back("vacancy mask size does not match shape size");
        return issues;
    }
    const auto is_vacant = [&](std::size_t v) {
        return !embedding.vacant.empty() && embedding.vacant[v] != 0;
    };
    const auto name = [&](std::size_t v) {
        return "variable (" + format_relative(kind, shape.relative()[v]) + ")";
    };
    std::unordered_map<QubitId, std::size_t> owner;
    for (std::size_t v = 0; v < shape.size(); ++v) {
        if (is_vacant(v)) {
            continue;
        }
        const auto& chain = embedding.chains[v];
        if (chain.empty()) {
            issues.push_back(name(v) + ": empty chain");
            continue;
        }
        if (chain.size() > embedding.max_chain_length) {
            issues.push_back(name(v) + ": chain length " + std::to_string(chain.size()) +
                             " exceeds maximum " + std::to_string(embedding.max_chain_length));
        }
        bool qubits_ok = true;
        for (const QubitId q : chain) {
            if (!hardware.has_qubit(q)) {
                issues.push_back(name(v) + ": qubit " + std::to_string(q) +
                                 " is not in the hardware graph");
                qubits_ok = false;
            } else if (!hardware.qubit_yielded(q)) {
                issues.push_back(name(v) + ": qubit " + std::to_string(q) + " is unyielded");
                qubits_ok = false;
            }
            const auto [it, inserted] = owner.emplace(q, v);
            if (!inserted) {
                issues.push_back(name(v) + ": qubit " + std::to_string(q) +
                                 " is shared with " + name(it->second) +
                                 " (chains must be disjoint)");
            }
        }
        if (qubits_ok && !chain_intact(chain, hardware)) {
            issues.push_back(name(v) + ": chain is not connected by yielded couplers");
        }
    }
    const auto& edges = shape.native_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (is_vacant(edges[e].a) || is_vacant(edges[e].b)) {
            continue;
        }
        if (!edge_realized(embedding, e, hardware)) {
            issues.push_back("edge " + name(edges[e].a) + " - " + name(edges[e].b) +
                             ": no yielded coupler between the chains");
        }
    }
    return issues;
}

OriginEmbedding trim_for_defects(OriginEmbedding embedding, const HardwareGraph& hardware) {
    const std::size_t n = embedding.chains.size();
    if (embedding.vacant.empty()) {
        embedding.vacant.assign(n, 0);
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!embedding.vacant[v] && !chain_intact(embedding.chains[v], hardware)) {
            embedding.vacant[v] = 1;
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> conflicts;
    const auto& edges = embedding.shape.native_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (embedding.vacant[edges[e].a] || embedding.vacant[edges[e].b]) {
            continue;
        }
        if (!edge_realized(embedding, e, hardware)) {
            conflicts.emplace_back(edges[e].a, edges[e].b);
        }
    }
    if (!conflicts.empty()) {
        const auto cover = minimum_vertex_cover(conflicts);
        for (const auto v : cover.cover) {
            embedding.vacant[v] = 1;
        }
        embedding.greedy_cover = embedding.greedy_cover || !cover.exact;
    }
    return embedding;
}

// ---------------------------------------------------------------------------
// Construction

const CubicCellLayout& cubic_cell_layout() {
    static const CubicCellLayout layout = [] {
        // A cell well inside the unbounded pattern; the layout is the same in
        // every cell because cell displacement is an automorphism.
        const int X = 2;
        const int Y = 2;
        std::array<PegasusCoord, 12> V{};
        std::array<PegasusCoord, 12> H{};
        for (int s = 0; s < 12; ++s) {
            V[s] = pegasus::from_cell({0, X, Y, s});
            H[s] = pegasus::from_cell({1, X, Y, s});
        }
        std::array<std::vector<int>, 12> candidates;
        for (int a = 0; a < 12; ++a) {
            for (int b = 0; b < 12; ++b) {
                if (pegasus_adjacent(V[a], H[b])) {
                    candidates[a].push_back(b);
                }
            }
        }

        // Hamiltonian path over chain adjacency; dp[mask] holds the possible
        // endpoints of paths visiting exactly `mask`.
        const auto hamiltonian = [&](const std::array<int, 12>& partner,
                                     std::array<int, 12>& path) {
            std::array<std::uint16_t, 12> nb{};
            for (int i = 0; i < 12; ++i) {
                for (int j = 0; j < 12; ++j) {
                    if (i == j) {
                        continue;
                    }
                    const std::array<PegasusCoord, 2> ci{V[i], H[partner[i]]};
                    const std::array<PegasusCoord, 2> cj{V[j], H[partner[j]]};
                    for (const auto& p : ci) {
                        for (const auto& q : cj) {
                            if (pegasus_adjacent(p, q)) {
                                nb[i] |= static_cast<std::uint16_t>(1u << j);
                            }
                        }
                    }
                }
            }
            const int full = (1 << 12) - 1;
            std::vector<std::uint16_t> dp(1 << 12, 0);
            for (int i = 0; i < 12; ++i) {
                dp[1 << i] |= static_cast<std::uint16_t>(1u << i);
            }
            for (int mask = 1; mask <= full; ++mask) {
                for (int i = 0; i < 12; ++i) {
                    if (dp[mask] >> i & 1) {
                        for (int j = 0; j < 12; ++j) {
                            if ((nb[i] >> j & 1) && !(mask >> j & 1)) {
                                dp[mask | (1 << j)] |= static_cast<std::uint16_t>(1u << j);
                            }
                        }
                    }
                }
            }
            if (!dp[full]) {
                return false;
            }
            int mask = full;
            int i = std::countr_zero(static_cast<unsigned>(dp[full]));
            std::array<int, 12> rev{};
            int len = 0;
            rev[len++] = i;
            while (mask != (1 << i)) {
                const int prev = mask ^ (1 << i);
                for (int j = 0; j < 12; ++j) {
                    if ((nb[i] >> j & 1) && (prev >> j & 1) && (dp[prev] >> j & 1)) {
                        mask = prev;
                        i = j;
                        rev[len++] = j;
                        break;
                    }
                }
            }
            for (int t = 0; t < 12; ++t) {
                path[t] = rev[11 - t];
            }
            return true;
        };

        CubicCellLayout out;
        std::array<int, 12> partner{};
        std::uint16_t used = 0;
        bool found = false;
        const auto search = [&](auto&& self, int a) -> void {
            if (found) {
                return;
            }
            if (a == 12) {
                if (hamiltonian(partner, out.path)) {
                    out.partner = partner;
                    found = true;
                }
                return;
            }
            for (const int b : candidates[a]) {
                if (!(used >> b & 1)) {
                    used |= static_cast<std::uint16_t>(1u << b);
                    partner[a] = b;
                    self(self, a + 1);
                    used &= static_cast<std::uint16_t>(~(1u << b));
                    if (found) {
                        return;
                    }
                }
            }
        };
        search(search, 0);
        if (!found) {
            throw std::logic_error("no chain-length-2 cell layout exists");
        }
        return out;
    }();
    return layout;
}

namespace {

OriginEmbedding pegasus_identity(const HardwareGraph& hw, const SubspaceShape& shape) {
    OriginEmbedding emb{shape, {}, {}, {}, 1, false};
    emb.chains.reserve(shape.size());
    for (const auto& rel : shape.relative()) {
        const auto p = pegasus::from_cell({rel[0], rel[1], rel[2], rel[3]});
        if (!hw.in_range(p) || !hw.has_qubit(hw.linear_index(p))) {
            throw std::invalid_argument("shape " + shape.describe() +
                                        " exceeds the capacity of P[" + std::to_string(hw.m()) +
                                        "]");
        }
        emb.chains.push_back({hw.linear_index(p)});
    }
    return emb;
}

OriginEmbedding cubic_chain2(const HardwareGraph& hw, const SubspaceShape& shape, int path_axis,
                             int x_axis, int y_axis, int ox, int oy) {
    const auto& layout = cubic_cell_layout();
    OriginEmbedding emb{shape, {}, {}, {}, 2, false};
    emb.chains.reserve(shape.size());
    for (const auto& rel : shape.relative()) {
        const int x = rel[static_cast<std::size_t>(x_axis)] + ox;
        const int y = rel[static_cast<std::size_t>(y_axis)] + oy;
        const int a = layout.path[static_cast<std::size_t>(rel[static_cast<std::size_t>(path_axis)])];
        const auto v = pegasus::from_cell({0, x, y, a});
        const auto h = pegasus::from_cell({1, x, y, layout.partner[static_cast<std::size_t>(a)]});
        if (!hw.in_range(v) || !hw.in_range(h) || !hw.has_qubit(hw.linear_index(v)) ||
            !hw.has_qubit(hw.linear_index(h))) {
            throw std::logic_error("cubic layout placed a chain outside the hardware");
        }
        emb.chains.push_back({hw.linear_index(v), hw.linear_index(h)});
    }
    return emb;
}

}  // namespace

std::vector<OriginEmbedding> make_origin_embeddings(const HardwareGraph& hardware,
                                                    const SubspaceShape& shape,
                                                    const EmbeddingOptions& options) {
    std::vector<OriginEmbedding> out;
    if (shape.lattice() == LatticeKind::toric_pegasus) {
        out.push_back(pegasus_identity(hardware, shape));
    } else {
        const int cells = hardware.m() - 1;
        const auto ext = shape.extent();
        // Orientation: the path axis takes an extent of at most 12; the other
        // two axes run over cells.
        std::vector<std::array<int, 3>> orientations;
        for (const auto& o : std::array<std::array<int, 3>, 3>{{{2, 0, 1}, {1, 0, 2}, {0, 1, 2}}}) {
            if (ext[o[0]] <= 12 && ext[o[1]] <= cells && ext[o[2]] <= cells) {
                orientations.push_back(o);
                break;
            }
        }
        if (orientations.empty()) {
            throw std::invalid_argument("cuboid " + shape.describe() +
                                        " exceeds the chain-length-2 capacity of P[" +
                                        std::to_string(hardware.m()) + "] (" +
                                        std::to_string(cells) + " x " + std::to_string(cells) +
                                        " x 12)");
        }
        const auto& o = orientations.front();
        const int free_x = cells - ext[o[1]];
        const int free_y = cells - ext[o[2]];
        std::vector<std::pair<int, int>> offsets;
        for (int ox = 0; ox <= free_x; ++ox) {
            for (int oy = 0; oy <= free_y; ++oy) {
                offsets.emplace_back(ox, oy);
            }
        }
        const std::size_t want =
            std::min<std::size_t>(offsets.size(), static_cast<std::size_t>(std::max(1, options.placements)));
        for (std::size_t i = 0; i < want; ++i) {
            // Spread placements evenly over the available offsets.
            const auto [ox, oy] = offsets[i * offsets.size() / want];
            out.push_back(cubic_chain2(hardware, shape, o[0], o[1], o[2], ox, oy));
        }
    }
    for (auto& emb : out) {
        attach_couplers(emb, hardware);
        emb = trim_for_defects(std::move(emb), hardware);
    }
    return out;
}

void check_embedding_lattice(const OriginEmbedding& embedding, const LatticeTopology& topo) {
    const auto& shape = embedding.shape;
    check_shape_fits(topo, shape);
    const auto sel = select_subspace(topo, shape, {0, 0, 0});
    std::unordered_map<VertexId, std::uint32_t> var;
    for (std::size_t i = 0; i < sel.members.size(); ++i) {
        var.emplace(sel.members[i], sel.variables[i]);
    }
    std::size_t induced = 0;
    for (const auto& e : topo.edges()) {
        const auto ia = var.find(e.a);
        const auto ib = var.find(e.b);
        if (ia != var.end() && ib != var.end()) {
            ++induced;
        }
    }
    if (induced != shape.native_edges().size()) {
        throw std::invalid_argument(
            "shape " + shape.describe() + " placed in the L=" + std::to_string(topo.scale()) +
            " lattice has " + std::to_string(induced) + " internal couplings, the embedding covers " +
            std::to_string(shape.native_edges().size()) + " (lattice too small for this shape)");
    }
}

// ---------------------------------------------------------------------------
// Programming and readout

SparseIsing ProgrammedProblem::sparse() const { return SparseIsing(h, couplers); }

ProgrammedProblem program(const Subproblem& subproblem, const OriginEmbedding& embedding,
                          const HardwareGraph& hardware, double chain_strength, bool auto_scale) {
    if (!(chain_strength > 0.0)) {
        throw std::invalid_argument("chain strength must be positive");
    }
    const auto& shape = embedding.shape;
    const auto kind = shape.lattice();
    const std::size_t nvars = shape.size();
    const auto is_vacant = [&](std::size_t v) {
        return !embedding.vacant.empty() && embedding.vacant[v] != 0;
    };
    const auto name = [&](std::size_t v) {
        return "variable (" + format_relative(kind, shape.relative()[v]) + ")";
    };

    std::vector<std::int32_t> local_of_var(nvars, -1);
    for (std::size_t i = 0; i < subproblem.variables.size(); ++i) {
        const auto v = subproblem.variables[i];
        if (v >= nvars || is_vacant(v)) {
            throw std::invalid_argument("subproblem " + (v < nvars ? name(v) : std::string{"variable"}) +
                                        " is not an active variable of the embedding");
        }
        local_of_var[v] = static_cast<std::int32_t>(i);
    }
    std::size_t active = 0;
    for (std::size_t v = 0; v < nvars; ++v) {
        active += is_vacant(v) ? 0 : 1;
    }
    if (active != subproblem.variables.size()) {
        throw std::invalid_argument("subproblem covers " + std::to_string(subproblem.variables.size()) +
                                    " variables, embedding has " + std::to_string(active) +
                                    " active variables");
    }

    ProgrammedProblem out;
    out.chain_strength = chain_strength;
    for (std::size_t v = 0; v < nvars; ++v) {
        if (!is_vacant(v)) {
            out.qubits.insert(out.qubits.end(), embedding.chains[v].begin(),
                              embedding.chains[v].end());
        }
    }
    std::sort(out.qubits.begin(), out.qubits.end());
    std::unordered_map<QubitId, std::uint32_t> local_of_qubit;
    local_of_qubit.reserve(out.qubits.size() * 2);
    for (std::uint32_t i = 0; i < out.qubits.size(); ++i) {
        local_of_qubit.emplace(out.qubits[i], i);
    }
    out.h.assign(out.qubits.size(), 0.0);
    out.readout_index.resize(subproblem.variables.size());

    const auto fields = subproblem.effective_fields();
    for (std::size_t i = 0; i < subproblem.variables.size(); ++i) {
        const auto v = subproblem.variables[i];
        const auto& chain = embedding.chains[v];
        const double h = fields[i];
        if (!auto_scale && !hardware.h_range.contains(h)) {
            throw std::range_error(name(v) + ": programmed field h=" + std::to_string(h) +
                                   " outside h_range [" + std::to_string(hardware.h_range.lo) +
                                   ", " + std::to_string(hardware.h_range.hi) + "]");
        }
        const auto first = local_of_qubit.at(chain.front());
        out.h[first] = h;
        out.readout_index[i] = first;
        for (std::size_t k = 1; k < chain.size(); ++k) {
            if (!hardware.coupler_yielded(chain[k - 1], chain[k])) {
                throw std::invalid_argument(name(v) + ": chain coupler is not yielded");
            }
            const double J = -chain_strength;
            if (!auto_scale && !hardware.J_range.contains(J)) {
                throw std::range_error(name(v) + ": chain coupler J=" + std::to_string(J) +
                                       " outside J_range [" + std::to_string(hardware.J_range.lo) +
                                       ", " + std::to_string(hardware.J_range.hi) + "]");
            }
            out.couplers.push_back(
                {local_of_qubit.at(chain[k - 1]), local_of_qubit.at(chain[k]), J});
            ++out.intra_chain_couplers;
        }
    }

    std::unordered_map<std::uint64_t, std::uint32_t> edge_of;
    const auto& edges = shape.native_edges();
    edge_of.reserve(edges.size() * 2);
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
        edge_of.emplace(pair_key(edges[e].a, edges[e].b), e);
    }
    const auto& p = subproblem.problem;
    for (std::size_t c = 0; c < p.num_couplings(); ++c) {
        const auto va = subproblem.variables[p.edge_a()[c]];
        const auto vb = subproblem.variables[p.edge_b()[c]];
        const double J = p.edge_J()[c];
        const auto it = edge_of.find(pair_key(va, vb));
        if (it == edge_of.end()) {
            throw std::invalid_argument("coupling between " + name(va) + " and " + name(vb) +
                                        " is not part of the embedded shape");
        }
        if (!auto_scale && !hardware.J_range.contains(J)) {
            throw std::range_error("coupling " + name(va) + " - " + name(vb) + ": J=" +
                                   std::to_string(J) + " outside J_range [" +
                                   std::to_string(hardware.J_range.lo) + ", " +
                                   std::to_string(hardware.J_range.hi) + "]");
        }
        bool placed = false;
        for (const auto& [qa, qb] : embedding.edge_couplers[it->second]) {
            if (!hardware.coupler_yielded(qa, qb)) {
                continue;
            }
            out.couplers.push_back(
                {local_of_qubit.at(qa), local_of_qubit.at(qb), placed ? 0.0 : J});
            placed = true;
        }
        if (!placed) {
            throw std::invalid_argument("coupling " + name(va) + " - " + name(vb) +
                                        " has no yielded hardware coupler");
        }
    }
    if (auto_scale) {
        const auto need = [](double v, const Range& r) {
            return v > 0.0 ? v / r.hi : v < 0.0 ? v / r.lo : 0.0;
        };
        double factor = 1.0;
        for (const double h : out.h) {
            factor = std::max(factor, need(h, hardware.h_range));
        }
        for (const auto& c : out.couplers) {
            factor = std::max(factor, need(c.J, hardware.J_range));
        }
        if (factor > 1.0) {
            for (auto& h : out.h) {
                h /= factor;
            }
            for (auto& c : out.couplers) {
                c.J /= factor;
            }
            out.scale = factor;
        }
    }
    return out;
}

SpinState readout(std::span<const std::int8_t> sample, const ProgrammedProblem& programmed) {
    if (sample.size() != programmed.qubits.size()) {
        throw std::invalid_argument("sample has " + std::to_string(sample.size()) +
                                    " qubits, programmed problem has " +
                                    std::to_string(programmed.qubits.size()));
    }
    SpinState out(programmed.readout_index.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sample[programmed.readout_index[i]];
    }
    return out;
}

std::vector<SpinState> readout(const std::vector<SpinState>& samples,
                               const ProgrammedProblem& programmed) {
    std::vector<SpinState> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(readout(s, programmed));
    }
    return out;
}

// ---------------------------------------------------------------------------
// File format

void write_embedding(std::ostream& out, const OriginEmbedding& embedding,
                     const HardwareGraph& hardware) {
    const auto& shape = embedding.shape;
    const auto kind = shape.lattice();
    out << "# lnls-embedding v1\n";
    out << "lattice " << to_string(kind) << "\n";
    out << "shape " << shape.describe() << "\n";
    out << "hardware pegasus " << hardware.m() << "\n";
    out << "max_chain_length " << embedding.max_chain_length << "\n";
    out << "variables " << shape.size() << "\n";
    for (std::size_t v = 0; v < shape.size(); ++v) {
        out << "c " << format_relative(kind, shape.relative()[v]);
        for (const QubitId q : embedding.chains[v]) {
            out << " " << q;
        }
        out << "\n";
    }
    std::vector<std::size_t> vac;
    for (std::size_t v = 0; v < embedding.vacant.size(); ++v) {
        if (embedding.vacant[v]) {
            vac.push_back(v);
        }
    }
    out << "vacancies " << vac.size() << "\n";
    for (const auto v : vac) {
        out << "v " << format_relative(kind, shape.relative()[v]) << "\n";
    }
}

OriginEmbedding read_embedding(std::istream& in, const HardwareGraph& hardware) {
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& what) {
        return std::runtime_error("embedding format error at line " + std::to_string(line_no) +
                                  ": " + what);
    };
    const auto next = [&](std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') {
                continue;
            }
            tokens.clear();
            std::istringstream ss(line);
            for (std::string t; ss >> t;) {
                tokens.push_back(t);
            }
            if (!tokens.empty()) {
                return true;
            }
        }
        return false;
    };
    const auto expect = [&](const std::string& key, std::size_t min_tokens) {
        std::vector<std::string> t;
        if (!next(t)) {
            throw fail("unexpected end of file, expected '" + key + "'");
        }
        if (t[0] != key || t.size() < min_tokens) {
            throw fail("expected '" + key + "' record");
        }
        return t;
    };
    const auto to_size = [&](const std::string& s) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw fail("expected a non-negative integer, got '" + s + "'");
        }
        return v;
    };

    const auto kind = parse_lattice_kind(expect("lattice", 2)[1]);
    auto shape = SubspaceShape::parse(kind, expect("shape", 2)[1]);
    const auto hw = expect("hardware", 3);
    if (hw[1] != "pegasus" || static_cast<int>(to_size(hw[2])) != hardware.m()) {
        throw fail("embedding targets " + hw[1] + " " + hw[2] + ", hardware is pegasus " +
                   std::to_string(hardware.m()));
    }
    OriginEmbedding emb{shape, {}, {}, {}, to_size(expect("max_chain_length", 2)[1]), false};
    const auto nvars = to_size(expect("variables", 2)[1]);
    if (nvars != shape.size()) {
        throw fail("variable count " + std::to_string(nvars) + " does not match shape size " +
                   std::to_string(shape.size()));
    }
    std::map<Coord, std::size_t> index;
    for (std::size_t v = 0; v < shape.size(); ++v) {
        index.emplace(shape.relative()[v], v);
    }
    emb.chains.assign(shape.size(), {});
    std::vector<std::uint8_t> seen(shape.size(), 0);
    for (std::size_t i = 0; i < nvars; ++i) {
        const auto t = expect("c", 2);
        Coord rel;
        try {
            rel = parse_relative(kind, t[1]);
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
        const auto it = index.find(rel);
        if (it == index.end()) {
            throw fail("coordinate " + t[1] + " is not in shape " + shape.describe());
        }
        if (seen[it->second]++) {
            throw fail("duplicate chain for " + t[1]);
        }
        for (std::size_t k = 2; k < t.size(); ++k) {
            emb.chains[it->second].push_back(static_cast<QubitId>(to_size(t[k])));
        }
    }
    emb.vacant.assign(shape.size(), 0);
    const auto nvac = to_size(expect("vacancies", 2)[1]);
    for (std::size_t i = 0; i < nvac; ++i) {
        const auto t = expect("v", 2);
        const auto it = index.find(parse_relative(kind, t[1]));
        if (it == index.end()) {
            throw fail("vacancy " + t[1] + " is not in the shape");
        }
        emb.vacant[it->second] = 1;
    }
    // Missing qubits simply contribute no couplers; validation names them.
    attach_couplers(emb, hardware);
    return emb;
}

}  // namespace lnls
