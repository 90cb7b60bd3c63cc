#include "lnls/vertex_cover.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <stdexcept>

namespace lnls {

namespace {

using Mask = std::uint32_t;

/// Branch-and-bound minimum vertex cover over the subgraph induced by `alive`.
class ExactCover {
public:
    explicit ExactCover(std::vector<Mask> adj) : adj_(std::move(adj)) {}

    int solve(Mask alive, int budget) const {
        int best = budget;
        search(alive, 0, best);
        return best;
    }

private:
    // Updates `best` if a cover of the alive subgraph smaller than it exists.
    void search(Mask alive, int used, int& best) const {
        if (used >= best) {
            return;
        }
        int vmax = -1;
        int dmax = 0;
        int edges2 = 0;
        for (Mask m = alive; m; m &= m - 1) {
            const int v = std::countr_zero(m);
            const int d = std::popcount(adj_[v] & alive);
            edges2 += d;
            if (d > dmax) {
                dmax = d;
                vmax = v;
            }
        }
        if (dmax == 0) {
            best = used;
            return;
        }
        // Each cover vertex covers at most dmax edges.
        const int edges = edges2 / 2;
        if (used + (edges + dmax - 1) / dmax >= best) {
            return;
        }
        const Mask nb = adj_[vmax] & alive;
        search(alive & ~(Mask{1} << vmax), used + 1, best);
        search(alive & ~(Mask{1} << vmax) & ~nb, used + std::popcount(nb), best);
    }

    std::vector<Mask> adj_;
};

std::vector<std::uint32_t> cover_component(const std::vector<Mask>& adj) {
    const int n = static_cast<int>(adj.size());
    const Mask all = n == 32 ? ~Mask{0} : ((Mask{1} << n) - 1);
    ExactCover solver(adj);
    const int k = solver.solve(all, n + 1);

    // Cost of the best cover with `in` forced into it and `out` excluded.
    const auto constrained = [&](Mask in, Mask out) {
        Mask forced = in;
        for (Mask m = out; m; m &= m - 1) {
            forced |= adj[std::countr_zero(m)];
        }
        if (forced & out) {
            return n + 1;
        }
        const Mask alive = all & ~forced & ~out;
        return std::popcount(forced) + solver.solve(alive, n + 1);
    };

    // Decide vertices in ascending order, preferring inclusion.
    Mask in = 0;
    Mask out = 0;
    for (int v = 0; v < n; ++v) {
        const Mask bit = Mask{1} << v;
        if (constrained(in | bit, out) == k) {
            in |= bit;
        } else {
            out |= bit;
        }
    }
    std::vector<std::uint32_t> result;
    for (Mask m = in; m; m &= m - 1) {
        result.push_back(static_cast<std::uint32_t>(std::countr_zero(m)));
    }
    if (static_cast<int>(result.size()) != k) {
        throw std::logic_error("vertex cover reconstruction failed");
    }
    return result;
}

std::vector<std::uint32_t> greedy_cover(std::size_t n,
                                        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::vector<std::uint32_t> out;
    std::vector<std::uint8_t> taken(n, 0);
    while (!edges.empty()) {
        std::vector<std::uint32_t> deg(n, 0);
        for (const auto& [a, b] : edges) {
            ++deg[a];
            ++deg[b];
        }
        const auto v = static_cast<std::uint32_t>(
            std::max_element(deg.begin(), deg.end()) - deg.begin());
        taken[v] = 1;
        out.push_back(v);
        std::erase_if(edges, [&](const auto& e) { return e.first == v || e.second == v; });
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

CoverResult minimum_vertex_cover(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    // Compact vertex ids in ascending order so local order matches id order.
    std::vector<std::uint32_t> ids;
    for (const auto& [a, b] : edges) {
        if (a == b) {
            throw std::invalid_argument("vertex cover: self-loop on vertex " + std::to_string(a));
        }
        ids.push_back(a);
        ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const auto local = [&](std::uint32_t v) {
        return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
    };

    std::vector<std::uint32_t> parent(ids.size());
    std::iota(parent.begin(), parent.end(), 0u);
    const auto find = [&](std::uint32_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ledges;
    for (const auto& [a, b] : edges) {
        const auto la = local(a);
        const auto lb = local(b);
        ledges.emplace_back(la, lb);
        parent[find(la)] = find(lb);
    }

    std::map<std::uint32_t, std::vector<std::uint32_t>> components;
    for (std::uint32_t v = 0; v < ids.size(); ++v) {
        components[find(v)].push_back(v);
    }

    CoverResult result;
    for (const auto& [root, members] : components) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> cedges;
        const auto pos = [&](std::uint32_t v) {
            return static_cast<std::uint32_t>(
                std::lower_bound(members.begin(), members.end(), v) - members.begin());
        };
        for (const auto& [a, b] : ledges) {
            if (find(a) == root) {
                cedges.emplace_back(pos(a), pos(b));
            }
        }
        std::vector<std::uint32_t> chosen;
        if (members.size() <= exact_cover_limit) {
            std::vector<Mask> adj(members.size(), 0);
            for (const auto& [a, b] : cedges) {
                adj[a] |= Mask{1} << b;
                adj[b] |= Mask{1} << a;
            }
            chosen = cover_component(adj);
        } else {
            chosen = greedy_cover(members.size(), cedges);
            result.exact = false;
        }
        for (auto v : chosen) {
            result.cover.push_back(ids[members[v]]);
        }
    }
    std::sort(result.cover.begin(), result.cover.end());
    return result;
}

}  // namespace lnls
