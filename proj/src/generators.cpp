#include "lnls/generators.hpp"

#include "lnls/rng.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lnls {

IsingModel gen_pm_j(TopologyPtr topology, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> J(topology->num_edges());
    for (auto& j : J) {
        j = rng.coin() ? 1.0 : -1.0;
    }
    std::vector<double> h(topology->num_vertices(), 0.0);
    return IsingModel(std::move(topology), std::move(h), std::move(J));
}

IsingModel gen_ferromagnet(TopologyPtr topology) {
    std::vector<double> J(topology->num_edges(), -1.0);
    std::vector<double> h(topology->num_vertices(), 0.0);
    return IsingModel(std::move(topology), std::move(h), std::move(J));
}

// ---------------------------------------------------------------------------
// Tiles

const std::array<std::array<int, 2>, 12>& cube_edges() {
    static const auto edges = [] {
        std::array<std::array<int, 2>, 12> out{};
        int n = 0;
        for (int c = 0; c < 8; ++c) {
            for (int bit = 2; bit >= 0; --bit) {
                if (!(c & (1 << bit))) {
                    out[n++] = {c, c | (1 << bit)};
                }
            }
        }
        return out;
    }();
    return edges;
}

int TileClass::num_frustrated() const { return std::popcount(frustrated); }

int tile_ground_energy(std::uint16_t frustrated) {
    const auto& edges = cube_edges();
    int best = 1 << 20;
    for (int s = 0; s < 256; ++s) {
        int e = 0;
        for (int k = 0; k < 12; ++k) {
            const int xa = (s >> edges[k][0]) & 1 ? 1 : -1;
            const int xb = (s >> edges[k][1]) & 1 ? 1 : -1;
            const int J = (frustrated >> k) & 1 ? 1 : -1;
            e += J * xa * xb;
        }
        best = std::min(best, e);
    }
    return best;
}

std::vector<TileClass> enumerate_tile_classes() {
    std::vector<TileClass> out;
    for (int size = 0; size <= 3; ++size) {
        for (std::uint16_t mask = 0; mask < (1u << 12); ++mask) {
            if (std::popcount(mask) != size) {
                continue;
            }
            const int planted = -12 + 2 * size;
            if (tile_ground_energy(mask) == planted) {
                out.push_back({mask, planted});
            }
        }
    }
    return out;
}

double TileDistribution::energy_per_spin() const {
    double s = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        s += classes[i].energy * probability[i];
    }
    return s / 4.0;
}

double TileDistribution::mass_at_energy(int e) const {
    double s = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].energy == e) {
            s += probability[i];
        }
    }
    return s;
}

namespace {

std::vector<double> gibbs_weights(const std::vector<TileClass>& classes, double lambda) {
    // Shift by the largest exponent to keep exp() finite across the bracket.
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& c : classes) {
        shift = std::max(shift, -lambda * c.energy);
    }
    std::vector<double> p(classes.size());
    double z = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        p[i] = std::exp(-lambda * classes[i].energy - shift);
        z += p[i];
    }
    for (auto& v : p) {
        v /= z;
    }
    return p;
}

double mean_per_spin(const std::vector<TileClass>& classes, const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        s += classes[i].energy * p[i];
    }
    return s / 4.0;
}

}  // namespace

TileDistribution solve_tile_distribution(double target) {
    return solve_tile_distribution(target, enumerate_tile_classes());
}

TileDistribution solve_tile_distribution(double target, std::vector<TileClass> classes) {
    if (classes.empty()) {
        throw std::invalid_argument("tile distribution needs at least one class");
    }
    int emin = classes.front().energy;
    int emax = emin;
    for (const auto& c : classes) {
        emin = std::min(emin, c.energy);
        emax = std::max(emax, c.energy);
    }
    const double lo_target = emin / 4.0;
    const double hi_target = emax / 4.0;
    if (!(target >= lo_target && target <= hi_target)) {
        throw std::invalid_argument("target energy per spin " + std::to_string(target) +
                                    " outside achievable range [" + std::to_string(lo_target) +
                                    ", " + std::to_string(hi_target) + "]");
    }

    TileDistribution d;
    d.classes = std::move(classes);
    if (target == lo_target || target == hi_target || emin == emax) {
        // Boundary of the constraint set: all mass on the extreme classes.
        const int keep = target == lo_target ? emin : emax;
        d.probability.assign(d.classes.size(), 0.0);
        std::size_t count = 0;
        for (const auto& c : d.classes) {
            count += c.energy == keep ? 1 : 0;
        }
        for (std::size_t i = 0; i < d.classes.size(); ++i) {
            d.probability[i] = d.classes[i].energy == keep ? 1.0 / static_cast<double>(count) : 0.0;
        }
        d.lambda = target == lo_target ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
        return d;
    }

    // Mean energy is decreasing in lambda.
    double lo = -10.0;
    double hi = 10.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mean_per_spin(d.classes, gibbs_weights(d.classes, mid)) < target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    d.lambda = 0.5 * (lo + hi);
    d.probability = gibbs_weights(d.classes, d.lambda);
    return d;
}

TileDistribution single_class_distribution(const TileClass& tile) {
    TileDistribution d;
    d.classes = {tile};
    d.probability = {1.0};
    return d;
}

std::vector<CubicCoord> tile_corners(int L) {
    if (L < 4 || L % 2 != 0) {
        throw std::invalid_argument("tile planting requires an even lattice scale L >= 4, got " +
                                    std::to_string(L));
    }
    std::vector<CubicCoord> out;
    out.reserve(static_cast<std::size_t>(L) * L * L / 4);
    for (int i1 = 0; i1 < L; ++i1) {
        for (int i2 = 0; i2 < L; ++i2) {
            for (int i3 = 0; i3 < L; ++i3) {
                if (i1 % 2 == i2 % 2 && i2 % 2 == i3 % 2) {
                    out.push_back({i1, i2, i3});
                }
            }
        }
    }
    return out;
}

PlantedInstance gen_tile_planted(int L, const TileDistribution& distribution, std::uint64_t seed,
                                 bool gauge) {
    const auto corners = tile_corners(L);
    if (distribution.classes.empty() ||
        distribution.classes.size() != distribution.probability.size()) {
        throw std::invalid_argument("malformed tile distribution");
    }
    auto topo = build_cubic(L);
    Rng rng(seed);

    std::vector<double> cdf(distribution.probability.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += distribution.probability[i];
        cdf[i] = acc;
    }

    std::vector<double> J(topo->num_edges(), 0.0);
    std::vector<std::uint8_t> covered(topo->num_edges(), 0);
    double ground = 0.0;
    const auto& cedges = cube_edges();
    for (const auto& c : corners) {
        const double u = rng.uniform() * acc;
        std::size_t pick = 0;
        while (pick + 1 < cdf.size() && u >= cdf[pick]) {
            ++pick;
        }
        const auto& tile = distribution.classes[pick];
        ground += tile.energy;
        for (int k = 0; k < 12; ++k) {
            const auto corner = [&](int v) {
                return topo->index_of(CubicCoord{(c.i1 + ((v >> 2) & 1)) % L,
                                                 (c.i2 + ((v >> 1) & 1)) % L,
                                                 (c.i3 + (v & 1)) % L});
            };
            const auto e = topo->find_edge(corner(cedges[k][0]), corner(cedges[k][1]));
            if (e < 0 || covered[static_cast<std::size_t>(e)]++) {
                throw std::logic_error("tile partition does not cover edges exactly once");
            }
            J[static_cast<std::size_t>(e)] = (tile.frustrated >> k) & 1 ? 1.0 : -1.0;
        }
    }

    SpinState planted(topo->num_vertices(), 1);
    if (gauge) {
        for (auto& s : planted) {
            s = rng.spin();
        }
        const auto edges = topo->edges();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            J[e] *= planted[edges[e].a] * planted[edges[e].b];
        }
    }
    std::vector<double> h(topo->num_vertices(), 0.0);
    return PlantedInstance{IsingModel(std::move(topo), std::move(h), std::move(J)),
                           std::move(planted), ground};
}

}  // namespace lnls
