#pragma once

// Instance generators: the +-J spin glass, the ferromagnet, and tile-planted
// cubic instances with a known ground state.

#include "lnls/ising.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace lnls {

IsingModel gen_pm_j(TopologyPtr topology, std::uint64_t seed);
IsingModel gen_ferromagnet(TopologyPtr topology);

/// Cube edges as pairs of corner indices. Corner c has offsets
/// (c >> 2 & 1, c >> 1 & 1, c & 1) from the lower corner.
const std::array<std::array<int, 2>, 12>& cube_edges();

/// A 2x2x2 tile: the set of cube edges frustrated with respect to the
/// planted state (bit e of the mask is edge e of cube_edges()).
struct TileClass {
    std::uint16_t frustrated = 0;
    int energy = -12;

    int num_frustrated() const;
};

/// Ground-state energy of a tile by exhaustive enumeration of the 2^8 states,
/// with J_e = -1 on satisfied edges and +1 on frustrated ones.
int tile_ground_energy(std::uint16_t frustrated);

/// All frustrated-edge subsets of size <= 3 for which the all-ones state is a
/// tile ground state, ordered by (size, mask).
std::vector<TileClass> enumerate_tile_classes();

struct TileDistribution {
    std::vector<TileClass> classes;
    std::vector<double> probability;
    double lambda = 0.0;

    /// Sum_i e_i P(i) / 4: the planted energy per spin (L^3 / 4 tiles share
    /// L^3 spins).
    double energy_per_spin() const;
    /// Total probability of classes with energy e.
    double mass_at_energy(int e) const;
};

/// Maximum-entropy distribution P(i) ~ exp(-lambda e_i) over the tile classes
/// with mean planted energy per spin equal to the target. The target must lie
/// in [-3, -1.5]; the endpoints give degenerate distributions.
TileDistribution solve_tile_distribution(double target_energy_per_spin);
TileDistribution solve_tile_distribution(double target_energy_per_spin,
                                         std::vector<TileClass> classes);

/// Distribution that always selects a single class.
TileDistribution single_class_distribution(const TileClass& tile);

/// Lower corners of the tiles covering each edge of the periodic L^3 lattice
/// once: i1 = i2 = i3 (mod 2). Requires even L >= 4.
std::vector<CubicCoord> tile_corners(int L);

struct PlantedInstance {
    IsingModel model;
    SpinState planted;
    double ground_energy = 0.0;
};

/// Tile-planted cubic instance. Tiles are drawn i.i.d. from `distribution`;
/// the planted state is a uniformly random gauge of the all-ones state unless
/// `gauge` is false.
PlantedInstance gen_tile_planted(int L, const TileDistribution& distribution, std::uint64_t seed,
                                 bool gauge = true);

}  // namespace lnls
