#pragma once

// Minimum vertex cover of small conflict graphs, used to choose which
// variables to drop when a defective coupler breaks a subspace edge.

#include <cstdint>
#include <utility>
#include <vector>

namespace lnls {

inline constexpr std::size_t exact_cover_limit = 30;

struct CoverResult {
    /// Cover vertices, ascending.
    std::vector<std::uint32_t> cover;
    /// False when some component exceeded exact_cover_limit and was covered greedily.
    bool exact = true;
};

/// Minimum-cardinality vertex cover. Each connected component of up to
/// exact_cover_limit vertices is solved exactly, and among its minimum covers
/// the lexicographically smallest is chosen. Larger components fall back to
/// a max-degree greedy cover.
CoverResult minimum_vertex_cover(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

}  // namespace lnls
