#pragma once

#include "phtree/boundary.hpp"
#include "phtree/params.hpp"

#include <cstdint>
#include <vector>

namespace phtree {

/// Values of u_n on levels 0..n, level k holding m^k entries in lexicographic
/// vertex order. levels[n] is the sampled boundary F_n.
struct LevelField {
    GameParams params;
    int n = 0;
    std::vector<std::vector<double>> levels;
    SampledBoundary boundary;

    double value(int level, std::uint64_t index) const { return levels.at(level).at(index); }
    double root() const { return levels.front().front(); }
};

} // namespace phtree
