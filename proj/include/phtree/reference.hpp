#pragma once

// Serial reference kernels. They follow the plain textbook loops and exist as
// test oracles and benchmark baselines for the OpenMP paths.

#include "phtree/game.hpp"
#include "phtree/solver.hpp"

namespace phtree::reference {

LevelField build_un(const BoundarySpec& spec, const GameParams& params, int n, std::uint64_t cap = kDefaultSizeCap);

McEstimate estimate_value(const Vertex& x0, const Strategy& player_one, const Strategy& player_two,
                          const BoundarySpec& spec, const GameParams& params, int depth, std::uint64_t plays,
                          std::uint64_t master_seed);

} // namespace phtree::reference
