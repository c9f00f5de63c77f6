#pragma once

#include "phtree/boundary.hpp"
#include "phtree/dpp.hpp"
#include "phtree/level_field.hpp"
#include "phtree/params.hpp"
#include "phtree/tree.hpp"

#include <cstdint>
#include <span>

namespace phtree {

/// Builds u_n: level n holds F_n, every shallower value is the DPP average of
/// its m successors. Levels are swept bottom-up; each level is one parallel loop.
LevelField build_un(const BoundarySpec& spec, const GameParams& params, int n, std::uint64_t cap = kDefaultSizeCap);

/// Same sweep starting from already sampled leaf values.
LevelField build_from_samples(SampledBoundary leaves, const GameParams& params);

/// One bottom-up DPP step: parent[j] = dpp_average(children[j*m .. j*m+m-1]).
void sweep_level(const GameParams& params, std::span<const double> children, std::span<double> parents);

/// u_n(v); below level n the value of the depth-n ancestor.
double evaluate(const LevelField& field, const Vertex& v);

/// L / m^n for Lipschitz boundary data.
double error_bound(const BoundarySpec& spec, const GameParams& params, int n);

struct SolveResult {
    LevelField field;
    int n_used = 0;
    /// Certified (L / m^n) or empirical (max |u_n - u_{n+1}|) bound.
    double bound = 0.0;
    bool certified = false;
    /// The size cap stopped refinement before the tolerance was met.
    bool capacity_limited = false;
};

/// Smallest n meeting `tol`: via the certified L/m^n bound when F carries a
/// Lipschitz constant, otherwise by Cauchy stopping on consecutive u_n, u_{n+1}.
SolveResult solve_to_tolerance(const BoundarySpec& spec, const GameParams& params, double tol,
                               std::uint64_t cap = kDefaultSizeCap);

/// True iff F <= G at every stored vertex.
bool compare_fields(const LevelField& f, const LevelField& g);

/// Interior values outside [min, max] of their children.
std::uint64_t count_max_principle_violations(const LevelField& field);

} // namespace phtree
