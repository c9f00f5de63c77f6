#pragma once

#include "phtree/params.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace phtree {

/// Minimal Hausdorff dimension of the Fatou set of a bounded p-harmonious
/// function, with the pieces of the closed form kept for reporting.
struct DimensionResult {
    GameParams params;
    double gamma = 1.0;
    /// (m alpha + 2(m-1) beta) / 2m, the exponent on gamma^-1 (equals theta).
    double exponent_neg = 0.0;
    /// (m alpha + 2 beta) / 2m, the exponent on gamma (equals delta).
    double exponent_pos = 0.0;
    double objective = 0.0;
    double dimension = 1.0;
};

DimensionResult fatou_dimension(const GameParams& params);

/// Limit of the dimension as m grows with beta fixed: (1 + beta) / 2.
double dimension_large_m_limit(double beta);

/// alpha/2 (max x + min x) + beta/m sum x.
double kl_constraint(const GameParams& params, std::span<const double> x);

struct KlOracleSettings {
    /// Random starting simplices for the unstructured search (plus the origin).
    int starts = 12;
    /// Upper bound on restart cycles per start.
    int restarts = 20;
    int max_iterations = 20000;
    double simplex_tolerance = 1e-9;
    std::uint64_t seed = 0x5eed;
};

struct KlOracleResult {
    double min_value = 0.0;
    std::vector<double> argmin;

    /// Best over k high coordinates s and m-k low ones t tied by the constraint.
    double structured_value = 0.0;
    std::vector<double> structured_argmin;
    int structured_k = 1;

    double unstructured_value = 0.0;
    std::vector<double> unstructured_argmin;
    /// Every local search met its tolerance and both routes agree to 1e-6.
    bool converged = false;
    std::string note;
};

/// Minimizes sum exp(x_j) subject to kl_constraint(x) = 0 numerically, by
/// two independent routes. Intended for small m (<= 16).
KlOracleResult kl_minimization_oracle(const GameParams& params, const KlOracleSettings& settings = {});

} // namespace phtree
