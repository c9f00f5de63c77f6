#pragma once

#include "phtree/level_field.hpp"
#include "phtree/params.hpp"
#include "phtree/tree.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace phtree {

inline constexpr double kHarmonicTolerance = 1e-12;

/// (alpha/2)(max + min) + (beta/m) * sum over the m successor values.
///
/// The result is clamped into [min, max]: the operator is a convex
/// combination, so this only removes rounding noise.
double dpp_average(const GameParams& params, std::span<const double> succ_values);

/// DPP right-hand side minus u(v).
struct Residual {
    double value = 0.0;
};

/// Partial function on vertices; nullopt means "no value here".
using ValueOracle = std::function<std::optional<double>(const Vertex&)>;

Residual residual_at(const ValueOracle& field, const Vertex& v, const GameParams& params);

enum class Harmonicity { subharmonious, superharmonious, harmonious, neither };

std::string to_string(Harmonicity h);

/// harmonious if |r| <= tol, otherwise subharmonious (r > 0) or superharmonious (r < 0).
Harmonicity classify(const ValueOracle& field, const Vertex& v, const GameParams& params,
                     double tol = kHarmonicTolerance);

struct FieldCheck {
    double max_abs_residual = 0.0;
    Vertex worst_vertex;
    Harmonicity classification = Harmonicity::harmonious;
};

/// Scans every interior vertex (levels 0..n-1) of a stored field.
FieldCheck check_field(const LevelField& field, const GameParams& params, double tol = kHarmonicTolerance);

} // namespace phtree
