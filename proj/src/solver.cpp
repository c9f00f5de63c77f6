#include "phtree/solver.hpp"

#include "phtree/errors.hpp"

#include <algorithm>
#include <cmath>

namespace phtree {

void sweep_level(const GameParams& params, std::span<const double> children, std::span<double> parents) {
    const auto m = static_cast<std::size_t>(params.m());
    if (children.size() != parents.size() * m) throw ContractViolation("sweep_level: level sizes do not match");
    const auto count = static_cast<std::int64_t>(parents.size());
#pragma omp parallel for schedule(static) if (count > 4096)
    for (std::int64_t j = 0; j < count; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        parents[uj] = dpp_average(params, children.subspan(uj * m, m));
    }
}

LevelField build_from_samples(SampledBoundary leaves, const GameParams& params) {
    if (leaves.m != params.m()) throw ContractViolation("boundary samples and parameters disagree on m");
    if (leaves.n < 0) throw ContractViolation("depth must be >= 0");
    const auto expected = checked_pow(static_cast<std::uint64_t>(params.m()), leaves.n);
    if (!expected || leaves.values.size() != *expected) {
        throw ContractViolation("boundary samples must hold exactly m^n values");
    }
    LevelField field{params, leaves.n, {}, {}};
    field.levels.resize(static_cast<std::size_t>(leaves.n) + 1);
    field.levels.back() = leaves.values;
    for (int k = leaves.n - 1; k >= 0; --k) {
        const auto& child = field.levels[static_cast<std::size_t>(k) + 1];
        auto& parent = field.levels[static_cast<std::size_t>(k)];
        parent.resize(child.size() / static_cast<std::size_t>(params.m()));
        sweep_level(params, child, parent);
    }
    field.boundary = std::move(leaves);
    return field;
}

LevelField build_un(const BoundarySpec& spec, const GameParams& params, int n, std::uint64_t cap) {
    if (n < 1) throw ContractViolation("build_un needs n >= 1, got " + std::to_string(n));
    return build_from_samples(sample_Fn(spec, params.m(), n, cap), params);
}

double evaluate(const LevelField& field, const Vertex& v) {
    if (v.m() != field.params.m()) throw ContractViolation("vertex and field disagree on m");
    const int depth = std::min(v.level(), field.n);
    std::uint64_t idx = 0;
    const auto digits = v.digits();
    for (int i = 0; i < depth; ++i) {
        idx = idx * static_cast<std::uint64_t>(field.params.m()) + static_cast<std::uint64_t>(digits[static_cast<std::size_t>(i)]);
    }
    return field.levels[static_cast<std::size_t>(depth)][idx];
}

double error_bound(const BoundarySpec& spec, const GameParams& params, int n) {
    auto L = spec.lipschitz_bound();
    if (!L) {
        throw UnsupportedError("boundary \"" + spec.name() +
                               "\" has no Lipschitz constant; use modulus_bound for a continuity estimate");
    }
    return *L / std::pow(static_cast<double>(params.m()), n);
}

namespace {

double max_abs_difference(const LevelField& coarse, const LevelField& fine) {
    double diff = 0.0;
    for (int k = 0; k <= coarse.n; ++k) {
        const auto& a = coarse.levels[static_cast<std::size_t>(k)];
        const auto& b = fine.levels[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(a[j] - b[j]));
    }
    return diff;
}

bool fits(int m, int n, std::uint64_t cap) {
    auto size = checked_pow(static_cast<std::uint64_t>(m), n);
    return size && *size <= cap;
}

} // namespace

SolveResult solve_to_tolerance(const BoundarySpec& spec, const GameParams& params, double tol, std::uint64_t cap) {
    if (!(tol > 0.0)) throw ParameterError("tolerance must be > 0");
    const int m = params.m();
    if (!fits(m, 1, cap)) throw CapacityError("size cap " + std::to_string(cap) + " is below a single level");

    if (auto L = spec.lipschitz_bound()) {
        int n = 1;
        while (error_bound(spec, params, n) > tol && fits(m, n + 1, cap)) ++n;
        const double bound = error_bound(spec, params, n);
        const bool met = bound <= tol;
        return SolveResult{build_un(spec, params, n, cap), n, bound, met, !met};
    }

    LevelField coarse = build_un(spec, params, 1, cap);
    int n = 1;
    double diff = 0.0;
    while (fits(m, n + 1, cap)) {
        LevelField fine = build_un(spec, params, n + 1, cap);
        diff = max_abs_difference(coarse, fine);
        coarse = std::move(fine);
        ++n;
        if (diff <= tol / 2) return SolveResult{std::move(coarse), n, diff, false, false};
    }
    return SolveResult{std::move(coarse), n, diff, false, true};
}

bool compare_fields(const LevelField& f, const LevelField& g) {
    if (!(f.params == g.params) || f.n != g.n || f.levels.size() != g.levels.size()) {
        throw ContractViolation("compare_fields: fields differ in parameters or depth");
    }
    for (std::size_t k = 0; k < f.levels.size(); ++k) {
        const auto& a = f.levels[k];
        const auto& b = g.levels[k];
        if (a.size() != b.size()) throw ContractViolation("compare_fields: level sizes differ");
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] > b[j]) return false;
        }
    }
    return true;
}

std::uint64_t count_max_principle_violations(const LevelField& field) {
    const auto m = static_cast<std::size_t>(field.params.m());
    std::uint64_t violations = 0;
    for (int k = 0; k < field.n; ++k) {
        const auto& parent = field.levels[static_cast<std::size_t>(k)];
        const auto& child = field.levels[static_cast<std::size_t>(k) + 1];
        for (std::size_t j = 0; j < parent.size(); ++j) {
            auto [lo, hi] = std::minmax_element(child.begin() + static_cast<std::ptrdiff_t>(j * m),
                                                child.begin() + static_cast<std::ptrdiff_t>(j * m + m));
            if (parent[j] < *lo || parent[j] > *hi) ++violations;
        }
    }
    return violations;
}

} // namespace phtree
