#include "phtree/dpp.hpp"

#include "phtree/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace phtree {

double dpp_average(const GameParams& params, std::span<const double> succ_values) {
    if (static_cast<int>(succ_values.size()) != params.m()) {
        throw ContractViolation("dpp_average expects " + std::to_string(params.m()) + " successor values, got " +
                                std::to_string(succ_values.size()));
    }
    double hi = succ_values[0];
    double lo = succ_values[0];
    double sum = 0.0;
    for (double v : succ_values) {
        hi = std::max(hi, v);
        lo = std::min(lo, v);
        sum += v;
    }
    const double raw = 0.5 * params.alpha() * (hi + lo) + params.beta() * sum / params.m();
    return std::clamp(raw, lo, hi);
}

Residual residual_at(const ValueOracle& field, const Vertex& v, const GameParams& params) {
    if (v.m() != params.m()) throw ContractViolation("vertex and parameters disagree on m");
    auto here = field(v);
    if (!here) throw MissingValueError("field has no value at vertex \"" + v.to_string() + "\"");
    std::vector<double> succ(static_cast<std::size_t>(params.m()));
    for (int d = 0; d < params.m(); ++d) {
        auto child = v.child(d);
        auto value = field(child);
        if (!value) throw MissingValueError("field has no value at vertex \"" + child.to_string() + "\"");
        succ[static_cast<std::size_t>(d)] = *value;
    }
    return Residual{dpp_average(params, succ) - *here};
}

std::string to_string(Harmonicity h) {
    switch (h) {
    case Harmonicity::subharmonious:
        return "subharmonious";
    case Harmonicity::superharmonious:
        return "superharmonious";
    case Harmonicity::harmonious:
        return "harmonious";
    case Harmonicity::neither:
        return "neither";
    }
    return "neither";
}

Harmonicity classify(const ValueOracle& field, const Vertex& v, const GameParams& params, double tol) {
    const double r = residual_at(field, v, params).value;
    if (std::abs(r) <= tol) return Harmonicity::harmonious;
    return r > 0 ? Harmonicity::subharmonious : Harmonicity::superharmonious;
}

namespace {

struct Worst {
    double abs_residual = -1.0;
    int level = 0;
    std::uint64_t index = 0;
    double min_residual = std::numeric_limits<double>::infinity();
    double max_residual = -std::numeric_limits<double>::infinity();

    // ties resolve to the first vertex in (level, index) order
    void offer(double r, int lvl, std::uint64_t idx) {
        const double a = std::abs(r);
        if (a > abs_residual || (a == abs_residual && std::pair(lvl, idx) < std::pair(level, index))) {
            abs_residual = a;
            level = lvl;
            index = idx;
        }
        min_residual = std::min(min_residual, r);
        max_residual = std::max(max_residual, r);
    }

    void merge(const Worst& o) {
        if (o.abs_residual >= 0) offer_abs(o);
        min_residual = std::min(min_residual, o.min_residual);
        max_residual = std::max(max_residual, o.max_residual);
    }

private:
    void offer_abs(const Worst& o) {
        if (o.abs_residual > abs_residual ||
            (o.abs_residual == abs_residual && std::pair(o.level, o.index) < std::pair(level, index))) {
            abs_residual = o.abs_residual;
            level = o.level;
            index = o.index;
        }
    }
};

} // namespace

FieldCheck check_field(const LevelField& field, const GameParams& params, double tol) {
    if (field.params.m() != params.m()) throw ContractViolation("field and parameters disagree on m");
    const auto m = static_cast<std::size_t>(params.m());
    Worst total;
    for (int k = 0; k < field.n; ++k) {
        const auto& parent = field.levels[static_cast<std::size_t>(k)];
        const auto& child = field.levels[static_cast<std::size_t>(k) + 1];
        const auto count = static_cast<std::int64_t>(parent.size());
#pragma omp parallel if (count > 4096)
        {
            Worst local;
#pragma omp for schedule(static) nowait
            for (std::int64_t j = 0; j < count; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                std::span<const double> succ(child.data() + uj * m, m);
                local.offer(dpp_average(params, succ) - parent[uj], k, static_cast<std::uint64_t>(j));
            }
#pragma omp critical(phtree_check_field)
            total.merge(local);
        }
    }

    FieldCheck out{0.0, Vertex(params.m()), Harmonicity::harmonious};
    if (total.abs_residual < 0) return out;
    out.max_abs_residual = total.abs_residual;
    out.worst_vertex = Vertex::from_index(params.m(), total.level, total.index);
    if (total.abs_residual <= tol) {
        out.classification = Harmonicity::harmonious;
    } else if (total.min_residual >= -tol) {
        out.classification = Harmonicity::subharmonious;
    } else if (total.max_residual <= tol) {
        out.classification = Harmonicity::superharmonious;
    } else {
        out.classification = Harmonicity::neither;
    }
    return out;
}

} // namespace phtree
