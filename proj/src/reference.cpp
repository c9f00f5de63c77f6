#include "phtree/reference.hpp"

#include "phtree/errors.hpp"
#include "phtree/rng.hpp"

#include <algorithm>

namespace phtree::reference {

LevelField build_un(const BoundarySpec& spec, const GameParams& params, int n, std::uint64_t cap) {
    if (n < 1) throw ContractViolation("build_un needs n >= 1, got " + std::to_string(n));
    const auto m = static_cast<std::size_t>(params.m());
    const std::uint64_t size = level_size(params.m(), n, cap);
    SampledBoundary leaves{params.m(), n, {}};
    leaves.values.reserve(size);
    for (std::uint64_t j = 0; j < size; ++j) {
        leaves.values.push_back(spec(static_cast<double>(j) / static_cast<double>(size)));
    }

    LevelField field{params, n, std::vector<std::vector<double>>(static_cast<std::size_t>(n) + 1), leaves};
    field.levels[static_cast<std::size_t>(n)] = leaves.values;
    for (int k = n - 1; k >= 0; --k) {
        const auto& child = field.levels[static_cast<std::size_t>(k) + 1];
        auto& parent = field.levels[static_cast<std::size_t>(k)];
        parent.resize(child.size() / m);
        for (std::size_t j = 0; j < parent.size(); ++j) {
            double hi = child[j * m];
            double lo = hi;
            double sum = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double v = child[j * m + i];
                hi = std::max(hi, v);
                lo = std::min(lo, v);
                sum += v;
            }
            const double raw = 0.5 * params.alpha() * (hi + lo) + params.beta() * sum / params.m();
            parent[j] = std::clamp(raw, lo, hi);
        }
    }
    return field;
}

McEstimate estimate_value(const Vertex& x0, const Strategy& player_one, const Strategy& player_two,
                          const BoundarySpec& spec, const GameParams& params, int depth, std::uint64_t plays,
                          std::uint64_t master_seed) {
    if (plays < 2) throw ContractViolation("estimate_value needs at least two plays");
    std::vector<double> payoffs;
    payoffs.reserve(plays);
    std::uint64_t random_steps = 0;
    for (std::uint64_t i = 0; i < plays; ++i) {
        auto rec = play_once(x0, player_one, player_two, spec, params, depth, derive_seed(master_seed, i));
        for (auto c : rec.coin_outcomes) random_steps += c == CoinOutcome::random ? 1 : 0;
        payoffs.push_back(rec.payoff);
    }
    auto [mean, se] = detail::mean_and_std_error(payoffs);
    McEstimate est{mean, se, plays, params, depth, std::nullopt, random_steps, plays * static_cast<std::uint64_t>(depth)};
    if (spec.lipschitz_bound() || spec.sup_norm()) est.truncation_error = truncation_error(spec, params, depth);
    return est;
}

} // namespace phtree::reference
