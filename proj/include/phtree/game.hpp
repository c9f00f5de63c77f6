#pragma once

#include "phtree/boundary.hpp"
#include "phtree/level_field.hpp"
#include "phtree/params.hpp"
#include "phtree/tree.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phtree {

/// A player's rule: given the history x_0..x_k (last element is the current
/// vertex), pick the successor digit of x_k. Rules must be pure so that
/// concurrent plays can share one Strategy.
class Strategy {
public:
    using Rule = std::function<int(std::span<const Vertex> history, const LevelField* advice)>;

    Strategy(std::string name, Rule rule, std::shared_ptr<const LevelField> advice = nullptr);

    /// argmax of the advice field over S(x_k); ties go to the lowest digit.
    static Strategy greedy_max(std::shared_ptr<const LevelField> advice);
    /// argmin of the advice field over S(x_k); ties go to the lowest digit.
    static Strategy greedy_min(std::shared_ptr<const LevelField> advice);
    static Strategy fixed_digit(int digit);
    /// Uniform digit drawn from a hash of (seed, current vertex); deterministic.
    static Strategy uniform_random(std::uint64_t seed);

    /// Parses "greedy-max", "greedy-min", "fixed:<d>", "uniform:<seed>".
    static Strategy parse(const std::string& text, std::shared_ptr<const LevelField> advice);

    /// Chosen digit; throws ContractViolation if the rule leaves {0..m-1}.
    int choose(std::span<const Vertex> history) const;

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
    Rule rule_;
    std::shared_ptr<const LevelField> advice_;
};

enum class CoinOutcome { player_one, player_two, random };

std::string to_string(CoinOutcome c);

struct PlayRecord {
    std::vector<Vertex> path;
    std::vector<CoinOutcome> coin_outcomes;
    double payoff = 0.0;
    int truncation_depth = 0;
};

/// One play truncated after `depth` moves; payoff F(psi(x_depth)).
///
/// Each move: with probability alpha a fair coin hands the move to player I
/// or player II, otherwise a uniformly random successor is taken.
PlayRecord play_once(const Vertex& x0, const Strategy& player_one, const Strategy& player_two,
                     const BoundarySpec& spec, const GameParams& params, int depth, std::uint64_t seed);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t plays = 0;
    GameParams params;
    int truncation_depth = 0;
    /// nullopt when the boundary carries no modulus metadata.
    std::optional<double> truncation_error;
    std::uint64_t random_steps = 0;
    std::uint64_t total_steps = 0;
};

/// Sample mean and standard error over `plays` independent plays; play i uses
/// seed derive_seed(master_seed, i). The result does not depend on the thread count.
McEstimate estimate_value(const Vertex& x0, const Strategy& player_one, const Strategy& player_two,
                          const BoundarySpec& spec, const GameParams& params, int depth, std::uint64_t plays,
                          std::uint64_t master_seed);

/// modulus_bound(spec, m^-depth): payoff uncertainty from stopping at depth N.
double truncation_error(const BoundarySpec& spec, const GameParams& params, int depth);

namespace detail {

/// Mean and unbiased standard error of `values`, summed in index order with
/// Neumaier compensation.
std::pair<double, double> mean_and_std_error(std::span<const double> values);

} // namespace detail

} // namespace phtree
