#include "phtree/game.hpp"

#include "phtree/errors.hpp"
#include "phtree/rng.hpp"
#include "phtree/solver.hpp"

#include <cmath>
#include <limits>

namespace phtree {

Strategy::Strategy(std::string name, Rule rule, std::shared_ptr<const LevelField> advice)
    : name_(std::move(name)), rule_(std::move(rule)), advice_(std::move(advice)) {
    if (!rule_) throw ContractViolation("strategy needs a rule");
}

namespace {

template <typename Better>
Strategy greedy(std::string name, std::shared_ptr<const LevelField> advice, Better better) {
    if (!advice) throw ContractViolation(name + " needs an advice field");
    return Strategy(
        std::move(name),
        [better](std::span<const Vertex> history, const LevelField* field) {
            const Vertex& here = history.back();
            int best = 0;
            double best_value = evaluate(*field, here.child(0));
            for (int d = 1; d < here.m(); ++d) {
                const double v = evaluate(*field, here.child(d));
                if (better(v, best_value)) {
                    best = d;
                    best_value = v;
                }
            }
            return best;
        },
        std::move(advice));
}

} // namespace

Strategy Strategy::greedy_max(std::shared_ptr<const LevelField> advice) {
    return greedy("greedy-max", std::move(advice), [](double a, double b) { return a > b; });
}

Strategy Strategy::greedy_min(std::shared_ptr<const LevelField> advice) {
    return greedy("greedy-min", std::move(advice), [](double a, double b) { return a < b; });
}

Strategy Strategy::fixed_digit(int digit) {
    return Strategy("fixed:" + std::to_string(digit),
                    [digit](std::span<const Vertex>, const LevelField*) { return digit; });
}

Strategy Strategy::uniform_random(std::uint64_t seed) {
    return Strategy("uniform:" + std::to_string(seed), [seed](std::span<const Vertex> history, const LevelField*) {
        const Vertex& here = history.back();
        std::uint64_t h = mix64(seed ^ static_cast<std::uint64_t>(here.level()));
        for (int d : here.digits()) h = mix64(h ^ static_cast<std::uint64_t>(d));
        return static_cast<int>(h % static_cast<std::uint64_t>(here.m()));
    });
}

Strategy Strategy::parse(const std::string& text, std::shared_ptr<const LevelField> advice) {
    if (text == "greedy-max") return greedy_max(std::move(advice));
    if (text == "greedy-min") return greedy_min(std::move(advice));
    try {
        if (text.rfind("fixed:", 0) == 0) return fixed_digit(std::stoi(text.substr(6)));
        if (text.rfind("uniform:", 0) == 0) return uniform_random(std::stoull(text.substr(8)));
    } catch (const std::logic_error&) {
        throw ParseError("malformed number in \"" + text + "\"");
    }
    throw ParseError("unknown strategy \"" + text + "\"");
}

int Strategy::choose(std::span<const Vertex> history) const {
    if (history.empty()) throw ContractViolation("strategy called with an empty history");
    const int d = rule_(history, advice_.get());
    if (d < 0 || d >= history.back().m()) {
        throw ContractViolation("strategy " + name_ + " returned digit " + std::to_string(d) + " out of range");
    }
    return d;
}

std::string to_string(CoinOutcome c) {
    switch (c) {
    case CoinOutcome::player_one:
        return "player-I";
    case CoinOutcome::player_two:
        return "player-II";
    case CoinOutcome::random:
        return "random";
    }
    return "random";
}

namespace {

void check_play_args(const Vertex& x0, const GameParams& params, int depth) {
    if (depth < 1) throw ContractViolation("truncation depth must be >= 1");
    if (x0.m() != params.m()) throw ContractViolation("start vertex and parameters disagree on m");
}

/// Plays `depth` moves from the last vertex of `path` (appending to it).
double run_play(std::vector<Vertex>& path, std::vector<CoinOutcome>* coins, std::uint64_t& random_steps,
                const Strategy& one, const Strategy& two, const BoundarySpec& spec, const GameParams& params,
                int depth, std::uint64_t seed) {
    PlayEngine engine(seed);
    for (int step = 0; step < depth; ++step) {
        CoinOutcome outcome;
        int digit;
        if (uniform01(engine) < params.alpha()) {
            outcome = (engine() >> 63) == 0 ? CoinOutcome::player_one : CoinOutcome::player_two;
            digit = (outcome == CoinOutcome::player_one ? one : two).choose(path);
        } else {
            outcome = CoinOutcome::random;
            digit = uniform_below(engine, params.m());
            ++random_steps;
        }
        if (coins) coins->push_back(outcome);
        path.push_back(path.back().child(digit));
    }
    return spec(psi(path.back()).to_double());
}

} // namespace

PlayRecord play_once(const Vertex& x0, const Strategy& player_one, const Strategy& player_two,
                     const BoundarySpec& spec, const GameParams& params, int depth, std::uint64_t seed) {
    check_play_args(x0, params, depth);
    PlayRecord rec;
    rec.truncation_depth = depth;
    rec.path.reserve(static_cast<std::size_t>(depth) + 1);
    rec.path.push_back(x0);
    std::uint64_t random_steps = 0;
    rec.payoff = run_play(rec.path, &rec.coin_outcomes, random_steps, player_one, player_two, spec, params, depth, seed);
    return rec;
}

double truncation_error(const BoundarySpec& spec, const GameParams& params, int depth) {
    if (depth < 1) throw ContractViolation("truncation depth must be >= 1");
    return modulus_bound(spec, std::pow(static_cast<double>(params.m()), -depth));
}

namespace detail {

std::pair<double, double> mean_and_std_error(std::span<const double> values) {
    const auto n = values.size();
    if (n < 2) throw ContractViolation("need at least two samples");
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    const double mean = (sum + comp) / static_cast<double>(n);
    double ss = 0.0;
    double ss_comp = 0.0;
    for (double v : values) {
        const double d = (v - mean) * (v - mean);
        const double t = ss + d;
        ss_comp += ss >= d ? (ss - t) + d : (d - t) + ss;
        ss = t;
    }
    const double variance = (ss + ss_comp) / static_cast<double>(n - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n))};
}

} // namespace detail

namespace {

McEstimate finish_estimate(std::span<const double> payoffs, std::uint64_t random_steps, const BoundarySpec& spec,
                           const GameParams& params, int depth) {
    auto [mean, se] = detail::mean_and_std_error(payoffs);
    McEstimate est{mean, se, payoffs.size(), params, depth, std::nullopt, random_steps,
                   static_cast<std::uint64_t>(payoffs.size()) * static_cast<std::uint64_t>(depth)};
    if (spec.lipschitz_bound() || spec.sup_norm()) est.truncation_error = truncation_error(spec, params, depth);
    return est;
}

void check_estimate_args(const Vertex& x0, const GameParams& params, int depth, std::uint64_t plays) {
    check_play_args(x0, params, depth);
    if (plays < 2) throw ContractViolation("estimate_value needs at least two plays");
}

} // namespace

McEstimate estimate_value(const Vertex& x0, const Strategy& player_one, const Strategy& player_two,
                          const BoundarySpec& spec, const GameParams& params, int depth, std::uint64_t plays,
                          std::uint64_t master_seed) {
    check_estimate_args(x0, params, depth, plays);
    std::vector<double> payoffs(plays);
    std::uint64_t random_steps = 0;
    const auto count = static_cast<std::int64_t>(plays);
    const bool parallel = spec.kind() != BoundarySpec::Kind::custom;
#pragma omp parallel if (parallel) reduction(+ : random_steps)
    {
        std::vector<Vertex> path;
        path.reserve(static_cast<std::size_t>(depth) + 1);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            path.clear();
            path.push_back(x0);
            payoffs[static_cast<std::size_t>(i)] =
                run_play(path, nullptr, random_steps, player_one, player_two, spec, params, depth,
                         derive_seed(master_seed, static_cast<std::uint64_t>(i)));
        }
    }
    return finish_estimate(payoffs, random_steps, spec, params, depth);
}

} // namespace phtree
