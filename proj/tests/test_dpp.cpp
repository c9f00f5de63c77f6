#include "phtree/dpp.hpp"
#include "phtree/errors.hpp"
#include "phtree/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace phtree;

namespace {

const GameParams kHalf(3, 0.5, 0.5);

ValueOracle by_level(double sign) {
    return [sign](const Vertex& v) -> std::optional<double> { return sign * v.level(); };
}

} // namespace

TEST_CASE("dpp_average examples") {
    CHECK(dpp_average(kHalf, std::vector{0.0, 0.5, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dpp_average(GameParams(3, 0, 1), std::vector{0.0, 1.0 / 3, 2.0 / 3}) ==
          doctest::Approx(1.0 / 3).epsilon(1e-15));
    for (double c : {-2.5, 0.0, 0.7}) {
        CHECK(dpp_average(GameParams(4, 0.3, 0.7), std::vector{c, c, c, c}) == c);
    }
    CHECK_THROWS_AS(dpp_average(kHalf, std::vector{0.0, 1.0}), ContractViolation);
}

TEST_CASE("dpp_average matches the theta/delta split on sorted inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int m : {2, 3, 5, 8}) {
        for (double a : {0.0, 0.3, 1.0}) {
            const GameParams p(m, a, 1 - a);
            CHECK(p.theta() + p.delta() == doctest::Approx(1.0).epsilon(1e-15));
            for (int t = 0; t < 50; ++t) {
                std::vector<double> v(static_cast<std::size_t>(m));
                for (auto& x : v) x = u(rng);
                std::sort(v.begin(), v.end());
                double mid = 0;
                for (std::size_t i = 1; i + 1 < v.size(); ++i) mid += v[i];
                const double expect = p.theta() * v.back() + p.delta() * v.front() +
                                      p.beta() / m * mid - p.beta() / m * (m - 2) * v.back();
                CHECK(dpp_average(p, v) == doctest::Approx(expect).epsilon(1e-12));
                CHECK(dpp_average(p, v) <= p.theta() * v.back() + p.delta() * v.front() + 1e-12);
            }
        }
    }
}

TEST_CASE("dpp_average properties on random inputs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    std::uniform_real_distribution<double> bump(0, 1);
    for (int m : {2, 3, 4, 7}) {
        for (double a : {0.0, 0.25, 0.5, 0.9, 1.0}) {
            const GameParams p(m, a, 1 - a);
            for (int t = 0; t < 200; ++t) {
                std::vector<double> v(static_cast<std::size_t>(m));
                for (auto& x : v) x = u(rng);
                const double base = dpp_average(p, v);
                const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
                CHECK(*lo <= base);
                CHECK(base <= *hi);
                if (p.delta() > 0 && *lo < *hi) {
                    CHECK(*lo < base);
                    CHECK(base < *hi);
                }

                auto raised = v;
                raised[static_cast<std::size_t>(t % m)] += bump(rng);
                CHECK(dpp_average(p, raised) >= base);

                const double c = u(rng);
                auto shifted = v;
                for (auto& x : shifted) x += c;
                CHECK(dpp_average(p, shifted) == doctest::Approx(base + c).epsilon(1e-12));

                const double s = bump(rng) * 4;
                auto scaled = v;
                for (auto& x : scaled) x *= s;
                CHECK(dpp_average(p, scaled) == doctest::Approx(s * base).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("residual_at examples") {
    ValueOracle constant = [](const Vertex&) -> std::optional<double> { return 2.0; };
    CHECK(residual_at(constant, Vertex(3, {1, 2}), kHalf).value == 0.0);

    ValueOracle small = [](const Vertex& v) -> std::optional<double> {
        if (v.is_root()) return 0.0;
        if (v.level() == 1) return v.digits()[0] / 3.0;
        return std::nullopt;
    };
    CHECK(residual_at(small, Vertex(3), kHalf).value == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK_THROWS_AS(residual_at(small, Vertex(3, {0}), kHalf), MissingValueError);

    const auto field = build_un(BoundarySpec::quadratic_centered(), GameParams(3, 0.4, 0.6), 5);
    ValueOracle stored = [&](const Vertex& v) -> std::optional<double> {
        if (v.level() > field.n) return std::nullopt;
        return field.value(v.level(), v.index());
    };
    for (int k = 0; k < field.n; ++k) {
        for (auto v : enumerate_level(3, k)) CHECK(std::abs(residual_at(stored, v, field.params).value) <= 1e-12);
    }
}

TEST_CASE("classify examples") {
    ValueOracle zero = [](const Vertex&) -> std::optional<double> { return 0.0; };
    CHECK(classify(zero, Vertex(3), kHalf) == Harmonicity::harmonious);
    // u = level: the successor average is k + 1, one above u, so u lies below its DPP value
    CHECK(residual_at(by_level(+1), Vertex(3, {2}), kHalf).value == doctest::Approx(1.0));
    CHECK(classify(by_level(+1), Vertex(3, {2}), kHalf) == Harmonicity::subharmonious);
    CHECK(residual_at(by_level(-1), Vertex(3, {2}), kHalf).value == doctest::Approx(-1.0));
    CHECK(classify(by_level(-1), Vertex(3, {2}), kHalf) == Harmonicity::superharmonious);
    CHECK(to_string(Harmonicity::superharmonious) == "superharmonious");
}

TEST_CASE("check_field") {
    const GameParams p(3, 0.5, 0.5);
    const auto constant = build_un(BoundarySpec::constant(1.25), p, 3);
    CHECK(check_field(constant, p).max_abs_residual == 0.0);

    auto field = build_un(BoundarySpec::linear(), p, 4);
    const auto clean = check_field(field, p);
    CHECK(clean.max_abs_residual <= 1e-12);
    CHECK(clean.classification == Harmonicity::harmonious);

    const Vertex target(3, {1, 0, 2});
    field.levels[3][target.index()] += 0.1;
    const auto dirty = check_field(field, p);
    const double weight = std::min(p.delta(), p.beta() / 3);
    CHECK(dirty.max_abs_residual >= 0.1 * weight);
    CHECK((dirty.worst_vertex == target || dirty.worst_vertex == target.parent()));
    CHECK(dirty.classification != Harmonicity::harmonious);
}
