#include "phtree/dpp.hpp"
#include "phtree/errors.hpp"
#include "phtree/ucp.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

using namespace phtree;

namespace {

using Digits = std::vector<int>;

/// Members of the staged set built straight from its definition, levels <= depth.
std::set<Digits> staged_members(int m, const std::vector<std::int64_t>& rho, int digit, int depth) {
    std::set<Digits> members;
    std::vector<Digits> level{{}}; // all vertices of the current stage-start level
    int eta = 0;
    for (auto r : rho) {
        if (eta + r > depth) break;
        for (const auto& y : level) {
            if (members.contains(y)) continue;
            Digits x = y;
            x.insert(x.end(), static_cast<std::size_t>(r), digit);
            members.insert(x);
        }
        for (std::int64_t i = 0; i < r; ++i) {
            std::vector<Digits> next;
            for (const auto& v : level) {
                for (int d = 0; d < m; ++d) {
                    next.push_back(v);
                    next.back().push_back(d);
                }
            }
            level = std::move(next);
        }
        eta += static_cast<int>(r);
    }
    return members;
}

std::vector<Digits> all_vertices(int m, int level) {
    std::vector<Digits> out{{}};
    for (int l = 0; l < level; ++l) {
        std::vector<Digits> next;
        for (const auto& v : out) {
            for (int d = 0; d < m; ++d) {
                next.push_back(v);
                next.back().push_back(d);
            }
        }
        out = std::move(next);
    }
    return out;
}

bool is_prefix(const Digits& p, const Digits& x) {
    return p.size() <= x.size() && std::equal(p.begin(), p.end(), x.begin());
}

/// rho_k read off the definition by brute force over explicit vertices.
std::vector<std::int64_t> brute_rho(const SubsetSpec& u, int k_max) {
    const int m = u.m();
    const int depth = u.depth_bound();
    auto in_u = [&](const Digits& d) { return u.contains(Vertex(m, d)); };
    std::vector<std::int64_t> rho;
    int eta = 0;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<Digits> ys;
        for (const auto& y : all_vertices(m, eta)) {
            if (k == 1 || !in_u(y)) ys.push_back(y);
        }
        std::optional<int> found;
        for (int n = 1; eta + n <= depth && !found; ++n) {
            for (const auto& x : all_vertices(m, eta + n)) {
                if (!in_u(x)) continue;
                for (const auto& y : ys) {
                    if (is_prefix(y, x)) found = n;
                }
                if (found) break;
            }
        }
        if (!found) break;
        rho.push_back(*found);
        eta += *found;
    }
    return rho;
}

SubsetSpec as_predicate(const SubsetSpec& u) {
    return SubsetSpec::predicate(
        u.m(), [u](const Vertex& v) { return u.contains(v); }, u.depth_bound());
}

GameParams half3() { return GameParams(3, 0.5, 0.5); }

} // namespace

TEST_CASE("rho-generated membership matches the staged definition") {
    for (auto rho : {std::vector<std::int64_t>{1, 2, 1, 3}, std::vector<std::int64_t>{2, 1, 1, 2, 1}}) {
        const int depth = 7;
        auto u = SubsetSpec::rho_generated(3, SequencePattern::finite(rho), 0, depth);
        auto oracle = staged_members(3, rho, 0, depth);
        for (int level = 0; level <= depth; ++level) {
            for (const auto& v : all_vertices(3, level)) {
                CHECK_MESSAGE(u.contains(Vertex(3, v)) == oracle.contains(v), Vertex(3, v).to_string());
            }
        }
    }
}

TEST_CASE("descriptor parsing") {
    CHECK(SubsetSpec::parse("last-digit:0", 3, 5).kind() == SubsetSpec::Kind::last_digit);
    CHECK(SubsetSpec::parse("digit-avoiding:1", 3, 5).contains(Vertex::parse(3, "0.2")));
    CHECK_FALSE(SubsetSpec::parse("digit-avoiding:1", 3, 5).contains(Vertex::parse(3, "0.1")));
    CHECK(SubsetSpec::parse("full-levels:2,4,8,16", 3, 20).contains(Vertex::parse(3, "1.1.1.1")));
    CHECK_THROWS_AS(SubsetSpec::parse("last-digit:7", 3, 5), ParseError);
    CHECK_THROWS_AS(SubsetSpec::parse("nonsense:1", 3, 5), ParseError);
    CHECK_THROWS_AS(SubsetSpec::parse("rho:1,0,1", 3, 5), ParseError);
    CHECK_THROWS_AS(SubsetSpec::parse("last-digit", 3, 5), ParseError);
    CHECK_THROWS_AS(SubsetSpec::parse("last-digit:0", 3, 5).contains(Vertex::parse(3, "0.0.0.0.0.0")),
                    InsufficientDepthError);
}

TEST_CASE("list file subsets") {
    const char* path = "test_ucp_members.txt";
    {
        std::ofstream out(path);
        out << "# members\n0.2.1\n\n  1  \n";
    }
    auto u = SubsetSpec::from_list_file(path, 3, 4);
    CHECK(u.contains(Vertex::parse(3, "0.2.1")));
    CHECK(u.contains(Vertex::parse(3, "1")));
    CHECK_FALSE(u.contains(Vertex::parse(3, "0.2")));
    CHECK_FALSE(u.contains(Vertex::parse(3, "2.2.2")));
    {
        std::ofstream out(path);
        out << "0.5\n";
    }
    CHECK_THROWS_AS(SubsetSpec::from_list_file(path, 3, 4), ParseError);
    std::remove(path);
}

TEST_CASE("density: digit-avoiding set has a gap over the middle third") {
    auto u = SubsetSpec::digit_avoiding(3, 1, 8);
    auto r = density_check(u, 1);
    CHECK_FALSE(r.dense_up_to);
    REQUIRE(r.witness_gap.has_value());
    CHECK(r.witness_gap->left.value() == Rational(1, 3));
    CHECK(r.witness_gap->right().value() == Rational(2, 3));
    CHECK(r.gap_proven);
}

TEST_CASE("density: last-digit set and the full tree are dense") {
    auto u = SubsetSpec::last_digit(3, 0, 7);
    for (int d = 0; d <= 6; ++d) CHECK(density_check(u, d).dense_up_to);
    auto all = SubsetSpec::predicate(3, [](const Vertex&) { return true; }, 5);
    for (int d = 0; d <= 5; ++d) CHECK(density_check(all, d).dense_up_to);
    CHECK_THROWS_AS(density_check(u, 8), InsufficientDepthError);
}

TEST_CASE("density agrees with a brute-force interval scan") {
    const int m = 3;
    const int depth = 5;
    std::vector<SubsetSpec> specs{SubsetSpec::digit_avoiding(m, 1, depth), SubsetSpec::last_digit(m, 2, depth),
                                  SubsetSpec::rho_generated(m, SequencePattern::parse("2,1,2@finite"), 1, depth),
                                  SubsetSpec::listed(m, {Vertex::parse(m, "0.0"), Vertex::parse(m, "2.1.1")}, depth)};
    for (const auto& u : specs) {
        std::vector<ExactPoint> points;
        for (int level = 0; level <= depth; ++level) {
            for (const auto& x : all_vertices(m, level)) {
                if (u.contains(Vertex(m, x))) points.push_back(psi(Vertex(m, x)));
            }
        }
        for (int d = 0; d <= depth; ++d) {
            bool dense = true;
            for (const auto& y : all_vertices(m, d)) {
                auto I = interval_of(Vertex(m, y));
                bool hit = false;
                for (const auto& p : points) hit = hit || (I.left.value() <= p.value() && p.value() < I.right().value());
                dense = dense && hit;
            }
            CHECK_MESSAGE(density_check(u, d).dense_up_to == dense, u.name() << " d=" << d);
            CHECK(density_check(as_predicate(u), d).dense_up_to == dense);
        }
    }
}

TEST_CASE("PA: last-digit set holds with n = 1 for every vertex") {
    auto r = pa_check(SubsetSpec::last_digit(3, 0, 6), 3);
    CHECK(r.holds);
    REQUIRE(r.n.has_value());
    CHECK(*r.n == 1);
    CHECK(r.proven);
}

TEST_CASE("PA: digit-avoiding set fails for every n") {
    auto u = SubsetSpec::digit_avoiding(3, 1, 10);
    for (int n = 1; n <= 6; ++n) {
        auto r = pa_check(u, n);
        CHECK_FALSE(r.holds);
        REQUIRE(r.failure.has_value());
        CHECK(*r.failure == Vertex::parse(3, "1"));
    }
}

TEST_CASE("PA: growing full-level gaps defeat small n") {
    auto u = SubsetSpec::full_levels(3, SequencePattern::parse("2,4,8@finite"), 12);
    CHECK_FALSE(pa_check(u, 3).holds);
    CHECK_FALSE(pa_check(u, 4).holds);
}

TEST_CASE("PA agrees with brute force") {
    const int m = 2;
    const int depth = 7;
    std::vector<SubsetSpec> specs{SubsetSpec::last_digit(m, 1, depth),
                                  SubsetSpec::full_levels(m, SequencePattern::parse("1,3,5,7"), depth),
                                  SubsetSpec::rho_generated(m, SequencePattern::parse("1,2@periodic"), 0, depth)};
    for (const auto& u : specs) {
        for (int n_max = 1; n_max <= 3; ++n_max) {
            int worst = 0;
            for (int level = 0; level <= depth - n_max; ++level) {
                for (const auto& x : all_vertices(m, level)) {
                    int best = n_max + 1;
                    for (int l = n_max; l >= 1; --l) {
                        for (const auto& tail : all_vertices(m, l)) {
                            Digits y = x;
                            y.insert(y.end(), tail.begin(), tail.end());
                            if (u.contains(Vertex(m, y))) best = std::min(best, l);
                        }
                    }
                    worst = std::max(worst, best);
                }
            }
            auto r = pa_check(u, n_max);
            CHECK_MESSAGE(r.holds == (worst <= n_max), u.name() << " n_max=" << n_max);
            if (r.holds) CHECK(*r.n == worst);
        }
    }
}

TEST_CASE("PA implies density at the scanned resolution") {
    const int depth = 9;
    std::vector<SubsetSpec> specs{SubsetSpec::last_digit(3, 0, depth), SubsetSpec::last_digit(4, 3, depth),
                                  SubsetSpec::full_levels(3, SequencePattern::parse("1,2,3,4@periodic"), depth),
                                  SubsetSpec::rho_generated(3, SequencePattern::parse("1,2,1,2@periodic"), 2, depth),
                                  SubsetSpec::digit_avoiding(3, 1, depth)};
    for (const auto& u : specs) {
        for (int n = 1; n <= 3; ++n) {
            auto pa = pa_check(u, n);
            if (pa.holds) CHECK_MESSAGE(density_check(u, depth - n).dense_up_to, u.name());
        }
    }
}

TEST_CASE("compute_rho recovers the staged gaps") {
    auto u = SubsetSpec::rho_generated(3, SequencePattern::parse("1,4,1,8,1,16"), 0, 31);
    auto r = compute_rho(u, half3(), 6);
    CHECK(r.rho == std::vector<std::int64_t>{1, 4, 1, 8, 1, 16});
    CHECK(r.eta == std::vector<std::int64_t>{1, 5, 6, 14, 15, 31});
    CHECK(r.p1_ok);
    CHECK(r.p2_ok);
    CHECK(r.complement_nonempty);
}

TEST_CASE("compute_rho round trip over several gap lists") {
    for (auto text : {"1,1,1,1@finite", "3,1,2@finite", "2,5,1@finite", "1,2,3,4@finite", "4,1,1,3@finite"}) {
        auto pattern = SequencePattern::parse(text);
        auto rho = pattern.take(10);
        int depth = 0;
        for (auto r : rho) depth += static_cast<int>(r);
        for (int m : {2, 3, 5}) {
            for (int digit : {0, m - 1}) {
                auto u = SubsetSpec::rho_generated(m, pattern, digit, depth);
                auto r = compute_rho(u, GameParams::with_alpha(m, 0.3), static_cast<int>(rho.size()));
                CHECK_MESSAGE(r.rho == rho, text << " m=" << m);
                CHECK(r.p1_ok);
                CHECK(r.p2_ok);
            }
        }
    }
}

TEST_CASE("compute_rho matches the brute-force definition") {
    const int m = 3;
    const int depth = 6;
    std::vector<SubsetSpec> specs{
        SubsetSpec::listed(m, {Vertex::parse(m, "0.1"), Vertex::parse(m, "2.2.2"), Vertex::parse(m, "1.0.0.0")},
                           depth),
        SubsetSpec::full_levels(m, SequencePattern::parse("2,5@finite"), depth),
        SubsetSpec::last_digit(m, 1, depth),
        SubsetSpec::rho_generated(m, SequencePattern::parse("2,1,3@finite"), 1, depth)};
    for (const auto& u : specs) {
        auto expected = brute_rho(u, 4);
        CHECK_MESSAGE(compute_rho(u, half3(), 4).rho == expected, u.name());
        CHECK(compute_rho(as_predicate(u), half3(), 4).rho == expected);
    }
}

TEST_CASE("compute_rho: single member and full levels") {
    auto single = SubsetSpec::listed(3, {Vertex::parse(3, "0")}, 4);
    auto r = compute_rho(single, half3(), 1);
    CHECK(r.rho == std::vector<std::int64_t>{1});
    CHECK(r.p1_ok);

    auto full = SubsetSpec::full_levels(3, SequencePattern::parse("2@finite"), 4);
    auto f = compute_rho(full, half3(), 1);
    CHECK(f.rho == std::vector<std::int64_t>{2});
    CHECK_FALSE(f.p1_ok);
    CHECK(f.full_levels == std::vector<int>{2});
    CHECK_FALSE(f.complement_nonempty);
}

TEST_CASE("compute_rho flags P2 violations and reports A_k-restricted gaps") {
    // Two members below the non-member (1) at offset 1: P2 fails at stage 2.
    auto u = SubsetSpec::listed(3, {Vertex::parse(3, "0"), Vertex::parse(3, "1.0"), Vertex::parse(3, "1.2")}, 4);
    auto r = compute_rho(u, half3(), 2);
    CHECK(r.rho == std::vector<std::int64_t>{1, 1});
    CHECK(r.p1_ok);
    CHECK_FALSE(r.p2_ok);
    CHECK(r.structure_failure_stage == 2);

    // At stage 3 the earliest member sits below (0.0), which lies under the
    // stage-1 member; restricted to A_3 the gap is longer.
    auto v = SubsetSpec::listed(3,
                                {Vertex::parse(3, "0"), Vertex::parse(3, "1.0"), Vertex::parse(3, "2.0"),
                                 Vertex::parse(3, "0.0.0"), Vertex::parse(3, "1.1.2.2")},
                                5);
    auto s = compute_rho(v, half3(), 3);
    CHECK(s.rho == std::vector<std::int64_t>{1, 1, 1});
    REQUIRE(s.rho_restricted.size() == 3);
    CHECK(s.rho_restricted[2] == 2);
}

TEST_CASE("verdicts") {
    auto p = half3();
    auto ex4 = analyze_ucp(SubsetSpec::parse("rho:1,4,1,8,1,16", 3, 32), p, {.k_max = 6});
    CHECK(ex4.verdict == UcpVerdict::ucp_certified);

    auto cantor = analyze_ucp(SubsetSpec::digit_avoiding(3, 1, 8), p);
    CHECK(cantor.verdict == UcpVerdict::no_ucp_certified);

    auto last = analyze_ucp(SubsetSpec::last_digit(3, 0, 8), p);
    CHECK(last.verdict == UcpVerdict::ucp_certified);

    auto full = analyze_ucp(SubsetSpec::parse("full-levels:2,4,8,16", 3, 17), p);
    CHECK(full.verdict == UcpVerdict::ucp_certified);
    CHECK_FALSE(full.p1_ok);

    auto linear = analyze_ucp(SubsetSpec::parse("rho:1,2,3,4,5", 3, 15), p, {.k_max = 5});
    CHECK(linear.verdict == UcpVerdict::no_ucp_certified);

    // Finitely many stages: psi(U) is a finite set, so a gap persists forever.
    auto finite = analyze_ucp(SubsetSpec::parse("rho:2,2,2@finite", 3, 10), p, {.k_max = 3});
    CHECK(finite.verdict == UcpVerdict::no_ucp_certified);

    // An opaque oracle gives no certificate, whatever its scanned behaviour.
    auto opaque = SubsetSpec::predicate(
        3, [](const Vertex& v) { return !v.is_root() && v.digits().back() == 0; }, 8);
    auto r = analyze_ucp(opaque, p);
    CHECK(r.pa_result->holds);
    CHECK(r.verdict == UcpVerdict::inconclusive);
}

TEST_CASE("full-level shortcut") {
    // The shortcut rests on the DPP of all-zero successors being zero.
    for (int m = 2; m <= 6; ++m) {
        for (double a : {0.0, 0.3, 1.0}) {
            std::vector<double> zeros(static_cast<std::size_t>(m), 0.0);
            CHECK(dpp_average(GameParams::with_alpha(m, a), zeros) == 0.0);
        }
    }
    auto p = half3();
    for (auto text : {"full-levels:2,4,8,16", "full-levels:3,6,9", "full-levels:1,5,2,10,3,15"}) {
        CHECK_MESSAGE(analyze_ucp(SubsetSpec::parse(text, 3, 12), p).verdict == UcpVerdict::ucp_certified, text);
    }
    // A bounded set of full levels leaves the deep tree unconstrained.
    CHECK(analyze_ucp(SubsetSpec::parse("full-levels:2,3@periodic", 3, 12), p).verdict != UcpVerdict::ucp_certified);
}

TEST_CASE("stage maxima and the unboundedness probe") {
    const double delta = 5.0 / 12.0;
    auto ones = stage_maxima({1, 1, 1}, delta);
    REQUIRE(ones.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(ones[static_cast<std::size_t>(k)] == doctest::Approx(std::pow(12.0 / 7.0, k + 1)).epsilon(1e-14));
    auto two = stage_maxima({1, 4}, delta);
    CHECK(two[1] == doctest::Approx(1.0 / (1 - delta) / (1 - std::pow(delta, 4))).epsilon(1e-14));

    auto p = half3();
    auto report = compute_rho(SubsetSpec::parse("rho:1@periodic", 3, 6), p, 3);
    auto probe = unboundedness_probe(report, p, 3);
    REQUIRE(probe.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(probe[k] == doctest::Approx(ones[k]).epsilon(1e-14));
    CHECK(unboundedness_probe(report, p, 0).empty());
    auto bad = compute_rho(SubsetSpec::full_levels(3, SequencePattern::parse("2@finite"), 4), p, 1);
    CHECK_THROWS_AS(unboundedness_probe(bad, p, 1), UnsupportedError);
}

TEST_CASE("counterexample closed form matches the proof's recurrences") {
    // Recurrence along a stage path: c_rho = 0, c_i = theta + delta c_{i+1},
    // normalized so the stage start equals the previous maximum.
    for (auto params : {half3(), GameParams(2, 0.9, 0.1), GameParams(5, 0.2, 0.8)}) {
        const double theta = params.theta();
        const double delta = params.delta();
        for (int rho : {1, 2, 3, 7}) {
            std::vector<double> c(static_cast<std::size_t>(rho) + 1, 0.0);
            for (int i = rho - 1; i >= 0; --i) c[static_cast<std::size_t>(i)] = theta + delta * c[static_cast<std::size_t>(i) + 1];
            const double prev = 1.7;
            const double M = prev / c[0];
            CHECK(M == doctest::Approx(prev / (1 - std::pow(delta, rho))).epsilon(1e-13));
            for (int i = 0; i <= rho; ++i) {
                CHECK(M * c[static_cast<std::size_t>(i)] ==
                      doctest::Approx(M * (1 - std::pow(delta, rho - i))).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("counterexample: first stage of length one") {
    auto p = half3();
    auto f = build_counterexample(SequencePattern::parse("1@finite"), p, 3);
    CHECK(f.stage_max(1) == doctest::Approx(12.0 / 7.0).epsilon(1e-15));
    CHECK(f.value(Vertex(3)) == 1.0);
    CHECK(f.value(Vertex::parse(3, "0")) == 0.0);
    CHECK(f.value(Vertex::parse(3, "1")) == doctest::Approx(12.0 / 7.0));
    CHECK(p.theta() * f.stage_max(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("counterexample vanishes on U and satisfies the DPP everywhere") {
    // Explicit enumeration oracle with the DPP written out independently.
    for (auto params : {half3(), GameParams(2, 1.0, 0.0), GameParams(4, 0.1, 0.9)}) {
        const int m = params.m();
        const int depth = m == 4 ? 6 : 9;
        for (auto text : {"1,2,3,4,5", "2,1,3@finite", "1,3,9,27"}) {
            auto pattern = SequencePattern::parse(text);
            auto f = build_counterexample(pattern, params, depth, m - 1);
            auto u = SubsetSpec::rho_generated(m, pattern, m - 1, depth);
            double worst = 0.0;
            for (int level = 0; level <= depth; ++level) {
                for (const auto& x : all_vertices(m, level)) {
                    Vertex v(m, x);
                    const double value = f.value(v);
                    if (u.contains(v)) CHECK(value == 0.0);
                    double mx = -1e300, mn = 1e300, sum = 0.0;
                    for (int d = 0; d < m; ++d) {
                        const double c = f.value(v.child(d));
                        mx = std::max(mx, c);
                        mn = std::min(mn, c);
                        sum += c;
                    }
                    const double dpp = params.alpha() / 2 * (mx + mn) + params.beta() / m * sum;
                    worst = std::max(worst, std::abs(dpp - value));
                }
            }
            CHECK_MESSAGE(worst < 1e-12, text);
            auto audit = audit_counterexample(f);
            CHECK(audit.nonzero_on_u == 0);
            CHECK(audit.max_residual < 1e-12);
        }
    }
}

TEST_CASE("counterexample for linear gaps: audit to depth 21 and product oracle") {
    auto p = half3();
    auto f = build_counterexample(SequencePattern::parse("1,2,3,4,5,6"), p, 21);
    auto audit = audit_counterexample(f);
    CHECK(audit.max_residual <= 1e-10);
    CHECK(audit.nonzero_on_u == 0);
    double product = 1.0;
    double previous = 1.0;
    for (int k = 1; k <= 6; ++k) {
        product *= 1.0 / (1.0 - std::pow(5.0 / 12.0, k));
        CHECK(std::abs(f.stage_max(static_cast<std::size_t>(k)) - product) <= 1e-12);
        CHECK(product > previous);
        previous = product;
    }
    CHECK(audit.max_value <= product + 1e-9);
    CHECK(audit.min_value == 0.0);
}

TEST_CASE("counterexample refuses divergent gap patterns") {
    CHECK_THROWS_AS(build_counterexample(SequencePattern::parse("1,4,1,8,1,16"), half3(), 10), UnsupportedError);
}

TEST_CASE("theta and delta identities") {
    for (int m = 2; m <= 12; ++m) {
        for (int i = 0; i <= 20; ++i) {
            auto p = GameParams::with_alpha(m, i / 20.0);
            CHECK(std::abs(p.theta() + p.delta() - 1.0) <= 1e-14);
            CHECK(std::abs(p.delta() - (p.alpha() / 2 + p.beta() / m)) <= 1e-14);
        }
    }
}
