#include "phtree/cli.hpp"

#include "phtree/analysis.hpp"
#include "phtree/boundary.hpp"
#include "phtree/errors.hpp"
#include "phtree/game.hpp"
#include "phtree/report.hpp"
#include "phtree/solver.hpp"
#include "phtree/ucp.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace phtree {

namespace {

/// Validation failure attributed to one command-line field.
class FieldError : public std::runtime_error {
public:
    FieldError(const std::string& field, const std::string& what)
        : std::runtime_error("invalid " + field + ": " + what) {}
};

template <class F>
auto for_field(const std::string& field, F&& make) -> decltype(make()) {
    try {
        return make();
    } catch (const CapacityError&) {
        throw;
    } catch (const Error& e) {
        throw FieldError(field, e.what());
    }
}

struct Common {
    int m = 3;
    double alpha = 0.0;
    std::optional<double> beta;
    std::string format = "json";
    std::string output;

    GameParams params() const {
        if (m < 2) throw FieldError("--m", "m must be >= 2, got " + std::to_string(m));
        return for_field("--alpha/--beta", [&] { return GameParams(m, alpha, beta.value_or(1.0 - alpha)); });
    }
};

void add_common(CLI::App* cmd, Common& c, bool with_csv = true) {
    cmd->add_option("--m", c.m, "Branching factor (>= 2)")->required();
    cmd->add_option("--alpha", c.alpha, "Weight of the tug-of-war moves")->required();
    cmd->add_option("--beta", c.beta, "Weight of the random move (default 1 - alpha)");
    auto* fmt = cmd->add_option("--format", c.format, "Report format");
    fmt->check(CLI::IsMember(with_csv ? std::vector<std::string>{"json", "csv"} : std::vector<std::string>{"json"}));
    cmd->add_option("--output", c.output, "Write the report here instead of stdout");
}

std::uint64_t size_cap_from_env() {
    const char* env = std::getenv("PHTREE_SIZE_CAP");
    if (!env || !*env) return kDefaultSizeCap;
    std::uint64_t cap = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec != std::errc{} || ptr != text.data() + text.size() || cap == 0) {
        throw FieldError("PHTREE_SIZE_CAP", "expected a positive integer, got \"" + std::string(text) + "\"");
    }
    return cap;
}

BoundarySpec load_boundary(const std::string& name, const std::string& file) {
    if (!file.empty()) return for_field("--boundary-file", [&] { return BoundarySpec::from_csv_file(file); });
    return for_field("--boundary", [&] { return BoundarySpec::parse(name); });
}

void emit(const Common& c, const std::string& body, std::ostream& out) {
    if (c.output.empty()) {
        out << body;
        return;
    }
    std::ofstream file(c.output, std::ios::binary);
    if (!file) throw std::ios_base::failure("cannot open " + c.output + " for writing");
    file << body;
    if (!file.flush()) throw std::ios_base::failure("write to " + c.output + " failed");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dirichlet problems for p-harmonious functions on m-ary trees", "phtree"};
    app.require_subcommand(1);

    Common solve_c;
    std::string solve_boundary = "linear";
    std::string solve_boundary_file;
    std::optional<int> solve_n;
    std::optional<double> solve_tol;
    auto* solve = app.add_subcommand("solve", "Build u_n bottom-up from the boundary samples");
    add_common(solve, solve_c);
    solve->add_option("--boundary", solve_boundary, "linear | quadratic-centered | constant:<c>");
    solve->add_option("--boundary-file", solve_boundary_file, "Tabulated boundary CSV (t,value)");
    auto* n_opt = solve->add_option("--n", solve_n, "Depth of the approximation");
    solve->add_option("--tol", solve_tol, "Pick the depth meeting this error bound")->excludes(n_opt);

    Common sim_c;
    std::string sim_boundary = "linear";
    std::string sim_boundary_file;
    std::uint64_t plays = 10000;
    std::uint64_t seed = 1;
    int depth = 20;
    int advice_n = 8;
    std::string player_one = "greedy-max";
    std::string player_two = "greedy-min";
    std::string start = "root";
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the game value");
    add_common(simulate, sim_c);
    simulate->add_option("--boundary", sim_boundary, "linear | quadratic-centered | constant:<c>");
    simulate->add_option("--boundary-file", sim_boundary_file, "Tabulated boundary CSV (t,value)");
    simulate->add_option("--plays", plays, "Number of plays");
    simulate->add_option("--seed", seed, "Master seed");
    simulate->add_option("--depth", depth, "Truncation depth N");
    simulate->add_option("--advice-n", advice_n, "Depth of the u_n advising greedy strategies");
    simulate->add_option("--player-one", player_one, "greedy-max | greedy-min | fixed:<d> | uniform:<seed>");
    simulate->add_option("--player-two", player_two, "greedy-max | greedy-min | fixed:<d> | uniform:<seed>");
    simulate->add_option("--start", start, "Starting vertex, e.g. 0.2.1 (default root)");

    Common ucp_c;
    std::string set_descriptor;
    std::string set_file;
    int ucp_depth = 32;
    int k_max = 8;
    int pa_n_max = 4;
    std::optional<int> resolution;
    int rho_digit = 0;
    auto* ucp = app.add_subcommand("ucp", "Unique continuation analysis of a subset U");
    add_common(ucp, ucp_c);
    auto* set_opt = ucp->add_option("--set", set_descriptor,
                                    "last-digit:<d> | digit-avoiding:<d> | full-levels:<list>[@rule] | "
                                    "rho:<list>[@rule]");
    ucp->add_option("--set-file", set_file, "Membership list, one digit string per line")->excludes(set_opt);
    ucp->add_option("--depth", ucp_depth, "Trusted depth D of the set");
    ucp->add_option("--kmax", k_max, "Number of rho stages");
    ucp->add_option("--pa-nmax", pa_n_max, "Largest n tried for PA");
    ucp->add_option("--resolution", resolution, "Density resolution level (default D - pa-nmax)");
    ucp->add_option("--rho-digit", rho_digit, "Distinguished digit of rho sets");

    Common dim_c;
    bool with_oracle = false;
    auto* dim = app.add_subcommand("dim", "Minimal Fatou-set dimension");
    add_common(dim, dim_c);
    dim->add_flag("--oracle", with_oracle, "Also run the numerical minimization oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        const std::uint64_t cap = size_cap_from_env();
        std::ostringstream body;

        if (solve->parsed()) {
            const auto params = solve_c.params();
            const auto spec = load_boundary(solve_boundary, solve_boundary_file);
            const SolveResult result = [&] {
                if (solve_tol) {
                    if (!(*solve_tol > 0.0)) throw FieldError("--tol", "tolerance must be positive");
                    return solve_to_tolerance(spec, params, *solve_tol, cap);
                }
                const int n = solve_n.value_or(8);
                if (n < 1) throw FieldError("--n", "depth must be >= 1, got " + std::to_string(n));
                SolveResult r{build_un(spec, params, n, cap), n, std::numeric_limits<double>::infinity(), false, false};
                if (spec.lipschitz_bound()) {
                    r.bound = error_bound(spec, params, n);
                    r.certified = true;
                }
                return r;
            }();
            if (solve_c.format == "csv") {
                write_field_csv(result.field, body);
            } else {
                body << canonical_json(to_json(result, spec.name()));
            }
            emit(solve_c, body.str(), out);
        } else if (simulate->parsed()) {
            const auto params = sim_c.params();
            const auto spec = load_boundary(sim_boundary, sim_boundary_file);
            if (depth < 1) throw FieldError("--depth", "truncation depth must be >= 1");
            if (plays < 2) throw FieldError("--plays", "need at least 2 plays for a standard error");
            const auto x0 = for_field("--start", [&] { return Vertex::parse(params.m(), start); });
            std::shared_ptr<const LevelField> advice;
            auto needs_advice = [](const std::string& s) { return s.rfind("greedy", 0) == 0; };
            if (needs_advice(player_one) || needs_advice(player_two)) {
                if (advice_n < 1) throw FieldError("--advice-n", "depth must be >= 1");
                advice = std::make_shared<LevelField>(build_un(spec, params, advice_n, cap));
            }
            const auto s1 = for_field("--player-one", [&] { return Strategy::parse(player_one, advice); });
            const auto s2 = for_field("--player-two", [&] { return Strategy::parse(player_two, advice); });
            const auto est = estimate_value(x0, s1, s2, spec, params, depth, plays, seed);
            if (sim_c.format == "csv") {
                write_csv(est, body);
            } else {
                auto j = to_json(est);
                j["boundary"] = spec.name();
                j["seed"] = seed;
                j["start"] = x0.to_string();
                j["player_one"] = s1.name();
                j["player_two"] = s2.name();
                if (advice) {
                    j["advice_n"] = advice_n;
                    j["advice_value"] = evaluate(*advice, x0);
                }
                body << canonical_json(j);
            }
            emit(sim_c, body.str(), out);
        } else if (ucp->parsed()) {
            const auto params = ucp_c.params();
            if (set_descriptor.empty() && set_file.empty()) throw FieldError("--set", "a set descriptor or --set-file is required");
            if (ucp_depth < 0) throw FieldError("--depth", "depth must be >= 0");
            if (k_max < 1) throw FieldError("--kmax", "need at least one stage");
            if (pa_n_max < 1) throw FieldError("--pa-nmax", "need n >= 1");
            const auto set = set_file.empty()
                                 ? for_field("--set", [&] {
                                       return SubsetSpec::parse(set_descriptor, params.m(), ucp_depth, rho_digit);
                                   })
                                 : for_field("--set-file", [&] {
                                       return SubsetSpec::from_list_file(set_file, params.m(), ucp_depth);
                                   });
            UcpOptions options;
            options.k_max = k_max;
            options.pa_n_max = pa_n_max;
            options.resolution = resolution;
            options.cap = cap;
            if (resolution && (*resolution < 0 || *resolution > ucp_depth)) {
                throw FieldError("--resolution", "must lie in [0, depth]");
            }
            const auto report = analyze_ucp(set, params, options);
            if (ucp_c.format == "csv") {
                write_csv(report, params, body);
            } else {
                auto j = to_json(report);
                j["set"] = set.describe();
                j["params"] = to_json(params);
                j["stage_maxima"] = stage_maxima(report.rho, params.delta());
                body << canonical_json(j);
            }
            emit(ucp_c, body.str(), out);
        } else if (dim->parsed()) {
            const auto params = dim_c.params();
            const auto result = fatou_dimension(params);
            if (dim_c.format == "csv") {
                write_csv(result, body);
            } else {
                auto j = to_json(result);
                j["large_m_limit"] = dimension_large_m_limit(params.beta());
                if (with_oracle) j["oracle"] = to_json(kl_minimization_oracle(params));
                body << canonical_json(j);
            }
            emit(dim_c, body.str(), out);
        }
        return kExitOk;
    } catch (const FieldError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << " (raise PHTREE_SIZE_CAP to allow it)\n";
        return kExitCapacity;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace phtree
