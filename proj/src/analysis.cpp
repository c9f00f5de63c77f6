#include "phtree/analysis.hpp"

#include "phtree/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

namespace phtree {

DimensionResult fatou_dimension(const GameParams& params) {
    const double m = params.m();
    const double a = params.alpha();
    const double b = params.beta();
    DimensionResult r{params};
    r.exponent_neg = (m * a + 2.0 * (m - 1.0) * b) / (2.0 * m);
    r.exponent_pos = (m * a + 2.0 * b) / (2.0 * m);
    if (a == 0.0) {
        r.gamma = 1.0;
        r.objective = m;
        r.dimension = 1.0;
        return r;
    }
    r.gamma = (m * a + 2.0 * (m - 1.0) * b) / ((m - 1.0) * (m * a + 2.0 * b));
    r.objective = std::pow(r.gamma, -r.exponent_neg) + (m - 1.0) * std::pow(r.gamma, r.exponent_pos);
    r.dimension = std::log(r.objective) / std::log(m);
    return r;
}

double dimension_large_m_limit(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("beta must lie in [0,1], got " + std::to_string(beta));
    return (1.0 + beta) / 2.0;
}

double kl_constraint(const GameParams& params, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(params.m())) throw ContractViolation("constraint needs m coordinates");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    return params.alpha() / 2.0 * (*hi + *lo) + params.beta() / params.m() * sum;
}

namespace {

struct Structured {
    double value;
    double s;
    double t;
};

/// k coordinates at s >= 0 and m-k at t = -a s / b, which satisfies the
/// constraint whenever s >= t.
Structured structured_min(const GameParams& p, int k) {
    const int m = p.m();
    const double a = p.alpha() / 2.0 + k * p.beta() / m;
    const double b = p.alpha() / 2.0 + (m - k) * p.beta() / m;
    auto f = [&](double s) { return k * std::exp(s) + (m - k) * std::exp(-a * s / b); };
    auto slope = [&](double s) { return k * std::exp(s) - (m - k) * (a / b) * std::exp(-a * s / b); };
    double hi = 1.0;
    while (slope(hi) < 0.0 && hi < 1e3) hi *= 2.0;
    const auto [s, v] = boost::math::tools::brent_find_minima(f, 0.0, hi, std::numeric_limits<double>::digits);
    return {v, s, -a * s / b};
}

struct Problem {
    GameParams params;
};

/// Objective after eliminating the constraint: y in R^{m-1} with a trailing 0,
/// shifted by c(y) onto the constraint surface.
double shifted_objective(const Problem& pr, const gsl_vector* v, std::vector<double>& x) {
    const std::size_t n = v->size;
    for (std::size_t i = 0; i < n; ++i) x[i] = gsl_vector_get(v, i);
    x[n] = 0.0;
    const double c = kl_constraint(pr.params, x);
    double sum = 0.0;
    for (double& xi : x) {
        xi -= c;
        sum += std::exp(xi);
    }
    return sum;
}

double gsl_objective(const gsl_vector* v, void* data) {
    const auto* pr = static_cast<const Problem*>(data);
    std::vector<double> x(v->size + 1);
    const double r = shifted_objective(*pr, v, x);
    return std::isfinite(r) ? r : GSL_POSINF;
}

struct LocalResult {
    double value;
    std::vector<double> y;
    bool converged;
};

LocalResult nelder_mead(const Problem& pr, std::vector<double> start, double step, const KlOracleSettings& s) {
    const std::size_t n = start.size();
    gsl_multimin_function fn{&gsl_objective, n, const_cast<Problem*>(&pr)};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), &gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, start[i]);
    gsl_vector_set_all(ss.get(), step);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), ss.get());
    int status = GSL_CONTINUE;
    // Near the minimum the objective is flat to rounding before the simplex
    // reaches the size tolerance; a long run without any decrease counts as
    // converged at float resolution.
    double last_best = solver->fval;
    int stale = 0;
    for (int it = 0; it < s.max_iterations && status == GSL_CONTINUE; ++it) {
        if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), s.simplex_tolerance);
        if (solver->fval < last_best) {
            last_best = solver->fval;
            stale = 0;
        } else if (++stale >= 50 * static_cast<int>(n)) {
            status = GSL_SUCCESS;
        }
    }
    LocalResult r{solver->fval, std::vector<double>(n), status == GSL_SUCCESS};
    for (std::size_t i = 0; i < n; ++i) r.y[i] = gsl_vector_get(solver->x, i);
    return r;
}

} // namespace

KlOracleResult kl_minimization_oracle(const GameParams& params, const KlOracleSettings& settings) {
    const int m = params.m();
    KlOracleResult out;

    out.structured_value = std::numeric_limits<double>::infinity();
    for (int k = 1; k < m; ++k) {
        const auto r = structured_min(params, k);
        if (r.value < out.structured_value) {
            out.structured_value = r.value;
            out.structured_k = k;
            out.structured_argmin.assign(static_cast<std::size_t>(m), r.t);
            std::fill_n(out.structured_argmin.begin(), k, r.s);
        }
    }

    gsl_set_error_handler_off();
    const Problem pr{params};
    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    const std::size_t n = static_cast<std::size_t>(m - 1);
    LocalResult best{std::numeric_limits<double>::infinity(), {}, false};
    bool all_converged = true;
    for (int start = 0; start <= settings.starts; ++start) {
        std::vector<double> y(n, 0.0);
        if (start > 0) {
            for (auto& v : y) v = coord(rng);
        }
        LocalResult local = nelder_mead(pr, y, 1.0, settings);
        // Restart from the last iterate with fresh simplices of a few sizes
        // until a full cycle brings no improvement; the kinks of max/min can
        // stall a single run.
        for (int cycle = 0; cycle < settings.restarts; ++cycle) {
            bool improved = false;
            for (double step : {0.5, 0.05, 0.005}) {
                auto again = nelder_mead(pr, local.y, step, settings);
                local.converged = again.converged;
                if (again.value < local.value - 1e-15 * local.value) {
                    improved = true;
                    local.value = again.value;
                    local.y = again.y;
                }
            }
            if (!improved) break;
        }
        all_converged = all_converged && local.converged;
        if (local.value < best.value) best = local;
    }
    out.unstructured_value = best.value;
    {
        std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> v(gsl_vector_alloc(n), &gsl_vector_free);
        for (std::size_t i = 0; i < n; ++i) gsl_vector_set(v.get(), i, best.y[i]);
        out.unstructured_argmin.assign(static_cast<std::size_t>(m), 0.0);
        shifted_objective(pr, v.get(), out.unstructured_argmin);
    }

    const bool agree = std::abs(out.structured_value - out.unstructured_value) <= 1e-6;
    out.converged = all_converged && agree;
    if (!all_converged) out.note = "a local search stopped before reaching the simplex tolerance";
    if (!agree) out.note += std::string(out.note.empty() ? "" : "; ") + "structured and unstructured minima differ";
    if (out.structured_value <= out.unstructured_value) {
        out.min_value = out.structured_value;
        out.argmin = out.structured_argmin;
    } else {
        out.min_value = out.unstructured_value;
        out.argmin = out.unstructured_argmin;
    }
    return out;
}

} // namespace phtree
