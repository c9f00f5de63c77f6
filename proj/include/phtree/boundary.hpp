#pragma once

#include "phtree/tree.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phtree {

struct TabulatedSample {
    double t;
    double value;
};

/// Boundary data F : [0,1] -> R together with its continuity metadata.
///
/// Tabulated data is completed by piecewise-linear interpolation, so its
/// Lipschitz constant is the largest slope between consecutive samples.
/// `custom` wraps an arbitrary continuous function; without a Lipschitz bound
/// the error-bound machinery refuses it and the solver falls back to Cauchy
/// stopping.
class BoundarySpec {
public:
    enum class Kind { linear, quadratic_centered, constant, tabulated, custom };

    static BoundarySpec linear();
    static BoundarySpec quadratic_centered();
    static BoundarySpec constant(double c);
    static BoundarySpec tabulated(std::vector<TabulatedSample> samples);
    static BoundarySpec custom(std::function<double(double)> fn, std::string name,
                               std::optional<double> lipschitz = std::nullopt,
                               std::optional<double> sup_norm = std::nullopt);

    /// "linear", "quadratic-centered" or "constant:<c>".
    static BoundarySpec parse(std::string_view text);
    /// CSV with header "t,value".
    static BoundarySpec from_csv(std::istream& in);
    static BoundarySpec from_csv_file(const std::string& path);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    std::optional<double> lipschitz_bound() const noexcept { return lipschitz_; }
    std::optional<double> sup_norm() const noexcept { return sup_norm_; }
    const std::vector<TabulatedSample>& samples() const noexcept { return samples_; }

    /// F(t); throws DomainError outside [0,1].
    double operator()(double t) const;

private:
    BoundarySpec() = default;

    Kind kind_ = Kind::constant;
    std::string name_;
    double constant_ = 0.0;
    std::vector<TabulatedSample> samples_;
    std::function<double(double)> fn_;
    std::optional<double> lipschitz_;
    std::optional<double> sup_norm_;
};

double eval_F(const BoundarySpec& spec, double t);

/// F_n on the m^n left endpoints t_nj = j / m^n.
struct SampledBoundary {
    int m = 2;
    int n = 0;
    std::vector<double> values;
};

SampledBoundary sample_Fn(const BoundarySpec& spec, int m, int n, std::uint64_t cap = kDefaultSizeCap);

/// Upper bound on sup{|F(x) - F(y)| : |x - y| <= scale}: L * scale with a
/// Lipschitz constant, otherwise the oscillation bound 2 sup|F| if known.
double modulus_bound(const BoundarySpec& spec, double scale);

} // namespace phtree
