#pragma once

#include <string>

namespace phtree {

/// Game parameters (m, alpha, beta) with alpha + beta = 1.
///
/// theta = alpha/2 + (m-1) beta/m is the weight the averaging operator can put
/// on the largest successor value, delta = 1 - theta = alpha/2 + beta/m the
/// weight left on the smallest one.
class GameParams {
public:
    /// Validates m >= 2, alpha, beta in [0,1] and |alpha + beta - 1| <= 1e-12.
    GameParams(int m, double alpha, double beta);

    /// beta defaults to 1 - alpha.
    static GameParams with_alpha(int m, double alpha) { return GameParams(m, alpha, 1.0 - alpha); }

    int m() const noexcept { return m_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double theta() const noexcept { return theta_; }
    double delta() const noexcept { return delta_; }

    std::string to_string() const;

    friend bool operator==(const GameParams&, const GameParams&) = default;

private:
    int m_;
    double alpha_;
    double beta_;
    double theta_;
    double delta_;
};

} // namespace phtree
