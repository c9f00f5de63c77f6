#include "phtree/params.hpp"

#include "phtree/errors.hpp"

#include <cmath>
#include <sstream>

namespace phtree {

GameParams::GameParams(int m, double alpha, double beta) : m_(m), alpha_(alpha), beta_(beta) {
    if (m < 2) throw ParameterError("m must be >= 2, got " + std::to_string(m));
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
        throw ParameterError("alpha must lie in [0,1], got " + std::to_string(alpha));
    }
    if (!std::isfinite(beta) || beta < 0.0 || beta > 1.0) {
        throw ParameterError("beta must lie in [0,1], got " + std::to_string(beta));
    }
    if (std::abs(alpha + beta - 1.0) > 1e-12) {
        throw ParameterError("alpha + beta must equal 1 (got alpha=" + std::to_string(alpha) +
                             ", beta=" + std::to_string(beta) + ")");
    }
    const double md = static_cast<double>(m);
    theta_ = alpha / 2.0 + (md - 1.0) * beta / md;
    delta_ = alpha / 2.0 + beta / md;
}

std::string GameParams::to_string() const {
    std::ostringstream os;
    os << "m=" << m_ << " alpha=" << alpha_ << " beta=" << beta_;
    return os.str();
}

} // namespace phtree
