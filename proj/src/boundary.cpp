#include "phtree/boundary.hpp"

#include "phtree/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace phtree {

BoundarySpec BoundarySpec::linear() {
    BoundarySpec s;
    s.kind_ = Kind::linear;
    s.name_ = "linear";
    s.lipschitz_ = 1.0;
    s.sup_norm_ = 1.0;
    return s;
}

BoundarySpec BoundarySpec::quadratic_centered() {
    BoundarySpec s;
    s.kind_ = Kind::quadratic_centered;
    s.name_ = "quadratic-centered";
    s.lipschitz_ = 1.0;
    s.sup_norm_ = 0.25;
    return s;
}

BoundarySpec BoundarySpec::constant(double c) {
    if (!std::isfinite(c)) throw ParameterError("constant boundary value must be finite");
    BoundarySpec s;
    s.kind_ = Kind::constant;
    std::ostringstream os;
    os.precision(17);
    os << "constant:" << c;
    s.name_ = os.str();
    s.constant_ = c;
    s.lipschitz_ = 0.0;
    s.sup_norm_ = std::abs(c);
    return s;
}

BoundarySpec BoundarySpec::tabulated(std::vector<TabulatedSample> samples) {
    if (samples.size() < 2) throw ParseError("tabulated boundary needs at least the samples t=0 and t=1");
    if (samples.front().t != 0.0 || samples.back().t != 1.0) {
        throw ParseError("tabulated boundary must start at t=0 and end at t=1");
    }
    double slope = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.value)) throw ParseError("tabulated sample is not finite");
        sup = std::max(sup, std::abs(s.value));
        if (i > 0) {
            const auto& p = samples[i - 1];
            if (!(s.t > p.t)) throw ParseError("tabulated t values must be strictly increasing");
            slope = std::max(slope, std::abs(s.value - p.value) / (s.t - p.t));
        }
    }
    BoundarySpec out;
    out.kind_ = Kind::tabulated;
    out.name_ = "tabulated";
    out.samples_ = std::move(samples);
    out.lipschitz_ = slope;
    out.sup_norm_ = sup;
    return out;
}

BoundarySpec BoundarySpec::custom(std::function<double(double)> fn, std::string name,
                                  std::optional<double> lipschitz, std::optional<double> sup_norm) {
    if (!fn) throw ContractViolation("custom boundary needs a callable");
    BoundarySpec s;
    s.kind_ = Kind::custom;
    s.name_ = std::move(name);
    s.fn_ = std::move(fn);
    s.lipschitz_ = lipschitz;
    s.sup_norm_ = sup_norm;
    return s;
}

BoundarySpec BoundarySpec::parse(std::string_view text) {
    if (text == "linear") return linear();
    if (text == "quadratic-centered") return quadratic_centered();
    constexpr std::string_view prefix = "constant:";
    if (text.substr(0, prefix.size()) == prefix) {
        auto num = text.substr(prefix.size());
        double c = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
        if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size()) {
            throw ParseError("malformed constant in \"" + std::string(text) + "\"");
        }
        return constant(c);
    }
    throw ParseError("unknown boundary name \"" + std::string(text) + "\"");
}

namespace {

std::string trim(std::string s) {
    const char* ws = " \t\r\n\xef\xbb\xbf";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError("boundary CSV line " + std::to_string(line) + ": malformed number \"" + token + "\"");
    }
    return v;
}

} // namespace

BoundarySpec BoundarySpec::from_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<TabulatedSample> samples;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "t,value") {
                throw ParseError("boundary CSV must start with the header \"t,value\", got \"" + line + "\"");
            }
            header_seen = true;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError("boundary CSV line " + std::to_string(line_no) + ": expected two columns");
        }
        samples.push_back({parse_number(trim(line.substr(0, comma)), line_no),
                           parse_number(trim(line.substr(comma + 1)), line_no)});
    }
    if (!header_seen) throw ParseError("boundary CSV is empty");
    return tabulated(std::move(samples));
}

BoundarySpec BoundarySpec::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open boundary file \"" + path + "\"");
    return from_csv(in);
}

double BoundarySpec::operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("boundary evaluated outside [0,1] at t=" + std::to_string(t));
    switch (kind_) {
    case Kind::linear:
        return t;
    case Kind::quadratic_centered:
        return (t - 0.5) * (t - 0.5);
    case Kind::constant:
        return constant_;
    case Kind::tabulated: {
        auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double x, const TabulatedSample& s) { return x < s.t; });
        if (it == samples_.end()) return samples_.back().value;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t - lo.t) / (hi.t - lo.t);
        return lo.value + w * (hi.value - lo.value);
    }
    case Kind::custom:
        return fn_(t);
    }
    return 0.0;
}

double eval_F(const BoundarySpec& spec, double t) { return spec(t); }

SampledBoundary sample_Fn(const BoundarySpec& spec, int m, int n, std::uint64_t cap) {
    const std::uint64_t size = level_size(m, n, cap);
    SampledBoundary out{m, n, std::vector<double>(size)};
    const double denom = static_cast<double>(size);
    const auto count = static_cast<std::int64_t>(size);
    // custom callables are not assumed thread-safe
    const bool parallel = spec.kind() != BoundarySpec::Kind::custom && count > 4096;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t j = 0; j < count; ++j) {
        out.values[static_cast<std::size_t>(j)] = spec(static_cast<double>(j) / denom);
    }
    return out;
}

double modulus_bound(const BoundarySpec& spec, double scale) {
    if (!(scale > 0.0)) throw DomainError("modulus scale must be > 0");
    if (auto L = spec.lipschitz_bound()) return *L * scale;
    if (auto sup = spec.sup_norm()) return 2.0 * *sup;
    throw UnsupportedError("boundary \"" + spec.name() + "\" carries neither a Lipschitz bound nor a sup norm");
}

} // namespace phtree
