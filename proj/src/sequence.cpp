#include "phtree/sequence.hpp"

#include "phtree/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace phtree {

namespace {

constexpr std::int64_t kSaturated = std::numeric_limits<std::int64_t>::max();

std::int64_t sat_add(std::int64_t a, std::int64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
    if (a != 0 && b > kSaturated / a) return kSaturated;
    return a * b;
}

} // namespace

std::int64_t SequenceComponent::term(std::uint64_t j) const {
    switch (kind) {
    case Kind::constant:
        return first;
    case Kind::arithmetic: {
        if (j > static_cast<std::uint64_t>(kSaturated)) return kSaturated;
        return sat_add(first, sat_mul(step, static_cast<std::int64_t>(j)));
    }
    case Kind::geometric: {
        std::int64_t v = first;
        for (std::uint64_t i = 0; i < j && v != kSaturated; ++i) v = sat_mul(v, step);
        return v;
    }
    }
    return first;
}

bool SequenceComponent::unbounded() const {
    switch (kind) {
    case Kind::constant:
        return false;
    case Kind::arithmetic:
        return step > 0;
    case Kind::geometric:
        return step > 1;
    }
    return false;
}

std::string SequenceComponent::describe() const {
    switch (kind) {
    case Kind::constant:
        return "const " + std::to_string(first);
    case Kind::arithmetic:
        return "arith " + std::to_string(first) + "+" + std::to_string(step) + "j";
    case Kind::geometric:
        return "geom " + std::to_string(first) + "*" + std::to_string(step) + "^j";
    }
    return {};
}

namespace {

void check_positive(const std::vector<std::int64_t>& terms) {
    for (auto t : terms) {
        if (t < 0) throw ParseError("sequence terms must be non-negative, got " + std::to_string(t));
    }
}

} // namespace

SequencePattern SequencePattern::finite(std::vector<std::int64_t> terms) {
    check_positive(terms);
    SequencePattern p;
    p.prefix_ = std::move(terms);
    return p;
}

SequencePattern SequencePattern::interleaved(std::vector<std::int64_t> prefix, std::vector<SequenceComponent> tail) {
    check_positive(prefix);
    for (const auto& c : tail) {
        if (c.first < 0) throw ParseError("sequence component must start non-negative");
        if (c.kind == SequenceComponent::Kind::arithmetic && c.step < 0) {
            throw ParseError("arithmetic component needs a non-negative difference");
        }
        if (c.kind == SequenceComponent::Kind::geometric && (c.step < 1 || c.first < 1)) {
            throw ParseError("geometric component needs first >= 1 and ratio >= 1");
        }
    }
    SequencePattern p;
    p.prefix_ = std::move(prefix);
    p.tail_ = std::move(tail);
    return p;
}

SequencePattern SequencePattern::periodic(std::vector<std::int64_t> cycle) {
    if (cycle.empty()) throw ParseError("periodic sequence needs a non-empty cycle");
    std::vector<SequenceComponent> tail;
    for (auto v : cycle) tail.push_back({SequenceComponent::Kind::constant, v, 0});
    return interleaved({}, std::move(tail));
}

namespace {

std::optional<SequenceComponent> fit_component(const std::vector<std::int64_t>& obs) {
    using K = SequenceComponent::Kind;
    bool all_equal = true;
    for (auto v : obs) all_equal = all_equal && v == obs.front();
    if (all_equal) return SequenceComponent{K::constant, obs.front(), 0};

    const std::int64_t diff = obs[1] - obs[0];
    bool arithmetic = diff > 0;
    for (std::size_t i = 1; i < obs.size() && arithmetic; ++i) arithmetic = obs[i] - obs[i - 1] == diff;
    if (arithmetic) return SequenceComponent{K::arithmetic, obs.front(), diff};

    if (obs[0] >= 1 && obs[1] % obs[0] == 0) {
        const std::int64_t ratio = obs[1] / obs[0];
        bool geometric = ratio >= 2;
        for (std::size_t i = 1; i < obs.size() && geometric; ++i) geometric = obs[i] == obs[i - 1] * ratio;
        if (geometric) return SequenceComponent{K::geometric, obs.front(), ratio};
    }
    return std::nullopt;
}

} // namespace

SequencePattern SequencePattern::infer(std::vector<std::int64_t> observed) {
    check_positive(observed);
    for (std::size_t p = 1; p * 3 <= observed.size(); ++p) {
        std::vector<SequenceComponent> tail;
        for (std::size_t c = 0; c < p; ++c) {
            std::vector<std::int64_t> obs;
            for (std::size_t i = c; i < observed.size(); i += p) obs.push_back(observed[i]);
            auto fit = fit_component(obs);
            if (!fit) break;
            tail.push_back(*fit);
        }
        if (tail.size() == p) return interleaved({}, std::move(tail));
    }
    return finite(std::move(observed));
}

SequencePattern SequencePattern::parse(std::string_view text) {
    std::string_view rule = "auto";
    if (auto at = text.find('@'); at != std::string_view::npos) {
        rule = text.substr(at + 1);
        text = text.substr(0, at);
    }
    std::vector<std::int64_t> terms;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(',', pos);
        if (next == std::string_view::npos) next = text.size();
        auto token = text.substr(pos, next - pos);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ParseError("malformed integer list \"" + std::string(text) + "\"");
        }
        terms.push_back(v);
        pos = next + 1;
    }
    if (rule == "auto") return infer(std::move(terms));
    if (rule == "finite") return finite(std::move(terms));
    if (rule == "periodic") return periodic(std::move(terms));
    throw ParseError("unknown repetition rule \"@" + std::string(rule) + "\" (expected auto, finite or periodic)");
}

std::optional<std::int64_t> SequencePattern::term(std::size_t k) const {
    if (k == 0) throw ContractViolation("sequence terms are 1-based");
    if (k <= prefix_.size()) return prefix_[k - 1];
    if (tail_.empty()) return std::nullopt;
    const std::size_t j = k - prefix_.size() - 1;
    return tail_[j % tail_.size()].term(j / tail_.size());
}

std::vector<std::int64_t> SequencePattern::take(std::size_t count) const {
    std::vector<std::int64_t> out;
    for (std::size_t k = 1; k <= count; ++k) {
        auto t = term(k);
        if (!t) break;
        out.push_back(*t);
    }
    return out;
}

bool SequencePattern::contains(std::int64_t value) const {
    for (auto t : prefix_) {
        if (t == value) return true;
    }
    for (const auto& c : tail_) {
        switch (c.kind) {
        case SequenceComponent::Kind::constant:
            if (c.first == value) return true;
            break;
        case SequenceComponent::Kind::arithmetic:
            if (c.step == 0 ? value == c.first : value >= c.first && (value - c.first) % c.step == 0) return true;
            break;
        case SequenceComponent::Kind::geometric:
            for (std::uint64_t j = 0;; ++j) {
                const auto t = c.term(j);
                if (t == value) return true;
                if (t > value || c.step == 1) break;
            }
            break;
        }
    }
    return false;
}

bool SequencePattern::has_recurring_value() const {
    for (const auto& c : tail_) {
        if (!c.unbounded()) return true;
    }
    return false;
}

std::string SequencePattern::describe() const {
    std::ostringstream os;
    if (!prefix_.empty()) {
        os << "[";
        for (std::size_t i = 0; i < prefix_.size(); ++i) os << (i ? "," : "") << prefix_[i];
        os << "]";
        if (tail_.empty()) {
            os << " (finite)";
            return os.str();
        }
        os << " then ";
    }
    os << "interleave(";
    for (std::size_t i = 0; i < tail_.size(); ++i) os << (i ? "; " : "") << tail_[i].describe();
    os << ")";
    return os.str();
}

namespace {

/// sum_{j>=0} delta^{c.term(j)} for an unbounded component.
double component_series(const SequenceComponent& c, double delta) {
    if (c.kind == SequenceComponent::Kind::arithmetic) {
        return std::pow(delta, static_cast<double>(c.first)) / (1.0 - std::pow(delta, static_cast<double>(c.step)));
    }
    double sum = 0.0;
    for (std::uint64_t j = 0;; ++j) {
        const auto t = c.term(j);
        const double term = std::pow(delta, static_cast<double>(t));
        if (term == 0.0 || t == kSaturated) break;
        sum += term;
    }
    return sum;
}

} // namespace

CriterionVerdict criterion_verdict(const SequencePattern& rho, double delta, std::size_t terms) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ParameterError("the summability criterion needs 0 < delta < 1, got " + std::to_string(delta));
    }
    CriterionVerdict out;
    if (terms == 0) terms = rho.is_finite() ? rho.prefix_length() : rho.prefix_length() + 4 * rho.tail().size();
    const auto values = rho.take(terms);
    out.terms = values.size();
    for (auto r : values) out.partial_sum += std::pow(delta, static_cast<double>(r));

    if (rho.is_finite()) {
        out.reason = "finite list: the tail of the series is undetermined";
        return out;
    }
    if (rho.has_recurring_value()) {
        out.diverges = true;
        out.reason = "a finite gap value recurs infinitely often, so delta^rho_k does not tend to 0";
        return out;
    }
    double limit = 0.0;
    for (std::size_t k = 1; k <= rho.prefix_length(); ++k) limit += std::pow(delta, static_cast<double>(*rho.term(k)));
    for (const auto& c : rho.tail()) limit += component_series(c, delta);
    out.diverges = false;
    out.limit_sum = limit;
    out.reason = "every tail component grows at least linearly, so the series is dominated by a geometric one";
    return out;
}

} // namespace phtree
