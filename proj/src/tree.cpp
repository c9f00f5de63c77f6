#include "phtree/tree.hpp"

#include "phtree/errors.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace phtree {

std::optional<std::uint64_t> checked_pow(std::uint64_t base, int exponent) {
    std::uint64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && result > UINT64_MAX / base) return std::nullopt;
        result *= base;
    }
    return result;
}

std::uint64_t level_size(int m, int k, std::uint64_t cap) {
    if (m < 2) throw ParameterError("branching factor m must be >= 2, got " + std::to_string(m));
    if (k < 0) throw ContractViolation("level must be >= 0, got " + std::to_string(k));
    auto size = checked_pow(static_cast<std::uint64_t>(m), k);
    if (!size || *size > cap) {
        throw CapacityError("level " + std::to_string(k) + " of the " + std::to_string(m) +
                            "-ary tree exceeds the size cap of " + std::to_string(cap) + " values");
    }
    return *size;
}

namespace {

void check_digit(int m, int d) {
    if (d < 0 || d >= m) {
        throw ContractViolation("digit " + std::to_string(d) + " outside {0,...," + std::to_string(m - 1) + "}");
    }
}

} // namespace

Vertex::Vertex(int m) : m_(m) {
    if (m < 2) throw ParameterError("branching factor m must be >= 2, got " + std::to_string(m));
}

Vertex::Vertex(int m, std::vector<int> digits) : m_(m), digits_(std::move(digits)) {
    if (m < 2) throw ParameterError("branching factor m must be >= 2, got " + std::to_string(m));
    for (int d : digits_) check_digit(m, d);
}

Vertex Vertex::from_index(int m, int level, std::uint64_t index) {
    std::vector<int> digits(static_cast<std::size_t>(level));
    for (int i = level - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(m));
        index /= static_cast<std::uint64_t>(m);
    }
    if (index != 0) throw ContractViolation("index out of range for level " + std::to_string(level));
    return Vertex(m, std::move(digits));
}

Vertex Vertex::parse(int m, std::string_view text) {
    if (text.empty() || text == "root") return Vertex(m);
    std::vector<int> digits;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find('.', pos);
        if (next == std::string_view::npos) next = text.size();
        auto token = text.substr(pos, next - pos);
        int d = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), d);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ParseError("malformed vertex digit string \"" + std::string(text) + "\"");
        }
        if (d < 0 || d >= m) {
            throw ParseError("digit " + std::to_string(d) + " in \"" + std::string(text) + "\" is outside {0,...," +
                             std::to_string(m - 1) + "}");
        }
        digits.push_back(d);
        pos = next + 1;
    }
    return Vertex(m, std::move(digits));
}

Vertex Vertex::child(int digit) const {
    check_digit(m_, digit);
    Vertex out = *this;
    out.digits_.push_back(digit);
    return out;
}

Vertex Vertex::parent() const {
    if (digits_.empty()) throw ContractViolation("the root has no parent");
    Vertex out = *this;
    out.digits_.pop_back();
    return out;
}

Vertex Vertex::ancestor(int level) const {
    if (level < 0 || level > this->level()) {
        throw ContractViolation("ancestor level " + std::to_string(level) + " out of range");
    }
    return Vertex(m_, std::vector<int>(digits_.begin(), digits_.begin() + level));
}

std::vector<Vertex> Vertex::successors() const {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (int d = 0; d < m_; ++d) out.push_back(child(d));
    return out;
}

bool Vertex::is_prefix_of(const Vertex& other) const {
    return m_ == other.m_ && digits_.size() <= other.digits_.size() &&
           std::equal(digits_.begin(), digits_.end(), other.digits_.begin());
}

std::uint64_t Vertex::index() const {
    std::uint64_t idx = 0;
    for (int d : digits_) {
        if (idx > (UINT64_MAX - static_cast<std::uint64_t>(d)) / static_cast<std::uint64_t>(m_)) {
            throw CapacityError("vertex index does not fit in 64 bits at level " + std::to_string(level()));
        }
        idx = idx * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(d);
    }
    return idx;
}

std::string Vertex::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(digits_[i]);
    }
    return out;
}

std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
    if (auto c = a.m_ <=> b.m_; c != 0) return c;
    if (auto c = a.digits_.size() <=> b.digits_.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.digits_.begin(), a.digits_.end(), b.digits_.begin(),
                                                  b.digits_.end());
}

Rational ExactPoint::value() const {
    BigInt denom = boost::multiprecision::pow(BigInt(m), static_cast<unsigned>(level));
    return Rational(numerator, denom);
}

double ExactPoint::to_double() const { return static_cast<double>(value()); }

std::string ExactPoint::to_string() const {
    std::ostringstream os;
    os << value();
    return os.str();
}

bool operator==(const ExactPoint& a, const ExactPoint& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const ExactPoint& a, const ExactPoint& b) {
    if (a.m != b.m) throw ContractViolation("comparing points of trees with different m");
    // a/m^j vs b/m^k  <=>  a*m^k vs b*m^j
    BigInt lhs = a.numerator * boost::multiprecision::pow(BigInt(a.m), static_cast<unsigned>(b.level));
    BigInt rhs = b.numerator * boost::multiprecision::pow(BigInt(b.m), static_cast<unsigned>(a.level));
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

ExactPoint Interval::right() const { return ExactPoint{left.numerator + 1, level, left.m}; }

Rational Interval::width() const {
    return Rational(BigInt(1), boost::multiprecision::pow(BigInt(left.m), static_cast<unsigned>(level)));
}

bool Interval::contains(const Interval& inner) const { return left <= inner.left && inner.right() <= right(); }

std::string Interval::to_string() const { return "[" + left.to_string() + ", " + right().to_string() + "]"; }

ExactPoint psi(const Vertex& v) {
    BigInt num = 0;
    for (int d : v.digits()) num = num * v.m() + d;
    return ExactPoint{std::move(num), v.level(), v.m()};
}

Interval interval_of(const Vertex& v) { return Interval{psi(v), v.level()}; }

Rational tree_distance(int m, std::span<const int> p, std::span<const int> q) {
    const std::size_t common = std::min(p.size(), q.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (p[i] != q[i]) {
            // first difference at K = i + 1  ->  m^{-K+1} = m^{-i}
            return Rational(BigInt(1), boost::multiprecision::pow(BigInt(m), static_cast<unsigned>(i)));
        }
    }
    if (p.size() == q.size()) return Rational(0);
    return Rational(BigInt(1), boost::multiprecision::pow(BigInt(m), static_cast<unsigned>(common)));
}

LevelRange enumerate_level(int m, int k, std::uint64_t cap) { return LevelRange(m, k, level_size(m, k, cap)); }

Vertex reflect(const Vertex& v) {
    std::vector<int> digits(v.digits().begin(), v.digits().end());
    for (int& d : digits) d = v.m() - 1 - d;
    return Vertex(v.m(), std::move(digits));
}

} // namespace phtree
