#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phtree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Default refusal threshold for m^k sized arrays (values per level).
inline constexpr std::uint64_t kDefaultSizeCap = std::uint64_t{1} << 31;

/// m^k, or nullopt when it overflows 64 bits.
std::optional<std::uint64_t> checked_pow(std::uint64_t base, int exponent);

/// m^k checked against `cap`; throws CapacityError naming the cap.
std::uint64_t level_size(int m, int k, std::uint64_t cap = kDefaultSizeCap);

/// A vertex of the m-ary directed tree: a finite digit sequence over {0..m-1}.
/// The empty sequence is the root.
class Vertex {
public:
    explicit Vertex(int m);
    Vertex(int m, std::vector<int> digits);

    /// The `index`-th vertex of level `level` in lexicographic order.
    static Vertex from_index(int m, int level, std::uint64_t index);
    /// Parses "0.2.1"; the root is "" or "root".
    static Vertex parse(int m, std::string_view text);

    int m() const noexcept { return m_; }
    int level() const noexcept { return static_cast<int>(digits_.size()); }
    bool is_root() const noexcept { return digits_.empty(); }
    std::span<const int> digits() const noexcept { return digits_; }

    Vertex child(int digit) const;
    Vertex parent() const;
    Vertex ancestor(int level) const;
    std::vector<Vertex> successors() const;

    /// True when this vertex is a (not necessarily strict) prefix of `other`.
    bool is_prefix_of(const Vertex& other) const;

    /// Lexicographic offset within its level. Requires m^level < 2^64.
    std::uint64_t index() const;

    std::string to_string() const;

    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b);

private:
    int m_;
    std::vector<int> digits_;
};

/// numerator / m^level, exactly.
struct ExactPoint {
    BigInt numerator;
    int level = 0;
    int m = 2;

    Rational value() const;
    double to_double() const;
    std::string to_string() const;

    friend bool operator==(const ExactPoint& a, const ExactPoint& b);
    friend std::strong_ordering operator<=>(const ExactPoint& a, const ExactPoint& b);
};

/// I_x = [left, left + m^-level].
struct Interval {
    ExactPoint left;
    int level = 0;

    ExactPoint right() const;
    Rational width() const;
    bool contains(const Interval& inner) const;
    std::string to_string() const;
};

ExactPoint psi(const Vertex& v);
Interval interval_of(const Vertex& v);

/// Tree metric on digit sequences: m^{-K+1} if they first differ at 1-based
/// index K, m^{-K} if one is a strict prefix of the other of length K, 0 if equal.
Rational tree_distance(int m, std::span<const int> p, std::span<const int> q);

/// All vertices of level k in lexicographic order, produced lazily.
class LevelRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Vertex;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = Vertex;

        iterator() = default;
        iterator(int m, int level, std::uint64_t index) : m_(m), level_(level), index_(index) {}

        Vertex operator*() const { return Vertex::from_index(m_, level_, index_); }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        iterator operator++(int) {
            auto old = *this;
            ++index_;
            return old;
        }
        friend bool operator==(const iterator& a, const iterator& b) { return a.index_ == b.index_; }

    private:
        int m_ = 2;
        int level_ = 0;
        std::uint64_t index_ = 0;
    };

    LevelRange(int m, int level, std::uint64_t size) : m_(m), level_(level), size_(size) {}

    iterator begin() const { return {m_, level_, 0}; }
    iterator end() const { return {m_, level_, size_}; }
    std::uint64_t size() const noexcept { return size_; }

private:
    int m_;
    int level_;
    std::uint64_t size_;
};

LevelRange enumerate_level(int m, int k, std::uint64_t cap = kDefaultSizeCap);

/// Mirror image under t -> 1 - t: every digit d becomes m-1-d.
Vertex reflect(const Vertex& v);

} // namespace phtree
