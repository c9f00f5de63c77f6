#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phtree {

/// One arithmetic progression inside an interleaved pattern.
struct SequenceComponent {
    enum class Kind { constant, arithmetic, geometric };

    Kind kind = Kind::constant;
    std::int64_t first = 1;
    /// Common difference (arithmetic) or ratio (geometric); unused for constant.
    std::int64_t step = 0;

    /// j-th term (0-based), saturating at INT64_MAX.
    std::int64_t term(std::uint64_t j) const;
    /// Terms tend to infinity.
    bool unbounded() const;
    std::string describe() const;
};

/// A positive integer sequence: a finite prefix optionally followed by an
/// infinite tail that interleaves p components (tail term j comes from
/// component j mod p, at position j / p).
///
/// Used for gap sequences rho_k and for lists of full levels.
class SequencePattern {
public:
    static SequencePattern finite(std::vector<std::int64_t> terms);
    static SequencePattern interleaved(std::vector<std::int64_t> prefix, std::vector<SequenceComponent> tail);
    /// The cycle repeated forever.
    static SequencePattern periodic(std::vector<std::int64_t> cycle);
    /// Simplest interleaving of constant / arithmetic / geometric components
    /// reproducing `observed`, each component backed by at least three
    /// observations; finite(observed) when nothing fits.
    static SequencePattern infer(std::vector<std::int64_t> observed);
    /// "1,4,1,8,1,16" with optional rule suffix "@auto" (default), "@finite" or "@periodic".
    static SequencePattern parse(std::string_view text);

    bool is_finite() const noexcept { return tail_.empty(); }
    /// Number of explicit terms (the prefix).
    std::size_t prefix_length() const noexcept { return prefix_.size(); }
    const std::vector<SequenceComponent>& tail() const noexcept { return tail_; }

    /// k-th term, 1-based; nullopt past the end of a finite sequence.
    std::optional<std::int64_t> term(std::size_t k) const;
    /// First min(count, length) terms.
    std::vector<std::int64_t> take(std::size_t count) const;

    /// Whether `value` occurs among the terms. Exact for infinite patterns too,
    /// since every unbounded component is strictly increasing.
    bool contains(std::int64_t value) const;

    /// Some finite value occurs infinitely often.
    bool has_recurring_value() const;

    std::string describe() const;

private:
    std::vector<std::int64_t> prefix_;
    std::vector<SequenceComponent> tail_;
};

struct CriterionVerdict {
    /// nullopt when finite data cannot decide the infinite sum.
    std::optional<bool> diverges;
    double partial_sum = 0.0;
    std::size_t terms = 0;
    /// Value of the full series when it converges.
    std::optional<double> limit_sum;
    std::string reason;
};

/// Decides divergence of sum_k delta^{rho_k} from a pattern descriptor.
/// partial_sum covers the first `terms` terms (all of them for finite
/// patterns when `terms` is 0). Requires 0 < delta < 1.
CriterionVerdict criterion_verdict(const SequencePattern& rho, double delta, std::size_t terms = 0);

} // namespace phtree
