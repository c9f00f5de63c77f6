#pragma once

#include "phtree/params.hpp"
#include "phtree/sequence.hpp"
#include "phtree/tree.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phtree {

/// A subset U of T_m, trusted up to level depth_bound().
///
/// Membership is driven by a deterministic automaton over digits: every
/// vertex maps to a state key, and two vertices with equal keys have
/// identical subtrees as far as membership goes. The analyzers group
/// vertices by key, so structured sets never need m^k enumeration.
class SubsetSpec {
public:
    using StateKey = std::vector<std::int64_t>;

    enum class Kind { predicate, listed, full_levels, last_digit, digit_avoiding, rho_generated };

    /// Arbitrary pure membership oracle. The state is the digit string itself.
    static SubsetSpec predicate(int m, std::function<bool(const Vertex&)> member, int depth_bound,
                                std::string name = "predicate");
    /// Finite explicit list of vertices.
    static SubsetSpec listed(int m, std::vector<Vertex> members, int depth_bound);
    /// Union of the full levels T^L for L in `levels` (terms must be >= 1).
    static SubsetSpec full_levels(int m, SequencePattern levels, int depth_bound);
    /// Non-root vertices whose last digit is d.
    static SubsetSpec last_digit(int m, int d, int depth_bound);
    /// Non-root vertices none of whose digits is d.
    static SubsetSpec digit_avoiding(int m, int d, int depth_bound);
    /// Staged construction from a gap sequence: below every non-member
    /// vertex at level eta_{k-1}, the all-`digit` path of length rho_k ends in
    /// a member. Nothing else is a member.
    static SubsetSpec rho_generated(int m, SequencePattern rho, int digit, int depth_bound);

    /// "last-digit:0", "digit-avoiding:1", "full-levels:2,4,8[@rule]" or
    /// "rho:1,4,1,8[@rule]". Throws ParseError naming the descriptor.
    static SubsetSpec parse(std::string_view descriptor, int m, int depth_bound, int rho_digit = 0);
    /// One digit string per line ("0.2.1"); blank lines and '#' comments skipped.
    static SubsetSpec from_list_file(const std::filesystem::path& path, int m, int depth_bound);

    Kind kind() const noexcept { return kind_; }
    int m() const noexcept { return m_; }
    int depth_bound() const noexcept { return depth_bound_; }
    const std::string& name() const noexcept { return name_; }
    /// Sequence carried by full-levels and rho-generated sets.
    const std::optional<SequencePattern>& pattern() const noexcept { return pattern_; }
    /// Distinguished digit of last-digit, digit-avoiding and rho-generated sets.
    int digit() const noexcept { return digit_; }

    /// Throws InsufficientDepthError above depth_bound().
    bool contains(const Vertex& v) const;

    StateKey root_state() const;
    StateKey step(const StateKey& state, int digit) const;
    bool member(const StateKey& state) const;

    std::string describe() const;

private:
    struct Impl;
    SubsetSpec(Kind kind, int m, int depth_bound, std::string name);

    Kind kind_;
    int m_;
    int depth_bound_;
    std::string name_;
    int digit_ = 0;
    std::optional<SequencePattern> pattern_;
    std::shared_ptr<const Impl> impl_;
};

struct DensityResult {
    bool dense_up_to = false;
    int resolution = 0;
    /// Level-`resolution` interval whose half-open part [left, right) holds no psi(x), x in U.
    std::optional<Interval> witness_gap;
    /// The gap persists at every depth, not only up to depth_bound().
    bool gap_proven = false;
};

/// Every level-d interval I_y contains psi(x) in its half-open part for some
/// member x with level <= D.
DensityResult density_check(const SubsetSpec& u, int resolution, std::uint64_t cap = kDefaultSizeCap);

struct PaResult {
    bool holds = false;
    /// Least uniform n (all scanned vertices hit U within n levels).
    std::optional<int> n;
    /// Levels 0..scanned_to were checked.
    int scanned_to = 0;
    /// With `holds`: the witness n is valid for every vertex of the tree.
    bool proven = false;
    /// Without `holds`: a scanned vertex with no member 1..n_max levels below.
    std::optional<Vertex> failure;
};

/// Property PA with offsets 1..n, over all vertices of levels 0..D - n_max.
PaResult pa_check(const SubsetSpec& u, int n_max, std::uint64_t cap = kDefaultSizeCap);

enum class UcpVerdict { ucp_certified, no_ucp_certified, inconclusive };

std::string to_string(UcpVerdict v);

struct UcpReport {
    std::vector<std::int64_t> rho;
    std::vector<std::int64_t> eta;
    /// Gaps recomputed with y restricted to A_k (rho_k for k = 1 is shared).
    std::vector<std::optional<std::int64_t>> rho_restricted;
    double partial_sum = 0.0;
    bool p1_ok = false;
    bool p2_ok = false;
    /// First stage at which P1 (k = 1) or P2 failed.
    std::optional<int> structure_failure_stage;
    /// Every level up to D keeps a non-member vertex.
    bool complement_nonempty = true;
    /// Levels (<= D) entirely contained in U.
    std::vector<int> full_levels;
    /// Stage search ran past depth_bound() before K_max stages were found.
    bool depth_exhausted = false;

    std::optional<PaResult> pa_result;
    std::optional<DensityResult> density_result;
    std::optional<CriterionVerdict> criterion;
    UcpVerdict verdict = UcpVerdict::inconclusive;
    int depth_bound = 0;
    std::string reason;
};

/// Structural part: rho_k, eta_k, P1, P2, full levels. Stops after k_max
/// stages or at depth_bound().
UcpReport compute_rho(const SubsetSpec& u, const GameParams& params, int k_max,
                      std::uint64_t cap = kDefaultSizeCap);

struct UcpOptions {
    int k_max = 8;
    /// Largest uniform n tried by the PA check.
    int pa_n_max = 4;
    /// Density resolution; defaults to depth_bound() - pa_n_max.
    std::optional<int> resolution;
    std::uint64_t cap = kDefaultSizeCap;
};

/// Full analysis with a three-valued verdict.
UcpReport analyze_ucp(const SubsetSpec& u, const GameParams& params, const UcpOptions& options = {});

/// M_k = prod_{i<=k} 1/(1 - delta^{rho_i}) for k = 1..rho.size().
std::vector<double> stage_maxima(const std::vector<std::int64_t>& rho, double delta);

/// Lower bounds M_1..M_K that any non-zero bounded p-harmonious function
/// vanishing on U would have to exceed. Refuses when P1/P2 were not
/// verified through stage K.
std::vector<double> unboundedness_probe(const UcpReport& report, const GameParams& params, int k);

/// Lazily evaluated bounded p-harmonious function vanishing on the
/// rho-generated set with the same gaps and distinguished digit.
class CounterexampleField {
public:
    CounterexampleField(SequencePattern rho, GameParams params, int digit, int depth);

    const GameParams& params() const noexcept { return params_; }
    int depth() const noexcept { return depth_; }
    int digit() const noexcept { return digit_; }
    const SequencePattern& rho() const noexcept { return rho_; }

    /// M_k for k >= 0 (M_0 = 1). Constant beyond the last stage of a finite pattern.
    double stage_max(std::size_t k) const;
    /// Value at any vertex (not limited to depth()).
    double value(const Vertex& v) const;

    /// Field state of a vertex: {stage, offset, mode} with mode 0 = path,
    /// 1 = off-path constant, 2 = zero.
    using State = std::array<std::int64_t, 3>;
    State root_state() const;
    State step(const State& s, int digit) const;
    double value(const State& s) const;

private:
    std::int64_t gap(std::size_t k) const;

    SequencePattern rho_;
    GameParams params_;
    int digit_;
    int depth_;
    std::vector<double> maxima_;
};

/// Build the counterexample for a gap pattern. Refuses patterns whose
/// series diverges (no bounded counterexample exists) and delta outside (0,1).
CounterexampleField build_counterexample(const SequencePattern& rho, const GameParams& params, int depth,
                                         int digit = 0);

struct CounterexampleAudit {
    double max_residual = 0.0;
    double max_value = 0.0;
    double min_value = 0.0;
    /// Members of the matching rho-generated set with a non-zero value.
    std::uint64_t nonzero_on_u = 0;
    std::uint64_t vertices = 0;
    int depth = 0;
};

/// DPP residual, U-vanishing and extrema over every vertex of levels
/// 0..field.depth(). Children of the deepest level are evaluated lazily.
CounterexampleAudit audit_counterexample(const CounterexampleField& field);

} // namespace phtree
