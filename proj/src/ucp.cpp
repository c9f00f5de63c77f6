#include "phtree/ucp.hpp"

#include "phtree/dpp.hpp"
#include "phtree/errors.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace phtree {

struct SubsetSpec::Impl {
    std::function<bool(const Vertex&)> predicate;
    std::set<std::vector<int>> members;
    std::set<std::vector<int>> prefixes;
};

namespace {

using StateKey = SubsetSpec::StateKey;
using Count = std::uint64_t;

constexpr Count kCountMax = std::numeric_limits<Count>::max();

Count sat_add(Count a, Count b) { return a > kCountMax - b ? kCountMax : a + b; }

std::vector<int> as_digits(const StateKey& s) { return {s.begin(), s.end()}; }

void check_digit_param(int m, int d, const char* what) {
    if (d < 0 || d >= m) {
        throw ParameterError(std::string(what) + " digit " + std::to_string(d) + " is outside {0,...," +
                             std::to_string(m - 1) + "}");
    }
}

void check_gaps(const SequencePattern& p, const char* what) {
    for (auto t : p.take(p.prefix_length() + 3 * p.tail().size())) {
        if (t < 1) throw ParseError(std::string(what) + " terms must be >= 1, got " + std::to_string(t));
    }
}

} // namespace

SubsetSpec::SubsetSpec(Kind kind, int m, int depth_bound, std::string name)
    : kind_(kind), m_(m), depth_bound_(depth_bound), name_(std::move(name)) {
    if (m < 2) throw ParameterError("m must be >= 2, got " + std::to_string(m));
    if (depth_bound < 0) throw ParameterError("depth bound must be >= 0, got " + std::to_string(depth_bound));
}

SubsetSpec SubsetSpec::predicate(int m, std::function<bool(const Vertex&)> member, int depth_bound,
                                 std::string name) {
    if (!member) throw ContractViolation("predicate subset needs a membership function");
    SubsetSpec s(Kind::predicate, m, depth_bound, std::move(name));
    auto impl = std::make_shared<Impl>();
    impl->predicate = std::move(member);
    s.impl_ = std::move(impl);
    return s;
}

SubsetSpec SubsetSpec::listed(int m, std::vector<Vertex> members, int depth_bound) {
    SubsetSpec s(Kind::listed, m, depth_bound, "list");
    auto impl = std::make_shared<Impl>();
    for (const auto& v : members) {
        if (v.m() != m) throw ContractViolation("listed vertex " + v.to_string() + " has a different arity");
        std::vector<int> digits(v.digits().begin(), v.digits().end());
        for (std::size_t k = 0; k <= digits.size(); ++k) impl->prefixes.emplace(digits.begin(), digits.begin() + k);
        impl->members.insert(std::move(digits));
    }
    s.impl_ = std::move(impl);
    return s;
}

SubsetSpec SubsetSpec::full_levels(int m, SequencePattern levels, int depth_bound) {
    check_gaps(levels, "full-levels");
    SubsetSpec s(Kind::full_levels, m, depth_bound, "full-levels:" + levels.describe());
    s.pattern_ = std::move(levels);
    return s;
}

SubsetSpec SubsetSpec::last_digit(int m, int d, int depth_bound) {
    check_digit_param(m, d, "last-digit");
    SubsetSpec s(Kind::last_digit, m, depth_bound, "last-digit:" + std::to_string(d));
    s.digit_ = d;
    return s;
}

SubsetSpec SubsetSpec::digit_avoiding(int m, int d, int depth_bound) {
    check_digit_param(m, d, "digit-avoiding");
    SubsetSpec s(Kind::digit_avoiding, m, depth_bound, "digit-avoiding:" + std::to_string(d));
    s.digit_ = d;
    return s;
}

SubsetSpec SubsetSpec::rho_generated(int m, SequencePattern rho, int digit, int depth_bound) {
    check_digit_param(m, digit, "rho");
    check_gaps(rho, "rho");
    if (rho.take(1).empty()) throw ParseError("rho pattern needs at least one term");
    SubsetSpec s(Kind::rho_generated, m, depth_bound, "rho:" + rho.describe());
    s.digit_ = digit;
    s.pattern_ = std::move(rho);
    return s;
}

SubsetSpec SubsetSpec::parse(std::string_view descriptor, int m, int depth_bound, int rho_digit) {
    const auto colon = descriptor.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError("malformed set descriptor \"" + std::string(descriptor) +
                         "\" (expected last-digit:, digit-avoiding:, full-levels: or rho:)");
    }
    const auto head = descriptor.substr(0, colon);
    const auto body = descriptor.substr(colon + 1);
    auto single_digit = [&]() {
        int d = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), d);
        if (body.empty() || ec != std::errc{} || ptr != body.data() + body.size()) {
            throw ParseError("malformed digit in set descriptor \"" + std::string(descriptor) + "\"");
        }
        return d;
    };
    try {
        if (head == "last-digit") return last_digit(m, single_digit(), depth_bound);
        if (head == "digit-avoiding") return digit_avoiding(m, single_digit(), depth_bound);
        if (head == "full-levels") return full_levels(m, SequencePattern::parse(body), depth_bound);
        if (head == "rho") return rho_generated(m, SequencePattern::parse(body), rho_digit, depth_bound);
    } catch (const ParameterError& e) {
        throw ParseError("set descriptor \"" + std::string(descriptor) + "\": " + e.what());
    }
    throw ParseError("unknown set kind \"" + std::string(head) + "\" in descriptor \"" + std::string(descriptor) +
                     "\"");
}

SubsetSpec SubsetSpec::from_list_file(const std::filesystem::path& path, int m, int depth_bound) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open set list file " + path.string());
    std::vector<Vertex> members;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        try {
            members.push_back(Vertex::parse(m, std::string_view(line).substr(first, last - first + 1)));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    auto s = listed(m, std::move(members), depth_bound);
    s.name_ = "list:" + path.filename().string();
    return s;
}

bool SubsetSpec::contains(const Vertex& v) const {
    if (v.m() != m_) throw ContractViolation("vertex arity does not match the subset");
    if (v.level() > depth_bound_) {
        throw InsufficientDepthError("vertex " + v.to_string() + " at level " + std::to_string(v.level()) +
                                     " is deeper than the trusted depth " + std::to_string(depth_bound_));
    }
    auto s = root_state();
    for (int d : v.digits()) s = step(s, d);
    return member(s);
}

StateKey SubsetSpec::root_state() const {
    switch (kind_) {
    case Kind::predicate:
    case Kind::listed:
        return {};
    case Kind::full_levels:
        return {0};
    case Kind::last_digit:
        return {0};
    case Kind::digit_avoiding:
        return {0, 0};
    case Kind::rho_generated:
        // {stage, offset, all digits equal `digit` so far, stage start is a member}
        return {1, 0, 1, 0};
    }
    return {};
}

StateKey SubsetSpec::step(const StateKey& s, int d) const {
    switch (kind_) {
    case Kind::predicate: {
        StateKey out = s;
        out.push_back(d);
        return out;
    }
    case Kind::listed: {
        if (!s.empty() && s.front() < 0) return s;
        StateKey out = s;
        out.push_back(d);
        if (!impl_->prefixes.contains(as_digits(out))) return {-1};
        return out;
    }
    case Kind::full_levels:
        return {s[0] + 1};
    case Kind::last_digit:
        return {d == digit_ ? 1 : 0};
    case Kind::digit_avoiding:
        return {1, (s[1] != 0 || d == digit_) ? 1 : 0};
    case Kind::rho_generated: {
        if (s[0] < 0) return {-1, 0};
        const auto k = s[0];
        const auto i = s[1] + 1;
        const auto run = (s[2] != 0 && d == digit_) ? 1 : 0;
        if (i < *pattern_->term(static_cast<std::size_t>(k))) return {k, i, run, s[3]};
        const std::int64_t hit = (run != 0 && s[3] == 0) ? 1 : 0;
        if (!pattern_->term(static_cast<std::size_t>(k + 1))) return {-1, hit};
        return {k + 1, 0, 1, hit};
    }
    }
    return s;
}

bool SubsetSpec::member(const StateKey& s) const {
    switch (kind_) {
    case Kind::predicate:
        return impl_->predicate(Vertex(m_, as_digits(s)));
    case Kind::listed:
        return (s.empty() || s.front() >= 0) && impl_->members.contains(as_digits(s));
    case Kind::full_levels:
        return s[0] >= 1 && pattern_->contains(s[0]);
    case Kind::last_digit:
        return s[0] == 1;
    case Kind::digit_avoiding:
        return s[0] == 1 && s[1] == 0;
    case Kind::rho_generated:
        return s[0] < 0 ? s[1] == 1 : (s[1] == 0 && s[3] == 1);
    }
    return false;
}

std::string SubsetSpec::describe() const {
    return name_ + " (m=" + std::to_string(m_) + ", trusted to depth " + std::to_string(depth_bound_) + ")";
}

namespace {

struct KeyHash {
    std::size_t operator()(const StateKey& k) const { return boost::hash_range(k.begin(), k.end()); }
};

/// Vertices of one level grouped by automaton state plus an analysis tag.
struct ClassNode {
    StateKey state;
    std::int64_t tag = 0;
    Count count = 0;
    Vertex rep = Vertex(2);
    bool member = false;
    std::vector<std::size_t> children;
};

using Level = std::vector<ClassNode>;
using TagFn = std::function<std::int64_t(const ClassNode& parent, int digit, bool child_member)>;

void check_level_capacity(const SubsetSpec& u, int level, std::size_t classes, std::uint64_t cap) {
    if (u.kind() == SubsetSpec::Kind::predicate) {
        level_size(u.m(), level, cap);
    } else if (classes > cap) {
        throw CapacityError("level " + std::to_string(level) + " has " + std::to_string(classes) +
                            " state classes, above the size cap " + std::to_string(cap));
    }
}

Level root_level(const SubsetSpec& u, std::int64_t tag) {
    ClassNode root;
    root.state = u.root_state();
    root.tag = tag;
    root.count = 1;
    root.rep = Vertex(u.m());
    root.member = u.member(root.state);
    return {std::move(root)};
}

/// Children of every class in `parents`, grouped; fills parents[i].children.
/// Classes appear in order of their smallest representative.
Level advance(const SubsetSpec& u, Level& parents, int child_level, const TagFn& tag, std::uint64_t cap) {
    check_level_capacity(u, child_level, 0, cap);
    Level out;
    std::unordered_map<StateKey, std::vector<std::pair<std::int64_t, std::size_t>>, KeyHash> index;
    for (auto& p : parents) {
        p.children.assign(static_cast<std::size_t>(u.m()), 0);
        for (int d = 0; d < u.m(); ++d) {
            auto state = u.step(p.state, d);
            const bool member = u.member(state);
            const std::int64_t t = tag ? tag(p, d, member) : 0;
            auto& bucket = index[state];
            auto it = std::find_if(bucket.begin(), bucket.end(), [t](const auto& e) { return e.first == t; });
            std::size_t idx;
            if (it == bucket.end()) {
                idx = out.size();
                bucket.emplace_back(t, idx);
                ClassNode node;
                node.state = std::move(state);
                node.tag = t;
                node.rep = p.rep.child(d);
                node.member = member;
                out.push_back(std::move(node));
                check_level_capacity(u, child_level, out.size(), cap);
            } else {
                idx = it->second;
            }
            out[idx].count = sat_add(out[idx].count, p.count);
            p.children[static_cast<std::size_t>(d)] = idx;
        }
    }
    return out;
}

std::vector<Level> explore(const SubsetSpec& u, int depth, const TagFn& tag, std::int64_t root_tag,
                           std::uint64_t cap) {
    std::vector<Level> levels;
    levels.push_back(root_level(u, root_tag));
    for (int L = 1; L <= depth; ++L) levels.push_back(advance(u, levels.back(), L, tag, cap));
    return levels;
}

constexpr std::size_t kClosureLimit = 1 << 14;

struct Closure {
    std::vector<StateKey> states;
    std::vector<std::vector<std::size_t>> next;
};

/// States reachable from `start` (inclusive) when the reachable set is small
/// and finite; nullopt when exploration exceeds kClosureLimit states.
std::optional<Closure> state_closure(const SubsetSpec& u, const StateKey& start) {
    if (u.kind() == SubsetSpec::Kind::predicate) return std::nullopt;
    Closure c;
    std::unordered_map<StateKey, std::size_t, KeyHash> id;
    c.states.push_back(start);
    id.emplace(start, 0);
    for (std::size_t i = 0; i < c.states.size(); ++i) {
        std::vector<std::size_t> succ;
        for (int d = 0; d < u.m(); ++d) {
            auto s = u.step(c.states[i], d);
            auto [it, inserted] = id.emplace(s, c.states.size());
            if (inserted) {
                if (c.states.size() >= kClosureLimit) return std::nullopt;
                c.states.push_back(std::move(s));
            }
            succ.push_back(it->second);
        }
        c.next.push_back(std::move(succ));
    }
    return c;
}

} // namespace

DensityResult density_check(const SubsetSpec& u, int resolution, std::uint64_t cap) {
    if (resolution < 0) throw ContractViolation("density resolution must be >= 0");
    if (resolution > u.depth_bound()) {
        throw InsufficientDepthError("density resolution " + std::to_string(resolution) +
                                     " exceeds the trusted depth " + std::to_string(u.depth_bound()));
    }
    const int depth = u.depth_bound();
    // Tag 1: some member ancestor-or-self x has psi(x) == psi(this vertex),
    // i.e. only zero digits follow x. Tracked down to the resolution level.
    std::vector<Level> levels;
    levels.push_back(root_level(u, 0));
    levels[0][0].tag = levels[0][0].member ? 1 : 0;
    for (int L = 1; L <= depth; ++L) {
        const bool track = L <= resolution;
        TagFn tag = [track](const ClassNode& p, int d, bool member) -> std::int64_t {
            if (!track) return 0;
            return member || (d == 0 && p.tag == 1) ? 1 : 0;
        };
        levels.push_back(advance(u, levels.back(), L, tag, cap));
    }

    // reach[c]: some member at or below the class, within depth.
    std::vector<char> reach(levels[static_cast<std::size_t>(depth)].size());
    for (std::size_t c = 0; c < reach.size(); ++c) reach[c] = levels.back()[c].member;
    for (int L = depth - 1; L >= resolution; --L) {
        const auto& lvl = levels[static_cast<std::size_t>(L)];
        std::vector<char> here(lvl.size());
        for (std::size_t c = 0; c < lvl.size(); ++c) {
            bool r = lvl[c].member;
            for (auto ch : lvl[c].children) r = r || reach[ch];
            here[c] = r;
        }
        reach = std::move(here);
    }

    DensityResult out;
    out.resolution = resolution;
    out.dense_up_to = true;
    const auto& lvl = levels[static_cast<std::size_t>(resolution)];
    for (std::size_t c = 0; c < lvl.size(); ++c) {
        if (reach[c] || lvl[c].tag == 1) continue;
        out.dense_up_to = false;
        out.witness_gap = interval_of(lvl[c].rep);
        if (auto closure = state_closure(u, lvl[c].state)) {
            bool any = false;
            for (std::size_t i = 1; i < closure->states.size(); ++i) any = any || u.member(closure->states[i]);
            // The start state itself may recur below the class.
            for (const auto& succ : closure->next) {
                for (auto j : succ) any = any || (j == 0 && u.member(closure->states[0]));
            }
            out.gap_proven = !any;
        }
        break;
    }
    return out;
}

PaResult pa_check(const SubsetSpec& u, int n_max, std::uint64_t cap) {
    if (n_max < 1) throw ContractViolation("PA needs n_max >= 1");
    const int depth = u.depth_bound();
    if (n_max > depth) {
        throw InsufficientDepthError("PA with n_max " + std::to_string(n_max) + " needs depth beyond the trusted " +
                                     std::to_string(depth));
    }
    PaResult out;
    out.scanned_to = depth - n_max;
    auto levels = explore(u, depth, {}, 0, cap);

    // hit[c]: least offset l >= 1 with a member l levels below (n_max + 1 = none).
    const int none = n_max + 1;
    std::vector<int> hit(levels.back().size(), none);
    int worst = 0;
    std::optional<Vertex> failure;
    for (int L = depth - 1; L >= 0; --L) {
        const auto& lvl = levels[static_cast<std::size_t>(L)];
        const auto& below = levels[static_cast<std::size_t>(L + 1)];
        std::vector<int> here(lvl.size(), none);
        for (std::size_t c = 0; c < lvl.size(); ++c) {
            for (auto ch : lvl[c].children) {
                const int h = below[ch].member ? 1 : std::min(none, hit[ch] + 1);
                here[c] = std::min(here[c], h);
            }
        }
        hit = std::move(here);
        if (L <= out.scanned_to) {
            for (std::size_t c = 0; c < lvl.size(); ++c) {
                if (hit[c] >= worst) {
                    if (hit[c] == none && (hit[c] > worst || !failure || lvl[c].rep < *failure)) {
                        failure = lvl[c].rep;
                    }
                    worst = hit[c];
                }
            }
        }
    }
    if (worst == none) {
        out.failure = failure;
        return out;
    }
    out.holds = true;
    out.n = worst;

    if (auto closure = state_closure(u, u.root_state())) {
        // Bellman-Ford style relaxation of the least hitting offset per state.
        const std::size_t s = closure->states.size();
        std::vector<int> h(s, none);
        for (int round = 0; round < worst; ++round) {
            std::vector<int> next = h;
            for (std::size_t i = 0; i < s; ++i) {
                for (auto j : closure->next[i]) {
                    const int cand = u.member(closure->states[j]) ? 1 : std::min(none, h[j] + 1);
                    next[i] = std::min(next[i], cand);
                }
            }
            h = std::move(next);
        }
        out.proven = std::all_of(h.begin(), h.end(), [&](int v) { return v <= worst; });
    }
    return out;
}

std::string to_string(UcpVerdict v) {
    switch (v) {
    case UcpVerdict::ucp_certified:
        return "UCP-certified";
    case UcpVerdict::no_ucp_certified:
        return "no-UCP-certified";
    case UcpVerdict::inconclusive:
        return "inconclusive-at-depth-D";
    }
    return "?";
}

namespace {

// compute_rho tag bits
constexpr std::int64_t kDead = 1;    // below some member found at an earlier eta level
constexpr std::int64_t kFromNonU = 2; // stage-start ancestor is not in U
constexpr std::int64_t kLive = 4;    // stage-start ancestor lies in A_k

/// Members exactly `offset` levels below one vertex in `state`.
Count members_below(const SubsetSpec& u, const StateKey& state, std::int64_t offset, std::uint64_t cap) {
    std::unordered_map<StateKey, Count, KeyHash> cur{{state, 1}};
    for (std::int64_t l = 0; l < offset; ++l) {
        std::unordered_map<StateKey, Count, KeyHash> next;
        for (const auto& [s, c] : cur) {
            for (int d = 0; d < u.m(); ++d) {
                auto& slot = next[u.step(s, d)];
                slot = sat_add(slot, c);
            }
        }
        if (next.size() > cap) throw CapacityError("member count exceeds the size cap");
        cur = std::move(next);
    }
    Count total = 0;
    for (const auto& [s, c] : cur) {
        if (u.member(s)) total = sat_add(total, c);
    }
    return total;
}

/// Least offset n >= 1, within max_offset, at which some vertex below one of
/// `starts` is a member.
std::optional<std::int64_t> first_member_offset(const SubsetSpec& u, const std::vector<StateKey>& starts,
                                                std::int64_t max_offset, std::uint64_t cap) {
    std::unordered_set<StateKey, KeyHash> cur(starts.begin(), starts.end());
    for (std::int64_t n = 1; n <= max_offset && !cur.empty(); ++n) {
        std::unordered_set<StateKey, KeyHash> next;
        bool hit = false;
        for (const auto& s : cur) {
            for (int d = 0; d < u.m(); ++d) {
                auto c = u.step(s, d);
                hit = hit || u.member(c);
                next.insert(std::move(c));
            }
        }
        if (hit) return n;
        if (next.size() > cap) throw CapacityError("state set exceeds the size cap");
        cur = std::move(next);
    }
    return std::nullopt;
}

} // namespace

UcpReport compute_rho(const SubsetSpec& u, const GameParams& params, int k_max, std::uint64_t cap) {
    if (params.m() != u.m()) throw ContractViolation("game parameters and subset use different m");
    if (k_max < 1) throw ContractViolation("k_max must be >= 1");
    UcpReport report;
    report.depth_bound = u.depth_bound();
    report.p1_ok = true;
    report.p2_ok = true;
    const int depth = u.depth_bound();
    const double delta = params.delta();

    Level level = root_level(u, kFromNonU | kLive);
    int L = 0;
    std::int64_t eta = 0;
    std::vector<StateKey> frontier_live{level[0].state};

    auto note_full = [&](const Level& lvl, int at) {
        if (at == 0) return;
        if (std::all_of(lvl.begin(), lvl.end(), [](const ClassNode& c) { return c.member; })) {
            report.full_levels.push_back(at);
            report.complement_nonempty = false;
        }
    };

    for (int k = 1; k <= k_max; ++k) {
        std::optional<std::int64_t> rho;
        while (L < depth) {
            ++L;
            level = advance(u, level, L, [](const ClassNode& p, int, bool) { return p.tag; }, cap);
            note_full(level, L);
            const bool found = std::any_of(level.begin(), level.end(),
                                           [](const ClassNode& c) { return c.member && (c.tag & kFromNonU); });
            if (found) {
                rho = L - eta;
                break;
            }
        }
        if (!rho) {
            report.depth_exhausted = true;
            break;
        }
        report.rho.push_back(*rho);
        eta += *rho;
        report.eta.push_back(eta);
        report.partial_sum += std::pow(delta, static_cast<double>(*rho));

        if (k == 1) {
            Count members = 0;
            for (const auto& c : level) {
                if (c.member) members = sat_add(members, c.count);
            }
            report.rho_restricted.push_back(*rho);
            if (members != 1) {
                report.p1_ok = false;
                report.structure_failure_stage = report.structure_failure_stage.value_or(1);
            }
        } else {
            const bool live_hit = std::any_of(level.begin(), level.end(),
                                              [](const ClassNode& c) { return c.member && (c.tag & kLive); });
            if (live_hit || frontier_live.empty()) {
                report.rho_restricted.push_back(frontier_live.empty() ? std::nullopt
                                                                      : std::optional<std::int64_t>(*rho));
            } else {
                auto n = first_member_offset(u, frontier_live, depth - (eta - *rho), cap);
                report.rho_restricted.push_back(n);
            }
            for (const auto& s : frontier_live) {
                if (members_below(u, s, *rho, cap) != 1) {
                    report.p2_ok = false;
                    report.structure_failure_stage = report.structure_failure_stage.value_or(k);
                    break;
                }
            }
        }

        // The new stage starts here: members become dead ends for A_{k+1}.
        frontier_live.clear();
        for (auto& c : level) {
            const bool dead = (c.tag & kDead) || c.member;
            std::int64_t tag = dead ? kDead : 0;
            if (!c.member) {
                tag |= kFromNonU;
                if (!dead) tag |= kLive;
            }
            c.tag = tag;
            if (tag & kLive) frontier_live.push_back(c.state);
        }
        // Equal states with different history may now share a tag; regroup.
        Level merged;
        std::unordered_map<StateKey, std::vector<std::pair<std::int64_t, std::size_t>>, KeyHash> index;
        for (auto& c : level) {
            auto& bucket = index[c.state];
            auto it = std::find_if(bucket.begin(), bucket.end(), [&](const auto& e) { return e.first == c.tag; });
            if (it == bucket.end()) {
                bucket.emplace_back(c.tag, merged.size());
                merged.push_back(std::move(c));
            } else {
                merged[it->second].count = sat_add(merged[it->second].count, c.count);
            }
        }
        level = std::move(merged);
        std::sort(frontier_live.begin(), frontier_live.end());
        frontier_live.erase(std::unique(frontier_live.begin(), frontier_live.end()), frontier_live.end());
    }
    // Finish the full-level scan below the last stage.
    while (L < depth) {
        ++L;
        level = advance(u, level, L, [](const ClassNode& p, int, bool) { return p.tag; }, cap);
        note_full(level, L);
    }
    return report;
}

std::vector<double> stage_maxima(const std::vector<std::int64_t>& rho, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("stage maxima need 0 < delta < 1");
    std::vector<double> out;
    double m = 1.0;
    for (auto r : rho) {
        if (r < 1) throw ContractViolation("gap lengths must be >= 1");
        m /= 1.0 - std::pow(delta, static_cast<double>(r));
        out.push_back(m);
    }
    return out;
}

std::vector<double> unboundedness_probe(const UcpReport& report, const GameParams& params, int k) {
    if (k < 0) throw ContractViolation("stage count must be >= 0");
    if (k == 0) return {};
    if (static_cast<std::size_t>(k) > report.rho.size()) {
        throw InsufficientDepthError("only " + std::to_string(report.rho.size()) + " stages were computed, " +
                                     std::to_string(k) + " requested");
    }
    if (!report.p1_ok || (report.structure_failure_stage && *report.structure_failure_stage <= k)) {
        throw UnsupportedError("P1/P2 fail by stage " + std::to_string(report.structure_failure_stage.value_or(1)) +
                               "; the stage lower bounds do not apply");
    }
    return stage_maxima({report.rho.begin(), report.rho.begin() + k}, params.delta());
}

UcpReport analyze_ucp(const SubsetSpec& u, const GameParams& params, const UcpOptions& options) {
    UcpReport report = compute_rho(u, params, options.k_max, options.cap);
    const int depth = u.depth_bound();
    const int n_max = std::min(options.pa_n_max, depth);
    if (n_max >= 1) report.pa_result = pa_check(u, n_max, options.cap);
    const int resolution = options.resolution.value_or(std::max(0, depth - std::max(n_max, 0)));
    report.density_result = density_check(u, resolution, options.cap);

    const auto& pattern = u.pattern();
    if (u.kind() == SubsetSpec::Kind::rho_generated) {
        report.criterion = criterion_verdict(*pattern, params.delta());
    } else if (!report.rho.empty()) {
        report.criterion = criterion_verdict(SequencePattern::finite(report.rho), params.delta());
    }

    const auto& density = *report.density_result;
    if (!density.dense_up_to && density.gap_proven) {
        report.verdict = UcpVerdict::no_ucp_certified;
        report.reason = "psi(U) misses the interval " + density.witness_gap->to_string() + " at every depth";
        return report;
    }
    if (report.pa_result && report.pa_result->holds && report.pa_result->proven) {
        report.verdict = UcpVerdict::ucp_certified;
        report.reason = "PA holds with n = " + std::to_string(*report.pa_result->n) + " for every vertex";
        return report;
    }
    if (u.kind() == SubsetSpec::Kind::full_levels && !pattern->is_finite() &&
        std::any_of(pattern->tail().begin(), pattern->tail().end(),
                    [](const SequenceComponent& c) { return c.unbounded(); })) {
        report.verdict = UcpVerdict::ucp_certified;
        report.reason = "U contains arbitrarily deep full levels; zero values propagate upward from each";
        return report;
    }
    if (u.kind() == SubsetSpec::Kind::rho_generated && report.p1_ok && report.p2_ok && !report.rho.empty() &&
        report.rho == pattern->take(report.rho.size()) && report.criterion && report.criterion->diverges) {
        const bool diverges = *report.criterion->diverges;
        report.verdict = diverges ? UcpVerdict::ucp_certified : UcpVerdict::no_ucp_certified;
        report.reason = std::string("P1 and P2 hold through stage ") + std::to_string(report.rho.size()) +
                        " and the gap pattern " + pattern->describe() + (diverges ? " has" : " does not have") +
                        " a divergent sum of delta^rho_k";
        return report;
    }
    std::ostringstream why;
    why << "no certificate within depth " << depth << ":";
    if (!report.p1_ok || !report.p2_ok) why << " P1/P2 fail;";
    if (report.pa_result && !report.pa_result->holds) why << " PA fails up to n = " << n_max << ";";
    if (report.pa_result && report.pa_result->holds) why << " PA holds on scanned levels only;";
    if (!density.dense_up_to) why << " density gap not proven persistent;";
    if (u.kind() != SubsetSpec::Kind::rho_generated) why << " no gap pattern descriptor;";
    report.reason = why.str();
    return report;
}

CounterexampleField::CounterexampleField(SequencePattern rho, GameParams params, int digit, int depth)
    : rho_(std::move(rho)), params_(params), digit_(digit), depth_(depth) {
    check_digit_param(params_.m(), digit, "counterexample");
    check_gaps(rho_, "rho");
    if (depth < 0) throw ContractViolation("counterexample depth must be >= 0");
    const double delta = params_.delta();
    maxima_.push_back(1.0);
    // Every stage has length >= 1, so stage index <= level + 1.
    for (std::size_t k = 1; k <= static_cast<std::size_t>(depth) + 2; ++k) {
        const auto r = rho_.term(k);
        if (!r) break;
        maxima_.push_back(maxima_.back() / (1.0 - std::pow(delta, static_cast<double>(*r))));
    }
}

std::int64_t CounterexampleField::gap(std::size_t k) const { return rho_.term(k).value_or(-1); }

double CounterexampleField::stage_max(std::size_t k) const {
    if (k < maxima_.size()) return maxima_[k];
    double m = maxima_.back();
    for (std::size_t i = maxima_.size(); i <= k; ++i) {
        const auto r = rho_.term(i);
        if (!r) break;
        m /= 1.0 - std::pow(params_.delta(), static_cast<double>(*r));
    }
    return m;
}

CounterexampleField::State CounterexampleField::root_state() const { return {1, 0, 0}; }

CounterexampleField::State CounterexampleField::step(const State& s, int d) const {
    const auto [k, i, mode] = s;
    if (mode == 2) return {0, 0, 2};
    const auto g = gap(static_cast<std::size_t>(k));
    if (g < 0) return {k, 0, 1}; // past the last stage: constant
    const bool on_path = mode == 0 && d == digit_;
    if (i + 1 < g) return {k, i + 1, on_path ? 0 : 1};
    if (on_path) return {0, 0, 2};
    return {k + 1, 0, 0};
}

double CounterexampleField::value(const State& s) const {
    const auto [k, i, mode] = s;
    if (mode == 2) return 0.0;
    if (mode == 1) return stage_max(static_cast<std::size_t>(k));
    if (i == 0) return stage_max(static_cast<std::size_t>(k - 1));
    const auto g = gap(static_cast<std::size_t>(k));
    return stage_max(static_cast<std::size_t>(k)) * (1.0 - std::pow(params_.delta(), static_cast<double>(g - i)));
}

double CounterexampleField::value(const Vertex& v) const {
    if (v.m() != params_.m()) throw ContractViolation("vertex arity does not match the field");
    auto s = root_state();
    for (int d : v.digits()) s = step(s, d);
    return value(s);
}

CounterexampleField build_counterexample(const SequencePattern& rho, const GameParams& params, int depth,
                                         int digit) {
    const double delta = params.delta();
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("the counterexample needs 0 < delta < 1");
    const auto verdict = criterion_verdict(rho, delta);
    if (verdict.diverges && *verdict.diverges) {
        throw UnsupportedError("gap pattern " + rho.describe() +
                               " has a divergent sum of delta^rho_k; no bounded counterexample exists");
    }
    return CounterexampleField(rho, params, digit, depth);
}

CounterexampleAudit audit_counterexample(const CounterexampleField& field) {
    const int m = field.params().m();
    const auto set = SubsetSpec::rho_generated(m, field.rho(), field.digit(), field.depth());

    struct Node {
        StateKey set_state;
        CounterexampleField::State field_state;
        Count count;
    };
    struct NodeHash {
        std::size_t operator()(const std::pair<StateKey, CounterexampleField::State>& k) const {
            std::size_t h = boost::hash_range(k.first.begin(), k.first.end());
            boost::hash_combine(h, boost::hash_range(k.second.begin(), k.second.end()));
            return h;
        }
    };

    CounterexampleAudit audit;
    audit.depth = field.depth();
    audit.max_value = -std::numeric_limits<double>::infinity();
    audit.min_value = std::numeric_limits<double>::infinity();
    std::vector<Node> level{{set.root_state(), field.root_state(), 1}};
    std::vector<double> succ(static_cast<std::size_t>(m));
    for (int L = 0; L <= field.depth(); ++L) {
        std::unordered_map<std::pair<StateKey, CounterexampleField::State>, std::size_t, NodeHash> index;
        std::vector<Node> next;
        for (const auto& node : level) {
            const double v = field.value(node.field_state);
            audit.vertices = sat_add(audit.vertices, node.count);
            audit.max_value = std::max(audit.max_value, v);
            audit.min_value = std::min(audit.min_value, v);
            if (set.member(node.set_state) && v != 0.0) audit.nonzero_on_u = sat_add(audit.nonzero_on_u, node.count);
            for (int d = 0; d < m; ++d) {
                auto fs = field.step(node.field_state, d);
                succ[static_cast<std::size_t>(d)] = field.value(fs);
                if (L == field.depth()) continue;
                auto ss = set.step(node.set_state, d);
                auto key = std::make_pair(ss, fs);
                auto [it, inserted] = index.emplace(key, next.size());
                if (inserted) next.push_back({std::move(ss), fs, 0});
                next[it->second].count = sat_add(next[it->second].count, node.count);
            }
            audit.max_residual = std::max(audit.max_residual, std::abs(dpp_average(field.params(), succ) - v));
        }
        level = std::move(next);
    }
    return audit;
}

} // namespace phtree
