#include "phtree/report.hpp"

#include "phtree/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace phtree {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(const nlohmann::json& j, std::ostream& out, int indent) {
    using T = nlohmann::json::value_t;
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case T::object: {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) { // std::map storage: sorted keys
            if (!first) out << ",\n";
            first = false;
            out << pad << nlohmann::json(it.key()).dump() << ": ";
            emit(it.value(), out, indent + 2);
        }
        out << "\n" << close << "}";
        return;
    }
    case T::array: {
        if (j.empty()) {
            out << "[]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out << ",\n";
            out << pad;
            emit(j[i], out, indent + 2);
        }
        out << "\n" << close << "]";
        return;
    }
    case T::number_float: {
        const double v = j.get<double>();
        out << (std::isfinite(v) ? format_double(v) : "null");
        return;
    }
    default:
        out << j.dump();
    }
}

} // namespace

std::string canonical_json(const nlohmann::json& j) {
    std::ostringstream out;
    emit(j, out, 0);
    out << "\n";
    return out.str();
}

nlohmann::json to_json(const GameParams& p) { return {{"m", p.m()}, {"alpha", p.alpha()}, {"beta", p.beta()}}; }

nlohmann::json to_json(const DimensionResult& r) {
    return {{"m", r.params.m()},
            {"alpha", r.params.alpha()},
            {"beta", r.params.beta()},
            {"gamma", r.gamma},
            {"exponent_neg", r.exponent_neg},
            {"exponent_pos", r.exponent_pos},
            {"objective", r.objective},
            {"dimension", r.dimension}};
}

nlohmann::json to_json(const KlOracleResult& r) {
    return {{"min_value", r.min_value},
            {"argmin", r.argmin},
            {"structured_value", r.structured_value},
            {"structured_k", r.structured_k},
            {"unstructured_value", r.unstructured_value},
            {"converged", r.converged},
            {"note", r.note}};
}

nlohmann::json to_json(const McEstimate& r) {
    nlohmann::json j{{"params", to_json(r.params)},
                     {"mean", r.mean},
                     {"std_error", r.std_error},
                     {"plays", r.plays},
                     {"truncation_depth", r.truncation_depth},
                     {"random_steps", r.random_steps},
                     {"total_steps", r.total_steps}};
    j["truncation_error"] = r.truncation_error ? nlohmann::json(*r.truncation_error) : nlohmann::json();
    return j;
}

nlohmann::json to_json(const FieldCheck& r) {
    return {{"max_abs_residual", r.max_abs_residual},
            {"worst_vertex", r.worst_vertex.to_string()},
            {"classification", to_string(r.classification)}};
}

nlohmann::json to_json(const SolveResult& r, const std::string& boundary_name) {
    nlohmann::json j{{"params", to_json(r.field.params)},
                     {"boundary", boundary_name},
                     {"n", r.n_used},
                     {"root_value", r.field.root()},
                     {"certified", r.certified},
                     {"capacity_limited", r.capacity_limited},
                     {"max_principle_violations", count_max_principle_violations(r.field)},
                     {"field_check", to_json(check_field(r.field, r.field.params))},
                     {"levels", r.field.levels}};
    j["error_bound"] = std::isfinite(r.bound) ? nlohmann::json(r.bound) : nlohmann::json();
    return j;
}

nlohmann::json to_json(const UcpReport& r) {
    nlohmann::json restricted = nlohmann::json::array();
    for (const auto& v : r.rho_restricted) restricted.push_back(v ? nlohmann::json(*v) : nlohmann::json());
    nlohmann::json j{{"rho", r.rho},
                     {"eta", r.eta},
                     {"rho_restricted", restricted},
                     {"partial_sum", r.partial_sum},
                     {"p1_ok", r.p1_ok},
                     {"p2_ok", r.p2_ok},
                     {"complement_nonempty", r.complement_nonempty},
                     {"full_levels", r.full_levels},
                     {"depth_exhausted", r.depth_exhausted},
                     {"depth_bound", r.depth_bound},
                     {"verdict", to_string(r.verdict)},
                     {"reason", r.reason}};
    j["structure_failure_stage"] =
        r.structure_failure_stage ? nlohmann::json(*r.structure_failure_stage) : nlohmann::json();
    if (r.pa_result) {
        const auto& pa = *r.pa_result;
        j["pa"] = {{"holds", pa.holds},
                   {"n", pa.n ? nlohmann::json(*pa.n) : nlohmann::json()},
                   {"scanned_to", pa.scanned_to},
                   {"proven", pa.proven},
                   {"failure", pa.failure ? nlohmann::json(pa.failure->to_string()) : nlohmann::json()}};
    }
    if (r.density_result) {
        const auto& d = *r.density_result;
        j["density"] = {{"dense_up_to", d.dense_up_to},
                        {"resolution", d.resolution},
                        {"gap_proven", d.gap_proven},
                        {"witness_gap", d.witness_gap ? nlohmann::json(d.witness_gap->to_string()) : nlohmann::json()}};
    }
    if (r.criterion) {
        const auto& c = *r.criterion;
        j["criterion"] = {{"diverges", c.diverges ? nlohmann::json(*c.diverges) : nlohmann::json()},
                          {"partial_sum", c.partial_sum},
                          {"terms", c.terms},
                          {"limit_sum", c.limit_sum ? nlohmann::json(*c.limit_sum) : nlohmann::json()},
                          {"reason", c.reason}};
    }
    return j;
}

void write_field_csv(const LevelField& field, std::ostream& out) {
    out << "level,index,psi_left,value\n";
    const int m = field.params.m();
    for (std::size_t k = 0; k < field.levels.size(); ++k) {
        const double width = std::pow(static_cast<double>(m), -static_cast<double>(k));
        const auto& lvl = field.levels[k];
        for (std::size_t i = 0; i < lvl.size(); ++i) {
            out << k << ',' << i << ',' << format_double(static_cast<double>(i) * width) << ','
                << format_double(lvl[i]) << '\n';
        }
    }
}

LevelField read_field_csv(std::istream& in, const GameParams& params) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty field CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "level,index,psi_left,value") throw ParseError("field CSV header must be level,index,psi_left,value");
    std::vector<std::vector<double>> levels;
    std::vector<std::vector<char>> seen;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        unsigned long long level = 0, index = 0;
        char psi[64], value[64];
        if (std::sscanf(line.c_str(), "%llu,%llu,%63[^,],%63s", &level, &index, psi, value) != 4) {
            throw ParseError("malformed field CSV row " + std::to_string(row));
        }
        const auto expected = level_size(params.m(), static_cast<int>(level));
        if (index >= expected) throw ParseError("index out of range on field CSV row " + std::to_string(row));
        if (levels.size() <= level) {
            levels.resize(level + 1);
            seen.resize(level + 1);
        }
        if (levels[level].empty()) {
            levels[level].assign(expected, 0.0);
            seen[level].assign(expected, 0);
        }
        if (seen[level][index]) throw ParseError("duplicate vertex on field CSV row " + std::to_string(row));
        seen[level][index] = 1;
        levels[level][index] = std::strtod(value, nullptr);
    }
    if (levels.empty()) throw ParseError("field CSV has no rows");
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (seen[k].empty() || std::count(seen[k].begin(), seen[k].end(), 1) != static_cast<long>(seen[k].size())) {
            throw ParseError("field CSV misses vertices at level " + std::to_string(k));
        }
    }
    LevelField f{params, static_cast<int>(levels.size()) - 1, std::move(levels), {}};
    f.boundary = SampledBoundary{params.m(), f.n, f.levels.back()};
    return f;
}

void write_csv(const DimensionResult& r, std::ostream& out) {
    out << "m,alpha,beta,gamma,exponent_neg,exponent_pos,objective,dimension\n"
        << r.params.m() << ',' << format_double(r.params.alpha()) << ',' << format_double(r.params.beta()) << ','
        << format_double(r.gamma) << ',' << format_double(r.exponent_neg) << ',' << format_double(r.exponent_pos)
        << ',' << format_double(r.objective) << ',' << format_double(r.dimension) << '\n';
}

void write_csv(const McEstimate& r, std::ostream& out) {
    out << "m,alpha,beta,plays,mean,std_error,truncation_depth,truncation_error,random_steps,total_steps\n"
        << r.params.m() << ',' << format_double(r.params.alpha()) << ',' << format_double(r.params.beta()) << ','
        << r.plays << ',' << format_double(r.mean) << ',' << format_double(r.std_error) << ',' << r.truncation_depth
        << ',' << (r.truncation_error ? format_double(*r.truncation_error) : "") << ',' << r.random_steps << ','
        << r.total_steps << '\n';
}

void write_csv(const UcpReport& r, const GameParams& params, std::ostream& out) {
    out << "k,rho,eta,rho_restricted,delta_pow_rho\n";
    for (std::size_t k = 0; k < r.rho.size(); ++k) {
        out << k + 1 << ',' << r.rho[k] << ',' << r.eta[k] << ','
            << (k < r.rho_restricted.size() && r.rho_restricted[k] ? std::to_string(*r.rho_restricted[k]) : "")
            << ',' << format_double(std::pow(params.delta(), static_cast<double>(r.rho[k]))) << '\n';
    }
}

} // namespace phtree
