#pragma once

#include "phtree/analysis.hpp"
#include "phtree/dpp.hpp"
#include "phtree/game.hpp"
#include "phtree/level_field.hpp"
#include "phtree/solver.hpp"
#include "phtree/ucp.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace phtree {

/// 17 significant digits ("%.17g"); non-finite values become "nan", "inf", "-inf".
std::string format_double(double v);

/// Keys sorted, two-space indentation, doubles via format_double (JSON null
/// for non-finite values), trailing newline.
std::string canonical_json(const nlohmann::json& j);

nlohmann::json to_json(const GameParams& p);
nlohmann::json to_json(const DimensionResult& r);
nlohmann::json to_json(const KlOracleResult& r);
nlohmann::json to_json(const McEstimate& r);
nlohmann::json to_json(const UcpReport& r);
nlohmann::json to_json(const FieldCheck& r);
/// Summary of a solve: root value, bound, certification, field check.
nlohmann::json to_json(const SolveResult& r, const std::string& boundary_name);

/// Header "level,index,psi_left,value", one row per stored vertex.
void write_field_csv(const LevelField& field, std::ostream& out);
/// Inverse of write_field_csv. Rows may come in any order but every vertex of
/// levels 0..n must appear exactly once.
LevelField read_field_csv(std::istream& in, const GameParams& params);

/// "m,alpha,beta,gamma,exponent_neg,exponent_pos,objective,dimension"
void write_csv(const DimensionResult& r, std::ostream& out);
/// "m,alpha,beta,plays,mean,std_error,truncation_depth,truncation_error,random_steps,total_steps"
void write_csv(const McEstimate& r, std::ostream& out);
/// "k,rho,eta,rho_restricted,delta_pow_rho", one row per stage.
void write_csv(const UcpReport& r, const GameParams& params, std::ostream& out);

} // namespace phtree
