#pragma once

#include "lapi/mdp.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace lapi {

/// Shortest-safe decimal form: %.17g, which round-trips every double exactly.
std::string format_real(double x);

/// Strict decimal parse of a whole token; throws ParseError(line) on junk.
double parse_real(const std::string& token, std::size_t line);
long long parse_int(const std::string& token, std::size_t line);

/*
 * MDP text format, canonical (lexicographic) order:
 *
 *   mdp <|S|> <|A|> <alpha> <rho>
 *   t <i> <u> <j> <prob>      one line per nonzero P_ij(u)
 *   c <i> <u> <cost>          one line per (i,u)
 *
 * Rows must sum to 1 within 1e-9 and costs must lie in [rho, 1 - rho].
 */
void write_mdp(std::ostream& out, const Mdp& mdp);
Mdp read_mdp(std::istream& in);
void save_mdp(const Mdp& mdp, const std::filesystem::path& path);
Mdp load_mdp(const std::filesystem::path& path);

/*
 * Feature text format:
 *
 *   features <|S|> <d>
 *   f <i> <phi_i1> ... <phi_id>   one line per state, in order
 */
void write_features(std::ostream& out, const Eigen::MatrixXd& phi);
Eigen::MatrixXd read_features(std::istream& in);
void save_features(const Eigen::MatrixXd& phi, const std::filesystem::path& path);
Eigen::MatrixXd load_features(const std::filesystem::path& path);

}  // namespace lapi
