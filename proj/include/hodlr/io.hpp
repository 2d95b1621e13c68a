#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "hodlr/hmatrix.hpp"

namespace hodlr {

/// JSON document {"n0": int, "rank": int, "root": NODE} where NODE is
/// {"leaf": [[row], ...]} or
/// {"node": {"a1": [[col], ...], "b1": ..., "a2": ..., "b2": ...,
///           "child1": NODE, "child2": NODE}}.
/// Factor matrices are stored as k columns of n_{l-1} numbers. Scalars are
/// written in shortest round-trip form, so a reload is bit-identical.
std::string serialize(const HMatrix<double>& A);

/// Throws ParseError whose path() names the offending element, e.g.
/// "/root/node/child2/node/a1/0".
HMatrix<double> deserialize(std::string_view text);

HMatrix<double> load_hmatrix(const std::string& path);
void save_hmatrix(const HMatrix<double>& A, const std::string& path);

/// One decimal number per line. Blank lines are ignored; anything else that
/// does not parse fully as a number is a ParseError naming the line.
VectorXd read_vector(std::istream& in);
VectorXd load_vector(const std::string& path);
/// Newline-terminated, shortest round-trip decimal per entry.
void write_vector(std::ostream& out, const VectorXd& v);

}  // namespace hodlr
