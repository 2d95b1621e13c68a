#pragma once

#include <stdexcept>
#include <string>

namespace hodlr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape, level or rank mismatch while building or applying an HMatrix.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized document. `path()` points at the offending element.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Refusal to materialize a matrix larger than the configured dense cap.
class DenseCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A leaf pivot or an (I - Delta) pivot fell below tolerance during setup,
/// i.e. the matrix is not (numerically) hierarchically regular.
///
/// `path()` is the descent string from the root: '0' selects child1, '1'
/// selects child2. The root itself has the empty path.
class HierarchicalSingularity : public Error {
 public:
  explicit HierarchicalSingularity(std::string path)
      : Error("hierarchical singularity at subtree '" +
              (path.empty() ? std::string("<root>") : path) + "'"),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Raised only by the dense reference solver.
class OracleSingularity : public Error {
 public:
  using Error::Error;
};

}  // namespace hodlr
