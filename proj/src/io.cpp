#include "hodlr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace hodlr {

namespace {

using nlohmann::json;

json columns_to_json(const MatrixXd& f) {
  json cols = json::array();
  for (Index j = 0; j < f.cols(); ++j) {
    json col = json::array();
    for (Index i = 0; i < f.rows(); ++i) col.push_back(f(i, j));
    cols.push_back(std::move(col));
  }
  return cols;
}

json node_to_json(const HMatrix<double>& A) {
  if (A.is_leaf()) {
    const auto& B = A.as_leaf().block;
    json rows = json::array();
    for (Index i = 0; i < B.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < B.cols(); ++j) row.push_back(B(i, j));
      rows.push_back(std::move(row));
    }
    return json{{"leaf", std::move(rows)}};
  }
  const auto& n = A.as_node();
  return json{{"node",
               {{"a1", columns_to_json(n.a1)},
                {"b1", columns_to_json(n.b1)},
                {"a2", columns_to_json(n.a2)},
                {"b2", columns_to_json(n.b2)},
                {"child1", node_to_json(*n.child1)},
                {"child2", node_to_json(*n.child2)}}}};
}

struct Reader {
  Index n0;
  Index rank;

  const json& member(const json& obj, const char* key,
                     const std::string& path) const {
    if (!obj.is_object())
      throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
      throw ParseError(path, std::string("missing member \"") + key + "\"");
    return *it;
  }

  static double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(path, "non-finite value");
    return d;
  }

  MatrixXd columns(const json& v, Index rows, const std::string& path) const {
    if (!v.is_array()) throw ParseError(path, "expected an array of columns");
    if (static_cast<Index>(v.size()) != rank)
      throw ParseError(path, "expected " + std::to_string(rank) +
                                 " columns, got " + std::to_string(v.size()));
    MatrixXd out(rows, rank);
    for (Index j = 0; j < rank; ++j) {
      const std::string cpath = path + "/" + std::to_string(j);
      const json& col = v[static_cast<std::size_t>(j)];
      if (!col.is_array()) throw ParseError(cpath, "expected an array");
      if (static_cast<Index>(col.size()) != rows)
        throw ParseError(cpath, "expected " + std::to_string(rows) +
                                    " entries, got " +
                                    std::to_string(col.size()));
      for (Index i = 0; i < rows; ++i)
        out(i, j) = number(col[static_cast<std::size_t>(i)],
                           cpath + "/" + std::to_string(i));
    }
    return out;
  }

  HMatrix<double> node(const json& v, const std::string& path) const {
    if (!v.is_object() || v.size() != 1)
      throw ParseError(path, "expected exactly one of \"leaf\" or \"node\"");
    if (v.contains("leaf")) {
      const std::string lpath = path + "/leaf";
      const json& rows = v["leaf"];
      if (!rows.is_array() || static_cast<Index>(rows.size()) != n0)
        throw ParseError(lpath, "expected " + std::to_string(n0) + " rows");
      MatrixXd block(n0, n0);
      for (Index i = 0; i < n0; ++i) {
        const std::string rpath = lpath + "/" + std::to_string(i);
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n0)
          throw ParseError(rpath, "expected " + std::to_string(n0) + " entries");
        for (Index j = 0; j < n0; ++j)
          block(i, j) = number(row[static_cast<std::size_t>(j)],
                               rpath + "/" + std::to_string(j));
      }
      return HMatrix<double>::leaf(std::move(block));
    }
    if (!v.contains("node"))
      throw ParseError(path, "expected \"leaf\" or \"node\"");
    const std::string npath = path + "/node";
    const json& body = v["node"];
    auto c1 = node(member(body, "child1", npath), npath + "/child1");
    auto c2 = node(member(body, "child2", npath), npath + "/child2");
    if (c1.level() != c2.level())
      throw ParseError(npath, "children have different levels");
    const Index m = c1.dim();
    auto a1 = columns(member(body, "a1", npath), m, npath + "/a1");
    auto b1 = columns(member(body, "b1", npath), m, npath + "/b1");
    auto a2 = columns(member(body, "a2", npath), m, npath + "/a2");
    auto b2 = columns(member(body, "b2", npath), m, npath + "/b2");
    try {
      return HMatrix<double>::node(std::move(c1), std::move(c2), std::move(a1),
                                   std::move(b1), std::move(a2), std::move(b2));
    } catch (const StructuralError& e) {
      throw ParseError(npath, e.what());
    }
  }
};

Index positive_int(const json& doc, const char* key) {
  const std::string path = std::string("/") + key;
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(path, "missing");
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1)
    throw ParseError(path, "expected a positive integer");
  return it->get<Index>();
}

}  // namespace

std::string serialize(const HMatrix<double>& A) {
  json doc;
  doc["n0"] = A.leaf_size();
  doc["rank"] = A.rank() > 0 ? A.rank() : Index{1};
  doc["root"] = node_to_json(A);
  return doc.dump();
}

HMatrix<double> deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  Reader r{positive_int(doc, "n0"), positive_int(doc, "rank")};
  auto it = doc.find("root");
  if (it == doc.end()) throw ParseError("/root", "missing");
  return r.node(*it, "/root");
}

HMatrix<double> load_hmatrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

void save_hmatrix(const HMatrix<double>& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << serialize(A) << '\n';
  if (!out) throw Error("write failed: " + path);
}

VectorXd read_vector(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    if (*b == '+') ++b;
    double v = 0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
      throw ParseError("line " + std::to_string(lineno),
                       "not a finite decimal number: '" + line + "'");
    values.push_back(v);
  }
  return Eigen::Map<const VectorXd>(values.data(),
                                    static_cast<Index>(values.size()));
}

VectorXd load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_vector(in);
}

void write_vector(std::ostream& out, const VectorXd& v) {
  char buf[64];
  for (Index i = 0; i < v.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v(i));
    out.write(buf, ptr - buf);
    out.put('\n');
  }
}

}  // namespace hodlr
