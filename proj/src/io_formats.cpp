#include "zonoctrl/io.hpp"

#include <fstream>
#include <sstream>

namespace zonoctrl::io {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& j) {
  Vec v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v[i] = j[static_cast<size_t>(i)].get<double>();
  return v;
}

json mat_to_json(const Mat& m) {
  json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  json data = json::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  out["data"] = data;
  return out;
}

Mat mat_from_json(const json& j) {
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  const auto& data = j.at("data");
  require(static_cast<long>(data.size()) == rows * cols, "mat_from_json: size mismatch");
  Mat m(rows, cols);
  long k = 0;
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c) m(i, c) = data[static_cast<size_t>(k++)].get<double>();
  return m;
}

json box_to_json(const Box& b) {
  json out;
  out["lower"] = vec_to_json(b.lower);
  out["upper"] = vec_to_json(b.upper);
  return out;
}

Box box_from_json(const json& j) {
  Box b{vec_from_json(j.at("lower")), vec_from_json(j.at("upper"))};
  b.check();
  return b;
}

json czono_to_json(const ConstrainedZonotope& s) {
  json out;
  out["center"] = vec_to_json(s.center);
  out["generators"] = mat_to_json(s.generators);
  out["constraint_matrix"] = mat_to_json(s.constraint_matrix);
  out["constraint_offset"] = vec_to_json(s.constraint_offset);
  return out;
}

ConstrainedZonotope czono_from_json(const json& j) {
  ConstrainedZonotope s;
  s.center = vec_from_json(j.at("center"));
  s.generators = mat_from_json(j.at("generators"));
  s.constraint_matrix = mat_from_json(j.at("constraint_matrix"));
  s.constraint_offset = vec_from_json(j.at("constraint_offset"));
  s.check();
  return s;
}

json cell_to_json(const Cell& c) {
  json out;
  out["symbol"] = c.symbol_index;
  out["kind"] = c.kind == CellKind::Zonotope ? "zonotope" : "constrained-zonotope";
  out["base"] = czono_to_json(c.base);
  out["body"] = czono_to_json(c.body);
  out["gnorm_generators"] = mat_to_json(c.gnorm_generators);
  return out;
}

Cell cell_from_json(const json& j) {
  Cell c;
  c.symbol_index = j.at("symbol").get<int>();
  c.kind = j.at("kind").get<std::string>() == "zonotope" ? CellKind::Zonotope
                                                         : CellKind::Constrained;
  c.base = czono_from_json(j.at("base"));
  c.body = czono_from_json(j.at("body"));
  c.gnorm_generators = mat_from_json(j.at("gnorm_generators"));
  c.finalize();
  return c;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_partition(const std::string& path, const std::vector<Cell>& cells, const Box& X,
                     const PartitionConfig& cfg) {
  json out;
  out["format"] = "zonoctrl-partition";
  out["version"] = 1;
  out["state_box"] = box_to_json(X);
  out["config"] = {{"count", cfg.count},
                   {"epsilon", cfg.epsilon},
                   {"seed", cfg.seed},
                   {"neighbor_count", cfg.neighbor_count}};
  json cj = json::array();
  for (const auto& c : cells) cj.push_back(cell_to_json(c));
  out["cells"] = cj;
  write_text_file(path, out.dump(1) + "\n");
}

std::vector<Cell> read_partition(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  require(j.at("format") == "zonoctrl-partition", "read_partition: wrong format");
  require(j.at("version") == 1, "read_partition: unsupported version");
  std::vector<Cell> cells;
  for (const auto& cj : j.at("cells")) cells.push_back(cell_from_json(cj));
  return cells;
}

}  // namespace zonoctrl::io
