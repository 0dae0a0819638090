#include <cstring>
#include <fstream>
#include <sstream>

#include "zonoctrl/abstraction.hpp"
#include "zonoctrl/io.hpp"
#include "zonoctrl/pipeline.hpp"
#include "zonoctrl/synthesis.hpp"

namespace zonoctrl::io {

namespace {
constexpr char kMagic[4] = {'Z', 'C', 'A', 'B'};
constexpr uint32_t kDumpVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(is), "abstraction dump: truncated file");
  return v;
}
}  // namespace

void write_abstraction_dump(const std::string& path, const Abstraction& abs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(kMagic, 4);
  put<uint32_t>(f, kDumpVersion);
  put<uint64_t>(f, abs.num_states());
  put<uint64_t>(f, abs.num_inputs());
  put<uint64_t>(f, abs.transition_count());
  for (const auto& succ : abs.transitions) {
    put<uint32_t>(f, static_cast<uint32_t>(succ.size()));
    int32_t prev = 0;
    for (size_t i = 0; i < succ.size(); ++i) {
      if (i == 0) {
        put<int32_t>(f, succ[0]);
      } else {
        put<uint32_t>(f, static_cast<uint32_t>(succ[i] - prev));
      }
      prev = succ[i];
    }
  }
}

std::vector<std::vector<int32_t>> read_abstraction_dump(const std::string& path,
                                                        uint64_t* n_states, uint64_t* n_inputs) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  f.read(magic, 4);
  require(f && std::memcmp(magic, kMagic, 4) == 0, "abstraction dump: bad magic");
  require(get<uint32_t>(f) == kDumpVersion, "abstraction dump: unsupported version");
  const uint64_t Q = get<uint64_t>(f);
  const uint64_t M = get<uint64_t>(f);
  const uint64_t T = get<uint64_t>(f);
  std::vector<std::vector<int32_t>> table(Q * M);
  uint64_t total = 0;
  for (auto& succ : table) {
    const uint32_t cnt = get<uint32_t>(f);
    succ.resize(cnt);
    int32_t prev = 0;
    for (uint32_t i = 0; i < cnt; ++i) {
      if (i == 0)
        prev = get<int32_t>(f);
      else
        prev += static_cast<int32_t>(get<uint32_t>(f));
      succ[i] = prev;
    }
    total += cnt;
  }
  require(total == T, "abstraction dump: transition count mismatch");
  if (n_states) *n_states = Q;
  if (n_inputs) *n_inputs = M;
  return table;
}

void write_controller(const std::string& path, const ComposedController& cc) {
  json out;
  out["format"] = "zonoctrl-controller";
  out["version"] = 1;
  json stages = json::array();
  for (const auto& st : cc.stages) {
    json sj;
    sj["cell_symbol"] = st.cell_index + 1;
    sj["epsilon"] = st.abstraction.epsilon;
    sj["radius"] = st.abstraction.radius;
    sj["quantizer_epsilon"] = st.quant_epsilon;
    sj["states"] = st.abstraction.num_states();
    json table = json::array();
    for (size_t q = 0; q < st.controller.table.size(); ++q) {
      const auto& e = st.controller.table[q];
      if (!st.controller.winning.count(static_cast<int>(q))) continue;
      table.push_back({static_cast<long>(q), e.input, e.steps_to_go});
    }
    sj["table"] = table;
    stages.push_back(sj);
  }
  out["stages"] = stages;
  write_text_file(path, out.dump(1) + "\n");
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ostringstream os;
  os << "t,x1,x2,u1,u2,stage\n";
  char buf[64];
  auto num = [&buf](double v) {
    snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& s : traj.samples) {
    os << num(static_cast<double>(s.step) * traj.tau) << "," << num(s.state[0]) << ","
       << num(s.state[1]) << "," << num(s.input.size() ? s.input[0] : 0.0) << ","
       << num(s.input.size() > 1 ? s.input[1] : 0.0) << "," << s.stage << "\n";
  }
  write_text_file(path, os.str());
}

namespace {

struct SvgMapper {
  double x0, y0, x1, y1, scale, pad;
  double X(double x) const { return (x - x0) * scale + pad; }
  double Y(double y) const { return (y1 - y) * scale + pad; }
};

void svg_polygon(std::ostringstream& os, const SvgMapper& m, const poly::Polygon& p,
                 const std::string& style) {
  if (p.size() < 2) return;
  os << "<polygon points=\"";
  for (const auto& v : p) os << m.X(v.x()) << "," << m.Y(v.y()) << " ";
  os << "\" " << style << "/>\n";
}

poly::Polygon box_polygon(const Box& b) {
  return {{b.lower[0], b.lower[1]},
          {b.upper[0], b.lower[1]},
          {b.upper[0], b.upper[1]},
          {b.lower[0], b.upper[1]}};
}

}  // namespace

void write_svg(const std::string& path, const SvgScene& scene) {
  const Box& w = scene.world;
  SvgMapper m{w.lower[0] - 2, w.lower[1] - 2, w.upper[0] + 2, w.upper[1] + 2, 20.0, 10.0};
  const double width = (m.x1 - m.x0) * m.scale + 2 * m.pad;
  const double height = (m.y1 - m.y0) * m.scale + 2 * m.pad;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg_polygon(os, m, box_polygon(w), "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");

  if (scene.cells) {
    for (const auto& c : *scene.cells) {
      const bool zono = c.kind == CellKind::Zonotope;
      svg_polygon(os, m, c.body_polygon,
                  std::string("fill=\"") + (zono ? "#7fbf7f" : "#7f9fbf") +
                      "\" fill-opacity=\"0.15\" stroke=\"" + (zono ? "#2e7d32" : "#30557d") +
                      "\" stroke-width=\"0.8\"");
    }
  }
  if (scene.obstacles) {
    for (const auto& o : *scene.obstacles)
      svg_polygon(os, m, box_polygon(o), "fill=\"#9e9e9e\" stroke=\"#616161\"");
  }
  if (scene.waypoints) {
    for (const auto& wp : *scene.waypoints)
      svg_polygon(os, m, wp, "fill=\"#9c27b0\" fill-opacity=\"0.35\" stroke=\"#6a1b9a\"");
  }
  if (scene.init_box)
    svg_polygon(os, m, box_polygon(*scene.init_box), "fill=\"#0d47a1\" fill-opacity=\"0.7\"");
  if (scene.goals) {
    for (const auto& g : *scene.goals)
      svg_polygon(os, m, box_polygon(g), "fill=\"#ff9800\" fill-opacity=\"0.8\"");
  }
  if (scene.centers) {
    for (const auto& c : *scene.centers)
      os << "<circle cx=\"" << m.X(c[0]) << "\" cy=\"" << m.Y(c[1])
         << "\" r=\"3\" fill=\"black\"/>\n";
  }
  if (scene.trajectory && !scene.trajectory->samples.empty()) {
    os << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"1.6\" points=\"";
    for (const auto& s : scene.trajectory->samples)
      os << m.X(s.state[0]) << "," << m.Y(s.state[1]) << " ";
    os << "\"/>\n";
  }
  os << "</svg>\n";
  write_text_file(path, os.str());
}

}  // namespace zonoctrl::io
