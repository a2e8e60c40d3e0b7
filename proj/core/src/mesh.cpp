#include "gedfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gedfem/errors.hpp"

namespace gedfem {

void Mesh::validate() const {
  const int n = node_count();
  for (std::size_t e = 0; e < elements.size(); ++e)
    for (int a = 0; a < 8; ++a)
      if (elements[e][a] < 0 || elements[e][a] >= n)
        throw ParseError("mesh: element " + std::to_string(e) + " references node " +
                         std::to_string(elements[e][a]) + " out of range");
  for (const auto& [name, ids] : node_sets)
    for (int id : ids)
      if (id < 0 || id >= n)
        throw ParseError("mesh: node set '" + name + "' references node out of range");
  for (const auto& [name, ids] : element_sets)
    for (int id : ids)
      if (id < 0 || id >= element_count())
        throw ParseError("mesh: element set '" + name + "' references element out of range");
}

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw ParseError("mesh: unknown node set '" + name + "'");
  return it->second;
}

namespace {
// local node indices of the six hex faces, outward orientation
constexpr int kFaces[6][4] = {
    {0, 3, 2, 1},  // zmin
    {4, 5, 6, 7},  // zmax
    {0, 1, 5, 4},  // ymin
    {2, 3, 7, 6},  // ymax
    {0, 4, 7, 3},  // xmin
    {1, 2, 6, 5},  // xmax
};
}  // namespace

std::vector<Mesh::Face> Mesh::faces_in_node_set(const std::string& name) const {
  const std::vector<int>& ids = node_set(name);
  const std::set<int> in_set(ids.begin(), ids.end());
  std::vector<Face> faces;
  for (int e = 0; e < element_count(); ++e) {
    for (const auto& fl : kFaces) {
      Face f;
      f.element = e;
      bool all = true;
      for (int k = 0; k < 4; ++k) {
        f.nodes[k] = elements[e][fl[k]];
        if (!in_set.count(f.nodes[k])) {
          all = false;
          break;
        }
      }
      if (all) faces.push_back(f);
    }
  }
  return faces;
}

Mesh box_mesh_from_coords(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& zs) {
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  const int nz = static_cast<int>(zs.size()) - 1;
  if (nx < 1 || ny < 1 || nz < 1) throw ParseError("box mesh: need at least one element per axis");

  Mesh m;
  auto node_id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  m.nodes.resize(std::size_t(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.nodes[node_id(i, j, k)] = {xs[i], ys[j], zs[k]};

  m.elements.reserve(std::size_t(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.elements.push_back({node_id(i, j, k), node_id(i + 1, j, k), node_id(i + 1, j + 1, k),
                              node_id(i, j + 1, k), node_id(i, j, k + 1), node_id(i + 1, j, k + 1),
                              node_id(i + 1, j + 1, k + 1), node_id(i, j + 1, k + 1)});

  auto add_plane = [&](const std::string& name, auto pred) {
    std::vector<int>& s = m.node_sets[name];
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
          if (pred(i, j, k)) s.push_back(node_id(i, j, k));
  };
  add_plane("xmin", [&](int i, int, int) { return i == 0; });
  add_plane("xmax", [&](int i, int, int) { return i == nx; });
  add_plane("ymin", [&](int, int j, int) { return j == 0; });
  add_plane("ymax", [&](int, int j, int) { return j == ny; });
  add_plane("zmin", [&](int, int, int k) { return k == 0; });
  add_plane("zmax", [&](int, int, int k) { return k == nz; });
  m.node_sets["origin"] = {node_id(0, 0, 0)};
  return m;
}

Mesh box_mesh(double lx, double ly, double lz, int nx, int ny, int nz) {
  auto axis = [](double len, int n) {
    std::vector<double> c(n + 1);
    for (int i = 0; i <= n; ++i) c[i] = len * double(i) / double(n);
    return c;
  };
  return box_mesh_from_coords(axis(lx, nx), axis(ly, ny), axis(lz, nz));
}

std::vector<double> graded_axis(double length, int n, double ratio) {
  if (n < 1) throw ParseError("graded_axis: need at least one interval");
  const double r = std::pow(ratio, 1.0 / std::max(1, n - 1));
  std::vector<double> sizes(n);
  double total = 0.0;
  double s = 1.0;
  for (int i = 0; i < n; ++i) {
    sizes[i] = s;
    total += s;
    s *= r;
  }
  std::vector<double> coords(n + 1);
  coords[0] = 0.0;
  for (int i = 0; i < n; ++i) coords[i + 1] = coords[i] + sizes[i] * length / total;
  coords[n] = length;
  return coords;
}

Mesh notched_plate_mesh(double lx, double ly, double lz, int nx, int ny, int nz,
                        double notch_radius) {
  Mesh box = box_mesh(lx, ly, lz, nx, ny, nz);
  const double cx = 0.5 * lx;
  auto in_notch = [&](const std::array<double, 3>& p) {
    const double dx = p[0] - cx;
    const double d_bot = std::hypot(dx, p[1]);
    const double d_top = std::hypot(dx, p[1] - ly);
    return d_bot < notch_radius || d_top < notch_radius;
  };

  Mesh m;
  std::vector<int> node_map(box.nodes.size(), -1);
  for (const auto& conn : box.elements) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int a = 0; a < 8; ++a)
      for (int d = 0; d < 3; ++d) c[d] += box.nodes[conn[a]][d] / 8.0;
    if (in_notch(c)) continue;
    std::array<int, 8> remapped;
    for (int a = 0; a < 8; ++a) {
      int& id = node_map[conn[a]];
      if (id < 0) {
        id = m.node_count();
        m.nodes.push_back(box.nodes[conn[a]]);
      }
      remapped[a] = id;
    }
    m.elements.push_back(remapped);
  }
  for (const auto& [name, ids] : box.node_sets) {
    std::vector<int> kept;
    for (int id : ids)
      if (node_map[id] >= 0) kept.push_back(node_map[id]);
    if (!kept.empty()) m.node_sets[name] = kept;
  }
  m.validate();
  return m;
}

}  // namespace gedfem
