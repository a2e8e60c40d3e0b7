#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "gedfem/tensor.hpp"

namespace gedfem {

// HEX8 mesh with named node sets. Element connectivity follows the usual
// convention: bottom face counterclockwise, then top face.
struct Mesh {
  std::vector<std::array<double, 3>> nodes;  // coordinates (mm)
  std::vector<std::array<int, 8>> elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<int>> element_sets;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }

  void validate() const;  // index ranges and set references

  const std::vector<int>& node_set(const std::string& name) const;

  // Element faces (4-node quads) whose nodes all belong to the named set;
  // used to turn node sets into traction surfaces.
  struct Face {
    int element;
    std::array<int, 4> nodes;
  };
  std::vector<Face> faces_in_node_set(const std::string& name) const;
};

// Structured box mesher with canonical node sets xmin/xmax/ymin/ymax/zmin/zmax.
Mesh box_mesh(double lx, double ly, double lz, int nx, int ny, int nz);

// Box with per-axis node coordinates (graded meshes).
Mesh box_mesh_from_coords(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& zs);

// Geometric grading: n intervals over [0, length], size ratio last/first.
std::vector<double> graded_axis(double length, int n, double ratio);

// Plate with two semicircular edge notches at mid-length (top and bottom
// edges); elements whose centroid falls inside a notch are removed.
Mesh notched_plate_mesh(double lx, double ly, double lz, int nx, int ny, int nz,
                        double notch_radius);

}  // namespace gedfem
