#ifndef TREEDG_MESH_HPP
#define TREEDG_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "treedg/errors.hpp"

namespace treedg {

// Hierarchical Cartesian cell tree (binary tree in 1D, quadtree in 2D) on a
// square domain. Cells live in a flat array with explicit parent/child ids;
// coarsening compacts the array immediately so ids stay dense. Refinement
// enforces 2:1 face balance eagerly, so the mesh is balanced whenever a
// query runs. Child k of a cell has its center offset by +-size/4 per axis,
// with bit j of k selecting the upper half along axis j.
template <int Dim>
class TreeMesh {
  static_assert(Dim == 1 || Dim == 2);

public:
  static constexpr int ndims = Dim;
  static constexpr int n_children = 1 << Dim;
  using Coord = std::array<double, Dim>;

  struct Cell {
    int level = 0;
    int parent = -1;
    std::array<int, n_children> children; // children[0] < 0 means leaf
    Coord center{};

    bool is_leaf() const { return children[0] < 0; }
  };

  struct CoarsenReport {
    std::vector<int> accepted; // parent ids before compaction
    std::vector<int> skipped;  // requests that would break 2:1 balance
    std::vector<int> remap;    // old cell id -> new cell id (-1 if removed)
  };

  TreeMesh(const Coord& coords_min, const Coord& coords_max, int initial_refinement_level,
           int n_cells_max, const std::array<bool, Dim>& periodicity)
      : coords_min_(coords_min), coords_max_(coords_max), n_cells_max_(n_cells_max),
        periodic_(periodicity) {
    const double edge = coords_max_[0] - coords_min_[0];
    if (!(edge > 0.0)) throw ConfigError("coords_max must exceed coords_min");
    for (int a = 1; a < Dim; ++a) {
      const double e = coords_max_[a] - coords_min_[a];
      if (std::abs(e - edge) > 1e-12 * edge)
        throw ConfigError("TreeMesh requires a square domain (equal edge lengths)");
    }
    if (initial_refinement_level < 0) throw ConfigError("initial_refinement_level must be >= 0");
    edge_ = edge;

    Cell root;
    root.level = 0;
    root.parent = -1;
    root.children.fill(-1);
    for (int a = 0; a < Dim; ++a) root.center[a] = 0.5 * (coords_min_[a] + coords_max_[a]);
    ensure_capacity(1);
    cells_.push_back(root);

    for (int l = 0; l < initial_refinement_level; ++l) {
      std::vector<int> targets = leaf_ids();
      refine_cells(targets);
    }
  }

  const Coord& coords_min() const { return coords_min_; }
  const Coord& coords_max() const { return coords_max_; }
  double domain_edge() const { return edge_; }
  int n_cells_max() const { return n_cells_max_; }
  const std::array<bool, Dim>& periodicity() const { return periodic_; }

  int n_cells() const { return static_cast<int>(cells_.size()); }
  const Cell& cell(int id) const {
    if (id < 0 || id >= n_cells()) throw std::out_of_range("invalid cell id " + std::to_string(id));
    return cells_[id];
  }

  double cell_size(int id) const { return edge_ / static_cast<double>(1 << cell(id).level); }
  // reference-to-physical map x = center + (size/2) xi, Jacobian (size/2)^Dim
  double cell_jacobian(int id) const {
    const double half = 0.5 * cell_size(id);
    double j = half;
    for (int a = 1; a < Dim; ++a) j *= half;
    return j;
  }

  // Leaves in depth-first preorder; this is the element ordering.
  std::vector<int> leaf_ids() const {
    std::vector<int> out;
    out.reserve(cells_.size());
    collect_leaves(0, out);
    return out;
  }

  int n_leaves() const {
    int n = 0;
    for (const auto& c : cells_)
      if (c.is_leaf()) ++n;
    return n;
  }

  // --- refinement -----------------------------------------------------------

  // Refines the given leaves (plus any neighbors needed to keep 2:1 balance)
  // and returns the ids of all newly created leaves.
  std::vector<int> refine_cells(const std::vector<int>& targets) {
    std::vector<int> new_leaves;
    for (int id : targets) {
      if (!cell(id).is_leaf())
        throw std::invalid_argument("refine_cells: cell " + std::to_string(id) + " is not a leaf");
    }
    for (int id : targets) {
      if (cells_[id].is_leaf()) refine_recursive(id, new_leaves);
    }
    return new_leaves;
  }

  // Removes the children of each requested parent whose family can be
  // coarsened without breaking 2:1 balance. Skipped requests are reported,
  // not fatal. The cell array is compacted; the report carries the id remap.
  CoarsenReport coarsen_cells(const std::vector<int>& parents) {
    CoarsenReport report;
    std::vector<bool> deleted(cells_.size(), false);
    for (int id : parents) {
      const Cell& p = cell(id);
      if (p.is_leaf()) {
        report.skipped.push_back(id);
        continue;
      }
      bool all_leaf_children = true;
      for (int c : p.children)
        if (!cells_[c].is_leaf()) { all_leaf_children = false; break; }
      if (!all_leaf_children || !coarsen_keeps_balance(id) ) {
        report.skipped.push_back(id);
        continue;
      }
      for (int c : p.children) deleted[c] = true;
      cells_[id].children.fill(-1);
      report.accepted.push_back(id);
    }

    // compact
    report.remap.assign(cells_.size(), -1);
    std::vector<Cell> compacted;
    compacted.reserve(cells_.size());
    for (int id = 0; id < n_cells(); ++id) {
      if (deleted[id]) continue;
      report.remap[id] = static_cast<int>(compacted.size());
      compacted.push_back(cells_[id]);
    }
    for (auto& c : compacted) {
      if (c.parent >= 0) c.parent = report.remap[c.parent];
      if (!c.is_leaf())
        for (int& ch : c.children) ch = report.remap[ch];
    }
    cells_ = std::move(compacted);
    return report;
  }

  // --- queries ---------------------------------------------------------------

  // Leaf containing the point (after periodic wrapping); -1 if outside a
  // non-periodic domain.
  int find_leaf(Coord x) const {
    for (int a = 0; a < Dim; ++a) {
      if (periodic_[a]) {
        const double span = coords_max_[a] - coords_min_[a];
        double r = std::fmod(x[a] - coords_min_[a], span);
        if (r < 0.0) r += span;
        x[a] = coords_min_[a] + r;
      } else if (x[a] < coords_min_[a] || x[a] > coords_max_[a]) {
        return -1;
      }
    }
    int id = 0;
    while (!cells_[id].is_leaf()) {
      int k = 0;
      for (int a = 0; a < Dim; ++a)
        if (x[a] >= cells_[id].center[a]) k |= (1 << a);
      id = cells_[id].children[k];
    }
    return id;
  }

  // Leaves adjacent to a face of the given leaf (0, 1, or 2 entries; 2 only
  // in 2D when the neighbor side is one level finer).
  std::vector<int> neighbor_leaves(int id, int axis, int side) const {
    const Cell& c = cell(id);
    const double size = cell_size(id);
    std::vector<int> found;
    auto probe = [&](double transverse_offset) {
      Coord x = c.center;
      x[axis] += (side == 1 ? 1.0 : -1.0) * (0.5 * size + 0.125 * size);
      if constexpr (Dim == 2) x[1 - axis] += transverse_offset;
      const int n = find_leaf(x);
      if (n < 0) return;
      // n == id happens only when a periodic axis wraps a root-spanning cell
      // onto itself; that self-coupling is a real face.
      if (n == id && !(periodic_[axis] && cells_[id].level == 0)) return;
      if (std::find(found.begin(), found.end(), n) == found.end()) found.push_back(n);
    };
    if constexpr (Dim == 1) {
      probe(0.0);
    } else {
      probe(-0.25 * size);
      probe(+0.25 * size);
    }
    return found;
  }

  bool is_balanced() const {
    for (int id = 0; id < n_cells(); ++id) {
      if (!cells_[id].is_leaf()) continue;
      for (int axis = 0; axis < Dim; ++axis) {
        for (int side = 0; side < 2; ++side) {
          const int n = coarse_neighbor_probe(id, axis, side);
          if (n >= 0 && cells_[id].level - cells_[n].level >= 2) return false;
        }
      }
    }
    return true;
  }

  // --- interface enumeration ---------------------------------------------------

  struct ConformingFace {
    int left, right; // element indices; left sits on the negative side
    int axis;
  };
  struct MortarFace {
    int large;                 // element index of the coarse cell
    std::array<int, 2> small;  // fine elements, ascending transverse coordinate
    int axis;
    int large_side;            // side of the large cell the smalls sit on
  };
  struct BoundaryFace {
    int element;
    int axis;
    int side;
  };
  struct InterfaceSet {
    std::vector<ConformingFace> conforming;
    std::vector<MortarFace> mortars;
    std::vector<BoundaryFace> boundaries;
  };

  InterfaceSet enumerate_interfaces() const {
    if (!is_balanced())
      throw std::logic_error("enumerate_interfaces called on an unbalanced mesh");
    const std::vector<int> leaves = leaf_ids();
    std::vector<int> element_of(cells_.size(), -1);
    for (int e = 0; e < static_cast<int>(leaves.size()); ++e) element_of[leaves[e]] = e;

    InterfaceSet set;
    for (int e = 0; e < static_cast<int>(leaves.size()); ++e) {
      const int id = leaves[e];
      for (int axis = 0; axis < Dim; ++axis) {
        for (int side = 0; side < 2; ++side) {
          const auto nbrs = neighbor_leaves(id, axis, side);
          if (nbrs.empty()) {
            set.boundaries.push_back({e, axis, side});
            continue;
          }
          if (nbrs.size() == 2) {
            // fine side; sort by transverse coordinate
            std::array<int, 2> small = {element_of[nbrs[0]], element_of[nbrs[1]]};
            if constexpr (Dim == 2) {
              if (cells_[nbrs[0]].center[1 - axis] > cells_[nbrs[1]].center[1 - axis])
                std::swap(small[0], small[1]);
            }
            set.mortars.push_back({e, small, axis, side});
            continue;
          }
          const int n = nbrs[0];
          if constexpr (Dim == 2) {
            if (cells_[n].level < cells_[id].level) continue; // recorded from the coarse side
          }
          if (side == 1) set.conforming.push_back({e, element_of[n], axis});
        }
      }
    }
    return set;
  }

  // --- binary snapshot ----------------------------------------------------------

  void save_snapshot(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save_snapshot(out);
    if (!out) throw IoError("write failed for '" + path + "'");
  }

  void save_snapshot(std::ostream& out) const {
    out.write("TMSH", 4);
    write_u32(out, 1); // version
    write_u32(out, static_cast<uint32_t>(Dim));
    write_u32(out, static_cast<uint32_t>(cells_.size()));
    write_u32(out, static_cast<uint32_t>(n_cells_max_));
    for (int a = 0; a < Dim; ++a) write_f64(out, coords_min_[a]);
    for (int a = 0; a < Dim; ++a) write_f64(out, coords_max_[a]);
    for (int a = 0; a < Dim; ++a) write_u32(out, periodic_[a] ? 1 : 0);
    for (const auto& c : cells_) {
      write_i32(out, c.level);
      write_i32(out, c.parent);
      for (int ch : c.children) write_i32(out, ch);
      for (int a = 0; a < Dim; ++a) write_f64(out, c.center[a]);
    }
  }

  static TreeMesh load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return load_snapshot(in, path);
  }

  static TreeMesh load_snapshot(std::istream& in, const std::string& path = "<stream>") {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "TMSH", 4) != 0)
      throw IoError("'" + path + "' is not a TMSH snapshot");
    const uint32_t version = read_u32(in);
    if (version != 1) throw IoError("unsupported TMSH version " + std::to_string(version));
    const uint32_t dim = read_u32(in);
    if (dim != static_cast<uint32_t>(Dim))
      throw IoError("snapshot dimension " + std::to_string(dim) + " does not match " +
                    std::to_string(Dim));
    const uint32_t n_cells = read_u32(in);
    const uint32_t n_max = read_u32(in);
    Coord lo, hi;
    std::array<bool, Dim> per{};
    for (int a = 0; a < Dim; ++a) lo[a] = read_f64(in);
    for (int a = 0; a < Dim; ++a) hi[a] = read_f64(in);
    for (int a = 0; a < Dim; ++a) per[a] = read_u32(in) != 0;
    TreeMesh mesh(lo, hi, 0, static_cast<int>(n_max), per);
    mesh.cells_.clear();
    mesh.cells_.reserve(n_cells);
    for (uint32_t i = 0; i < n_cells; ++i) {
      Cell c;
      c.level = read_i32(in);
      c.parent = read_i32(in);
      for (int& ch : c.children) ch = read_i32(in);
      for (int a = 0; a < Dim; ++a) c.center[a] = read_f64(in);
      mesh.cells_.push_back(c);
    }
    if (!in) throw IoError("truncated TMSH snapshot '" + path + "'");
    return mesh;
  }

private:
  void ensure_capacity(int extra) const {
    if (static_cast<int>(cells_.size()) + extra > n_cells_max_)
      throw CapacityError("mesh capacity exceeded: need " +
                          std::to_string(cells_.size() + extra) + " cells, n_cells_max=" +
                          std::to_string(n_cells_max_));
  }

  void collect_leaves(int id, std::vector<int>& out) const {
    const Cell& c = cells_[id];
    if (c.is_leaf()) {
      out.push_back(id);
      return;
    }
    for (int ch : c.children) collect_leaves(ch, out);
  }

  // Leaf at the face-center probe point; finds any equal-or-coarser neighbor.
  int coarse_neighbor_probe(int id, int axis, int side) const {
    const Cell& c = cells_[id];
    const double size = edge_ / static_cast<double>(1 << c.level);
    Coord x = c.center;
    x[axis] += (side == 1 ? 1.0 : -1.0) * (0.5 * size + 0.125 * size);
    const int n = find_leaf(x);
    return (n == id) ? -1 : n;
  }

  void refine_recursive(int id, std::vector<int>& new_leaves) {
    if (!cells_[id].is_leaf()) return;
    const int level = cells_[id].level;
    // 2:1 balance: a coarser face neighbor must be refined first
    for (int axis = 0; axis < Dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const int n = coarse_neighbor_probe(id, axis, side);
        if (n >= 0 && cells_[n].level < level) refine_recursive(n, new_leaves);
      }
    }
    ensure_capacity(n_children);
    const double quarter = 0.25 * cell_size(id);
    for (int k = 0; k < n_children; ++k) {
      Cell child;
      child.level = level + 1;
      child.parent = id;
      child.children.fill(-1);
      child.center = cells_[id].center;
      for (int a = 0; a < Dim; ++a) child.center[a] += ((k >> a) & 1) ? quarter : -quarter;
      const int child_id = static_cast<int>(cells_.size());
      cells_.push_back(child);
      cells_[id].children[k] = child_id;
      new_leaves.push_back(child_id);
    }
  }

  // Coarsening parent P (children at level l+1 -> leaf at level l) keeps
  // balance iff no leaf adjacent to the family's outer faces is finer than
  // l+1.
  bool coarsen_keeps_balance(int parent) const {
    const Cell& p = cells_[parent];
    for (int child : p.children) {
      for (int axis = 0; axis < Dim; ++axis) {
        for (int side = 0; side < 2; ++side) {
          const auto nbrs = neighbor_leaves(child, axis, side);
          for (int n : nbrs) {
            if (cells_[n].parent == parent) continue; // internal family face
            if (cells_[n].level > p.level + 1) return false;
          }
        }
      }
    }
    return true;
  }

  static void write_u32(std::ostream& o, uint32_t v) { o.write(reinterpret_cast<const char*>(&v), 4); }
  static void write_i32(std::ostream& o, int32_t v) { o.write(reinterpret_cast<const char*>(&v), 4); }
  static void write_f64(std::ostream& o, double v) { o.write(reinterpret_cast<const char*>(&v), 8); }
  static uint32_t read_u32(std::istream& i) { uint32_t v = 0; i.read(reinterpret_cast<char*>(&v), 4); return v; }
  static int32_t read_i32(std::istream& i) { int32_t v = 0; i.read(reinterpret_cast<char*>(&v), 4); return v; }
  static double read_f64(std::istream& i) { double v = 0; i.read(reinterpret_cast<char*>(&v), 8); return v; }

  Coord coords_min_{}, coords_max_{};
  double edge_ = 0.0;
  int n_cells_max_ = 0;
  std::array<bool, Dim> periodic_{};
  std::vector<Cell> cells_;
};

} // namespace treedg

#endif
