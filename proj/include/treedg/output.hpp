#ifndef TREEDG_OUTPUT_HPP
#define TREEDG_OUTPUT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "treedg/config.hpp"
#include "treedg/errors.hpp"
#include "treedg/semi.hpp"
#include "treedg/state.hpp"
#include "treedg/version.hpp"

namespace treedg {

namespace output_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16g", v);
  return buf;
}

// config text flattened onto one line (for the VTK title slot)
inline std::string one_line(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '\n') {
      if (!out.empty() && out.back() != ';') out += "; ";
    } else {
      out += c;
    }
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == ';')) out.pop_back();
  return out;
}

inline void comment_block(std::ostream& o, const std::string& config_text) {
  o << "# " << version_string << "\n";
  std::istringstream in(config_text);
  std::string line;
  while (std::getline(in, line)) o << "# " << line << "\n";
}

// small perceptual-ish colormap (dark blue -> teal -> yellow)
inline std::array<uint8_t, 3> heat_color(double s) {
  static const double anchors[5][3] = {{0.267, 0.005, 0.329},
                                       {0.229, 0.322, 0.546},
                                       {0.128, 0.567, 0.551},
                                       {0.369, 0.789, 0.383},
                                       {0.993, 0.906, 0.144}};
  s = std::clamp(s, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(s));
  const double f = s - k;
  std::array<uint8_t, 3> rgb;
  for (int c = 0; c < 3; ++c) {
    const double v = anchors[k][c] + f * (anchors[k + 1][c] - anchors[k][c]);
    rgb[c] = static_cast<uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
  }
  return rgb;
}

} // namespace output_detail

// Evaluates the piecewise polynomial solution at an arbitrary physical point.
template <class Eq>
typename Eq::State evaluate_at(const Semidiscretization<Eq>& semi, const StateArray& u,
                               const std::array<double, Eq::ndims>& x) {
  const int cell = semi.mesh().find_leaf(x);
  if (cell < 0) throw IoError("evaluation point outside the domain");
  const int e = semi.element_of_cell(cell);
  const auto& center = semi.mesh().cell(cell).center;
  const double half = 0.5 * semi.element_dx(e);
  const int n = semi.basis().n_nodes();
  typename Eq::State out{};
  if constexpr (Eq::ndims == 1) {
    const auto ell = semi.basis().lagrange_at(std::clamp((x[0] - center[0]) / half, -1.0, 1.0));
    for (int i = 0; i < n; ++i)
      for (int v = 0; v < Eq::nvars; ++v) out[v] += ell[i] * u(e, i, v);
  } else {
    const auto lx = semi.basis().lagrange_at(std::clamp((x[0] - center[0]) / half, -1.0, 1.0));
    const auto ly = semi.basis().lagrange_at(std::clamp((x[1] - center[1]) / half, -1.0, 1.0));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double w = lx[i] * ly[j];
        for (int v = 0; v < Eq::nvars; ++v) out[v] += w * u(e, i + n * j, v);
      }
  }
  return out;
}

// Legacy ASCII VTK unstructured grid: one point per LGL node, sub-cell
// VTK_QUAD (2D) or VTK_LINE (1D) connectivity, point data for every conserved
// and primitive variable.
template <class Eq>
void write_vtk(const Semidiscretization<Eq>& semi, const StateArray& u,
               const std::string& config_text, const std::string& path) {
  std::ofstream o(path);
  if (!o) throw IoError("cannot open '" + path + "' for writing");
  const int n = semi.basis().n_nodes();
  const int nodes_per_elem = semi.n_nodes_per_element();
  const int ne = semi.n_elements();
  const long n_points = static_cast<long>(nodes_per_elem) * ne;

  o << "# vtk DataFile Version 3.0\n";
  o << output_detail::one_line(std::string(version_string) + "; " + config_text) << "\n";
  o << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  o << "POINTS " << n_points << " double\n";
  for (int e = 0; e < ne; ++e)
    for (int node = 0; node < nodes_per_elem; ++node) {
      const auto x = semi.node_coords(e, node);
      o << output_detail::fmt(x[0]) << " " << output_detail::fmt(Eq::ndims > 1 ? x[1] : 0.0)
        << " 0\n";
    }

  const int sub_per_elem = (Eq::ndims == 1) ? (n - 1) : (n - 1) * (n - 1);
  const int corners = (Eq::ndims == 1) ? 2 : 4;
  const long n_cells = static_cast<long>(sub_per_elem) * ne;
  o << "CELLS " << n_cells << " " << n_cells * (corners + 1) << "\n";
  for (int e = 0; e < ne; ++e) {
    const long base = static_cast<long>(e) * nodes_per_elem;
    if constexpr (Eq::ndims == 1) {
      for (int i = 0; i + 1 < n; ++i) o << "2 " << base + i << " " << base + i + 1 << "\n";
    } else {
      for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
          const long p = base + i + static_cast<long>(n) * j;
          o << "4 " << p << " " << p + 1 << " " << p + n + 1 << " " << p + n << "\n";
        }
    }
  }
  o << "CELL_TYPES " << n_cells << "\n";
  for (long c = 0; c < n_cells; ++c) o << (Eq::ndims == 1 ? 3 : 9) << "\n";

  o << "POINT_DATA " << n_points << "\n";
  const auto cons_names = Eq::variable_names();
  const auto prim_names = Eq::primitive_names();
  for (int v = 0; v < Eq::nvars; ++v) {
    o << "SCALARS " << cons_names[v] << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e)
      for (int node = 0; node < nodes_per_elem; ++node) o << output_detail::fmt(u(e, node, v)) << "\n";
  }
  if (Eq::nvars > 1) {
    for (int v = 0; v < Eq::nvars; ++v) {
      o << "SCALARS prim_" << prim_names[v] << " double 1\nLOOKUP_TABLE default\n";
      for (int e = 0; e < ne; ++e)
        for (int node = 0; node < nodes_per_elem; ++node) {
          const auto prim = semi.equations().cons2prim(u.template get<Eq::nvars>(e, node));
          o << output_detail::fmt(prim[v]) << "\n";
        }
    }
  }
  if (!o) throw IoError("write failed for '" + path + "'");
}

// One row per node: coordinates, conserved variables, primitive variables.
template <class Eq>
void write_node_csv(const Semidiscretization<Eq>& semi, const StateArray& u,
                    const std::string& config_text, const std::string& path) {
  std::ofstream o(path);
  if (!o) throw IoError("cannot open '" + path + "' for writing");
  output_detail::comment_block(o, config_text);
  o << "x";
  if constexpr (Eq::ndims == 2) o << ",y";
  for (const char* name : Eq::variable_names()) o << "," << name;
  if (Eq::nvars > 1)
    for (const char* name : Eq::primitive_names()) o << ",prim_" << name;
  o << "\n";
  for (int e = 0; e < semi.n_elements(); ++e)
    for (int node = 0; node < semi.n_nodes_per_element(); ++node) {
      const auto x = semi.node_coords(e, node);
      o << output_detail::fmt(x[0]);
      if constexpr (Eq::ndims == 2) o << "," << output_detail::fmt(x[1]);
      for (int v = 0; v < Eq::nvars; ++v) o << "," << output_detail::fmt(u(e, node, v));
      if (Eq::nvars > 1) {
        const auto prim = semi.equations().cons2prim(u.template get<Eq::nvars>(e, node));
        for (int v = 0; v < Eq::nvars; ++v) o << "," << output_detail::fmt(prim[v]);
      }
      o << "\n";
    }
  if (!o) throw IoError("write failed for '" + path + "'");
}

// Binary P6 heatmap of one variable resampled onto a uniform raster, plus a
// sidecar text file carrying the value range and the run configuration.
template <class Eq>
void write_ppm(const Semidiscretization<Eq>& semi, const StateArray& u,
               const std::string& config_text, const std::string& variable, int resolution,
               const std::string& path) {
  const auto cons_names = Eq::variable_names();
  const auto prim_names = Eq::primitive_names();
  int cons_index = -1, prim_index = -1;
  for (int v = 0; v < Eq::nvars; ++v) {
    if (variable == cons_names[v]) cons_index = v;
    if (variable == prim_names[v]) prim_index = v;
  }
  if (cons_index < 0 && prim_index < 0)
    throw ConfigError("ppm_variable '" + variable + "' is not a variable of " + Eq::name());

  const auto lo = semi.mesh().coords_min();
  const auto hi = semi.mesh().coords_max();
  const int W = resolution;
  const int H = (Eq::ndims == 1) ? std::max(2, resolution / 8) : resolution;

  std::vector<double> samples(static_cast<size_t>(W) * ((Eq::ndims == 1) ? 1 : H));
  auto sample_value = [&](const std::array<double, Eq::ndims>& x) {
    const auto s = evaluate_at(semi, u, x);
    if (cons_index >= 0) return s[cons_index];
    return semi.equations().cons2prim(s)[prim_index];
  };
  if constexpr (Eq::ndims == 1) {
    for (int i = 0; i < W; ++i) {
      std::array<double, 1> x{lo[0] + (hi[0] - lo[0]) * (i + 0.5) / W};
      samples[i] = sample_value(x);
    }
  } else {
    for (int j = 0; j < H; ++j)
      for (int i = 0; i < W; ++i) {
        std::array<double, 2> x{lo[0] + (hi[0] - lo[0]) * (i + 0.5) / W,
                                lo[1] + (hi[1] - lo[1]) * (j + 0.5) / H};
        samples[static_cast<size_t>(j) * W + i] = sample_value(x);
      }
  }
  double vmin = samples[0], vmax = samples[0];
  for (double v : samples) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  // a span at roundoff level is a constant field; avoid amplifying noise
  const double magnitude = std::max({std::abs(vmin), std::abs(vmax), 1.0});
  const bool flat = (vmax - vmin) <= 1e-13 * magnitude;
  const double span = flat ? 1.0 : (vmax - vmin);

  std::ofstream o(path, std::ios::binary);
  if (!o) throw IoError("cannot open '" + path + "' for writing");
  std::ostringstream header;
  header << "P6\n";
  header << "# " << version_string << " variable=" << variable << "\n";
  header << W << " " << H << "\n255\n";
  o << header.str();
  for (int j = 0; j < H; ++j) {
    const int row = (Eq::ndims == 1) ? 0 : (H - 1 - j); // image rows top-down
    for (int i = 0; i < W; ++i) {
      const double v = samples[static_cast<size_t>(row) * W + i];
      const auto rgb = output_detail::heat_color(flat ? 0.5 : (v - vmin) / span);
      o.write(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  }
  if (!o) throw IoError("write failed for '" + path + "'");

  std::ofstream side(path + ".txt");
  if (!side) throw IoError("cannot open '" + path + ".txt' for writing");
  side << "variable = " << variable << "\n";
  side << "min = " << output_detail::fmt(vmin) << "\n";
  side << "max = " << output_detail::fmt(vmax) << "\n";
  output_detail::comment_block(side, config_text);
}

// --- state files -------------------------------------------------------------
//
// Binary container "TDGS": version, the full normalized config (so a run is
// re-executable from its own output), simulation time, the TMSH mesh
// snapshot, and the raw nodal coefficients.

template <class Eq>
void save_state(const Semidiscretization<Eq>& semi, const StateArray& u, double t,
                const std::string& config_text, const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw IoError("cannot open '" + path + "' for writing");
  o.write("TDGS", 4);
  const uint32_t version = 1;
  o.write(reinterpret_cast<const char*>(&version), 4);
  const uint64_t len = config_text.size();
  o.write(reinterpret_cast<const char*>(&len), 8);
  o.write(config_text.data(), static_cast<std::streamsize>(len));
  o.write(reinterpret_cast<const char*>(&t), 8);
  semi.mesh().save_snapshot(o);
  const uint32_t dims[3] = {static_cast<uint32_t>(u.n_vars()),
                            static_cast<uint32_t>(u.n_nodes_per_element()),
                            static_cast<uint32_t>(u.n_elements())};
  o.write(reinterpret_cast<const char*>(dims), 12);
  o.write(reinterpret_cast<const char*>(u.raw().data()),
          static_cast<std::streamsize>(u.raw().size() * sizeof(double)));
  if (!o) throw IoError("write failed for '" + path + "'");
}

// Reads only the embedded config (needed to pick the equation type before the
// typed load).
inline std::string read_state_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "TDGS") throw IoError("'" + path + "' is not a TDGS state file");
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw IoError("unsupported TDGS version " + std::to_string(version));
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 8);
  std::string cfg(len, '\0');
  in.read(cfg.data(), static_cast<std::streamsize>(len));
  if (!in) throw IoError("truncated TDGS state file '" + path + "'");
  return cfg;
}

template <class Eq>
struct LoadedState {
  TreeMesh<Eq::ndims> mesh;
  StateArray u;
  double time = 0.0;
};

template <class Eq>
LoadedState<Eq> load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  in.seekg(8); // magic + version, validated by read_state_config
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 8);
  in.seekg(static_cast<std::streamoff>(len), std::ios::cur);
  double t = 0.0;
  in.read(reinterpret_cast<char*>(&t), 8);
  auto mesh = TreeMesh<Eq::ndims>::load_snapshot(in, path);
  uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), 12);
  StateArray u(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
  in.read(reinterpret_cast<char*>(u.raw().data()),
          static_cast<std::streamsize>(u.raw().size() * sizeof(double)));
  if (!in) throw IoError("truncated TDGS state file '" + path + "'");
  return {std::move(mesh), std::move(u), t};
}

// --- analysis CSV ---------------------------------------------------------------

// Streamed time-series: t, dt, step, per-variable l2/linf errors, conserved
// totals, entropy, kinetic energy.
class AnalysisCsvWriter {
public:
  AnalysisCsvWriter() = default;

  void open(const std::string& path, const std::string& config_text,
            const std::vector<std::string>& variable_names, bool has_errors) {
    out_.open(path);
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
    has_errors_ = has_errors;
    output_detail::comment_block(out_, config_text);
    out_ << "t,dt,step";
    if (has_errors)
      for (const auto& v : variable_names) out_ << ",l2_" << v << ",linf_" << v;
    for (const auto& v : variable_names) out_ << ",integral_" << v;
    out_ << ",entropy,kinetic_energy\n";
  }

  bool is_open() const { return out_.is_open(); }

  void write_row(const AnalysisReport& rep, double dt, long step) {
    out_ << output_detail::fmt(rep.time) << "," << output_detail::fmt(dt) << "," << step;
    if (has_errors_)
      for (size_t v = 0; v < rep.l2_error.size(); ++v)
        out_ << "," << output_detail::fmt(rep.l2_error[v]) << ","
             << output_detail::fmt(rep.linf_error[v]);
    for (double q : rep.integrals) out_ << "," << output_detail::fmt(q);
    out_ << "," << output_detail::fmt(rep.total_entropy) << ","
         << output_detail::fmt(rep.kinetic_energy) << "\n";
    out_.flush();
  }

private:
  std::ofstream out_;
  bool has_errors_ = false;
};

} // namespace treedg

#endif
