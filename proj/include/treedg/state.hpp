#ifndef TREEDG_STATE_HPP
#define TREEDG_STATE_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace treedg {

// Nodal coefficients of the conserved variables, laid out
// [element][node][variable] with the variable index fastest. The node index
// is linear over the tensor grid: node = i + (N+1) * j in 2D.
class StateArray {
public:
  StateArray() = default;
  StateArray(int n_vars, int n_nodes_per_elem, int n_elements)
      : n_vars_(n_vars), n_nodes_(n_nodes_per_elem), n_elements_(n_elements),
        data_(static_cast<size_t>(n_vars) * n_nodes_per_elem * n_elements, 0.0) {}

  int n_vars() const { return n_vars_; }
  int n_nodes_per_element() const { return n_nodes_; }
  int n_elements() const { return n_elements_; }
  size_t size() const { return data_.size(); }

  double& operator()(int elem, int node, int var) {
    return data_[(static_cast<size_t>(elem) * n_nodes_ + node) * n_vars_ + var];
  }
  double operator()(int elem, int node, int var) const {
    return data_[(static_cast<size_t>(elem) * n_nodes_ + node) * n_vars_ + var];
  }

  double* node_ptr(int elem, int node) {
    return data_.data() + (static_cast<size_t>(elem) * n_nodes_ + node) * n_vars_;
  }
  const double* node_ptr(int elem, int node) const {
    return data_.data() + (static_cast<size_t>(elem) * n_nodes_ + node) * n_vars_;
  }

  double* element_ptr(int elem) { return node_ptr(elem, 0); }
  const double* element_ptr(int elem) const { return node_ptr(elem, 0); }

  template <size_t NV>
  std::array<double, NV> get(int elem, int node) const {
    std::array<double, NV> u;
    const double* p = node_ptr(elem, node);
    for (size_t v = 0; v < NV; ++v) u[v] = p[v];
    return u;
  }

  template <size_t NV>
  void set(int elem, int node, const std::array<double, NV>& u) {
    double* p = node_ptr(elem, node);
    for (size_t v = 0; v < NV; ++v) p[v] = u[v];
  }

  void fill(double value) { data_.assign(data_.size(), value); }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

private:
  int n_vars_ = 0, n_nodes_ = 0, n_elements_ = 0;
  std::vector<double> data_;
};

} // namespace treedg

#endif
