#pragma once

// Nonzero-entry lists used by the integrators' right-hand sides. The public
// API stays dense; this only skips the structural zeros of the model
// operators in the hot loops.

#include <vector>

#include "qdce/qspace.hpp"

namespace qdce::detail {

struct Entry {
  int row;
  int col;
  Complex value;
};

struct EntryList {
  std::vector<Entry> entries;

  static EntryList from(const CMatrix& m) {
    EntryList out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, j) != Complex{0.0, 0.0}) {
          out.entries.push_back({static_cast<int>(i), static_cast<int>(j), m(i, j)});
        }
      }
    }
    return out;
  }

  // y += scale * M x
  void apply_add(const Complex* x, Complex* y, Complex scale) const {
    for (const Entry& e : entries) y[e.row] += (scale * e.value) * x[e.col];
  }
};

// Classical fixed-step RK4 for y' = f(t, y) with preallocated stages.
template <class State>
class Rk4 {
 public:
  explicit Rk4(const State& shape)
      : k1_(shape), k2_(shape), k3_(shape), k4_(shape), tmp_(shape) {}

  template <class Rhs>
  void step(Rhs& f, double t, double h, State& y) {
    f(t, y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    f(t + 0.5 * h, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    f(t + 0.5 * h, tmp_, k3_);
    tmp_ = y + h * k3_;
    f(t + h, tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  State k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace qdce::detail
