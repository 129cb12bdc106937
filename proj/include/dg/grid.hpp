#pragma once

#include <cstddef>
#include <vector>

#include "dg/error.hpp"

namespace dg {

enum class Boundary { Periodic, Dirichlet };

// Uniform 1D grid. Periodic grids exclude x_max (n cells), Dirichlet grids
// include both endpoints (n-1 cells).
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n = 0;
  Boundary boundary = Boundary::Periodic;

  void validate() const {
    if (n < 8) fail(ErrorKind::InvalidArgument, "grid needs n >= 8");
    if (!(x_max > x_min)) fail(ErrorKind::InvalidArgument, "x_max must exceed x_min");
  }

  double length() const { return x_max - x_min; }
  double dx() const {
    return boundary == Boundary::Periodic ? length() / n : length() / (n - 1);
  }
  double x(int i) const { return x_min + i * dx(); }

  std::vector<double> points() const {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
  }

  bool operator==(const Grid1D&) const = default;
};

}  // namespace dg
