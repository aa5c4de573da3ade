#pragma once

#include <utility>
#include <vector>

namespace nueg {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Nodes/weights mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

} // namespace nueg
