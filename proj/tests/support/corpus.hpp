#pragma once

// Shared test inputs: small periodic fields and point densities that every
// suite draws from, so "the corpus" means the same thing everywhere.

#include "nueg/periodic.hpp"
#include "nueg/sce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace corpus {

using nueg::DiscreteDensity;
using nueg::Point;
using nueg::periodic::Interpolation;
using nueg::periodic::Lattice;
using nueg::periodic::PeriodicField;

struct NamedField {
  std::string name;
  PeriodicField field;
};

// Period-1 two-level step 0.5 / 1.5.
inline PeriodicField step1d() { return PeriodicField(Lattice::cubic(1), {2}, {0.5, 1.5}); }

inline std::vector<NamedField> fields1d() {
  const Lattice z = Lattice::cubic(1);
  std::vector<NamedField> out;
  out.push_back({"constant", PeriodicField::constant(z, 1.0)});
  out.push_back({"step", step1d()});
  out.push_back({"three-level", PeriodicField(z, {3}, {0.25, 1.0, 0.6})});
  out.push_back({"sin2", PeriodicField::from_function(z, {16}, [](const Point& x) {
                   const double v = std::sin(M_PI * x[0]);
                   return v * v;
                 })});
  return out;
}

inline std::vector<NamedField> fields3d() {
  const Lattice z3 = Lattice::cubic(3);
  std::vector<NamedField> out;
  out.push_back({"constant", PeriodicField::constant(z3, 0.8)});
  std::vector<double> checker(8);
  for (int i = 0; i < 8; ++i) checker[i] = ((i ^ (i >> 1) ^ (i >> 2)) & 1) ? 1.5 : 0.5;
  out.push_back({"checker", PeriodicField(z3, {2, 2, 2}, checker)});
  out.push_back({"cosine", PeriodicField::from_function(
                               z3, {8, 8, 8},
                               [](const Point& x) {
                                 return 1.0 + 0.5 * std::cos(2 * M_PI * x[0]) * std::cos(2 * M_PI * x[1]);
                               },
                               Interpolation::Multilinear)});
  out.push_back({"slab", PeriodicField::from_function(
                             z3, {4, 4, 4}, [](const Point& x) { return x[2] < 0.5 ? 2.0 : 0.25; })});
  return out;
}

// m distinct points on the grid 0.1 Z within [0, 8], weights in (0, cap].
inline DiscreteDensity random_density1d(std::mt19937_64& rng, int m, double mass, double cap = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteDensity rho;
  rho.d = 1;
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < m) {
    const double x = std::round(u(rng) * 80.0) / 10.0;
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& v : w) total += (v = 0.05 + u(rng));
  for (int i = 0; i < m; ++i) {
    rho.support.push_back(Point::Constant(1, xs[i]));
    rho.weights.push_back(std::min(cap, w[i] * mass / total));
  }
  return rho;
}

// Point masses at the centres of distinct cells of an h-grid in [0, 3h)^3.
inline DiscreteDensity random_density3d(std::mt19937_64& rng, int m, double mass, double h, double cap = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> cells(27);
  for (int i = 0; i < 27; ++i) cells[i] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  DiscreteDensity rho;
  rho.d = 3;
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& v : w) total += (v = 0.1 + u(rng));
  for (int i = 0; i < m; ++i) {
    const int c = cells[i];
    rho.support.push_back(h * Eigen::Vector3d(c % 3 + 0.5, (c / 3) % 3 + 0.5, c / 9 + 0.5));
    rho.weights.push_back(std::min(cap, w[i] * mass / total));
  }
  return rho;
}

} // namespace corpus
