#pragma once

#include "nueg/types.hpp"

#include <functional>
#include <limits>

namespace nueg {

// How configurations with a repeated support point are treated.
//  Infinite: they cost +inf (and never appear in optimal plans).
//  Excluded: the diagonal pairs are dropped from the pair sum.
enum class DiagonalRule { Infinite, Excluded };

struct RieszCost {
  int d = 1;
  double s = 0.5;
  DiagonalRule diagonal = DiagonalRule::Infinite;

  void validate() const;
  double kernel(double r) const { return std::pow(r, -s); }
};

// Finitely supported nonnegative density: point masses w_i at x_i.
struct DiscreteDensity {
  int d = 1;
  PointList support;
  std::vector<double> weights;

  std::size_t size() const { return support.size(); }
  double total_mass() const;
  void validate() const;
};

// One unordered n-point configuration (sorted support indices, repeats
// allowed) carrying probability `weight`.
struct Configuration {
  std::vector<int> points;
  double weight = 0.0;
};

// Grand-canonical symmetric probability on a finite support.
struct GCPlan {
  int d = 1;
  PointList support;
  double p0 = 1.0;
  std::vector<Configuration> configs;
  int nmax = 0;

  double total_probability() const;
  // Mass of the n-particle layer.
  double layer_mass(int n) const;
  int max_particles() const;
  // Sorts configuration indices and merges duplicates.
  void canonicalize();
  void validate(double tol = 1e-10) const;
};

double pair_energy(const PointList& support, const std::vector<int>& config, const RieszCost& cost);

DiscreteDensity density_of(const GCPlan& plan);

// Extended-real: +inf when a repeated-point configuration carries mass under
// the Infinite rule.
double riesz_energy(const GCPlan& plan, const RieszCost& cost);

// Off-diagonal part 1/2 sum_{i != j} w_i w_j / r^s.
double direct_offdiagonal(const DiscreteDensity& rho, const RieszCost& cost);

// Direct term with each point read as a uniform cell of width h: the
// off-diagonal sum plus sum_i w_i^2 kappa_{d,s} / (2 h^s). With h = 0 or
// the Excluded rule only the off-diagonal sum is returned.
double direct_energy(const DiscreteDensity& rho, const RieszCost& cost, double h);

// kappa_{d,s} = double integral of |x - y|^{-s} over the unit cube.
double self_interaction_constant(int d, double s);

// Push-forward S -> S ∩ A of every configuration.
GCPlan localize(const GCPlan& plan, const std::function<bool(const Point&)>& region);
// Same with membership given per support index.
GCPlan localize(const GCPlan& plan, const std::vector<char>& inside);

} // namespace nueg
