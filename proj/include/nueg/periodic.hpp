#pragma once

#include "nueg/types.hpp"

#include <functional>

namespace nueg::periodic {

// A lattice in R^d spanned by the columns of `basis`. The fundamental cell
// is the half-open parallelepiped B [0,1)^d anchored at the origin.
class Lattice {
public:
  explicit Lattice(Matrix basis);
  static Lattice cubic(int dim, double side = 1.0);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }
  double cell_volume() const { return volume_; }
  bool is_orthogonal() const;

  // Cell coordinates c with x = B c.
  Point cell_coords(const Point& x) const { return inverse_ * x; }
  // Unique representative of x's cell coordinates in [0,1)^d.
  Point reduce(const Point& x) const;
  Point to_cartesian(const Point& c) const { return basis_ * c; }

  // d-dimensional boundary measure of the unit cell (counting measure for d=1).
  double cell_boundary_measure() const;
  double cell_diameter() const;

private:
  Matrix basis_;
  Matrix inverse_;
  double volume_ = 0.0;
};

enum class Interpolation { PiecewiseConstant, Multilinear };

// Nonnegative lattice-periodic field sampled on an n_1 x ... x n_d grid of
// the unit cell. Sample i sits at cell coordinate (i + 1/2) / n.
class PeriodicField {
public:
  PeriodicField(Lattice lattice, std::vector<int> shape, std::vector<double> samples,
                Interpolation interp = Interpolation::PiecewiseConstant);

  static PeriodicField constant(const Lattice& lattice, double value);
  static PeriodicField from_function(const Lattice& lattice, std::vector<int> shape,
                                     const std::function<double(const Point&)>& f,
                                     Interpolation interp = Interpolation::PiecewiseConstant);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& samples() const { return samples_; }
  Interpolation interpolation() const { return interp_; }
  std::size_t size() const { return samples_.size(); }

  double operator()(const Point& x) const;

  // Cartesian position of sample `flat` inside the fundamental cell.
  Point sample_position(std::size_t flat) const;
  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::vector<int>& idx) const;

  double min_sample() const;
  double max_sample() const;

  // New field on the same grid with g applied to every sample.
  PeriodicField map(const std::function<double(double)>& g) const;
  // Same samples on the lattice scaled by `factor` (x -> x / factor).
  PeriodicField rescaled(double factor) const;

private:
  double eval_cell_coords(const Point& c) const;

  Lattice lattice_;
  std::vector<int> shape_;
  std::vector<int> strides_;
  std::vector<double> samples_;
  Interpolation interp_;
};

struct MeanValueResult {
  double value = 0.0;
  double error_bound = 0.0;
  double window_side = 0.0;
};

// Cell average under the field's interpolation rule.
double mean_value(const PeriodicField& field);

// Mean over the window C_L + a together with the boundary-cell bound
// (C_cell |cell| / L) * mean|u|, C_cell = d |boundary| / |cell|.
MeanValueResult windowed_mean(const PeriodicField& field, const Point& center, double side);

// Cell average of field^q.
double power_mean(const PeriodicField& field, double q);

// Cell average of g(field(x)); exact for piecewise-constant fields, tensor
// Gauss-Legendre on every sample sub-cell otherwise.
double cell_average(const PeriodicField& field, const std::function<double(double)>& g);

// Central finite-difference gradient at every sample, with periodic wrap.
std::vector<Point> gradient(const PeriodicField& field);

// Cell average of |grad g(field)|^p with g applied to samples first.
double gradient_power_mean(const PeriodicField& field, const std::function<double(double)>& g,
                           double p);

} // namespace nueg::periodic
