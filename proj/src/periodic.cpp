#include "nueg/periodic.hpp"
#include "nueg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nueg {

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

} // namespace nueg

namespace nueg::periodic {

Lattice::Lattice(Matrix basis) : basis_(std::move(basis)) {
  require(basis_.rows() == basis_.cols() && basis_.rows() >= 1 && basis_.rows() <= 3,
          "lattice basis must be d x d with d in {1,2,3}");
  volume_ = std::abs(basis_.determinant());
  require(volume_ > 1e-300, "lattice basis vectors are linearly dependent");
  inverse_ = basis_.inverse();
}

Lattice Lattice::cubic(int dim, double side) {
  return Lattice(Matrix::Identity(dim, dim) * side);
}

bool Lattice::is_orthogonal() const {
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (i != j && basis_(i, j) != 0.0) return false;
  for (int i = 0; i < dim(); ++i)
    if (basis_(i, i) <= 0.0) return false;
  return true;
}

Point Lattice::reduce(const Point& x) const {
  Point c = cell_coords(x);
  for (int k = 0; k < c.size(); ++k) {
    c[k] -= std::floor(c[k]);
    if (c[k] >= 1.0) c[k] = 0.0;
  }
  return c;
}

double Lattice::cell_boundary_measure() const {
  const int d = dim();
  if (d == 1) return 2.0;
  if (d == 2) return 2.0 * (basis_.col(0).norm() + basis_.col(1).norm());
  double area = 0.0;
  for (int k = 0; k < 3; ++k) {
    Vector3 a = basis_.col((k + 1) % 3), b = basis_.col((k + 2) % 3);
    area += 2.0 * a.cross(b).norm();
  }
  return area;
}

double Lattice::cell_diameter() const {
  const int d = dim();
  double best = 0.0;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Point v = Point::Zero(d);
    for (int k = 0; k < d; ++k) v += ((mask >> k) & 1 ? 1.0 : -1.0) * basis_.col(k);
    best = std::max(best, v.norm());
  }
  return best;
}

PeriodicField::PeriodicField(Lattice lattice, std::vector<int> shape, std::vector<double> samples,
                             Interpolation interp)
    : lattice_(std::move(lattice)), shape_(std::move(shape)), samples_(std::move(samples)),
      interp_(interp) {
  require(static_cast<int>(shape_.size()) == lattice_.dim(), "grid shape rank must equal dimension");
  std::size_t total = 1;
  for (int n : shape_) {
    require(n >= 1, "grid shape entries must be positive");
    total *= static_cast<std::size_t>(n);
  }
  require(samples_.size() == total, "sample count does not match grid shape");
  for (double v : samples_) require(std::isfinite(v) && v >= 0.0, "field samples must be finite and nonnegative");
  strides_.assign(shape_.size(), 1);
  for (int k = static_cast<int>(shape_.size()) - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * shape_[k + 1];
}

PeriodicField PeriodicField::constant(const Lattice& lattice, double value) {
  return PeriodicField(lattice, std::vector<int>(lattice.dim(), 1), {value});
}

PeriodicField PeriodicField::from_function(const Lattice& lattice, std::vector<int> shape,
                                           const std::function<double(const Point&)>& f,
                                           Interpolation interp) {
  std::size_t total = 1;
  for (int n : shape) total *= static_cast<std::size_t>(n);
  std::vector<double> samples(total, 0.0);
  PeriodicField probe(lattice, shape, samples, interp);
  for (std::size_t i = 0; i < total; ++i) samples[i] = f(probe.sample_position(i));
  return PeriodicField(lattice, std::move(shape), std::move(samples), interp);
}

std::vector<int> PeriodicField::unflatten(std::size_t flat) const {
  std::vector<int> idx(shape_.size());
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    idx[k] = static_cast<int>(flat / strides_[k]);
    flat %= strides_[k];
  }
  return idx;
}

std::size_t PeriodicField::flatten(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    int i = idx[k] % shape_[k];
    if (i < 0) i += shape_[k];
    flat += static_cast<std::size_t>(i) * strides_[k];
  }
  return flat;
}

Point PeriodicField::sample_position(std::size_t flat) const {
  auto idx = unflatten(flat);
  Point c(dim());
  for (int k = 0; k < dim(); ++k) c[k] = (idx[k] + 0.5) / shape_[k];
  return lattice_.to_cartesian(c);
}

double PeriodicField::eval_cell_coords(const Point& c) const {
  const int d = dim();
  if (interp_ == Interpolation::PiecewiseConstant) {
    std::size_t flat = 0;
    for (int k = 0; k < d; ++k) {
      int i = std::min(static_cast<int>(std::floor(c[k] * shape_[k])), shape_[k] - 1);
      flat += static_cast<std::size_t>(std::max(i, 0)) * strides_[k];
    }
    return samples_[flat];
  }
  int base[3];
  double frac[3];
  for (int k = 0; k < d; ++k) {
    double t = c[k] * shape_[k] - 0.5;
    double fl = std::floor(t);
    base[k] = static_cast<int>(fl);
    frac[k] = t - fl;
  }
  double value = 0.0;
  std::vector<int> idx(d);
  for (int mask = 0; mask < (1 << d); ++mask) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      int bit = (mask >> k) & 1;
      idx[k] = base[k] + bit;
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    if (w != 0.0) value += w * samples_[flatten(idx)];
  }
  return value;
}

double PeriodicField::operator()(const Point& x) const {
  return eval_cell_coords(lattice_.reduce(x));
}

double PeriodicField::min_sample() const { return *std::min_element(samples_.begin(), samples_.end()); }
double PeriodicField::max_sample() const { return *std::max_element(samples_.begin(), samples_.end()); }

PeriodicField PeriodicField::map(const std::function<double(double)>& g) const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), g);
  return PeriodicField(lattice_, shape_, std::move(out), interp_);
}

PeriodicField PeriodicField::rescaled(double factor) const {
  require(factor > 0.0, "rescale factor must be positive");
  return PeriodicField(Lattice(lattice_.basis() / factor), shape_, samples_, interp_);
}

double mean_value(const PeriodicField& field) {
  // Both interpolation rules integrate every sample's basis function to 1/N.
  const auto& s = field.samples();
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

namespace {

// Length of {y in [0, x] : y mod period in [s0, s1)} for any real x, with
// the convention F(x) = -F(-x)-style extension via floor.
double periodic_step_cumulative(double x, double period, double s0, double s1) {
  const double m = std::floor(x / period);
  const double r = x - m * period;
  return m * (s1 - s0) + std::clamp(r - s0, 0.0, s1 - s0);
}

// Integral from -inf-anchored origin of the periodized hat of half-width h
// centred at c: same floor bookkeeping as above.
double periodic_hat_cumulative(double x, double period, double c, double h) {
  const double u = x - (c - h);
  const double m = std::floor(u / period);
  const double t = u - m * period;
  double part;
  if (t <= h)
    part = t * t / (2.0 * h);
  else if (t <= 2.0 * h)
    part = h - (2.0 * h - t) * (2.0 * h - t) / (2.0 * h);
  else
    part = h;
  return m * h + part;
}

std::vector<double> axis_window_weights(const PeriodicField& field, int axis, double lo, double hi) {
  const int n = field.shape()[axis];
  const double period = field.lattice().basis()(axis, axis);
  std::vector<double> w(n);
  if (n == 1) {
    w[0] = hi - lo;
    return w;
  }
  const double cell = period / n;
  for (int i = 0; i < n; ++i) {
    if (field.interpolation() == Interpolation::PiecewiseConstant) {
      w[i] = periodic_step_cumulative(hi, period, i * cell, (i + 1) * cell) -
             periodic_step_cumulative(lo, period, i * cell, (i + 1) * cell);
    } else {
      const double c = (i + 0.5) * cell;
      w[i] = periodic_hat_cumulative(hi, period, c, cell) - periodic_hat_cumulative(lo, period, c, cell);
    }
  }
  return w;
}

} // namespace

MeanValueResult windowed_mean(const PeriodicField& field, const Point& center, double side) {
  require(side > 0.0, "window side must be positive");
  const int d = field.dim();
  require(center.size() == d, "window center dimension mismatch");
  MeanValueResult out;
  out.window_side = side;
  const double volume = std::pow(side, d);

  if (field.lattice().is_orthogonal()) {
    std::vector<std::vector<double>> w(d);
    for (int k = 0; k < d; ++k) w[k] = axis_window_weights(field, k, center[k] - side / 2, center[k] + side / 2);
    double integral = 0.0;
    for (std::size_t flat = 0; flat < field.size(); ++flat) {
      auto idx = field.unflatten(flat);
      double weight = 1.0;
      for (int k = 0; k < d; ++k) weight *= w[k][idx[k]];
      integral += weight * field.samples()[flat];
    }
    out.value = integral / volume;
  } else {
    // Composite midpoint rule on a grid no coarser than half the sample spacing.
    double spacing = field.lattice().cell_diameter();
    for (int n : field.shape()) spacing = std::min(spacing, field.lattice().cell_diameter() / n);
    int per_axis = std::max(8, static_cast<int>(std::ceil(2.0 * side / spacing)));
    const int cap = d == 3 ? 128 : (d == 2 ? 2048 : 1 << 20);
    per_axis = std::min(per_axis, cap);
    long long total = 1;
    for (int k = 0; k < d; ++k) total *= per_axis;
    double sum = 0.0;
    Point x(d);
    for (long long m = 0; m < total; ++m) {
      long long r = m;
      for (int k = 0; k < d; ++k) {
        x[k] = center[k] - side / 2 + (static_cast<double>(r % per_axis) + 0.5) * side / per_axis;
        r /= per_axis;
      }
      sum += field(x);
    }
    out.value = sum / static_cast<double>(total);
  }

  const auto& lat = field.lattice();
  const double c_cell = d * lat.cell_boundary_measure() / lat.cell_volume();
  const double abs_mean = mean_value(field); // samples are nonnegative
  out.error_bound = c_cell * lat.cell_volume() / side * abs_mean;
  return out;
}

double cell_average(const PeriodicField& field, const std::function<double(double)>& g) {
  const auto& s = field.samples();
  if (field.interpolation() == Interpolation::PiecewiseConstant) {
    double sum = 0.0;
    for (double v : s) sum += g(v);
    return sum / static_cast<double>(s.size());
  }
  // Multilinear: integrate over the dual sub-cells spanned by neighbouring samples.
  const int d = field.dim();
  const GaussRule rule = gauss_legendre(4, 0.0, 1.0);
  const int q = static_cast<int>(rule.nodes.size());
  int local_count = 1;
  for (int k = 0; k < d; ++k) local_count *= q;
  double total = 0.0;
  std::vector<int> idx(d);
  for (std::size_t flat = 0; flat < field.size(); ++flat) {
    auto base = field.unflatten(flat);
    double cell_sum = 0.0;
    for (int m = 0; m < local_count; ++m) {
      int r = m;
      double w = 1.0;
      double t[3];
      for (int k = 0; k < d; ++k) {
        t[k] = rule.nodes[r % q];
        w *= rule.weights[r % q];
        r /= q;
      }
      double value = 0.0;
      for (int mask = 0; mask < (1 << d); ++mask) {
        double cw = 1.0;
        for (int k = 0; k < d; ++k) {
          int bit = (mask >> k) & 1;
          idx[k] = base[k] + bit;
          cw *= bit ? t[k] : 1.0 - t[k];
        }
        value += cw * s[field.flatten(idx)];
      }
      cell_sum += w * g(value);
    }
    total += cell_sum;
  }
  return total / static_cast<double>(field.size());
}

double power_mean(const PeriodicField& field, double q) {
  require(q > 0.0, "power_mean exponent must be positive");
  return cell_average(field, [q](double v) { return std::pow(v, q); });
}

std::vector<Point> gradient(const PeriodicField& field) {
  const int d = field.dim();
  const Matrix inv_t = field.lattice().basis().inverse().transpose();
  std::vector<Point> out(field.size());
  const auto& s = field.samples();
  for (std::size_t flat = 0; flat < field.size(); ++flat) {
    auto idx = field.unflatten(flat);
    Point dc(d);
    for (int k = 0; k < d; ++k) {
      const int n = field.shape()[k];
      if (n < 3) {
        dc[k] = 0.0;
        continue;
      }
      auto up = idx, down = idx;
      up[k] += 1;
      down[k] -= 1;
      dc[k] = (s[field.flatten(up)] - s[field.flatten(down)]) * n / 2.0;
    }
    out[flat] = inv_t * dc;
  }
  return out;
}

double gradient_power_mean(const PeriodicField& field, const std::function<double(double)>& g, double p) {
  const PeriodicField mapped = field.map(g);
  const auto grads = gradient(mapped);
  double sum = 0.0;
  for (const auto& v : grads) sum += std::pow(v.norm(), p);
  return sum / static_cast<double>(grads.size());
}

} // namespace nueg::periodic
