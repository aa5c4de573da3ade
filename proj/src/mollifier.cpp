#include "nueg/geometry.hpp"
#include "nueg/quadrature.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>

namespace nueg::geometry {

namespace {

double bump(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

// Integral of g over [a, b] by composite Gauss-Legendre.
template <class F>
double composite(F&& g, double a, double b, int panels, int order = 16) {
  static const GaussRule rule = gauss_legendre(16);
  (void)order;
  double sum = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w, half = 0.5 * w, mid = lo + half;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * half * g(mid + half * rule.nodes[i]);
  }
  return sum;
}

double sphere_measure(int d) { return d == 1 ? 2.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI); }

double unit_mass(int d) {
  static double cache[4] = {0, 0, 0, 0};
  if (cache[d] == 0.0)
    cache[d] = sphere_measure(d) * composite([d](double r) { return bump(r) * std::pow(r, d - 1); }, 0.0, 1.0, 64);
  return cache[d];
}

int fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

// In-place circular convolution of a real 3D array with a kernel given on the
// same grid (offset 0 at index 0, negative offsets wrapped).
void circular_convolve(std::vector<double>& data, const std::vector<double>& kernel, const std::array<int, 3>& shape) {
  using C = std::complex<double>;
  const std::size_t total = data.size();
  std::vector<C> a(total), k(total);
  for (std::size_t i = 0; i < total; ++i) {
    a[i] = data[i];
    k[i] = kernel[i];
  }
  Eigen::FFT<double> fft;
  auto transform = [&](std::vector<C>& v, bool inverse) {
    const std::size_t strides[3] = {static_cast<std::size_t>(shape[1]) * shape[2], static_cast<std::size_t>(shape[2]), 1};
    for (int axis = 0; axis < 3; ++axis) {
      const int n = shape[axis];
      if (n == 1) continue;
      std::vector<C> line(n), out(n);
      const std::size_t stride = strides[axis];
      for (std::size_t base = 0; base < total; ++base) {
        // Visit each line once: base must have zero coordinate along axis.
        if ((base / stride) % n != 0) continue;
        for (int i = 0; i < n; ++i) line[i] = v[base + i * stride];
        if (inverse)
          fft.inv(out, line);
        else
          fft.fwd(out, line);
        for (int i = 0; i < n; ++i) v[base + i * stride] = out[i];
      }
    }
  };
  transform(a, false);
  transform(k, false);
  for (std::size_t i = 0; i < total; ++i) a[i] *= k[i];
  transform(a, true);
  for (std::size_t i = 0; i < total; ++i) data[i] = a[i].real();
}

// Discrete kernel: eta sampled at grid offsets, normalised to unit sum, wrapped.
std::vector<double> wrapped_kernel(const Mollifier& m, double h, const std::array<int, 3>& shape) {
  std::vector<double> k(static_cast<std::size_t>(shape[0]) * shape[1] * shape[2], 0.0);
  const int reach = static_cast<int>(std::ceil(m.radius() / h));
  double sum = 0.0;
  Point x(3);
  for (int i = -reach; i <= reach; ++i)
    for (int j = -reach; j <= reach; ++j)
      for (int l = -reach; l <= reach; ++l) {
        x << i * h, j * h, l * h;
        const double v = m(x);
        if (v <= 0.0) continue;
        auto wrap = [](int a, int n) { return ((a % n) + n) % n; };
        const std::size_t idx =
            (static_cast<std::size_t>(wrap(i, shape[0])) * shape[1] + wrap(j, shape[1])) * shape[2] + wrap(l, shape[2]);
        k[idx] += v;
        sum += v;
      }
  for (double& v : k) v /= sum;
  return k;
}

void snap_unit_interval(std::vector<double>& v) {
  for (double& x : v) {
    x = std::clamp(x, 0.0, 1.0);
    if (x < 1e-12) x = 0.0;
    if (x > 1.0 - 1e-12) x = 1.0;
  }
}

std::vector<Halfspace> tetra_halfspaces(const std::array<Vector3, 4>& v) {
  std::vector<Halfspace> hs;
  const Vector3 c = (v[0] + v[1] + v[2] + v[3]) / 4.0;
  const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& f : faces) {
    Vector3 n = (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).normalized();
    double off = n.dot(v[f[0]]);
    if (n.dot(c) > off) {
      n = -n;
      off = -off;
    }
    hs.push_back({n, off});
  }
  return hs;
}

} // namespace

double Mollifier::operator()(const Point& x) const {
  const double R = radius();
  return bump(x.norm() / R) / (unit_mass(dim) * std::pow(R, dim));
}

double Mollifier::mass() const {
  require(delta > 0.0 && b > 0.0, "mollifier needs positive delta and b");
  const double R = radius();
  return sphere_measure(dim) *
         composite([&](double r) { return (*this)(Point::Constant(dim, 0.0) + Point::Unit(dim, 0) * r) * std::pow(r, dim - 1); },
                   0.0, R, 40);
}

double Mollifier::kinetic_constant() const {
  require(dim == 3, "kinetic constant is implemented for d = 3");
  // |grad eta|^2 / eta = bump(r) 4 r^2 / (1 - r^2)^4 for the unit profile.
  const double fisher = 4.0 * M_PI *
                        composite([](double r) { return bump(r) * 4.0 * std::pow(r, 4) / std::pow(1.0 - r * r, 4); },
                                  0.0, 1.0, 64) /
                        unit_mass(3);
  return 0.5 * fisher / b;
}

double Mollifier::half_space_constant() const {
  require(dim == 3, "kinetic constant is implemented for d = 3");
  // Marginal of the unit profile: m(t) = 2 pi int_{|t|}^1 eta(r) r dr.
  const double norm = unit_mass(3);
  auto marginal = [&](double t) {
    const double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    return 2.0 * M_PI * composite([](double r) { return bump(r) * r; }, a, 1.0, 4) / norm;
  };
  const int n = 20000;
  const double dt = 2.0 / n;
  double phi = 0.0, prev = 0.0, j = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t0 = -1.0 + i * dt;
    phi += composite(marginal, t0, t0 + dt, 1);
    const double root = std::sqrt(std::max(phi, 0.0));
    j += (root - prev) * (root - prev) / dt;
    prev = root;
  }
  return j / b;
}

double SmearedIndicator::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * h * h * h;
}

SmearedIndicator smear(const Domain& domain, const Mollifier& m, double h) {
  require(domain.dim() == 3 && m.dim == 3, "smeared indicators are three-dimensional");
  require(m.delta > 0.0 && m.b > 0.0 && m.b <= 1.0, "mollifier needs delta > 0 and 0 < b <= 1");
  if (h <= 0.0) h = m.delta / 10.0;
  require(m.delta / h >= 8.0 - 1e-12, "grid too coarse: fewer than 8 cells across delta");
  SmearedIndicator s;
  s.h = h;
  const double pad = m.radius() + 2.0 * h;
  Vector3 lo = Vector3(domain.bbox_lo()).array() - pad;
  Vector3 hi = Vector3(domain.bbox_hi()).array() + pad;
  for (int k = 0; k < 3; ++k) s.shape[k] = fft_size(static_cast<int>(std::ceil((hi[k] - lo[k]) / h)));
  s.origin = lo;
  s.values.assign(static_cast<std::size_t>(s.shape[0]) * s.shape[1] * s.shape[2], 0.0);

  const auto hs = domain.halfspaces();
  int from[3], to[3];
  for (int k = 0; k < 3; ++k) {
    from[k] = std::max(0, static_cast<int>(std::floor((domain.bbox_lo()[k] - lo[k]) / h)) - 1);
    to[k] = std::min(s.shape[k], static_cast<int>(std::ceil((domain.bbox_hi()[k] - lo[k]) / h)) + 1);
  }
  for (int i = from[0]; i < to[0]; ++i)
    for (int j = from[1]; j < to[1]; ++j)
      for (int l = from[2]; l < to[2]; ++l) {
        Vector3 c0 = lo + h * Vector3(i, j, l);
        s.values[s.index(i, j, l)] = box_polytope_volume(c0, c0 + Vector3::Constant(h), hs) / (h * h * h);
      }
  circular_convolve(s.values, wrapped_kernel(m, h, s.shape), s.shape);
  snap_unit_interval(s.values);

  double inradius = 0.0;
  for (int i = from[0]; i < to[0]; ++i)
    for (int j = from[1]; j < to[1]; ++j)
      for (int l = from[2]; l < to[2]; ++l) {
        Point c = s.cell_center(i, j, l);
        if (domain.contains(c)) inradius = std::max(inradius, domain.distance_to_boundary(c));
      }
  s.empty_core = m.radius() >= inradius;
  return s;
}

double smeared_kinetic(const SmearedIndicator& s) {
  std::vector<double> root(s.values.size());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = std::sqrt(s.values[i]);
  double sum = 0.0;
  for (int i = 0; i < s.shape[0]; ++i)
    for (int j = 0; j < s.shape[1]; ++j)
      for (int l = 0; l < s.shape[2]; ++l) {
        const double v = root[s.index(i, j, l)];
        if (i + 1 < s.shape[0]) sum += std::pow(root[s.index(i + 1, j, l)] - v, 2);
        if (j + 1 < s.shape[1]) sum += std::pow(root[s.index(i, j + 1, l)] - v, 2);
        if (l + 1 < s.shape[2]) sum += std::pow(root[s.index(i, j, l + 1)] - v, 2);
      }
  return sum * s.h;
}

double smeared_kinetic(const Domain& domain, const Mollifier& m, double h) {
  return smeared_kinetic(smear(domain, m, h));
}

periodic::PeriodicField smeared_tiles(double ell, double shrink, const Mollifier& m, int n) {
  require(ell > 0.0 && shrink > 0.0 && shrink <= 1.0 && n >= 1, "invalid smeared tile parameters");
  const double h = ell / n;
  const std::array<int, 3> shape{n, n, n};
  std::vector<double> frac(static_cast<std::size_t>(n) * n * n, 0.0);
  const auto& tiling = tiling24();
  auto wrap = [n](int a) { return ((a % n) + n) % n; };
  for (int t = 0; t < 24; ++t) {
    const auto v = tiling.tile_vertices(t, ell, shrink);
    const auto hs = tetra_halfspaces(v);
    Vector3 tlo = v[0], thi = v[0];
    for (const auto& p : v) {
      tlo = tlo.cwiseMin(p);
      thi = thi.cwiseMax(p);
    }
    int from[3], to[3];
    for (int k = 0; k < 3; ++k) {
      from[k] = static_cast<int>(std::floor(tlo[k] / h));
      to[k] = static_cast<int>(std::ceil(thi[k] / h));
    }
    for (int i = from[0]; i < to[0]; ++i)
      for (int j = from[1]; j < to[1]; ++j)
        for (int l = from[2]; l < to[2]; ++l) {
          const Vector3 c0 = h * Vector3(i, j, l);
          const double vol = box_polytope_volume(c0, c0 + Vector3::Constant(h), hs);
          if (vol > 0.0) frac[(static_cast<std::size_t>(wrap(i)) * n + wrap(j)) * n + wrap(l)] += vol / (h * h * h);
        }
  }
  circular_convolve(frac, wrapped_kernel(m, h, shape), shape);
  snap_unit_interval(frac);
  return periodic::PeriodicField(periodic::Lattice::cubic(3, ell), {n, n, n}, std::move(frac));
}

int skeleton_grid(double ell, double delta, const SkeletonOptions& opt) {
  return fft_size(static_cast<int>(std::ceil(ell * opt.cells_per_delta / delta - 1e-9)));
}

periodic::PeriodicField skeleton(double ell, double delta, const SkeletonOptions& opt) {
  require(ell > 0.0 && delta > 0.0, "skeleton needs positive ell and delta");
  require(delta <= ell / 2.0 + 1e-15, "skeleton requires delta <= ell/2");
  const int n = skeleton_grid(ell, delta, opt);
  require(n <= 256, "skeleton grid " + std::to_string(n) + "^3 exceeds 256^3; lower cells_per_delta");
  const double factor = (1.0 - std::pow(1.0 - delta / ell, 3)) / (1.0 - std::pow(1.0 - delta / (2.0 * ell), 3));
  Mollifier half{delta / 2.0, opt.b, 3};
  auto tiles = smeared_tiles(ell, 1.0 - delta / (2.0 * ell), half, n);
  return tiles.map([factor](double v) { return std::max(0.0, factor * (1.0 - v)); });
}

} // namespace nueg::geometry
