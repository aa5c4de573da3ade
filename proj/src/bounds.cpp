#include "nueg/bounds.hpp"
#include "nueg/constants.hpp"
#include "nueg/geometry.hpp"
#include "nueg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

namespace nueg::bounds {

double ConstantsTable::c_mo(double p) const {
  require(p > 3.0, "Morrey constant needs p > 3");
  return constants::c_mo(p);
}

ConstantsTable constants_table() {
  ConstantsTable t;
  t.c_lo_3d = constants::c_lo_3d;
  t.c_gs = constants::c_gs();
  t.c_tf = constants::c_tf();
  t.lieb_narnhofer_floor = constants::lieb_narnhofer_floor();
  return t;
}

double lieb_oxford_slack(const GCPlan& plan, const RieszCost& cost, double c_lo, double h) {
  cost.validate();
  require(h > 0.0, "Lieb-Oxford check needs a positive cell width");
  require(c_lo >= 0.0, "c_LO must be nonnegative");
  const DiscreteDensity rho = density_of(plan);
  const double c = riesz_energy(plan, cost);
  if (std::isinf(c)) return c;
  const double q = 1.0 + cost.s / cost.d;
  double integral = 0.0;
  for (double w : rho.weights) integral += std::pow(w, q);
  integral *= std::pow(h, -cost.s);
  return c - direct_energy(rho, cost, h) + c_lo * integral;
}

// ---- LDA --------------------------------------------------------------------

void LDAParams::validate() const {
  require(p > 3.0, "LDA parameters violate p > 3");
  require(theta > 0.0 && theta < 1.0, "LDA parameters violate 0 < theta < 1");
  require(theta * p >= 4.0 / 3.0 - 1e-12, "LDA parameters violate theta p >= 4/3");
}

double LDAParams::b() const { return std::min(2.0 * p - 1.0, (1.0 + 3.0 * theta) * p - 4.0); }

double LDAParams::c_bound() const {
  const double bb = b();
  return 2.71 * bb * std::pow(10.0 / theta, bb);
}

namespace {

double lda_mass(const periodic::PeriodicField& zeta) {
  return periodic::mean_value(zeta) + periodic::power_mean(zeta, 4.0 / 3.0);
}

double lda_gradient(const periodic::PeriodicField& zeta, const LDAParams& params) {
  const double th = params.theta;
  return periodic::gradient_power_mean(zeta, [th](double v) { return std::pow(std::max(v, 0.0), th); },
                                       params.p);
}

} // namespace

LDARhs lda_rhs(const periodic::PeriodicField& zeta, const LDAParams& params, double epsilon) {
  params.validate();
  require(zeta.dim() == 3, "LDA bound is stated for d = 3");
  require(epsilon > 0.0, "LDA epsilon must be positive");
  LDARhs r;
  r.b = params.b();
  r.c_bound = params.c_bound();
  r.mass_term = lda_mass(zeta);
  r.gradient_term = lda_gradient(zeta, params);
  r.epsilon = epsilon;
  r.rhs = epsilon * r.mass_term + r.c_bound * std::pow(epsilon, -r.b) * r.gradient_term;
  if (r.gradient_term > 0.0 && r.mass_term > 0.0) {
    r.optimal_epsilon = std::pow(r.b * r.c_bound * r.gradient_term / r.mass_term, 1.0 / (r.b + 1.0));
    r.optimal_rhs = r.optimal_epsilon * r.mass_term * (1.0 + 1.0 / r.b);
  } else if (r.gradient_term > 0.0) {
    r.optimal_epsilon = std::numeric_limits<double>::infinity();
    r.optimal_rhs = 0.0;
  } else {
    r.optimal_epsilon = 0.0;
    r.optimal_rhs = 0.0;
  }
  return r;
}

double lda_rate_rhs(const periodic::PeriodicField& zeta, const LDAParams& params, double lambda) {
  params.validate();
  require(zeta.dim() == 3, "LDA bound is stated for d = 3");
  require(lambda > 0.0, "slow-variation parameter must be positive");
  const double b = params.b();
  return std::sqrt(lambda) * lda_mass(zeta) +
         params.c_bound() * std::pow(lambda, params.p - b / 2.0) * lda_gradient(zeta, params);
}

LDACheck lda_check(const periodic::PeriodicField& zeta, const LDAParams& params, double epsilon,
                   const Interval& e_nueg, const Interval& c_ueg) {
  require(e_nueg.lo <= e_nueg.hi && c_ueg.lo <= c_ueg.hi, "brackets must satisfy lo <= hi");
  LDACheck out;
  out.rhs = lda_rhs(zeta, params, epsilon).rhs;
  out.m43 = periodic::power_mean(zeta, 4.0 / 3.0);
  out.lhs = {e_nueg.lo - c_ueg.hi * out.m43, e_nueg.hi - c_ueg.lo * out.m43};
  const double closest = (out.lhs.lo <= 0.0 && out.lhs.hi >= 0.0) ? 0.0
                         : std::min(std::abs(out.lhs.lo), std::abs(out.lhs.hi));
  const double farthest = std::max(std::abs(out.lhs.lo), std::abs(out.lhs.hi));
  out.consistent = closest <= out.rhs;
  out.vacuous = farthest <= out.rhs;
  return out;
}

// ---- Morrey -----------------------------------------------------------------

MorreyCheck morrey_check(double p, double ell, const ScalarFn& u, const GradientFn& grad, int pairs,
                         std::uint64_t seed, int order) {
  require(p > 3.0, "Morrey inequality needs p > 3");
  require(ell > 0.0 && pairs >= 1 && order >= 1, "invalid Morrey check parameters");
  const auto& ref = geometry::tiling24().reference;
  std::array<Vector3, 4> v;
  for (int i = 0; i < 4; ++i) v[i] = ell * ref[i];
  Matrix3 e;
  e << v[1] - v[0], v[2] - v[0], v[3] - v[0];
  const double jac = std::abs(e.determinant());

  const double step = 1e-6 * ell;
  auto gradient = [&](const Vector3& x) -> Vector3 {
    if (grad) return grad(x);
    Vector3 g;
    for (int k = 0; k < 3; ++k) {
      Vector3 a = x, b = x;
      a[k] += step;
      b[k] -= step;
      g[k] = (u(a) - u(b)) / (2.0 * step);
    }
    return g;
  };

  // Duffy map of the unit cube onto the simplex.
  const GaussRule g = gauss_legendre(order, 0.0, 1.0);
  double integral = 0.0;
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c) {
        const double s = g.nodes[a], t = g.nodes[b], r = g.nodes[c];
        const Vector3 xi(s, (1.0 - s) * t, (1.0 - s) * (1.0 - t) * r);
        const double w = g.weights[a] * g.weights[b] * g.weights[c] * (1.0 - s) * (1.0 - s) * (1.0 - t);
        integral += w * std::pow(gradient(v[0] + e * xi).norm(), p);
      }
  MorreyCheck out;
  out.p = p;
  out.c_mo = constants::c_mo(p);
  out.gradient_norm = std::pow(integral * jac, 1.0 / p);
  out.pairs = pairs;

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  auto sample = [&]() {
    double l[4], sum = 0.0;
    for (double& x : l) sum += (x = expo(rng));
    Vector3 x = Vector3::Zero();
    for (int i = 0; i < 4; ++i) x += (l[i] / sum) * v[i];
    return x;
  };
  for (int k = 0; k < pairs; ++k) {
    const Vector3 x = sample(), y = sample();
    const double diff = std::abs(u(x) - u(y));
    if (diff == 0.0) continue;
    const double denom = std::pow((x - y).norm(), 1.0 - 3.0 / p) * out.gradient_norm;
    const double ratio = denom > 0.0 ? diff / denom : std::numeric_limits<double>::infinity();
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  out.ok = out.max_ratio <= out.c_mo;
  return out;
}

// ---- Kinetic a-priori bounds ------------------------------------------------

AprioriTerms apriori_terms(const periodic::PeriodicField& zeta) {
  AprioriTerms t;
  t.tf = constants::c_tf() * periodic::power_mean(zeta, 5.0 / 3.0);
  t.m43 = periodic::power_mean(zeta, 4.0 / 3.0);
  t.grad = periodic::gradient_power_mean(zeta, [](double v) { return std::sqrt(std::max(v, 0.0)); }, 2.0);
  return t;
}

namespace {

void check_upper_eps(double eps) {
  require(eps > 0.0 && eps <= 1.0 / 15.0 + 1e-15, "upper bound needs 0 < eps <= 1/15");
}

void check_lower_eps(double eps) {
  require(eps > 0.0 && eps <= 0.6 + 1e-15, "lower bound needs 0 < eps <= 3/5");
}

double upper_from(const AprioriTerms& t, double hbar, double eps) {
  const double h2 = hbar * hbar;
  return (1.0 + eps) * h2 * t.tf + 38.0 * h2 / (15.0 * eps) * t.grad;
}

double lower_from(const AprioriTerms& t, double hbar, double eps, double c_lo) {
  const double h2 = hbar * hbar;
  return (1.0 - eps) * h2 * t.tf - c_lo * t.m43 - 20.0 * h2 / (27.0 * eps) * t.grad;
}

} // namespace

double quantum_apriori_upper(const periodic::PeriodicField& zeta, double hbar, double eps) {
  check_upper_eps(eps);
  require(zeta.dim() == 3, "a-priori bounds are stated for d = 3");
  return upper_from(apriori_terms(zeta), hbar, eps);
}

double quantum_apriori_lower(const periodic::PeriodicField& zeta, double hbar, double eps, double c_lo) {
  check_lower_eps(eps);
  require(zeta.dim() == 3, "a-priori bounds are stated for d = 3");
  return lower_from(apriori_terms(zeta), hbar, eps, c_lo);
}

AprioriBounds quantum_apriori(const periodic::PeriodicField& zeta, double hbar, double eps, double c_lo) {
  check_upper_eps(eps);
  check_lower_eps(eps);
  require(zeta.dim() == 3, "a-priori bounds are stated for d = 3");
  AprioriBounds out;
  out.terms = apriori_terms(zeta);
  out.upper = upper_from(out.terms, hbar, eps);
  out.lower = lower_from(out.terms, hbar, eps, c_lo);
  return out;
}

SemiclassicalBounds lt_lls_rhs(const periodic::PeriodicField& rho, double eps_lt, double eps_lls, double hbar) {
  check_lower_eps(eps_lt);
  check_upper_eps(eps_lls);
  require(rho.dim() == 3, "semiclassical bounds are stated for d = 3");
  const double vol = rho.lattice().cell_volume();
  const AprioriTerms t = apriori_terms(rho);
  const double h2 = hbar * hbar;
  SemiclassicalBounds out;
  out.tf_integral = t.tf * vol;
  out.grad_integral = t.grad * vol;
  out.lt_lower = h2 * ((1.0 - eps_lt) * out.tf_integral - 10.0 / (27.0 * eps_lt) * out.grad_integral);
  out.lls_upper = h2 * ((1.0 + eps_lls) * out.tf_integral + 19.0 / (15.0 * eps_lls) * out.grad_integral);
  return out;
}

// ---- Fourier form of the averaged direct term -------------------------------

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// |DFT|^2 / N^2 of the samples, indexed by the flat grid index of (m mod n).
std::vector<double> dft_power(const periodic::PeriodicField& f) {
  const auto& shape = f.shape();
  const int d = f.dim();
  const std::size_t n = f.size();
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto mi = f.unflatten(m);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto ji = f.unflatten(j);
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += static_cast<double>(mi[a]) * ji[a] / shape[a];
      acc += f.samples()[j] * std::polar(1.0, -2.0 * M_PI * phase);
    }
    out[m] = std::norm(acc) / (static_cast<double>(n) * n);
  }
  return out;
}

} // namespace

FourierIdentity fourier_direct_identity(const periodic::PeriodicField& f, const DiscreteDensity& rho,
                                        const RieszCost& cost, double h, const FourierOptions& opt) {
  cost.validate();
  rho.validate();
  require(f.dim() == rho.d && cost.d == rho.d, "field, density and cost dimensions differ");
  require(f.lattice().is_orthogonal(), "Fourier identity needs an orthogonal lattice");
  require(opt.tau_per_axis >= 1 && opt.k_radius >= 0, "invalid Fourier options");
  const int d = rho.d;
  const std::size_t m = rho.size();
  const auto& shape = f.shape();
  Vector sides(d);
  for (int a = 0; a < d; ++a) sides[a] = f.lattice().basis()(a, a);
  const bool pc = f.interpolation() == periodic::Interpolation::PiecewiseConstant;

  const double self = (cost.diagonal == DiagonalRule::Infinite && h > 0.0)
                          ? self_interaction_constant(d, cost.s) / (2.0 * std::pow(h, cost.s))
                          : 0.0;
  Matrix kern = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      kern(i, j) = kern(j, i) = cost.kernel((rho.support[i] - rho.support[j]).norm());

  FourierIdentity out;

  // Translation average of D(f(. - tau) rho).
  const int nt = opt.tau_per_axis;
  long long nodes = 1;
  for (int a = 0; a < d; ++a) nodes *= nt;
  out.tau_nodes = static_cast<int>(nodes);
  Vector g(m);
  double lhs = 0.0;
  for (long long t = 0; t < nodes; ++t) {
    Point tau(d);
    long long r = t;
    for (int a = 0; a < d; ++a) {
      tau[a] = sides[a] * ((r % nt) + 0.5) / nt;
      r /= nt;
    }
    for (std::size_t i = 0; i < m; ++i) g[i] = rho.weights[i] * f(rho.support[i] - tau);
    lhs += 0.5 * g.dot(kern * g) + self * g.squaredNorm();
  }
  out.lhs = lhs / static_cast<double>(nodes);

  // sum_k |f_k|^2 D_k with D_k the direct term of rho e^{i k x}.
  const std::vector<double> power = dft_power(f);
  double w2 = 0.0;
  for (double w : rho.weights) w2 += w * w;
  std::vector<std::pair<Point, double>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (rho.weights[i] * rho.weights[j] != 0.0)
        pairs.push_back({rho.support[i] - rho.support[j], rho.weights[i] * rho.weights[j] * kern(i, j)});
  double d_max = self * w2;
  for (const auto& pr : pairs) d_max += pr.second;

  const int kr = opt.k_radius;
  std::vector<int> mi(d, -kr);
  double rhs = 0.0, captured = 0.0;
  long long terms = 0;
  while (true) {
    long long norm2 = 0;
    for (int a = 0; a < d; ++a) norm2 += static_cast<long long>(mi[a]) * mi[a];
    if (norm2 <= static_cast<long long>(kr) * kr) {
      std::vector<int> wrapped(d);
      double damp = 1.0;
      Point k(d);
      for (int a = 0; a < d; ++a) {
        wrapped[a] = ((mi[a] % shape[a]) + shape[a]) % shape[a];
        k[a] = 2.0 * M_PI * mi[a] / sides[a];
        const double sc = sinc(k[a] * sides[a] / (2.0 * shape[a]));
        damp *= pc ? sc * sc : sc * sc * sc * sc;
      }
      const double fk2 = power[f.flatten(wrapped)] * damp;
      if (fk2 > 0.0) {
        double dk = self * w2;
        for (const auto& pr : pairs) dk += pr.second * std::cos(k.dot(pr.first));
        rhs += fk2 * dk;
      }
      captured += fk2;
      ++terms;
    }
    int a = 0;
    while (a < d && ++mi[a] > kr) mi[a++] = -kr;
    if (a == d) break;
  }
  out.rhs = rhs;
  out.k_terms = terms;
  const double f2 = periodic::cell_average(f, [](double v) { return v * v; });
  out.tail_bound = std::max(0.0, f2 - captured) * d_max;
  out.gap = std::abs(out.lhs - out.rhs);
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.relative_gap = scale > 0.0 ? out.gap / scale : 0.0;
  return out;
}

SkeletonMean skeleton_mean_check(double ell, double delta, double tol) {
  SkeletonMean out;
  out.ell = ell;
  out.delta = delta;
  out.numeric = periodic::mean_value(geometry::skeleton(ell, delta));
  out.exact = 1.0 - std::pow(1.0 - delta / ell, 3);
  out.error = std::abs(out.numeric - out.exact);
  out.ok = out.error <= tol;
  return out;
}

} // namespace nueg::bounds
