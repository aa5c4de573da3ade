#include "nueg/gcmeasure.hpp"
#include "nueg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace nueg {

void RieszCost::validate() const {
  require(d >= 1 && d <= 3, "cost dimension must be 1, 2 or 3");
  require(s > 0.0 && s < d, "Riesz exponent must satisfy 0 < s < d");
}

double DiscreteDensity::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

void DiscreteDensity::validate() const {
  require(d >= 1 && d <= 3, "density dimension must be 1, 2 or 3");
  require(support.size() == weights.size(), "density support and weights differ in length");
  for (std::size_t i = 0; i < support.size(); ++i) {
    require(support[i].size() == d && support[i].allFinite(), "density point has wrong dimension");
    require(std::isfinite(weights[i]) && weights[i] >= 0.0, "density weights must be nonnegative");
  }
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      require((support[i] - support[j]).norm() > 0.0, "density support points must be distinct");
}

double GCPlan::total_probability() const {
  double t = p0;
  for (const auto& c : configs) t += c.weight;
  return t;
}

double GCPlan::layer_mass(int n) const {
  if (n == 0) return p0;
  double t = 0.0;
  for (const auto& c : configs)
    if (static_cast<int>(c.points.size()) == n) t += c.weight;
  return t;
}

int GCPlan::max_particles() const {
  int n = 0;
  for (const auto& c : configs)
    if (c.weight > 0.0) n = std::max(n, static_cast<int>(c.points.size()));
  return n;
}

void GCPlan::canonicalize() {
  std::map<std::vector<int>, double> merged;
  for (auto& c : configs) {
    std::sort(c.points.begin(), c.points.end());
    if (c.points.empty())
      p0 += c.weight;
    else
      merged[c.points] += c.weight;
  }
  configs.clear();
  for (auto& [pts, w] : merged) configs.push_back({pts, w});
}

void GCPlan::validate(double tol) const {
  require(p0 >= -tol && p0 <= 1.0 + tol, "P0 must lie in [0,1]");
  const int m = static_cast<int>(support.size());
  for (const auto& p : support) require(p.size() == d, "plan support point has wrong dimension");
  for (const auto& c : configs) {
    require(!c.points.empty(), "configurations must be nonempty (P0 holds the empty one)");
    require(std::is_sorted(c.points.begin(), c.points.end()), "configuration indices must be sorted");
    require(std::isfinite(c.weight) && c.weight >= -tol, "configuration weights must be nonnegative");
    for (int i : c.points) require(i >= 0 && i < m, "configuration index out of range");
    if (nmax > 0) require(static_cast<int>(c.points.size()) <= nmax, "configuration exceeds Nmax");
  }
  require(std::abs(total_probability() - 1.0) <= tol, "plan normalization violated: total probability != 1");
}

double pair_energy(const PointList& support, const std::vector<int>& config, const RieszCost& cost) {
  double e = 0.0;
  for (std::size_t a = 0; a < config.size(); ++a)
    for (std::size_t b = a + 1; b < config.size(); ++b) {
      if (config[a] == config[b]) {
        if (cost.diagonal == DiagonalRule::Infinite) return std::numeric_limits<double>::infinity();
        continue;
      }
      e += cost.kernel((support[config[a]] - support[config[b]]).norm());
    }
  return e;
}

DiscreteDensity density_of(const GCPlan& plan) {
  DiscreteDensity rho;
  rho.d = plan.d;
  rho.support = plan.support;
  rho.weights.assign(plan.support.size(), 0.0);
  for (const auto& c : plan.configs)
    for (int i : c.points) rho.weights[i] += c.weight;
  return rho;
}

double riesz_energy(const GCPlan& plan, const RieszCost& cost) {
  double e = 0.0;
  for (const auto& c : plan.configs) {
    if (c.points.size() < 2 || c.weight == 0.0) continue;
    const double pe = pair_energy(plan.support, c.points, cost);
    if (std::isinf(pe)) return pe;
    e += c.weight * pe;
  }
  return e;
}

double direct_offdiagonal(const DiscreteDensity& rho, const RieszCost& cost) {
  double e = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho.weights[i] == 0.0) continue;
    for (std::size_t j = i + 1; j < rho.size(); ++j)
      e += rho.weights[i] * rho.weights[j] * cost.kernel((rho.support[i] - rho.support[j]).norm());
  }
  return e;
}

double direct_energy(const DiscreteDensity& rho, const RieszCost& cost, double h) {
  double e = direct_offdiagonal(rho, cost);
  if (cost.diagonal == DiagonalRule::Infinite && h > 0.0) {
    double w2 = 0.0;
    for (double w : rho.weights) w2 += w * w;
    e += w2 * self_interaction_constant(rho.d, cost.s) / (2.0 * std::pow(h, cost.s));
  }
  return e;
}

double self_interaction_constant(int d, double s) {
  require(d >= 1 && d <= 3 && s > 0.0 && s < d, "self-interaction constant needs 0 < s < d <= 3");
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({d, s});
  if (it != cache.end()) return it->second;

  // Split [0,1]^d into d pyramids by the largest coordinate r, write the others
  // as r w_k and integrate r analytically. Remaining integrand is smooth in w.
  auto radial = [&](const std::vector<double>& w) {
    std::vector<double> poly{1.0};  // coefficients in r of (1-r) prod (1 - r w_k)
    auto mul = [&](double c) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t j = 0; j < poly.size(); ++j) {
        next[j] += poly[j];
        next[j + 1] -= c * poly[j];
      }
      poly.swap(next);
    };
    mul(1.0);
    double w2 = 0.0;
    for (double x : w) {
      mul(x);
      w2 += x * x;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < poly.size(); ++j) sum += poly[j] / (d - s + static_cast<double>(j));
    return std::pow(1.0 + w2, -s / 2.0) * sum;
  };
  double integral = 0.0;
  if (d == 1) {
    integral = radial({});
  } else {
    const GaussRule g = gauss_legendre(24, 0.0, 1.0);
    const int q = static_cast<int>(g.nodes.size());
    std::vector<double> w(d - 1);
    long long count = 1;
    for (int k = 0; k < d - 1; ++k) count *= q;
    for (long long m = 0; m < count; ++m) {
      long long r = m;
      double weight = 1.0;
      for (int k = 0; k < d - 1; ++k) {
        w[k] = g.nodes[r % q];
        weight *= g.weights[r % q];
        r /= q;
      }
      integral += weight * radial(w);
    }
  }
  const double kappa = std::pow(2.0, d) * d * integral;
  cache[{d, s}] = kappa;
  return kappa;
}

GCPlan localize(const GCPlan& plan, const std::function<bool(const Point&)>& region) {
  std::vector<char> inside(plan.support.size());
  for (std::size_t i = 0; i < plan.support.size(); ++i) inside[i] = region(plan.support[i]) ? 1 : 0;
  return localize(plan, inside);
}

GCPlan localize(const GCPlan& plan, const std::vector<char>& inside) {
  require(inside.size() == plan.support.size(), "localization mask has wrong length");
  GCPlan out;
  out.d = plan.d;
  out.support = plan.support;
  out.nmax = plan.nmax;
  out.p0 = plan.p0;
  std::map<std::vector<int>, double> merged;
  for (const auto& c : plan.configs) {
    std::vector<int> kept;
    for (int i : c.points)
      if (inside[i]) kept.push_back(i);
    if (kept.empty())
      out.p0 += c.weight;
    else
      merged[kept] += c.weight;
  }
  for (auto& [pts, w] : merged) out.configs.push_back({pts, w});
  return out;
}

} // namespace nueg
