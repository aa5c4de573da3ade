#include "nueg/gas.hpp"
#include "nueg/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nueg::gas {

double known_c_lo(int d, double s) { return (d == 3 && s == 1.0) ? constants::c_lo_3d : kNaN; }

const NodeValue* EnergyCache::find(const std::string& key) const {
  auto it = map_.find(key);
  if (it == map_.end()) return nullptr;
  ++hits_;
  return &it->second;
}

std::string density_key(const DiscreteDensity& rho) {
  std::ostringstream os;
  os << std::hexfloat << rho.d;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    os << '|';
    for (int k = 0; k < rho.d; ++k) os << rho.support[i][k] << ',';
    os << rho.weights[i];
  }
  return os.str();
}

DiscreteDensity cutoff_density(const periodic::PeriodicField& zeta, const geometry::Domain& domain,
                               const Matrix& rotation, const Point& shift, double h, int subsamples) {
  const int d = domain.dim();
  require(zeta.dim() == d, "field and domain dimensions differ");
  require(h > 0.0, "cell width must be positive");
  require(subsamples >= 1, "subsample count must be positive");
  const Point lo = domain.bbox_lo(), hi = domain.bbox_hi();
  std::vector<int> n(d);
  long long total = 1;
  for (int k = 0; k < d; ++k) {
    n[k] = std::max(1, static_cast<int>(std::ceil((hi[k] - lo[k]) / h - 1e-9)));
    total *= n[k];
  }
  DiscreteDensity rho;
  rho.d = d;
  std::vector<geometry::Halfspace> hs;
  if (d == 3) hs = domain.halfspaces();
  const double cell_volume = std::pow(h, d);
  for (long long flat = 0; flat < total; ++flat) {
    std::vector<int> idx(d);
    long long r = flat;
    for (int k = d - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(r % n[k]);
      r /= n[k];
    }
    Point c0(d);
    for (int k = 0; k < d; ++k) c0[k] = lo[k] + idx[k] * h;

    if (d == 1) {
      const double a0 = std::max(c0[0], lo[0]), a1 = std::min(c0[0] + h, hi[0]);
      const double len = a1 - a0;
      if (len <= 1e-14 * h) continue;
      Point centre = Point::Constant(1, 0.5 * (a0 + a1));
      const Point image = rotation * (centre - shift);
      const double w = periodic::windowed_mean(zeta, image, len).value * len;
      if (w <= 0.0) continue;
      rho.support.push_back(centre);
      rho.weights.push_back(w);
      continue;
    }

    double volume;
    if (d == 3) {
      volume = geometry::box_polytope_volume(Vector3(c0), Vector3(c0.array() + h), hs);
    } else {
      // 2D: fraction of a fine subsample lattice inside the polygon.
      const int q = 4 * subsamples;
      int in = 0;
      Point p(2);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
          p << c0[0] + (a + 0.5) * h / q, c0[1] + (b + 0.5) * h / q;
          if (domain.contains(p)) ++in;
        }
      volume = cell_volume * in / (q * q);
    }
    if (volume <= 1e-14 * cell_volume) continue;

    int q = subsamples;
    double sum = 0.0;
    int count = 0;
    Point centroid = Point::Zero(d);
    long long qd = 1;
    for (int attempt = 0; attempt < 2 && count == 0; ++attempt, q *= 4) {
      qd = 1;
      for (int k = 0; k < d; ++k) qd *= q;
      for (long long m = 0; m < qd; ++m) {
        Point p(d);
        long long t = m;
        for (int k = 0; k < d; ++k) {
          p[k] = c0[k] + (static_cast<double>(t % q) + 0.5) * h / q;
          t /= q;
        }
        if (!domain.contains(p)) continue;
        sum += zeta(rotation * (p - shift));
        centroid += p;
        ++count;
      }
    }
    Point centre = c0.array() + 0.5 * h;
    double mean;
    if (count == 0) {
      mean = zeta(rotation * (centre - shift));
    } else {
      mean = sum / count;
      if (count < qd) centre = centroid / count;
    }
    const double w = volume * mean;
    if (w <= 0.0) continue;
    rho.support.push_back(centre);
    rho.weights.push_back(w);
  }
  return rho;
}

std::vector<QuadratureNode> quadrature_nodes(const periodic::Lattice& lattice, int translations, int rotations,
                                             std::uint64_t seed) {
  require(translations >= 1, "translation grid must be positive");
  const int d = lattice.dim();
  const auto rots = geometry::so_quadrature(d, rotations, seed);
  long long per = 1;
  for (int k = 0; k < d; ++k) per *= translations;
  std::vector<QuadratureNode> nodes;
  for (const auto& r : rots)
    for (long long m = 0; m < per; ++m) {
      Point c(d);
      long long t = m;
      for (int k = d - 1; k >= 0; --k) {
        c[k] = static_cast<double>(t % translations) / translations;
        t /= translations;
      }
      nodes.push_back({r, lattice.to_cartesian(c)});
    }
  return nodes;
}

namespace {

std::string describe_node(const QuadratureNode& node) {
  std::ostringstream os;
  os << "rotation [";
  for (int i = 0; i < node.rotation.rows(); ++i)
    for (int j = 0; j < node.rotation.cols(); ++j) os << (i || j ? " " : "") << node.rotation(i, j);
  os << "], shift [";
  for (int k = 0; k < node.shift.size(); ++k) os << (k ? " " : "") << node.shift[k];
  os << "]";
  return os.str();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

std::vector<double> node_energies(const NUEGJob& job, int translations, int rotations, EnergyCache& cache,
                                  double* max_gap, std::vector<std::string>* statuses) {
  job.cost.validate();
  require(job.zeta.dim() == job.domain.dim() && job.cost.d == job.domain.dim(),
          "field, domain and cost dimensions must agree");
  const auto nodes = quadrature_nodes(job.zeta.lattice(), translations, rotations, job.quad.seed);
  std::vector<double> out;
  out.reserve(nodes.size());
  const double volume = job.domain.volume();
  for (const auto& node : nodes) {
    const DiscreteDensity rho =
        cutoff_density(job.zeta, job.domain, node.rotation, node.shift, job.quad.cell_width, job.quad.subsamples);
    const std::string key = density_key(rho);
    const NodeValue* hit = cache.find(key);
    NodeValue v;
    if (hit) {
      v = *hit;
    } else {
      try {
        const EnergyReport rep = indirect_energy(rho, job.cost, job.solver, job.quad.cell_width);
        v.indirect = rep.indirect;
        v.gap = job.solver.kind == SolverKind::ExactLP ? rep.duality_gap : std::abs(rep.duality_gap);
        v.status = rep.solver_status;
        if (rep.cap_saturated) v.status += ";nmax_saturated";
      } catch (const InfeasibleError& e) {
        throw InfeasibleError(std::string(e.what()) + " at node " + describe_node(node));
      } catch (const BudgetError& e) {
        throw BudgetError(std::string(e.what()) + " at node " + describe_node(node), e.required());
      }
      cache.store(key, v);
    }
    out.push_back(v.indirect / volume);
    if (max_gap) *max_gap = std::max(*max_gap, v.gap / volume);
    if (statuses) statuses->push_back(v.status);
  }
  return out;
}

EnergyPerVolume energy_per_volume(const NUEGJob& job, EnergyCache* cache) {
  EnergyCache local;
  EnergyCache& c = cache ? *cache : local;
  const int d = job.domain.dim();
  const int rot = d == 1 ? 1 : job.quad.rotations;
  const int rot2 = d == 1 ? 1 : 2 * job.quad.rotations;
  EnergyPerVolume out;
  double gap = 0.0;
  std::vector<std::string> statuses;
  const auto base = node_energies(job, job.quad.translations, rot, c, &gap, &statuses);
  const auto refined = node_energies(job, 2 * job.quad.translations, rot2, c, &gap, &statuses);
  out.base_value = mean(base);
  out.value = mean(refined);
  out.base_nodes = static_cast<int>(base.size());
  out.refined_nodes = static_cast<int>(refined.size());
  out.quadrature_delta = std::abs(out.value - out.base_value);
  out.solver_gap = gap;
  out.error_bar = out.quadrature_delta + gap;
  for (const auto& s : statuses)
    if (s != "optimal" && s != "converged" &&
        std::find(out.warnings.begin(), out.warnings.end(), s) == out.warnings.end())
      out.warnings.push_back(s);

  const double c_lo = std::isnan(job.c_lo) ? known_c_lo(d, job.cost.s) : job.c_lo;
  if (!std::isnan(c_lo)) out.apriori_lower = -c_lo * periodic::power_mean(job.zeta, 1.0 + job.cost.s / d);
  out.apriori_ok = out.value <= 1e-9 && (std::isnan(out.apriori_lower) || out.value >= out.apriori_lower);
  if (!out.apriori_ok) out.warnings.push_back("a-priori box violated");
  return out;
}

ThermoSequence dyadic_sequence(const periodic::PeriodicField& zeta, const RieszCost& cost,
                               const std::vector<int>& exponents, const QuadratureSpec& quad,
                               const SolverSpec& solver, EnergyCache* cache) {
  require(!exponents.empty(), "dyadic sequence needs at least one exponent");
  require(std::is_sorted(exponents.begin(), exponents.end()), "dyadic exponents must be ascending");
  EnergyCache local;
  EnergyCache& c = cache ? *cache : local;
  const int d = zeta.dim();
  ThermoSequence seq;
  for (int N : exponents) {
    const double side = std::ldexp(1.0, N);
    const geometry::Domain cube = geometry::Domain::cube(d, side, Point::Constant(d, side / 2.0));
    NUEGJob job{zeta, cube, cost, quad, solver};
    try {
      const EnergyPerVolume e = energy_per_volume(job, &c);
      NUEGJob finer = job;
      finer.quad.translations *= 2;
      const EnergyPerVolume e2 = energy_per_volume(finer, &c);
      seq.scales.push_back(side);
      seq.values.push_back(e.value);
      seq.errors.push_back(e.error_bar);
      seq.errors_refined.push_back(e2.error_bar);
      seq.status.push_back(e.warnings.empty() ? "ok" : e.warnings.front());
    } catch (const BudgetError& err) {
      seq.status.push_back(std::string("truncated: ") + err.what());
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < seq.values.size(); ++i)
    seq.monotone_ok.push_back(seq.values[i + 1] <= seq.values[i] + 2.0 * (seq.errors[i] + seq.errors[i + 1]));
  const double c_lo = known_c_lo(d, cost.s);
  if (!std::isnan(c_lo)) seq.floor = -c_lo * periodic::power_mean(zeta, 1.0 + cost.s / d);
  if (!seq.values.empty()) {
    seq.limit = seq.values.back();
    seq.limit_error = std::isnan(seq.floor) ? kNaN : seq.errors.back() + (seq.values.back() - seq.floor);
  }
  return seq;
}

LimitEstimate extrapolate_limit(const ThermoSequence& seq, const std::string& method) {
  require(seq.values.size() == seq.scales.size() && !seq.values.empty(), "sequence is empty");
  LimitEstimate out;
  out.method = method;
  if (method == "last") {
    out.limit = seq.values.back();
    out.error = seq.errors.empty() ? 0.0 : seq.errors.back();
    return out;
  }
  require(method == "fit_1_over_l", "unknown extrapolation method: " + method);
  require(seq.values.size() >= 2, "fitting needs at least two scales");
  const int n = static_cast<int>(seq.values.size());
  Matrix a(n, 2);
  Vector b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = 1.0 / seq.scales[i];
    b[i] = seq.values[i];
  }
  const Vector coef = a.colPivHouseholderQr().solve(b);
  out.limit = coef[0];
  out.error = std::sqrt((a * coef - b).squaredNorm() / n);
  return out;
}

TetraRateReport tetra_rate_check(const periodic::PeriodicField& zeta, const RieszCost& cost,
                                 const std::vector<double>& ells, const QuadratureSpec& quad,
                                 const SolverSpec& solver, EnergyCache* cache) {
  require(cost.d == 3 && cost.s == 1.0 && zeta.dim() == 3, "tetrahedron rate check is for d = 3, s = 1");
  require(ells.size() >= 2, "rate check needs at least two scales");
  EnergyCache local;
  EnergyCache& c = cache ? *cache : local;
  const double mz = periodic::mean_value(zeta);
  TetraRateReport rep;
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (double ell : ells) {
    NUEGJob job{zeta, geometry::Domain::tetrahedron(ell), cost, quad, solver};
    const EnergyPerVolume e = energy_per_volume(job, &c);
    TetraRateEntry t;
    t.ell = ell;
    t.value = e.value;
    t.error = e.error_bar;
    t.rate_term = constants::c_gs() * mz / ell;
    lo = std::max(lo, t.value - t.rate_term - t.error);
    hi = std::min(hi, t.value + t.error);
    t.bracket_lo = lo;
    t.bracket_hi = hi;
    t.width = hi - lo;
    rep.entries.push_back(t);
  }
  for (std::size_t i = 0; i < rep.entries.size(); ++i)
    for (std::size_t j = 0; j < rep.entries.size(); ++j) {
      if (i == j) continue;
      const auto& a = rep.entries[i];
      const auto& b = rep.entries[j];
      // e_b >= e_NUEG >= e_a - rate_a
      const double slack = b.value - (a.value - a.rate_term) + a.error + b.error;
      rep.slacks.push_back(slack);
      if (slack < 0.0) rep.consistent = false;
    }
  const int n = static_cast<int>(rep.entries.size());
  Matrix a(n, 2);
  Vector b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = 1.0 / rep.entries[i].ell;
    b[i] = rep.entries[i].width;
  }
  rep.width_slope = a.colPivHouseholderQr().solve(b)[1];
  return rep;
}

ScalingCheck nueg_scaling_identity(const NUEGJob& job, double lambda) {
  require(lambda > 0.0, "scaling factor must be positive");
  const int d = job.domain.dim();
  const double contract = std::pow(lambda, 1.0 / d);
  NUEGJob scaled = job;
  scaled.zeta = job.zeta.rescaled(contract).map([lambda](double v) { return lambda * v; });
  PointList verts;
  for (const auto& v : job.domain.vertices()) verts.push_back(v / contract);
  scaled.domain = job.domain.kind() == geometry::DomainKind::Cube
                      ? geometry::Domain::cube(d, job.domain.scale() / contract,
                                               (job.domain.bbox_lo() + job.domain.bbox_hi()) / (2.0 * contract))
                      : geometry::Domain::polytope(verts);
  scaled.quad.cell_width = job.quad.cell_width / contract;
  EnergyCache c1, c2;
  const int rot = d == 1 ? 1 : job.quad.rotations;
  const auto e1 = node_energies(job, job.quad.translations, rot, c1);
  const auto e2 = node_energies(scaled, job.quad.translations, rot, c2);
  ScalingCheck out;
  out.lambda = lambda;
  out.expected_ratio = std::pow(lambda, 1.0 + job.cost.s / d);
  out.nodes = static_cast<int>(e1.size());
  for (std::size_t i = 0; i < e1.size(); ++i) {
    const double expect = out.expected_ratio * e1[i];
    const double scale = std::max(std::abs(expect), 1e-300);
    out.max_relative_error = std::max(out.max_relative_error, expect == 0.0 && e2[i] == 0.0 ? 0.0 : std::abs(e2[i] - expect) / scale);
  }
  return out;
}

namespace {

// Tile label (z, j) of the tile R^T(l T_j(ref) + l z + tau) containing x.
std::array<int, 4> tile_label(const Vector3& x, const Matrix3& r, const Vector3& tau, double ell) {
  const Vector3 y = (r * x - tau) / ell;
  const Vector3 z(std::round(y[0]), std::round(y[1]), std::round(y[2]));
  int j = geometry::tiling24().locate(y - z, 1.0, -std::numeric_limits<double>::infinity());
  return {static_cast<int>(z[0]), static_cast<int>(z[1]), static_cast<int>(z[2]), j};
}

} // namespace

GrafSchenkerReport graf_schenker_check(const GCPlan& plan, double ell, const QuadratureSpec& quad) {
  require(plan.d == 3, "Graf-Schenker check is three-dimensional");
  require(ell > 0.0, "tile scale must be positive");
  plan.validate(1e-9);
  const RieszCost cost{3, 1.0, DiagonalRule::Excluded};
  const DiscreteDensity rho = density_of(plan);
  const double mass = rho.total_mass();
  GrafSchenkerReport rep;
  rep.lhs = riesz_energy(plan, cost) - direct_offdiagonal(rho, cost);
  const int m = static_cast<int>(plan.support.size());
  // Pair occupation P(i and j both present).
  Matrix pair = Matrix::Zero(m, m);
  for (const auto& c : plan.configs)
    for (std::size_t a = 0; a < c.points.size(); ++a)
      for (std::size_t b = a + 1; b < c.points.size(); ++b)
        if (c.points[a] != c.points[b]) {
          pair(c.points[a], c.points[b]) += c.weight;
          pair(c.points[b], c.points[a]) += c.weight;
        }

  auto average_rhs = [&](int translations, int rotations, double* best, double* cross, int* count) {
    const auto rots = geometry::so_quadrature(3, rotations, quad.seed);
    double sum = 0.0;
    int nodes = 0;
    for (const auto& rr : rots) {
      const Matrix3 r = rr;
      for (int a = 0; a < translations; ++a)
        for (int b = 0; b < translations; ++b)
          for (int c = 0; c < translations; ++c) {
            const Vector3 tau = ell * (Vector3(a + 0.5, b + 0.5, c + 0.5) / translations - Vector3::Constant(0.5));
            std::vector<std::array<int, 4>> label(m);
            for (int i = 0; i < m; ++i) label[i] = tile_label(plan.support[i], r, tau, ell);
            std::vector<std::array<int, 4>> tiles = label;
            std::sort(tiles.begin(), tiles.end());
            tiles.erase(std::unique(tiles.begin(), tiles.end()), tiles.end());
            double local = 0.0;
            for (const auto& t : tiles) {
              std::vector<char> in(m);
              for (int i = 0; i < m; ++i) in[i] = label[i] == t;
              const GCPlan loc = localize(plan, in);
              DiscreteDensity lr = density_of(loc);
              local += riesz_energy(loc, cost) - direct_offdiagonal(lr, cost);
            }
            double split = 0.0;
            for (int i = 0; i < m; ++i)
              for (int j = i + 1; j < m; ++j)
                if (label[i] != label[j])
                  split += (pair(i, j) - rho.weights[i] * rho.weights[j]) /
                           (plan.support[i] - plan.support[j]).norm();
            *cross = std::max(*cross, std::abs(rep.lhs - local - split));
            const double rhs = local - constants::c_gs() / ell * mass;
            *best = std::min(*best, rhs);
            sum += rhs;
            ++nodes;
          }
    }
    *count = nodes;
    return sum / nodes;
  };
  double best = std::numeric_limits<double>::infinity(), cross = 0.0;
  int n1 = 0, n2 = 0;
  rep.rhs_average = average_rhs(quad.translations, quad.rotations, &best, &cross, &n1);
  rep.rhs_refined = average_rhs(2 * quad.translations, 2 * quad.rotations, &best, &cross, &n2);
  rep.nodes = n1;
  rep.quadrature_error = std::abs(rep.rhs_refined - rep.rhs_average);
  rep.rhs_min = best;
  rep.cross_check = cross;
  rep.average_ok = rep.rhs_average <= rep.lhs + rep.quadrature_error;
  rep.pointwise_exists = best <= rep.lhs;
  return rep;
}

} // namespace nueg::gas
