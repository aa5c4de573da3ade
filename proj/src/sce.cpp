#include "nueg/sce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace nueg {

long long default_budget() {
  if (const char* env = std::getenv("NUEG_BUDGET")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultBudget;
}

int default_nmax(const DiscreteDensity& rho) {
  return static_cast<int>(std::ceil(rho.total_mass() - 1e-12)) + 2;
}

long long configuration_count(int m, int nmax) {
  long long total = 0, binom = 1;
  for (int n = 1; n <= std::min(m, nmax); ++n) {
    binom = binom * (m - n + 1) / n;
    total += binom;
    if (total > (1LL << 60)) return total;
  }
  return total;
}

std::vector<std::vector<int>> enumerate_configurations(int m, int nmax) {
  std::vector<std::vector<int>> out;
  for (int n = 1; n <= std::min(m, nmax); ++n) {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = i;
    while (true) {
      out.push_back(c);
      int k = n - 1;
      while (k >= 0 && c[k] == m - n + k) --k;
      if (k < 0) break;
      ++c[k];
      for (int i = k + 1; i < n; ++i) c[i] = c[i - 1] + 1;
    }
  }
  return out;
}

namespace {

// The points that carry mass, plus the bookkeeping common to both solvers.
struct Reduced {
  DiscreteDensity rho;       // positive-weight points only
  std::vector<int> original; // index into the caller's support
  int nmax = 0;
  std::vector<std::vector<int>> configs;
  std::vector<double> costs;
};

Reduced prepare(const SCEProblem& pb) {
  pb.rho.validate();
  pb.cost.validate();
  require(pb.rho.d == pb.cost.d, "density and cost dimensions differ");
  Reduced r;
  r.rho.d = pb.rho.d;
  for (std::size_t i = 0; i < pb.rho.size(); ++i)
    if (pb.rho.weights[i] > 0.0) {
      r.rho.support.push_back(pb.rho.support[i]);
      r.rho.weights.push_back(pb.rho.weights[i]);
      r.original.push_back(static_cast<int>(i));
    }
  r.nmax = pb.solver.nmax > 0 ? pb.solver.nmax : default_nmax(pb.rho);
  const double mass = r.rho.total_mass();
  if (mass > r.nmax + 1e-12)
    throw InfeasibleError("total mass " + std::to_string(mass) + " exceeds Nmax " + std::to_string(r.nmax));
  for (double w : r.rho.weights)
    if (w > 1.0 + 1e-12)
      throw InfeasibleError("a point carries mass " + std::to_string(w) +
                            " > 1; repetition-free configurations cannot reach it");
  const int m = static_cast<int>(r.rho.size());
  const long long count = configuration_count(m, r.nmax);
  const long long budget = pb.solver.budget > 0 ? pb.solver.budget : default_budget();
  if (count > budget)
    throw BudgetError("configuration count " + std::to_string(count) + " exceeds budget " + std::to_string(budget),
                      count);
  r.configs = enumerate_configurations(m, r.nmax);
  r.costs.reserve(r.configs.size());
  for (const auto& c : r.configs) r.costs.push_back(pair_energy(r.rho.support, c, pb.cost));
  return r;
}

GCPlan lift_plan(const SCEProblem& pb, const Reduced& r, const std::vector<double>& q) {
  GCPlan plan;
  plan.d = pb.rho.d;
  plan.support = pb.rho.support;
  plan.nmax = r.nmax;
  double used = 0.0;
  for (std::size_t k = 0; k < r.configs.size(); ++k) {
    if (q[k] <= 0.0) continue;
    Configuration c;
    for (int i : r.configs[k]) c.points.push_back(r.original[i]);
    c.weight = q[k];
    used += q[k];
    plan.configs.push_back(std::move(c));
  }
  plan.p0 = std::max(0.0, 1.0 - used);
  return plan;
}

double marginal_residual(const GCPlan& plan, const DiscreteDensity& rho) {
  const DiscreteDensity got = density_of(plan);
  double res = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) res = std::max(res, std::abs(got.weights[i] - rho.weights[i]));
  return res;
}

void finish_report(EnergyReport& rep, const SCEProblem& pb, const Reduced& r) {
  rep.nmax = r.nmax;
  rep.config_count = static_cast<long long>(r.configs.size());
  rep.marginal_residual = marginal_residual(rep.plan, pb.rho);
  rep.cap_saturated = r.nmax < static_cast<int>(r.rho.size()) && rep.plan.layer_mass(r.nmax) > 1e-12;
}

EnergyReport trivial_report(const SCEProblem& pb, const Reduced& r, const char* status) {
  EnergyReport rep;
  rep.plan.d = pb.rho.d;
  rep.plan.support = pb.rho.support;
  rep.plan.p0 = 1.0;
  rep.plan.nmax = r.nmax;
  rep.solver_status = status;
  finish_report(rep, pb, r);
  return rep;
}

} // namespace

EnergyReport sce_exact(const SCEProblem& pb) {
  Reduced r = prepare(pb);
  const int m = static_cast<int>(r.rho.size());
  if (m == 0) return trivial_report(pb, r, "optimal");

  lp::Problem lpp;
  lpp.rows = m + 1;
  lpp.rhs = Vector(m + 1);
  for (int i = 0; i < m; ++i) lpp.rhs[i] = r.rho.weights[i];
  lpp.rhs[m] = 1.0;
  for (std::size_t k = 0; k < r.configs.size(); ++k) {
    std::vector<int> rows = r.configs[k];
    rows.push_back(m);
    lpp.add_column(rows, std::vector<double>(rows.size(), 1.0), r.costs[k]);
  }
  lpp.add_column({m}, {1.0}, 0.0);  // P0

  const lp::Result res = lp::solve(lpp, pb.solver.lp);
  if (res.status == lp::Status::Infeasible) throw InfeasibleError("the marginal constraints admit no plan");
  EnergyReport rep;
  rep.solver_status = lp::to_string(res.status);
  rep.converged = res.status == lp::Status::Optimal;
  rep.iterations = res.iterations;
  rep.duality_gap = res.duality_gap;
  rep.complementarity = res.complementarity;
  rep.min_reduced_cost = res.min_reduced_cost;
  std::vector<double> q(r.configs.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = res.x[static_cast<long long>(k)];
  rep.plan = lift_plan(pb, r, q);
  rep.plan.p0 = res.x[static_cast<long long>(r.configs.size())];
  rep.f_sce = riesz_energy(rep.plan, pb.cost);
  finish_report(rep, pb, r);
  if (rep.converged && (rep.marginal_residual > 1e-9 || std::abs(rep.f_sce - res.objective) > 1e-9)) {
    rep.converged = false;
    rep.solver_status = "certificate_failed";
  }
  return rep;
}

namespace {

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Turns a near-feasible plan into an exactly feasible one: scale down
// configurations through over-filled points, top up deficits with singletons,
// then merge disjoint configurations until the probabilities fit in [0,1].
bool round_plan(std::vector<double>& q, const Reduced& r, std::string& note) {
  const int m = static_cast<int>(r.rho.size());
  std::vector<std::vector<int>> member(m);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t k = 0; k < r.configs.size(); ++k) {
    index[r.configs[k]] = k;
    for (int i : r.configs[k]) member[i].push_back(static_cast<int>(k));
  }
  auto marginal = [&](int i) {
    double s = 0.0;
    for (int k : member[i]) s += q[k];
    return s;
  };
  for (int i = 0; i < m; ++i) {
    const double mi = marginal(i);
    if (mi > r.rho.weights[i]) {
      const double f = r.rho.weights[i] / mi;
      for (int k : member[i]) q[k] *= f;
    }
  }
  for (int i = 0; i < m; ++i) {
    const double deficit = r.rho.weights[i] - marginal(i);
    if (deficit > 0.0) q[index[{i}]] += deficit;
  }
  double total = 0.0;
  for (double v : q) total += v;
  int merges = 0;
  while (total > 1.0) {
    // Cheapest merge of a singleton with a disjoint configuration.
    double best = std::numeric_limits<double>::infinity();
    std::size_t bs = 0, bt = 0, bu = 0;
    for (int i = 0; i < m; ++i) {
      const std::size_t si = index[{i}];
      if (q[si] <= 0.0) continue;
      for (std::size_t t = 0; t < r.configs.size(); ++t) {
        if (t == si || q[t] <= 0.0) continue;
        const auto& ct = r.configs[t];
        if (static_cast<int>(ct.size()) + 1 > r.nmax || std::binary_search(ct.begin(), ct.end(), i)) continue;
        std::vector<int> u = ct;
        u.insert(std::upper_bound(u.begin(), u.end(), i), i);
        const std::size_t ui = index[u];
        const double delta = r.costs[ui] - r.costs[t];
        if (delta < best) {
          best = delta;
          bs = si;
          bt = t;
          bu = ui;
        }
      }
    }
    if (!std::isfinite(best)) {
      note = "rounding could not restore total probability <= 1";
      return false;
    }
    const double amount = std::min({q[bs], q[bt], total - 1.0});
    q[bs] -= amount;
    q[bt] -= amount;
    q[bu] += amount;
    total -= amount;
    if (++merges > 1000000) {
      note = "rounding merge limit reached";
      return false;
    }
  }
  return true;
}

} // namespace

EnergyReport sce_entropic(const SCEProblem& pb) {
  const EntropicOptions& opt = pb.solver.entropic;
  require(opt.epsilon > 0.0, "entropic epsilon must be positive");
  require(opt.max_iters > 0 && opt.tol > 0.0, "entropic iteration limits must be positive");
  Reduced r = prepare(pb);
  const int m = static_cast<int>(r.rho.size());
  if (m == 0) {
    EnergyReport rep = trivial_report(pb, r, "converged");
    rep.epsilon = opt.epsilon;
    return rep;
  }
  const double eps = opt.epsilon;
  const std::size_t k_count = r.configs.size();
  std::vector<std::vector<int>> member(m);
  for (std::size_t k = 0; k < k_count; ++k)
    for (int i : r.configs[k]) member[i].push_back(static_cast<int>(k));

  // log q_S = (-c_S + sum_{i in S} phi_i + psi) / eps, log P0 = psi / eps.
  std::vector<double> logq(k_count);
  for (std::size_t k = 0; k < k_count; ++k) logq[k] = -r.costs[k] / eps;
  double logp0 = 0.0;
  std::vector<double> buf;
  double residual = std::numeric_limits<double>::infinity();
  long long it = 0;
  for (; it < opt.max_iters; ++it) {
    for (int i = 0; i < m; ++i) {
      buf.clear();
      for (int k : member[i]) buf.push_back(logq[k]);
      const double shift = std::log(r.rho.weights[i]) - log_sum_exp(buf);
      for (int k : member[i]) logq[k] += shift;
    }
    buf.assign(logq.begin(), logq.end());
    buf.push_back(logp0);
    const double norm = log_sum_exp(buf);
    for (double& v : logq) v -= norm;
    logp0 -= norm;
    residual = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k : member[i]) s += std::exp(logq[k]);
      residual = std::max(residual, std::abs(s - r.rho.weights[i]));
    }
    if (residual <= opt.tol) break;
  }
  EnergyReport rep;
  rep.epsilon = eps;
  rep.iterations = it;
  rep.converged = residual <= opt.tol;
  rep.solver_status = rep.converged ? "converged" : "not_converged";

  std::vector<double> q(k_count);
  for (std::size_t k = 0; k < k_count; ++k) q[k] = std::exp(logq[k]);
  std::string note;
  if (!round_plan(q, r, note)) {
    rep.converged = false;
    rep.solver_status = note;
  }
  rep.plan = lift_plan(pb, r, q);
  rep.f_sce = riesz_energy(rep.plan, pb.cost);
  finish_report(rep, pb, r);
  // The residual of the unrounded Sinkhorn iterate is what convergence refers to.
  rep.duality_gap = residual;
  return rep;
}

EnergyReport solve_sce(const SCEProblem& pb) {
  return pb.solver.kind == SolverKind::ExactLP ? sce_exact(pb) : sce_entropic(pb);
}

EnergyReport indirect_energy(const DiscreteDensity& rho, const RieszCost& cost, const SolverSpec& solver, double h) {
  SCEProblem pb{rho, cost, solver};
  EnergyReport rep = solve_sce(pb);
  rep.cell_width = h;
  rep.direct = direct_energy(rho, cost, h);
  rep.indirect = rep.f_sce - rep.direct;
  return rep;
}

GCPlan tensor_product_plan(const DiscreteDensity& rho) {
  rho.validate();
  for (double w : rho.weights) require(w <= 1.0, "product plan needs every weight <= 1");
  const int m = static_cast<int>(rho.size());
  require(m <= 24, "product plan enumerates 2^M configurations; M <= 24");
  GCPlan plan;
  plan.d = rho.d;
  plan.support = rho.support;
  plan.nmax = m;
  plan.p0 = 0.0;
  for (long long mask = 0; mask < (1LL << m); ++mask) {
    double p = 1.0;
    std::vector<int> pts;
    for (int i = 0; i < m; ++i) {
      if ((mask >> i) & 1) {
        p *= rho.weights[i];
        pts.push_back(i);
      } else {
        p *= 1.0 - rho.weights[i];
      }
    }
    if (p == 0.0) continue;
    if (pts.empty())
      plan.p0 = p;
    else
      plan.configs.push_back({pts, p});
  }
  return plan;
}

} // namespace nueg
