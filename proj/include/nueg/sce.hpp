#pragma once

#include "nueg/gcmeasure.hpp"
#include "nueg/simplex.hpp"

#include <string>

namespace nueg {

enum class SolverKind { ExactLP, Entropic };

struct EntropicOptions {
  double epsilon = 0.05;
  int max_iters = 50000;
  double tol = 1e-10;
};

struct SolverSpec {
  SolverKind kind = SolverKind::ExactLP;
  EntropicOptions entropic;
  long long budget = 0;  // 0: NUEG_BUDGET or the built-in default
  int nmax = 0;          // 0: ceil(total mass) + 2
  lp::Options lp;
};

struct SCEProblem {
  DiscreteDensity rho;
  RieszCost cost;
  SolverSpec solver;
};

struct EnergyReport {
  double f_sce = 0.0;
  double direct = 0.0;
  double indirect = 0.0;
  GCPlan plan;
  std::string solver_status;
  bool converged = true;
  double duality_gap = 0.0;
  double complementarity = 0.0;
  double min_reduced_cost = 0.0;
  double marginal_residual = 0.0;
  double epsilon = 0.0;
  long long config_count = 0;
  long long iterations = 0;
  int nmax = 0;
  bool cap_saturated = false;
  double cell_width = 0.0;
};

constexpr long long kDefaultBudget = 2000000;

// NUEG_BUDGET if set and valid, otherwise kDefaultBudget.
long long default_budget();
int default_nmax(const DiscreteDensity& rho);

// Number of repetition-free configurations with 1..nmax of m points.
long long configuration_count(int m, int nmax);
// Those configurations, ordered by size then lexicographically.
std::vector<std::vector<int>> enumerate_configurations(int m, int nmax);

// Global minimum of the grand-canonical SCE linear program. Throws
// InfeasibleError or BudgetError.
EnergyReport sce_exact(const SCEProblem& problem);

// Entropic (log-domain Sinkhorn) relaxation followed by rounding to a
// feasible plan; the reported value is the exact cost of that plan.
EnergyReport sce_entropic(const SCEProblem& problem);

EnergyReport solve_sce(const SCEProblem& problem);

// F_SCE - D with the direct term read on cells of width h.
EnergyReport indirect_energy(const DiscreteDensity& rho, const RieszCost& cost, const SolverSpec& solver, double h);

// Independent Bernoulli occupation of every point (requires w_i <= 1); its
// pair energy equals the off-diagonal direct term.
GCPlan tensor_product_plan(const DiscreteDensity& rho);

} // namespace nueg
