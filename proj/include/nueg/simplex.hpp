#pragma once

#include "nueg/types.hpp"

namespace nueg::lp {

// minimize c^T x  subject to  A x = b, x >= 0, with b >= 0.
// A is stored column-wise (compressed sparse columns).
struct Problem {
  int rows = 0;
  std::vector<long long> col_start{0};
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> cost;
  Vector rhs;

  long long cols() const { return static_cast<long long>(cost.size()); }
  void add_column(const std::vector<int>& r, const std::vector<double>& v, double c);
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct Options {
  long long max_iterations = 200000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  int refactor_every = 50;
  int degenerate_before_bland = 50;
};

struct Result {
  Status status = Status::Infeasible;
  Vector x;                   // primal solution, size cols()
  double objective = 0.0;
  Vector duals;               // y with c_j - y^T A_j >= 0 at optimality
  std::vector<long long> basis;
  double min_reduced_cost = 0.0;
  double complementarity = 0.0;  // max_j x_j |reduced cost_j|
  double primal_residual = 0.0;  // ||A x - b||_inf
  double duality_gap = 0.0;      // |c^T x - b^T y|
  long long iterations = 0;
};

// Two-phase revised simplex with an explicit basis inverse. Dantzig pricing
// with lowest-index tie breaks; switches to Bland's rule after a run of
// degenerate pivots.
Result solve(const Problem& problem, const Options& options = {});

} // namespace nueg::lp
