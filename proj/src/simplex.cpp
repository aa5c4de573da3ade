#include "nueg/simplex.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace nueg::lp {

void Problem::add_column(const std::vector<int>& r, const std::vector<double>& v, double c) {
  for (std::size_t k = 0; k < r.size(); ++k) {
    row_index.push_back(r[k]);
    value.push_back(v[k]);
  }
  col_start.push_back(static_cast<long long>(row_index.size()));
  cost.push_back(c);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

class Solver {
public:
  Solver(const Problem& p, const Options& o) : p_(p), o_(o), m_(p.rows), n_(p.cols()) {}

  Result run() {
    Result res;
    require(p_.rhs.size() == m_, "LP right-hand side has wrong length");
    require((p_.rhs.array() >= 0.0).all(), "LP right-hand side must be nonnegative");
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
    binv_ = Matrix::Identity(m_, m_);
    xb_ = p_.rhs;

    phase1_ = true;
    Status st = iterate(res.iterations);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeas += std::max(0.0, xb_[i]);
    if (st == Status::IterationLimit) {
      res.status = st;
      return finish(res);
    }
    if (infeas > o_.feasibility_tol * (1.0 + p_.rhs.lpNorm<Eigen::Infinity>())) {
      res.status = Status::Infeasible;
      return finish(res);
    }
    phase1_ = false;
    res.status = iterate(res.iterations);
    return finish(res);
  }

private:
  double cost(long long j) const {
    if (j >= n_) return phase1_ ? 1.0 : 0.0;
    return phase1_ ? 0.0 : p_.cost[j];
  }

  Vector column(long long j) const {
    Vector a = Vector::Zero(m_);
    if (j >= n_) {
      a[j - n_] = 1.0;
      return a;
    }
    for (long long k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) a[p_.row_index[k]] += p_.value[k];
    return a;
  }

  double dot_column(const Vector& y, long long j) const {
    double s = 0.0;
    for (long long k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) s += y[p_.row_index[k]] * p_.value[k];
    return s;
  }

  void refactor() {
    Matrix b(m_, m_);
    for (int i = 0; i < m_; ++i) b.col(i) = column(basis_[i]);
    Eigen::FullPivLU<Matrix> lu(b);
    binv_ = lu.inverse();
    xb_ = binv_ * p_.rhs;
  }

  Vector duals() const {
    Vector cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost(basis_[i]);
    return binv_.transpose() * cb;
  }

  Status iterate(long long& iterations) {
    std::vector<char> in_basis(n_ + m_, 0);
    for (long long j : basis_) in_basis[j] = 1;
    int degenerate_run = 0;
    int since_refactor = 0;
    while (true) {
      if (iterations >= o_.max_iterations) return Status::IterationLimit;
      const Vector y = duals();
      const bool bland = degenerate_run >= o_.degenerate_before_bland;
      long long enter = -1;
      double best = -o_.optimality_tol;
      for (long long j = 0; j < n_; ++j) {
        if (in_basis[j]) continue;
        const double d = cost(j) - dot_column(y, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Status::Optimal;

      const Vector u = binv_ * column(enter);
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      constexpr double piv = 1e-11;
      for (int i = 0; i < m_; ++i) {
        double ratio;
        // Artificials stuck in the basis at zero during phase 2 must leave on any pivot touching them.
        if (!phase1_ && basis_[i] >= n_ && std::abs(u[i]) > piv)
          ratio = 0.0;
        else if (u[i] > piv)
          ratio = std::max(xb_[i], 0.0) / u[i];
        else
          continue;
        bool take = false;
        if (leave < 0 || ratio < theta - 1e-14) {
          take = true;
        } else if (ratio <= theta + 1e-14) {
          if (bland)
            take = basis_[i] < basis_[leave];
          else
            take = std::abs(u[i]) > std::abs(u[leave]) + 1e-14 ||
                   (std::abs(u[i]) >= std::abs(u[leave]) - 1e-14 && basis_[i] < basis_[leave]);
        }
        if (take) {
          leave = i;
          theta = std::min(theta, ratio);
        }
      }
      if (leave < 0) return Status::Unbounded;
      theta = std::max(xb_[leave], 0.0) / u[leave];
      if (!phase1_ && basis_[leave] >= n_) theta = 0.0;

      for (int i = 0; i < m_; ++i) xb_[i] -= theta * u[i];
      xb_[leave] = theta;
      const double pivot = u[leave];
      binv_.row(leave) /= pivot;
      for (int i = 0; i < m_; ++i)
        if (i != leave && u[i] != 0.0) binv_.row(i) -= u[i] * binv_.row(leave);
      in_basis[basis_[leave]] = 0;
      in_basis[enter] = 1;
      basis_[leave] = enter;
      ++iterations;
      degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
      if (++since_refactor >= o_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  Result& finish(Result& res) {
    refactor();
    phase1_ = false;
    res.x = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = std::max(xb_[i], 0.0);
    res.objective = 0.0;
    for (long long j = 0; j < n_; ++j) res.objective += p_.cost[j] * res.x[j];
    res.duals = duals();
    res.basis = basis_;
    res.min_reduced_cost = std::numeric_limits<double>::infinity();
    res.complementarity = 0.0;
    Vector ax = Vector::Zero(m_);
    for (long long j = 0; j < n_; ++j) {
      const double d = p_.cost[j] - dot_column(res.duals, j);
      res.min_reduced_cost = std::min(res.min_reduced_cost, d);
      res.complementarity = std::max(res.complementarity, res.x[j] * std::abs(d));
      if (res.x[j] != 0.0)
        for (long long k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) ax[p_.row_index[k]] += p_.value[k] * res.x[j];
    }
    if (n_ == 0) res.min_reduced_cost = 0.0;
    res.primal_residual = (ax - p_.rhs).lpNorm<Eigen::Infinity>();
    res.duality_gap = std::abs(res.objective - p_.rhs.dot(res.duals));
    return res;
  }

  const Problem& p_;
  const Options& o_;
  int m_;
  long long n_;
  bool phase1_ = true;
  std::vector<long long> basis_;
  Matrix binv_;
  Vector xb_;
};

} // namespace

Result solve(const Problem& problem, const Options& options) {
  require(problem.rows >= 1, "LP needs at least one row");
  require(static_cast<long long>(problem.col_start.size()) == problem.cols() + 1, "LP column index is inconsistent");
  return Solver(problem, options).run();
}

} // namespace nueg::lp
