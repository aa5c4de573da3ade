#pragma once

#include "nueg/gcmeasure.hpp"
#include "nueg/periodic.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace nueg::bounds {

struct ConstantsTable {
  double c_lo_3d = 0.0;
  double c_gs = 0.0;
  double c_tf = 0.0;
  double lieb_narnhofer_floor = 0.0;
  double c_mo(double p) const;
};

ConstantsTable constants_table();

// C(P) - D(rho_P) + c_LO sum_i w_i^{1+s/d} h^{-s}, points read as cells of
// width h (the same rule as direct_energy). Nonnegative when the inequality holds.
double lieb_oxford_slack(const GCPlan& plan, const RieszCost& cost, double c_lo, double h);

struct LDAParams {
  double p = 4.0;
  double theta = 1.0 / 3.0;

  // Throws naming the violated inequality.
  void validate() const;
  double b() const;
  double c_bound() const;  // 2.71 b (10/theta)^b
};

struct LDARhs {
  double b = 0.0;
  double c_bound = 0.0;
  double mass_term = 0.0;       // mean(zeta + zeta^{4/3})
  double gradient_term = 0.0;   // mean |grad zeta^theta|^p
  double epsilon = 0.0;
  double rhs = 0.0;             // eps M + C eps^{-b} G
  double optimal_epsilon = 0.0; // minimiser of the rhs in eps (0 when G = 0, inf when M = 0)
  double optimal_rhs = 0.0;
};

// zeta must be three-dimensional (the bound is for 3D Coulomb).
LDARhs lda_rhs(const periodic::PeriodicField& zeta, const LDAParams& params, double epsilon);

// Rhs for zeta(lambda .) at eps = lambda^{1/2}:
// lambda^{1/2} M + C lambda^{p - b/2} G.
double lda_rate_rhs(const periodic::PeriodicField& zeta, const LDAParams& params, double lambda);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct LDACheck {
  double rhs = 0.0;
  double m43 = 0.0;
  Interval lhs;          // range of e_NUEG - c_UEG mean(zeta^{4/3}) over the brackets
  bool consistent = true;  // some admissible |lhs| <= rhs
  bool vacuous = false;    // every admissible |lhs| <= rhs: the check cannot fail
};

LDACheck lda_check(const periodic::PeriodicField& zeta, const LDAParams& params, double epsilon,
                   const Interval& e_nueg, const Interval& c_ueg);

struct MorreyCheck {
  double p = 0.0;
  double c_mo = 0.0;
  double gradient_norm = 0.0;  // ||grad u||_{L^p(tetra)}
  double max_ratio = 0.0;      // max |u(x)-u(y)| / (|x-y|^{1-3/p} ||grad u||_p)
  int pairs = 0;
  bool ok = true;              // max_ratio <= c_mo
};

using ScalarFn = std::function<double(const Vector3&)>;
using GradientFn = std::function<Vector3(const Vector3&)>;

// On ell times the reference tetrahedron. Without `grad` central differences
// are used. The L^p norm uses Duffy-mapped Gauss-Legendre with `order` nodes per axis.
MorreyCheck morrey_check(double p, double ell, const ScalarFn& u, const GradientFn& grad, int pairs,
                         std::uint64_t seed, int order = 16);

struct AprioriTerms {
  double tf = 0.0;    // c_TF mean zeta^{5/3}
  double m43 = 0.0;   // mean zeta^{4/3}
  double grad = 0.0;  // mean |grad sqrt zeta|^2
};

AprioriTerms apriori_terms(const periodic::PeriodicField& zeta);

// 0 < eps <= 1/15.
double quantum_apriori_upper(const periodic::PeriodicField& zeta, double hbar, double eps);
// 0 < eps <= 3/5.
double quantum_apriori_lower(const periodic::PeriodicField& zeta, double hbar, double eps,
                             double c_lo = 1.58);

struct AprioriBounds {
  double upper = 0.0;
  double lower = 0.0;
  AprioriTerms terms;
};

AprioriBounds quantum_apriori(const periodic::PeriodicField& zeta, double hbar, double eps,
                              double c_lo = 1.58);

struct SemiclassicalBounds {
  double lt_lower = 0.0;
  double lls_upper = 0.0;
  double tf_integral = 0.0;    // c_TF int rho^{5/3} over the cell
  double grad_integral = 0.0;  // int |grad sqrt rho|^2 over the cell
};

// Integrals over one cell of the periodic rho. eps_lt <= 3/5, eps_lls <= 1/15.
SemiclassicalBounds lt_lls_rhs(const periodic::PeriodicField& rho, double eps_lt, double eps_lls,
                               double hbar = 1.0);

struct FourierOptions {
  int tau_per_axis = 16;
  int k_radius = 16;  // |k| <= k_radius 2 pi / ell
};

struct FourierIdentity {
  double lhs = 0.0;            // translation average of D(f(. - tau) rho)
  double rhs = 0.0;            // sum_k |f_k|^2 D_k(rho)
  double gap = 0.0;
  double relative_gap = 0.0;
  double tail_bound = 0.0;     // (mean f^2 - sum |f_k|^2) times max |D_k|
  long long k_terms = 0;
  int tau_nodes = 0;
};

// f on an orthogonal lattice of dimension rho.d. The direct term uses
// direct_energy with cell width h.
FourierIdentity fourier_direct_identity(const periodic::PeriodicField& f, const DiscreteDensity& rho,
                                        const RieszCost& cost, double h, const FourierOptions& opt = {});

struct SkeletonMean {
  double ell = 0.0;
  double delta = 0.0;
  double numeric = 0.0;
  double exact = 0.0;
  double error = 0.0;
  bool ok = true;
};

SkeletonMean skeleton_mean_check(double ell, double delta, double tol = 1e-4);

} // namespace nueg::bounds
