#include "doctest.h"

#include "nueg/bounds.hpp"
#include "nueg/constants.hpp"
#include "nueg/sce.hpp"
#include "support/corpus.hpp"

#include <cmath>
#include <random>

using namespace nueg;
using namespace nueg::bounds;
using nueg::periodic::Interpolation;
using nueg::periodic::Lattice;
using nueg::periodic::PeriodicField;

TEST_CASE("constants table") {
  const auto t = constants_table();
  CHECK(t.c_lo_3d == 1.58);
  CHECK(t.c_gs == doctest::Approx(M_PI * (1 + 2 * std::sqrt(2.0)) / 4));
  CHECK(t.c_tf == doctest::Approx(0.6 * std::pow(6 * M_PI * M_PI, 2.0 / 3.0)));
  CHECK(t.lieb_narnhofer_floor == doctest::Approx(-0.6 * std::pow(4.5 * M_PI, 1.0 / 3.0)));
  CHECK(t.c_mo(4.0) == doctest::Approx(2 * std::pow(24.0, 0.25) * 3.0 / 5.0));
  CHECK_THROWS_AS(t.c_mo(3.0), ValidationError);
}

TEST_CASE("Lieb-Oxford slack") {
  const RieszCost coulomb{3, 1.0};
  GCPlan empty;
  empty.d = 3;
  empty.support = {Point(Vector3(0, 0, 0))};
  empty.p0 = 1.0;
  CHECK(lieb_oxford_slack(empty, coulomb, 1.58, 0.5) == 0.0);

  DiscreteDensity rho;
  rho.d = 3;
  rho.support = {Point(Vector3(0, 0, 0)), Point(Vector3(1, 0, 0))};
  rho.weights = {1.0, 1.0};
  const auto rep = sce_exact({rho, coulomb, SolverSpec{}});
  CHECK(lieb_oxford_slack(rep.plan, coulomb, 1.58, 0.5) >= 0.0);

  // one-particle plans: c_LO sum w^{4/3} h^{-1} - D >= 0
  GCPlan single;
  single.d = 3;
  single.support = rho.support;
  single.p0 = 0.2;
  single.configs = {{{0}, 0.5}, {{1}, 0.3}};
  const double slack = lieb_oxford_slack(single, coulomb, 1.58, 0.5);
  const auto d = density_of(single);
  const double expect = 1.58 * (std::pow(0.5, 4.0 / 3.0) + std::pow(0.3, 4.0 / 3.0)) / 0.5 -
                        direct_energy(d, coulomb, 0.5);
  CHECK(slack == doctest::Approx(expect));
  CHECK(slack >= 0.0);
}

TEST_CASE("LDA parameters") {
  const LDAParams a{4.0, 1.0 / 3.0};
  CHECK(a.b() == doctest::Approx(4.0));
  CHECK(a.c_bound() == doctest::Approx(2.71 * 4 * std::pow(30.0, 4)));
  const LDAParams b{6.0, 0.5};
  CHECK(b.b() == doctest::Approx(11.0));
  CHECK_THROWS_WITH_AS((LDAParams{3.0, 0.5}.validate()), doctest::Contains("p > 3"), ValidationError);
  CHECK_THROWS_WITH_AS((LDAParams{4.0, 1.5}.validate()), doctest::Contains("theta < 1"), ValidationError);
  CHECK_THROWS_WITH_AS((LDAParams{4.0, 0.2}.validate()), doctest::Contains("theta p >= 4/3"), ValidationError);
}

TEST_CASE("LDA right-hand side") {
  const auto c = PeriodicField::constant(Lattice::cubic(3), 0.8);
  const auto r = lda_rhs(c, LDAParams{}, 0.1);
  CHECK(r.gradient_term == 0.0);
  CHECK(r.rhs == doctest::Approx(0.1 * (0.8 + std::pow(0.8, 4.0 / 3.0))));
  CHECK(r.optimal_epsilon == 0.0);
  CHECK(r.optimal_rhs == 0.0);

  const auto f = corpus::fields3d()[2].field;
  const auto base = lda_rhs(f, LDAParams{}, 0.3);
  CHECK(base.gradient_term > 0.0);
  // The optimal epsilon beats its neighbours, and the rhs is convex in eps.
  const double e0 = base.optimal_epsilon;
  CHECK(base.optimal_rhs <= lda_rhs(f, LDAParams{}, 0.9 * e0).rhs + 1e-12);
  CHECK(base.optimal_rhs <= lda_rhs(f, LDAParams{}, 1.1 * e0).rhs + 1e-12);
  const double lo = lda_rhs(f, LDAParams{}, 0.2).rhs, mid = lda_rhs(f, LDAParams{}, 0.3).rhs,
               hi = lda_rhs(f, LDAParams{}, 0.4).rhs;
  CHECK(mid <= 0.5 * (lo + hi) + 1e-12);

  // zeta(lambda x): gradient term scales like lambda^p
  const double lam = 1e-2;
  const auto slow = lda_rhs(f.rescaled(lam), LDAParams{}, 0.3);
  CHECK(slow.gradient_term / base.gradient_term == doctest::Approx(std::pow(lam, 4.0)).epsilon(1e-9));
}

TEST_CASE("LDA consistency check") {
  const auto c = PeriodicField::constant(Lattice::cubic(3), 1.0);
  const Interval e{-1.0, -0.5}, cu{-1.0, -0.5};
  const auto chk = lda_check(c, LDAParams{}, 0.5, e, cu);
  CHECK(chk.lhs.lo <= 0.0);
  CHECK(chk.lhs.hi >= 0.0);
  CHECK(chk.consistent);
  CHECK(lda_check(corpus::fields3d()[1].field, LDAParams{}, 1e6, Interval{-5, 0}, Interval{-2, 0}).consistent);
  CHECK_THROWS_AS(lda_check(c, LDAParams{}, 0.5, Interval{1, 0}, cu), ValidationError);
}

TEST_CASE("Morrey inequality") {
  auto constant = [](const Vector3&) { return 2.0; };
  auto zero_grad = [](const Vector3&) { return Vector3(0, 0, 0); };
  CHECK(morrey_check(4.0, 1.0, constant, zero_grad, 100, 1).max_ratio == 0.0);

  const Vector3 v(0.3, -1.2, 0.7);
  auto linear = [&](const Vector3& x) { return v.dot(x); };
  auto grad = [&](const Vector3&) { return v; };
  const auto lin = morrey_check(4.0, 2.0, linear, grad, 1000, 2);
  CHECK(lin.pairs == 1000);
  CHECK(lin.max_ratio <= lin.c_mo);
  CHECK(lin.c_mo == doctest::Approx(constants::c_mo(4.0)));
  CHECK(lin.ok);
  // |grad u| constant: ||grad u||_p = |v| |T|^{1/p}
  CHECK(lin.gradient_norm == doctest::Approx(v.norm() * std::pow(8.0 / 24.0, 0.25)).epsilon(1e-10));

  auto bump = [](const Vector3& x) { return std::exp(-200.0 * x.squaredNorm()); };
  const auto sharp = morrey_check(6.0, 1.0, bump, nullptr, 500, 3, 24);
  CHECK(sharp.ok);
  CHECK_THROWS_AS(morrey_check(3.0, 1.0, linear, grad, 10, 1), ValidationError);
}

TEST_CASE("quantum a-priori bounds") {
  const double rho0 = 0.7;
  const auto c = PeriodicField::constant(Lattice::cubic(3), rho0);
  for (double hbar : {0.5, 1.0}) {
    const double eps = 1.0 / 30.0;
    const auto b = quantum_apriori(c, hbar, eps);
    CHECK(b.terms.grad == 0.0);
    CHECK(b.terms.tf == doctest::Approx(constants::c_tf() * std::pow(rho0, 5.0 / 3.0)));
    CHECK(b.lower <= b.upper);
  }
  CHECK_THROWS_AS(quantum_apriori_upper(c, 1.0, 0.1), ValidationError);
  CHECK_THROWS_AS(quantum_apriori_lower(c, 1.0, 0.7), ValidationError);
}

TEST_CASE("semiclassical bounds") {
  const auto c = PeriodicField::constant(Lattice::cubic(3, 2.0), 0.5);
  const auto b = lt_lls_rhs(c, 0.1, 0.05);
  CHECK(b.grad_integral == 0.0);
  CHECK(b.tf_integral == doctest::Approx(constants::c_tf() * std::pow(0.5, 5.0 / 3.0) * 8.0));
  CHECK(b.lt_lower <= b.lls_upper);
  const auto scaled = lt_lls_rhs(c.map([](double v) { return 3.0 * v; }), 0.1, 0.05);
  CHECK(scaled.tf_integral / b.tf_integral == doctest::Approx(std::pow(3.0, 5.0 / 3.0)));
  CHECK_THROWS_AS(lt_lls_rhs(c, 0.7, 0.05), ValidationError);
  CHECK_THROWS_AS(lt_lls_rhs(c, 0.1, 0.1), ValidationError);
}

TEST_CASE("Fourier identity") {
  const RieszCost coulomb{3, 1.0};
  const auto f = PeriodicField::constant(Lattice::cubic(3, 2.0), 1.7);
  DiscreteDensity rho;
  rho.d = 3;
  rho.support = {Point(Vector3(0, 0, 0)), Point(Vector3(0.5, 0.25, 0))};
  rho.weights = {0.6, 0.4};
  const auto r = fourier_direct_identity(f, rho, coulomb, 0.25, FourierOptions{4, 4});
  const double d = direct_energy(rho, coulomb, 0.25);
  CHECK(r.lhs == doctest::Approx(1.7 * 1.7 * d).epsilon(1e-9));
  CHECK(r.rhs == doctest::Approx(1.7 * 1.7 * d).epsilon(1e-6));

  DiscreteDensity none;
  none.d = 3;
  const auto z = fourier_direct_identity(f, none, coulomb, 0.25, FourierOptions{4, 4});
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
}

TEST_CASE("skeleton mean") {
  const auto m = skeleton_mean_check(2.0, 1.0);
  CHECK(m.exact == doctest::Approx(0.875));
  CHECK(m.ok);
  CHECK(skeleton_mean_check(4.0, 1.0).exact == doctest::Approx(1.0 - std::pow(0.75, 3)));
  CHECK(skeleton_mean_check(8.0, 1.0).ok);
  CHECK_THROWS_AS(skeleton_mean_check(64.0, 1.0), ValidationError);
}
