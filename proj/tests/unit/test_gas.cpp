#include "doctest.h"

#include "nueg/constants.hpp"
#include "nueg/gas.hpp"
#include "support/corpus.hpp"

#include <cmath>

using namespace nueg;
using namespace nueg::gas;
using nueg::periodic::Lattice;
using nueg::periodic::PeriodicField;

namespace {

QuadratureSpec quad(int translations, int rotations = 1, double h = 0.5) {
  QuadratureSpec q;
  q.translations = translations;
  q.rotations = rotations;
  q.cell_width = h;
  q.subsamples = 2;
  return q;
}

} // namespace

TEST_CASE("known Lieb-Oxford constants") {
  CHECK(known_c_lo(3, 1.0) == 1.58);
  CHECK(std::isnan(known_c_lo(1, 0.5)));
  CHECK(std::isnan(known_c_lo(3, 0.5)));
}

TEST_CASE("cutoff density carries the mass of zeta on the domain") {
  const auto dom = geometry::Domain::cube(1, 4.0, Point::Constant(1, 2.0));
  const auto step = corpus::step1d();
  const auto rho = cutoff_density(step, dom, Matrix::Identity(1, 1), Point::Zero(1), 0.5, 1);
  CHECK(rho.total_mass() == doctest::Approx(4.0));
  for (double w : rho.weights) CHECK((w == doctest::Approx(0.25) || w == doctest::Approx(0.75)));
}

TEST_CASE("constant zeta collapses the quadrature") {
  const auto zeta = PeriodicField::constant(Lattice::cubic(1), 0.8);
  NUEGJob job{zeta, geometry::Domain::cube(1, 2.0), RieszCost{1, 0.5}, quad(4), SolverSpec{}};
  const auto nodes = [&] {
    EnergyCache cache;
    return node_energies(job, 4, 1, cache);
  }();
  for (double v : nodes) CHECK(v == doctest::Approx(nodes[0]).epsilon(1e-12));
  const auto e = energy_per_volume(job);
  CHECK(e.quadrature_delta <= 1e-12);
  CHECK(e.value <= 0.0);
  // equals one direct solve on the domain
  const auto rho = cutoff_density(zeta, job.domain, Matrix::Identity(1, 1), Point::Zero(1), 0.5, 2);
  const double direct = indirect_energy(rho, job.cost, SolverSpec{}, 0.5).indirect / job.domain.volume();
  CHECK(e.value == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("zero zeta has zero energy") {
  const auto zeta = PeriodicField::constant(Lattice::cubic(1), 0.0);
  NUEGJob job{zeta, geometry::Domain::cube(1, 2.0), RieszCost{1, 0.5}, quad(2), SolverSpec{}};
  CHECK(energy_per_volume(job).value == 0.0);
  const auto seq = dyadic_sequence(zeta, RieszCost{1, 0.5}, {0, 1}, quad(2), SolverSpec{});
  for (double v : seq.values) CHECK(v == 0.0);

  const auto z3 = PeriodicField::constant(Lattice::cubic(3), 0.0);
  const auto rep = tetra_rate_check(z3, RieszCost{3, 1.0}, {1.0, 2.0}, quad(1, 2), SolverSpec{});
  for (double s : rep.slacks) CHECK(s == 0.0);
}

TEST_CASE("step zeta on an interval of length 4") {
  NUEGJob job{corpus::step1d(), geometry::Domain::cube(1, 4.0), RieszCost{1, 0.5}, quad(8), SolverSpec{}};
  const auto e = energy_per_volume(job);
  CHECK(e.value <= 0.0);
  CHECK(e.error_bar >= 0.0);
  CHECK(std::isnan(e.apriori_lower));
  CHECK(e.refined_nodes > e.base_nodes);
}

TEST_CASE("the Coulomb a-priori box holds on a 3D micro-run") {
  const auto zeta = PeriodicField::constant(Lattice::cubic(3), 0.8);
  NUEGJob job{zeta, geometry::Domain::cube(3, 1.0), RieszCost{3, 1.0}, quad(1, 2), SolverSpec{}};
  const auto e = energy_per_volume(job);
  CHECK(e.apriori_lower == doctest::Approx(-1.58 * std::pow(0.8, 4.0 / 3.0)));
  CHECK(e.value <= 0.0);
  CHECK(e.value >= e.apriori_lower);
  CHECK(e.apriori_ok);
}

TEST_CASE("limit extrapolation") {
  ThermoSequence flat;
  flat.scales = {1, 2, 4};
  flat.values = {-0.7, -0.7, -0.7};
  flat.errors = {0, 0, 0};
  for (const char* m : {"last", "fit_1_over_l"}) {
    const auto l = extrapolate_limit(flat, m);
    CHECK(l.limit == doctest::Approx(-0.7));
    CHECK(l.error == doctest::Approx(0.0).epsilon(1e-14));
  }
  ThermoSequence syn;
  const double e = -1.234;
  for (double ell : {4.0, 8.0, 16.0}) {
    syn.scales.push_back(ell);
    syn.values.push_back(e + 3.0 / ell);
  }
  CHECK(std::abs(extrapolate_limit(syn, "fit_1_over_l").limit - e) < 1e-10);
  CHECK_THROWS_AS(extrapolate_limit(syn, "cubic"), ValidationError);
}

TEST_CASE("dyadic step sequence") {
  const auto seq = dyadic_sequence(corpus::step1d(), RieszCost{1, 0.5}, {0, 1, 2}, quad(4), SolverSpec{});
  REQUIRE(seq.values.size() == 3);
  for (std::size_t i = 0; i + 1 < seq.values.size(); ++i)
    CHECK(seq.values[i + 1] <= seq.values[i] + 2.0 * (seq.errors[i] + seq.errors[i + 1]));
  const auto lim = extrapolate_limit(seq, "last");
  for (double v : seq.values) CHECK(lim.limit <= v + 1e-12);
}

TEST_CASE("scaling identity") {
  NUEGJob job{corpus::step1d(), geometry::Domain::cube(1, 2.0), RieszCost{1, 0.5}, quad(2), SolverSpec{}};
  const auto one = nueg_scaling_identity(job, 1.0);
  CHECK(one.expected_ratio == 1.0);
  CHECK(one.max_relative_error <= 1e-12);
  const auto four = nueg_scaling_identity(job, 4.0);
  CHECK(four.expected_ratio == doctest::Approx(8.0));
  CHECK(four.max_relative_error <= 1e-8);
}

TEST_CASE("energy per volume ignores where the domain sits") {
  const auto zeta = PeriodicField::constant(Lattice::cubic(1), 0.9);
  NUEGJob a{zeta, geometry::Domain::cube(1, 2.0), RieszCost{1, 0.5}, quad(2), SolverSpec{}};
  NUEGJob b = a;
  b.domain = geometry::Domain::cube(1, 2.0, Point::Constant(1, 7.3));
  CHECK(energy_per_volume(a).value == doctest::Approx(energy_per_volume(b).value).epsilon(1e-10));
}

TEST_CASE("Graf-Schenker on trivial plans") {
  GCPlan empty;
  empty.d = 3;
  empty.support = {Point(Vector3(0.1, 0.2, 0.3))};
  empty.p0 = 1.0;
  const auto r0 = graf_schenker_check(empty, 1.0, quad(2, 4));
  CHECK(r0.lhs == 0.0);
  CHECK(r0.average_ok);

  GCPlan far;
  far.d = 3;
  far.support = {Point(Vector3(0, 0, 0)), Point(Vector3(20, 0, 0))};
  far.p0 = 0.0;
  far.configs.push_back({{0, 1}, 1.0});
  const auto r = graf_schenker_check(far, 1.0, quad(2, 4));
  CHECK(r.average_ok);
  CHECK(r.pointwise_exists);
  CHECK(r.cross_check < 1e-9);
}
