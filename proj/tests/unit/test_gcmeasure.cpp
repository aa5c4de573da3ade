#include "doctest.h"

#include "nueg/gcmeasure.hpp"
#include "support/corpus.hpp"

#include <cmath>
#include <random>

using namespace nueg;

namespace {

Point p3(double x, double y = 0.0, double z = 0.0) { return Vector3(x, y, z); }

GCPlan single(PointList support, std::vector<int> cfg, double w = 1.0) {
  GCPlan p;
  p.d = static_cast<int>(support[0].size());
  p.support = std::move(support);
  p.p0 = 1.0 - w;
  p.configs.push_back({std::move(cfg), w});
  return p;
}

// Random plan on m points of R^3 with up to four-point configurations.
GCPlan random_plan(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GCPlan p;
  p.d = 3;
  for (int i = 0; i < m; ++i) p.support.push_back(p3(4 * u(rng), 4 * u(rng), 4 * u(rng)));
  double total = 0.0;
  for (int k = 0; k < 6; ++k) {
    Configuration c;
    for (int i = 0; i < m; ++i)
      if (u(rng) < 0.5) c.points.push_back(i);
    if (c.points.empty() || c.points.size() > 4) continue;
    c.weight = u(rng);
    total += c.weight;
    p.configs.push_back(c);
  }
  const double scale = 0.9 / std::max(total, 1e-9);
  for (auto& c : p.configs) c.weight *= scale;
  p.p0 = 1.0 - total * scale;
  p.canonicalize();
  return p;
}

} // namespace

TEST_CASE("cost validation") {
  CHECK_NOTHROW(RieszCost{3, 1.0}.validate());
  CHECK_THROWS_AS((RieszCost{1, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((RieszCost{2, 0.0}.validate()), ValidationError);
}

TEST_CASE("density of a plan") {
  const PointList pts{p3(0), p3(2)};
  const auto one = density_of(single(pts, {0}));
  CHECK(one.weights[0] == doctest::Approx(1.0));
  CHECK(one.weights[1] == doctest::Approx(0.0));
  const auto two = density_of(single(pts, {0, 1}));
  CHECK(two.weights[0] == doctest::Approx(1.0));
  CHECK(two.weights[1] == doctest::Approx(1.0));
  GCPlan empty;
  empty.d = 3;
  empty.support = pts;
  empty.p0 = 1.0;
  CHECK(density_of(empty).total_mass() == 0.0);
}

TEST_CASE("pair energies") {
  const RieszCost coulomb{3, 1.0};
  CHECK(riesz_energy(single({p3(0), p3(5)}, {1}), coulomb) == 0.0);
  CHECK(riesz_energy(single({p3(0), p3(2)}, {0, 1}), coulomb) == doctest::Approx(0.5));
  const PointList tri{p3(0), p3(1), p3(0.5, std::sqrt(3.0) / 2)};
  CHECK(riesz_energy(single(tri, {0, 1, 2}), coulomb) == doctest::Approx(3.0));
  GCPlan rep = single({p3(0), p3(1)}, {0, 0});
  CHECK(std::isinf(riesz_energy(rep, coulomb)));
  CHECK(riesz_energy(rep, RieszCost{3, 1.0, DiagonalRule::Excluded}) == 0.0);
}

TEST_CASE("direct energy") {
  const RieszCost coulomb{3, 1.0};
  DiscreteDensity zero;
  zero.d = 3;
  CHECK(direct_energy(zero, coulomb, 0.1) == 0.0);

  DiscreteDensity two;
  two.d = 3;
  two.support = {p3(0), p3(4)};
  two.weights = {1.0, 1.0};
  CHECK(direct_offdiagonal(two, coulomb) == doctest::Approx(0.25));
  const double kappa = self_interaction_constant(3, 1.0);
  for (double h : {0.2, 0.05}) {
    const double self = 2.0 * kappa / (2.0 * std::pow(h, 1.0));
    CHECK(direct_energy(two, coulomb, h) - self == doctest::Approx(0.25));
  }
  // midpoint double quadrature of two uniform unit-mass cells of width 0.1
  const double h = 0.1;
  const int n = 6;
  double cross = 0.0;
  for (int a = 0; a < n * n * n; ++a)
    for (int b = 0; b < n * n * n; ++b) {
      const Vector3 x = h * (Vector3(a % n, (a / n) % n, a / (n * n)).array() + 0.5).matrix() / n;
      const Vector3 y = Vector3(4, 0, 0) + h * (Vector3(b % n, (b / n) % n, b / (n * n)).array() + 0.5).matrix() / n;
      cross += 1.0 / (x - y).norm();
    }
  cross /= std::pow(n, 6);
  CHECK(cross == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("self-interaction constant") {
  for (double s : {0.3, 0.5, 0.8})
    CHECK(self_interaction_constant(1, s) == doctest::Approx(2.0 / ((1.0 - s) * (2.0 - s))).epsilon(1e-8));
  // Monte Carlo over pairs of uniform points in the unit cube
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector3 x(u(rng), u(rng), u(rng)), y(u(rng), u(rng), u(rng));
    sum += 1.0 / (x - y).norm();
  }
  CHECK(self_interaction_constant(3, 1.0) == doctest::Approx(sum / n).epsilon(1e-2));
  CHECK_THROWS_AS(self_interaction_constant(1, 1.0), ValidationError);
}

TEST_CASE("localization") {
  const PointList pts{p3(0), p3(3)};
  const GCPlan pair = single(pts, {0, 1});
  const auto all = localize(pair, [](const Point&) { return true; });
  REQUIRE(all.configs.size() == 1);
  CHECK(all.configs[0].points == std::vector<int>{0, 1});
  CHECK(all.p0 == doctest::Approx(0.0));
  const auto none = localize(pair, [](const Point&) { return false; });
  CHECK(none.p0 == doctest::Approx(1.0));
  CHECK(none.total_probability() == doctest::Approx(1.0));
  const auto left = localize(pair, std::vector<char>{1, 0});
  CHECK(left.p0 == doctest::Approx(0.0));
  CHECK(left.layer_mass(1) == doctest::Approx(1.0));
  CHECK(left.layer_mass(2) == doctest::Approx(0.0));
}

TEST_CASE("localization restricts the density and drops cross terms") {
  std::mt19937_64 rng(12);
  const RieszCost cost{3, 1.0};
  for (int t = 0; t < 30; ++t) {
    const GCPlan p = random_plan(rng, 6);
    p.validate();
    std::vector<char> a(6), b(6);
    for (int i = 0; i < 6; ++i) b[i] = !(a[i] = static_cast<char>(rng() % 2));
    const auto pa = localize(p, a), pb = localize(p, b);
    pa.validate();
    pb.validate();
    const auto rho = density_of(p), ra = density_of(pa), rb = density_of(pb);
    for (int i = 0; i < 6; ++i) {
      CHECK(ra.weights[i] == doctest::Approx(a[i] ? rho.weights[i] : 0.0));
      CHECK(ra.weights[i] + rb.weights[i] == doctest::Approx(rho.weights[i]));
    }
    CHECK(riesz_energy(pa, cost) + riesz_energy(pb, cost) <= riesz_energy(p, cost) + 1e-12);
  }
}

TEST_CASE("plan validation") {
  GCPlan p = single({p3(0), p3(1)}, {0, 1}, 0.7);
  CHECK_NOTHROW(p.validate());
  p.p0 = 0.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("normalization"), ValidationError);
  DiscreteDensity bad;
  bad.d = 1;
  bad.support = {Point::Constant(1, 0.0)};
  bad.weights = {-0.1};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("nonnegative"), ValidationError);
}

TEST_CASE("tensor product plan reproduces the off-diagonal direct term") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto rho = corpus::random_density1d(rng, 5, 2.0);
    const RieszCost cost{1, 0.5};
    const GCPlan p = tensor_product_plan(rho);
    p.validate();
    const auto back = density_of(p);
    for (std::size_t i = 0; i < rho.size(); ++i) CHECK(back.weights[i] == doctest::Approx(rho.weights[i]));
    CHECK(riesz_energy(p, cost) == doctest::Approx(direct_offdiagonal(rho, cost)));
  }
}
