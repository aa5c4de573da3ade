#pragma once

#include "nueg/geometry.hpp"
#include "nueg/periodic.hpp"
#include "nueg/sce.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>

namespace nueg::gas {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lieb-Oxford constant where one is known (3D Coulomb: 1.58), NaN otherwise.
double known_c_lo(int d, double s);

struct QuadratureSpec {
  int translations = 4;      // per lattice axis
  int rotations = 32;        // d = 3; angle count for d = 2; ignored for d = 1
  int subsamples = 4;        // per axis, for zeta averages over a cell in d >= 2
  double cell_width = 0.5;   // grid attached to the domain
  std::uint64_t seed = 0;
};

struct NUEGJob {
  periodic::PeriodicField zeta;
  geometry::Domain domain;
  RieszCost cost;
  QuadratureSpec quad;
  SolverSpec solver;
  double c_lo = kNaN;  // NaN: use known_c_lo
};

// Results of single LPs keyed by the exact density, so that repeated nodes
// (and the base grid inside the refined one) are solved once.
struct NodeValue {
  double indirect = 0.0;
  double gap = 0.0;
  std::string status;
};

class EnergyCache {
public:
  const NodeValue* find(const std::string& key) const;
  void store(const std::string& key, const NodeValue& v) { map_[key] = v; }
  std::size_t size() const { return map_.size(); }
  long long hits() const { return hits_; }

private:
  std::map<std::string, NodeValue> map_;
  mutable long long hits_ = 0;
};

std::string density_key(const DiscreteDensity& rho);

// 1_Omega(x) zeta(R(x - a)) on cells of width h attached to the domain's
// bounding box. Empty cells are dropped.
DiscreteDensity cutoff_density(const periodic::PeriodicField& zeta, const geometry::Domain& domain,
                               const Matrix& rotation, const Point& shift, double h, int subsamples);

struct QuadratureNode {
  Matrix rotation;
  Point shift;
};

std::vector<QuadratureNode> quadrature_nodes(const periodic::Lattice& lattice, int translations, int rotations,
                                             std::uint64_t seed);

// E(node) / |Omega| at every node of the given quadrature level.
std::vector<double> node_energies(const NUEGJob& job, int translations, int rotations, EnergyCache& cache,
                                  double* max_gap = nullptr, std::vector<std::string>* statuses = nullptr);

struct EnergyPerVolume {
  double value = 0.0;           // refined-level average
  double error_bar = 0.0;       // |refined - base| + solver gap
  double base_value = 0.0;
  double quadrature_delta = 0.0;
  double solver_gap = 0.0;
  int base_nodes = 0;
  int refined_nodes = 0;
  double apriori_lower = kNaN;  // -c_LO * mean zeta^{1+s/d}, NaN when c_LO unknown
  bool apriori_ok = true;
  std::vector<std::string> warnings;
};

EnergyPerVolume energy_per_volume(const NUEGJob& job, EnergyCache* cache = nullptr);

struct ThermoSequence {
  std::vector<double> scales;
  std::vector<double> values;
  std::vector<double> errors;          // at the requested quadrature
  std::vector<double> errors_refined;  // with the translation grid doubled
  std::vector<std::string> status;
  std::vector<bool> monotone_ok;       // step n -> n+1, size scales-1
  double floor = kNaN;                 // Lieb-Oxford floor when known
  double limit = 0.0;
  double limit_error = 0.0;
  std::string method = "last";
};

// Cubes of side 2^N for N in `exponents` (ascending).
ThermoSequence dyadic_sequence(const periodic::PeriodicField& zeta, const RieszCost& cost,
                               const std::vector<int>& exponents, const QuadratureSpec& quad,
                               const SolverSpec& solver, EnergyCache* cache = nullptr);

struct LimitEstimate {
  double limit = 0.0;
  double error = 0.0;
  std::string method;
};

// method: "last" or "fit_1_over_l".
LimitEstimate extrapolate_limit(const ThermoSequence& seq, const std::string& method);

struct TetraRateEntry {
  double ell = 0.0;
  double value = 0.0;
  double error = 0.0;
  double rate_term = 0.0;      // c_GS mean(zeta) / ell
  double bracket_lo = 0.0;     // running intersection of [e - rate, e]
  double bracket_hi = 0.0;
  double width = 0.0;
};

struct TetraRateReport {
  std::vector<TetraRateEntry> entries;
  std::vector<double> slacks;  // pairwise consistency slacks, >= 0 when satisfied
  bool consistent = true;
  double width_slope = 0.0;    // least-squares slope of width against 1/ell
};

TetraRateReport tetra_rate_check(const periodic::PeriodicField& zeta, const RieszCost& cost,
                                 const std::vector<double>& ells, const QuadratureSpec& quad,
                                 const SolverSpec& solver, EnergyCache* cache = nullptr);

struct ScalingCheck {
  double lambda = 1.0;
  double expected_ratio = 1.0;       // lambda^{1 + s/d}
  double max_relative_error = 0.0;   // node-wise
  int nodes = 0;
};

ScalingCheck nueg_scaling_identity(const NUEGJob& job, double lambda);

struct GrafSchenkerReport {
  double lhs = 0.0;              // C(P) - D(rho_P), point charges, diagonal dropped
  double rhs_average = 0.0;      // base quadrature
  double rhs_refined = 0.0;
  double quadrature_error = 0.0;
  double rhs_min = 0.0;          // best single node
  bool average_ok = true;        // rhs_average <= lhs + quadrature_error
  bool pointwise_exists = true;  // some node has rhs <= lhs
  double cross_check = 0.0;      // max |tile sum - pair formula| over nodes
  int nodes = 0;
};

GrafSchenkerReport graf_schenker_check(const GCPlan& plan, double ell, const QuadratureSpec& quad);

} // namespace nueg::gas
