#include "nueg/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace nueg::io {

namespace {

const char* interp_name(periodic::Interpolation i) {
  return i == periodic::Interpolation::Multilinear ? "multilinear" : "piecewise-constant";
}

const char* diagonal_name(DiagonalRule r) { return r == DiagonalRule::Infinite ? "infinite" : "excluded"; }

template <class T>
T get(const Json& j, const char* key) {
  require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

Point point_from(const Json& j, int d) {
  require(j.is_array() && static_cast<int>(j.size()) == d, "point has wrong dimension");
  Point p(d);
  for (int k = 0; k < d; ++k) {
    require(j[k].is_number(), "point coordinate is not a number");
    p[k] = j[k].get<double>();
  }
  return p;
}

PointList points_from(const Json& j, int d) {
  require(j.is_array(), "support must be an array of points");
  PointList out;
  for (const auto& e : j) out.push_back(point_from(e, d));
  return out;
}

} // namespace

Json to_json(const Point& p) {
  Json a = Json::array();
  for (int k = 0; k < p.size(); ++k) a.push_back(p[k]);
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

Json to_json(const RieszCost& cost) {
  return {{"d", cost.d}, {"s", cost.s}, {"diagonal", diagonal_name(cost.diagonal)}};
}

Json to_json(const periodic::PeriodicField& field) {
  const Matrix& b = field.lattice().basis();
  std::vector<double> basis;
  for (int r = 0; r < b.rows(); ++r)
    for (int c = 0; c < b.cols(); ++c) basis.push_back(b(r, c));
  return {{"type", "field"},
          {"dimension", field.dim()},
          {"basis", basis},
          {"shape", field.shape()},
          {"samples", field.samples()},
          {"interpolation", interp_name(field.interpolation())}};
}

Json to_json(const DiscreteDensity& rho) {
  Json sup = Json::array();
  for (const auto& p : rho.support) sup.push_back(to_json(p));
  return {{"type", "density"}, {"d", rho.d}, {"support", sup}, {"weights", rho.weights}};
}

Json to_json(const GCPlan& plan) {
  Json sup = Json::array();
  for (const auto& p : plan.support) sup.push_back(to_json(p));
  std::map<int, Json> layers;
  for (const auto& c : plan.configs) {
    Json e = Json::array();
    for (int i : c.points) e.push_back(i);
    e.push_back(c.weight);
    layers[static_cast<int>(c.points.size())].push_back(e);
  }
  Json ls = Json::array();
  for (auto& [n, entries] : layers) ls.push_back({{"n", n}, {"entries", entries}});
  return {{"type", "plan"}, {"d", plan.d}, {"support", sup}, {"P0", plan.p0}, {"nmax", plan.nmax}, {"layers", ls}};
}

Json to_json(const geometry::Domain& domain) {
  const char* kind = domain.kind() == geometry::DomainKind::Cube          ? "cube"
                     : domain.kind() == geometry::DomainKind::Tetrahedron ? "tetrahedron"
                                                                           : "polytope";
  Json verts = Json::array();
  for (const auto& v : domain.vertices()) verts.push_back(to_json(v));
  return {{"kind", kind},
          {"dimension", domain.dim()},
          {"scale", domain.scale()},
          {"volume", domain.volume()},
          {"boundary_area", domain.boundary_area()},
          {"vertices", verts}};
}

Json to_json(const geometry::Tiling24& tiling) {
  Json tiles = Json::array();
  for (int j = 0; j < 24; ++j)
    tiles.push_back({{"rotation", to_json(Matrix(tiling.rotation[j]))}, {"shift", to_json(Point(tiling.shift[j]))}});
  Json ref = Json::array();
  for (const auto& v : tiling.reference) ref.push_back(to_json(Point(v)));
  return {{"type", "tiling24"}, {"reference", ref}, {"tiles", tiles}};
}

Json to_json(const SolverSpec& solver) {
  Json j = {{"kind", solver.kind == SolverKind::ExactLP ? "exact_lp" : "entropic"},
            {"budget", solver.budget == 0 ? default_budget() : solver.budget},
            {"nmax", solver.nmax}};
  if (solver.kind == SolverKind::Entropic)
    j["entropic"] = {{"epsilon", solver.entropic.epsilon},
                     {"max_iters", solver.entropic.max_iters},
                     {"tol", solver.entropic.tol}};
  return j;
}

Json to_json(const gas::QuadratureSpec& quad) {
  return {{"translations", quad.translations},
          {"rotations", quad.rotations},
          {"subsamples", quad.subsamples},
          {"cell_width", quad.cell_width},
          {"seed", quad.seed}};
}

Json to_json(const EnergyReport& r, bool with_plan) {
  Json j = {{"f_sce", r.f_sce},
            {"direct", r.direct},
            {"indirect", r.indirect},
            {"solver_status", r.solver_status},
            {"converged", r.converged},
            {"duality_gap", r.duality_gap},
            {"complementarity", r.complementarity},
            {"min_reduced_cost", r.min_reduced_cost},
            {"marginal_residual", r.marginal_residual},
            {"epsilon", r.epsilon},
            {"config_count", r.config_count},
            {"iterations", r.iterations},
            {"nmax", r.nmax},
            {"cap_saturated", r.cap_saturated},
            {"cell_width", r.cell_width}};
  if (with_plan) j["plan"] = to_json(r.plan);
  return j;
}

Json to_json(const gas::EnergyPerVolume& e) {
  return {{"value", e.value},
          {"error_bar", e.error_bar},
          {"base_value", e.base_value},
          {"quadrature_delta", e.quadrature_delta},
          {"solver_gap", e.solver_gap},
          {"base_nodes", e.base_nodes},
          {"refined_nodes", e.refined_nodes},
          {"apriori_lower", e.apriori_lower},
          {"apriori_ok", e.apriori_ok},
          {"warnings", e.warnings}};
}

Json to_json(const gas::ThermoSequence& seq) {
  std::vector<int> mono;
  for (bool b : seq.monotone_ok) mono.push_back(b ? 1 : 0);
  return {{"scales", seq.scales},
          {"values", seq.values},
          {"errors", seq.errors},
          {"errors_refined", seq.errors_refined},
          {"status", seq.status},
          {"monotone_ok", mono},
          {"floor", seq.floor},
          {"limit", seq.limit},
          {"limit_error", seq.limit_error},
          {"method", seq.method}};
}

Json to_json(const gas::TetraRateReport& r) {
  Json es = Json::array();
  for (const auto& e : r.entries)
    es.push_back({{"ell", e.ell},
                  {"value", e.value},
                  {"error", e.error},
                  {"rate_term", e.rate_term},
                  {"bracket_lo", e.bracket_lo},
                  {"bracket_hi", e.bracket_hi},
                  {"width", e.width}});
  return {{"entries", es}, {"slacks", r.slacks}, {"consistent", r.consistent}, {"width_slope", r.width_slope}};
}

Json to_json(const gas::GrafSchenkerReport& r) {
  return {{"lhs", r.lhs},
          {"rhs_average", r.rhs_average},
          {"rhs_refined", r.rhs_refined},
          {"quadrature_error", r.quadrature_error},
          {"rhs_min", r.rhs_min},
          {"average_ok", r.average_ok},
          {"pointwise_exists", r.pointwise_exists},
          {"cross_check", r.cross_check},
          {"nodes", r.nodes}};
}

Json to_json(const gas::ScalingCheck& r) {
  return {{"lambda", r.lambda},
          {"expected_ratio", r.expected_ratio},
          {"max_relative_error", r.max_relative_error},
          {"nodes", r.nodes}};
}

Json to_json(const bounds::ConstantsTable& t) {
  return {{"c_lo_3d", t.c_lo_3d},
          {"c_gs", t.c_gs},
          {"c_tf", t.c_tf},
          {"lieb_narnhofer_floor", t.lieb_narnhofer_floor},
          {"c_mo_p4", t.c_mo(4.0)},
          {"c_mo_p6", t.c_mo(6.0)}};
}

Json to_json(const bounds::LDARhs& r) {
  return {{"b", r.b},
          {"c_bound", r.c_bound},
          {"mass_term", r.mass_term},
          {"gradient_term", r.gradient_term},
          {"epsilon", r.epsilon},
          {"rhs", r.rhs},
          {"optimal_epsilon", r.optimal_epsilon},
          {"optimal_rhs", r.optimal_rhs}};
}

Json to_json(const bounds::LDACheck& r) {
  return {{"rhs", r.rhs},
          {"m43", r.m43},
          {"lhs_lo", r.lhs.lo},
          {"lhs_hi", r.lhs.hi},
          {"consistent", r.consistent},
          {"vacuous", r.vacuous}};
}

Json to_json(const bounds::AprioriBounds& r) {
  return {{"upper", r.upper},
          {"lower", r.lower},
          {"tf_term", r.terms.tf},
          {"m43", r.terms.m43},
          {"gradient_term", r.terms.grad}};
}

Json to_json(const bounds::SemiclassicalBounds& r) {
  return {{"lt_lower", r.lt_lower},
          {"lls_upper", r.lls_upper},
          {"tf_integral", r.tf_integral},
          {"grad_integral", r.grad_integral}};
}

Json to_json(const bounds::FourierIdentity& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"gap", r.gap},
          {"relative_gap", r.relative_gap},
          {"tail_bound", r.tail_bound},
          {"k_terms", r.k_terms},
          {"tau_nodes", r.tau_nodes}};
}

Json to_json(const bounds::SkeletonMean& r) {
  return {{"ell", r.ell},
          {"delta", r.delta},
          {"numeric", r.numeric},
          {"exact", r.exact},
          {"error", r.error},
          {"ok", r.ok}};
}

Json to_json(const bounds::MorreyCheck& r) {
  return {{"p", r.p},
          {"c_mo", r.c_mo},
          {"gradient_norm", r.gradient_norm},
          {"max_ratio", r.max_ratio},
          {"pairs", r.pairs},
          {"ok", r.ok}};
}

RieszCost cost_from_json(const Json& j) {
  RieszCost c;
  c.d = get<int>(j, "d");
  c.s = get<double>(j, "s");
  if (j.contains("diagonal")) {
    const auto rule = get<std::string>(j, "diagonal");
    require(rule == "infinite" || rule == "excluded", "diagonal must be 'infinite' or 'excluded'");
    c.diagonal = rule == "infinite" ? DiagonalRule::Infinite : DiagonalRule::Excluded;
  }
  c.validate();
  return c;
}

periodic::PeriodicField field_from_json(const Json& j) {
  const int d = get<int>(j, "dimension");
  require(d >= 1 && d <= 3, "field dimension must be 1, 2 or 3");
  const auto basis = get<std::vector<double>>(j, "basis");
  require(static_cast<int>(basis.size()) == d * d, "basis must hold d*d numbers");
  Matrix b(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) b(r, c) = basis[r * d + c];
  auto interp = periodic::Interpolation::PiecewiseConstant;
  if (j.contains("interpolation")) {
    const auto name = get<std::string>(j, "interpolation");
    require(name == "piecewise-constant" || name == "multilinear",
            "interpolation must be 'piecewise-constant' or 'multilinear'");
    if (name == "multilinear") interp = periodic::Interpolation::Multilinear;
  }
  return periodic::PeriodicField(periodic::Lattice(b), get<std::vector<int>>(j, "shape"),
                                 get<std::vector<double>>(j, "samples"), interp);
}

DiscreteDensity density_from_json(const Json& j) {
  DiscreteDensity rho;
  rho.d = get<int>(j, "d");
  require(rho.d >= 1 && rho.d <= 3, "density dimension must be 1, 2 or 3");
  rho.support = points_from(get<Json>(j, "support"), rho.d);
  rho.weights = get<std::vector<double>>(j, "weights");
  rho.validate();
  return rho;
}

namespace {

GCPlan plan_unchecked(const Json& j) {
  GCPlan plan;
  plan.d = get<int>(j, "d");
  require(plan.d >= 1 && plan.d <= 3, "plan dimension must be 1, 2 or 3");
  plan.support = points_from(get<Json>(j, "support"), plan.d);
  plan.p0 = get<double>(j, "P0");
  if (j.contains("nmax")) plan.nmax = get<int>(j, "nmax");
  const Json layers = get<Json>(j, "layers");
  require(layers.is_array(), "layers must be an array");
  for (const auto& layer : layers) {
    const int n = get<int>(layer, "n");
    require(n >= 1, "layer size n must be positive");
    const Json entries = get<Json>(layer, "entries");
    require(entries.is_array(), "layer entries must be an array");
    for (const auto& e : entries) {
      require(e.is_array() && static_cast<int>(e.size()) == n + 1,
              "layer entry must hold n indices followed by a weight");
      Configuration c;
      for (int k = 0; k < n; ++k) {
        require(e[k].is_number_integer(), "configuration index must be an integer");
        c.points.push_back(e[k].get<int>());
      }
      require(e[n].is_number(), "configuration weight must be a number");
      c.weight = e[n].get<double>();
      plan.configs.push_back(c);
    }
  }
  return plan;
}

} // namespace

GCPlan plan_from_json(const Json& j) {
  GCPlan plan = plan_unchecked(j);
  for (auto& c : plan.configs) std::sort(c.points.begin(), c.points.end());
  plan.validate();
  return plan;
}

geometry::Domain domain_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "cube") {
    const int d = get<int>(j, "d");
    require(d >= 1 && d <= 3, "cube dimension must be 1, 2 or 3");
    Point center = j.contains("center") ? point_from(j["center"], d) : Point::Zero(d);
    return geometry::Domain::cube(d, get<double>(j, "side"), center);
  }
  if (kind == "tetrahedron") return geometry::Domain::tetrahedron(get<double>(j, "scale"));
  if (kind == "polytope") {
    const Json v = get<Json>(j, "vertices");
    require(v.is_array() && !v.empty() && v[0].is_array(), "polytope needs a vertex list");
    return geometry::Domain::polytope(points_from(v, static_cast<int>(v[0].size())));
  }
  throw ValidationError("domain kind must be cube, tetrahedron or polytope");
}

std::vector<std::string> validate_document(const Json& j) {
  std::vector<std::string> diag;
  auto guard = [&](auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      diag.push_back(e.what());
    }
  };
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    diag.push_back("document has no 'type' (field, density or plan)");
    return diag;
  }
  const auto type = j["type"].get<std::string>();
  if (type == "field") {
    guard([&] {
      const auto samples = get<std::vector<double>>(j, "samples");
      for (std::size_t i = 0; i < samples.size(); ++i)
        if (!(samples[i] >= 0.0)) diag.push_back("nonnegativity violated: sample " + std::to_string(i) + " < 0");
    });
    if (diag.empty()) guard([&] { field_from_json(j); });
  } else if (type == "density") {
    guard([&] {
      DiscreteDensity rho;
      rho.d = get<int>(j, "d");
      rho.support = points_from(get<Json>(j, "support"), rho.d);
      rho.weights = get<std::vector<double>>(j, "weights");
      if (rho.support.size() != rho.weights.size()) diag.push_back("support and weights differ in length");
      for (std::size_t i = 0; i < rho.weights.size(); ++i)
        if (!(rho.weights[i] >= 0.0)) diag.push_back("nonnegativity violated: weight " + std::to_string(i) + " < 0");
      for (std::size_t a = 0; a < rho.support.size(); ++a)
        for (std::size_t b = a + 1; b < rho.support.size(); ++b)
          if (rho.support[a] == rho.support[b])
            diag.push_back("support points " + std::to_string(a) + " and " + std::to_string(b) + " coincide");
    });
  } else if (type == "plan") {
    guard([&] {
      const GCPlan plan = plan_unchecked(j);
      const int m = static_cast<int>(plan.support.size());
      if (!(plan.p0 >= 0.0 && plan.p0 <= 1.0)) diag.push_back("P0 outside [0,1]");
      for (std::size_t k = 0; k < plan.configs.size(); ++k) {
        const auto& c = plan.configs[k];
        if (!(c.weight >= 0.0)) diag.push_back("nonnegativity violated: configuration " + std::to_string(k));
        for (int i : c.points)
          if (i < 0 || i >= m) diag.push_back("configuration " + std::to_string(k) + " index out of range");
        if (plan.nmax > 0 && static_cast<int>(c.points.size()) > plan.nmax)
          diag.push_back("configuration " + std::to_string(k) + " exceeds nmax");
      }
      const double total = plan.total_probability();
      if (!(std::abs(total - 1.0) <= 1e-10)) {
        std::ostringstream os;
        os << "normalization violated: total probability " << total << " != 1";
        diag.push_back(os.str());
      }
    });
  } else {
    diag.push_back("unknown document type '" + type + "'");
  }
  return diag;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << dump(j);
}

} // namespace nueg::io
