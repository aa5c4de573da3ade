#include "nueg/run.hpp"
#include "nueg/constants.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nueg::run {

using io::Json;

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"sce",     "nueg", "dyadic",  "tetra-rate", "gs-check",
                                              "lda",     "fourier", "apriori", "constants"};
  return kinds;
}

namespace {

struct Context {
  const config::Config& cfg;
  std::uint64_t seed;
  std::optional<long long> budget;
  Json inputs = Json::object();
  std::vector<std::string> warnings;

  Json load(const std::string& section, const std::string& key) {
    const std::string path = cfg.resolve_path(cfg.get(section, key));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path + " (field " + section + "." + key + ")");
    std::stringstream buf;
    buf << in.rdbuf();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config::fnv1a64(buf.str())));
    inputs[section + "." + key] = hex;
    try {
      return Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(path + ": " + e.what());
    }
  }
};

RieszCost cost_from(const Context& c) {
  RieszCost cost;
  cost.d = static_cast<int>(c.cfg.get_int("cost", "d"));
  cost.s = c.cfg.get_double("cost", "s");
  const std::string rule = c.cfg.get("cost", "diagonal", "infinite");
  require(rule == "infinite" || rule == "excluded", "cost.diagonal must be 'infinite' or 'excluded'");
  cost.diagonal = rule == "infinite" ? DiagonalRule::Infinite : DiagonalRule::Excluded;
  cost.validate();
  return cost;
}

periodic::PeriodicField field_from(Context& c, const std::string& section, int d_default) {
  const auto& cfg = c.cfg;
  if (cfg.has(section, "file")) return io::field_from_json(c.load(section, "file"));
  const int d = static_cast<int>(cfg.get_int(section, "dimension", d_default));
  require(d >= 1 && d <= 3, section + ".dimension must be 1, 2 or 3");
  Matrix basis;
  if (cfg.has(section, "basis")) {
    const auto b = cfg.get_doubles(section, "basis");
    require(static_cast<int>(b.size()) == d * d, section + ".basis must hold d*d numbers");
    basis.resize(d, d);
    for (int r = 0; r < d; ++r)
      for (int k = 0; k < d; ++k) basis(r, k) = b[r * d + k];
  } else {
    basis = Matrix::Identity(d, d) * cfg.get_double(section, "side", 1.0);
  }
  const periodic::Lattice lattice(basis);
  if (cfg.has(section, "constant")) return periodic::PeriodicField::constant(lattice, cfg.get_double(section, "constant"));
  const std::string interp = cfg.get(section, "interpolation", "piecewise-constant");
  require(interp == "piecewise-constant" || interp == "multilinear",
          section + ".interpolation must be 'piecewise-constant' or 'multilinear'");
  auto shape = cfg.get_ints(section, "shape");
  if (shape.size() == 1 && d > 1) shape.assign(d, shape[0]);
  return periodic::PeriodicField(lattice, shape, cfg.get_doubles(section, "samples"),
                                 interp == "multilinear" ? periodic::Interpolation::Multilinear
                                                         : periodic::Interpolation::PiecewiseConstant);
}

DiscreteDensity density_from(Context& c, const std::string& section) {
  if (c.cfg.has(section, "file")) return io::density_from_json(c.load(section, "file"));
  DiscreteDensity rho;
  rho.d = static_cast<int>(c.cfg.get_int(section, "d"));
  require(rho.d >= 1 && rho.d <= 3, section + ".d must be 1, 2 or 3");
  const auto coords = c.cfg.get_doubles(section, "support");
  rho.weights = c.cfg.get_doubles(section, "weights");
  require(coords.size() == rho.weights.size() * static_cast<std::size_t>(rho.d),
          section + ".support must hold d coordinates per weight");
  for (std::size_t i = 0; i < rho.weights.size(); ++i)
    rho.support.push_back(Eigen::Map<const Vector>(coords.data() + i * rho.d, rho.d));
  rho.validate();
  return rho;
}

geometry::Domain domain_from(const Context& c, int d) {
  const auto& cfg = c.cfg;
  const std::string kind = cfg.get("domain", "kind");
  if (kind == "cube") {
    Point center = Point::Zero(d);
    if (cfg.has("domain", "center")) {
      const auto v = cfg.get_doubles("domain", "center");
      require(static_cast<int>(v.size()) == d, "domain.center must have d coordinates");
      center = Eigen::Map<const Vector>(v.data(), d);
    }
    return geometry::Domain::cube(d, cfg.get_double("domain", "side"), center);
  }
  if (kind == "tetrahedron") {
    require(d == 3, "tetrahedral domains need d = 3");
    return geometry::Domain::tetrahedron(cfg.get_double("domain", "scale"));
  }
  if (kind == "polytope") {
    const auto v = cfg.get_doubles("domain", "vertices");
    require(!v.empty() && v.size() % d == 0, "domain.vertices must hold d coordinates per vertex");
    PointList pts;
    for (std::size_t i = 0; i < v.size(); i += d) pts.push_back(Eigen::Map<const Vector>(v.data() + i, d));
    return geometry::Domain::polytope(pts);
  }
  throw ValidationError("domain.kind must be cube, tetrahedron or polytope");
}

gas::QuadratureSpec quad_from(const Context& c) {
  gas::QuadratureSpec q;
  q.translations = static_cast<int>(c.cfg.get_int("quadrature", "translations", q.translations));
  q.rotations = static_cast<int>(c.cfg.get_int("quadrature", "rotations", q.rotations));
  q.subsamples = static_cast<int>(c.cfg.get_int("quadrature", "subsamples", q.subsamples));
  q.cell_width = c.cfg.get_double("quadrature", "cell_width", q.cell_width);
  q.seed = c.seed;
  require(q.translations >= 1 && q.rotations >= 1 && q.subsamples >= 1 && q.cell_width > 0.0,
          "quadrature parameters must be positive");
  return q;
}

SolverSpec solver_from(const Context& c) {
  SolverSpec s;
  const std::string kind = c.cfg.get("solver", "kind", "exact_lp");
  require(kind == "exact_lp" || kind == "entropic", "solver.kind must be 'exact_lp' or 'entropic'");
  s.kind = kind == "exact_lp" ? SolverKind::ExactLP : SolverKind::Entropic;
  s.entropic.epsilon = c.cfg.get_double("solver", "epsilon", s.entropic.epsilon);
  s.entropic.max_iters = static_cast<int>(c.cfg.get_int("solver", "max_iters", s.entropic.max_iters));
  s.entropic.tol = c.cfg.get_double("solver", "tol", s.entropic.tol);
  s.nmax = static_cast<int>(c.cfg.get_int("solver", "nmax", 0));
  // --budget beats NUEG_BUDGET, which beats the file.
  if (c.budget)
    s.budget = *c.budget;
  else if (std::getenv("NUEG_BUDGET"))
    s.budget = default_budget();
  else
    s.budget = c.cfg.get_int("solver", "budget", default_budget());
  require(s.budget > 0, "solver budget must be positive");
  return s;
}

CsvRow row(double scale, double value, double err, const std::string& status) {
  return {scale, value, value - err, value + err, status};
}

Json with_error(double value, double error) { return {{"value", value}, {"error", error}}; }

Json experiment_constants(Context&, RunRecord&) {
  const auto t = bounds::constants_table();
  // Closed forms: zero error.
  return {{"c_lo_3d", with_error(t.c_lo_3d, 0.0)},
          {"c_gs", with_error(t.c_gs, 0.0)},
          {"c_tf", with_error(t.c_tf, 0.0)},
          {"lieb_narnhofer_floor", with_error(t.lieb_narnhofer_floor, 0.0)},
          {"c_mo_p4", with_error(t.c_mo(4.0), 0.0)},
          {"c_mo_p6", with_error(t.c_mo(6.0), 0.0)}};
}

Json experiment_sce(Context& c, RunRecord&) {
  const RieszCost cost = cost_from(c);
  const DiscreteDensity rho = density_from(c, c.cfg.has("sce", "file") ? "sce" : "density");
  require(rho.d == cost.d, "density and cost dimensions differ");
  const SolverSpec solver = solver_from(c);
  const double h = c.cfg.get_double("sce", "h", 0.0);
  require(h >= 0.0, "sce.h must be nonnegative");
  const EnergyReport rep = indirect_energy(rho, cost, solver, h);
  if (rep.cap_saturated) c.warnings.push_back("particle cap saturated");
  return {{"parameters", {{"cost", io::to_json(cost)}, {"solver", io::to_json(solver)}, {"h", h}}},
          {"report", io::to_json(rep)}};
}

Json experiment_nueg(Context& c, RunRecord& rec) {
  const RieszCost cost = cost_from(c);
  gas::NUEGJob job{field_from(c, "field", cost.d), domain_from(c, cost.d), cost, quad_from(c), solver_from(c)};
  if (c.cfg.has("cost", "c_lo")) job.c_lo = c.cfg.get_double("cost", "c_lo");
  const auto e = gas::energy_per_volume(job);
  for (const auto& w : e.warnings) c.warnings.push_back(w);
  rec.table.push_back(row(job.domain.scale(), e.value, e.error_bar, e.warnings.empty() ? "ok" : e.warnings.front()));
  return {{"parameters",
           {{"cost", io::to_json(cost)},
            {"quadrature", io::to_json(job.quad)},
            {"solver", io::to_json(job.solver)},
            {"domain", io::to_json(job.domain)},
            {"field", io::to_json(job.zeta)}}},
          {"energy_per_volume", io::to_json(e)}};
}

Json experiment_dyadic(Context& c, RunRecord& rec) {
  const RieszCost cost = cost_from(c);
  const auto zeta = field_from(c, "field", cost.d);
  const auto quad = quad_from(c);
  const auto solver = solver_from(c);
  const std::vector<int> exps = c.cfg.has("dyadic", "exponents") ? c.cfg.get_ints("dyadic", "exponents")
                                                                 : std::vector<int>{0, 1, 2};
  const std::string method = c.cfg.get("dyadic", "method", "last");
  auto seq = gas::dyadic_sequence(zeta, cost, exps, quad, solver);
  for (std::size_t i = 0; i < seq.values.size(); ++i)
    rec.table.push_back(row(seq.scales[i], seq.values[i], seq.errors[i], seq.status[i]));
  for (const auto& s : seq.status)
    if (s != "ok") c.warnings.push_back(s);
  Json lim = nullptr;
  if (!seq.values.empty() && (method == "last" || seq.values.size() >= 2)) {
    const auto l = gas::extrapolate_limit(seq, method);
    seq.method = l.method;
    lim = {{"limit", l.limit}, {"error", l.error}, {"method", l.method}};
  }
  return {{"parameters",
           {{"cost", io::to_json(cost)},
            {"quadrature", io::to_json(quad)},
            {"solver", io::to_json(solver)},
            {"exponents", exps},
            {"field", io::to_json(zeta)}}},
          {"sequence", io::to_json(seq)},
          {"extrapolation", lim}};
}

Json experiment_tetra(Context& c, RunRecord& rec) {
  const RieszCost cost = cost_from(c);
  const auto zeta = field_from(c, "field", 3);
  const auto quad = quad_from(c);
  const auto solver = solver_from(c);
  const auto ells = c.cfg.get_doubles("tetra", "ells");
  const auto r = gas::tetra_rate_check(zeta, cost, ells, quad, solver);
  for (const auto& e : r.entries) rec.table.push_back(row(e.ell, e.value, e.error, r.consistent ? "ok" : "inconsistent"));
  return {{"parameters",
           {{"cost", io::to_json(cost)},
            {"quadrature", io::to_json(quad)},
            {"solver", io::to_json(solver)},
            {"ells", ells},
            {"field", io::to_json(zeta)}}},
          {"tetra_rate", io::to_json(r)}};
}

Json experiment_gs(Context& c, RunRecord&) {
  const GCPlan plan = io::plan_from_json(c.load("gs", "plan"));
  const double ell = c.cfg.get_double("gs", "ell");
  const auto quad = quad_from(c);
  const auto r = gas::graf_schenker_check(plan, ell, quad);
  if (!r.average_ok) c.warnings.push_back("averaged inequality violated");
  return {{"parameters", {{"ell", ell}, {"quadrature", io::to_json(quad)}}}, {"graf_schenker", io::to_json(r)}};
}

Json experiment_lda(Context& c, RunRecord&) {
  const auto zeta = field_from(c, "field", 3);
  bounds::LDAParams p{c.cfg.get_double("lda", "p"), c.cfg.get_double("lda", "theta")};
  const double eps = c.cfg.get_double("lda", "epsilon", 1.0);
  const double m43 = periodic::power_mean(zeta, 4.0 / 3.0);
  bounds::Interval e{c.cfg.get_double("lda", "e_lo", -constants::c_lo_3d * m43), c.cfg.get_double("lda", "e_hi", 0.0)};
  bounds::Interval cu{c.cfg.get_double("lda", "c_lo", constants::lieb_narnhofer_floor()),
                      c.cfg.get_double("lda", "c_hi", 0.0)};
  const auto rhs = bounds::lda_rhs(zeta, p, eps);
  const auto chk = bounds::lda_check(zeta, p, eps, e, cu);
  if (chk.vacuous) c.warnings.push_back("lda check vacuous: rhs exceeds bracket width");
  Json out = {{"parameters",
               {{"p", p.p},
                {"theta", p.theta},
                {"epsilon", eps},
                {"e_bracket", {e.lo, e.hi}},
                {"c_ueg_bracket", {cu.lo, cu.hi}}}},
              {"rhs", io::to_json(rhs)},
              {"check", io::to_json(chk)}};
  if (c.cfg.has("lda", "lambdas")) {
    Json rates = Json::array();
    for (double l : c.cfg.get_doubles("lda", "lambdas"))
      rates.push_back({{"lambda", l}, {"rhs", bounds::lda_rate_rhs(zeta, p, l)}});
    out["rate"] = rates;
  }
  return out;
}

Json experiment_fourier(Context& c, RunRecord& rec) {
  const RieszCost cost = cost_from(c);
  const auto f = field_from(c, "field", cost.d);
  const DiscreteDensity rho = density_from(c, "density");
  const double h = c.cfg.get_double("fourier", "h", 0.0);
  bounds::FourierOptions base;
  base.tau_per_axis = static_cast<int>(c.cfg.get_int("fourier", "tau", base.tau_per_axis));
  base.k_radius = static_cast<int>(c.cfg.get_int("fourier", "k", base.k_radius));
  bounds::FourierOptions fine{2 * base.tau_per_axis, 2 * base.k_radius};
  const auto r0 = bounds::fourier_direct_identity(f, rho, cost, h, base);
  const auto r1 = bounds::fourier_direct_identity(f, rho, cost, h, fine);
  rec.table.push_back(row(1.0, r0.lhs, r0.gap, "base"));
  rec.table.push_back(row(2.0, r1.lhs, r1.gap, "refined"));
  return {{"parameters",
           {{"cost", io::to_json(cost)},
            {"h", h},
            {"tau", base.tau_per_axis},
            {"k", base.k_radius},
            {"field", io::to_json(f)},
            {"density", io::to_json(rho)}}},
          {"base", io::to_json(r0)},
          {"refined", io::to_json(r1)}};
}

Json experiment_apriori(Context& c, RunRecord&) {
  const auto zeta = field_from(c, "field", 3);
  const double hbar = c.cfg.get_double("apriori", "hbar", 1.0);
  const double eps = c.cfg.get_double("apriori", "epsilon", 1.0 / 15.0);
  const double c_lo = c.cfg.get_double("apriori", "c_lo", constants::c_lo_3d);
  const double eps_lt = c.cfg.get_double("apriori", "epsilon_lt", 0.6);
  const auto b = bounds::quantum_apriori(zeta, hbar, eps, c_lo);
  const auto sc = bounds::lt_lls_rhs(zeta, eps_lt, eps, hbar);
  return {{"parameters", {{"hbar", hbar}, {"epsilon", eps}, {"epsilon_lt", eps_lt}, {"c_lo", c_lo}}},
          {"apriori", io::to_json(b)},
          {"semiclassical", io::to_json(sc)}};
}

} // namespace

RunConfig make_run_config(config::Config cfg, const std::string& forced_kind) {
  RunConfig rc{std::move(cfg), forced_kind, std::nullopt, std::nullopt, ""};
  if (rc.kind.empty()) rc.kind = rc.cfg.get("experiment", "kind");
  const auto& kinds = experiment_kinds();
  require(std::find(kinds.begin(), kinds.end(), rc.kind) != kinds.end(), "unknown experiment kind '" + rc.kind + "'");
  return rc;
}

RunRecord run(const RunConfig& rc) {
  const auto start = std::chrono::steady_clock::now();
  config::Config cfg = rc.cfg;
  cfg.set("experiment", "kind", rc.kind);
  std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", "value", 0));
  if (rc.seed) seed = *rc.seed;
  cfg.set("seed", "value", std::to_string(seed));
  if (rc.budget) cfg.set("solver", "budget", std::to_string(*rc.budget));

  Context ctx{cfg, seed, rc.budget, Json::object(), {}};
  RunRecord rec;
  rec.config_hash = cfg.hash_hex();
  Json results;
  const std::string& k = rc.kind;
  if (k == "constants") results = experiment_constants(ctx, rec);
  else if (k == "sce") results = experiment_sce(ctx, rec);
  else if (k == "nueg") results = experiment_nueg(ctx, rec);
  else if (k == "dyadic") results = experiment_dyadic(ctx, rec);
  else if (k == "tetra-rate") results = experiment_tetra(ctx, rec);
  else if (k == "gs-check") results = experiment_gs(ctx, rec);
  else if (k == "lda") results = experiment_lda(ctx, rec);
  else if (k == "fourier") results = experiment_fourier(ctx, rec);
  else if (k == "apriori") results = experiment_apriori(ctx, rec);
  else throw ValidationError("unknown experiment kind '" + k + "'");

  rec.warnings = ctx.warnings;
  rec.record = {{"experiment", k},
                {"config_hash", rec.config_hash},
                {"config", cfg.entries()},
                {"seed", seed},
                {"inputs", ctx.inputs},
                {"versions", {{"nueg", kVersion}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                              std::to_string(EIGEN_MINOR_VERSION)}}},
                {"results", results},
                {"warnings", rec.warnings}};
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "scale,value,err_low,err_high,solver_status\n";
  for (const auto& r : rows)
    os << r.scale << ',' << r.value << ',' << r.err_low << ',' << r.err_high << ',' << r.status << '\n';
  return os.str();
}

void write_outputs(const RunRecord& rec, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  io::write_json((d / "record.json").string(), rec.record);
  if (!rec.table.empty()) {
    std::ofstream out(d / "summary.csv");
    if (!out) throw ValidationError("cannot write " + (d / "summary.csv").string());
    out << csv(rec.table);
  }
  const auto now = std::chrono::system_clock::now();
  const long long epoch = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  io::write_json((d / "timing.json").string(),
                 {{"config_hash", rec.config_hash}, {"finished_unix", epoch}, {"seconds", rec.seconds}});
}

} // namespace nueg::run
