#include "nueg/run.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kInfeasible = 3, kBudget = 4 };

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  long long budget = 0;
};

void add_common(CLI::App* app, Common& c, bool config_positional) {
  if (config_positional) app->add_option("file", c.config, "configuration file");
  app->add_option("--config", c.config, "configuration file");
  app->add_option("--seed", c.seed, "seed for all stochastic sampling");
  app->add_option("--out", c.out, "output directory for record.json, summary.csv and timing.json");
  app->add_option("--budget", c.budget, "configuration-count budget (overrides NUEG_BUDGET)");
}

int execute(const nueg::run::RunConfig& base, const Common& c, CLI::App* app) {
  nueg::run::RunConfig rc = base;
  if (app->count("--seed")) rc.seed = c.seed;
  if (app->count("--budget")) rc.budget = c.budget;
  const auto rec = nueg::run::run(rc);
  if (!c.out.empty()) nueg::run::write_outputs(rec, c.out);
  std::cout << nueg::io::dump(rec.record);
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

nueg::config::Config load_config(const std::string& path) {
  if (path.empty()) throw nueg::ValidationError("a configuration file is required (--config)");
  return nueg::config::Config::load(path);
}

int validate(const std::string& path) {
  std::vector<std::string> diag;
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  try {
    if (is_json) {
      diag = nueg::io::validate_document(nueg::io::read_json(path));
    } else {
      nueg::run::make_run_config(nueg::config::Config::load(path));
    }
  } catch (const nueg::Error& e) {
    diag.push_back(e.what());
  }
  for (const auto& d : diag) std::cout << path << ": " << d << "\n";
  if (diag.empty()) std::cout << path << ": ok\n";
  return diag.empty() ? kOk : kValidation;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical non-uniform electron gas energies and bound checks"};
  app.require_subcommand(1);

  Common run_c, const_c, sce_c, nueg_c, bounds_c;
  std::string validate_path;

  auto* run_cmd = app.add_subcommand("run", "run the experiment named in [experiment] kind");
  add_common(run_cmd, run_c, true);

  auto* validate_cmd = app.add_subcommand("validate", "check a field, density, plan or config file");
  validate_cmd->add_option("path", validate_path, "file to check")->required();

  auto* const_cmd = app.add_subcommand("constants", "print the constants table");
  add_common(const_cmd, const_c, false);

  auto* sce_cmd = app.add_subcommand("sce", "F_SCE, direct and indirect energy of a density file");
  std::string density_path, diagonal = "infinite", solver = "exact_lp";
  double s = 0.0, h = 0.0, epsilon = 0.05;
  int nmax = 0;
  sce_cmd->add_option("density", density_path, "density JSON")->required();
  sce_cmd->add_option("--s", s, "Riesz exponent")->required();
  sce_cmd->add_option("--diagonal", diagonal, "infinite or excluded");
  sce_cmd->add_option("--cell-width", h, "cell width for the direct self-term (0: point charges)");
  sce_cmd->add_option("--solver", solver, "exact_lp or entropic");
  sce_cmd->add_option("--epsilon", epsilon, "entropic regularization");
  sce_cmd->add_option("--nmax", nmax, "particle cap (0: ceil(mass) + 2)");
  sce_cmd->add_option("--seed", sce_c.seed, "seed");
  sce_cmd->add_option("--out", sce_c.out, "output directory");
  sce_cmd->add_option("--budget", sce_c.budget, "configuration-count budget");

  auto* nueg_cmd = app.add_subcommand("nueg", "energy per volume and thermodynamic sequences");
  nueg_cmd->require_subcommand(1);
  auto* nueg_run = nueg_cmd->add_subcommand("run", "energy per volume on one domain");
  auto* nueg_dyadic = nueg_cmd->add_subcommand("dyadic", "dyadic cube sequence");
  auto* nueg_tetra = nueg_cmd->add_subcommand("tetra-rate", "tetrahedron rate bracket");
  auto* nueg_check = nueg_cmd->add_subcommand("check", "inequality checks");
  nueg_check->require_subcommand(1);
  auto* nueg_gs = nueg_check->add_subcommand("gs", "tile-averaged decoupling inequality");
  for (auto* c : {nueg_run, nueg_dyadic, nueg_tetra, nueg_gs}) add_common(c, nueg_c, true);

  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bound evaluators");
  bounds_cmd->require_subcommand(1);
  auto* b_const = bounds_cmd->add_subcommand("constants", "constants table");
  auto* b_lda = bounds_cmd->add_subcommand("lda", "LDA right-hand side and consistency check");
  auto* b_fourier = bounds_cmd->add_subcommand("fourier", "Fourier form of the averaged direct term");
  auto* b_apriori = bounds_cmd->add_subcommand("apriori", "kinetic a-priori sandwich");
  for (auto* c : {b_const, b_lda, b_fourier, b_apriori}) add_common(c, bounds_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*validate_cmd) return validate(validate_path);
    if (*run_cmd) return execute(nueg::run::make_run_config(load_config(run_c.config)), run_c, run_cmd);
    if (*const_cmd) {
      auto cfg = const_c.config.empty() ? nueg::config::Config::parse("", "<constants>") : load_config(const_c.config);
      return execute(nueg::run::make_run_config(cfg, "constants"), const_c, const_cmd);
    }
    if (*sce_cmd) {
      std::ostringstream text;
      const auto rho = nueg::io::density_from_json(nueg::io::read_json(density_path));
      text << "[cost]\nd = " << rho.d << "\ns = " << s << "\ndiagonal = " << diagonal << "\n"
           << "[sce]\nfile = " << density_path << "\nh = " << h << "\n"
           << "[solver]\nkind = " << solver << "\nepsilon = " << epsilon << "\nnmax = " << nmax << "\n";
      auto cfg = nueg::config::Config::parse(text.str(), "<sce>");
      return execute(nueg::run::make_run_config(cfg, "sce"), sce_c, sce_cmd);
    }
    if (*nueg_cmd) {
      const std::pair<CLI::App*, const char*> table[] = {
          {nueg_run, "nueg"}, {nueg_dyadic, "dyadic"}, {nueg_tetra, "tetra-rate"}, {nueg_gs, "gs-check"}};
      for (const auto& [cmd, kind] : table)
        if (*cmd) return execute(nueg::run::make_run_config(load_config(nueg_c.config), kind), nueg_c, cmd);
    }
    if (*bounds_cmd) {
      if (*b_const) {
        auto cfg = bounds_c.config.empty() ? nueg::config::Config::parse("", "<constants>")
                                           : load_config(bounds_c.config);
        return execute(nueg::run::make_run_config(cfg, "constants"), bounds_c, b_const);
      }
      const std::pair<CLI::App*, const char*> table[] = {
          {b_lda, "lda"}, {b_fourier, "fourier"}, {b_apriori, "apriori"}};
      for (const auto& [cmd, kind] : table)
        if (*cmd) return execute(nueg::run::make_run_config(load_config(bounds_c.config), kind), bounds_c, cmd);
    }
  } catch (const nueg::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const nueg::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const nueg::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << " (required " << e.required() << ")\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
