#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stvar/harness.hpp"
#include "stvar/hash.hpp"
#include "stvar/io.hpp"
#include "stvar/parallel.hpp"

using namespace stvar;

namespace {

enum Exit { kOk = 0, kInput = 2, kEmpty = 3, kNumeric = 4 };

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Provenance provenance(std::uint64_t seed, const std::vector<std::pair<std::string, std::string>>& files) {
  Provenance p;
  p.seed = seed;
  for (const auto& [role, path] : files) p.inputs.emplace_back(role, sha256_file(path));
  return p;
}

std::vector<std::string> default_names(Index d) {
  std::vector<std::string> names;
  for (Index i = 0; i < d; ++i) names.push_back("y" + std::to_string(i + 1));
  return names;
}

/// Optional "variables" list stored next to the model dimensions.
std::vector<std::string> spec_variables(const Json& spec) {
  std::vector<std::string> out;
  if (spec.is_object() && spec.contains("variables")) {
    const Json& v = spec["variables"];
    if (!v.is_array()) throw InputError("spec.variables: expected an array of column names");
    for (const auto& name : v) {
      if (!name.is_string()) throw InputError("spec.variables: expected an array of column names");
      out.push_back(name.get<std::string>());
    }
  }
  return out;
}

const Json& spec_node(const Json& j) { return j.is_object() && j.contains("spec") ? j["spec"] : j; }

Dataset load_data(const std::string& path, const ModelSpec& spec, const std::vector<std::string>& variables) {
  const CsvTable table = read_csv(path);
  std::vector<Index> cols;
  if (!variables.empty()) {
    if (static_cast<Index>(variables.size()) != spec.d) {
      throw InputError("spec.variables: expected " + std::to_string(spec.d) + " names");
    }
    for (const auto& v : variables) {
      const auto it = std::find(table.names.begin(), table.names.end(), v);
      if (it == table.names.end()) throw InputError(path + ": missing column '" + v + "'");
      cols.push_back(static_cast<Index>(it - table.names.begin()));
    }
  } else {
    Index first = 0;
    if (!table.names.empty() && (table.names.front() == "t" || table.names.front() == "date")) first = 1;
    const Index n = static_cast<Index>(table.names.size()) - first;
    if (n != spec.d) {
      throw InputError(path + ": expected " + std::to_string(spec.d) + " data columns, found " + std::to_string(n));
    }
    for (Index i = 0; i < n; ++i) cols.push_back(first + i);
  }
  if (table.values.rows() <= spec.p) {
    throw InputError(path + ": need more than p = " + std::to_string(spec.p) + " rows");
  }
  MatrixXd rows(table.values.rows(), spec.d);
  std::vector<std::string> names;
  for (Index i = 0; i < spec.d; ++i) {
    rows.col(i) = table.values.col(cols[static_cast<std::size_t>(i)]);
    names.push_back(table.names[static_cast<std::size_t>(cols[static_cast<std::size_t>(i)])]);
  }
  return Dataset::from_rows(rows, spec.p, names);
}

struct Fitted {
  Model model;
  std::vector<std::string> variables;
};

Fitted load_fitted(const std::string& path, Index solution) {
  Fitted f;
  f.model = read_model(path, solution - 1);
  f.variables = spec_variables(spec_node(read_json(path)));
  return f;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  Index periods = 250;
  std::uint64_t seed = 1;
  Index burnin = 1000;
  std::string out;
  std::string shocks_out;
};

int cmd_simulate(const SimulateArgs& a) {
  const Fitted f = load_fitted(a.model, 1);
  const ModelSpec& spec = f.model.spec;
  SimulationOptions opt;
  opt.periods = a.periods;
  opt.seed = a.seed;
  opt.burnin = a.burnin;
  const Simulation sim = simulate(spec, f.model.params, opt);
  const Provenance prov = provenance(a.seed, {{"model", a.model}});
  const auto names = f.variables.empty() ? default_names(spec.d) : f.variables;
  std::ostringstream data;
  write_csv(data, names, sim.data.body, &prov);
  write_text(a.out, data.str());
  if (!a.shocks_out.empty()) {
    std::vector<std::string> cols;
    for (Index i = 0; i < spec.d; ++i) cols.push_back("e" + std::to_string(i + 1));
    for (Index m = 0; m < spec.M; ++m) cols.push_back("alpha_" + std::to_string(m + 1));
    MatrixXd values(sim.shocks.rows(), spec.d + spec.M);
    if (values.rows() > 0) values << sim.shocks, sim.weights;
    std::ostringstream shocks;
    write_csv(shocks, cols, values, &prov);
    write_text(a.shocks_out, shocks.str());
  }
  return kOk;
}

struct EstimateArgs {
  std::string data;
  std::string spec;
  Index rounds = 24;
  double eta = 0.05;
  double kappa = 0.2;
  Index grid_n = 11;
  Index generations = 200;
  Index population = 64;
  std::uint64_t seed = 1;
  std::string out;
  bool jsr = false;
  Index top = 5;
};

int cmd_estimate(const EstimateArgs& a, Index threads) {
  const Json sj = read_json(a.spec);
  const std::string base = std::filesystem::path(a.spec).parent_path().string();
  ModelSpec spec;
  try {
    spec = spec_from_json(spec_node(sj), base.empty() ? "." : base);
  } catch (const InputError& e) {
    throw InputError(a.spec + ": " + e.what());
  }
  const Dataset data = load_data(a.data, spec, spec_variables(spec_node(sj)));
  EstimateConfig cfg;
  cfg.rounds = a.rounds;
  cfg.penalty.eta = a.eta;
  cfg.penalty.kappa = a.kappa;
  cfg.nls.grid_points = a.grid_n;
  cfg.ga.generations = a.generations;
  cfg.ga.population = a.population;
  cfg.seed = a.seed;
  cfg.threads = threads;
  cfg.check_jsr = a.jsr;
  const SolutionSet set = run_three_step(spec, data, cfg);
  if (set.solutions.empty()) throw NumericError("estimate: every round failed", set.failed_rounds);
  Json j = solutions_to_json(spec, set, provenance(a.seed, {{"data", a.data}, {"spec", a.spec}}));
  Json vars = Json::array();
  for (const auto& n : data.names) vars.push_back(n);
  j["spec"]["variables"] = vars;
  write_text(a.out, dump(j));

  std::cout << "rank  pen_ll          ll              stable  max moduli\n";
  for (std::size_t k = 0; k < set.solutions.size() && static_cast<Index>(k) < a.top; ++k) {
    const Solution& s = set.solutions[k];
    std::cout << std::left << std::setw(6) << k + 1 << std::setw(16) << format_double(std::round(s.pen_ll * 1e4) / 1e4)
              << std::setw(16) << format_double(std::round(s.ll * 1e4) / 1e4) << std::setw(8)
              << (s.stable ? "yes" : "no");
    for (double m : s.max_modulus) std::cout << ' ' << format_double(std::round(m * 1e4) / 1e4);
    std::cout << '\n';
  }
  std::cout << set.solutions.size() << " distinct solutions from " << set.rounds << " rounds (" << set.failed_rounds
            << " failed, " << set.duplicates << " duplicates)\n";
  return kOk;
}

struct FilterArgs {
  std::string solutions;
  std::string restrictions;
  Index window = 5;
  std::string out;
};

int cmd_filter(const FilterArgs& a) {
  const Json sj = read_json(a.solutions);
  const std::string base = std::filesystem::path(a.solutions).parent_path().string();
  const ModelSpec spec = spec_from_json(spec_node(sj), base.empty() ? "." : base);
  const auto sols = solutions_from_json(sj, spec);
  const RestrictionSet rs = restrictions_from_json(read_json(a.restrictions));
  const FilterResult res = filter_solutions(sols, rs, a.window);
  const std::uint64_t seed = sj.contains("provenance") ? sj["provenance"].value("seed", std::uint64_t{0}) : 0;
  Json j = filter_to_json(spec, res, rs, provenance(seed, {{"solutions", a.solutions}, {"restrictions", a.restrictions}}));
  j["spec"]["variables"] = sj["spec"].value("variables", Json::array());
  j["window"] = a.window;
  if (!a.out.empty()) write_text(a.out, dump(j));
  for (const auto& s : res.survivors) {
    std::cout << "survivor from rank " << s.source_rank + 1 << ": columns";
    for (Index c : s.labeling.perm) std::cout << ' ' << c + 1;
    std::cout << ", signs";
    for (Index i = 0; i < s.labeling.signs.size(); ++i) std::cout << ' ' << (s.labeling.signs(i) > 0 ? '+' : '-');
    std::cout << '\n';
  }
  if (res.survivors.empty()) {
    std::cerr << "no solution satisfies the restrictions; failures per restriction:\n";
    for (std::size_t k = 0; k < rs.size(); ++k) std::cerr << "  " << rs[k].label << ": " << res.failure_counts[k] << '\n';
    return kEmpty;
  }
  return kOk;
}

struct GirfArgs {
  std::string fitted;
  std::string data;
  Index solution = 1;
  Index shock = 1;
  Index horizon = 36;
  Index draws = 1000;
  Index regime = 1;
  double threshold = 0.75;
  Index scale_var = 0;
  double scale_size = 0.0;
  std::vector<Index> accumulate;
  bool no_weights = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string summary;
  std::string svg;
};

int cmd_girf(const GirfArgs& a, Index threads) {
  const Fitted f = load_fitted(a.fitted, a.solution);
  const ModelSpec& spec = f.model.spec;
  const Dataset data = load_data(a.data, spec, f.variables);
  GirfRequest req;
  req.shock = a.shock - 1;
  req.horizon = a.horizon;
  req.draws = a.draws;
  req.regime = a.regime - 1;
  req.threshold = a.threshold;
  if (a.scale_var > 0) req.scale = std::make_pair(a.scale_var - 1, a.scale_size);
  for (Index v : a.accumulate) req.accumulate.push_back(v - 1);
  req.include_weights = !a.no_weights;
  req.seed = a.seed;
  req.threads = threads;
  const GirfResult res = girf_run(req, spec, f.model.params, data);
  const Provenance prov = provenance(a.seed, {{"model", a.fitted}, {"data", a.data}});
  std::ostringstream lng;
  write_girf_long(lng, res, prov);
  write_text(a.out, lng.str());
  std::string summary = a.summary;
  if (summary.empty()) {
    const std::filesystem::path p(a.out);
    summary = (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
  }
  std::ostringstream sum;
  write_girf_summary(sum, res, prov);
  write_text(summary, sum.str());
  if (!a.svg.empty()) {
    std::ostringstream svg;
    write_girf_svg(svg, res, a.scale_var > 0 ? a.scale_var - 1 : 0);
    write_text(a.svg, svg.str());
  }
  Index rejected = 0;
  for (Index r : res.rejected) rejected += r;
  std::cout << res.histories.size() << " histories, " << res.paths.size() << " paths, " << res.dropped.size()
            << " dropped, " << rejected << " rejected draws\n";
  return kOk;
}

struct StabilityArgs {
  std::string fitted;
  Index solution = 1;
  double jsr_tol = 5e-3;
  double jsr_budget = 2e6;
  Index jsr_depth = 20;
  std::string out;
};

int cmd_stability(const StabilityArgs& a) {
  const Fitted f = load_fitted(a.fitted, a.solution);
  JsrOptions opt;
  opt.tol = a.jsr_tol;
  opt.budget = static_cast<Index>(a.jsr_budget);
  opt.max_depth = a.jsr_depth;
  const ErgodicReport rep = ergodic_report(f.model.spec, f.model.params, opt);
  const std::string text = dump(ergodic_to_json(rep, provenance(0, {{"model", a.fitted}})));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return kOk;
}

struct DiagnoseArgs {
  std::string fitted;
  std::string data;
  Index solution = 1;
  Index lags = 24;
  std::string out_dir = ".";
};

int cmd_diagnose(const DiagnoseArgs& a) {
  const Fitted f = load_fitted(a.fitted, a.solution);
  const ModelSpec& spec = f.model.spec;
  const Dataset data = load_data(a.data, spec, f.variables);
  const MatrixXd e = standardized_residuals(spec, f.model.params, data);
  const Provenance prov = provenance(0, {{"model", a.fitted}, {"data", a.data}});
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  std::vector<std::string> names;
  for (Index i = 0; i < spec.d; ++i) names.push_back("e" + std::to_string(i + 1));
  std::ostringstream acf;
  write_corr(acf, acf_ccf(e, a.lags), names, prov);
  write_text((dir / "acf_residuals.csv").string(), acf.str());
  std::ostringstream acf2;
  write_corr(acf2, acf_ccf(e.cwiseProduct(e), a.lags), names, prov);
  write_text((dir / "acf_squared_residuals.csv").string(), acf2.str());
  const auto dists = shock_distributions(f.model.params);
  for (Index i = 0; i < spec.d; ++i) {
    std::ostringstream qq;
    write_qq(qq, qq_data(e.col(i), dists[static_cast<std::size_t>(i)]), prov);
    write_text((dir / ("qq_e" + std::to_string(i + 1) + ".csv")).string(), qq.str());
  }
  return kOk;
}

struct McArgs {
  int variant = 1;
  std::vector<Index> sizes{500, 10000};
  Index replications = 25;
  Index rounds = 8;
  Index generations = 100;
  std::uint64_t seed = 1;
  std::string out = "mc_report.csv";
};

int cmd_mc(const McArgs& a, Index threads) {
  McDesign d = default_mc_design(a.variant);
  d.sample_sizes = a.sizes;
  d.replications = a.replications;
  d.estimate.rounds = a.rounds;
  d.estimate.ga.generations = a.generations;
  d.seed = a.seed;
  d.threads = threads;
  const McReport rep = run_mc(d, [](Index periods, Index r, bool ok) {
    std::cerr << "T=" << periods << " replication " << r + 1 << (ok ? " done\n" : " failed\n");
  });
  Provenance prov;
  prov.seed = a.seed;
  std::ostringstream out;
  write_mc_report(out, rep, prov);
  write_text(a.out, out.str());
  for (const auto& m : rep.failure_messages) std::cerr << m << '\n';
  if (rep.failed) {
    std::cerr << "10% or more of the replications failed\n";
    return kNumeric;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural smooth-transition VAR toolkit"};
  app.set_version_flag("--version", std::string(STVARKIT_VERSION));
  app.require_subcommand(1);
  Index threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: STVARKIT_THREADS or all cores)")->check(CLI::NonNegativeNumber);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a dataset from a model file");
  s->add_option("model", sim.model, "Model JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--T", sim.periods, "Observations")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", sim.seed);
  s->add_option("--burnin", sim.burnin)->check(CLI::NonNegativeNumber);
  s->add_option("--out", sim.out, "Data CSV")->required();
  s->add_option("--shocks-out", sim.shocks_out, "Structural shocks and weights CSV");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Three-step penalized ML estimation");
  e->add_option("data", est.data, "Data CSV")->required()->check(CLI::ExistingFile);
  e->add_option("spec", est.spec, "Spec JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--rounds", est.rounds)->check(CLI::PositiveNumber);
  e->add_option("--eta", est.eta);
  e->add_option("--kappa", est.kappa);
  e->add_option("--grid-n", est.grid_n)->check(CLI::PositiveNumber);
  e->add_option("--generations", est.generations)->check(CLI::NonNegativeNumber);
  e->add_option("--population", est.population)->check(CLI::PositiveNumber);
  e->add_option("--seed", est.seed);
  e->add_option("--out", est.out, "Solutions JSON")->required();
  e->add_flag("--jsr", est.jsr, "Bound the JSR of every solution");
  e->add_option("--top", est.top, "Rows of the printed table");

  FilterArgs fil;
  auto* f = app.add_subcommand("filter", "Keep solutions satisfying identifying restrictions");
  f->add_option("solutions", fil.solutions)->required()->check(CLI::ExistingFile);
  f->add_option("restrictions", fil.restrictions)->required()->check(CLI::ExistingFile);
  f->add_option("--window", fil.window)->check(CLI::PositiveNumber);
  f->add_option("--out", fil.out);

  GirfArgs gi;
  auto* g = app.add_subcommand("girf", "Generalized impulse responses");
  g->add_option("fitted", gi.fitted, "Model, solutions or filtered JSON")->required()->check(CLI::ExistingFile);
  g->add_option("data", gi.data, "Data CSV")->required()->check(CLI::ExistingFile);
  g->add_option("--solution", gi.solution, "Entry of a solutions file (1-based)")->check(CLI::PositiveNumber);
  g->add_option("--shock", gi.shock)->check(CLI::PositiveNumber);
  g->add_option("--horizon", gi.horizon)->check(CLI::NonNegativeNumber);
  g->add_option("--draws", gi.draws)->check(CLI::PositiveNumber);
  g->add_option("--regime", gi.regime)->check(CLI::PositiveNumber);
  g->add_option("--weight-threshold", gi.threshold);
  auto* sv = g->add_option("--scale-var", gi.scale_var)->check(CLI::PositiveNumber);
  auto* ss = g->add_option("--scale-size", gi.scale_size);
  sv->needs(ss);
  ss->needs(sv);
  g->add_option("--accumulate", gi.accumulate, "Variables to cumulate (1-based)")->delimiter(',');
  g->add_flag("--no-weights", gi.no_weights, "Omit transition-weight responses");
  g->add_option("--seed", gi.seed);
  g->add_option("--out", gi.out, "Long-format CSV")->required();
  g->add_option("--summary", gi.summary, "Quantile CSV (default: <out>_summary.csv)");
  g->add_option("--svg", gi.svg, "Shotgun plot");

  StabilityArgs st;
  auto* t = app.add_subcommand("stability", "Companion moduli, JSR bounds and impact-matrix check");
  t->add_option("fitted", st.fitted)->required()->check(CLI::ExistingFile);
  t->add_option("--solution", st.solution)->check(CLI::PositiveNumber);
  t->add_option("--jsr-tol", st.jsr_tol)->check(CLI::PositiveNumber);
  t->add_option("--jsr-budget", st.jsr_budget)->check(CLI::PositiveNumber);
  t->add_option("--jsr-depth", st.jsr_depth)->check(CLI::PositiveNumber);
  t->add_option("--out", st.out);

  DiagnoseArgs dg;
  auto* dsub = app.add_subcommand("diagnose", "Residual autocorrelations and QQ data");
  dsub->add_option("fitted", dg.fitted)->required()->check(CLI::ExistingFile);
  dsub->add_option("data", dg.data)->required()->check(CLI::ExistingFile);
  dsub->add_option("--solution", dg.solution)->check(CLI::PositiveNumber);
  dsub->add_option("--lags", dg.lags)->check(CLI::PositiveNumber);
  dsub->add_option("--out-dir", dg.out_dir);

  int fixture_variant = 1;
  std::string fixture_out;
  auto* fx = app.add_subcommand("fixture", "Write a built-in bivariate logistic model file");
  fx->add_option("--variant", fixture_variant)->check(CLI::Range(1, 2));
  fx->add_option("--out", fixture_out)->required();

  McArgs mc;
  auto* m = app.add_subcommand("mc", "Monte Carlo study on the bivariate logistic fixtures");
  m->add_option("--variant", mc.variant)->check(CLI::Range(1, 2));
  m->add_option("--sizes", mc.sizes)->delimiter(',');
  m->add_option("--reps", mc.replications)->check(CLI::NonNegativeNumber);
  m->add_option("--rounds", mc.rounds)->check(CLI::PositiveNumber);
  m->add_option("--generations", mc.generations)->check(CLI::NonNegativeNumber);
  m->add_option("--seed", mc.seed);
  m->add_option("--out", mc.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kInput;
  }

  const Index nthreads = resolve_threads(threads);
  try {
    if (*s) return cmd_simulate(sim);
    if (*e) return cmd_estimate(est, nthreads);
    if (*f) return cmd_filter(fil);
    if (*g) return cmd_girf(gi, nthreads);
    if (*t) return cmd_stability(st);
    if (*dsub) return cmd_diagnose(dg);
    if (*m) return cmd_mc(mc, nthreads);
    if (*fx) {
      const Model fixture = lstvar_fixture(fixture_variant);
      write_text(fixture_out, dump(model_to_json(fixture.spec, fixture.params)));
      return kOk;
    }
  } catch (const EmptySelectionError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kEmpty;
  } catch (const InputError& ex) {
    std::cerr << "input error: " << ex.what() << '\n';
    return kInput;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "input error: " << ex.what() << '\n';
    return kInput;
  } catch (const std::exception& ex) {
    std::cerr << "numeric failure: " << ex.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
