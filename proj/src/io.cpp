#include "stvar/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace stvar {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string Provenance::comment_line() const {
  std::string line = "# stvarkit " + version + " seed=" + std::to_string(seed);
  for (const auto& [role, hash] : inputs) line += " " + role + "=" + hash;
  return line;
}

Json Provenance::to_json() const {
  Json j;
  j["tool"] = "stvarkit";
  j["version"] = version;
  j["seed"] = seed;
  Json in = Json::object();
  for (const auto& [role, hash] : inputs) in[role] = hash;
  j["inputs"] = in;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\"");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\"");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& field, const std::string& where) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (field.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
    throw InputError(where + ": '" + field + "' is not a finite number");
  }
  return value;
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  Index lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line);
    if (!header) {
      table.names = fields;
      header = true;
      continue;
    }
    const std::string where = source + ":" + std::to_string(lineno);
    if (fields.size() != table.names.size()) {
      throw InputError(where + ": expected " + std::to_string(table.names.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f, where));
    rows.push_back(std::move(row));
  }
  if (!header) throw InputError(source + ": missing header row");
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const std::vector<std::string>& names, const Eigen::Ref<const MatrixXd>& values,
               const Provenance* provenance) {
  if (provenance) out << provenance->comment_line() << '\n';
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

const Json& field(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw InputError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& ctx) {
  if (!j.is_number()) throw InputError(ctx + ": expected a number");
  return j.get<double>();
}

Index integer(const Json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw InputError(ctx + ": expected an integer");
  return j.get<Index>();
}

Json vector_to_json(const Eigen::Ref<const VectorXd>& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_to_json(const Eigen::Ref<const MatrixXd>& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i).transpose()));
  return a;
}

VectorXd vector_from_json(const Json& j, Index n, const std::string& ctx) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    throw InputError(ctx + ": expected an array of " + std::to_string(n) + " numbers");
  }
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = number(j[static_cast<std::size_t>(i)], ctx + "[" + std::to_string(i + 1) + "]");
  return v;
}

MatrixXd matrix_from_json(const Json& j, Index rows, Index cols, const std::string& ctx) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw InputError(ctx + ": expected a " + std::to_string(rows) + " x " + std::to_string(cols) + " matrix");
  }
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    m.row(i) = vector_from_json(j[static_cast<std::size_t>(i)], cols, ctx + " row " + std::to_string(i + 1)).transpose();
  }
  return m;
}

MatrixXd table_from_json(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw InputError(ctx + ": expected a nonempty matrix");
  return matrix_from_json(j, static_cast<Index>(j.size()), static_cast<Index>(j.front().size()), ctx);
}

void check_schema(const Json& j, const std::string& ctx) {
  if (j.contains("schema") && !(j["schema"].is_number_integer() && j["schema"].get<int>() == kSchemaVersion)) {
    throw InputError(ctx + ": unsupported schema version");
  }
}

}  // namespace

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Models

Json spec_to_json(const ModelSpec& spec) {
  Json w;
  w["kind"] = to_string(spec.weights.kind);
  if (spec.weights.kind == WeightKind::exogenous) {
    w["table"] = matrix_to_json(spec.weights.exogenous);
  } else {
    w["switch"] = Json{{"variable", spec.weights.switch_var.variable + 1}, {"lag", spec.weights.switch_var.lag}};
  }
  Json j;
  j["d"] = spec.d;
  j["p"] = spec.p;
  j["M"] = spec.M;
  j["weights"] = w;
  return j;
}

ModelSpec spec_from_json(const Json& j, const std::string& base_dir) {
  const std::string ctx = "spec";
  ModelSpec spec;
  spec.d = integer(field(j, "d", ctx), ctx + ".d");
  spec.p = integer(field(j, "p", ctx), ctx + ".p");
  spec.M = integer(field(j, "M", ctx), ctx + ".M");
  const Json& w = field(j, "weights", ctx);
  const Json& kind = field(w, "kind", ctx + ".weights");
  if (!kind.is_string()) throw InputError(ctx + ".weights.kind: expected a string");
  try {
    spec.weights.kind = weight_kind_from_string(kind.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(ctx + ".weights.kind: " + e.what());
  }
  spec.weights.regimes = spec.M;
  if (spec.weights.kind == WeightKind::exogenous) {
    const Json& table = field(w, "table", ctx + ".weights");
    MatrixXd values;
    if (table.is_string()) {
      std::filesystem::path path = table.get<std::string>();
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      CsvTable csv = read_csv(path.string());
      values = csv.values;
      if (!csv.names.empty() && csv.names.front() == "t") values = values.rightCols(values.cols() - 1).eval();
    } else {
      values = table_from_json(table, ctx + ".weights.table");
    }
    try {
      spec.weights.exogenous = normalize_exogenous(values);
    } catch (const std::invalid_argument& e) {
      throw InputError(ctx + ".weights.table: " + e.what());
    }
  } else {
    const Json& sw = field(w, "switch", ctx + ".weights");
    spec.weights.switch_var.variable = integer(field(sw, "variable", ctx + ".weights.switch"), ctx + ".weights.switch.variable") - 1;
    spec.weights.switch_var.lag = integer(field(sw, "lag", ctx + ".weights.switch"), ctx + ".weights.switch.lag");
  }
  try {
    spec.validate();
    if (spec.weights.kind == WeightKind::exogenous) validate(spec.weights, WeightParams{});
  } catch (const std::invalid_argument& e) {
    throw InputError(ctx + ": " + e.what());
  }
  return spec;
}

Json params_to_json(const ModelSpec& spec, const Params& params) {
  Json j;
  Json phi = Json::array();
  Json a = Json::array();
  Json b = Json::array();
  for (Index m = 0; m < spec.M; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    phi.push_back(vector_to_json(params.phi[mi]));
    Json lags = Json::array();
    for (const auto& am : params.ar[mi]) lags.push_back(matrix_to_json(am));
    a.push_back(lags);
    b.push_back(matrix_to_json(params.impact[mi]));
  }
  j["phi"] = phi;
  j["A"] = a;
  j["B"] = b;
  Json w = Json::object();
  if (spec.weights.kind == WeightKind::logistic) {
    w["c"] = params.weights.location;
    w["gamma"] = params.weights.scale;
  } else if (spec.weights.kind == WeightKind::threshold) {
    w["thresholds"] = params.weights.thresholds;
  }
  j["weight_params"] = w;
  j["nu"] = vector_to_json(params.nu);
  j["lambda"] = vector_to_json(params.lambda);
  return j;
}

Params params_from_json(const Json& j, const ModelSpec& spec) {
  const std::string ctx = "params";
  const Index d = spec.d;
  Params params = default_params(spec);
  const Json& phi = field(j, "phi", ctx);
  const Json& a = field(j, "A", ctx);
  const Json& b = field(j, "B", ctx);
  const auto M = static_cast<std::size_t>(spec.M);
  if (!phi.is_array() || phi.size() != M) throw InputError(ctx + ".phi: expected one vector per regime");
  if (!a.is_array() || a.size() != M) throw InputError(ctx + ".A: expected one list of lag matrices per regime");
  if (!b.is_array() || b.size() != M) throw InputError(ctx + ".B: expected one matrix per regime");
  for (std::size_t m = 0; m < M; ++m) {
    const std::string r = "[" + std::to_string(m + 1) + "]";
    params.phi[m] = vector_from_json(phi[m], d, ctx + ".phi" + r);
    if (!a[m].is_array() || static_cast<Index>(a[m].size()) != spec.p) {
      throw InputError(ctx + ".A" + r + ": expected p = " + std::to_string(spec.p) + " matrices");
    }
    for (Index i = 0; i < spec.p; ++i) {
      params.ar[m][static_cast<std::size_t>(i)] =
          matrix_from_json(a[m][static_cast<std::size_t>(i)], d, d, ctx + ".A" + r + "[" + std::to_string(i + 1) + "]");
    }
    params.impact[m] = matrix_from_json(b[m], d, d, ctx + ".B" + r);
  }
  const Json& w = j.contains("weight_params") ? j["weight_params"] : Json::object();
  if (spec.weights.kind == WeightKind::logistic) {
    params.weights.location = number(field(w, "c", ctx + ".weight_params"), ctx + ".weight_params.c");
    params.weights.scale = number(field(w, "gamma", ctx + ".weight_params"), ctx + ".weight_params.gamma");
  } else if (spec.weights.kind == WeightKind::threshold) {
    const Json& r = field(w, "thresholds", ctx + ".weight_params");
    const VectorXd thresholds = vector_from_json(r, spec.M - 1, ctx + ".weight_params.thresholds");
    params.weights.thresholds.assign(thresholds.data(), thresholds.data() + thresholds.size());
  }
  params.nu = vector_from_json(field(j, "nu", ctx), d, ctx + ".nu");
  params.lambda = vector_from_json(field(j, "lambda", ctx), d, ctx + ".lambda");
  try {
    validate(spec, params);
  } catch (const std::invalid_argument& e) {
    throw InputError(ctx + ": " + e.what());
  }
  return params;
}

Json model_to_json(const ModelSpec& spec, const Params& params) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["spec"] = spec_to_json(spec);
  j["params"] = params_to_json(spec, params);
  return j;
}

Model read_model(const std::string& path, Index index) {
  const Json j = read_json(path);
  check_schema(j, path);
  const std::string base = std::filesystem::path(path).parent_path().string();
  try {
    Model model;
    model.spec = spec_from_json(field(j, "spec", path), base.empty() ? "." : base);
    if (j.contains("solutions")) {
      const Json& sols = j["solutions"];
      if (!sols.is_array() || index < 0 || index >= static_cast<Index>(sols.size())) {
        throw InputError(path + ": solution " + std::to_string(index + 1) + " not present");
      }
      model.params = params_from_json(field(sols[static_cast<std::size_t>(index)], "params", "solution"), model.spec);
    } else if (j.contains("survivors")) {
      const Json& sols = j["survivors"];
      if (!sols.is_array() || index < 0 || index >= static_cast<Index>(sols.size())) {
        throw InputError(path + ": survivor " + std::to_string(index + 1) + " not present");
      }
      const Json& sol = field(sols[static_cast<std::size_t>(index)], "solution", "survivor");
      model.params = params_from_json(field(sol, "params", "solution"), model.spec);
    } else {
      model.params = params_from_json(field(j, "params", path), model.spec);
    }
    return model;
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Estimation artifacts

namespace {

Json jsr_to_json(const JsrBound& b) {
  Json j;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["tolerance"] = b.tolerance;
  j["products_explored"] = b.products_explored;
  j["depth_reached"] = b.depth_reached;
  j["converged"] = b.converged;
  return j;
}

}  // namespace

Json solution_to_json(const ModelSpec& spec, const Solution& sol, Index rank) {
  Json j;
  j["rank"] = rank + 1;
  j["pen_ll"] = sol.pen_ll;
  j["ll"] = sol.ll;
  j["penalty"] = sol.penalty;
  j["max_modulus"] = sol.max_modulus;
  j["stable"] = sol.stable;
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["round"] = sol.round_id + 1;
  j["seed"] = sol.seed;
  j["normalized"] = sol.normalized;
  j["jsr"] = sol.jsr ? jsr_to_json(*sol.jsr) : Json(nullptr);
  j["params"] = params_to_json(spec, sol.params);
  return j;
}

Json solutions_to_json(const ModelSpec& spec, const SolutionSet& set, const Provenance& provenance) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["provenance"] = provenance.to_json();
  j["spec"] = spec_to_json(spec);
  Json s1;
  s1["q"] = set.step1.q;
  s1["pq"] = set.step1.pq;
  s1["rss_hat"] = set.step1.rss_hat;
  s1["min_contribution"] = set.step1.min_contribution;
  s1["grid_size"] = set.step1.grid_size;
  s1["screened"] = set.step1.screened;
  s1["params"] = params_to_json(spec, set.step1.params);
  j["step1"] = s1;
  j["rounds"] = set.rounds;
  j["failed_rounds"] = set.failed_rounds;
  j["duplicates"] = set.duplicates;
  Json sols = Json::array();
  for (std::size_t k = 0; k < set.solutions.size(); ++k) {
    sols.push_back(solution_to_json(spec, set.solutions[k], static_cast<Index>(k)));
  }
  j["solutions"] = sols;
  return j;
}

std::vector<Solution> solutions_from_json(const Json& j, const ModelSpec& spec) {
  const Json& sols = field(j, "solutions", "solutions file");
  if (!sols.is_array()) throw InputError("solutions: expected an array");
  std::vector<Solution> out;
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const std::string ctx = "solutions[" + std::to_string(k + 1) + "]";
    const Json& s = sols[k];
    Solution sol;
    sol.params = params_from_json(field(s, "params", ctx), spec);
    sol.pen_ll = number(field(s, "pen_ll", ctx), ctx + ".pen_ll");
    sol.ll = number(field(s, "ll", ctx), ctx + ".ll");
    sol.penalty = s.contains("penalty") ? number(s["penalty"], ctx + ".penalty") : sol.ll - sol.pen_ll;
    if (s.contains("max_modulus")) sol.max_modulus = s["max_modulus"].get<std::vector<double>>();
    sol.stable = s.value("stable", false);
    sol.converged = s.value("converged", false);
    sol.iterations = s.value("iterations", Index{0});
    sol.round_id = s.value("round", Index{1}) - 1;
    sol.seed = s.value("seed", std::uint64_t{0});
    sol.normalized = s.value("normalized", false);
    out.push_back(std::move(sol));
  }
  return out;
}

namespace {

std::pair<Index, Index> entry_from_json(const Json& e, const std::string& ctx) {
  if (!e.is_array() || e.size() != 2) throw InputError(ctx + ": entries are [row, column] pairs");
  return {integer(e[0], ctx) - 1, integer(e[1], ctx) - 1};
}

}  // namespace

RestrictionSet restrictions_from_json(const Json& j) {
  const Json& list = j.is_object() ? field(j, "restrictions", "restrictions file") : j;
  if (!list.is_array()) throw InputError("restrictions: expected an array");
  RestrictionSet out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string ctx = "restrictions[" + std::to_string(k + 1) + "]";
    const Json& r = list[k];
    Restriction res;
    const Json& type = field(r, "type", ctx);
    const std::string name = type.is_string() ? type.get<std::string>() : "";
    if (name == "sign") {
      res.kind = RestrictionKind::sign;
    } else if (name == "dominance") {
      res.kind = RestrictionKind::dominance;
    } else if (name == "cross_sign") {
      res.kind = RestrictionKind::cross_sign;
    } else {
      throw InputError(ctx + ".type: expected sign, dominance or cross_sign");
    }
    if (r.contains("regime")) {
      const Json& m = r["regime"];
      if (m.is_string() && m.get<std::string>() == "all") {
        res.regime.reset();
      } else {
        res.regime = integer(m, ctx + ".regime") - 1;
      }
    }
    const Json& entries = field(r, "entries", ctx);
    if (!entries.is_array() || entries.empty()) throw InputError(ctx + ".entries: expected a nonempty array");
    if (entries.front().is_number()) {
      res.entries.push_back(entry_from_json(entries, ctx + ".entries"));
    } else {
      for (const auto& e : entries) res.entries.push_back(entry_from_json(e, ctx + ".entries"));
    }
    if (res.kind == RestrictionKind::sign) {
      const Json& s = field(r, "sign", ctx);
      if (s.is_string()) {
        const std::string v = s.get<std::string>();
        if (v != "+" && v != "-" && v != "positive" && v != "negative") throw InputError(ctx + ".sign: expected + or -");
        res.sign = (v == "+" || v == "positive") ? 1 : -1;
      } else {
        const double v = number(s, ctx + ".sign");
        if (v == 0.0) throw InputError(ctx + ".sign: must be nonzero");
        res.sign = v > 0.0 ? 1 : -1;
      }
    }
    if (res.kind == RestrictionKind::cross_sign) {
      const std::string rel = r.value("relation", std::string("same"));
      if (rel != "same" && rel != "opposite") throw InputError(ctx + ".relation: expected same or opposite");
      res.same = rel == "same";
      if (res.entries.size() > 2) throw InputError(ctx + ".entries: cross_sign takes one or two entries");
    }
    res.label = r.value("label", name + "#" + std::to_string(k + 1));
    out.push_back(std::move(res));
  }
  return out;
}

Json filter_to_json(const ModelSpec& spec, const FilterResult& result, const RestrictionSet& restrictions,
                    const Provenance& provenance) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["provenance"] = provenance.to_json();
  j["spec"] = spec_to_json(spec);
  Json survivors = Json::array();
  for (std::size_t k = 0; k < result.survivors.size(); ++k) {
    const auto& s = result.survivors[k];
    Json e;
    e["source_rank"] = s.source_rank + 1;
    Json perm = Json::array();
    for (Index c : s.labeling.perm) perm.push_back(c + 1);
    e["labeling"] = Json{{"columns", perm}, {"signs", vector_to_json(s.labeling.signs)}};
    e["satisfying_assignments"] = s.satisfying_assignments;
    e["solution"] = solution_to_json(spec, s.solution, static_cast<Index>(k));
    survivors.push_back(e);
  }
  j["survivors"] = survivors;
  Json failures = Json::array();
  for (std::size_t k = 0; k < restrictions.size(); ++k) {
    failures.push_back(Json{{"restriction", restrictions[k].label}, {"failures", result.failure_counts[k]}});
  }
  j["failure_counts"] = failures;
  j["outside_window"] = result.outside_window;
  return j;
}

Json ergodic_to_json(const ErgodicReport& report, const Provenance& provenance) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["provenance"] = provenance.to_json();
  Json regimes = Json::array();
  for (std::size_t m = 0; m < report.stability.moduli.size(); ++m) {
    regimes.push_back(Json{{"regime", m + 1},
                           {"moduli", vector_to_json(report.stability.moduli[m])},
                           {"spectral_radius", report.stability.max_modulus[m]}});
  }
  j["regimes"] = regimes;
  j["stable"] = report.stability.stable;
  j["jsr"] = report.jsr ? jsr_to_json(*report.jsr) : Json(nullptr);
  if (report.b1b2) {
    Json eig = Json::array();
    for (Index i = 0; i < report.b1b2->eigenvalues.size(); ++i) {
      eig.push_back(Json::array({report.b1b2->eigenvalues(i).real(), report.b1b2->eigenvalues(i).imag()}));
    }
    j["b1_inv_b2"] = Json{{"pass", report.b1b2->pass}, {"eigenvalues", eig}};
  } else {
    j["b1_inv_b2"] = nullptr;
  }
  j["verified"] = report.verified;
  j["verdict"] = report.verdict;
  return j;
}

// ---------------------------------------------------------------------------
// Tabular outputs

void write_girf_long(std::ostream& out, const GirfResult& result, const Provenance& provenance) {
  out << provenance.comment_line() << '\n' << "history_id,h,target,value\n";
  for (std::size_t k = 0; k < result.paths.size(); ++k) {
    const MatrixXd& path = result.paths[k];
    const Index id = result.path_history[k] + 1;
    for (Index h = 0; h < path.rows(); ++h) {
      for (Index c = 0; c < path.cols(); ++c) {
        out << id << ',' << h << ',' << result.columns[static_cast<std::size_t>(c)] << ','
            << format_double(path(h, c)) << '\n';
      }
    }
  }
}

void write_girf_summary(std::ostream& out, const GirfResult& result, const Provenance& provenance) {
  out << provenance.comment_line() << '\n' << "h,target";
  for (double level : girf_quantile_levels()) out << ",q" << format_double(level);
  out << '\n';
  if (result.quantiles.empty()) return;
  for (Index h = 0; h < result.quantiles.front().rows(); ++h) {
    for (Index c = 0; c < result.quantiles.front().cols(); ++c) {
      out << h << ',' << result.columns[static_cast<std::size_t>(c)];
      for (const auto& q : result.quantiles) out << ',' << format_double(q(h, c));
      out << '\n';
    }
  }
}

void write_girf_svg(std::ostream& out, const GirfResult& result, Index column) {
  const double width = 640.0;
  const double height = 400.0;
  const double pad = 40.0;
  double lo = 0.0;
  double hi = 0.0;
  Index rows = 1;
  for (const auto& p : result.paths) {
    lo = std::min(lo, p.col(column).minCoeff());
    hi = std::max(hi, p.col(column).maxCoeff());
    rows = p.rows();
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  auto x = [&](Index h) { return pad + (width - 2 * pad) * static_cast<double>(h) / static_cast<double>(std::max<Index>(rows - 1, 1)); };
  auto y = [&](double v) { return height - pad - (height - 2 * pad) * (v - lo) / (hi - lo); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<text x=\"" << pad << "\" y=\"20\" font-size=\"14\">" << result.columns[static_cast<std::size_t>(column)]
      << "</text>\n";
  out << "<line x1=\"" << pad << "\" x2=\"" << width - pad << "\" y1=\"" << y(0.0) << "\" y2=\"" << y(0.0)
      << "\" stroke=\"black\"/>\n";
  for (const auto& p : result.paths) {
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-opacity=\"0.08\" points=\"";
    for (Index h = 0; h < p.rows(); ++h) out << (h ? " " : "") << x(h) << ',' << y(p(h, column));
    out << "\"/>\n";
  }
  if (!result.quantiles.empty()) {
    const MatrixXd& median = result.quantiles[2];
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (Index h = 0; h < median.rows(); ++h) out << (h ? " " : "") << x(h) << ',' << y(median(h, column));
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void write_corr(std::ostream& out, const CorrReport& report, const std::vector<std::string>& names,
                const Provenance& provenance) {
  out << provenance.comment_line() << " band=" << format_double(report.band) << '\n' << "lag,var_i,var_j,corr\n";
  for (Index k = 0; k <= report.max_lag; ++k) {
    const MatrixXd& c = report.corr[static_cast<std::size_t>(k)];
    for (Index i = 0; i < c.rows(); ++i) {
      for (Index j = 0; j < c.cols(); ++j) {
        out << k << ',' << names[static_cast<std::size_t>(i)] << ',' << names[static_cast<std::size_t>(j)] << ','
            << format_double(c(i, j)) << '\n';
      }
    }
  }
}

void write_qq(std::ostream& out, const std::vector<QqPoint>& points, const Provenance& provenance) {
  out << provenance.comment_line() << '\n' << "k,theoretical,empirical\n";
  for (const auto& q : points) out << q.k << ',' << format_double(q.theoretical) << ',' << format_double(q.empirical) << '\n';
}

}  // namespace stvar
