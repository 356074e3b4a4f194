#include "stvar/harness.hpp"

#include <cmath>
#include <mutex>
#include <ostream>

#include "stvar/parallel.hpp"
#include "stvar/rng.hpp"

namespace stvar {

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

VectorXd vec2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

}  // namespace

Model lstvar_fixture(int variant) {
  if (variant != 1 && variant != 2) throw std::invalid_argument("lstvar_fixture: variant must be 1 or 2");
  Model m;
  m.spec.d = 2;
  m.spec.p = 1;
  m.spec.M = 2;
  m.spec.weights.kind = WeightKind::logistic;
  m.spec.weights.regimes = 2;
  m.spec.weights.switch_var = SwitchVariable{0, 1};
  Params& p = m.params;
  if (variant == 1) {
    p.phi = {vec2(0.3, 0.6), vec2(1.2, -1.1)};
    p.ar = {{mat2(0.7, -0.3, 0.2, 0.4)}, {mat2(0.5, 0.2, 0.3, 0.5)}};
  } else {
    p.phi = {vec2(0.3, 0.2), vec2(0.72, -0.87)};
    p.ar = {{mat2(1.1, -0.3, 0.2, 0.8)}, {mat2(0.74, 0.2, 0.3, 0.73)}};
  }
  // vec(B_1) = (0.6, -0.3, 0.2, 0.4), vec(B_2) = (0.7, 0.1, 0.3, 0.8)
  p.impact = {mat2(0.6, 0.2, -0.3, 0.4), mat2(0.7, 0.3, 0.1, 0.8)};
  p.weights.location = 0.8;
  p.weights.scale = 5.0;
  p.nu = vec2(2.5, 12.0);
  p.lambda = vec2(-0.5, 0.2);
  validate(m.spec, p);
  return m;
}

std::vector<Coordinate> flatten_params(const ModelSpec& spec, const Params& params) {
  std::vector<Coordinate> out;
  const Index d = spec.d;
  for (Index m = 0; m < spec.M; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    const std::string r = std::to_string(m + 1);
    for (Index i = 0; i < d; ++i) out.push_back({"phi" + r + "_" + std::to_string(i + 1), params.phi[mi](i)});
    for (Index l = 0; l < spec.p; ++l) {
      const MatrixXd& a = params.ar[mi][static_cast<std::size_t>(l)];
      for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < d; ++i) {
          out.push_back({"A" + r + "_" + std::to_string(l + 1) + "_" + std::to_string(i + 1) + std::to_string(j + 1), a(i, j)});
        }
      }
    }
  }
  for (Index m = 0; m < spec.M; ++m) {
    const MatrixXd& b = params.impact[static_cast<std::size_t>(m)];
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < d; ++i) {
        out.push_back({"B" + std::to_string(m + 1) + "_" + std::to_string(i + 1) + std::to_string(j + 1), b(i, j)});
      }
    }
  }
  if (spec.weights.kind == WeightKind::logistic) {
    out.push_back({"c", params.weights.location});
    out.push_back({"gamma", params.weights.scale});
  } else if (spec.weights.kind == WeightKind::threshold) {
    for (std::size_t k = 0; k < params.weights.thresholds.size(); ++k) {
      out.push_back({"r" + std::to_string(k + 1), params.weights.thresholds[k]});
    }
  }
  for (Index i = 0; i < d; ++i) out.push_back({"nu_" + std::to_string(i + 1), params.nu(i)});
  for (Index i = 0; i < d; ++i) out.push_back({"lambda_" + std::to_string(i + 1), params.lambda(i)});
  return out;
}

McDesign default_mc_design(int variant) {
  McDesign design;
  design.truth = lstvar_fixture(variant);
  design.estimate.rounds = 8;
  design.estimate.ga.generations = 100;
  return design;
}

const McCell* McReport::find(const std::string& parameter, Index periods) const {
  for (const auto& c : cells) {
    if (c.parameter == parameter && c.periods == periods) return &c;
  }
  return nullptr;
}

McReport run_mc(const McDesign& design, const McProgress& progress) {
  const ModelSpec& spec = design.truth.spec;
  const Params& truth = design.truth.params;
  validate(spec, truth);
  if (design.replications < 0) throw std::invalid_argument("run_mc: negative replication count");
  const auto reference = flatten_params(spec, truth);
  const auto n_coord = reference.size();
  VectorXd signs(spec.d);
  for (Index i = 0; i < spec.d; ++i) signs(i) = truth.lambda(i) > 0 ? 1.0 : (truth.lambda(i) < 0 ? -1.0 : 0.0);

  McReport report;
  if (design.replications == 0) return report;
  std::mutex lock;
  for (std::size_t s = 0; s < design.sample_sizes.size(); ++s) {
    const Index periods = design.sample_sizes[s];
    const std::uint64_t size_seed = derive_seed(design.seed, static_cast<std::uint64_t>(periods));
    std::vector<std::vector<double>> errors(static_cast<std::size_t>(design.replications));
    std::vector<bool> ok(static_cast<std::size_t>(design.replications), false);
    parallel_for(design.replications, resolve_threads(design.threads), [&](Index r) {
      const std::uint64_t seed = derive_seed(size_seed, static_cast<std::uint64_t>(r));
      std::string message;
      try {
        SimulationOptions sim;
        sim.periods = periods;
        sim.seed = seed;
        sim.burnin = design.burnin;
        const Simulation data = simulate(spec, truth, sim);
        EstimateConfig cfg = design.estimate;
        cfg.seed = derive_seed(seed, 1);
        cfg.threads = 1;
        const SolutionSet set = run_three_step(spec, data.data, cfg);
        if (set.solutions.empty()) throw NumericError("run_mc: every estimation round failed", 0);
        const Params est = normalize_by_skewness(set.solutions.front().params, signs);
        const auto flat = flatten_params(spec, est);
        std::vector<double> e(n_coord);
        for (std::size_t k = 0; k < n_coord; ++k) e[k] = flat[k].value - reference[k].value;
        errors[static_cast<std::size_t>(r)] = std::move(e);
        ok[static_cast<std::size_t>(r)] = true;
      } catch (const std::exception& ex) {
        message = ex.what();
      }
      std::lock_guard<std::mutex> guard(lock);
      if (!message.empty()) {
        report.failure_messages.push_back("T=" + std::to_string(periods) + " rep " + std::to_string(r + 1) + ": " + message);
      }
      if (progress) progress(periods, r, message.empty());
    });

    Index failures = 0;
    for (bool b : ok) failures += b ? 0 : 1;
    report.failures.push_back(failures);
    if (10 * failures >= design.replications) report.failed = true;
    const Index n = design.replications - failures;
    for (std::size_t k = 0; k < n_coord; ++k) {
      double sum = 0.0;
      for (Index r = 0; r < design.replications; ++r) {
        if (ok[static_cast<std::size_t>(r)]) sum += errors[static_cast<std::size_t>(r)][k];
      }
      const double mean = n > 0 ? sum / static_cast<double>(n) : std::nan("");
      double ss = 0.0;
      for (Index r = 0; r < design.replications; ++r) {
        if (ok[static_cast<std::size_t>(r)]) ss += std::pow(errors[static_cast<std::size_t>(r)][k] - mean, 2);
      }
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : std::nan("");
      report.cells.push_back(McCell{reference[k].name, periods, mean, sd, n});
    }
  }
  return report;
}

void write_mc_report(std::ostream& out, const McReport& report, const Provenance& provenance) {
  out << provenance.comment_line() << '\n' << "parameter,T,mean_error,sd\n";
  for (const auto& c : report.cells) {
    out << c.parameter << ',' << c.periods << ',' << format_double(c.mean_error) << ',' << format_double(c.sd) << '\n';
  }
}

}  // namespace stvar
