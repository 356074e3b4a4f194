#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stvar/estimate.hpp"
#include "stvar/girf.hpp"
#include "stvar/diagnostics.hpp"

namespace stvar {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tool version, master seed and content hashes of the inputs, embedded in
/// every artifact.
struct Provenance {
  std::string version = STVARKIT_VERSION;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // (role, sha256)
  std::string comment_line() const;
  Json to_json() const;
};

/// Shortest representation that round-trips.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> names;
  MatrixXd values;
};

/// Header row then numeric rows; lines starting with '#' are skipped.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& source);
void write_csv(std::ostream& out, const std::vector<std::string>& names, const Eigen::Ref<const MatrixXd>& values,
               const Provenance* provenance = nullptr);

// Models

Json spec_to_json(const ModelSpec& spec);
Json params_to_json(const ModelSpec& spec, const Params& params);
Json model_to_json(const ModelSpec& spec, const Params& params);

/// `base_dir` resolves a relative exogenous-weights CSV path.
ModelSpec spec_from_json(const Json& j, const std::string& base_dir = ".");
Params params_from_json(const Json& j, const ModelSpec& spec);

struct Model {
  ModelSpec spec;
  Params params;
};

/// Reads a model file or a solutions file (taking solution `index`, zero-based).
Model read_model(const std::string& path, Index index = 0);
Json read_json(const std::string& path);

// Estimation artifacts

Json solution_to_json(const ModelSpec& spec, const Solution& sol, Index rank);
Json solutions_to_json(const ModelSpec& spec, const SolutionSet& set, const Provenance& provenance);
std::vector<Solution> solutions_from_json(const Json& j, const ModelSpec& spec);

RestrictionSet restrictions_from_json(const Json& j);
Json filter_to_json(const ModelSpec& spec, const FilterResult& result, const RestrictionSet& restrictions,
                    const Provenance& provenance);

Json ergodic_to_json(const ErgodicReport& report, const Provenance& provenance);

// Tabular outputs

void write_girf_long(std::ostream& out, const GirfResult& result, const Provenance& provenance);
void write_girf_summary(std::ostream& out, const GirfResult& result, const Provenance& provenance);
void write_girf_svg(std::ostream& out, const GirfResult& result, Index column);

void write_corr(std::ostream& out, const CorrReport& report, const std::vector<std::string>& names,
                const Provenance& provenance);
void write_qq(std::ostream& out, const std::vector<QqPoint>& points, const Provenance& provenance);

}  // namespace stvar
