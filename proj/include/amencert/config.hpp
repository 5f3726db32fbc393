#pragma once

// JSON run configuration: group, action, measure, grid, radii, tolerances,
// witness sources and command parameters. Schema violations raise InputError
// carrying a JSON pointer to the offending field.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amencert/certifier.hpp"
#include "amencert/circle.hpp"
#include "amencert/group.hpp"
#include "amencert/measures.hpp"
#include "amencert/module.hpp"
#include "amencert/spectral.hpp"

namespace amencert {

using Json = nlohmann::json;

struct Tolerances {
  double psd = 1e-8;            // replay: min eigenvalue floor
  double witness_norm = 1e-6;   // (b) check
  double epsilon = 1.0;         // witness: (c) threshold
  double dirichlet_residual = 1e-9;
  double consistency = -1.0;    // sampled diffeos; negative means 10/N

  Json to_json() const;
};

/// How lambda_1 is obtained for a certificate.
struct Lambda1Source {
  std::string kind = "exact";  // exact | certified_lower_bound | dirichlet
  double value = 0.0;
  std::string source;
  int radius = 0;
};

struct WitnessSource {
  std::string kind;  // folner | ball | values
  int n = 0;
  int radius = 0;
  double phase = 0.0;
  Json values;       // word -> grid values
};

struct RunConfig {
  Json echo;  // the parsed document, embedded in every report
  GroupSpec group;
  Index grid_size = kDefaultGridSize;
  Json action_spec;      // null when absent
  Json comparison_spec;  // null when absent
  Json measure_spec = Json{{"kind", "lebesgue"}};
  std::optional<Json> pair_spec;  // hellinger: {"mu1": ..., "mu2": ...}
  Lambda1Source lambda1;
  std::string route = "hellinger";
  int radius = 3;
  bool radius_given = false;
  int max_radius = 5;
  Arc arc{0.0, 1.0};
  std::optional<WitnessSource> witness;
  std::vector<double> sweep_a;
  Tolerances tol;
  std::uint64_t seed = 0;
  std::size_t ball_cap = kDefaultBallCap;
  std::filesystem::path base_dir;
};

/// Throws InputError on unreadable files, malformed JSON or schema violations.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

/// "F2", "Z3", "free:2", "free_abelian:2" or a JSON object {"family","rank"}.
GroupSpec parse_group_arg(const std::string& text);

GroupSpec group_from_json(const Json& j, const std::string& pointer = "");
Json group_to_json(const GroupSpec& spec);

CircleDiffeo diffeo_from_json(const Json& j, Index n, double consistency_tol = -1.0,
                              const std::string& pointer = "");
GridMeasure measure_from_json(const Json& j, Index n, const std::string& pointer = "");

ActionSpec build_action(const RunConfig& cfg);
/// Explicit "comparison" block, or rotations by each generator's theta.
ActionSpec build_comparison(const RunConfig& cfg);
GridMeasure build_measure(const RunConfig& cfg);
ModuleVector build_witness(const RunConfig& cfg);
Lambda1Value resolve_lambda1(const RunConfig& cfg);

/// {word: [grid values]}
Json module_vector_to_json(const ModuleVector& xi);
ModuleVector module_vector_from_json(const Json& j, const GroupSpec& spec, Index n,
                                     const std::string& pointer = "");

/// Resource cap from AMENCERT_MAX_BALL, or the default.
std::size_t ball_cap_from_env();

}  // namespace amencert
