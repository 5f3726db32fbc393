#include "amencert/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "amencert/errors.hpp"

namespace amencert::cli {

namespace {

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

Json provenance(const std::string& command, const RunConfig& cfg) {
  return Json{{"tool", "amencert"},
              {"version", kVersion},
              {"eigen", eigen_version()},
              {"command", command},
              {"config", cfg.echo},
              {"seed", cfg.seed},
              {"grid_size", cfg.grid_size},
              {"ball_cap", cfg.ball_cap},
              {"tolerances", cfg.tol.to_json()}};
}

Json to_json(const Lambda1Value& v) {
  Json j{{"value", v.value}, {"kind", to_string(v.kind)}};
  if (!v.source.empty()) j["source"] = v.source;
  if (v.kind == Lambda1Kind::EstimateFromAbove) {
    j["radius"] = v.radius;
    j["residual"] = v.residual;
  }
  return j;
}

Json to_json(const CertificateReport& r) {
  return Json{{"verdict", to_string(r.verdict)},
              {"route", r.route},
              {"avg_h_sq", r.avg_h_sq},
              {"beta", r.beta},
              {"lambda1", to_json(r.lambda1)},
              {"margin", r.margin},
              {"slack", r.slack},
              {"quadrature_error", r.quadrature_error},
              {"cross_check", r.cross_check},
              {"grid_size", r.grid_size},
              {"group", group_to_json(r.group)},
              {"reason", r.reason}};
}

void require_cap(const RunConfig& cfg, int radius) {
  const std::size_t n = ball_size(cfg.group, radius);
  if (n > cfg.ball_cap) {
    throw ResourceError("ball of radius " + std::to_string(radius) + " in " + cfg.group.describe() +
                        " has " + std::to_string(n) + " elements, above the cap " +
                        std::to_string(cfg.ball_cap));
  }
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::string text_;
};

CertificateReport certify_once(const RunConfig& cfg, const ActionSpec& action, const Lambda1Value& l1) {
  if (cfg.route == "generator_derivative") {
    if (!build_measure(cfg).is_lebesgue()) {
      throw UnsupportedMeasureError("generator_derivative route requires the Lebesgue measure");
    }
    return certify_generator_derivative(action, l1);
  }
  return certify_hellinger(action, build_measure(cfg), l1);
}

// Replaces "a" in every sine generator (including composite factors).
Json with_amplitude(Json spec, double a) {
  if (spec.is_object()) {
    if (spec.value("kind", "") == "sine") spec["a"] = a;
    for (auto& [k, v] : spec.items()) {
      if (v.is_structured()) v = with_amplitude(v, a);
    }
  } else if (spec.is_array()) {
    for (auto& v : spec) v = with_amplitude(v, a);
  }
  return spec;
}

CommandOutput cmd_certify(const RunConfig& cfg) {
  const Lambda1Value l1 = resolve_lambda1(cfg);
  const ActionSpec action = build_action(cfg);
  CommandOutput out;
  out.report = to_json(certify_once(cfg, action, l1));
  out.report["action"] = cfg.action_spec;
  out.report["measure"] = cfg.measure_spec;
  out.report["warnings"] = action.warnings();
  if (!cfg.sweep_a.empty()) {
    Csv csv{"a", "avg_h_sq", "margin", "slack", "verdict"};
    Json sweep = Json::array();
    for (double a : cfg.sweep_a) {
      RunConfig c = cfg;
      c.action_spec = with_amplitude(cfg.action_spec, a);
      const CertificateReport r = certify_once(c, build_action(c), l1);
      csv.row(a, r.avg_h_sq, r.margin, r.slack, to_string(r.verdict));
      sweep.push_back(Json{{"a", a}, {"avg_h_sq", r.avg_h_sq}, {"margin", r.margin},
                           {"slack", r.slack}, {"verdict", to_string(r.verdict)}});
    }
    out.report["sweep"] = sweep;
    out.csv = csv.str();
  }
  return out;
}

CommandOutput cmd_lambda1(const RunConfig& cfg) {
  CommandOutput out;
  const Lambda1Value v = resolve_lambda1(cfg);
  out.report = to_json(v);
  out.report["group"] = group_to_json(cfg.group);
  if (v.kind == Lambda1Kind::EstimateFromAbove) {
    Csv csv{"radius", "value", "residual"};
    DirichletOptions opts;
    opts.residual_tol = cfg.tol.dirichlet_residual;
    opts.ball_cap = cfg.ball_cap;
    Json series = Json::array();
    for (int r = 1; r < v.radius; ++r) {
      const Lambda1Value e = lambda1_dirichlet(cfg.group, r, opts);
      csv.row(r, e.value, e.residual);
      series.push_back(Json{{"radius", r}, {"value", e.value}});
    }
    csv.row(v.radius, v.value, v.residual);
    series.push_back(Json{{"radius", v.radius}, {"value", v.value}});
    out.report["series"] = series;
    out.csv = csv.str();
  }
  return out;
}

CommandOutput cmd_hellinger(const RunConfig& cfg) {
  if (!cfg.pair_spec && cfg.action_spec.is_null()) {
    throw InputError("config /hellinger: needs a measure pair or an action");
  }
  const GridMeasure nu = build_measure(cfg);
  CommandOutput out;
  out.report["measure"] = cfg.measure_spec;
  if (cfg.pair_spec) {
    const GridMeasure mu1 = measure_from_json((*cfg.pair_spec)["mu1"], cfg.grid_size, "/hellinger/mu1");
    const GridMeasure mu2 = measure_from_json((*cfg.pair_spec)["mu2"], cfg.grid_size, "/hellinger/mu2");
    const double h = hellinger(mu1, mu2, nu);
    const double tv = total_variation(mu1, mu2, nu);
    out.report["pair"] = Json{{"hellinger", h},
                              {"affinity", affinity(mu1, mu2, nu)},
                              {"total_variation", tv},
                              {"l1", l1_distance(mu1, mu2, nu)},
                              {"sandwich_lower", h * h},
                              {"sandwich_upper", h * std::sqrt(2.0 - h * h)}};
  }
  if (!cfg.action_spec.is_null()) {
    const ActionSpec action = build_action(cfg);
    Json per = Json::array();
    for (Letter s = 0; s < cfg.group.num_generators(); ++s) {
      const GridMeasure pushed = pushforward(nu, action.letter(s));
      per.push_back(Json{{"generator", std::string(1, letter_symbol(s))},
                         {"hellinger", hellinger(nu, pushed, nu)}});
    }
    out.report["generators"] = per;
    out.report["avg_h_sq"] = avg_hellinger_sq(action, nu);
    out.report["avg_h_sq_via_pushforward"] = avg_hellinger_sq_via_pushforward(action, nu);
    out.report["quadrature_error"] = avg_hellinger_sq_quadrature_error(action, nu);
  }
  return out;
}

CommandOutput cmd_evidence(const RunConfig& cfg) {
  require_cap(cfg, cfg.max_radius);
  const EvidenceReport e = evidence_theorem2(build_action(cfg), build_measure(cfg), cfg.max_radius);
  CommandOutput out;
  out.report = Json{{"radii", e.radii},
                    {"sup_integrals", e.sup_integrals},
                    {"inf_integrals", e.inf_integrals},
                    {"sup_bounded_hint", e.sup_bounded_hint},
                    {"inf_positive_hint", e.inf_positive_hint},
                    {"grid_size", e.grid_size},
                    {"measure", cfg.measure_spec}};
  Csv csv{"radius", "sup_integral", "inf_integral"};
  for (std::size_t i = 0; i < e.radii.size(); ++i) csv.row(e.radii[i], e.sup_integrals[i], e.inf_integrals[i]);
  out.csv = csv.str();
  return out;
}

CommandOutput cmd_near_isometry(const RunConfig& cfg) {
  require_cap(cfg, cfg.radius);
  const ActionSpec action = build_action(cfg);
  const ActionSpec comparison = build_comparison(cfg);
  const NearIsometryReport r = near_isometry_check(action, comparison, cfg.arc, cfg.radius);
  CommandOutput out;
  out.report = Json{{"radius", r.radius},
                    {"c_r", r.c_r},
                    {"worst_word", r.worst_word.to_string()},
                    {"criterion_met", r.criterion_met},
                    {"conclusion", r.criterion_met ? "inf D phi_g >= 1 - C_R on the arc over B_R"
                                                   : "criterion not met"},
                    {"measured_deriv_inf", r.measured_deriv_inf},
                    {"arc", Json{{"start", cfg.arc.start}, {"length", cfg.arc.length}}},
                    {"arc_measure", r.arc_measure},
                    {"grid_points_in_arc", r.grid_points_in_arc},
                    {"measured_inf_integral", r.measured_inf_integral},
                    {"grid_size", action.grid_size()}};
  if (r.criterion_met) {
    out.report["implied_deriv_lower"] = r.implied_deriv_lower;
    out.report["implied_inf_integral"] = r.implied_inf_integral;
  }
  Csv csv{"radius", "c_r"};
  for (int k = 0; k < cfg.radius; ++k) csv.row(k, near_isometry_check(action, comparison, cfg.arc, k).c_r);
  csv.row(cfg.radius, r.c_r);
  out.csv = csv.str();
  return out;
}

CommandOutput cmd_replay(const RunConfig& cfg) {
  const ModuleVector xi = build_witness(cfg);
  const int radius = cfg.radius_given ? cfg.radius : psi_support_radius(xi);
  require_cap(cfg, radius);
  ReplayOptions opts;
  opts.psd_tol = cfg.tol.psd;
  opts.witness_norm_tol = cfg.tol.witness_norm;
  const ReplayReport r = replay_theorem3(xi, build_action(cfg), build_measure(cfg), radius, opts);
  Json psi = Json::object();
  for (const auto& [g, v] : r.psi) psi[g.to_string()] = v;
  const double defect_side = 1.0 - r.avg_psi;
  const double bound_side = (r.lambda1.value - 2.0 * r.avg_h_sq) / 2.0 - r.tau_trunc;
  CommandOutput out;
  out.report = Json{{"radius", r.radius},
                    {"psi_support_radius", r.psi_support_radius},
                    {"window_size", r.window_size},
                    {"psi", psi},
                    {"psi_min_eigenvalue", r.psi_min_eigenvalue},
                    {"eta_norm", r.eta_norm},
                    {"psi_generators", r.psi_generators},
                    {"eta_translate_inner", r.eta_translate_inner},
                    {"tau_trunc", r.tau_trunc},
                    {"beta", r.beta},
                    {"avg_h_sq", r.avg_h_sq},
                    {"witness_defect", r.witness_defect},
                    {"chain_lower", r.chain_lower},
                    {"avg_psi", r.avg_psi},
                    {"rayleigh", r.rayleigh},
                    {"lambda1", to_json(r.lambda1)},
                    {"rayleigh_dominates", r.rayleigh_dominates},
                    {"contrapositive", Json{{"one_minus_avg_psi", defect_side},
                                            {"bound", bound_side},
                                            {"holds", defect_side >= bound_side}}},
                    {"grid_size", cfg.grid_size}};
  return out;
}

CommandOutput cmd_witness(const RunConfig& cfg) {
  const ModuleVector xi = build_witness(cfg);
  const ActionSpec action = build_action(cfg);
  const WitnessReport w = verify_witness(xi, action, cfg.tol.epsilon);
  CommandOutput out;
  out.report = Json{{"nonnegative", w.nonnegative},
                    {"unit_norm", w.unit_norm},
                    {"within_epsilon", w.within_epsilon},
                    {"valid", w.valid()},
                    {"min_value", w.min_value},
                    {"unit_norm_defect", w.unit_norm_defect},
                    {"unit_norm_tol", w.unit_norm_tol},
                    {"defect", w.defect},
                    {"epsilon", w.epsilon},
                    {"support_size", xi.support_size()},
                    {"support_radius", xi.support_radius()},
                    {"grid_size", xi.grid_size()}};
  if (cfg.witness->kind == "folner") {
    const auto [num, den] = overlap_defect_exact(xi.support());
    out.report["exact_defect"] = Json{{"numerator", num}, {"denominator", den}};
  }
  return out;
}

std::string file_stem(std::string command) {
  for (char& c : command) {
    if (c == '-') c = '_';
  }
  return command;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write " + p.string());
  f << body;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

CommandOutput execute(const std::string& command, const RunConfig& cfg) {
  CommandOutput out;
  if (command == "certify") out = cmd_certify(cfg);
  else if (command == "lambda1") out = cmd_lambda1(cfg);
  else if (command == "hellinger") out = cmd_hellinger(cfg);
  else if (command == "evidence") out = cmd_evidence(cfg);
  else if (command == "near-isometry") out = cmd_near_isometry(cfg);
  else if (command == "replay") out = cmd_replay(cfg);
  else if (command == "witness") out = cmd_witness(cfg);
  else throw InputError("unknown command '" + command + "'");
  out.report["provenance"] = provenance(command, cfg);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical certificates of non-amenability for group actions on the circle", "amencert"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out_dir;
    std::string group;
    std::optional<int> radius;
    bool exact = false;
  } opt;

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"certify", "Hellinger / spectral-gap certificate"},
      {"lambda1", "bottom of the Laplacian spectrum"},
      {"hellinger", "Hellinger distances of measures and generator translates"},
      {"evidence", "truncated integrability sequences for rho"},
      {"near-isometry", "pointwise C1 comparison with a rotation action"},
      {"replay", "inequality chain of the certificate on a witness"},
      {"witness", "verify an amenability witness"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* config = sub->add_option("--config", opt.config, "JSON run configuration");
    sub->add_option("--out", opt.out_dir, "directory for report and CSV files");
    if (std::string(name) == "lambda1") {
      sub->add_option("--group", opt.group, "F2, Z2, free:3, or a JSON group object");
      sub->add_option("--radius", opt.radius, "Dirichlet truncation radius");
      sub->add_flag("--exact", opt.exact, "closed-form value");
    } else {
      config->required();
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "amencert: " << e.what() << "\n";
    return kInputError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!opt.config.empty()) {
      cfg = parse_config(opt.config);
    } else {
      if (opt.group.empty()) throw InputError("lambda1 needs --group or --config");
      cfg.echo = Json{{"group", opt.group}};
      cfg.ball_cap = ball_cap_from_env();
    }
    if (command == "lambda1") {
      if (!opt.group.empty()) cfg.group = parse_group_arg(opt.group);
      if (opt.exact && opt.radius) throw InputError("--exact and --radius are exclusive");
      if (opt.exact) cfg.lambda1 = Lambda1Source{};
      if (opt.radius) {
        if (*opt.radius < 1) throw InputError("--radius must be at least 1");
        cfg.lambda1 = Lambda1Source{"dirichlet", 0.0, "", *opt.radius};
      }
      cfg.echo["cli"] = Json{{"group", opt.group}, {"exact", opt.exact}};
      if (opt.radius) cfg.echo["cli"]["radius"] = *opt.radius;
    }
    const CommandOutput result = execute(command, cfg);
    const std::string body = dump_report(result.report);
    if (opt.out_dir.empty()) {
      out << body;
    } else {
      const std::filesystem::path dir(opt.out_dir);
      std::filesystem::create_directories(dir);
      const std::string stem = file_stem(command);
      write_file(dir / (stem + ".json"), body);
      out << (dir / (stem + ".json")).string() << "\n";
      if (!result.csv.empty()) {
        write_file(dir / (stem + "_series.csv"), result.csv);
        out << (dir / (stem + "_series.csv")).string() << "\n";
      }
      if (command == "witness") {
        write_file(dir / "witness_values.json", module_vector_to_json(build_witness(cfg)).dump() + "\n");
        out << (dir / "witness_values.json").string() << "\n";
      }
    }
    return kOk;
  } catch (const PolicyError& e) {
    err << "amencert: policy error: " << e.what() << "\n";
    return kPolicyError;
  } catch (const NumericError& e) {
    err << "amencert: numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const ResourceError& e) {
    err << "amencert: resource error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnsupportedMeasureError& e) {
    err << "amencert: unsupported measure: " << e.what() << "\n";
    return kInputError;
  } catch (const CapabilityError& e) {
    err << "amencert: capability error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "amencert: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "amencert: input error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace amencert::cli
