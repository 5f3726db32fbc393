#include "amencert/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "amencert/errors.hpp"

namespace amencert {

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw InputError("config " + (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

std::string child(const std::string& ptr, const std::string& key) {
  // RFC 6901 escaping
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return ptr + "/" + k;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const Json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
}

const Json& field(const Json& obj, const std::string& ptr, const char* key) {
  require_object(obj, ptr);
  const auto it = obj.find(key);
  if (it == obj.end()) fail(child(ptr, key), "missing required field");
  return *it;
}

double number(const Json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

long long integer(const Json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<long long>();
}

std::string text(const Json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

GridFunction grid_values(const Json& j, Index n, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array of numbers");
  if (static_cast<Index>(j.size()) != n) {
    fail(ptr, "expected " + std::to_string(n) + " grid values, got " + std::to_string(j.size()));
  }
  GridFunction f(n);
  for (std::size_t i = 0; i < j.size(); ++i) f(static_cast<Index>(i)) = number(j[i], child(ptr, i));
  return f;
}

double optional_number(const Json& obj, const char* key, double fallback, const std::string& ptr) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, child(ptr, key));
}

void reject_unknown(const Json& obj, const std::string& ptr, std::initializer_list<const char*> known) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* key : known) ok = ok || k == key;
    if (!ok) fail(child(ptr, k), "unknown field");
  }
}

const Json& generator_list(const Json& action, const std::string& ptr) {
  const Json& gens = action.is_array() ? action : field(action, ptr, "generators");
  if (!gens.is_array()) fail(action.is_array() ? ptr : child(ptr, "generators"), "expected an array");
  return gens;
}

std::string generators_ptr(const Json& action, const std::string& ptr) {
  return action.is_array() ? ptr : child(ptr, "generators");
}

ActionSpec action_from_json(const Json& action, const RunConfig& cfg, const std::string& ptr) {
  const Json& gens = generator_list(action, ptr);
  const std::string gptr = generators_ptr(action, ptr);
  if (static_cast<int>(gens.size()) != cfg.group.rank) {
    fail(gptr, "expected " + std::to_string(cfg.group.rank) + " generator maps, got " +
                   std::to_string(gens.size()));
  }
  std::vector<CircleDiffeo> maps;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    maps.push_back(diffeo_from_json(gens[i], cfg.grid_size, cfg.tol.consistency, child(gptr, i)));
  }
  try {
    return ActionSpec(cfg.group, std::move(maps));
  } catch (const InputError& e) {
    fail(ptr, e.what());
  }
}

WitnessSource witness_from_json(const Json& j, const std::string& ptr,
                                const std::filesystem::path& base_dir) {
  WitnessSource w;
  w.kind = text(field(j, ptr, "kind"), child(ptr, "kind"));
  if (w.kind == "folner") {
    w.n = static_cast<int>(integer(field(j, ptr, "n"), child(ptr, "n")));
    if (w.n < 1) fail(child(ptr, "n"), "box side must be positive");
  } else if (w.kind == "ball") {
    w.radius = static_cast<int>(integer(field(j, ptr, "radius"), child(ptr, "radius")));
    if (w.radius < 0) fail(child(ptr, "radius"), "radius must be nonnegative");
    w.phase = optional_number(j, "phase", 0.0, ptr);
  } else if (w.kind == "values") {
    w.values = field(j, ptr, "values");
    require_object(w.values, child(ptr, "values"));
  } else if (w.kind == "file") {
    const std::filesystem::path p = base_dir / text(field(j, ptr, "path"), child(ptr, "path"));
    std::ifstream in(p);
    if (!in) fail(child(ptr, "path"), "cannot read " + p.string());
    try {
      w.values = Json::parse(in);
    } catch (const Json::parse_error& e) {
      fail(child(ptr, "path"), std::string("malformed witness file: ") + e.what());
    }
    require_object(w.values, child(ptr, "path"));
    w.kind = "values";
  } else {
    fail(child(ptr, "kind"), "unknown witness kind '" + w.kind + "'");
  }
  return w;
}

Lambda1Source lambda1_from_json(const Json& j, const std::string& ptr) {
  Lambda1Source s;
  s.kind = text(field(j, ptr, "kind"), child(ptr, "kind"));
  if (s.kind == "exact") return s;
  if (s.kind == "certified_lower_bound") {
    s.value = number(field(j, ptr, "value"), child(ptr, "value"));
    s.source = text(field(j, ptr, "source"), child(ptr, "source"));
    if (s.source.empty()) fail(child(ptr, "source"), "provenance text must be nonempty");
    return s;
  }
  if (s.kind == "dirichlet" || s.kind == "estimate") {
    s.kind = "dirichlet";
    s.radius = static_cast<int>(integer(field(j, ptr, "radius"), child(ptr, "radius")));
    if (s.radius < 1) fail(child(ptr, "radius"), "radius must be at least 1");
    return s;
  }
  fail(child(ptr, "kind"), "unknown lambda1 kind '" + s.kind + "'");
}

Tolerances tolerances_from_json(const Json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"psd", "witness_norm", "epsilon", "dirichlet_residual", "consistency"});
  Tolerances t;
  auto positive = [&](const char* key, double& slot) {
    slot = optional_number(j, key, slot, ptr);
    if (!(slot > 0.0)) fail(child(ptr, key), "tolerance must be positive");
  };
  positive("psd", t.psd);
  positive("witness_norm", t.witness_norm);
  positive("epsilon", t.epsilon);
  positive("dirichlet_residual", t.dirichlet_residual);
  if (j.contains("consistency")) positive("consistency", t.consistency);
  return t;
}

}  // namespace

Json Tolerances::to_json() const {
  return Json{{"psd", psd},
              {"witness_norm", witness_norm},
              {"epsilon", epsilon},
              {"dirichlet_residual", dirichlet_residual},
              {"consistency", consistency},
              {"certificate_slack_floor", kCertificateSlack}};
}

GroupSpec group_from_json(const Json& j, const std::string& ptr) {
  const std::string family = text(field(j, ptr, "family"), child(ptr, "family"));
  const long long rank = integer(field(j, ptr, "rank"), child(ptr, "rank"));
  try {
    if (family == "free") return free_group(static_cast<int>(rank));
    if (family == "free_abelian") return free_abelian_group(static_cast<int>(rank));
  } catch (const InputError& e) {
    fail(child(ptr, "rank"), e.what());
  }
  fail(child(ptr, "family"), "unknown family '" + family + "' (free | free_abelian)");
}

Json group_to_json(const GroupSpec& spec) {
  return Json{{"family", spec.family == Family::Free ? "free" : "free_abelian"}, {"rank", spec.rank}};
}

GroupSpec parse_group_arg(const std::string& s) {
  if (!s.empty() && s.front() == '{') {
    try {
      return group_from_json(Json::parse(s));
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("malformed group JSON: ") + e.what());
    }
  }
  std::string family, rank;
  if (const auto colon = s.find(':'); colon != std::string::npos) {
    family = s.substr(0, colon);
    rank = s.substr(colon + 1);
  } else if (s.size() >= 2 && (s[0] == 'F' || s[0] == 'Z')) {
    family = s[0] == 'F' ? "free" : "free_abelian";
    rank = s.substr(1);
  } else {
    throw InputError("cannot parse group '" + s + "' (try F2, Z2 or free:2)");
  }
  int r = 0;
  try {
    std::size_t used = 0;
    r = std::stoi(rank, &used);
    if (used != rank.size()) throw std::invalid_argument(rank);
  } catch (const std::logic_error&) {
    throw InputError("bad rank in group '" + s + "'");
  }
  return group_from_json(Json{{"family", family}, {"rank", r}});
}

CircleDiffeo diffeo_from_json(const Json& j, Index n, double consistency_tol, const std::string& ptr) {
  const std::string kind = text(field(j, ptr, "kind"), child(ptr, "kind"));
  try {
    if (kind == "rotation") return make_rotation(number(field(j, ptr, "theta"), child(ptr, "theta")), n);
    if (kind == "sine") {
      return make_sine_perturbed(number(field(j, ptr, "theta"), child(ptr, "theta")),
                                 number(field(j, ptr, "a"), child(ptr, "a")), n);
    }
    if (kind == "samples") {
      return CircleDiffeo::from_samples(grid_values(field(j, ptr, "lift"), n, child(ptr, "lift")),
                                        grid_values(field(j, ptr, "deriv"), n, child(ptr, "deriv")),
                                        consistency_tol);
    }
    if (kind == "composite") {
      // factors[0] is applied last: f0 o f1 o ... o fk
      const Json& fs = field(j, ptr, "factors");
      const std::string fptr = child(ptr, "factors");
      if (!fs.is_array() || fs.empty()) fail(fptr, "expected a nonempty array");
      CircleDiffeo out = diffeo_from_json(fs.back(), n, consistency_tol, child(fptr, fs.size() - 1));
      for (std::size_t i = fs.size() - 1; i-- > 0;) {
        out = compose(diffeo_from_json(fs[i], n, consistency_tol, child(fptr, i)), out);
      }
      return out;
    }
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config ", 0) == 0) throw;
    fail(ptr, msg);
  }
  fail(child(ptr, "kind"), "unknown diffeo kind '" + kind + "' (rotation | sine | samples | composite)");
}

GridMeasure measure_from_json(const Json& j, Index n, const std::string& ptr) {
  const std::string kind = text(field(j, ptr, "kind"), child(ptr, "kind"));
  if (kind == "lebesgue") return GridMeasure::lebesgue(n);
  if (kind == "density") {
    try {
      return GridMeasure::from_density(grid_values(field(j, ptr, "values"), n, child(ptr, "values")));
    } catch (const InputError& e) {
      const std::string msg = e.what();
      if (msg.rfind("config ", 0) == 0) throw;
      fail(child(ptr, "values"), msg);
    }
  }
  fail(child(ptr, "kind"), "unknown measure kind '" + kind + "' (lebesgue | density)");
}

RunConfig parse_config_text(const std::string& body, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  try {
    cfg.echo = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  const Json& j = cfg.echo;
  require_object(j, "");
  reject_unknown(j, "", {"command", "group", "grid", "action", "comparison", "measure", "hellinger",
                         "lambda1", "route", "radius", "max_radius", "arc", "witness", "sweep",
                         "tolerances", "seed", "description"});

  cfg.group = group_from_json(field(j, "", "group"), "/group");
  if (j.contains("grid")) {
    const long long n = integer(j["grid"], "/grid");
    if (n < 2 || (n & (n - 1)) != 0) fail("/grid", "grid size must be a power of two >= 2");
    cfg.grid_size = static_cast<Index>(n);
  }
  if (j.contains("tolerances")) cfg.tol = tolerances_from_json(j["tolerances"], "/tolerances");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("/seed", "expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("action")) {
    cfg.action_spec = j["action"];
    action_from_json(cfg.action_spec, cfg, "/action");
  }
  if (j.contains("comparison")) {
    cfg.comparison_spec = j["comparison"];
    action_from_json(cfg.comparison_spec, cfg, "/comparison");
  }
  if (j.contains("measure")) {
    cfg.measure_spec = j["measure"];
    measure_from_json(cfg.measure_spec, cfg.grid_size, "/measure");
  }
  if (j.contains("hellinger")) {
    const Json& h = j["hellinger"];
    measure_from_json(field(h, "/hellinger", "mu1"), cfg.grid_size, "/hellinger/mu1");
    measure_from_json(field(h, "/hellinger", "mu2"), cfg.grid_size, "/hellinger/mu2");
    cfg.pair_spec = h;
  }
  if (j.contains("lambda1")) cfg.lambda1 = lambda1_from_json(j["lambda1"], "/lambda1");
  if (j.contains("route")) {
    cfg.route = text(j["route"], "/route");
    if (cfg.route != "hellinger" && cfg.route != "generator_derivative") {
      fail("/route", "expected 'hellinger' or 'generator_derivative'");
    }
  }
  if (j.contains("radius")) {
    cfg.radius = static_cast<int>(integer(j["radius"], "/radius"));
    if (cfg.radius < 0) fail("/radius", "radius must be nonnegative");
    cfg.radius_given = true;
  }
  if (j.contains("max_radius")) {
    cfg.max_radius = static_cast<int>(integer(j["max_radius"], "/max_radius"));
    if (cfg.max_radius < 0) fail("/max_radius", "radius must be nonnegative");
  }
  if (j.contains("arc")) {
    const Json& a = j["arc"];
    cfg.arc.start = number(field(a, "/arc", "start"), "/arc/start");
    cfg.arc.length = number(field(a, "/arc", "length"), "/arc/length");
    if (!(cfg.arc.length > 0.0) || cfg.arc.length > 1.0) fail("/arc/length", "arc length must lie in (0, 1]");
  }
  if (j.contains("witness")) cfg.witness = witness_from_json(j["witness"], "/witness", base_dir);
  if (j.contains("sweep")) {
    const Json& a = field(j["sweep"], "/sweep", "a");
    if (!a.is_array()) fail("/sweep/a", "expected an array of amplitudes");
    for (std::size_t i = 0; i < a.size(); ++i) cfg.sweep_a.push_back(number(a[i], child("/sweep/a", i)));
  }
  cfg.ball_cap = ball_cap_from_env();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

ActionSpec build_action(const RunConfig& cfg) {
  if (cfg.action_spec.is_null()) fail("/action", "missing required field");
  return action_from_json(cfg.action_spec, cfg, "/action");
}

ActionSpec build_comparison(const RunConfig& cfg) {
  if (!cfg.comparison_spec.is_null()) return action_from_json(cfg.comparison_spec, cfg, "/comparison");
  if (cfg.action_spec.is_null()) fail("/action", "missing required field");
  const Json& gens = generator_list(cfg.action_spec, "/action");
  Json rotations = Json::array();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string kind = gens[i].value("kind", "");
    if (kind != "rotation" && kind != "sine") {
      fail("/comparison", "required when a generator is not a rotation or sine map");
    }
    rotations.push_back(Json{{"kind", "rotation"}, {"theta", gens[i]["theta"]}});
  }
  return action_from_json(rotations, cfg, "/comparison");
}

GridMeasure build_measure(const RunConfig& cfg) {
  return measure_from_json(cfg.measure_spec, cfg.grid_size, "/measure");
}

ModuleVector build_witness(const RunConfig& cfg) {
  if (!cfg.witness) fail("/witness", "missing required field");
  const WitnessSource& w = *cfg.witness;
  try {
    if (w.kind == "folner") return build_folner_witness(cfg.group, w.n, cfg.grid_size);
    if (w.kind == "ball") return build_ball_witness(cfg.group, w.radius, cfg.grid_size, w.phase);
  } catch (const InputError& e) {
    fail("/witness", e.what());
  }
  return module_vector_from_json(w.values, cfg.group, cfg.grid_size, "/witness/values");
}

Lambda1Value resolve_lambda1(const RunConfig& cfg) {
  const Lambda1Source& s = cfg.lambda1;
  if (s.kind == "certified_lower_bound") return certified_lower_bound(s.value, s.source);
  if (s.kind == "dirichlet") {
    DirichletOptions opts;
    opts.residual_tol = cfg.tol.dirichlet_residual;
    opts.ball_cap = cfg.ball_cap;
    return lambda1_dirichlet(cfg.group, s.radius, opts);
  }
  return lambda1_exact(cfg.group);
}

Json module_vector_to_json(const ModuleVector& xi) {
  Json out = Json::object();
  for (const auto& [g, f] : xi.entries()) out[g.to_string()] = std::vector<double>(f.data(), f.data() + f.size());
  return out;
}

ModuleVector module_vector_from_json(const Json& j, const GroupSpec& spec, Index n, const std::string& ptr) {
  require_object(j, ptr);
  if (j.empty()) fail(ptr, "witness has empty support");
  ModuleVector xi(spec, n);
  for (const auto& [key, values] : j.items()) {
    Word g;
    try {
      g = parse_word(spec, key);
    } catch (const InputError& e) {
      fail(child(ptr, key), e.what());
    }
    if (xi.find(g) != nullptr) fail(child(ptr, key), "duplicate group element " + g.to_string());
    xi.set(g, grid_values(values, n, child(ptr, key)));
  }
  return xi;
}

std::size_t ball_cap_from_env() {
  const char* v = std::getenv("AMENCERT_MAX_BALL");
  if (v == nullptr || *v == '\0') return kDefaultBallCap;
  char* end = nullptr;
  const unsigned long long cap = std::strtoull(v, &end, 10);
  if (*end != '\0' || cap == 0) throw InputError(std::string("AMENCERT_MAX_BALL must be a positive integer, got '") + v + "'");
  return static_cast<std::size_t>(cap);
}

}  // namespace amencert
