#include "amencert/module.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "amencert/errors.hpp"

namespace amencert {

namespace {

void require_compatible(const ModuleVector& a, const ModuleVector& b) {
  if (a.spec() != b.spec()) throw InputError("module vectors over different groups");
  if (a.grid_size() != b.grid_size()) throw InputError("module vectors on different grids");
}

std::vector<GridFunction> shifted_rho(const ActionSpec& action, const GridMeasure& nu,
                                      const Word& g, const CayleyBall& b) {
  std::vector<GridFunction> out;
  out.reserve(b.size());
  for (const Word& h : b.elements()) out.push_back(radon_nikodym(action, nu, mul(g, h)));
  return out;
}

GridFunction pointwise_extreme(const std::vector<GridFunction>& fs, WeightMode mode) {
  GridFunction out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (mode == WeightMode::Sup) {
      out = out.cwiseMax(fs[i]);
    } else {
      out = out.cwiseMin(fs[i]);
    }
  }
  return out;
}

}  // namespace

std::set<Word> ModuleVector::support() const {
  std::set<Word> s;
  for (const auto& [g, f] : entries_) s.insert(g);
  return s;
}

int ModuleVector::support_radius() const {
  int r = -1;
  for (const auto& [g, f] : entries_) r = std::max(r, static_cast<int>(g.length()));
  return r;
}

void ModuleVector::set(const Word& g, GridFunction f) {
  if (g.spec() != spec_) throw InputError("word " + g.to_string() + " is not in " + spec_.describe());
  if (f.size() != grid_size_) {
    throw InputError("grid function of size " + std::to_string(f.size()) + " on a grid of size " +
                     std::to_string(grid_size_));
  }
  entries_[g] = std::move(f);
}

const GridFunction* ModuleVector::find(const Word& g) const {
  const auto it = entries_.find(g);
  return it == entries_.end() ? nullptr : &it->second;
}

ModuleVector& ModuleVector::operator+=(const ModuleVector& other) {
  require_compatible(*this, other);
  for (const auto& [g, f] : other.entries_) {
    auto it = entries_.find(g);
    if (it == entries_.end()) {
      entries_.emplace(g, f);
    } else {
      it->second += f;
    }
  }
  return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& other) {
  require_compatible(*this, other);
  for (const auto& [g, f] : other.entries_) {
    auto it = entries_.find(g);
    if (it == entries_.end()) {
      entries_.emplace(g, -f);
    } else {
      it->second -= f;
    }
  }
  return *this;
}

ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }

ModuleVector multiply(const GridFunction& weight, ModuleVector xi) {
  if (weight.size() != xi.grid_size()) throw InputError("weight and module vector on different grids");
  ModuleVector out(xi.spec(), xi.grid_size());
  for (const auto& [g, f] : xi.entries()) out.set(g, f.cwiseProduct(weight));
  return out;
}

double max_abs_difference(const ModuleVector& a, const ModuleVector& b) {
  require_compatible(a, b);
  const ModuleVector diff = a - b;
  double worst = 0.0;
  for (const auto& [g, f] : diff.entries()) worst = std::max(worst, f.cwiseAbs().maxCoeff());
  return worst;
}

GridFunction module_inner(const ModuleVector& xi, const ModuleVector& eta) {
  require_compatible(xi, eta);
  GridFunction acc = GridFunction::Zero(xi.grid_size());
  for (const auto& [g, f] : xi.entries()) {
    if (const GridFunction* h = eta.find(g)) acc += f.cwiseProduct(*h);
  }
  return acc;
}

double scalar_inner(const ModuleVector& xi, const ModuleVector& eta, const GridMeasure& nu) {
  return integrate(module_inner(xi, eta), nu);
}

ModuleVector apply_L(const CircleDiffeo& phi_ginv, const Word& g, const ModuleVector& xi) {
  if (phi_ginv.grid_size() != xi.grid_size()) throw InputError("action and module vector on different grids");
  ModuleVector out(xi.spec(), xi.grid_size());
  for (const auto& [k, f] : xi.entries()) out.set(mul(g, k), resample(f, phi_ginv.lift()));
  return out;
}

ModuleVector apply_L(const ActionSpec& action, const Word& g, const ModuleVector& xi) {
  return apply_L(act(action, inv(g)), g, xi);
}

ModuleVector apply_pi(const ActionSpec& action, const GridMeasure& nu, const Word& g,
                      const ModuleVector& xi) {
  const CircleDiffeo phi_ginv = act(action, inv(g));
  const GridFunction rho = radon_nikodym(phi_ginv, nu);
  return multiply(rho.cwiseSqrt(), apply_L(phi_ginv, g, xi));
}

ModuleVector normalize_pointwise(ModuleVector xi) {
  const GridFunction norm_sq = module_inner(xi, xi);
  if ((norm_sq.array() <= 0.0).any()) {
    throw InputError("cannot normalise a field that vanishes at some grid point");
  }
  return multiply(norm_sq.cwiseSqrt().cwiseInverse(), std::move(xi));
}

double witness_defect(const ModuleVector& xi, const ActionSpec& action) {
  if (xi.spec() != action.group()) throw InputError("witness and action over different groups");
  const GroupSpec& spec = xi.spec();
  GridFunction acc = GridFunction::Zero(xi.grid_size());
  for (Letter s = 0; s < spec.num_generators(); ++s) {
    const ModuleVector ls = apply_L(action.letter(inverse_letter(s)), generator_word(spec, s), xi);
    acc += module_inner(xi, ls);
  }
  return (1.0 - acc.array() / spec.num_generators()).maxCoeff();
}

WitnessReport verify_witness(const ModuleVector& xi, const ActionSpec& action, double epsilon) {
  WitnessReport r;
  r.epsilon = epsilon;
  r.min_value = std::numeric_limits<double>::infinity();
  for (const auto& [g, f] : xi.entries()) r.min_value = std::min(r.min_value, f.minCoeff());
  if (xi.support_size() == 0) r.min_value = 0.0;
  r.nonnegative = r.min_value >= 0.0;
  const GridFunction norm_sq = module_inner(xi, xi);
  r.unit_norm_defect = (norm_sq.array() - 1.0).abs().maxCoeff();
  r.unit_norm = r.unit_norm_defect <= r.unit_norm_tol;
  r.defect = witness_defect(xi, action);
  r.within_epsilon = r.defect <= epsilon;
  return r;
}

std::pair<long long, long long> overlap_defect_exact(const std::set<Word>& support) {
  if (support.empty()) throw InputError("empty witness support");
  const GroupSpec spec = support.begin()->spec();
  const long long ns = spec.num_generators();
  const auto f = static_cast<long long>(support.size());
  long long overlap = 0;
  for (Letter s = 0; s < spec.num_generators(); ++s) {
    const Word sinv = generator_word(spec, inverse_letter(s));
    for (const Word& g : support) {
      if (support.contains(mul(sinv, g))) ++overlap;
    }
  }
  long long num = ns * f - overlap;
  long long den = ns * f;
  const long long d = std::gcd(num, den);
  if (d > 0) {
    num /= d;
    den /= d;
  }
  return {num, den};
}

ModuleVector build_folner_witness(const GroupSpec& spec, int n, Index grid_size) {
  if (spec.family != Family::FreeAbelian) throw InputError("Folner boxes are built for Z^d only");
  if (n < 1) throw InputError("Folner box side must be >= 1");
  const int d = spec.rank;
  long long count = 1;
  for (int i = 0; i < d; ++i) {
    count *= n;
    if (count > static_cast<long long>(kDefaultBallCap)) throw ResourceError("Folner box too large");
  }
  const double value = 1.0 / std::sqrt(static_cast<double>(count));
  ModuleVector xi(spec, grid_size);
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  for (long long c = 0; c < count; ++c) {
    long long rem = c;
    std::vector<Letter> letters;
    for (int i = 0; i < d; ++i) {
      e[static_cast<std::size_t>(i)] = static_cast<int>(rem % n);
      rem /= n;
      letters.insert(letters.end(), static_cast<std::size_t>(e[static_cast<std::size_t>(i)]), 2 * i);
    }
    xi.set(reduce(spec, letters), GridFunction::Constant(grid_size, value));
  }
  return xi;
}

ModuleVector build_ball_witness(const GroupSpec& spec, int radius, Index grid_size, double phase) {
  const CayleyBall b = ball(spec, radius);
  const GridFunction x = grid_points(grid_size);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  ModuleVector xi(spec, grid_size);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double scale = std::ldexp(1.0, -static_cast<int>(b[j].length()));
    const double shift = phase + 0.173 * static_cast<double>(j);
    xi.set(b[j], scale * (1.0 + 0.5 * (kTwoPi * (x.array() + shift)).cos()).matrix());
  }
  return normalize_pointwise(std::move(xi));
}

RhoBounds rho_bounds_from(const BallCocycle& bc) {
  RhoBounds r;
  r.radius = bc.ball.radius();
  r.sup = pointwise_extreme(bc.rho, WeightMode::Sup);
  r.inf = pointwise_extreme(bc.rho, WeightMode::Inf);
  return r;
}

RhoBounds truncated_rho_bounds(const ActionSpec& action, const GridMeasure& nu, int radius) {
  return rho_bounds_from(rho_on_ball(action, nu, radius));
}

LemmaDefect lemma_rho_identity_check(const ActionSpec& action, const GridMeasure& nu,
                                     const Word& g, int radius) {
  const BallCocycle bc = rho_on_ball(action, nu, radius);
  const RhoBounds bounds = rho_bounds_from(bc);
  const CircleDiffeo phi_ginv = act(action, inv(g));
  const GridFunction rho_g = radon_nikodym(phi_ginv, nu);
  const std::vector<GridFunction> shifted = shifted_rho(action, nu, g, bc.ball);
  const GridFunction rhs_sup = pointwise_extreme(shifted, WeightMode::Sup);
  const GridFunction rhs_inf = pointwise_extreme(shifted, WeightMode::Inf);

  LemmaDefect d;
  for (Index i = 0; i < rho_g.size(); ++i) {
    const double y = phi_ginv.lift()(i);
    d.sup_defect = std::max(d.sup_defect, std::abs(rho_g(i) * periodic_interp(bounds.sup, y) - rhs_sup(i)));
    d.inf_defect = std::max(d.inf_defect, std::abs(rho_g(i) * periodic_interp(bounds.inf, y) - rhs_inf(i)));
  }
  return d;
}

CocycleFamily::CocycleFamily(const ActionSpec& action, std::vector<ModuleVector> witnesses,
                             double unit_norm_tol)
    : spec_(action.group()), grid_size_(action.grid_size()) {
  if (witnesses.empty()) throw InputError("cocycle family needs at least one level");
  for (std::size_t n = 0; n < witnesses.size(); ++n) {
    ModuleVector& xi = witnesses[n];
    if (xi.spec() != spec_ || xi.grid_size() != grid_size_) {
      throw InputError("level " + std::to_string(n + 1) + " does not match the action");
    }
    WitnessReport rep = verify_witness(xi, action, std::numeric_limits<double>::infinity());
    rep.unit_norm = rep.unit_norm_defect <= unit_norm_tol;
    if (!rep.nonnegative || !rep.unit_norm) {
      throw InputError("level " + std::to_string(n + 1) + " is not a witness (nonnegative=" +
                       std::to_string(rep.nonnegative) + ", unit_norm_defect=" +
                       std::to_string(rep.unit_norm_defect) + ")");
    }
    CocycleLevel level{xi, 0, rep.defect, 0.0};
    // g with g.supp meeting supp are exactly g = k h^-1, k, h in supp.
    std::size_t reach = 0;
    for (const auto& [k, fk] : xi.entries()) {
      for (const auto& [h, fh] : xi.entries()) reach = std::max(reach, mul(k, inv(h)).length());
    }
    level.overlap_radius = static_cast<int>(reach) + 1;
    for (Letter s = 0; s < spec_.num_generators(); ++s) {
      const ModuleVector b =
          apply_L(action.letter(inverse_letter(s)), generator_word(spec_, s), xi) - xi;
      level.generator_bound = std::max(level.generator_bound, module_inner(b, b).maxCoeff());
    }
    K_ += level.generator_bound;
    levels_.push_back(std::move(level));
  }
}

int CocycleFamily::phi(std::size_t word_length) const {
  int count = 0;
  for (const auto& l : levels_) {
    if (static_cast<int>(word_length) >= l.overlap_radius) ++count;
  }
  return count;
}

CocycleFamily default_cocycle_family(const ActionSpec& action, int levels) {
  if (levels < 1) throw InputError("cocycle family needs at least one level");
  const GroupSpec& spec = action.group();
  std::vector<ModuleVector> ws;
  for (int n = 1; n <= levels; ++n) {
    if (spec.family == Family::FreeAbelian) {
      ws.push_back(build_folner_witness(spec, n * n, action.grid_size()));
    } else {
      ws.push_back(build_ball_witness(spec, (n - 1) / 2, action.grid_size(), 0.1 * n));
    }
  }
  return CocycleFamily(action, std::move(ws));
}

std::vector<ModuleVector> build_coboundary_cocycle(const CocycleFamily& family,
                                                   const ActionSpec& action, const Word& g) {
  if (family.spec() != action.group()) throw InputError("family and action over different groups");
  const CircleDiffeo phi_ginv = act(action, inv(g));
  std::vector<ModuleVector> out;
  out.reserve(family.size());
  for (const auto& level : family.levels()) {
    out.push_back(apply_L(phi_ginv, g, level.witness) - level.witness);
  }
  return out;
}

double check_cocycle(const CocycleFamily& family, const ActionSpec& action, const Word& g,
                     const Word& h) {
  const auto bg = build_coboundary_cocycle(family, action, g);
  const auto bh = build_coboundary_cocycle(family, action, h);
  const auto bgh = build_coboundary_cocycle(family, action, mul(g, h));
  const CircleDiffeo phi_ginv = act(action, inv(g));
  double worst = 0.0;
  for (std::size_t n = 0; n < family.size(); ++n) {
    const ModuleVector rhs = apply_L(phi_ginv, g, bh[n]) + bg[n];
    worst = std::max(worst, max_abs_difference(bgh[n], rhs));
  }
  return worst;
}

CocycleBounds cocycle_bounds(const CocycleFamily& family, const ActionSpec& action, const Word& g) {
  CocycleBounds cb;
  cb.norm_sq = GridFunction::Zero(family.grid_size());
  for (const ModuleVector& b : build_coboundary_cocycle(family, action, g)) cb.norm_sq += module_inner(b, b);
  cb.phi = family.phi(g.length());
  cb.lower = 2.0 * cb.phi;
  const auto len = static_cast<double>(g.length());
  cb.upper = family.K() * len * len;
  return cb;
}

WeightedNorm weight_cocycle(const CocycleFamily& family, const ActionSpec& action,
                            const GridMeasure& nu, const RhoBounds& bounds, WeightMode mode,
                            const Word& g) {
  const GridFunction& w = (mode == WeightMode::Inf) ? bounds.inf : bounds.sup;
  const CocycleBounds cb = cocycle_bounds(family, action, g);
  WeightedNorm r;
  r.value = integrate(w.cwiseProduct(cb.norm_sq), nu);
  r.weight_integral = integrate(w, nu);
  r.lower = cb.lower * r.weight_integral;
  r.upper = cb.upper * r.weight_integral;
  return r;
}

WeightedNorm weight_cocycle(const CocycleFamily& family, const ActionSpec& action,
                            const GridMeasure& nu, int radius, WeightMode mode, const Word& g) {
  return weight_cocycle(family, action, nu, truncated_rho_bounds(action, nu, radius), mode, g);
}

double weighted_cocycle_defect(const CocycleFamily& family, const ActionSpec& action,
                               const GridMeasure& nu, int radius, WeightMode mode, const Word& g,
                               const Word& h) {
  const BallCocycle bc = rho_on_ball(action, nu, radius);
  const GridFunction w_ball = pointwise_extreme(bc.rho, mode).cwiseSqrt();
  const GridFunction w_shift = pointwise_extreme(shifted_rho(action, nu, g, bc.ball), mode).cwiseSqrt();

  const auto bg = build_coboundary_cocycle(family, action, g);
  const auto bh = build_coboundary_cocycle(family, action, h);
  const auto bgh = build_coboundary_cocycle(family, action, mul(g, h));
  double worst = 0.0;
  for (std::size_t n = 0; n < family.size(); ++n) {
    const ModuleVector lhs = apply_pi(action, nu, g, multiply(w_ball, bh[n])) + multiply(w_shift, bg[n]);
    const ModuleVector rhs = multiply(w_shift, bgh[n]);
    worst = std::max(worst, max_abs_difference(lhs, rhs));
  }
  return worst;
}

}  // namespace amencert
