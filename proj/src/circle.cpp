#include "amencert/circle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "amencert/errors.hpp"

namespace amencert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Lift sample at an arbitrary integer index, using F(x + 1) = F(x) + 1.
double extended_lift(const GridFunction& lift, Index j) {
  const Index n = lift.size();
  Index q = j / n;
  Index r = j % n;
  if (r < 0) {
    r += n;
    --q;
  }
  return lift(r) + static_cast<double>(q);
}

// Locates x with F(x) = y on the piecewise-linear lift: returns the bracketing
// cell [x_j, x_j + 1/N] (in lift coordinates, shifted by the integer k) and the
// linear-interpolation guess.
struct Bracket {
  double lo, hi, guess;
};

Bracket bracket_preimage(const GridFunction& lift, double y) {
  const Index n = lift.size();
  const double k = std::floor(y - lift(0));
  const double yr = y - k;  // in [lift(0), lift(0) + 1)
  // largest j in [0, n-1] with lift(j) <= yr
  const double* begin = lift.data();
  const double* end = begin + n;
  Index j = static_cast<Index>(std::upper_bound(begin, end, yr) - begin) - 1;
  j = std::clamp<Index>(j, 0, n - 1);
  const double l0 = extended_lift(lift, j);
  const double l1 = extended_lift(lift, j + 1);
  if (!(l1 > l0)) throw NumericError("lift is not strictly increasing; cannot invert");
  const double t = std::clamp((yr - l0) / (l1 - l0), 0.0, 1.0);
  const double x0 = grid_point(j, n) + k;
  const double h = 1.0 / static_cast<double>(n);
  return {x0, x0 + h, x0 + t * h};
}

// Safeguarded Newton for F(x) = y on [lo, hi] where F is increasing.
double newton_preimage(const std::function<Jet(double)>& f, double y, Bracket b) {
  double lo = b.lo, hi = b.hi, x = b.guess;
  for (int it = 0; it < 100; ++it) {
    const Jet j = f(x);
    const double r = j.value - y;
    if (std::abs(r) <= 4e-16 * (1.0 + std::abs(y))) return x;
    if (r > 0) {
      hi = x;
    } else {
      lo = x;
    }
    double next = x - r / j.deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 1e-16 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace

std::string to_string(DiffeoKind kind) {
  switch (kind) {
    case DiffeoKind::Rotation:
      return "rotation";
    case DiffeoKind::SinePerturbed:
      return "sine";
    case DiffeoKind::Composite:
      return "composite";
    case DiffeoKind::UserSampled:
      return "samples";
  }
  return "unknown";
}

CircleDiffeo CircleDiffeo::from_samples(GridFunction lift, GridFunction deriv,
                                        double consistency_tol) {
  const Index n = lift.size();
  if (n < 2 || deriv.size() != n) {
    throw InputError("diffeomorphism samples need matching lift/deriv arrays of length >= 2");
  }
  if (!lift.allFinite() || !deriv.allFinite()) throw InputError("non-finite diffeomorphism samples");
  if ((deriv.array() <= 0.0).any()) throw InputError("derivative samples must be positive");
  for (Index i = 0; i + 1 < n; ++i) {
    if (!(lift(i + 1) > lift(i))) throw InputError("lift samples must be strictly increasing");
  }
  if (!(lift(n - 1) < lift(0) + 1.0)) throw InputError("lift samples must have degree one");
  if (consistency_tol < 0.0) consistency_tol = diffeo_tolerance(n);
  const double scale = 1.0 + deriv.maxCoeff();
  for (Index i = 0; i < n; ++i) {
    const double secant = (extended_lift(lift, i + 1) - lift(i)) * static_cast<double>(n);
    const double avg = 0.5 * (deriv(i) + deriv((i + 1) % n));
    if (std::abs(secant - avg) > consistency_tol * scale) {
      throw InputError("derivative samples inconsistent with lift at index " + std::to_string(i));
    }
  }
  CircleDiffeo f;
  f.lift_ = std::move(lift);
  f.deriv_ = std::move(deriv);
  f.kind_ = DiffeoKind::UserSampled;
  return f;
}

CircleDiffeo CircleDiffeo::sample_exact(std::function<Jet(double)> exact, Index n, DiffeoKind kind) {
  if (n < 2) throw InputError("grid size must be at least 2");
  CircleDiffeo f;
  f.lift_.resize(n);
  f.deriv_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Jet j = exact(grid_point(i, n));
    f.lift_(i) = j.value;
    f.deriv_(i) = j.deriv;
  }
  f.kind_ = kind;
  f.exact_ = std::move(exact);
  return f;
}

Jet CircleDiffeo::interpolate(double x) const {
  const Index n = lift_.size();
  const double u = x * static_cast<double>(n) - 0.5;
  const double fl = std::floor(u);
  const double t = u - fl;
  const auto j = static_cast<Index>(fl);
  const double value = (1.0 - t) * extended_lift(lift_, j) + t * extended_lift(lift_, j + 1);
  return {value, periodic_interp(deriv_, x)};
}

Jet CircleDiffeo::eval(double x) const { return exact_ ? exact_(x) : interpolate(x); }

CircleDiffeo identity_diffeo(Index n) {
  auto f = CircleDiffeo::sample_exact([](double x) { return Jet{x, 1.0}; }, n,
                                      DiffeoKind::Rotation);
  return f;
}

CircleDiffeo make_rotation(double theta, Index n) {
  if (!std::isfinite(theta)) throw InputError("rotation angle must be finite");
  auto f = CircleDiffeo::sample_exact([theta](double x) { return Jet{x + theta, 1.0}; }, n,
                                      DiffeoKind::Rotation);
  f.theta_ = theta;
  return f;
}

CircleDiffeo make_sine_perturbed(double theta, double a, Index n) {
  if (!std::isfinite(theta) || !std::isfinite(a)) throw InputError("sine map parameters must be finite");
  if (std::abs(a) >= 1.0) {
    throw InputError("sine perturbation amplitude |a| must be < 1 for a diffeomorphism");
  }
  auto f = CircleDiffeo::sample_exact(
      [theta, a](double x) {
        return Jet{x + theta + a / kTwoPi * std::sin(kTwoPi * x), 1.0 + a * std::cos(kTwoPi * x)};
      },
      n, DiffeoKind::SinePerturbed);
  f.theta_ = theta;
  f.amplitude_ = a;
  return f;
}

CircleDiffeo compose(const CircleDiffeo& f, const CircleDiffeo& g) {
  if (f.grid_size() != g.grid_size()) throw InputError("cannot compose diffeomorphisms on different grids");
  const Index n = g.grid_size();
  CircleDiffeo h;
  h.lift_.resize(n);
  h.deriv_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Jet outer = f.eval(g.lift_(i));
    h.lift_(i) = outer.value;
    h.deriv_(i) = outer.deriv * g.deriv_(i);
  }
  h.kind_ = DiffeoKind::Composite;
  if (f.kind_ == DiffeoKind::Rotation && g.kind_ == DiffeoKind::Rotation) {
    h.kind_ = DiffeoKind::Rotation;
    h.theta_ = f.theta_ + g.theta_;
  }
  if (f.exact_ && g.exact_) {
    h.exact_ = [fe = f.exact_, ge = g.exact_](double x) {
      const Jet inner = ge(x);
      const Jet outer = fe(inner.value);
      return Jet{outer.value, outer.deriv * inner.deriv};
    };
  }
  return h;
}

CircleDiffeo invert(const CircleDiffeo& f) {
  const Index n = f.grid_size();
  CircleDiffeo g;
  g.lift_.resize(n);
  g.deriv_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double y = grid_point(i, n);
    const Bracket b = bracket_preimage(f.lift_, y);
    const double x = f.exact_ ? newton_preimage(f.exact_, y, b) : b.guess;
    const double d = f.eval(x).deriv;
    if (!(d > 0.0)) throw NumericError("nonpositive derivative encountered while inverting");
    g.lift_(i) = x;
    g.deriv_(i) = 1.0 / d;
  }
  g.kind_ = DiffeoKind::Composite;
  if (f.kind_ == DiffeoKind::Rotation) {
    g.kind_ = DiffeoKind::Rotation;
    g.theta_ = -f.theta_;
  }
  if (f.exact_) {
    auto fp = std::make_shared<const CircleDiffeo>(f);
    g.exact_ = [fp](double y) {
      const double x = newton_preimage(fp->exact_, y, bracket_preimage(fp->lift_, y));
      return Jet{x, 1.0 / fp->exact_(x).deriv};
    };
  }
  return g;
}

double c1_distance(const CircleDiffeo& f, const CircleDiffeo& g) {
  if (f.grid_size() != g.grid_size()) throw InputError("C1 distance between different grids");
  double disp = 0.0, slope = 0.0;
  for (Index i = 0; i < f.grid_size(); ++i) {
    disp = std::max(disp, circle_distance(f.lift()(i), g.lift()(i)));
    slope = std::max(slope, std::abs(f.deriv()(i) - g.deriv()(i)));
  }
  return disp + slope;
}

double c1_distance_at(Index i, const CircleDiffeo& f, const CircleDiffeo& g) {
  if (f.grid_size() != g.grid_size()) throw InputError("C1 distance between different grids");
  if (i < 0 || i >= f.grid_size()) throw InputError("grid index out of range");
  return circle_distance(f.lift()(i), g.lift()(i)) + std::abs(f.deriv()(i) - g.deriv()(i));
}

ActionSpec::ActionSpec(GroupSpec group, std::vector<CircleDiffeo> generator_maps)
    : group_(group) {
  if (generator_maps.size() != static_cast<std::size_t>(group.rank)) {
    throw InputError("action needs exactly " + std::to_string(group.rank) +
                     " generator maps, got " + std::to_string(generator_maps.size()));
  }
  const Index n = generator_maps.front().grid_size();
  const double tol = diffeo_tolerance(n);
  const CircleDiffeo id = identity_diffeo(n);

  auto complain = [&](bool builtin, const std::string& msg) {
    if (builtin) throw InputError(msg);
    warnings_.push_back(msg);
  };

  for (int i = 0; i < group.rank; ++i) {
    const CircleDiffeo& f = generator_maps[static_cast<std::size_t>(i)];
    if (f.grid_size() != n) throw InputError("generator maps are sampled on different grids");
    CircleDiffeo finv = invert(f);
    const double defect = c1_distance(compose(f, finv), id);
    if (defect > tol) {
      complain(f.builtin(), "generator " + std::string(1, letter_symbol(2 * i)) +
                                " inverse check failed, defect " + std::to_string(defect));
    }
    letters_.push_back(f);
    letters_.push_back(std::move(finv));
  }

  if (group.family == Family::FreeAbelian) {
    for (int i = 0; i < group.rank; ++i) {
      for (int j = i + 1; j < group.rank; ++j) {
        const CircleDiffeo& f = letters_[static_cast<std::size_t>(2 * i)];
        const CircleDiffeo& g = letters_[static_cast<std::size_t>(2 * j)];
        const double defect = c1_distance(compose(f, g), compose(g, f));
        if (defect > tol) {
          complain(f.builtin() && g.builtin(),
                   std::string("generators ") + letter_symbol(2 * i) + " and " +
                       letter_symbol(2 * j) + " do not commute, defect " + std::to_string(defect));
        }
      }
    }
  }
}

bool ActionSpec::by_rotations() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](const CircleDiffeo& f) { return f.kind() == DiffeoKind::Rotation; });
}

CircleDiffeo act(const ActionSpec& action, const Word& g) {
  if (g.spec() != action.group()) throw InputError("word and action belong to different groups");
  const auto& letters = g.letters();
  if (letters.empty()) return identity_diffeo(action.grid_size());
  CircleDiffeo cur = action.letter(letters.back());
  for (auto it = letters.rbegin() + 1; it != letters.rend(); ++it) cur = compose(action.letter(*it), cur);
  return cur;
}

std::vector<CircleDiffeo> act_ball(const ActionSpec& action, const CayleyBall& ball) {
  if (ball.spec() != action.group()) throw InputError("ball and action belong to different groups");
  std::vector<CircleDiffeo> maps;
  maps.reserve(ball.size());
  maps.push_back(identity_diffeo(action.grid_size()));
  for (std::size_t i = 1; i < ball.size(); ++i) {
    const auto& letters = ball[i].letters();
    const Word tail = reduce(ball.spec(), {letters.begin() + 1, letters.end()});
    const std::size_t t = ball.index_of(tail);
    if (t == CayleyBall::npos || t >= i) throw NumericError("ball is not closed under suffixes");
    maps.push_back(compose(action.letter(letters.front()), maps[t]));
  }
  return maps;
}

}  // namespace amencert
