#include "amencert/measures.hpp"

#include <cmath>
#include <numbers>

#include "amencert/errors.hpp"

namespace amencert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(Index a, Index b, const char* what) {
  if (a != b) {
    throw InputError(std::string("grid mismatch in ") + what + ": " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

}  // namespace

GridMeasure GridMeasure::lebesgue(Index n) {
  if (n < 2) throw InputError("grid size must be at least 2");
  GridMeasure m;
  m.density_ = GridFunction::Ones(n);
  return m;
}

GridMeasure GridMeasure::from_density(GridFunction density) {
  if (density.size() < 2) throw InputError("density needs at least 2 grid values");
  if (!density.allFinite()) throw InputError("density has non-finite values");
  if ((density.array() < 0.0).any()) throw InputError("density has negative values");
  const double mass = midpoint_integral(density);
  if (!(mass > 0.0)) throw InputError("density has zero mass");
  GridMeasure m;
  m.density_ = density / mass;
  m.raw_mass_ = mass;
  return m;
}

void require_positive(const GridMeasure& nu, const char* role) {
  if (!nu.strictly_positive()) {
    throw UnsupportedMeasureError(std::string(role) +
                                  " must have a strictly positive density on the grid");
  }
}

double integrate(const GridFunction& f, const GridMeasure& nu) {
  require_same_grid(f.size(), nu.grid_size(), "integrate");
  return midpoint_integral(f.cwiseProduct(nu.density()));
}

GridMeasure pushforward(const GridMeasure& nu, const CircleDiffeo& phi) {
  require_same_grid(phi.grid_size(), nu.grid_size(), "pushforward");
  const CircleDiffeo phi_inv = invert(phi);
  GridFunction out(nu.grid_size());
  for (Index i = 0; i < out.size(); ++i) {
    out(i) = periodic_interp(nu.density(), phi_inv.lift()(i)) * phi_inv.deriv()(i);
  }
  return GridMeasure::from_density(std::move(out));
}

GridFunction radon_nikodym(const CircleDiffeo& inverse_map, const GridMeasure& nu) {
  require_same_grid(inverse_map.grid_size(), nu.grid_size(), "radon_nikodym");
  require_positive(nu, "reference measure");
  const GridFunction& p = nu.density();
  GridFunction rho(p.size());
  for (Index i = 0; i < p.size(); ++i) {
    rho(i) = periodic_interp(p, inverse_map.lift()(i)) * inverse_map.deriv()(i) / p(i);
  }
  return rho;
}

GridFunction radon_nikodym(const ActionSpec& action, const GridMeasure& nu, const Word& g) {
  return radon_nikodym(act(action, inv(g)), nu);
}

const CircleDiffeo& BallCocycle::map_of(const Word& g) const {
  const std::size_t i = ball.index_of(g);
  if (i == CayleyBall::npos) throw InputError("word " + g.to_string() + " outside the ball");
  return maps[i];
}

const GridFunction& BallCocycle::rho_of(const Word& g) const {
  const std::size_t i = ball.index_of(g);
  if (i == CayleyBall::npos) throw InputError("word " + g.to_string() + " outside the ball");
  return rho[i];
}

BallCocycle rho_on_ball(const ActionSpec& action, const GridMeasure& nu, int radius, std::size_t cap) {
  require_same_grid(action.grid_size(), nu.grid_size(), "rho_on_ball");
  require_positive(nu, "reference measure");
  BallCocycle bc{ball(action.group(), radius, cap), {}, {}};
  bc.maps = act_ball(action, bc.ball);
  bc.rho.reserve(bc.ball.size());
  for (std::size_t i = 0; i < bc.ball.size(); ++i) {
    // the ball is symmetric, so Phi_{g^-1} is available
    const std::size_t j = bc.ball.index_of(inv(bc.ball[i]));
    bc.rho.push_back(radon_nikodym(bc.maps[j], nu));
  }
  return bc;
}

const std::array<TestFunction, 8>& test_battery() {
  static const std::array<TestFunction, 8> battery = {
      [](double) { return 1.0; },
      [](double x) { return std::cos(kTwoPi * x); },
      [](double x) { return std::sin(kTwoPi * x); },
      [](double x) { return std::cos(2 * kTwoPi * x); },
      [](double x) { return std::sin(2 * kTwoPi * x); },
      [](double x) { return std::cos(3 * kTwoPi * x); },
      [](double x) { return std::sin(3 * kTwoPi * x); },
      [](double x) {
        // smooth bump supported on (0.2, 0.6)
        const double t = (frac(x) - 0.4) / 0.2;
        return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
      },
  };
  return battery;
}

double defining_identity_defect(const ActionSpec& action, const GridMeasure& nu, const Word& g) {
  const CircleDiffeo phi_inv = act(action, inv(g));
  const GridFunction rho = radon_nikodym(phi_inv, nu);
  const Index n = nu.grid_size();
  double worst = 0.0;
  for (const auto& f : test_battery()) {
    GridFunction pulled(n), plain(n);
    for (Index i = 0; i < n; ++i) {
      pulled(i) = f(phi_inv.lift()(i)) * rho(i);
      plain(i) = f(grid_point(i, n));
    }
    worst = std::max(worst, std::abs(integrate(pulled, nu) - integrate(plain, nu)));
  }
  return worst;
}

double cocycle_check(const ActionSpec& action, const GridMeasure& nu, const Word& g, const Word& h) {
  const CircleDiffeo phi_ginv = act(action, inv(g));
  const GridFunction rho_g = radon_nikodym(phi_ginv, nu);
  const GridFunction rho_h = radon_nikodym(action, nu, h);
  const GridFunction rho_gh = radon_nikodym(action, nu, mul(g, h));
  double worst = 0.0;
  for (Index i = 0; i < rho_g.size(); ++i) {
    const double rhs = rho_g(i) * periodic_interp(rho_h, phi_ginv.lift()(i));
    worst = std::max(worst, std::abs(rho_gh(i) - rhs));
  }
  return worst;
}

double hellinger(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu) {
  require_same_grid(mu1.grid_size(), nu.grid_size(), "hellinger");
  require_same_grid(mu2.grid_size(), nu.grid_size(), "hellinger");
  require_positive(nu, "dominating measure");
  const auto& q = nu.density().array();
  const GridFunction r1 = (mu1.density().array() / q).matrix();
  const GridFunction r2 = (mu2.density().array() / q).matrix();
  const double h2 =
      0.5 * ((r1.array().sqrt() - r2.array().sqrt()).square() * q).sum() / static_cast<double>(q.size());
  return std::sqrt(std::clamp(h2, 0.0, 1.0));
}

double affinity(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu) {
  require_same_grid(mu1.grid_size(), nu.grid_size(), "affinity");
  require_same_grid(mu2.grid_size(), nu.grid_size(), "affinity");
  require_positive(nu, "dominating measure");
  const auto& q = nu.density().array();
  return hellinger_affinity_kernel((mu1.density().array() / q).matrix(),
                                   (mu2.density().array() / q).matrix(), nu.density());
}

double l1_distance(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu) {
  require_same_grid(mu1.grid_size(), nu.grid_size(), "l1_distance");
  require_same_grid(mu2.grid_size(), nu.grid_size(), "l1_distance");
  require_positive(nu, "dominating measure");
  const auto& q = nu.density().array();
  return ((mu1.density().array() / q - mu2.density().array() / q).abs() * q).sum() /
         static_cast<double>(q.size());
}

namespace {

// Per-generator sqrt(rho_s) * p on the grid.
std::vector<GridFunction> sqrt_rho_weighted(const ActionSpec& action, const GridMeasure& nu) {
  require_same_grid(action.grid_size(), nu.grid_size(), "avg_hellinger_sq");
  std::vector<GridFunction> out;
  for (Letter s = 0; s < action.group().num_generators(); ++s) {
    const GridFunction rho = radon_nikodym(action.letter(inverse_letter(s)), nu);
    out.push_back((rho.array().sqrt() * nu.density().array()).matrix());
  }
  return out;
}

}  // namespace

double avg_hellinger_sq(const ActionSpec& action, const GridMeasure& nu) {
  double beta = 0.0;
  const auto terms = sqrt_rho_weighted(action, nu);
  for (const auto& t : terms) beta += midpoint_integral(t);
  beta /= static_cast<double>(terms.size());
  return std::clamp(1.0 - beta, 0.0, 1.0);
}

double avg_hellinger_sq_via_pushforward(const ActionSpec& action, const GridMeasure& nu) {
  double acc = 0.0;
  const int ns = action.group().num_generators();
  for (Letter s = 0; s < ns; ++s) {
    const double h = hellinger(nu, pushforward(nu, action.letter(s)), nu);
    acc += h * h;
  }
  return acc / ns;
}

double avg_hellinger_sq_quadrature_error(const ActionSpec& action, const GridMeasure& nu) {
  const auto terms = sqrt_rho_weighted(action, nu);
  double full = 0.0, half = 0.0;
  for (const auto& t : terms) {
    full += midpoint_integral(t);
    double s = 0.0;
    for (Index i = 0; i < t.size(); i += 2) s += t(i);
    half += s / static_cast<double>((t.size() + 1) / 2);
  }
  return std::abs(full - half) / static_cast<double>(terms.size());
}

}  // namespace amencert
