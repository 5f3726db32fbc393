#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "amencert/errors.hpp"
#include "amencert/measures.hpp"
#include "oracles.hpp"

using namespace amencert;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kThetaA = 0.2360679774997897;
constexpr double kThetaB = 0.41421356237309515;

ActionSpec f2_sine(double a, Index n) {
  return ActionSpec(free_group(2), {make_sine_perturbed(kThetaA, a, n), make_sine_perturbed(kThetaB, a, n)});
}

GridMeasure density_measure(const std::vector<double>& v) {
  return GridMeasure::from_density(Eigen::Map<const GridFunction>(v.data(), static_cast<Index>(v.size())));
}

GridMeasure step_measure(Index n, double lo, double hi) {
  GridFunction d(n);
  for (Index i = 0; i < n; ++i) {
    const double x = grid_point(i, n);
    d(i) = (x >= lo && x < hi) ? 1.0 : 0.0;
  }
  return GridMeasure::from_density(d);
}

// int_0^1 sqrt(1 + a cos 2 pi y) dy by a fine midpoint rule (spectrally
// accurate for smooth periodic integrands).
double sqrt_derivative_integral(double a) {
  const int m = 20000;
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += std::sqrt(1.0 + a * std::cos(kTwoPi * (i + 0.5) / m));
  return s / m;
}

}  // namespace

TEST_CASE("grid measures") {
  const GridMeasure leb = GridMeasure::lebesgue(64);
  CHECK(leb.is_lebesgue());
  CHECK(leb.strictly_positive());
  CHECK(integrate(GridFunction::Ones(64), leb) == doctest::Approx(1.0));

  GridFunction d = GridFunction::Constant(64, 3.0);
  const GridMeasure m = GridMeasure::from_density(d);
  CHECK(m.raw_mass() == doctest::Approx(3.0));
  CHECK(m.is_lebesgue());

  d(3) = -1.0;
  CHECK_THROWS_AS(GridMeasure::from_density(d), InputError);
  CHECK_THROWS_AS(GridMeasure::from_density(GridFunction::Zero(64)), InputError);
  d(3) = NAN;
  CHECK_THROWS_AS(GridMeasure::from_density(d), InputError);

  const GridMeasure half = step_measure(64, 0.0, 0.5);
  CHECK_FALSE(half.strictly_positive());
  CHECK_THROWS_AS(require_positive(half, "nu"), UnsupportedMeasureError);
  CHECK_THROWS_AS(integrate(GridFunction::Ones(32), leb), InputError);
}

TEST_CASE("Hellinger distance of a half-circle step") {
  const Index n = 4096;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  const GridMeasure step = step_measure(n, 0.0, 0.5);
  // A = int sqrt(2) 1_[0,1/2) = sqrt(2)/2
  const double expected = std::sqrt(1.0 - std::sqrt(2.0) / 2.0);
  CHECK(hellinger(leb, step, leb) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(affinity(leb, step, leb) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(total_variation(leb, step, leb) == doctest::Approx(0.5));

  const GridMeasure other = step_measure(n, 0.5, 1.0);
  CHECK(hellinger(step, other, leb) == doctest::Approx(1.0));
  CHECK(total_variation(step, other, leb) == doctest::Approx(1.0));
  CHECK(hellinger(step, step, leb) == 0.0);
  CHECK_THROWS_AS(hellinger(leb, step, step), UnsupportedMeasureError);
}

TEST_CASE("Hellinger metric axioms and sandwich on random densities") {
  std::mt19937_64 rng(424242);
  const int n = 512;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  for (int t = 0; t < 300; ++t) {
    // floor 0 allows vanishing regions
    const GridMeasure p = density_measure(oracle::random_density(rng, n, t % 3 == 0 ? 0.0 : 0.05));
    const GridMeasure q = density_measure(oracle::random_density(rng, n, t % 5 == 0 ? 0.0 : 0.05));
    const GridMeasure r = density_measure(oracle::random_density(rng, n));
    const double hpq = hellinger(p, q, leb);
    const double tv = total_variation(p, q, leb);
    CHECK(hpq >= 0.0);
    CHECK(hpq <= 1.0);
    CHECK(hpq == doctest::Approx(hellinger(q, p, leb)));
    CHECK(hellinger(p, p, leb) == doctest::Approx(0.0));
    CHECK(hpq <= hellinger(p, r, leb) + hellinger(r, q, leb) + 1e-12);
    CHECK(hpq * hpq <= tv + 1e-12);
    CHECK(tv <= hpq * std::sqrt(2.0 - hpq * hpq) + 1e-12);
    CHECK(affinity(p, q, leb) == doctest::Approx(1.0 - hpq * hpq));
  }
}

TEST_CASE("Hellinger distance does not depend on the dominating measure") {
  std::mt19937_64 rng(5);
  const int n = 256;
  for (int t = 0; t < 20; ++t) {
    const GridMeasure p = density_measure(oracle::random_density(rng, n));
    const GridMeasure q = density_measure(oracle::random_density(rng, n));
    const GridMeasure nu = density_measure(oracle::random_density(rng, n));
    CHECK(hellinger(p, q, nu) == doctest::Approx(hellinger(p, q, GridMeasure::lebesgue(n))).epsilon(1e-12));
  }
}

TEST_CASE("pushforward") {
  const Index n = 1024;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  CHECK((pushforward(leb, make_rotation(0.3, n)).density().array() - 1.0).abs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(1);
  const GridMeasure nu = density_measure(oracle::random_density(rng, static_cast<int>(n)));
  const CircleDiffeo f = make_sine_perturbed(0.2, 0.3, n);
  const GridMeasure pushed = pushforward(nu, f);
  CHECK(pushed.raw_mass() == doctest::Approx(1.0).epsilon(1e-6));
  const GridMeasure back = pushforward(pushed, invert(f));
  // two rounds of linear interpolation of the density
  CHECK((back.density() - nu.density()).cwiseAbs().maxCoeff() < 5e-4);
  // Lebesgue pushed by a sine map: density 1 / Df(f^-1 y)
  const CircleDiffeo finv = invert(f);
  for (Index i = 0; i < n; i += 97) {
    CHECK(pushforward(leb, f).density()(i) == doctest::Approx(finv.deriv()(i)).epsilon(1e-6));
  }
}

TEST_CASE("Radon-Nikodym derivatives") {
  const Index n = 1024;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  const ActionSpec rot(free_group(2), {make_rotation(kThetaA, n), make_rotation(kThetaB, n)});
  const CayleyBall b = ball(rot.group(), 2);
  for (const Word& g : b.elements()) {
    CHECK((radon_nikodym(rot, leb, g).array() - 1.0).abs().maxCoeff() == 0.0);
  }

  // for Lebesgue, rho_g = D Phi_{g^-1}
  const ActionSpec action = f2_sine(0.1, n);
  const Word g = parse_word(action.group(), "aB");
  const GridFunction rho = radon_nikodym(action, leb, g);
  CHECK((rho - act(action, inv(g)).deriv()).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(2);
  const GridMeasure nu = density_measure(oracle::random_density(rng, static_cast<int>(n)));
  CHECK_THROWS_AS(radon_nikodym(action, step_measure(n, 0.0, 0.5), g), UnsupportedMeasureError);

  // integral of rho_g against nu is the total mass of g_* nu
  const BallCocycle bc = rho_on_ball(action, nu, 3);
  CHECK(bc.ball.size() == 53);
  for (std::size_t i = 0; i < bc.ball.size(); ++i) {
    CHECK(integrate(bc.rho[i], nu) == doctest::Approx(1.0).epsilon(1e-5));
  }
  CHECK((bc.rho_of(g) - radon_nikodym(action, nu, g)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(bc.rho_of(parse_word(action.group(), "aaaa")), InputError);
}

TEST_CASE("defining identity and cocycle law") {
  const Index n = 1024;
  const ActionSpec action = f2_sine(0.1, n);
  std::mt19937_64 rng(3);
  const GridMeasure nu = density_measure(oracle::random_density(rng, static_cast<int>(n)));
  const GridMeasure leb = GridMeasure::lebesgue(n);
  const CayleyBall b2 = ball(action.group(), 2);
  for (const Word& g : b2.elements()) {
    CHECK(defining_identity_defect(action, leb, g) <= 1e-10);
    CHECK(defining_identity_defect(action, nu, g) <= 1e-5);
  }
  CHECK(test_battery().size() == 8);

  const GroupSpec f2 = action.group();
  for (const auto& [gs, hs] : {std::pair{"a", "b"}, {"aB", "ba"}, {"AAb", "Bab"}}) {
    const Word g = parse_word(f2, gs), h = parse_word(f2, hs);
    const double len = static_cast<double>(g.length() + h.length());
    CHECK(cocycle_check(action, nu, g, h) <= 1e-4 * len);
  }

  // second-order convergence of the interpolated cocycle law
  const Word g = parse_word(f2, "ab"), h = parse_word(f2, "Ab");
  double prev = 0.0;
  for (Index m : {256, 512, 1024}) {
    const ActionSpec act_m = f2_sine(0.1, m);
    std::vector<double> dens(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) dens[static_cast<std::size_t>(i)] = 1.0 + 0.5 * std::sin(kTwoPi * grid_point(i, m));
    const double d = cocycle_check(act_m, density_measure(dens), g, h);
    if (prev > 0.0) CHECK(prev / d == doctest::Approx(4.0).epsilon(0.15));
    prev = d;
  }
}

TEST_CASE("average squared Hellinger distance of generator translates") {
  const Index n = 4096;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  for (double a : {0.05, 0.1, 0.3}) {
    const ActionSpec action = f2_sine(a, n);
    const double v = avg_hellinger_sq(action, leb);
    CHECK(v == doctest::Approx(1.0 - sqrt_derivative_integral(a)).epsilon(1e-9));
    CHECK(v == doctest::Approx(a * a / 16.0).epsilon(0.1));
    CHECK(std::abs(v - avg_hellinger_sq_via_pushforward(action, leb)) <= 1e-6);
    CHECK(avg_hellinger_sq_quadrature_error(action, leb) <= 1e-12);
  }
  const ActionSpec rot(free_group(2), {make_rotation(kThetaA, n), make_rotation(kThetaB, n)});
  CHECK(avg_hellinger_sq(rot, leb) == 0.0);

  std::mt19937_64 rng(4);
  const GridMeasure nu = density_measure(oracle::random_density(rng, static_cast<int>(n)));
  const ActionSpec action = f2_sine(0.1, n);
  CHECK(std::abs(avg_hellinger_sq(action, nu) - avg_hellinger_sq_via_pushforward(action, nu)) <= 1e-5);
  CHECK(avg_hellinger_sq(rot, nu) > 0.0);
}
