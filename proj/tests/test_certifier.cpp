#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "amencert/certifier.hpp"
#include "amencert/errors.hpp"
#include "oracles.hpp"

using namespace amencert;

namespace {

constexpr double kThetaA = 0.2360679774997897;
constexpr double kThetaB = 0.41421356237309515;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ActionSpec f2_sine(double a, Index n) {
  return ActionSpec(free_group(2), {make_sine_perturbed(kThetaA, a, n), make_sine_perturbed(kThetaB, a, n)});
}

ActionSpec f2_rotations(Index n) {
  return ActionSpec(free_group(2), {make_rotation(kThetaA, n), make_rotation(kThetaB, n)});
}

// Random positive field on a ball, normalised pointwise.
ModuleVector random_witness(std::mt19937_64& rng, const GroupSpec& spec, int radius, Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModuleVector xi(spec, n);
  const CayleyBall b = ball(spec, radius);
  for (const Word& g : b.elements()) {
    if (!g.is_identity() && u(rng) < 0.3) continue;
    const double c = 0.2 + u(rng), amp = 0.5 * u(rng), ph = u(rng);
    GridFunction f(n);
    for (Index i = 0; i < n; ++i) f(i) = c * (1.0 + amp * std::cos(kTwoPi * (grid_point(i, n) + ph)));
    xi.set(g, f);
  }
  return normalize_pointwise(std::move(xi));
}

}  // namespace

TEST_CASE("Hellinger certificate examples") {
  const Index n = 4096;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  const Lambda1Value l1 = lambda1_exact(free_group(2));

  const CertificateReport rot = certify_hellinger(f2_rotations(n), leb, l1);
  CHECK(rot.avg_h_sq == 0.0);
  CHECK(rot.verdict == Verdict::CertifiedNotAmenable);
  CHECK(rot.margin == doctest::Approx(l1.value / 2.0));

  const CertificateReport sine = certify_hellinger(f2_sine(0.1, n), leb, l1);
  CHECK(sine.verdict == Verdict::CertifiedNotAmenable);
  CHECK(sine.avg_h_sq == doctest::Approx(6.25e-4).epsilon(0.1));
  CHECK(sine.margin == doctest::Approx(0.0664).epsilon(1e-2));
  CHECK(sine.beta == doctest::Approx(1.0 - sine.avg_h_sq));
  CHECK(sine.slack >= kCertificateSlack);
  CHECK(sine.slack < 1e-4);
  CHECK(sine.cross_check <= 1e-6);
  CHECK(sine.route == "hellinger");
  CHECK(to_string(sine.verdict) == "certified_not_amenable");
  CHECK(to_string(Verdict::Inconclusive) == "inconclusive");

  // a user-supplied certified bound is accepted; a bound too small leaves no margin
  CHECK(certify_hellinger(f2_sine(0.1, n), leb, certified_lower_bound(0.1, "test bound")).verdict ==
        Verdict::CertifiedNotAmenable);
  CHECK(certify_hellinger(f2_sine(0.1, n), leb, certified_lower_bound(1e-3, "test bound")).verdict ==
        Verdict::Inconclusive);
}

TEST_CASE("estimates from above never certify") {
  const Index n = 256;
  const Lambda1Value est = lambda1_dirichlet(free_group(2), 4);
  CHECK_THROWS_AS(certify_hellinger(f2_rotations(n), GridMeasure::lebesgue(n), est), PolicyError);
  CHECK_THROWS_AS(certify_generator_derivative(f2_rotations(n), est), PolicyError);
}

TEST_CASE("amenable groups are always inconclusive") {
  const Index n = 256;
  const CircleDiffeo f = make_sine_perturbed(kThetaA, 0.1, n);
  for (const ActionSpec& action : {ActionSpec(free_abelian_group(2), {f, compose(f, f)}),
                                   ActionSpec(free_abelian_group(2), {make_rotation(kThetaA, n),
                                                                      make_rotation(kThetaB, n)})}) {
    const CertificateReport r =
        certify_hellinger(action, GridMeasure::lebesgue(n), lambda1_exact(action.group()));
    CHECK(r.verdict == Verdict::Inconclusive);
    CHECK_FALSE(r.reason.empty());
  }
  // even with a bogus positive bound supplied for Z^2
  const ActionSpec rot(free_abelian_group(2), {make_rotation(kThetaA, n), make_rotation(kThetaB, n)});
  CHECK(certify_hellinger(rot, GridMeasure::lebesgue(n), certified_lower_bound(0.5, "wrong")).verdict ==
        Verdict::Inconclusive);
}

TEST_CASE("generator-derivative route") {
  const Index n = 4096;
  const Lambda1Value l1 = lambda1_exact(free_group(2));
  const GridMeasure leb = GridMeasure::lebesgue(n);
  for (double a : {0.0, 0.05, 0.1, 0.3}) {
    const ActionSpec action = f2_sine(a, n);
    const CertificateReport g = certify_generator_derivative(action, l1);
    const CertificateReport h = certify_hellinger(action, leb, l1);
    CHECK(g.route == "generator_derivative");
    CHECK(g.verdict == Verdict::CertifiedNotAmenable);
    CHECK(std::abs(g.avg_h_sq - h.avg_h_sq) <= 1e-6);
    CHECK(g.cross_check <= 1e-6);
  }
  CHECK(certify_generator_derivative(f2_sine(0.0, n), l1).avg_h_sq == 0.0);

  // a strongly distorting generator: the cube of a steep sine map
  const CircleDiffeo steep = make_sine_perturbed(kThetaA, 0.9, n);
  const ActionSpec wild(free_group(2), {compose(steep, compose(steep, steep)), make_sine_perturbed(kThetaB, 0.9, n)});
  const CertificateReport w = certify_generator_derivative(wild, l1);
  CHECK(w.avg_h_sq > l1.value / 2.0);
  CHECK(w.margin < 0.0);
  CHECK(w.verdict == Verdict::Inconclusive);
  CHECK(std::abs(w.avg_h_sq - certify_hellinger(wild, leb, l1).avg_h_sq) <= 1e-6);
}

TEST_CASE("integrability evidence") {
  const Index n = 512;
  const GridMeasure leb = GridMeasure::lebesgue(n);
  const EvidenceReport inv = evidence_theorem2(f2_rotations(n), leb, 3);
  CHECK(inv.radii == std::vector<int>{0, 1, 2, 3});
  for (std::size_t i = 0; i < inv.radii.size(); ++i) {
    CHECK(inv.sup_integrals[i] == doctest::Approx(1.0));
    CHECK(inv.inf_integrals[i] == doctest::Approx(1.0));
  }
  CHECK(inv.sup_bounded_hint);
  CHECK(inv.inf_positive_hint);

  const EvidenceReport zero = evidence_theorem2(f2_sine(0.1, n), leb, 0);
  CHECK(zero.sup_integrals == std::vector<double>{1.0});
  CHECK(zero.inf_integrals == std::vector<double>{1.0});
  CHECK_THROWS_AS(evidence_theorem2(f2_sine(0.1, n), leb, -1), InputError);

  const EvidenceReport e = evidence_theorem2(f2_sine(0.1, n), leb, 5);
  REQUIRE(e.radii.size() == 6);
  CHECK(e.sup_integrals[0] == doctest::Approx(1.0));
  CHECK(e.inf_integrals[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < e.radii.size(); ++i) {
    CHECK(e.sup_integrals[i] >= e.sup_integrals[i - 1]);
    CHECK(e.inf_integrals[i] <= e.inf_integrals[i - 1]);
  }
  CHECK(e.inf_integrals[5] < e.inf_integrals[1]);
  CHECK(e.sup_integrals[5] > e.sup_integrals[1]);
}

TEST_CASE("near-isometry criterion") {
  const Index n = 1024;
  const Arc arc{0.1, 0.3};
  CHECK(arc.contains(0.2));
  CHECK_FALSE(arc.contains(0.5));
  CHECK(Arc{0.9, 0.2}.contains(0.05));
  CHECK(Arc{0.0, 1.0}.contains(0.999));

  const NearIsometryReport same = near_isometry_check(f2_rotations(n), f2_rotations(n), arc, 3);
  CHECK(same.c_r == 0.0);
  CHECK(same.criterion_met);

  const NearIsometryReport r = near_isometry_check(f2_sine(0.05, n), f2_rotations(n), arc, 3);
  CHECK(r.c_r > 0.0);
  CHECK(r.c_r <= 3.0 * (0.05 / kTwoPi + 0.05));
  CHECK(r.criterion_met);
  CHECK(r.implied_deriv_lower == doctest::Approx(1.0 - r.c_r));
  CHECK(r.measured_deriv_inf >= r.implied_deriv_lower);
  CHECK(r.measured_inf_integral >= r.implied_inf_integral);
  CHECK(r.arc_measure == doctest::Approx(0.3).epsilon(1e-2));
  CHECK(r.worst_word.length() >= 1);

  const NearIsometryReport big = near_isometry_check(f2_sine(0.9, n), f2_rotations(n), arc, 3);
  CHECK(big.c_r >= 1.0);
  CHECK_FALSE(big.criterion_met);

  CHECK_THROWS_AS(near_isometry_check(f2_sine(0.05, n), f2_rotations(n), Arc{0.1, 0.0}, 3), InputError);
  CHECK_THROWS_AS(near_isometry_check(f2_sine(0.05, n), f2_sine(0.05, n), arc, 3), InputError);
  CHECK_THROWS_AS(near_isometry_check(f2_sine(0.05, n), f2_rotations(512), arc, 3), InputError);
}

TEST_CASE("replay: a point mass under rotations") {
  const Index n = 64;
  const GroupSpec f2 = free_group(2);
  ModuleVector xi(f2, n);
  xi.set(identity(f2), GridFunction::Ones(n));
  CHECK(psi_support_radius(xi) == 0);
  const ReplayReport r = replay_theorem3(xi, f2_rotations(n), GridMeasure::lebesgue(n), 1);
  REQUIRE(r.psi.size() == 1);
  CHECK(r.psi[0].first.is_identity());
  CHECK(r.psi[0].second == doctest::Approx(1.0));
  CHECK(r.eta_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.rayleigh == doctest::Approx(2.0));
  CHECK(r.avg_psi == 0.0);
  CHECK(r.witness_defect == doctest::Approx(1.0));
  CHECK(r.rayleigh_dominates);
  CHECK(r.tau_trunc <= 1e-12);
}

TEST_CASE("replay: Folner box in Z^2") {
  const Index n = 16;
  const GroupSpec z2 = free_abelian_group(2);
  const ActionSpec rot(z2, {make_rotation(kThetaA, n), make_rotation(kThetaB, n)});
  const ModuleVector xi = build_folner_witness(z2, 10, n);
  CHECK(psi_support_radius(xi) == 18);
  CHECK_THROWS_AS(replay_theorem3(xi, rot, GridMeasure::lebesgue(n), 17), InputError);
  const ReplayReport r = replay_theorem3(xi, rot, GridMeasure::lebesgue(n), 18);
  for (double p : r.psi_generators) CHECK(p == doctest::Approx(0.9));
  CHECK(r.psi_min_eigenvalue >= -1e-8);
  CHECK(r.eta_norm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.rayleigh == doctest::Approx(0.2).epsilon(0.05));
  CHECK(r.witness_defect == doctest::Approx(0.1));
  CHECK(r.lambda1.value == 0.0);
  CHECK(r.rayleigh_dominates);
  for (std::size_t s = 0; s < r.psi_generators.size(); ++s) {
    CHECK(std::abs(r.eta_translate_inner[s] - r.psi_generators[s]) <= r.tau_trunc + 1e-9);
  }
}

TEST_CASE("replay refuses non-witnesses") {
  const Index n = 32;
  const GroupSpec f2 = free_group(2);
  ModuleVector xi(f2, n);
  xi.set(identity(f2), GridFunction::Constant(n, 0.5));
  CHECK_THROWS_AS(replay_theorem3(xi, f2_rotations(n), GridMeasure::lebesgue(n), 1), InputError);
  ModuleVector neg(f2, n);
  neg.set(identity(f2), -GridFunction::Ones(n));
  CHECK_THROWS_AS(replay_theorem3(neg, f2_rotations(n), GridMeasure::lebesgue(n), 1), InputError);
}

TEST_CASE("replay: the contrapositive inequality on random witnesses") {
  const Index n = 256;
  const ActionSpec action = f2_sine(0.1, n);
  const GroupSpec f2 = action.group();
  const GridMeasure leb = GridMeasure::lebesgue(n);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 25; ++t) {
    const ModuleVector xi = random_witness(rng, f2, 1, n);
    const int radius = psi_support_radius(xi) + 1;
    const ReplayReport r = replay_theorem3(xi, action, leb, radius);
    CHECK(r.psi_min_eigenvalue >= -1e-8);
    CHECK(r.eta_norm == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t s = 0; s < r.psi_generators.size(); ++s) {
      CHECK(std::abs(r.eta_translate_inner[s] - r.psi_generators[s]) <= r.tau_trunc + 1e-12);
    }
    CHECK(1.0 - r.avg_psi >= (r.lambda1.value - 2.0 * r.avg_h_sq) / 2.0 - r.tau_trunc);
    CHECK(r.chain_lower <= r.avg_psi + 1e-9);
    CHECK(r.rayleigh_dominates);
  }
}
