#include "amencert/certifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "amencert/errors.hpp"

namespace amencert {

std::string to_string(Verdict v) {
  return v == Verdict::CertifiedNotAmenable ? "certified_not_amenable" : "inconclusive";
}

namespace {

void require_certifying(const Lambda1Value& lambda1) {
  if (!lambda1.may_certify()) {
    throw PolicyError("estimates cannot certify: lambda1 of kind " + to_string(lambda1.kind) +
                      " supplied to a certificate");
  }
}

void decide(CertificateReport& r) {
  r.beta = 1.0 - r.avg_h_sq;
  r.margin = r.lambda1.value / 2.0 - r.avg_h_sq;
  r.slack = kCertificateSlack + r.quadrature_error + r.cross_check;
  if (r.group.is_amenable()) {
    r.verdict = Verdict::Inconclusive;
    r.reason = "group is amenable; the criterion needs lambda1 > 0";
  } else if (!(r.lambda1.value > 0.0)) {
    r.verdict = Verdict::Inconclusive;
    r.reason = "lambda1 is not positive";
  } else if (r.margin > r.slack) {
    r.verdict = Verdict::CertifiedNotAmenable;
    r.reason = "average squared Hellinger distance below lambda1/2 by more than the slack";
  } else {
    r.verdict = Verdict::Inconclusive;
    r.reason = "margin does not exceed the numerical slack";
  }
}

double generator_derivative_avg(const ActionSpec& action) {
  const int ns = action.group().num_generators();
  double beta = 0.0;
  for (Letter s = 0; s < ns; ++s) beta += midpoint_integral(action.letter(s).deriv().cwiseSqrt());
  return std::clamp(1.0 - beta / ns, 0.0, 1.0);
}

}  // namespace

CertificateReport certify_hellinger(const ActionSpec& action, const GridMeasure& nu,
                                    const Lambda1Value& lambda1) {
  require_certifying(lambda1);
  require_positive(nu, "reference measure");
  CertificateReport r;
  r.route = "hellinger";
  r.group = action.group();
  r.grid_size = nu.grid_size();
  r.lambda1 = lambda1;
  r.avg_h_sq = avg_hellinger_sq(action, nu);
  r.cross_check = std::abs(r.avg_h_sq - avg_hellinger_sq_via_pushforward(action, nu));
  r.quadrature_error = avg_hellinger_sq_quadrature_error(action, nu);
  decide(r);
  return r;
}

CertificateReport certify_generator_derivative(const ActionSpec& action, const Lambda1Value& lambda1) {
  require_certifying(lambda1);
  const GridMeasure leb = GridMeasure::lebesgue(action.grid_size());
  CertificateReport r;
  r.route = "generator_derivative";
  r.group = action.group();
  r.grid_size = action.grid_size();
  r.lambda1 = lambda1;
  r.avg_h_sq = generator_derivative_avg(action);
  r.cross_check = std::abs(r.avg_h_sq - avg_hellinger_sq(action, leb));
  r.quadrature_error = avg_hellinger_sq_quadrature_error(action, leb);
  decide(r);
  return r;
}

EvidenceReport evidence_theorem2(const ActionSpec& action, const GridMeasure& nu, int max_radius) {
  if (max_radius < 0) throw InputError("evidence radius must be nonnegative");
  const BallCocycle bc = rho_on_ball(action, nu, max_radius);
  EvidenceReport rep;
  rep.grid_size = nu.grid_size();
  GridFunction sup = bc.rho.front();
  GridFunction inf = bc.rho.front();
  std::size_t i = 1;
  for (int r = 0; r <= max_radius; ++r) {
    const std::size_t end = ball_size(action.group(), r);
    for (; i < end; ++i) {
      sup = sup.cwiseMax(bc.rho[i]);
      inf = inf.cwiseMin(bc.rho[i]);
    }
    rep.radii.push_back(r);
    rep.sup_integrals.push_back(integrate(sup, nu));
    rep.inf_integrals.push_back(integrate(inf, nu));
  }
  const std::size_t m = rep.radii.size();
  const std::size_t first = m >= 3 ? m - 3 : 0;
  const auto tail_inf = std::vector<double>(rep.inf_integrals.begin() + static_cast<long>(first), rep.inf_integrals.end());
  const auto tail_sup = std::vector<double>(rep.sup_integrals.begin() + static_cast<long>(first), rep.sup_integrals.end());
  const auto [imin, imax] = std::minmax_element(tail_inf.begin(), tail_inf.end());
  const auto [smin, smax] = std::minmax_element(tail_sup.begin(), tail_sup.end());
  rep.inf_positive_hint = rep.inf_integrals.back() >= 0.1 && (*imax - *imin) < 1e-3;
  rep.sup_bounded_hint = *smin > 0.0 && (*smax / *smin) < 1.0 + 1e-3;
  return rep;
}

bool Arc::contains(double x) const { return frac(x - start) < length; }

NearIsometryReport near_isometry_check(const ActionSpec& action, const ActionSpec& comparison,
                                       const Arc& arc, int radius) {
  if (!(arc.length > 0.0) || arc.length > 1.0) throw InputError("arc length must lie in (0, 1]");
  if (!comparison.by_rotations()) throw InputError("comparison action must be by rotations");
  if (comparison.group() != action.group()) throw InputError("comparison action is over a different group");
  if (comparison.grid_size() != action.grid_size()) throw InputError("comparison action is on a different grid");

  const Index n = action.grid_size();
  std::vector<Index> pts;
  for (Index i = 0; i < n; ++i) {
    if (arc.contains(grid_point(i, n))) pts.push_back(i);
  }
  if (pts.empty()) throw InputError("arc contains no grid points");

  const CayleyBall b = ball(action.group(), radius);
  const auto maps = act_ball(action, b);
  const auto iso = act_ball(comparison, b);

  NearIsometryReport rep;
  rep.radius = radius;
  rep.grid_points_in_arc = pts.size();
  rep.arc_measure = static_cast<double>(pts.size()) / static_cast<double>(n);
  rep.worst_word = identity(action.group());
  rep.measured_deriv_inf = std::numeric_limits<double>::infinity();
  GridFunction rho_inf = GridFunction::Constant(n, std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (Index i : pts) {
      const double d = c1_distance_at(i, maps[k], iso[k]);
      if (d > rep.c_r) {
        rep.c_r = d;
        rep.worst_word = b[k];
      }
      rep.measured_deriv_inf = std::min(rep.measured_deriv_inf, maps[k].deriv()(i));
    }
    // On Lebesgue measure rho_g = D Phi_{g^-1}; the ball is symmetric.
    rho_inf = rho_inf.cwiseMin(maps[k].deriv());
  }
  rep.criterion_met = rep.c_r < 1.0;
  double acc = 0.0;
  for (Index i : pts) acc += rho_inf(i);
  rep.measured_inf_integral = acc / static_cast<double>(n);
  if (rep.criterion_met) {
    rep.implied_deriv_lower = 1.0 - rep.c_r;
    rep.implied_inf_integral = rep.implied_deriv_lower * rep.arc_measure;
  }
  return rep;
}

int psi_support_radius(const ModuleVector& xi) {
  int r = 0;
  for (const auto& [k, fk] : xi.entries()) {
    for (const auto& [h, fh] : xi.entries()) r = std::max(r, static_cast<int>(word_distance(h, k)));
  }
  return r;
}

ReplayReport replay_theorem3(const ModuleVector& xi, const ActionSpec& action,
                             const GridMeasure& nu, int radius, const ReplayOptions& opts) {
  const GroupSpec& spec = action.group();
  WitnessReport wr = verify_witness(xi, action, std::numeric_limits<double>::infinity());
  if (!wr.nonnegative || wr.unit_norm_defect > opts.witness_norm_tol) {
    throw InputError("replay needs a field with nonnegative entries and unit pointwise norm "
                     "(min value " + std::to_string(wr.min_value) + ", norm defect " +
                     std::to_string(wr.unit_norm_defect) + ")");
  }

  // psi_g = <pi_g xi, xi> can only be nonzero for g = k h^-1 with k, h in supp xi.
  std::set<Word> candidates;
  for (const auto& [k, fk] : xi.entries()) {
    for (const auto& [h, fh] : xi.entries()) candidates.insert(mul(k, inv(h)));
  }
  ReplayReport rep;
  rep.radius = radius;
  for (const Word& g : candidates) {
    rep.psi_support_radius = std::max(rep.psi_support_radius, static_cast<int>(g.length()));
  }
  if (radius < rep.psi_support_radius) {
    throw InputError("window radius " + std::to_string(radius) +
                     " is smaller than the support radius of psi (" +
                     std::to_string(rep.psi_support_radius) + ")");
  }
  std::unordered_map<Word, double, WordHash> psi;
  for (const Word& g : candidates) {
    const double v = scalar_inner(apply_pi(action, nu, g, xi), xi, nu);
    psi.emplace(g, v);
    if (v != 0.0) rep.psi.emplace_back(g, v);
  }
  auto psi_at = [&](const Word& g) {
    const auto it = psi.find(g);
    return it == psi.end() ? 0.0 : it->second;
  };

  const CayleyBall window = ball(spec, radius);
  const auto m = static_cast<Eigen::Index>(window.size());
  rep.window_size = window.size();
  std::vector<Word> inverses;
  inverses.reserve(window.size());
  for (const Word& g : window.elements()) inverses.push_back(inv(g));
  Eigen::MatrixXd T(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      T(i, j) = psi_at(mul(inverses[static_cast<std::size_t>(i)], window[static_cast<std::size_t>(j)]));
    }
  }
  const Eigen::MatrixXd Tsym = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tsym);
  if (es.info() != Eigen::Success) throw NumericError("eigen-decomposition of the psi-matrix failed");
  rep.psi_min_eigenvalue = es.eigenvalues().minCoeff();
  if (rep.psi_min_eigenvalue < -opts.psd_tol) {
    throw NumericError("psi-matrix is not positive semidefinite: min eigenvalue " +
                       std::to_string(rep.psi_min_eigenvalue) + " (quadrature too coarse?)");
  }
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd Q = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::VectorXd eta = Q.col(0);  // identity sits at index 0
  rep.eta_norm = eta.norm();

  const auto ns = spec.num_generators();
  const auto table = window.left_neighbor_table();
  double tau = 0.0;
  double sum_inner = 0.0, sum_psi = 0.0;
  for (Letter s = 0; s < ns; ++s) {
    // (s.eta)_g = eta_{s^-1 g}; neighbour of g under s^-1
    const auto sinv = static_cast<std::size_t>(inverse_letter(s));
    const std::size_t col = window.index_of(generator_word(spec, s));
    double inner = 0.0, diff_sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t src = table[static_cast<std::size_t>(i) * static_cast<std::size_t>(ns) + sinv];
      const double translated = (src == CayleyBall::npos) ? 0.0 : eta(static_cast<Eigen::Index>(src));
      inner += eta(i) * translated;
      const double d = Q(i, static_cast<Eigen::Index>(col)) - translated;
      diff_sq += d * d;
    }
    // mass of s.eta pushed outside the window
    for (Eigen::Index h = 0; h < m; ++h) {
      if (table[static_cast<std::size_t>(h) * static_cast<std::size_t>(ns) + static_cast<std::size_t>(s)] ==
          CayleyBall::npos) {
        diff_sq += eta(h) * eta(h);
      }
    }
    const double psi_s = psi_at(generator_word(spec, s));
    rep.psi_generators.push_back(psi_s);
    rep.eta_translate_inner.push_back(inner);
    tau = std::max(tau, rep.eta_norm * std::sqrt(diff_sq));
    sum_inner += inner;
    sum_psi += psi_s;
  }
  rep.tau_trunc = tau + std::max(0.0, -rep.psi_min_eigenvalue);
  rep.avg_psi = sum_psi / ns;
  const double norm_sq = rep.eta_norm * rep.eta_norm;
  rep.rayleigh = 2.0 * (norm_sq - sum_inner / ns) / norm_sq;

  rep.avg_h_sq = avg_hellinger_sq(action, nu);
  rep.beta = 1.0 - rep.avg_h_sq;
  rep.witness_defect = wr.defect;
  rep.chain_lower = rep.beta * (1.0 - wr.defect);
  rep.lambda1 = lambda1_exact(spec);
  rep.rayleigh_dominates = rep.rayleigh >= rep.lambda1.value - 1e-9;
  return rep;
}

}  // namespace amencert
