#include "amencert/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "amencert/errors.hpp"
#include "amencert/lanczos.hpp"

namespace amencert {

std::string to_string(Lambda1Kind kind) {
  switch (kind) {
    case Lambda1Kind::ExactClosedForm:
      return "exact_closed_form";
    case Lambda1Kind::CertifiedLowerBound:
      return "certified_lower_bound";
    case Lambda1Kind::EstimateFromAbove:
      return "estimate_from_above";
  }
  return "unknown";
}

Lambda1Value certified_lower_bound(double value, std::string source) {
  if (source.empty()) throw InputError("certified lower bound requires provenance text");
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw InputError("certified lower bound must be a finite nonnegative number");
  }
  Lambda1Value v;
  v.value = value;
  v.kind = Lambda1Kind::CertifiedLowerBound;
  v.source = std::move(source);
  return v;
}

Lambda1Value lambda1_exact(const GroupSpec& spec) {
  Lambda1Value v;
  v.kind = Lambda1Kind::ExactClosedForm;
  if (spec.family == Family::FreeAbelian) {
    v.value = 0.0;
    v.source = "amenable group";
  } else if (spec.family == Family::Free) {
    const double k = spec.rank;
    // spectral radius of the simple random walk on the 2k-regular tree
    v.value = 1.0 - std::sqrt(2.0 * k - 1.0) / k;
    v.source = "simple random walk spectral radius on the 2k-regular tree";
  } else {
    throw CapabilityError("no closed form for lambda_1 of " + spec.describe());
  }
  return v;
}

double rayleigh_quotient(const Kernel& f) {
  const double mass = f.norm_squared();
  if (mass == 0.0) throw InputError("Rayleigh quotient of the zero kernel");
  const GroupSpec& spec = f.spec();
  double energy = 0.0;
  for (Letter s = 0; s < spec.num_generators(); ++s) {
    // (s.f)(g) = f(s^-1 g); sum over the union of both supports
    const Kernel shifted = f.translate(generator_word(spec, s));
    for (const auto& [g, v] : f.values()) {
      const double d = v - shifted(g);
      energy += d * d;
    }
    for (const auto& [g, v] : shifted.values()) {
      if (f(g) == 0.0) energy += v * v;
    }
  }
  return energy / (spec.num_generators() * mass);
}

Lambda1Value lambda1_dirichlet(const GroupSpec& spec, int radius, const DirichletOptions& opts) {
  if (radius < 1) throw InputError("Dirichlet truncation needs radius >= 1");
  const CayleyBall b = ball(spec, radius, opts.ball_cap);
  const std::vector<std::size_t> nb = b.left_neighbor_table();
  const auto ns = static_cast<std::size_t>(spec.num_generators());
  const double inv_ns = 1.0 / static_cast<double>(ns);
  const auto n = static_cast<Eigen::Index>(b.size());

  // Averaged adjacency with zero boundary values; Delta = I - A.
  auto apply = [&](const auto& x, Eigen::VectorXd& y) {
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      const std::size_t* row = nb.data() + static_cast<std::size_t>(i) * ns;
      for (std::size_t s = 0; s < ns; ++s) {
        if (row[s] != CayleyBall::npos) acc += x(static_cast<Eigen::Index>(row[s]));
      }
      y(i) = acc * inv_ns;
    }
  };

  // Perron vector of A is positive, so the constant start vector overlaps it.
  const Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
  const auto pair = largest_eigenpair<double>(apply, start, opts.residual_tol, opts.max_matvecs);

  Lambda1Value v;
  v.kind = Lambda1Kind::EstimateFromAbove;
  v.radius = radius;
  v.value = std::max(0.0, 1.0 - pair.value);
  v.residual = pair.residual;
  v.source = "Dirichlet eigenvalue on ball of radius " + std::to_string(radius);
  return v;
}

CheegerCandidate cheeger_ratio(const std::set<Word>& set) {
  if (set.empty()) throw InputError("Cheeger ratio of the empty set");
  const GroupSpec spec = set.begin()->spec();
  CheegerCandidate c;
  c.set = set;
  for (const Word& g : set) {
    for (Letter s = 0; s < spec.num_generators(); ++s) {
      if (!set.contains(mul(generator_word(spec, s), g))) ++c.boundary_pairs;
    }
  }
  c.ratio = static_cast<double>(c.boundary_pairs) / static_cast<double>(set.size());
  return c;
}

}  // namespace amencert
