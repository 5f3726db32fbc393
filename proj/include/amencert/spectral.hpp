#pragma once

// Bottom of the spectrum of the averaged Cayley-graph Laplacian
//   (Delta f)(g) = f(g) - (1/#S) sum_s f(s^-1 g)
// and the associated Rayleigh quotient / Cheeger ratio.

#include <set>
#include <string>
#include <vector>

#include "amencert/group.hpp"

namespace amencert {

enum class Lambda1Kind { ExactClosedForm, CertifiedLowerBound, EstimateFromAbove };

std::string to_string(Lambda1Kind kind);

struct Lambda1Value {
  double value = 0.0;
  Lambda1Kind kind = Lambda1Kind::ExactClosedForm;
  std::string source;  // provenance text for CertifiedLowerBound
  int radius = -1;     // truncation radius for EstimateFromAbove
  double residual = 0.0;

  /// Only exact values and certified lower bounds may feed a verdict.
  bool may_certify() const { return kind != Lambda1Kind::EstimateFromAbove; }
};

/// User-supplied certified lower bound; the provenance text must be nonempty.
Lambda1Value certified_lower_bound(double value, std::string source);

/// Z^d -> 0; F_k -> 1 - sqrt(2k-1)/k.
Lambda1Value lambda1_exact(const GroupSpec& spec);

/// (1/#S) sum_{s,g} |f_g - f_{s^-1 g}|^2 / sum_g |f_g|^2
double rayleigh_quotient(const Kernel& f);

struct DirichletOptions {
  double residual_tol = 1e-9;
  int max_matvecs = 10'000;
  std::size_t ball_cap = kDefaultBallCap;
};

/// Smallest eigenvalue of the averaged Laplacian restricted to functions
/// supported in the ball of the given radius (zero boundary values).
/// Values decrease to lambda_1 from above as the radius grows.
Lambda1Value lambda1_dirichlet(const GroupSpec& spec, int radius, const DirichletOptions& opts = {});

struct CheegerCandidate {
  std::set<Word> set;
  std::size_t boundary_pairs = 0;  // ordered pairs (g, s), g in F, s g not in F
  double ratio = 0.0;
};

CheegerCandidate cheeger_ratio(const std::set<Word>& set);

}  // namespace amencert
