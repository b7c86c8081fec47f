#pragma once

#include <iosfwd>
#include <vector>

#include "se3grasp/lie.hpp"
#include "se3grasp/rng.hpp"

namespace sg {

// Tabulated isotropic Gaussian on SO(3) for one concentration value.
// f is the density w.r.t. normalized Haar measure as a function of the
// rotation angle; cdf is the cumulative marginal over the angle with the
// (1 - cos w)/pi volume factor; dlogf is d/dw log f.
struct IgSo3Table {
  double epsilon = 0.0;
  std::vector<double> omega;
  std::vector<double> f;
  std::vector<double> cdf;
  std::vector<double> dlogf;
};

// Density at angle omega in [0, pi]. trunc = 0 picks the adaptive truncation
// order (smallest L with (2L+1) exp(-L(L+1) eps) < 1e-12, capped at 2000).
// Below eps = 1e-3 the truncated series is replaced by the heat-kernel
// small-concentration closed form. Throws std::invalid_argument for eps <= 0.
double igso3_density(double omega, double eps, int trunc = 0);

// Analytic d/domega log f, matching igso3_density branch for branch.
double igso3_dlogf(double omega, double eps, int trunc = 0);

int igso3_truncation(double eps);

// Process-wide table cache; construction is synchronized per key, lookups
// return a stable reference.
const IgSo3Table& igso3_table(double eps);

// Snap eps to one of 512 log-spaced bins; used by training so the number of
// tables stays bounded.
double igso3_quantize_eps(double eps);

// Draw a rotation: angle by inverse-CDF on the tabulated marginal with
// linear interpolation, axis uniform on the sphere.
Quat igso3_sample(double eps, Rng& rng);
double igso3_sample_angle(double eps, Rng& rng);

// Left-trivialized score of the density at q: (d/dw log f)(|phi|) * phi/|phi|
// with phi = log_so3(q). Zero at the identity.
Vec3 igso3_score(const Quat& q, double eps);

// Score of the isotropic Gaussian in R^3: -dp / sigma^2. Throws for
// sigma <= 0.
Vec3 gauss_score(const Vec3& dp, double sigma);

// CSV dump (omega,f,cdf,dlogf), one row per grid node.
void igso3_dump_csv(const IgSo3Table& table, std::ostream& out);

}  // namespace sg
