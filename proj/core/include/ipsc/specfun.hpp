#pragma once

namespace ipsc::specfun {

// --- Gaussian -------------------------------------------------------------

double norm_pdf(double x, double sigma);
double norm_cdf(double x, double sigma);

/// exp(x^2) * erfc(x) for x >= 0, accurate over the whole range.
double erfcx_pos(double x);

/// log P(Z > z) for standard normal Z, stable for any z.
double log_norm_sf(double z);

/// q_sigma(n; n_lo, n_hi) = (phi_s(n-n_lo) - phi_s(n-n_hi)) /
///                          (Phi_s(n-n_lo) - Phi_s(n-n_hi))
/// = d/dn log P(x in [n_lo, n_hi]) for x ~ N(n, sigma^2).
/// Either bound may be infinite. Stable arbitrarily deep in the tails,
/// where it approaches the linear restoring slope (n_lo - n)/sigma^2.
double q_gauss(double n, double n_lo, double n_hi, double sigma);

// --- Incomplete gamma (regularized, log domain) ----------------------------

double log_gamma_q(double s, double x);
double log_gamma_p(double s, double x);

// --- Non-central chi-squared ----------------------------------------------

/// log density of chi'^2_dof(lambda) at xi (-inf for xi < 0).
double ncx2_log_pdf(double xi, int dof, double lambda);
double ncx2_pdf(double xi, int dof, double lambda);

/// log survival function P(X > xi); 0 at xi <= 0.
double ncx2_log_sf(double xi, int dof, double lambda);
double ncx2_sf(double xi, int dof, double lambda);

/// q_{chi'^2_K}(lambda; xi_lo, xi_hi) =
///   (f_{K+2}(xi_lo; lambda) - f_{K+2}(xi_hi; lambda)) /
///   (SF_K(xi_lo; lambda)    - SF_K(xi_hi; lambda))
/// = d/dlambda log P(X in (xi_lo, xi_hi]).
/// Finite for all finite inputs; deep outside the interval it switches to the
/// analytic tail asymptote instead of returning 0/0.
double q_ncx2(double lambda, double xi_lo, double xi_hi, int dof);

}  // namespace ipsc::specfun
