#pragma once

#include <cstddef>

namespace nclab::special {

// In-repo special functions so numeric results do not depend on the host
// libm. Algorithms are the classical published ones, frozen here:
//   erf/erfc   : Cody-style rational approximations (SPECFUN), |rel| < 1e-15
//   lgamma     : Lanczos series (g=7, 9 coefficients)
//   reg_inc_beta: continued fraction, modified Lentz; |error| < 1e-13

double erf(double x);
double erfc(double x);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/// Standard normal density.
double normal_pdf(double z);

double lgamma(double x);

/// Regularized incomplete beta I_x(a, b) for a,b > 0, x in [0,1].
double reg_inc_beta(double a, double b, double x);

/// Two-sided Student-t p-value: P(|T_df| >= |t|).
double student_t_two_sided_p(double t, double df);

/// F-distribution survival P(F_{d1,d2} >= f).
double f_survival(double f, double d1, double d2);

/// Two-sided Student-t quantile: the t with P(|T_df| <= t) = level.
/// Solved by bisection on reg_inc_beta (documented inverse, |err| < 1e-12).
double student_t_quantile(double level, double df);

}  // namespace nclab::special
