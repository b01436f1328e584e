#pragma once

namespace taoquant::dist {

double normal_cdf(double x);

/// 2 * (1 - Phi(|t|)).
double normal_two_sided_p(double t);

/// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// P(F > f) for an F(d1, d2) variate. Returns 1 for f <= 0.
double f_upper_tail_p(double f, double d1, double d2);

/// Regularized incomplete beta function I_x(a, b), evaluated with the Lentz
/// continued fraction. Exposed so the tail probabilities above can be checked
/// against independent series evaluations.
double reg_incomplete_beta(double a, double b, double x);

}  // namespace taoquant::dist
