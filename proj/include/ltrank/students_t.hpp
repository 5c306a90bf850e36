#pragma once

namespace ltrank {

/// Regularized incomplete beta function I_x(a, b), evaluated with the
/// continued-fraction expansion (modified Lentz), accurate to about 1e-10.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t distribution with df degrees
/// of freedom: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace ltrank
