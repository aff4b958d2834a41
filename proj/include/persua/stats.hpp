#pragma once

namespace persua {

// Standard normal CDF.
double normal_cdf(double x);

// Two-sided normal tail probability for a z statistic: P(|Z| >= |z|).
double normal_two_sided_p(double z);

// Regularized incomplete beta I_x(a, b) for a,b > 0 and x in [0,1].
double incomplete_beta(double a, double b, double x);

// Upper tail of Student's t: P(T > t) for t >= 0 with df degrees of freedom.
double student_t_sf(double t, double df);

// Two-sided t-test p-value: P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

}  // namespace persua
