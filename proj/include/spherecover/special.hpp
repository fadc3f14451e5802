#pragma once

#include <cmath>
#include <span>

namespace spherecover {

// log of the regularized incomplete beta I_x(a, b).
//
// Both x and y = 1 - x are taken as inputs so callers that know 1 - x in
// closed form (cos^2 of an angle, for instance) avoid the cancellation.
// Stays finite where I_x itself underflows double precision.
double log_ibeta(double a, double b, double x, double y);

inline double ibeta(double a, double b, double x, double y) { return std::exp(log_ibeta(a, b, x, y)); }

// log(sum(exp(v))) without overflow; -inf for an empty range.
double log_sum_exp(std::span<const double> values);

double log_add_exp(double a, double b);

}  // namespace spherecover
