#pragma once

#include <functional>

#include "alx/core.hpp"

namespace alx {

// 3-point Gauss-Legendre on [a, b].
double gauss3(const std::function<double(double)>& f, double a, double b);

// Composite 3-point Gauss with `panels` equal panels.
double gauss3_composite(const std::function<double(double)>& f, double a, double b, int panels);

// Adaptive dyadic composite Gauss: split until the estimate is stable to rel_tol
// (or depth exhausted). Suitable for integrands smooth away from the endpoints.
double gauss3_adaptive(const std::function<double(double)>& f, double a, double b,
                       double rel_tol = 1e-12, int max_depth = 24);

// Integral of f over [0, L] where f(s) ~ C * s^alpha near s = 0 with alpha > -1.
// Uses the substitution s = L * tau^{1/(1+alpha)} which removes the power
// singularity exactly, then composite Gauss in tau.
double gauss3_power_endpoint(const std::function<double(double)>& f, double L, double alpha,
                             int panels = 48);

// Smallest t in [lo, hi] with g(t) = target, assuming g increasing. Bisection.
double solve_increasing(const std::function<double(double)>& g, double lo, double hi,
                        double target, int iters = 80);

}  // namespace alx
