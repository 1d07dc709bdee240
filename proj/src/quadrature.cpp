#include "alx/quadrature.hpp"

#include <cmath>

namespace alx {

namespace {
// Nodes/weights for 3-point Gauss-Legendre on [-1, 1].
constexpr double kNode = 0.7745966692414834;  // sqrt(3/5)
constexpr double kW0 = 8.0 / 9.0;
constexpr double kW1 = 5.0 / 9.0;
}  // namespace

double gauss3(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    return h * (kW0 * f(c) + kW1 * f(c - h * kNode) + kW1 * f(c + h * kNode));
}

double gauss3_composite(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels < 1) panels = 1;
    NeumaierSum s;
    const double step = (b - a) / panels;
    for (int i = 0; i < panels; ++i) s.add(gauss3(f, a + i * step, a + (i + 1) * step));
    return s.value();
}

namespace {
double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double rel_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss3(f, a, m);
    const double right = gauss3(f, m, b);
    const double split = left + right;
    if (depth <= 0 || std::abs(split - whole) <= rel_tol * (std::abs(split) + 1e-300))
        return split;
    return adaptive_rec(f, a, m, left, rel_tol, depth - 1) +
           adaptive_rec(f, m, b, right, rel_tol, depth - 1);
}
}  // namespace

double gauss3_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                       int max_depth) {
    return adaptive_rec(f, a, b, gauss3(f, a, b), rel_tol, max_depth);
}

double gauss3_power_endpoint(const std::function<double(double)>& f, double L, double alpha,
                             int panels) {
    require(alpha > -1.0, Err::BadParameter, "endpoint exponent must be > -1");
    require(L > 0.0, Err::BadParameter, "integration length must be positive");
    const double p = 1.0 / (1.0 + alpha);
    // s = L * tau^p, ds = L * p * tau^{p-1} dtau; integrand stays bounded since
    // f(s) * s^{-alpha} is bounded near 0.
    auto g = [&](double tau) {
        if (tau <= 0.0) return 0.0;
        const double s = L * std::pow(tau, p);
        return f(s) * L * p * std::pow(tau, p - 1.0);
    };
    return gauss3_composite(g, 0.0, 1.0, panels);
}

double solve_increasing(const std::function<double(double)>& g, double lo, double hi,
                        double target, int iters) {
    double a = lo, b = hi;
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        if (g(m) < target)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace alx
