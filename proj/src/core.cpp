#include "alx/core.hpp"

namespace alx {

const char* err_name(Err e) {
    switch (e) {
        case Err::NonManifold: return "NonManifold";
        case Err::OrientationClash: return "OrientationClash";
        case Err::Disconnected: return "Disconnected";
        case Err::TriangleInequalityViolated: return "TriangleInequalityViolated";
        case Err::LengthMismatch: return "LengthMismatch";
        case Err::NonPositiveLength: return "NonPositiveLength";
        case Err::QuadratureUnderResolved: return "QuadratureUnderResolved";
        case Err::DisconnectedPoint: return "DisconnectedPoint";
        case Err::EmptySample: return "EmptySample";
        case Err::RadiusTooLarge: return "RadiusTooLarge";
        case Err::BadParameter: return "BadParameter";
        case Err::PointOutsideDomain: return "PointOutsideDomain";
        case Err::SingularEndpoint: return "SingularEndpoint";
        case Err::MaskTooLarge: return "MaskTooLarge";
        case Err::CoincidentPoints: return "CoincidentPoints";
        case Err::TruncationNotConverged: return "TruncationNotConverged";
        case Err::NonZeroTotalMass: return "NonZeroTotalMass";
        case Err::CuspAtom: return "CuspAtom";
        case Err::GaussBonnetViolation: return "GaussBonnetViolation";
        case Err::ResolutionTooLow: return "ResolutionTooLow";
        case Err::EpsilonTooLarge: return "EpsilonTooLarge";
        case Err::EmptyDictionary: return "EmptyDictionary";
    }
    return "UnknownError";
}

double expint_e1(double x) {
    if (x <= 0.0) fail(Err::BadParameter, "expint_e1 requires x > 0");
    if (x <= 1.0) {
        // Power series: E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
        constexpr double kEulerGamma = 0.57721566490153286060651209;
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    // Continued fraction (modified Lentz), E1(x) = e^{-x} * CF.
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

}  // namespace alx
