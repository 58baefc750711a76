#include "ecx/bessel.hpp"

#include <cmath>

namespace ecx {

// Rational fits after Abramowitz & Stegun 9.4 (the classic 8-digit forms).

double bessel_j0(double x) {
    const double ax = std::fabs(x);
    if (ax < 8.0) {
        const double y = x * x;
        const double p = 57568490574.0 + y * (-13362590354.0 + y * (651619640.7 +
                         y * (-11214424.18 + y * (77392.33017 + y * (-184.9052456)))));
        const double q = 57568490411.0 + y * (1029532985.0 + y * (9494680.718 +
                         y * (59272.64853 + y * (267.8532712 + y))));
        return p / q;
    }
    const double z = 8.0 / ax;
    const double y = z * z;
    const double xx = ax - 0.785398164;
    const double p = 1.0 + y * (-0.1098628627e-2 + y * (0.2734510407e-4 +
                     y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
    const double q = -0.1562499995e-1 + y * (0.1430488765e-3 + y * (-0.6911147651e-5 +
                     y * (0.7621095161e-6 + y * (-0.934935152e-7))));
    return std::sqrt(0.636619772 / ax) * (std::cos(xx) * p - z * std::sin(xx) * q);
}

double bessel_j1(double x) {
    const double ax = std::fabs(x);
    if (ax < 8.0) {
        const double y = x * x;
        const double p = x * (72362614232.0 + y * (-7895059235.0 + y * (242396853.1 +
                         y * (-2972611.439 + y * (15704.48260 + y * (-30.16036606))))));
        const double q = 144725228442.0 + y * (2300535178.0 + y * (18583304.74 +
                         y * (99447.43394 + y * (376.9991397 + y))));
        return p / q;
    }
    const double z = 8.0 / ax;
    const double y = z * z;
    const double xx = ax - 2.356194491;
    const double p = 1.0 + y * (0.183105e-2 + y * (-0.3516396496e-4 +
                     y * (0.2457520174e-5 + y * (-0.240337019e-6))));
    const double q = 0.04687499995 + y * (-0.2002690873e-3 + y * (0.8449199096e-5 +
                     y * (-0.88228987e-6 + y * 0.105787412e-6)));
    const double v = std::sqrt(0.636619772 / ax) * (std::cos(xx) * p - z * std::sin(xx) * q);
    return x < 0.0 ? -v : v;
}

double bessel_j2(double x) {
    const double ax = std::fabs(x);
    if (ax < 0.5) {
        // sum_k (-1)^k (x/2)^{2k+2} / (k! (k+2)!)
        const double u = 0.25 * x * x;
        return u * (0.5 + u * (-1.0 / 6.0 + u * (1.0 / 48.0 + u * (-1.0 / 720.0 + u / 17280.0))));
    }
    return (2.0 / x) * bessel_j1(x) - bessel_j0(x);
}

}  // namespace ecx
