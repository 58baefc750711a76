#pragma once

namespace ecx {

/// Fast double-precision Bessel J0/J1/J2 (rational approximations, absolute
/// error ~1e-8; plenty for the quadrature tolerances here and much cheaper
/// than std::cyl_bessel_j in the hot tabulation loops).
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_j2(double x);

}  // namespace ecx
