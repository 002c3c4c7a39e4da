#pragma once

namespace qsdr {

// Standard normal density.
double normal_pdf(double x);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Inverse standard normal CDF. Rational approximation (Acklam) polished by
// one Newton step; |Phi(result) - tau| < 1e-9 on (0,1).
double normal_inv_cdf(double tau);

}  // namespace qsdr
