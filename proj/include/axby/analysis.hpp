#pragma once

#include <complex>

#include "axby/common.hpp"

namespace axby {

// Smooth plateau function supported in [lo, hi]. Each edge is a ramp of width
// 2*delta built from the normalized integral of exp(-1/(t(1-t))), so the
// function equals `normalization` on [lo + 2 delta, hi - 2 delta]. When the two
// ramps overlap (4 delta > hi - lo) the product of the ramps is a single bump.
class SmoothBump {
public:
    SmoothBump(double lo, double hi, double delta, double normalization = 1.0);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double delta() const { return delta_; }
    double normalization() const { return norm_; }
    double ramp_width() const { return 2 * delta_; }
    bool ramps_overlap() const { return 4 * delta_ > hi_ - lo_; }

    double operator()(double t) const;
    long double eval_ld(long double t) const;
    // Exact integral when the ramps do not overlap, quadrature otherwise.
    double integral() const;

private:
    double lo_, hi_, delta_, norm_;
};

// S(x) = int_0^x m / int_0^1 m for m(t) = exp(-1/(t(1-t))); 0 for x <= 0, 1 for x >= 1.
long double mollifier_ramp(long double x);

// f^(t) = int f(u) e(-t u) du; absolute error below tol or QuadratureNonConvergence.
std::complex<double> fourier_transform(const SmoothBump& f, double t, double tol = 1e-12);

struct PoissonResult {
    double lhs = 0;
    double rhs = 0;
    double discrepancy = 0;
    i64 H = 0;
};

PoissonResult poisson_check(const SmoothBump& f, double N, u64 q, i64 a, i64 H);
// Smallest H with H >= N^eta delta^{-1} q / N.
i64 poisson_min_H(const SmoothBump& f, double N, u64 q, double eta);

}  // namespace axby
