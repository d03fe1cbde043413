#pragma once

#include <vector>

#include "axby/common.hpp"

namespace axby {

inline constexpr double kExpMinusGamma = 0.56145948356688516982;

// omega(u) on [1, u_max]: exact 1/u on [1, 2], then trapezoid steps on u*omega(u)
// with a Richardson combination of steps h and h/2. Cubic interpolation inside
// each unit panel; e^{-gamma} beyond u_max; 0 below 1.
class BuchstabTable {
public:
    explicit BuchstabTable(double u_max = 20.0, double step = 1e-4);

    double operator()(double u) const;
    double u_max() const { return u_max_; }
    double step() const { return h_; }
    const std::vector<double>& values() const { return values_; }
    // max |(u w(u))' - w(u - 1)| over grid points in [lo, hi], five-point derivative.
    double dde_residual(double lo, double hi) const;
    // max |w_h - w_{h/2}| before extrapolation; a bound on the table error.
    double richardson_gap() const { return gap_; }

private:
    double u_max_;
    double h_;
    std::vector<double> values_;
    double gap_ = 0;
};

const BuchstabTable& default_buchstab_table();
double omega(double u);

struct IntegralResult {
    double value = 0;
    double error = 0;          // quadrature error estimate
    double excluded_mass = 0;  // mass removed by omega(u) = 0 for u < 1 (second integral only)
    int resolution = 0;
    bool convention_below_one = true;
};

// apply_exclusion = false drops the conditions involving I(eps).
IntegralResult d4(double eps, int resolution = 4, bool apply_exclusion = true);
IntegralResult d6(double eps, int resolution = 4, bool apply_exclusion = true);

struct LowerBound {
    IntegralResult d4;
    IntegralResult d6;
    double value = 0;
    double error = 0;
};
LowerBound lower_bound_constant(double eps, int resolution = 4);

}  // namespace axby
