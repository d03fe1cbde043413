#include "axby/analysis.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "axby/numtheory.hpp"

namespace axby {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

long double mollifier(long double t) {
    if (t <= 0 || t >= 1) return 0;
    return std::exp(-1.0L / (t * (1 - t)));
}

class RampTable {
public:
    static const RampTable& get() {
        static const RampTable table;
        return table;
    }

    long double eval(long double x) const {
        if (x <= 0) return 0;
        if (x >= 1) return 1;
        // Symmetry S(x) = 1 - S(1 - x) keeps the small side accurate.
        if (x > 0.5L) return 1 - eval(1 - x);
        size_t i = static_cast<size_t>(x * kCells);
        if (i >= kCells) i = kCells - 1;
        long double x0 = static_cast<long double>(i) / kCells;
        long double part = x > x0 ? Rule::integrate(mollifier, x0, x) : 0;
        return (cum_[i] + part) / total_;
    }

private:
    static constexpr size_t kCells = 2048;
    using Rule = boost::math::quadrature::gauss<long double, 20>;

    RampTable() : cum_(kCells + 1, 0) {
        for (size_t i = 0; i < kCells; ++i) {
            long double a = static_cast<long double>(i) / kCells;
            long double b = static_cast<long double>(i + 1) / kCells;
            cum_[i + 1] = cum_[i] + Rule::integrate(mollifier, a, b);
        }
        total_ = cum_[kCells];
    }

    std::vector<long double> cum_;
    long double total_;
};

using Panel = boost::math::quadrature::gauss<long double, 30>;

template <class G>
std::complex<long double> composite(const G& g, long double w, long double a, long double b, int panels) {
    long double h = (b - a) / panels;
    std::complex<long double> acc{0, 0};
    for (int i = 0; i < panels; ++i) {
        long double x0 = a + i * h;
        long double re = Panel::integrate([&](long double u) { return g(u) * std::cos(w * u); }, x0, x0 + h);
        long double im = Panel::integrate([&](long double u) { return g(u) * std::sin(w * u); }, x0, x0 + h);
        acc += std::complex<long double>(re, im);
    }
    return acc;
}

// int_a^b g(u) e(-t u) du by composite Gauss-Legendre; the error estimate is the
// change under panel doubling.
template <class G>
std::complex<double> oscillatory(const G& g, double t, double a, double b, double tol) {
    if (b <= a) return {0, 0};
    const long double w = -2 * kPi * t;
    int panels = 2 + static_cast<int>(std::ceil(std::fabs(t) * (b - a)));
    std::complex<long double> prev = composite(g, w, a, b, panels);
    for (int round = 0; round < 6; ++round) {
        panels *= 2;
        std::complex<long double> cur = composite(g, w, a, b, panels);
        if (std::abs(cur - prev) <= tol) return {static_cast<double>(cur.real()), static_cast<double>(cur.imag())};
        prev = cur;
    }
    throw QuadratureNonConvergence("fourier_transform: error estimate above tolerance at t=" + std::to_string(t));
}

}  // namespace

long double mollifier_ramp(long double x) {
    return RampTable::get().eval(x);
}

SmoothBump::SmoothBump(double lo, double hi, double delta, double normalization)
    : lo_(lo), hi_(hi), delta_(delta), norm_(normalization) {
    if (!(hi > lo)) throw ValidationError("SmoothBump: need lo < hi");
    if (!(delta > 0) || 2 * delta > hi - lo) throw ValidationError("SmoothBump: need 0 < 2 delta <= hi - lo");
}

long double SmoothBump::eval_ld(long double t) const {
    if (t <= lo_ || t >= hi_) return 0;
    long double w = 2.0L * delta_;
    long double up = mollifier_ramp((t - lo_) / w);
    long double down = mollifier_ramp((hi_ - t) / w);
    return norm_ * up * down;
}

double SmoothBump::operator()(double t) const {
    return static_cast<double>(eval_ld(t));
}

double SmoothBump::integral() const {
    if (!ramps_overlap()) return norm_ * (hi_ - lo_ - 2 * delta_);
    return fourier_transform(*this, 0.0).real();
}

std::complex<double> fourier_transform(const SmoothBump& f, double t, double tol) {
    const double lo = f.lo(), hi = f.hi(), w = f.ramp_width();
    auto g = [&](long double u) { return f.eval_ld(u); };
    // Each piece gets a share of the tolerance.
    const double piece_tol = tol / 3;
    if (f.ramps_overlap()) return oscillatory(g, t, lo, hi, piece_tol);
    std::complex<double> total = oscillatory(g, t, lo, lo + w, piece_tol);
    total += oscillatory(g, t, hi - w, hi, piece_tol);
    // Plateau analytically.
    const double x0 = lo + w, x1 = hi - w;
    if (x1 > x0) {
        if (t == 0) {
            total += f.normalization() * (x1 - x0);
        } else {
            long double c = -2 * kPi * t;
            std::complex<long double> e1(std::cos(c * x1), std::sin(c * x1));
            std::complex<long double> e0(std::cos(c * x0), std::sin(c * x0));
            std::complex<long double> val = (e1 - e0) / std::complex<long double>(0, c);
            total += std::complex<double>(static_cast<double>(val.real() * f.normalization()),
                                          static_cast<double>(val.imag() * f.normalization()));
        }
    }
    return total;
}

i64 poisson_min_H(const SmoothBump& f, double N, u64 q, double eta) {
    double bound = std::pow(N, eta) / f.delta() * static_cast<double>(q) / N;
    return static_cast<i64>(std::ceil(bound));
}

PoissonResult poisson_check(const SmoothBump& f, double N, u64 q, i64 a, i64 H) {
    if (q == 0) throw ValidationError("poisson_check: q >= 1");
    if (H < 0) throw ValidationError("poisson_check: H >= 0");
    PoissonResult out;
    out.H = H;
    const i64 qq = static_cast<i64>(q);
    CompensatedSum<long double> lhs;
    i64 n0 = static_cast<i64>(std::floor(N * f.lo()));
    i64 n1 = static_cast<i64>(std::ceil(N * f.hi()));
    i64 start = n0 + mod_floor(a - n0, qq);
    for (i64 n = start; n <= n1; n += qq) lhs.add(f.eval_ld(static_cast<long double>(n) / N));
    const double scale = N / static_cast<double>(q);
    CompensatedSum<long double> rhs;
    rhs.add(scale * f.integral());
    for (i64 h = 1; h <= H; ++h) {
        std::complex<double> ft = fourier_transform(f, static_cast<double>(h) * scale);
        long double ang = 2 * kPi * static_cast<long double>(mod_floor(a * h, qq)) / qq;
        std::complex<long double> e(std::cos(ang), std::sin(ang));
        // h and -h together: 2 Re(f^(hN/q) e(ah/q))
        long double term = 2 * (ft.real() * e.real() - ft.imag() * e.imag());
        rhs.add(scale * term);
    }
    out.lhs = static_cast<double>(lhs.value());
    out.rhs = static_cast<double>(rhs.value());
    out.discrepancy = static_cast<double>(std::fabs(lhs.value() - rhs.value()));
    return out;
}

}  // namespace axby
