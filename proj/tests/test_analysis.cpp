#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "axby/analysis.hpp"

using namespace axby;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Trapezoid rule on the whole support; spectrally accurate for C-infinity bumps.
std::complex<double> ft_trapezoid(const SmoothBump& f, double t, int M) {
    double a = f.lo(), b = f.hi(), h = (b - a) / M;
    long double re = 0, im = 0;
    for (int i = 1; i < M; ++i) {
        double u = a + i * h;
        double v = f(u);
        re += v * std::cos(-2 * kPi * t * u);
        im += v * std::sin(-2 * kPi * t * u);
    }
    return {static_cast<double>(re * h), static_cast<double>(im * h)};
}

// sup |f^(J)| * delta^J by central finite differences.
double derivative_constant(const SmoothBump& f, int J) {
    static const int binom[5][5] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1}};
    long double h = f.ramp_width() / 800.0L;
    long double best = 0;
    for (long double t = f.lo(); t <= f.hi(); t += h / 3) {
        long double acc = 0;
        for (int i = 0; i <= J; ++i) {
            long double x = t + (i - J / 2.0L) * h;
            acc += ((J - i) % 2 ? -1 : 1) * binom[J][i] * f.eval_ld(x);
        }
        best = std::max(best, std::fabs(acc) / std::pow(h, static_cast<long double>(J)));
    }
    return static_cast<double>(best * std::pow(static_cast<long double>(f.delta()), static_cast<long double>(J)));
}

}  // namespace

TEST_CASE("mollifier ramp") {
    CHECK(mollifier_ramp(0) == 0);
    CHECK(mollifier_ramp(1) == 1);
    CHECK(static_cast<double>(mollifier_ramp(0.5L)) == doctest::Approx(0.5).epsilon(1e-15));
    auto m = [](long double t) { return (t <= 0 || t >= 1) ? 0.0L : std::exp(-1.0L / (t * (1 - t))); };
    using GK = boost::math::quadrature::gauss_kronrod<long double, 61>;
    long double Z = GK::integrate(m, 0.0L, 1.0L, 8, 1e-17L);
    CHECK(static_cast<double>(Z) == doctest::Approx(0.0070298584).epsilon(1e-8));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 200; ++i) {
        long double x = U(rng);
        long double ref = GK::integrate(m, 0.0L, x, 8, 1e-17L) / Z;
        REQUIRE(std::fabs(mollifier_ramp(x) - ref) < 1e-15L);
        REQUIRE(std::fabs(mollifier_ramp(x) + mollifier_ramp(1 - x) - 1) < 1e-17L);
    }
}

TEST_CASE("bump basic shape") {
    SmoothBump f(1, 2, 0.1);
    CHECK(f(0.5) == 0);
    CHECK(f(1) == 0);
    CHECK(f(2) == 0);
    CHECK(f(1.5) == 1);
    CHECK_FALSE(f.ramps_overlap());
    CHECK(f.integral() == doctest::Approx(0.8).epsilon(1e-15));
    for (double t = 0.9; t <= 2.1; t += 1e-3) REQUIRE(f(t) >= 0);
    CHECK_THROWS_AS(SmoothBump(1, 2, 0.6), ValidationError);
    CHECK_THROWS_AS(SmoothBump(2, 1, 0.1), ValidationError);
    SmoothBump g(1, 2, 0.5);
    CHECK(g.ramps_overlap());
    CHECK(g.integral() == doctest::Approx(ft_trapezoid(g, 0, 20000).real()).epsilon(1e-12));
}

TEST_CASE("derivative bounds for non-overlapping ramps") {
    for (double delta : {0.05, 0.1, 0.2, 0.25}) {
        SmoothBump f(1, 2, delta);
        for (int J = 1; J <= 4; ++J) {
            double C = derivative_constant(f, J);
            INFO("delta=" << delta << " J=" << J << " C=" << C);
            CHECK(C < 100);
        }
    }
    // Overlapping ramps (single bump): recorded, the fourth constant is larger.
    SmoothBump g(1, 2, 0.5);
    MESSAGE("overlapping delta=0.5: C_4 = " << derivative_constant(g, 4));
}

TEST_CASE("fourier transform") {
    SmoothBump f(1, 2, 0.2);
    auto z = fourier_transform(f, 0);
    CHECK(z.real() == doctest::Approx(f.integral()).epsilon(1e-13));
    CHECK(std::fabs(z.imag()) < 1e-14);
    for (double t : {0.3, 1.0, 2.7, 10.0, 33.3}) {
        auto a = fourier_transform(f, t);
        auto b = fourier_transform(f, -t);
        REQUIRE(std::abs(a - std::conj(b)) < 2e-12);
        auto c = ft_trapezoid(f, t, 40000);
        REQUIRE(std::abs(a - c) < 1e-11);
    }
    SmoothBump g(1, 2, 0.5);
    for (double t : {0.0, 0.7, 4.0}) REQUIRE(std::abs(fourier_transform(g, t) - ft_trapezoid(g, t, 40000)) < 1e-11);
}

TEST_CASE("fourier decay with J = 3") {
    for (double delta : {0.1, 0.3}) {
        SmoothBump f(1, 2, delta);
        double C = 0;
        for (double t = 0.5; t <= 400; t *= 1.3) C = std::max(C, std::abs(fourier_transform(f, t)) * std::pow(1 + delta * t, 3));
        MESSAGE("delta=" << delta << " fitted C_3=" << C);
        CHECK(C < 10);
    }
}

TEST_CASE("truncated Poisson summation") {
    const double eta = 0.5;
    SmoothBump f(1, 2, 0.3);
    i64 H1 = poisson_min_H(f, 1e3, 1, eta);
    auto r1 = poisson_check(f, 1e3, 1, 0, H1);
    CHECK(r1.discrepancy < 1e-8);
    i64 H7 = poisson_min_H(f, 1e3, 7, eta);
    auto r7 = poisson_check(f, 1e3, 7, 3, H7);
    CHECK(r7.discrepancy < 1e-8);
    auto r0 = poisson_check(f, 1e3, 7, 3, 0);
    MESSAGE("H=0 discrepancy " << r0.discrepancy);
    CHECK(r0.discrepancy == doctest::Approx(std::fabs(r0.lhs - 1e3 / 7 * f.integral())).epsilon(1e-12));
    // Small N with a sharp ramp: the dual terms matter.
    SmoothBump g(1, 2, 0.1);
    i64 H = poisson_min_H(g, 20, 7, eta);
    CHECK(H == 16);
    auto full = poisson_check(g, 20, 7, 3, H);
    auto none = poisson_check(g, 20, 7, 3, 0);
    MESSAGE("N=20: H=" << H << " discrepancy " << full.discrepancy << ", H=0 discrepancy " << none.discrepancy);
    CHECK(full.discrepancy < 1e-5 * none.discrepancy);
}
