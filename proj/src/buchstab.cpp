#include "axby/buchstab.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace axby {

namespace {

std::vector<double> integrate_dde(double u_max, double h, long per) {
    const long n = std::lround((u_max - 1) / h);
    std::vector<double> w(static_cast<size_t>(n + 1));
    for (long i = 0; i <= std::min(n, per); ++i) w[i] = 1.0 / (1.0 + i * h);
    long double y = 2.0L * w[per];
    for (long i = per + 1; i <= n; ++i) {
        y += 0.5L * h * (static_cast<long double>(w[i - 1 - per]) + w[i - per]);
        w[i] = static_cast<double>(y / (1.0L + i * static_cast<long double>(h)));
    }
    return w;
}

}  // namespace

BuchstabTable::BuchstabTable(double u_max, double step) : u_max_(u_max), h_(step) {
    const long per = std::lround(1.0 / step);
    if (per < 8 || std::fabs(per * step - 1.0) > 1e-12) throw ValidationError("BuchstabTable: step must divide 1");
    if (u_max < 2) throw ValidationError("BuchstabTable: u_max >= 2");
    auto coarse = integrate_dde(u_max, step, per);
    auto fine = integrate_dde(u_max, step / 2, 2 * per);
    values_.resize(coarse.size());
    for (size_t i = 0; i < coarse.size(); ++i) {
        gap_ = std::max(gap_, std::fabs(fine[2 * i] - coarse[i]));
        values_[i] = (4 * fine[2 * i] - coarse[i]) / 3;
    }
}

double BuchstabTable::operator()(double u) const {
    if (u < 1) return 0;
    if (u <= 2) return 1.0 / u;
    if (u >= u_max_) return kExpMinusGamma;
    const long per = std::lround(1.0 / h_);
    const long last = static_cast<long>(values_.size()) - 1;
    // Stay inside the unit panel: omega has kinks at the integers.
    const double panel = std::floor(u);
    const long lo = static_cast<long>(std::lround((panel - 1) * per));
    const long hi = std::min(last, lo + per);
    long i = static_cast<long>(std::floor((u - 1) / h_)) - 1;
    i = std::clamp(i, lo, hi - 3);
    double x = (u - 1) / h_ - static_cast<double>(i);
    const double* y = &values_[static_cast<size_t>(i)];
    // Lagrange cubic through nodes 0..3.
    double l0 = -(x - 1) * (x - 2) * (x - 3) / 6;
    double l1 = x * (x - 2) * (x - 3) / 2;
    double l2 = -x * (x - 1) * (x - 3) / 2;
    double l3 = x * (x - 1) * (x - 2) / 6;
    return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
}

double BuchstabTable::dde_residual(double lo, double hi) const {
    const double k = 1e-3;
    auto Y = [&](double t) { return t * (*this)(t); };
    double worst = 0;
    const long stride = 7;
    for (long i = 0; i < static_cast<long>(values_.size()); i += stride) {
        double u = 1 + i * h_;
        if (u < std::max(lo, 2.0) || u > std::min(hi, u_max_ - 2 * k)) continue;
        // The stencil must not straddle an integer.
        if (std::floor(u - 2 * k) != std::floor(u + 2 * k)) continue;
        double d = (-Y(u + 2 * k) + 8 * Y(u + k) - 8 * Y(u - k) + Y(u - 2 * k)) / (12 * k);
        worst = std::max(worst, std::fabs(d - (*this)(u - 1)));
    }
    return worst;
}

const BuchstabTable& default_buchstab_table() {
    static const BuchstabTable table;
    return table;
}

double omega(double u) {
    return default_buchstab_table()(u);
}

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

// c + s * alpha2
struct Linear {
    double c, s;
    double at(double x) const { return c + s * x; }
};

struct Quad {
    double value = 0;
    double error = 0;
    double abs_value = 0;
};

// Composite one-shot Kronrod on `cells` equal cells of [a, b].
template <class F>
Quad composite(const F& f, double a, double b, int cells) {
    Quad q;
    if (!(b > a)) return q;
    double w = (b - a) / cells;
    for (int i = 0; i < cells; ++i) {
        double err = 0, l1 = 0;
        double x0 = a + i * w, x1 = (i + 1 == cells) ? b : x0 + w;
        q.value += Rule::integrate(f, x0, x1, 0, 0, &err, &l1);
        q.error += err;
        q.abs_value += l1;
    }
    return q;
}

// Integrate f over [a, b] split at every breakpoint inside; keep(mid) selects pieces.
template <class F, class K>
Quad piecewise(const F& f, const K& keep, double a, double b, std::vector<double> cuts, int cells) {
    Quad total;
    if (!(b > a)) return total;
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double x0 = std::max(a, cuts[i]), x1 = std::min(b, cuts[i + 1]);
        if (!(x1 - x0 > 1e-15)) continue;
        if (!keep(0.5 * (x0 + x1))) continue;
        Quad q = composite(f, x0, x1, cells);
        total.value += q.value;
        total.error += q.error;
        total.abs_value += q.abs_value;
    }
    return total;
}

bool in_interval(double x, double lo, double hi) {
    return x >= lo && x <= hi;
}

// Breakpoints of the inner variable as linear functions of alpha2, plus the outer
// kinks where any two coincide.
std::vector<double> outer_cuts(const std::vector<Linear>& inner, const std::vector<double>& fixed, double lo, double hi) {
    std::vector<double> cuts = fixed;
    for (size_t i = 0; i < inner.size(); ++i)
        for (size_t j = i + 1; j < inner.size(); ++j) {
            double ds = inner[i].s - inner[j].s;
            if (ds == 0) continue;
            double x = (inner[j].c - inner[i].c) / ds;
            if (x > lo && x < hi) cuts.push_back(x);
        }
    return cuts;
}

std::vector<double> eval_all(const std::vector<Linear>& ls, double x) {
    std::vector<double> out;
    out.reserve(ls.size());
    for (auto& l : ls) out.push_back(l.at(x));
    return out;
}

void check_eps(double eps) {
    if (!(eps > 0 && eps < 0.25)) throw ValidationError("need 0 < eps < 1/4");
}

constexpr int kMaxKink = 40;

}  // namespace

IntegralResult d4(double eps, int resolution, bool apply_exclusion) {
    check_eps(eps);
    if (resolution < 1) throw ValidationError("resolution >= 1");
    const auto& W = default_buchstab_table();
    const double I0 = 1.0 / 6, I1 = 1.0 / 3 - 2 * eps / 3;
    const double lo2 = 1.0 / 6 - 2 * eps / 3, hi = 1.0 / 3;
    auto outside = [&](double x) { return !apply_exclusion || !in_interval(x, I0, I1); };

    // Inner alpha1 in (alpha2, 1/3).
    std::vector<Linear> lines = {{0, 1}, {hi, 0}, {I0, 0}, {I1, 0}, {I0, -1}, {I1, -1}};
    for (int k = 1; k <= kMaxKink; ++k) lines.push_back({1, -(k + 1.0)});
    double inner_err_max = 0;
    auto inner = [&](double a2) {
        auto f = [&](double a1) { return W((1 - a1 - a2) / a2) / (a1 * a2 * a2); };
        auto keep = [&](double a1) { return outside(a1) && outside(a1 + a2); };
        auto cuts = eval_all(lines, a2);
        Quad q = piecewise(f, keep, a2, hi, cuts, resolution);
        inner_err_max = std::max(inner_err_max, q.error);
        return q.value;
    };
    auto cuts = outer_cuts(lines, {I0, I1}, lo2, hi);
    Quad outer = piecewise(inner, outside, lo2, hi, cuts, resolution);
    IntegralResult r;
    r.value = outer.value;
    r.error = outer.error + inner_err_max * (hi - lo2) + W.richardson_gap() * outer.abs_value;
    r.resolution = resolution;
    return r;
}

IntegralResult d6(double eps, int resolution, bool apply_exclusion) {
    check_eps(eps);
    if (resolution < 1) throw ValidationError("resolution >= 1");
    const auto& W = default_buchstab_table();
    const double I0 = 1.0 / 6, I1 = 1.0 / 3 - 2 * eps / 3;
    const double lo2 = 1.0 / 6 - 2 * eps / 3, hi2 = 1.0 / 3;
    const double lo1 = 1.0 / 3, hi1 = 0.5;
    auto outside = [&](double x) { return !apply_exclusion || !in_interval(x, I0, I1); };

    std::vector<Linear> lines = {{lo1, 0}, {hi1, 0}};
    for (int k = 0; k <= kMaxKink; ++k) lines.push_back({1, -(k + 1.0)});
    for (int k = 1; k <= kMaxKink; ++k) lines.push_back({0, static_cast<double>(k)});
    double inner_err_max = 0;
    auto inner_excluded = [&](double a2) {
        // Part of (1/3, 1/2) where (1 - a1 - a2)/a2 < 1, i.e. a1 > 1 - 2 a2.
        auto g = [&](double a1) { return W(a1 / a2) / (a2 * a2 * a2); };
        auto cuts = eval_all(lines, a2);
        return piecewise(g, [](double) { return true; }, std::max(lo1, 1 - 2 * a2), hi1, cuts, resolution).value;
    };
    auto inner = [&](double a2) {
        auto f = [&](double a1) { return W((1 - a1 - a2) / a2) * W(a1 / a2) / (a2 * a2 * a2); };
        auto cuts = eval_all(lines, a2);
        Quad q = piecewise(f, [](double) { return true; }, lo1, hi1, cuts, resolution);
        inner_err_max = std::max(inner_err_max, q.error);
        return q.value;
    };
    auto cuts = outer_cuts(lines, {I0, I1}, lo2, hi2);
    Quad outer = piecewise(inner, outside, lo2, hi2, cuts, resolution);
    Quad lost = piecewise(inner_excluded, outside, lo2, hi2, cuts, resolution);
    IntegralResult r;
    r.value = outer.value;
    r.error = outer.error + inner_err_max * (hi2 - lo2) + W.richardson_gap() * outer.abs_value;
    r.excluded_mass = lost.value;
    r.resolution = resolution;
    return r;
}

LowerBound lower_bound_constant(double eps, int resolution) {
    LowerBound out;
    out.d4 = d4(eps, resolution);
    out.d6 = d6(eps, resolution);
    out.value = 1 - out.d4.value - out.d6.value;
    out.error = out.d4.error + out.d6.error;
    return out;
}

}  // namespace axby
