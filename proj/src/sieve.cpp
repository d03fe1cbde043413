#include "axby/sieve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>

#include "axby/arith.hpp"
#include "axby/hecke.hpp"
#include "axby/numtheory.hpp"
#include "axby/parallel.hpp"
#include "axby/quadfield.hpp"

namespace axby {

namespace {

constexpr u64 kStrip = 128;

bool squarefree(u64 n) {
    for (auto pk : factorize(n))
        if (pk.k > 1) return false;
    return true;
}

template <class Weight>
CountReport run_weighted(const RepConfig& cfg, int threads, const std::string& name, double normalizer, Weight weight) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    auto [x0, x1] = cfg.x_range();
    auto [y0, y1] = cfg.y_range();
    CountReport rep;
    rep.weight = name;
    rep.normalizer = normalizer;
    if (x1 < x0 || y1 < y0) {
        rep.runtime = 0;
        return rep;
    }
    rep.terms = (x1 - x0 + 1) * (y1 - y0 + 1);
    const bool smooth = cfg.mode == CutoffMode::Smooth;
    std::vector<double> wy(y1 - y0 + 1, 1.0);
    std::vector<u64> by3(y1 - y0 + 1);
    for (u64 y = y0; y <= y1; ++y) {
        by3[y - y0] = static_cast<u64>(cfg.b) * y * y * y;
        if (smooth) wy[y - y0] = (*cfg.f2)(static_cast<double>(y) / cfg.B);
    }
    const u64 strips = (x1 - x0) / kStrip + 1;
    std::vector<long double> partial(strips, 0);
    parallel_for(strips, threads, [&](size_t s) {
        CompensatedSum<long double> acc;
        const u64 lo = x0 + s * kStrip, hi = std::min(x1, lo + kStrip - 1);
        for (u64 x = lo; x <= hi; ++x) {
            const double wx = smooth ? (*cfg.f1)(static_cast<double>(x) / cfg.A) : 1.0;
            if (wx == 0) continue;
            const u64 ax2 = static_cast<u64>(cfg.a) * x * x;
            for (size_t j = 0; j < by3.size(); ++j) {
                if (wy[j] == 0) continue;
                double v = weight(ax2 + by3[j]);
                if (v != 0) acc.add(static_cast<long double>(wx) * wy[j] * v);
            }
        }
        partial[s] = acc.value();
    });
    CompensatedSum<long double> total;
    for (long double p : partial) total.add(p);
    rep.weighted_sum = static_cast<double>(total.value());
    rep.ratio = rep.weighted_sum / normalizer;
    rep.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

double default_normalizer(const RepConfig& cfg) {
    if (cfg.mode == CutoffMode::Sharp) return std::pow(cfg.X, 5.0 / 6.0);
    return cfg.A * cfg.B * cfg.f1->integral() * cfg.f2->integral();
}

std::shared_ptr<const RealQuadraticField> cached_field(i64 D) {
    static std::mutex m;
    static std::map<i64, std::shared_ptr<const RealQuadraticField>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(D);
    if (it != cache.end()) return it->second;
    auto F = RealQuadraticField::make(D);
    cache.emplace(D, F);
    return F;
}

}  // namespace

RepConfig RepConfig::sharp(i64 a, i64 b, double X) {
    RepConfig c;
    c.a = a;
    c.b = b;
    c.X = X;
    c.mode = CutoffMode::Sharp;
    if (std::isfinite(X) && X >= 1 && X <= 1e18) {
        u64 n = static_cast<u64>(std::floor(X));
        c.A = static_cast<double>(isqrt(n));
        c.B = static_cast<double>(icbrt(n));
    }
    return c;
}

RepConfig RepConfig::smooth(i64 a, i64 b, double X, SmoothBump f1, SmoothBump f2) {
    RepConfig c;
    c.a = a;
    c.b = b;
    c.X = X;
    c.mode = CutoffMode::Smooth;
    c.A = std::sqrt(X);
    c.B = std::cbrt(X);
    c.f1 = f1;
    c.f2 = f2;
    return c;
}

void RepConfig::validate() const {
    if (a < 1 || b < 1 || gcd64(a, b) != 1) throw ValidationError("need coprime a, b >= 1");
    if (!std::isfinite(X) || X < 1) throw ValidationError("need X >= 1");
    if (X > max_X) throw BudgetExceeded("X above the configured budget");
    if (mode == CutoffMode::Smooth && (!f1 || !f2)) throw ValidationError("smooth mode needs two bumps");
    auto [x0, x1] = x_range();
    auto [y0, y1] = y_range();
    (void)x0;
    (void)y0;
    u128 top = static_cast<u128>(a) * x1 * x1 + static_cast<u128>(b) * y1 * y1 * y1;
    if (top >= (static_cast<u128>(1) << 63)) throw BudgetExceeded("a x^2 + b y^3 leaves 63 bits");
}

std::pair<u64, u64> RepConfig::x_range() const {
    if (mode == CutoffMode::Sharp) return {1, static_cast<u64>(A)};
    u64 lo = static_cast<u64>(std::max(1.0, std::floor(A * f1->lo()) + 1));
    u64 hi = static_cast<u64>(std::max(0.0, std::ceil(A * f1->hi()) - 1));
    return {lo, hi};
}

std::pair<u64, u64> RepConfig::y_range() const {
    if (mode == CutoffMode::Sharp) return {1, static_cast<u64>(B)};
    u64 lo = static_cast<u64>(std::max(1.0, std::floor(B * f2->lo()) + 1));
    u64 hi = static_cast<u64>(std::max(0.0, std::ceil(B * f2->hi()) - 1));
    return {lo, hi};
}

CountReport lambda_weighted_sum(const RepConfig& cfg, int threads) {
    return run_weighted(cfg, threads, "lambda", default_normalizer(cfg), [](u64 n) { return von_mangoldt(n); });
}

CountReport mobius_weighted_sum(const RepConfig& cfg, int threads) {
    return run_weighted(cfg, threads, "mobius", default_normalizer(cfg),
                        [](u64 n) { return static_cast<double>(mobius(factorize(n))); });
}

CountReport almost_prime_sum(const RepConfig& cfg, int k, int threads) {
    if (k < 2) throw ValidationError("almost_prime_sum: k >= 2");
    double norm = default_normalizer(cfg) * std::pow(std::log(cfg.X), k - 1);
    return run_weighted(cfg, threads, "k-fold:" + std::to_string(k), norm, [k](u64 n) { return lambda_kfold(n, k); });
}

double lambda_kfold(u64 n, int k) {
    if (k < 1) throw ValidationError("lambda_kfold: k >= 1");
    if (n < 2) return 0;
    auto fac = factorize(n);
    int omega_total = 0;
    for (auto pk : fac) omega_total += pk.k;
    if (omega_total < k) return 0;
    if (k == 1) return fac.size() == 1 ? std::log(static_cast<double>(fac[0].p)) : 0.0;
    auto divs = divisors(fac);
    auto index = [&](u64 e) { return static_cast<size_t>(std::lower_bound(divs.begin(), divs.end(), e) - divs.begin()); };
    std::vector<double> cur(divs.size(), 0), next(divs.size(), 0);
    for (size_t i = 0; i < divs.size(); ++i) {
        auto pp = prime_power_of(divs[i]);
        cur[i] = pp ? std::log(static_cast<double>(pp->p)) : 0.0;
    }
    for (int j = 2; j <= k; ++j) {
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t i = 0; i < divs.size(); ++i) {
            const u64 e = divs[i];
            for (auto pk : fac) {
                u64 q = 1;
                for (int t = 1; t <= pk.k; ++t) {
                    q *= pk.p;
                    if (e % q) break;
                    next[i] += std::log(static_cast<double>(pk.p)) * cur[index(e / q)];
                }
            }
        }
        std::swap(cur, next);
    }
    return cur.back();
}

TypeOneResult type_one_check(const RepConfig& cfg, u64 d) {
    cfg.validate();
    if (cfg.mode != CutoffMode::Sharp) throw ValidationError("type_one_check uses sharp boxes");
    if (d == 0 || !squarefree(d)) throw ValidationError("type_one_check: d squarefree");
    if (static_cast<double>(d) > std::pow(cfg.X, 5.0 / 9.0) + 1e-9) throw ValidationError("type_one_check: d <= X^{5/9}");
    const u64 A = static_cast<u64>(cfg.A), B = static_cast<u64>(cfg.B);
    auto residues = [d](u64 r, u64 top) -> u64 {
        u64 first = r == 0 ? d : r;
        return top >= first ? (top - first) / d + 1 : 0;
    };
    TypeOneResult out;
    out.d = d;
    for (auto [x, y] : congruence_solutions(cfg.a, cfg.b, d)) out.count += residues(x, A) * residues(y, B);
    out.expected = static_cast<double>(A) * static_cast<double>(B) * static_cast<double>(congruence_count(cfg.a, cfg.b, d)) /
                   (static_cast<double>(d) * static_cast<double>(d));
    out.relative_error = std::fabs(static_cast<double>(out.count) / out.expected - 1);
    return out;
}

std::vector<TypeOneResult> type_one_scan(const RepConfig& cfg, u64 dmax, int threads) {
    std::vector<u64> ds;
    for (u64 d = 1; d <= dmax; ++d)
        if (squarefree(d) && static_cast<double>(d) <= std::pow(cfg.X, 5.0 / 9.0)) ds.push_back(d);
    std::vector<TypeOneResult> out(ds.size());
    parallel_for(ds.size(), threads, [&](size_t i) { out[i] = type_one_check(cfg, ds[i]); });
    return out;
}

u64 q_count(i64 n1, i64 n2, i64 k, u64 A_box) {
    return q_count_range(n1, n2, k, A_box, 2 * A_box);
}

u64 q_count_range(i64 n1, i64 n2, i64 k, u64 lo, u64 hi) {
    if (n1 < 1 || n2 < 1) throw ValidationError("q_count: n1, n2 >= 1");
    u64 count = 0;
    for (u64 x1 = lo + 1; x1 <= hi; ++x1) {
        i128 t = static_cast<i128>(n2) * x1 * x1 - k;
        if (t <= 0 || t % n1) continue;
        u64 s = static_cast<u64>(t / n1);
        u64 r = isqrt(s);
        if (r * r == s && r > lo && r <= hi) ++count;
    }
    return count;
}

RepCorrespondence rep_correspondence_check(i64 n1, i64 n2, i64 m, i64 box) {
    if (n1 < 1 || n2 < 1 || n1 % 2 == 0 || n2 % 2 == 0 || gcd64(n1, n2) != 1 || !squarefree(static_cast<u64>(n1)) ||
        !squarefree(static_cast<u64>(n2)))
        throw ValidationError("rep_correspondence_check: n1, n2 odd squarefree coprime");
    if (n1 * n2 == 1) throw ValidationError("rep_correspondence_check: n1 n2 = 1 gives no real quadratic field");
    if (m < 1 || box < 0) throw ValidationError("rep_correspondence_check: m >= 1, box >= 0");
    RepCorrespondence out;

    for (i64 x2 = -box; x2 <= box; ++x2) {
        for (int s : {1, -1}) {
            i128 t = static_cast<i128>(s) * m + static_cast<i128>(n1) * x2 * x2;
            if (t < 0 || t % n2) continue;
            u64 q = static_cast<u64>(t / n2);
            u64 r = isqrt(q);
            if (r * r != q || static_cast<i64>(r) > box) continue;
            i128 X = 2 * static_cast<i128>(n2) * r;
            if ((X * X - 4 * static_cast<i128>(n1) * n2 * x2 * x2) % (4 * n2) != 0) out.divisibility_ok = false;
            out.direct_count += r == 0 ? 1 : 2;
        }
    }

    const i64 D0 = n1 * n2;
    const i64 D = field_discriminant_of(D0);
    out.field_disc = D;
    auto F = cached_field(D);
    const BigQuadElement eps = F->unit().epsilon;
    BigQuadElement eps_inv = eps.conjugate();
    if (F->unit().norm_sign < 0) eps_inv = {-eps_inv.u, -eps_inv.v, D};
    const long double R = F->regulator();
    const long double log_bound = std::log(static_cast<long double>(2 * n2 * box) + 2.0L * box * std::sqrt(static_cast<long double>(D0)) + 1) + 1;
    const BigInt four_v = D == D0 ? 4 : 2;

    auto count_element = [&](const BigQuadElement& z) -> u64 {
        if (z.u % 2 != 0 || z.v % four_v != 0) return 0;
        BigInt X = z.u / 2, Y = z.v / four_v;
        if (X % (2 * n2) != 0) return 0;
        BigInt x1 = X / (2 * n2);
        if (abs(x1) > box || abs(Y) > box) return 0;
        return 2;  // z and -z
    };

    for (const auto& I : ideals_of_norm(D, static_cast<u64>(4 * n2 * m))) {
        auto g = F->principal_generator(I);
        if (!g) continue;
        long double alpha = 0.5L * (g->log_abs() - g->log_abs_conjugate());
        long double shift = std::floor(alpha / R);
        BigQuadElement z = *g;
        // Fundamental-domain representative: alpha(z) in [0, R).
        for (long double j = 0; j < shift; ++j) z = z * eps_inv;
        for (long double j = 0; j > shift; --j) z = z * eps;
        BigQuadElement up = z;
        while (up.log_abs() <= log_bound) {
            out.ideal_count += count_element(up);
            up = up * eps;
        }
        BigQuadElement down = z * eps_inv;
        while (down.log_abs_conjugate() <= log_bound) {
            out.ideal_count += count_element(down);
            down = down * eps_inv;
        }
    }
    return out;
}

}  // namespace axby
