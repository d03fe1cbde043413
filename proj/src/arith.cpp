#include "axby/arith.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "axby/numtheory.hpp"

namespace axby {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

u64 residue(i64 a, u64 m) {
    return static_cast<u64>(mod_floor(a, static_cast<i64>(m)));
}

u64 cube_mod(u64 y, u64 m) {
    return mulmod(mulmod(y, y, m), y, m);
}

// Sum of counts[j] e(j/m), accumulated in long double.
std::complex<double> roots_of_unity_sum(const std::vector<u64>& counts) {
    const u64 m = counts.size();
    CompensatedSum<long double> re, im;
    for (u64 j = 0; j < m; ++j) {
        if (!counts[j]) continue;
        long double ang = 2 * kPi * static_cast<long double>(j) / static_cast<long double>(m);
        re.add(counts[j] * std::cos(ang));
        im.add(counts[j] * std::sin(ang));
    }
    return {static_cast<double>(re.value()), static_cast<double>(im.value())};
}

std::complex<double> sum_over(const std::vector<std::pair<u64, u64>>& sols, u64 m, i64 h1, i64 h2) {
    std::vector<u64> counts(m, 0);
    const u64 r1 = residue(h1, m), r2 = residue(h2, m);
    for (auto [x, y] : sols) counts[(mulmod(r1, x, m) + mulmod(r2, y, m)) % m]++;
    return roots_of_unity_sum(counts);
}

WeilRow weil_row(i64 a, i64 b, u64 p) {
    WeilRow row;
    row.p = p;
    row.substitution_ok = substitution_matches(a, b, p);
    auto sols = congruence_solutions(a, b, p);
    std::vector<double> c(p), s(p);
    for (u64 j = 0; j < p; ++j) {
        long double ang = 2 * kPi * static_cast<long double>(j) / static_cast<long double>(p);
        c[j] = static_cast<double>(std::cos(ang));
        s[j] = static_cast<double>(std::sin(ang));
    }
    const size_t n = sols.size();
    std::vector<u64> idx(n);
    // |S(-h)| = |S(h)|, so h1 runs over half the residues.
    for (u64 h1 = 0; h1 <= p / 2; ++h1) {
        for (size_t i = 0; i < n; ++i) idx[i] = mulmod(h1, sols[i].first, p);
        for (u64 h2 = 0; h2 < p; ++h2) {
            if (h1 != 0 || h2 != 0) {
                double re = 0, im = 0;
                for (size_t i = 0; i < n; ++i) {
                    re += c[idx[i]];
                    im += s[idx[i]];
                }
                double v = std::hypot(re, im);
                if (v > row.max_abs) {
                    row.max_abs = v;
                    row.h1 = static_cast<i64>(h1);
                    row.h2 = static_cast<i64>(h2);
                }
            }
            for (size_t i = 0; i < n; ++i) {
                idx[i] += sols[i].second;
                if (idx[i] >= p) idx[i] -= p;
            }
        }
    }
    row.ratio = row.max_abs / std::sqrt(static_cast<double>(p));
    return row;
}

}  // namespace

std::vector<std::pair<u64, u64>> congruence_solutions(i64 a, i64 b, u64 m) {
    if (m == 0) throw ValidationError("congruence_solutions: modulus must be positive");
    std::vector<std::vector<u64>> by_square(m);
    const u64 am = residue(a, m), bm = residue(-b, m);
    for (u64 x = 0; x < m; ++x) by_square[mulmod(am, mulmod(x, x, m), m)].push_back(x);
    std::vector<std::pair<u64, u64>> out;
    for (u64 y = 0; y < m; ++y)
        for (u64 x : by_square[mulmod(bm, cube_mod(y, m), m)]) out.emplace_back(x, y);
    std::sort(out.begin(), out.end());
    return out;
}

u64 congruence_count_direct(i64 a, i64 b, u64 d) {
    if (d == 0) throw ValidationError("congruence_count: d >= 1");
    std::vector<u64> cnt(d, 0);
    const u64 am = residue(a, d), bm = residue(-b, d);
    for (u64 x = 0; x < d; ++x) cnt[mulmod(am, mulmod(x, x, d), d)]++;
    u64 total = 0;
    for (u64 y = 0; y < d; ++y) total += cnt[mulmod(bm, cube_mod(y, d), d)];
    return total;
}

u64 congruence_count(i64 a, i64 b, u64 d) {
    if (d == 0) throw ValidationError("congruence_count: d >= 1");
    if (gcd64(a, b) != 1) throw ValidationError("congruence_count: need gcd(a, b) = 1");
    u64 total = 1;
    for (auto [p, k] : factorize(d)) {
        u64 q = 1;
        for (int i = 0; i < k; ++i) q *= p;
        total *= congruence_count_direct(a, b, q);
    }
    return total;
}

std::complex<double> exp_sum_direct(i64 a, i64 b, u64 d, i64 h1, i64 h2) {
    return sum_over(congruence_solutions(a, b, d), d, h1, h2);
}

std::complex<double> exp_sum(i64 a, i64 b, u64 d, i64 h1, i64 h2) {
    if (d == 0) throw ValidationError("exp_sum: d >= 1");
    if (gcd64(a, b) != 1) throw ValidationError("exp_sum: need gcd(a, b) = 1");
    std::complex<double> total{1, 0};
    for (auto [p, k] : factorize(d)) {
        u64 q = 1;
        for (int i = 0; i < k; ++i) q *= p;
        const i64 cof = static_cast<i64>(d / q);
        const i64 inv = inverse_mod(mod_floor(cof, static_cast<i64>(q)), static_cast<i64>(q));
        const i64 t1 = static_cast<i64>(mulmod(residue(h1, q), static_cast<u64>(inv), q));
        const i64 t2 = static_cast<i64>(mulmod(residue(h2, q), static_cast<u64>(inv), q));
        total *= exp_sum_direct(a, b, q, t1, t2);
    }
    return total;
}

std::complex<double> exp_sum_reduced(i64 a, i64 b, u64 p, i64 h1, i64 h2) {
    const i64 P = static_cast<i64>(p);
    if (mod_floor(a, P) == 0 || mod_floor(b, P) == 0) throw ValidationError("exp_sum_reduced: p divides ab");
    const u64 c = residue(-mod_floor(a, P) * inverse_mod(mod_floor(b, P), P), p);
    const u64 r1 = residue(h1, p), r2 = residue(h2, p);
    std::vector<u64> counts(p, 0);
    for (u64 z = 0; z < p; ++z) {
        u64 z2 = mulmod(z, z, p);
        u64 arg = (mulmod(r1, mulmod(z2, z, p), p) + mulmod(r2, z2, p)) % p;
        counts[mulmod(c, arg, p)]++;
    }
    return roots_of_unity_sum(counts);
}

bool substitution_matches(i64 a, i64 b, u64 p) {
    const i64 P = static_cast<i64>(p);
    if (mod_floor(a, P) == 0 || mod_floor(b, P) == 0) return false;
    const u64 c = residue(-mod_floor(a, P) * inverse_mod(mod_floor(b, P), P), p);
    std::vector<std::pair<u64, u64>> param;
    for (u64 z = 0; z < p; ++z) {
        u64 y = mulmod(c, mulmod(z, z, p), p);
        param.emplace_back(mulmod(z, y, p), y);
    }
    std::sort(param.begin(), param.end());
    return param == congruence_solutions(a, b, p);
}

WeilScan weil_scan(i64 a, i64 b, u64 pmax, double constant, int threads) {
    if (gcd64(a, b) != 1) throw ValidationError("weil_scan: need gcd(a, b) = 1");
    std::vector<u64> primes;
    for (u64 p = 2; p <= pmax; ++p)
        if (is_prime(p) && mod_floor(a, static_cast<i64>(p)) != 0 && mod_floor(b, static_cast<i64>(p)) != 0)
            primes.push_back(p);
    WeilScan out;
    out.rows.resize(primes.size());
    threads = std::max(1, threads);
    // Largest primes first, dealt round robin; results land in fixed slots.
    auto work = [&](int tid) {
        for (size_t i = static_cast<size_t>(tid); i < primes.size(); i += static_cast<size_t>(threads)) {
            size_t j = primes.size() - 1 - i;
            out.rows[j] = weil_row(a, b, primes[j]);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : out.rows) {
        out.worst_ratio = std::max(out.worst_ratio, r.ratio);
        if (r.ratio > constant) ++out.violations;
    }
    return out;
}

u64 cubic_congruence_count(u64 c, i64 n1, i64 n2) {
    if (c == 0) throw ValidationError("cubic_congruence_count: c >= 1");
    std::vector<u64> lhs(c, 0), rhs(c, 0);
    const u64 m1 = residue(n1, c), m2 = residue(n2, c);
    for (u64 y = 0; y < c; ++y) {
        u64 cube = cube_mod(y, c);
        lhs[mulmod(m1, cube, c)]++;
        rhs[mulmod(m2, cube, c)]++;
    }
    u64 total = 0;
    for (u64 r = 0; r < c; ++r) total += lhs[r] * rhs[r];
    return total;
}

std::pair<int, i64> heath_brown_check(u64 n, u64 cutoff) {
    if (n == 0) throw ValidationError("heath_brown_check: n >= 1");
    auto fac = factorize(n);
    auto divs = divisors(fac);
    const size_t D = divs.size();
    auto index = [&](u64 e) { return static_cast<size_t>(std::lower_bound(divs.begin(), divs.end(), e) - divs.begin()); };
    std::vector<i64> g(D), g2(D, 0), g3(D, 0), tau(D);
    for (size_t i = 0; i < D; ++i) {
        auto f = factorize(divs[i]);
        g[i] = divs[i] <= cutoff ? mobius(f) : 0;
        tau[i] = static_cast<i64>(divisor_count(f));
    }
    for (size_t i = 0; i < D; ++i) {
        for (size_t j = 0; j < D && divs[j] <= divs[i]; ++j) {
            if (divs[i] % divs[j]) continue;
            size_t k = index(divs[i] / divs[j]);
            g2[i] += g[j] * g[k];
        }
    }
    for (size_t i = 0; i < D; ++i) {
        for (size_t j = 0; j < D && divs[j] <= divs[i]; ++j) {
            if (divs[i] % divs[j]) continue;
            g3[i] += g[j] * g2[index(divs[i] / divs[j])];
        }
    }
    i64 t2 = 0, t3 = 0;
    for (size_t i = 0; i < D; ++i) {
        t2 += g2[i];
        t3 += g3[i] * tau[index(n / divs[i])];
    }
    i64 value = 3 * g[D - 1] - 3 * t2 + t3;
    return {mobius(fac), value};
}

HeathBrownScan heath_brown_scan(u64 X) {
    HeathBrownScan out;
    out.X = X;
    out.cutoff = icbrt(X);
    if (X == 0) return out;
    auto tabs = linear_sieve(static_cast<std::uint32_t>(X));
    const u64 z = out.cutoff;
    std::vector<i64> g(X + 1, 0), g2(X + 1, 0), g3(X + 1, 0), tau(X + 1, 0), t2(X + 1, 0), t3(X + 1, 0);
    for (u64 m = 1; m <= std::min(z, X); ++m) g[m] = tabs.mu[m];
    for (u64 d = 1; d <= X; ++d)
        for (u64 k = d; k <= X; k += d) tau[k]++;
    for (u64 m1 = 1; m1 <= z; ++m1)
        for (u64 m2 = 1; m2 <= z && m1 * m2 <= X; ++m2) g2[m1 * m2] += g[m1] * g[m2];
    for (u64 m = 1; m <= z; ++m) {
        if (!g[m]) continue;
        for (u64 e = 1; m * e <= X; ++e) g3[m * e] += g[m] * g2[e];
    }
    for (u64 e = 1; e <= X; ++e) {
        if (g2[e])
            for (u64 k = e; k <= X; k += e) t2[k] += g2[e];
        if (g3[e])
            for (u64 k = 1; e * k <= X; ++k) t3[e * k] += g3[e] * tau[k];
    }
    for (u64 n = 1; n <= X; ++n) {
        i64 v = 3 * g[n] - 3 * t2[n] + t3[n];
        if (v != tabs.mu[n]) {
            if (!out.mismatches) out.first_mismatch = n;
            ++out.mismatches;
        }
    }
    return out;
}

}  // namespace axby
