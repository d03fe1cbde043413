#include "axby/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace axby {

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 icbrt(u64 n) {
    u64 r = static_cast<u64>(std::cbrt(static_cast<long double>(n)));
    auto cube = [](u64 x) { return static_cast<u128>(x) * x * x; };
    while (r > 0 && cube(r) > n) --r;
    while (cube(r + 1) <= n) ++r;
    return r;
}

std::optional<u64> exact_root(u64 n, int k) {
    if (k == 1) return n;
    if (k == 2) {
        u64 r = isqrt(n);
        if (r * r == n) return r;
        return std::nullopt;
    }
    long double guess = std::pow(static_cast<long double>(n), 1.0L / k);
    u64 base = static_cast<u64>(std::llround(guess));
    for (u64 r = base > 0 ? base - 1 : 0; r <= base + 1; ++r) {
        u128 acc = 1;
        bool over = false;
        for (int i = 0; i < k; ++i) {
            acc *= r;
            if (acc > n) {
                over = true;
                break;
            }
        }
        if (!over && acc == n) return r;
    }
    return std::nullopt;
}

i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i64 mod_floor(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 gcd64(i64 a, i64 b) {
    return std::gcd(a, b);
}

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
    i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i64 q = old_r / r;
        i64 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    x = old_s;
    y = old_t;
    return old_r;
}

i64 inverse_mod(i64 a, i64 m) {
    if (m == 1) return 0;
    i64 x, y;
    i64 g = ext_gcd(mod_floor(a, m), m, x, y);
    if (g != 1) throw ValidationError("inverse_mod: not invertible");
    return mod_floor(x, m);
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    if (n < 41 * 41) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Smallest deterministic base prefix for the size of n.
    int bases = 12;
    if (n < 3215031751ULL)
        bases = 4;
    else if (n < 3474749660383ULL)
        bases = 6;
    else if (n < 341550071728321ULL)
        bases = 7;
    else if (n < 3825123056546413051ULL)
        bases = 9;
    for (int bi = 0; bi < bases; ++bi) {
        u64 a = small[bi];
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace {

u64 pollard_brent(u64 n, u64 c, u64 y0) {
    auto f = [&](u64 x) { return static_cast<u64>((static_cast<u128>(x) * x + c) % n); };
    u64 y = y0, x = y0, q = 1, g = 1, ys = y0;
    u64 r = 1;
    const u64 m = 128;
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        while (k < r && g == 1) {
            ys = y;
            for (u64 i = 0; i < std::min(m, r - k); ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
            k += m;
        }
        r <<= 1;
        if (r > (u64{1} << 26)) return n;
    }
    if (g == n) {
        do {
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

void split(u64 n, std::map<u64, int>& out, int& budget) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    if (auto r = exact_root(n, 2)) {
        std::map<u64, int> sub;
        split(*r, sub, budget);
        for (auto& [p, k] : sub) out[p] += 2 * k;
        return;
    }
    u64 c = 1, y0 = 2;
    while (true) {
        if (budget-- <= 0) throw FactorizationFailure("factorize: retry budget exhausted");
        u64 g = pollard_brent(n, c, y0);
        if (g != 1 && g != n) {
            split(g, out, budget);
            split(n / g, out, budget);
            return;
        }
        c += 2;
        y0 = y0 * 3 + 1;
    }
}

}  // namespace

Factorization factorize(u64 n, int retry_budget) {
    Factorization f;
    if (n <= 1) return f;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (n % p == 0) {
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            f.push_back({p, k});
        }
    }
    // Trial division by a wheel up to a small bound keeps rho for the hard part.
    for (u64 p = 17; p <= 1000 && p * p <= n; p += 2) {
        if (n % p == 0) {
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            f.push_back({p, k});
        }
    }
    if (n > 1) {
        std::map<u64, int> rest;
        int budget = retry_budget;
        split(n, rest, budget);
        for (auto& [p, k] : rest) f.push_back({p, k});
    }
    std::sort(f.begin(), f.end(), [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
    return f;
}

int mobius(const Factorization& f) {
    int s = 1;
    for (auto& pk : f) {
        if (pk.k > 1) return 0;
        s = -s;
    }
    return s;
}

u64 divisor_count(const Factorization& f) {
    u64 c = 1;
    for (auto& pk : f) c *= static_cast<u64>(pk.k + 1);
    return c;
}

std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> ds{1};
    for (auto& pk : f) {
        size_t cur = ds.size();
        u64 pp = 1;
        for (int i = 1; i <= pk.k; ++i) {
            pp *= pk.p;
            for (size_t j = 0; j < cur; ++j) ds.push_back(ds[j] * pp);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

std::optional<PrimePower> prime_power_of(u64 n) {
    if (n < 2) return std::nullopt;
    if (is_prime(n)) return PrimePower{n, 1};
    // n = p^k forces n to be a q-th power for each prime q | k.
    static constexpr int prime_exps[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61};
    for (int k : prime_exps) {
        if ((u64{1} << k) > n) break;
        if (auto r = exact_root(n, k)) {
            auto inner = prime_power_of(*r);
            if (!inner) return std::nullopt;
            return PrimePower{inner->p, inner->k * k};
        }
    }
    return std::nullopt;
}

double von_mangoldt(u64 n) {
    auto pk = prime_power_of(n);
    return pk ? std::log(static_cast<double>(pk->p)) : 0.0;
}

std::optional<u64> sqrt_mod_prime(u64 a, u64 p) {
    a %= p;
    if (p == 2) return a;
    if (a == 0) return 0;
    if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = powmod(z, q, p);
    u64 t = powmod(a, q, p);
    u64 r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0;
        u64 tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

SieveTables linear_sieve(std::uint32_t n) {
    SieveTables t;
    t.spf.assign(n + 1, 0);
    t.mu.assign(n + 1, 0);
    if (n >= 1) t.mu[1] = 1;
    for (std::uint32_t i = 2; i <= n; ++i) {
        if (t.spf[i] == 0) {
            t.spf[i] = i;
            t.mu[i] = -1;
            t.primes.push_back(i);
        }
        for (std::uint32_t p : t.primes) {
            u64 ip = static_cast<u64>(i) * p;
            if (p > t.spf[i] || ip > n) break;
            t.spf[ip] = p;
            t.mu[ip] = (p == t.spf[i]) ? 0 : static_cast<std::int8_t>(-t.mu[i]);
        }
    }
    return t;
}

}  // namespace axby
