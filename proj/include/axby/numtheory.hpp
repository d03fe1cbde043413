#pragma once

#include <optional>
#include <vector>

#include "axby/common.hpp"

namespace axby {

struct PrimePower {
    u64 p;
    int k;
    bool operator==(const PrimePower&) const = default;
};
using Factorization = std::vector<PrimePower>;

u64 isqrt(u64 n);
u64 icbrt(u64 n);
// Returns r with r^k == n if it exists.
std::optional<u64> exact_root(u64 n, int k);

i64 floor_div(i64 a, i64 b);
i64 mod_floor(i64 a, i64 m);
i64 gcd64(i64 a, i64 b);
// Returns g and sets x, y with a*x + b*y = g >= 0.
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);
// Inverse of a modulo m; throws ValidationError if gcd(a, m) != 1.
i64 inverse_mod(i64 a, i64 m);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);

// Deterministic for all 64-bit inputs.
bool is_prime(u64 n);

// Sorted by prime. FactorizationFailure when Pollard-Brent runs out of retries.
Factorization factorize(u64 n, int retry_budget = 64);

int mobius(const Factorization& f);
u64 divisor_count(const Factorization& f);
std::vector<u64> divisors(const Factorization& f);
// Returns (p, k) when n = p^k with k >= 1, for the von Mangoldt function.
std::optional<PrimePower> prime_power_of(u64 n);
double von_mangoldt(u64 n);

// Square root of a modulo an odd prime p (Tonelli-Shanks), a a quadratic residue.
std::optional<u64> sqrt_mod_prime(u64 a, u64 p);

// Linear sieve tables on [0, n].
struct SieveTables {
    std::vector<std::uint32_t> spf;
    std::vector<std::int8_t> mu;
    std::vector<std::uint32_t> primes;
};
SieveTables linear_sieve(std::uint32_t n);

}  // namespace axby
