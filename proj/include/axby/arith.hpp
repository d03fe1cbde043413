#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "axby/common.hpp"

namespace axby {

// #{x, y mod d : a x^2 + b y^3 = 0 mod d}, product over prime powers.
u64 congruence_count(i64 a, i64 b, u64 d);
// Same count by a single loop over residues mod d.
u64 congruence_count_direct(i64 a, i64 b, u64 d);

// Solutions of a x^2 + b y^3 = 0 mod m as (x, y) pairs, sorted.
std::vector<std::pair<u64, u64>> congruence_solutions(i64 a, i64 b, u64 m);

// S_d(h1, h2) = sum over solutions mod d of e_d(h1 x + h2 y).
// Assembled from prime-power factors with the inverse-cofactor twist.
std::complex<double> exp_sum(i64 a, i64 b, u64 d, i64 h1, i64 h2);
// Direct evaluation over the solution set mod d.
std::complex<double> exp_sum_direct(i64 a, i64 b, u64 d, i64 h1, i64 h2);
// Reduced form sum_z e_p(-a b^-1 (h1 z^3 + h2 z^2)) for a prime p not dividing ab.
std::complex<double> exp_sum_reduced(i64 a, i64 b, u64 p, i64 h1, i64 h2);
// True when the substitution x = z y parametrizes the solution set mod p exactly.
bool substitution_matches(i64 a, i64 b, u64 p);

struct WeilRow {
    u64 p = 0;
    double max_abs = 0;
    i64 h1 = 0, h2 = 0;  // where the maximum is attained
    double ratio = 0;    // max_abs / sqrt(p)
    bool substitution_ok = true;
};

struct WeilScan {
    std::vector<WeilRow> rows;
    int violations = 0;  // rows with ratio > constant
    double worst_ratio = 0;
};

// All primes p <= pmax with p not dividing ab, all (h1, h2) != (0, 0) mod p.
WeilScan weil_scan(i64 a, i64 b, u64 pmax, double constant = 3.0, int threads = 1);

// #{(y1, y2) mod c : n1 y2^3 = n2 y1^3 mod c}.
u64 cubic_congruence_count(u64 c, i64 n1, i64 n2);

// Evaluates the K = 3 Heath-Brown combination at n with mu truncated to [1, cutoff].
// Returns (mu(n), identity value).
std::pair<int, i64> heath_brown_check(u64 n, u64 cutoff);

struct HeathBrownScan {
    u64 X = 0;
    u64 cutoff = 0;
    u64 mismatches = 0;
    u64 first_mismatch = 0;
};
// Every n <= X with cutoff floor(X^{1/3}), via Dirichlet convolution arrays.
HeathBrownScan heath_brown_scan(u64 X);

}  // namespace axby
