#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "axby/analysis.hpp"
#include "axby/common.hpp"

namespace axby {

enum class CutoffMode { Sharp, Smooth };

struct RepConfig {
    i64 a = 1;
    i64 b = 1;
    double X = 0;
    CutoffMode mode = CutoffMode::Sharp;
    double A = 0;  // sharp: floor(X^{1/2}); smooth: X^{1/2}
    double B = 0;  // sharp: floor(X^{1/3}); smooth: X^{1/3}
    std::optional<SmoothBump> f1, f2;
    double max_X = 1e13;

    static RepConfig sharp(i64 a, i64 b, double X);
    static RepConfig smooth(i64 a, i64 b, double X, SmoothBump f1, SmoothBump f2);
    // Throws ValidationError for bad (a, b), BudgetExceeded when values leave 63 bits or X > max_X.
    void validate() const;
    // Integer ranges of x and y with nonzero weight.
    std::pair<u64, u64> x_range() const;
    std::pair<u64, u64> y_range() const;
};

struct CountReport {
    std::string weight;
    double weighted_sum = 0;
    double normalizer = 0;
    double ratio = 0;
    u64 terms = 0;
    double runtime = 0;
};

CountReport lambda_weighted_sum(const RepConfig& cfg, int threads = 1);
CountReport mobius_weighted_sum(const RepConfig& cfg, int threads = 1);
CountReport almost_prime_sum(const RepConfig& cfg, int k, int threads = 1);

// (Lambda * ... * Lambda)(n), k-fold, from the factorization of n.
double lambda_kfold(u64 n, int k);

struct TypeOneResult {
    u64 d = 0;
    u64 count = 0;
    double expected = 0;
    double relative_error = 0;
};
// Sharp boxes x <= A, y <= B.
TypeOneResult type_one_check(const RepConfig& cfg, u64 d);
// All squarefree d <= dmax.
std::vector<TypeOneResult> type_one_scan(const RepConfig& cfg, u64 dmax, int threads = 1);

// #{(x1, x2) in (A, 2A]^2 : n2 x1^2 - n1 x2^2 = k}.
u64 q_count(i64 n1, i64 n2, i64 k, u64 A_box);
// Same over (lo, hi]^2.
u64 q_count_range(i64 n1, i64 n2, i64 k, u64 lo, u64 hi);

struct RepCorrespondence {
    u64 direct_count = 0;
    u64 ideal_count = 0;
    i64 field_disc = 0;
    bool divisibility_ok = true;  // 4 n2 | (2 n2 x1)^2 - 4 n1 n2 x2^2 for every solution
};
// Pairs with |x1|, |x2| <= box and |n2 x1^2 - n1 x2^2| = m, counted directly and
// through principal ideals of norm 4 n2 m unfolded along the unit group.
RepCorrespondence rep_correspondence_check(i64 n1, i64 n2, i64 m, i64 box);

}  // namespace axby
