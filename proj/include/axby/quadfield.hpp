#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "axby/common.hpp"

namespace axby {

using BigInt = boost::multiprecision::cpp_int;

bool is_fundamental_discriminant(i64 d);

// Kronecker symbol (d/n), Cohen's binary algorithm.
int kronecker_symbol(i64 d, i64 n);

class FundamentalDiscriminant {
public:
    explicit FundamentalDiscriminant(i64 d);
    i64 value() const { return d_; }
    // 0 for d = 0 mod 4, 1 for d = 1 mod 4.
    int parity_class() const { return static_cast<int>(d_ & 3); }
    i64 squarefree_core() const { return (d_ & 3) == 0 ? d_ / 4 : d_; }
    u64 isqrt_d() const { return sqrt_; }

private:
    i64 d_;
    u64 sqrt_;
};

// Fundamental discriminant of Q(sqrt(n)) for non-square n > 1.
i64 field_discriminant_of(i64 n);

// z = (u + v sqrt d)/2
struct QuadElement {
    i64 u = 0;
    i64 v = 0;
    i64 d = 0;

    static QuadElement make(i64 u, i64 v, i64 d);
    bool is_zero() const { return u == 0 && v == 0; }
    i64 norm() const;
    QuadElement conjugate() const { return {u, -v, d}; }
    long double value() const;
    long double conjugate_value() const;
};

struct BigQuadElement {
    BigInt u;
    BigInt v;
    i64 d = 0;

    BigInt norm() const { return (u * u - BigInt(d) * v * v) / 4; }
    BigQuadElement conjugate() const { return {u, -v, d}; }
    BigQuadElement operator*(const BigQuadElement& o) const {
        return {(u * o.u + BigInt(d) * v * o.v) / 2, (u * o.v + v * o.u) / 2, d};
    }
    bool operator==(const BigQuadElement& o) const { return u == o.u && v == o.v && d == o.d; }
    // log|z| and log|z^sigma|, robust for huge coefficients.
    long double log_abs() const;
    long double log_abs_conjugate() const;
    int sign() const;
};

struct UnitData {
    BigQuadElement epsilon;
    long double regulator = 0;
    int norm_sign = 1;
    bool promoted = false;

    std::optional<QuadElement> epsilon64() const;
};

// Smallest unit > 1. Transparently promotes to big integers.
UnitData fundamental_unit(const FundamentalDiscriminant& d);
// 64-bit only path; throws OverflowUnit when u or v leaves the 64-bit range.
UnitData fundamental_unit_64(const FundamentalDiscriminant& d);

// scale * (aZ + ((b + sqrt d)/2) Z)
struct QuadIdeal {
    i64 a = 1;
    i64 b = 0;
    i64 scale = 1;
    i64 d = 0;

    static QuadIdeal make(i64 a, i64 b, i64 scale, i64 d);
    static QuadIdeal unit(i64 d);
    u64 norm() const;
    QuadIdeal conjugate() const;
    QuadIdeal primitive() const { return make(a, b, 1, d); }
    bool contains(const QuadElement& z) const;
    bool contains(const BigQuadElement& z) const;
    bool operator==(const QuadIdeal& o) const {
        return a == o.a && b == o.b && scale == o.scale && d == o.d;
    }
    bool operator<(const QuadIdeal& o) const {
        return std::tie(scale, a, b) < std::tie(o.scale, o.a, o.b);
    }
};

// Ideal product via form composition, canonicalized.
QuadIdeal multiply(const QuadIdeal& x, const QuadIdeal& y);

struct IndefiniteForm {
    i64 A = 0;
    i64 B = 0;
    i64 C = 0;
    i64 discriminant() const { return B * B - 4 * A * C; }
    bool operator==(const IndefiniteForm&) const = default;
};

QuadIdeal form_ideal_correspondence(const IndefiniteForm& f);
IndefiniteForm ideal_to_form(const QuadIdeal& I);

// alpha((b - sqrt d)/(2a)) = (1/2) log |(b - sqrt d)/(b + sqrt d)|
long double rho_step_alpha(i64 b, i64 d);

struct ClassGroup {
    i64 d = 0;
    int h = 0;
    int narrow_h = 0;
    std::vector<QuadIdeal> representatives;
    std::vector<int> table;  // h*h composition of class indices
    std::vector<int> inverse;
    std::vector<int> structure;  // invariant factors n1 | n2 | ...
    std::vector<int> basis;      // class index of each cyclic generator
    std::vector<std::vector<int>> exponents;  // per class, exponent vector in basis

    int compose(int x, int y) const { return table[static_cast<size_t>(x) * h + y]; }
    int power(int x, i64 e) const;
    int order(int x) const;
    int from_exponents(const std::vector<int>& e) const;
};

// Field data: unit, reduced-ideal cycles and class group.
class RealQuadraticField {
public:
    static constexpr i64 kDefaultCeiling = 2'000'000'000'000LL;

    explicit RealQuadraticField(const FundamentalDiscriminant& D, i64 ceiling = kDefaultCeiling);
    static std::shared_ptr<const RealQuadraticField> make(i64 d);

    i64 d() const { return D_.value(); }
    const FundamentalDiscriminant& disc() const { return D_; }
    const UnitData& unit() const { return unit_; }
    long double regulator() const { return unit_.regulator; }
    const ClassGroup& group() const { return group_; }

    struct Cycle {
        std::vector<std::pair<i64, i64>> ideals;  // reduced (a, b)
        std::vector<long double> offsets;         // alpha of multiplier root -> position
        long double period = 0;
    };
    const std::vector<Cycle>& cycles() const { return cycles_; }
    // Position of O_d in the principal cycle.
    int unit_position() const { return unit_pos_; }

    struct Located {
        int cls;
        int pos;
        long double dist;  // I = (mu) J_pos with alpha(mu) = dist
    };
    Located locate(const QuadIdeal& I) const;
    int class_of(const QuadIdeal& I) const { return locate(I).cls; }
    bool is_principal(const QuadIdeal& I) const { return class_of(I) == 0; }
    // Exact generator of a principal ideal, from the reduction word.
    std::optional<BigQuadElement> principal_generator(const QuadIdeal& I) const;

    // Normalizes b for the reduction window and checks reducedness.
    static i64 normalize_b(i64 a, i64 b, i64 d, u64 sqrt_d);
    static bool is_reduced(i64 a, i64 b, i64 d, u64 sqrt_d);

private:
    void build_cycles(i64 ceiling);
    void build_group();

    FundamentalDiscriminant D_;
    UnitData unit_;
    std::vector<Cycle> cycles_;
    std::map<std::pair<i64, i64>, std::pair<int, int>> where_;
    int unit_pos_ = 0;
    ClassGroup group_;
};

ClassGroup class_group(const FundamentalDiscriminant& d);

// Number of narrow (proper equivalence) cycles of reduced forms.
int narrow_form_cycle_count(const FundamentalDiscriminant& d);

long double l_one_exact(const FundamentalDiscriminant& d);
double verify_class_number_formula(const FundamentalDiscriminant& d);
double l_inverse_truncation_error(i64 D, i64 K);

}  // namespace axby
