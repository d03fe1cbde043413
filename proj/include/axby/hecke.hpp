#pragma once

#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "axby/analysis.hpp"
#include "axby/quadfield.hpp"

namespace axby {

struct HyperbolicCoords {
    long double r = 0;      // sgn(z) |N(z)|^{1/2}
    long double alpha = 0;  // (1/2) log |z / z^sigma|
};

HyperbolicCoords hyperbolic_coords(const QuadElement& z);
HyperbolicCoords hyperbolic_coords(const BigQuadElement& z);
// (z, z^sigma) from the coordinates; norm_sign selects the cosh/sinh roles.
std::pair<long double, long double> reconstruct(const HyperbolicCoords& c, int norm_sign);

// The principal ideal z O_d in canonical form.
QuadIdeal principal_ideal(const QuadElement& z);

// All integral ideals of norm n, canonical and sorted.
std::vector<QuadIdeal> ideals_of_norm(i64 d, u64 n);

// Anchoring data for extending xi^l from principal ideals to all ideals.
struct Anchors {
    std::vector<int> ref_pos;  // per class, cycle position of the reference ideal b_c
    std::vector<int> basis;    // class indices of cyclic generators
    std::vector<int> orders;   // their orders
    std::vector<int> branch;   // root branch beta_i in [0, n_i)
};

// Phase data of one ideal: psi = e(l * theta + sum_i e_i(cls) (beta_i + k_i) / n_i).
struct IdealPhase {
    long double theta = 0;
    int cls = 0;
};

class HeckeFamily {
public:
    static std::shared_ptr<const HeckeFamily> canonical(std::shared_ptr<const RealQuadraticField> field);
    static std::shared_ptr<const HeckeFamily> with_anchors(std::shared_ptr<const RealQuadraticField> field,
                                                           Anchors anchors);
    // Random cycle rotations, random basis of the same shape, random branch.
    std::shared_ptr<const HeckeFamily> reanchored(std::mt19937_64& rng) const;

    const RealQuadraticField& field() const { return *field_; }
    std::shared_ptr<const RealQuadraticField> field_ptr() const { return field_; }
    const Anchors& anchors() const { return anchors_; }
    const std::vector<int>& exponents(int cls) const { return exps_[cls]; }
    int character_count() const { return field_->group().h; }

    IdealPhase phase_data(const QuadIdeal& I) const;
    // Phase of a prime ideal above p for each local type; empty for inert p.
    // Returns 1 ideal for ramified, 2 (p, conj p) for split.
    std::vector<IdealPhase> prime_phases(u64 p) const;
    // alpha of a generator of the principal ideal I, modulo R.
    long double principal_alpha(const QuadIdeal& I) const;

private:
    HeckeFamily(std::shared_ptr<const RealQuadraticField> field, Anchors anchors);

    struct Tracked {
        int cls;
        int pos;
        long double dist;
    };
    Tracked track(const QuadIdeal& I) const;
    Tracked compose(const Tracked& x, const Tracked& y) const;
    QuadIdeal reduced_ideal(int cls, int pos) const;
    long double tracked_principal_alpha(const Tracked& t) const;

    std::shared_ptr<const RealQuadraticField> field_;
    Anchors anchors_;
    std::vector<std::vector<int>> exps_;
    std::vector<long double> Gamma_;
    std::vector<long double> A_;
};

// Prime ideals above p as canonical ideals: 2 for split, 1 for ramified, 0 for inert.
std::vector<QuadIdeal> prime_ideals_above(i64 d, u64 p);

class HeckeCharacter {
public:
    HeckeCharacter(std::shared_ptr<const HeckeFamily> family, i64 ell, std::vector<int> k);
    // chi index in mixed radix over the anchor orders.
    static HeckeCharacter from_index(std::shared_ptr<const HeckeFamily> family, i64 ell, int chi_index);
    static HeckeCharacter trivial(std::shared_ptr<const HeckeFamily> family) { return {family, 0, {}}; }

    i64 ell() const { return ell_; }
    const std::vector<int>& k() const { return k_; }
    int chi_index() const;
    i64 d() const { return family_->field().d(); }
    const HeckeFamily& family() const { return *family_; }
    std::shared_ptr<const HeckeFamily> family_ptr() const { return family_; }
    bool is_trivial() const;

    long double phase(const IdealPhase& ph) const;
    std::complex<double> operator()(const QuadIdeal& I) const;
    std::complex<double> lambda(u64 n) const;
    // lambda(p^k) from the local factor.
    std::complex<double> lambda_prime_power(u64 p, int k) const;
    HeckeCharacter conjugate() const;

private:
    std::shared_ptr<const HeckeFamily> family_;
    i64 ell_;
    std::vector<int> k_;
};

std::complex<double> unit_phase(long double x);

// lambda for all n <= n_max by multiplicativity over a smallest-prime-factor sieve.
class EigenvalueTable {
public:
    EigenvalueTable(const HeckeCharacter& chi, std::uint32_t n_max);
    std::complex<double> operator[](std::uint32_t n) const { return values_[n]; }
    std::uint32_t n_max() const { return static_cast<std::uint32_t>(values_.size() - 1); }
    const std::vector<std::complex<double>>& values() const { return values_; }

private:
    std::vector<std::complex<double>> values_;
};

std::complex<double> lambda(const HeckeCharacter& chi, u64 n);
i64 lambda_one(i64 d, u64 n);
i64 lambda_one_sharp(i64 d, u64 n, double T);
std::complex<double> lambda_flat(const HeckeCharacter& chi, u64 n, double T);

std::complex<double> smooth_lambda_sum(const HeckeCharacter& chi, u64 q, double N, const SmoothBump& f);

struct FlatSumResult {
    double value = 0;
    double envelope = 0;
};
FlatSumResult lambda_flat_smooth_sum(i64 d, u64 q, double N, double T, const SmoothBump& f, double nu);

}  // namespace axby
