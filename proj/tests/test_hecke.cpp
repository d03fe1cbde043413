#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "axby/hecke.hpp"
#include "axby/numtheory.hpp"

using namespace axby;

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

std::vector<QuadIdeal> ideals_by_lattice(i64 d, u64 n) {
    std::vector<QuadIdeal> out;
    for (u64 s = 1; s * s <= n; ++s) {
        if (n % (s * s)) continue;
        i64 a = static_cast<i64>(n / (s * s));
        for (i64 b = 0; b < 2 * a; ++b)
            if ((static_cast<i128>(b) * b - d) % (4 * a) == 0) out.push_back(QuadIdeal::make(a, b, static_cast<i64>(s), d));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool multiset_equal(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b, double tol) {
    if (a.size() != b.size()) return false;
    for (auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](auto& p, auto& q) { return std::abs(p - x) < std::abs(q - x); });
        if (std::abs(*it - x) > tol) return false;
        b.erase(it);
    }
    return true;
}

QuadElement random_element(i64 d, std::mt19937_64& rng, i64 range = 60) {
    while (true) {
        i64 u = static_cast<i64>(rng() % (2 * range + 1)) - range;
        i64 v = static_cast<i64>(rng() % (2 * range + 1)) - range;
        if (((u - v * d) & 1) != 0 || (u == 0 && v == 0)) continue;
        return {u, v, d};
    }
}

std::complex<double> xi(long double alpha, i64 ell, long double R) {
    long double x = ell * alpha / R;
    x -= std::nearbyint(x);
    return {static_cast<double>(std::cos(2 * kPi * x)), static_cast<double>(std::sin(2 * kPi * x))};
}

const std::vector<i64> kDiscs = {5, 8, 13, 40, 60, 136, 145, 229, 316, 401, 520, 1164};

}  // namespace

TEST_CASE("hyperbolic coordinates") {
    auto F = RealQuadraticField::make(5);
    auto c = hyperbolic_coords(QuadElement{1, 1, 5});
    CHECK(static_cast<double>(c.alpha) == doctest::Approx(static_cast<double>(F->regulator())).epsilon(1e-15));
    // 2 + sqrt 5 has norm -1: z = r e^a, z^s = -r e^-a
    QuadElement z{4, 2, 5};
    auto h = hyperbolic_coords(z);
    CHECK(z.norm() == -1);
    CHECK(static_cast<double>(h.r) == doctest::Approx(1.0));
    auto [zz, zs] = reconstruct(h, -1);
    CHECK(static_cast<double>(zz) == doctest::Approx(static_cast<double>(z.value())).epsilon(1e-15));
    CHECK(static_cast<double>(zs) == doctest::Approx(static_cast<double>(z.conjugate_value())).epsilon(1e-15));
    // roles of cosh and sinh swap: (z + z^s)/2 = r sinh a
    CHECK(static_cast<double>((zz + zs) / 2) == doctest::Approx(static_cast<double>(h.r * std::sinh(h.alpha))));
    auto three = hyperbolic_coords(QuadElement{6, 0, 5});
    CHECK(three.alpha == 0);
    CHECK(static_cast<double>(three.r) == doctest::Approx(3.0));
    CHECK_THROWS_AS(hyperbolic_coords(QuadElement{0, 0, 5}), ZeroElement);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        QuadElement w = random_element(13, rng, 1000);
        auto hc = hyperbolic_coords(w);
        auto [a, b] = reconstruct(hc, w.norm() > 0 ? 1 : -1);
        REQUIRE(std::fabs(a - w.value()) <= 1e-15L * std::fabs(w.value()) + 1e-15L);
        REQUIRE(std::fabs(b - w.conjugate_value()) <= 1e-15L * std::fabs(w.conjugate_value()) + 1e-15L);
    }
}

TEST_CASE("ideals of norm") {
    CHECK(ideals_of_norm(5, 4).size() == 1);
    CHECK(ideals_of_norm(5, 11).size() == 2);
    CHECK(ideals_of_norm(5, 1) == std::vector<QuadIdeal>{QuadIdeal::unit(5)});
    for (i64 d : {5, 8, 12, 13, 40, 60, 85, 136}) {
        for (u64 n = 1; n <= 1500; ++n) REQUIRE(ideals_of_norm(d, n) == ideals_by_lattice(d, n));
    }
}

TEST_CASE("principal ideal of an element") {
    std::mt19937_64 rng(4);
    for (i64 d : {5, 8, 40, 145}) {
        for (int i = 0; i < 300; ++i) {
            QuadElement z = random_element(d, rng);
            QuadIdeal I = principal_ideal(z);
            REQUIRE(I.contains(z));
            REQUIRE(static_cast<i64>(I.norm()) == std::abs(z.norm()));
        }
    }
}

TEST_CASE("trivial character eigenvalues") {
    auto fam = HeckeFamily::canonical(RealQuadraticField::make(5));
    auto one = HeckeCharacter::trivial(fam);
    CHECK(one.is_trivial());
    CHECK(one.lambda(4) == std::complex<double>(1, 0));
    CHECK(one.lambda(11) == std::complex<double>(2, 0));
    CHECK(one.lambda(1) == std::complex<double>(1, 0));
    CHECK(one.lambda(0) == std::complex<double>(0, 0));
    for (i64 d : {5, 8, 13, 40}) {
        auto f = HeckeFamily::canonical(RealQuadraticField::make(d));
        auto t = HeckeCharacter::trivial(f);
        EigenvalueTable tab(t, 3000);
        for (u64 n = 1; n <= 3000; ++n) {
            auto v = t.lambda(n);
            REQUIRE(v.imag() == 0);
            REQUIRE(v.real() == static_cast<double>(lambda_one(d, n)));
            REQUIRE(v.real() == static_cast<double>(ideals_of_norm(d, n).size()));
            REQUIRE(tab[static_cast<std::uint32_t>(n)] == v);
        }
    }
}

TEST_CASE("principal ideals: psi equals xi of any generator") {
    std::mt19937_64 rng(8);
    for (i64 d : kDiscs) {
        auto F = RealQuadraticField::make(d);
        auto fam = HeckeFamily::canonical(F);
        auto eps = F->unit().epsilon;
        for (int i = 0; i < 80; ++i) {
            QuadElement z = random_element(d, rng);
            i64 ell = static_cast<i64>(rng() % 41) - 20;
            int chi = static_cast<int>(rng() % static_cast<u64>(F->group().h));
            HeckeCharacter psi = HeckeCharacter::from_index(fam, ell, chi);
            auto a = hyperbolic_coords(z).alpha;
            // another generator: -z * eps^k
            BigQuadElement w{z.u, z.v, d};
            int k = static_cast<int>(rng() % 7) - 3;
            BigQuadElement e = k >= 0 ? eps : eps.conjugate();
            if (F->unit().norm_sign == -1 && k < 0) e = BigQuadElement{-e.u, -e.v, d};
            for (int j = 0; j < std::abs(k); ++j) w = w * e;
            w = BigQuadElement{-w.u, -w.v, d};
            auto b = hyperbolic_coords(w).alpha;
            REQUIRE(std::abs(xi(a, ell, F->regulator()) - xi(b, ell, F->regulator())) < 1e-10);
            // class characters are trivial on principal ideals
            REQUIRE(std::abs(psi(principal_ideal(z)) - xi(a, ell, F->regulator())) < 1e-10);
        }
    }
}

TEST_CASE("complete multiplicativity on ideals and unit modulus") {
    std::mt19937_64 rng(9);
    for (i64 d : kDiscs) {
        auto F = RealQuadraticField::make(d);
        auto fam = HeckeFamily::canonical(F);
        for (int i = 0; i < 60; ++i) {
            i64 ell = static_cast<i64>(rng() % 21) - 10;
            HeckeCharacter psi = HeckeCharacter::from_index(fam, ell, static_cast<int>(rng() % static_cast<u64>(F->group().h)));
            u64 n1 = 1 + rng() % 300, n2 = 1 + rng() % 300;
            auto A = ideals_of_norm(d, n1), B = ideals_of_norm(d, n2);
            if (A.empty() || B.empty()) continue;
            const auto& x = A[rng() % A.size()];
            const auto& y = B[rng() % B.size()];
            auto px = psi(x), py = psi(y);
            REQUIRE(std::abs(std::abs(px) - 1) < 1e-14);
            REQUIRE(std::abs(psi(multiply(x, y)) - px * py) < 1e-10);
        }
    }
}

TEST_CASE("Euler product against ideal enumeration, Hecke relation, divisor bound") {
    std::mt19937_64 rng(10);
    for (i64 d : kDiscs) {
        auto F = RealQuadraticField::make(d);
        auto fam = HeckeFamily::canonical(F);
        for (int rep = 0; rep < 3; ++rep) {
            i64 ell = static_cast<i64>(rng() % 11) - 5;
            HeckeCharacter psi = HeckeCharacter::from_index(fam, ell, static_cast<int>(rng() % static_cast<u64>(F->group().h)));
            EigenvalueTable tab(psi, 600);
            for (u64 n = 1; n <= 600; ++n) {
                std::complex<double> direct{0, 0};
                for (auto& I : ideals_of_norm(d, n)) direct += psi(I);
                auto v = psi.lambda(n);
                REQUIRE(std::abs(v - direct) < 1e-9);
                REQUIRE(std::abs(tab[static_cast<std::uint32_t>(n)] - v) < 1e-9);
                REQUIRE(std::abs(v) <= static_cast<double>(divisor_count(factorize(n))) + 1e-9);
            }
            for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
                if (d % static_cast<i64>(p) == 0) continue;
                int chi_p = kronecker_symbol(d, static_cast<i64>(p));
                for (int k = 1; k <= 5; ++k) {
                    auto lhs = psi.lambda_prime_power(p, 1) * psi.lambda_prime_power(p, k);
                    auto rhs = psi.lambda_prime_power(p, k + 1) + static_cast<double>(chi_p) * psi.lambda_prime_power(p, k - 1);
                    REQUIRE(std::abs(lhs - rhs) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("conjugate character gives conjugate eigenvalues") {
    for (i64 d : {40, 229, 316, 1164}) {
        auto F = RealQuadraticField::make(d);
        auto fam = HeckeFamily::canonical(F);
        std::mt19937_64 rng(12);
        auto other = fam->reanchored(rng);
        for (auto f : {fam, other}) {
            for (int chi = 0; chi < F->group().h; ++chi) {
                HeckeCharacter psi = HeckeCharacter::from_index(f, 3, chi);
                HeckeCharacter bar = psi.conjugate();
                CHECK(bar.ell() == -3);
                CHECK(bar.conjugate().chi_index() == psi.chi_index());
                for (u64 n = 1; n <= 1000; ++n) REQUIRE(std::abs(bar.lambda(n) - std::conj(psi.lambda(n))) < 1e-11);
            }
        }
    }
}

TEST_CASE("re-anchoring permutes the family") {
    std::mt19937_64 rng(13);
    for (i64 d : {40, 60, 229, 316, 520, 1164, 4 * 2 * 3 * 5 * 7}) {
        auto F = RealQuadraticField::make(d);
        auto fam = HeckeFamily::canonical(F);
        for (int rep = 0; rep < 4; ++rep) {
            auto other = fam->reanchored(rng);
            i64 ell = static_cast<i64>(rng() % 9) - 4;
            for (u64 n : {2ull, 3ull, 9ull, 10ull, 77ull, 120ull, 221ull}) {
                std::vector<std::complex<double>> A, B;
                for (int chi = 0; chi < F->group().h; ++chi) {
                    A.push_back(HeckeCharacter::from_index(fam, ell, chi).lambda(n));
                    B.push_back(HeckeCharacter::from_index(other, ell, chi).lambda(n));
                }
                REQUIRE(multiset_equal(A, B, 1e-9));
            }
        }
    }
}

TEST_CASE("sharp and flat truncations") {
    CHECK(lambda_one_sharp(5, 44, 2) == 0);
    CHECK(lambda_one_sharp(5, 0, 10) == 0);
    auto fam = HeckeFamily::canonical(RealQuadraticField::make(5));
    auto one = HeckeCharacter::trivial(fam);
    for (u64 n = 1; n <= 300; ++n) REQUIRE(lambda_flat(one, n, static_cast<double>(n)) == std::complex<double>(0, 0));
    CHECK(lambda_flat(one, 0, 5) == std::complex<double>(0, 0));
    HeckeCharacter psi(fam, 1, {});
    CHECK(lambda_flat(psi, 44, 2) == psi.lambda(44));
    // flat = sum over divisors above T
    for (u64 n = 1; n <= 300; ++n) {
        i64 s = 0;
        for (u64 c = 1; c <= n; ++c)
            if (n % c == 0 && c > 7) s += kronecker_symbol(5, static_cast<i64>(c));
        REQUIRE(lambda_flat(one, n, 7).real() == static_cast<double>(s));
    }
}

TEST_CASE("smoothed eigenvalue sums") {
    auto fam = HeckeFamily::canonical(RealQuadraticField::make(5));
    HeckeCharacter psi(fam, 1, {});
    SmoothBump f(1, 2, 0.5);
    CHECK(smooth_lambda_sum(psi, 1, 0.4, f) == std::complex<double>(0, 0));
    auto big = smooth_lambda_sum(psi, 1, 1e6, f);
    MESSAGE("d=5 l=1 N=1e6 |sum| = " << std::abs(big));
    CHECK(std::abs(big) < 1);
    auto small = smooth_lambda_sum(psi, 1, 1e2, f);
    MESSAGE("d=5 l=1 N=1e2 |sum| = " << std::abs(small));
}

TEST_CASE("flat smoothed sums") {
    SmoothBump f(1, 2, 0.25);
    auto zero = lambda_flat_smooth_sum(5, 1, 1e3, 2e3 + 1, f, 0.1);
    CHECK(zero.value == 0);
    auto r = lambda_flat_smooth_sum(5, 1, 1e5, 1e3, f, 0.1);
    MESSAGE("d=5 N=1e5 T=1e3: value " << r.value << " envelope " << r.envelope);
    CHECK(std::fabs(r.value) < r.envelope);
    auto r2 = lambda_flat_smooth_sum(5, 1, 1e5, 2e3, f, 0.1);
    CHECK(r2.envelope <= r.envelope);
}
