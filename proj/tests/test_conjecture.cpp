#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "axby/conjecture.hpp"
#include "axby/numtheory.hpp"
#include "axby/quadfield.hpp"

using namespace axby;

namespace {

std::shared_ptr<const HeckeFamily> family_of(i64 d) {
    return HeckeFamily::canonical(RealQuadraticField::make(d));
}

// Direct evaluation point by point.
std::complex<double> direct_sum(const HeckeCharacter& chi, const CubicForm& f, i64 a, i64 B1, i64 B2) {
    std::complex<double> s{0, 0};
    for (i64 y1 = 1; y1 <= B1; ++y1)
        for (i64 y2 = 1; y2 <= B2; ++y2) {
            i64 c = f.c1 * y1 * y1 * y1 - f.c2 * y2 * y2 * y2;
            if (c == 0 || c % a != 0) continue;
            s += chi.lambda(static_cast<u64>(std::llabs(c / a)));
        }
    return s;
}

}  // namespace

TEST_CASE("cubic form sums against direct evaluation") {
    auto fam = family_of(5);
    auto chi = HeckeCharacter::from_index(fam, 1, 0);
    CubicForm f{1, 1};
    CHECK(cubic_form_lambda_sum(chi, f, 1, 0, 0).sum_value == std::complex<double>(0, 0));
    auto r = cubic_form_lambda_sum(chi, f, 1, 50, 50);
    auto ref = direct_sum(chi, f, 1, 50, 50);
    CHECK(std::abs(r.sum_value - ref) < 1e-9);
    CHECK(r.trivial_bound == 50 * 50 - 50);
    CHECK(std::abs(r.sum_value) < r.trivial_bound);
    CHECK(std::abs(r.sum_value) <= r.trivial_bound * r.max_divisor_count);
    MESSAGE("d=5 l=1 form (1,1) B=50: |sum| = " << std::abs(r.sum_value) << " of " << r.trivial_bound);

    // Filtered modulus and unequal coefficients.
    CubicForm g{2, 5};
    for (i64 a : {1, 3, 7, 9}) {
        auto s = cubic_form_lambda_sum(chi, g, a, 30, 20);
        REQUIRE(std::abs(s.sum_value - direct_sum(chi, g, a, 30, 20)) < 1e-9);
    }
    // a = 1 keeps every point.
    CHECK(cubic_box_values(g, 1, 30, 20).values.size() == 600);

    auto fam13 = family_of(40);
    for (int idx = 0; idx < fam13->character_count(); ++idx) {
        auto psi = HeckeCharacter::from_index(fam13, 2, idx);
        REQUIRE(std::abs(cubic_form_lambda_sum(psi, f, 1, 25, 25).sum_value - direct_sum(psi, f, 1, 25, 25)) < 1e-9);
    }
}

TEST_CASE("conjugate character gives the conjugate sum") {
    for (i64 d : {5, 13, 40, 229}) {
        auto fam = family_of(d);
        for (i64 ell : {1, -3, 7}) {
            auto chi = HeckeCharacter::from_index(fam, ell, fam->character_count() - 1);
            auto s = cubic_form_lambda_sum(chi, {1, 2}, 1, 40, 40).sum_value;
            auto c = cubic_form_lambda_sum(chi.conjugate(), {1, 2}, 1, 40, 40).sum_value;
            INFO("d=" << d << " l=" << ell);
            CHECK(c.real() == s.real());
            CHECK(c.imag() == -s.imag());
        }
    }
}

TEST_CASE("trivial character and degenerate boxes") {
    auto fam = family_of(5);
    auto one = HeckeCharacter::trivial(fam);
    CHECK_THROWS_AS(cubic_form_lambda_sum(one, {1, 1}, 1, 10, 10), ValidationError);
    auto r = cubic_form_character_sum(one, {1, 1}, 1, 100, 100);
    i64 exact = 0;
    for (u64 n : cubic_box_values({1, 1}, 1, 100, 100).values) exact += lambda_one(5, n);
    CHECK(r.sum_value.real() == doctest::Approx(static_cast<double>(exact)).epsilon(1e-12));
    CHECK(std::fabs(r.sum_value.imag()) < 1e-6);
    CHECK(r.sum_value.real() > 0);

    auto chi = HeckeCharacter::from_index(fam, 1, 0);
    CHECK_THROWS_AS(cubic_form_lambda_sum(chi, {1, 1}, 1, 1, 1), DegenerateForm);
    CHECK_THROWS_AS(cubic_form_lambda_sum(chi, {2, 2}, 3, 1, 1), DegenerateForm);
    CHECK_THROWS_AS(cubic_form_lambda_sum(chi, {0, 1}, 1, 5, 5), ValidationError);
}

TEST_CASE("flat sums") {
    CubicForm f{1, 1};
    // Above every value the flat part is empty.
    auto top = cubic_form_lambda_flat_sum(20, f, 1, 30, 30, 2.0 * 30 * 30 * 30, 0.1, false);
    CHECK(top.value == 0);
    CHECK(top.field_disc == 5);
    auto r = cubic_form_lambda_flat_sum(20, f, 1, 100, 100, 100, 0.1, false);
    i64 ref = 0;
    for (u64 n : cubic_box_values(f, 1, 100, 100).values) ref += lambda_one(5, n) - lambda_one_sharp(5, n, 100);
    CHECK(r.value == ref);
    CHECK(std::fabs(static_cast<double>(r.value)) < r.envelope);
    MESSAGE("d=20 B=100 T=100 flat sum " << r.value << ", envelope " << r.envelope);
    // Window check: (200)^{0.9} = 117.4.
    CHECK_THROWS_AS(cubic_form_lambda_flat_sum(20, f, 1, 100, 100, 100), ValidationError);
    CHECK_NOTHROW(cubic_form_lambda_flat_sum(20, f, 1, 100, 100, 150));
    CHECK(cubic_form_lambda_flat_sum(20, f, 1, 200, 200, 300).trivial_bound >= r.trivial_bound);
    for (u64 n = 1; n <= 300; ++n) REQUIRE(lambda_one_flat(5, n, 7.5) == lambda_one(5, n) - lambda_one_sharp(5, n, 7.5));
}

TEST_CASE("exponent calibration") {
    auto ladder = square_ladder({50, 100, 200, 400});
    CubicForm f{1, 1};
    auto ones = exponent_scan_weights([](u64) { return 1.0; }, f, 1, ladder);
    CHECK(ones.epsilon == doctest::Approx(0.5).epsilon(0.1));
    CHECK(std::fabs(ones.epsilon - 0.5) < 0.05);
    auto rnd = random_sign_calibration(f, 1, ladder, 64, 12345);
    CHECK(rnd.epsilon <= 0.1);
    CHECK(std::fabs(rnd.epsilon) < 0.1);
    MESSAGE("calibration: ones " << ones.epsilon << " (res " << ones.residual << "), random " << rnd.epsilon << " (res "
                                 << rnd.residual << ")");
    CHECK(random_sign_calibration(f, 1, ladder, 64, 12345).epsilon == rnd.epsilon);

    CHECK_THROWS_AS(fit_exponent(square_ladder({50, 100, 200}), {1, 2, 3}), InsufficientLadder);
    CHECK_THROWS_AS(fit_exponent(square_ladder({50, 100, 200, 250}), {1, 2, 3, 4}), InsufficientLadder);
    // Exact power law recovers its exponent.
    auto fit = fit_exponent(ladder, {std::pow(100.0, 1.2), std::pow(200.0, 1.2), std::pow(400.0, 1.2), std::pow(800.0, 1.2)});
    CHECK(fit.slope == doctest::Approx(1.2));
    CHECK(fit.epsilon == doctest::Approx(0.1));
    CHECK(fit.residual < 1e-12);
}

TEST_CASE("real character scan") {
    auto chi = HeckeCharacter::from_index(family_of(5), 1, 0);
    auto ladder = square_ladder({25, 50, 100, 200});
    auto a = exponent_scan(chi, {1, 1}, 1, ladder, 1);
    auto b = exponent_scan(chi, {1, 1}, 1, ladder, 3);
    CHECK(a.epsilon == b.epsilon);
    for (size_t i = 0; i < ladder.size(); ++i) CHECK(a.magnitudes[i] == b.magnitudes[i]);
    MESSAGE("d=5 l=1 scan: eps " << a.epsilon << ", residual " << a.residual);
}

TEST_CASE("large sieve aggregate") {
    CHECK(large_sieve_pairs(1).empty());
    auto pairs = large_sieve_pairs(10);
    CHECK(pairs.size() == 12);
    CHECK(pairs.front() == std::make_pair<i64, i64>(1, 3));

    LargeSieveConfig cfg;
    cfg.N = 1;
    CHECK(large_sieve_aggregate(cfg).value == 0);

    cfg.N = 10;
    cfg.B1 = cfg.B2 = 50;
    auto base = large_sieve_aggregate(cfg);
    CHECK(base.pairs.size() == 12);
    CHECK(base.value > 0);
    MESSAGE("N=10 B=50 aggregate " << base.value << " over " << base.terms << " cells, envelope " << base.envelope);

    // Pair (1, 3): one character class, cap N^0.1 log(2 + sqrt 3).
    CHECK(base.pairs[0].field_disc == 12);
    CHECK(base.pairs[0].ell_max == static_cast<i64>(std::floor(std::pow(10.0, 0.1) * std::log(2 + std::sqrt(3.0)))));

    // Recompute one pair by hand.
    {
        auto fam = family_of(12);
        double ref = 0;
        for (i64 ell = -base.pairs[0].ell_max; ell <= base.pairs[0].ell_max; ++ell)
            for (int k = 0; k < fam->character_count(); ++k) {
                auto chi = HeckeCharacter::from_index(fam, ell, k);
                std::complex<double> s{0, 0};
                for (i64 y1 = 1; y1 <= 50; ++y1)
                    for (i64 y2 = 1; y2 <= 50; ++y2) {
                        i64 c = std::llabs(y2 * y2 * y2 - 3 * y1 * y1 * y1);
                        if (c == 0) continue;
                        s += chi.is_trivial() ? std::complex<double>(static_cast<double>(lambda_one_flat(12, c, 100)), 0)
                                              : chi.lambda(static_cast<u64>(c));
                    }
                ref += std::abs(s);
            }
        CHECK(base.pairs[0].value == doctest::Approx(ref).epsilon(1e-10));
    }

    auto more = cfg;
    more.ell_cap_factor = 2;
    CHECK(large_sieve_aggregate(more).value >= base.value);

    auto threaded = cfg;
    threaded.threads = 3;
    CHECK(large_sieve_aggregate(threaded).value == base.value);

    // Interrupt with a small budget, then resume from the checkpoint.
    auto path = (std::filesystem::temp_directory_path() / "axby_ls_checkpoint.txt").string();
    std::remove(path.c_str());
    auto tight = cfg;
    tight.checkpoint = path;
    tight.max_work = 60000;
    CHECK_THROWS_AS(large_sieve_aggregate(tight), BudgetExceeded);
    CHECK(std::filesystem::exists(path));
    tight.max_work = 1e12;
    auto resumed = large_sieve_aggregate(tight);
    bool any_resumed = false;
    for (auto& p : resumed.pairs) any_resumed |= p.resumed;
    CHECK(any_resumed);
    CHECK(resumed.value == base.value);
    CHECK(resumed.terms == base.terms);
    std::remove(path.c_str());

    auto bad = cfg;
    bad.a = 2;
    bad.b = 4;
    CHECK_THROWS_AS(large_sieve_aggregate(bad), ValidationError);
}

TEST_CASE("upsilon counts") {
    // 3^3 - 2^3 = 19 and both lie in (1.5, 3].
    CHECK(upsilon_count(1, 1, 19, 1.5) == 1);
    CHECK(upsilon_count(1, 1, -19, 1.5) == 1);
    CHECK(upsilon_count(1, 1, 19, 2) == 0);
    CHECK(upsilon_count(1, 1, 20, 1.5) == 0);
    for (auto [n1, n2] : std::vector<std::pair<i64, i64>>{{1, 1}, {1, 3}, {5, 3}, {7, 2}})
        for (i64 a : {1, 2, 3})
            for (i64 m = -400; m <= 400; m += 7) {
                const double B = 6.5;
                u64 brute = 0;
                for (i64 y1 = 7; y1 <= 13; ++y1)
                    for (i64 y2 = 7; y2 <= 13; ++y2)
                        if (n1 * y2 * y2 * y2 - n2 * y1 * y1 * y1 == a * m) ++brute;
                REQUIRE(upsilon_count(n1, n2, m, B, a) == brute);
                REQUIRE(upsilon_count(n2, n1, -m, B, a) == brute);
            }
    u64 total = 0;
    for (i64 m = -3000; m <= 3000; ++m) total += upsilon_count(1, 2, m, 5);
    CHECK(total == 25);
}

TEST_CASE("scan reports resume from a checkpoint") {
    auto chi = HeckeCharacter::from_index(family_of(13), 2, 0);
    auto ladder = doubling_ladder(20, 30, 4);
    CHECK(ladder.back() == std::make_pair(160.0, 240.0));
    auto fresh = conjecture_scan(chi, {1, 2}, 1, 1, ladder);
    REQUIRE(fresh.fit.has_value());
    auto path = (std::filesystem::temp_directory_path() / "axby_scan_checkpoint.txt").string();
    std::remove(path.c_str());
    // A partial run over the first two boxes, then the full ladder.
    auto part = conjecture_scan(chi, {1, 2}, 1, 1, {ladder[0], ladder[1]}, 1, path);
    CHECK(!part.fit.has_value());
    auto full = conjecture_scan(chi, {1, 2}, 1, 1, ladder, 2, path);
    CHECK(full.resumed == 2);
    for (size_t i = 0; i < ladder.size(); ++i) {
        CHECK(full.boxes[i].sum_value == fresh.boxes[i].sum_value);
        CHECK(full.boxes[i].trivial_bound == fresh.boxes[i].trivial_bound);
    }
    CHECK(full.fit->epsilon == fresh.fit->epsilon);
    std::remove(path.c_str());
    // b scales every value.
    auto scaled = cubic_form_lambda_sum(chi, {1, 2}, 1, 20, 20, 3);
    CHECK(std::abs(scaled.sum_value - [&] {
              std::complex<double> s{0, 0};
              for (u64 n : cubic_box_values({1, 2}, 1, 20, 20).values) s += chi.lambda(3 * n);
              return s;
          }()) < 1e-9);
}
