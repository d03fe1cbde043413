// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.
// Usage: acceptance <path to axby binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "axby/analysis.hpp"
#include "axby/arith.hpp"
#include "axby/buchstab.hpp"
#include "axby/conjecture.hpp"
#include "axby/hecke.hpp"
#include "axby/numtheory.hpp"
#include "axby/quadfield.hpp"
#include "axby/sieve.hpp"

using namespace axby;

namespace {

constexpr double kCnfTol = 1e-6;
constexpr double kCnfSeconds = 300;
constexpr double kReanchorTol = 1e-9;
constexpr double kWeilConstant = 3.0;
constexpr double kPoissonTol = 1e-8;
constexpr double kOmega10 = 0.5614594836;
constexpr double kOmega10Tol = 1e-4;
constexpr double kQuadErrTol = 1e-3;
constexpr double kBuchstabSeconds = 60;
constexpr double kPrimeSeconds = 600;
constexpr double kOracleRelTol = 1e-9;
// Sum of Lambda(x^2 + y^3) for x <= 10^4, y <= 464, pinned from the first oracle run.
constexpr double kPinnedSum1e8 = 0x1.1b286be8374bp+22;
constexpr double kCalibOnes = 0.5, kCalibOnesTol = 0.05, kCalibRandomMax = 0.1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void run(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

bool multiset_equal(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b, double tol) {
    if (a.size() != b.size()) return false;
    for (auto& x : a) {
        size_t best = b.size();
        for (size_t j = 0; j < b.size(); ++j)
            if (std::abs(x - b[j]) <= tol) {
                best = j;
                break;
            }
        if (best == b.size()) return false;
        b.erase(b.begin() + static_cast<long>(best));
    }
    return true;
}

void criterion1() {
    auto t0 = Clock::now();
    double worst = 0;
    i64 worst_d = 0, count = 0, bad = 0;
    for (i64 d = 2; d <= 10000; ++d) {
        if (!is_fundamental_discriminant(d)) continue;
        double r = verify_class_number_formula(FundamentalDiscriminant(d));
        ++count;
        if (!(r < kCnfTol)) ++bad;
        if (r > worst) {
            worst = r;
            worst_d = d;
        }
    }
    double t = seconds_since(t0);
    report(1, bad == 0 && t < kCnfSeconds,
           fmt("%lld discriminants, max residual %.3g at d=%lld, %lld above %.0e, %.1f s", static_cast<long long>(count), worst,
               static_cast<long long>(worst_d), static_cast<long long>(bad), kCnfTol, t));
}

void criterion2() {
    u64 mismatches = 0, relation_fail = 0, relations = 0;
    for (i64 d : {5, 8, 13, 40}) {
        for (u64 n = 1; n <= 10000; ++n)
            if (static_cast<i64>(ideals_of_norm(d, n).size()) != lambda_one(d, n)) ++mismatches;
        for (u64 p = 2; p <= 10000; ++p) {
            if (!is_prime(p) || d % static_cast<i64>(p) == 0) continue;
            const i64 chi = kronecker_symbol(d, static_cast<i64>(p));
            u64 pk = p;  // p^k
            for (int k = 1; pk * p <= 10000; ++k, pk *= p) {
                i64 lhs = lambda_one(d, p) * lambda_one(d, pk);
                i64 rhs = lambda_one(d, pk * p) + chi * lambda_one(d, pk / p);
                ++relations;
                if (lhs != rhs) ++relation_fail;
            }
        }
    }
    report(2, mismatches == 0 && relation_fail == 0,
           fmt("ideal-count mismatches %llu over 4 x 10^4 values; Hecke relation failures %llu of %llu",
               static_cast<unsigned long long>(mismatches), static_cast<unsigned long long>(relation_fail),
               static_cast<unsigned long long>(relations)));
}

void criterion3() {
    std::mt19937_64 rng(2024);
    std::vector<i64> discs;
    for (i64 d = 5; d <= 3000; ++d)
        if (is_fundamental_discriminant(d)) discs.push_back(d);
    int failed = 0, nontrivial_groups = 0;
    for (int c = 0; c < 100; ++c) {
        i64 d = discs[rng() % discs.size()];
        // Half of the cases from fields with a nontrivial class group.
        if (c % 2 == 0) {
            while (RealQuadraticField::make(d)->group().h == 1) d = discs[rng() % discs.size()];
        }
        auto F = RealQuadraticField::make(d);
        if (F->group().h > 1) ++nontrivial_groups;
        auto fam = HeckeFamily::canonical(F);
        auto other = fam->reanchored(rng);
        i64 ell = static_cast<i64>(rng() % 41) - 20;
        u64 n = 1 + rng() % 10000;
        std::vector<std::complex<double>> A, B;
        for (int chi = 0; chi < F->group().h; ++chi) {
            A.push_back(HeckeCharacter::from_index(fam, ell, chi).lambda(n));
            B.push_back(HeckeCharacter::from_index(other, ell, chi).lambda(n));
        }
        if (!multiset_equal(A, B, kReanchorTol)) ++failed;
    }
    report(3, failed == 0,
           fmt("100 cases (%d with h > 1), %d multiset mismatches at tol %.0e", nontrivial_groups, failed, kReanchorTol));
}

void criterion4() {
    int bad = 0, checked = 0;
    for (auto [a, b] : std::vector<std::pair<i64, i64>>{{1, 1}, {27, 4}, {2, 3}})
        for (u64 p = 2; p <= 1000; ++p) {
            if (!is_prime(p)) continue;
            ++checked;
            if (congruence_count(a, b, p) != p) ++bad;
        }
    report(4, bad == 0, fmt("%d (pair, prime) cases, %d with N(p) != p", checked, bad));
}

void criterion5() {
    int violations = 0;
    double worst = 0;
    size_t primes = 0;
    for (auto [a, b] : std::vector<std::pair<i64, i64>>{{1, 1}, {27, 4}, {2, 3}}) {
        auto scan = weil_scan(a, b, 500, kWeilConstant);
        violations += scan.violations;
        worst = std::max(worst, scan.worst_ratio);
        primes += scan.rows.size();
    }
    report(5, violations == 0,
           fmt("%zu (pair, prime) scans, worst |S_p|/sqrt(p) = %.6f, %d violations of %.0f sqrt(p)", primes, worst, violations,
               kWeilConstant));
}

void criterion6() {
    auto scan = heath_brown_scan(10000);
    u64 direct_bad = 0;
    for (u64 n = 1; n <= 10000; n += 97) {
        auto [mu, v] = heath_brown_check(n, scan.cutoff);
        if (mu != v) ++direct_bad;
    }
    report(6, scan.mismatches == 0 && direct_bad == 0,
           fmt("n <= 10^4, cutoff %llu, %llu mismatches (spot checks %llu)", static_cast<unsigned long long>(scan.cutoff),
               static_cast<unsigned long long>(scan.mismatches), static_cast<unsigned long long>(direct_bad)));
}

void criterion7() {
    struct Case {
        u64 q;
        i64 a;
        double N, delta;
    };
    std::vector<Case> grid;
    for (u64 q : {1ull, 3ull, 7ull, 10ull, 31ull})
        for (double N : {1e3, 1e4})
            for (double delta : {0.1, 0.25}) grid.push_back({q, static_cast<i64>((q * 5 + 2) % q), N, delta});
    double worst = 0;
    for (auto& c : grid) {
        SmoothBump f(1, 2, c.delta);
        i64 H = poisson_min_H(f, c.N, c.q, 0.5);
        worst = std::max(worst, poisson_check(f, c.N, c.q, c.a, H).discrepancy);
    }
    report(7, grid.size() == 20 && worst < kPoissonTol,
           fmt("%zu cases (q in {1,3,7,10,31}, N in {1e3,1e4}, delta in {0.1,0.25}), max discrepancy %.3g", grid.size(), worst));
}

void criterion8() {
    std::vector<i64> odd_sf;
    for (i64 n = 1; n <= 15; n += 2)
        if (mobius(factorize(static_cast<u64>(n))) != 0) odd_sf.push_back(n);
    u64 cases = 0, bad = 0, reps = 0;
    for (i64 n1 : odd_sf)
        for (i64 n2 : odd_sf) {
            if (n1 * n2 == 1 || gcd64(n1, n2) != 1) continue;
            for (i64 box : {5, 30, 100})
                for (i64 m = 1; m <= 50; ++m) {
                    auto r = rep_correspondence_check(n1, n2, m, box);
                    ++cases;
                    reps += r.direct_count;
                    if (r.direct_count != r.ideal_count || !r.divisibility_ok) ++bad;
                }
        }
    report(8, bad == 0,
           fmt("%llu (n1, n2, m, box) cases, %llu representations, %llu mismatches", static_cast<unsigned long long>(cases),
               static_cast<unsigned long long>(reps), static_cast<unsigned long long>(bad)));
}

void criterion9() {
    auto t0 = Clock::now();
    double w15 = omega(1.5), w10 = omega(10);
    auto lb = lower_bound_constant(1.0 / 17);
    double t = seconds_since(t0);
    bool ok = w15 == 2.0 / 3 && std::fabs(w10 - kOmega10) < kOmega10Tol && lb.d4.value <= 0.22 && lb.d6.value <= 0.73 &&
              lb.d4.value + lb.d6.value < 0.95 && lb.value >= 0.05 && lb.d4.error < kQuadErrTol &&
              lb.d6.error < kQuadErrTol && t < kBuchstabSeconds;
    report(9, ok,
           fmt("omega(1.5)=%.17g omega(10)=%.10f D4=%.6f (err %.1e) D6=%.6f (err %.1e) sum=%.6f 1-D4-D6=%.6f, %.2f s", w15, w10,
               lb.d4.value, lb.d4.error, lb.d6.value, lb.d6.error, lb.d4.value + lb.d6.value, lb.value, t));
}

// Independent oracle: odd-only prime bitset, prime powers by exact roots.
double oracle_lambda_sum(u64 A, u64 B) {
    const u64 top = A * A + B * B * B;
    std::vector<bool> composite(top / 2 + 1, false);  // index i <-> 2i + 1
    for (u64 i = 1; (2 * i + 1) * (2 * i + 1) <= top; ++i)
        if (!composite[i])
            for (u64 j = (2 * i + 1) * (2 * i + 1) / 2; j <= top / 2; j += 2 * i + 1) composite[j] = true;
    auto is_p = [&](u64 n) { return n == 2 || (n > 2 && (n & 1) && !composite[n / 2]); };
    auto Lambda = [&](u64 n) -> double {
        if (is_p(n)) return std::log(static_cast<double>(n));
        for (int k = 2; (1ull << k) <= n; ++k) {
            auto r = exact_root(n, k);
            if (r && is_p(*r)) return std::log(static_cast<double>(*r));
        }
        return 0.0;
    };
    CompensatedSum<double> s;
    for (u64 x = 1; x <= A; ++x)
        for (u64 y = 1; y <= B; ++y) s.add(Lambda(x * x + y * y * y));
    return s.value();
}

void criterion10() {
    std::string trend;
    double last_ratio = 0, last_sum = 0, oracle = 0, t = 0;
    for (double X : {1e6, 1e7, 1e8}) {
        auto cfg = RepConfig::sharp(1, 1, X);
        auto t0 = Clock::now();
        auto r = lambda_weighted_sum(cfg, 8);
        t = seconds_since(t0);
        trend += fmt(" X=%.0e ratio %.6f;", X, r.ratio);
        last_ratio = r.ratio;
        last_sum = r.weighted_sum;
        if (X == 1e8) oracle = oracle_lambda_sum(static_cast<u64>(cfg.A), static_cast<u64>(cfg.B));
    }
    bool pinned = last_sum == kPinnedSum1e8;
    bool agrees = std::fabs(oracle / last_sum - 1) < kOracleRelTol;
    report(10, pinned && agrees && t < kPrimeSeconds,
           fmt("sum %a (pinned %a, %s), oracle rel diff %.2e, ratio to X^(5/6) %.12f, %.1f s;%s trend vs prediction 1 is "
               "observational",
               last_sum, kPinnedSum1e8, pinned ? "reproduced" : "differs", std::fabs(oracle / last_sum - 1), last_ratio, t,
               trend.c_str()));
}

void criterion11() {
    auto ladder = square_ladder({50, 100, 200, 400});
    CubicForm f{1, 1};
    auto ones = exponent_scan_weights([](u64) { return 1.0; }, f, 1, ladder);
    auto rnd = random_sign_calibration(f, 1, ladder, 64, 20240101);
    // Real character: deterministic and resumable.
    auto chi = HeckeCharacter::from_index(HeckeFamily::canonical(RealQuadraticField::make(5)), 1, 0);
    auto path = (std::filesystem::temp_directory_path() / "axby_acceptance_scan.ckpt").string();
    std::remove(path.c_str());
    auto first = conjecture_scan(chi, f, 1, 1, ladder);
    auto second = conjecture_scan(chi, f, 1, 1, ladder);
    conjecture_scan(chi, f, 1, 1, {ladder[0], ladder[1]}, 1, path);
    auto resumed = conjecture_scan(chi, f, 1, 1, ladder, 1, path);
    std::remove(path.c_str());
    bool same = first.fit && second.fit && resumed.fit && first.fit->epsilon == second.fit->epsilon &&
                resumed.fit->epsilon == first.fit->epsilon && resumed.resumed == 2;
    for (size_t i = 0; i < ladder.size(); ++i)
        same = same && first.boxes[i].sum_value == second.boxes[i].sum_value &&
               resumed.boxes[i].sum_value == first.boxes[i].sum_value;
    bool ok = std::fabs(ones.epsilon - kCalibOnes) <= kCalibOnesTol && rnd.epsilon <= kCalibRandomMax && same;
    report(11, ok,
           fmt("ones eps %.4f (target %.2f +- %.2f), random +-1 eps %.4f (max %.2f, rms of 64 trials), d=5 l=1 eps %.4f, "
               "rerun/resume %s",
               ones.epsilon, kCalibOnes, kCalibOnesTol, rnd.epsilon, kCalibRandomMax, first.fit ? first.fit->epsilon : NAN,
               same ? "identical" : "DIFFERENT"));
}

std::string read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Everything after the manifest: the "data" member of JSON, the rows of CSV.
std::string data_section(const std::string& text) {
    auto pos = text.find("\n  \"data\": ");
    if (pos != std::string::npos) return text.substr(pos);
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

void criterion12(const std::string& cli) {
    if (cli.empty()) {
        report(12, false, "no CLI path given");
        return;
    }
    const std::vector<std::string> commands = {
        "field scan --max 2000",
        "hecke table --disc 229 --ell 3 --chi 1 --max 5000",
        "analysis poisson-check --q 7 --a 3 --N 1000",
        "arith weil --a 27 --b 4 --pmax 150 --threads 2",
        "arith cubic-count --c 35 --n1 2 --n2 3",
        "conjecture scan --disc 13 --ell 1 --c2 2 --boxes 25:25:4 --threads 2",
        "conjecture calibrate --trials 16",
        "conjecture aggregate --N 10 --threads 2",
        "primes count --X 1e7 --threads 4",
        "primes count --X 1e6 --weight mobius --threads 2",
        "sieve typeI --X 1e6 --dmax 60 --threads 2",
        "buchstab integrals --eps 1/17",
    };
    auto dir = std::filesystem::temp_directory_path() / "axby_acceptance";
    std::filesystem::create_directories(dir);
    int differ = 0, failed = 0;
    for (size_t i = 0; i < commands.size(); ++i) {
        std::string outs[2];
        for (int k = 0; k < 2; ++k) {
            auto file = (dir / ("run" + std::to_string(i) + "_" + std::to_string(k) + ".out")).string();
            std::string cmd = "\"" + cli + "\" " + commands[i] + " --out \"" + file + "\" 2>/dev/null";
            if (std::system(cmd.c_str()) != 0) ++failed;
            outs[k] = data_section(read_file(file));
        }
        if (outs[0].empty() || outs[0] != outs[1]) {
            ++differ;
            std::printf("  differs: %s\n", commands[i].c_str());
        }
    }
    std::filesystem::remove_all(dir);
    report(12, differ == 0 && failed == 0,
           fmt("%zu CLI outputs run twice, %d with differing data sections, %d failed runs", commands.size(), differ, failed));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    run(10, criterion10);
    run(11, criterion11);
    run(12, [&] { criterion12(cli); });
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
