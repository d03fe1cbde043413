#include "axby/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "axby/numtheory.hpp"
#include "axby/parallel.hpp"
#include "axby/quadfield.hpp"

namespace axby {

void CubicForm::validate() const {
    if (c1 <= 0 || c2 <= 0) throw ValidationError("cubic form needs c1, c2 > 0");
}

namespace {

i64 box_side(double B) {
    if (!(B >= 0) || B > 2e6) throw ValidationError("box side must lie in [0, 2e6]");
    return static_cast<i64>(std::floor(B));
}

// Values factored once; each value is a list of indices into a table of distinct prime powers.
struct FactoredBox {
    std::vector<PrimePower> powers;
    std::vector<std::vector<std::uint32_t>> index;
    u64 max_divisor_count = 0;
};

FactoredBox factor_values(const std::vector<u64>& values) {
    FactoredBox fb;
    std::unordered_map<u64, std::uint32_t> seen;  // p * 64 + k
    std::unordered_map<u64, size_t> memo;
    fb.index.resize(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        auto it = memo.find(values[i]);
        if (it != memo.end()) {
            fb.index[i] = fb.index[it->second];
            continue;
        }
        memo.emplace(values[i], i);
        auto f = factorize(values[i]);
        fb.max_divisor_count = std::max(fb.max_divisor_count, divisor_count(f));
        for (auto& pk : f) {
            u64 key = pk.p * 64 + static_cast<u64>(pk.k);
            auto [pos, fresh] = seen.emplace(key, static_cast<std::uint32_t>(fb.powers.size()));
            if (fresh) fb.powers.push_back(pk);
            fb.index[i].push_back(pos->second);
        }
    }
    return fb;
}

std::complex<double> character_sum(const HeckeCharacter& chi, const FactoredBox& fb) {
    std::vector<std::complex<double>> local(fb.powers.size());
    for (size_t j = 0; j < fb.powers.size(); ++j) local[j] = chi.lambda_prime_power(fb.powers[j].p, fb.powers[j].k);
    CompensatedSum<double> re, im;
    for (auto& idx : fb.index) {
        std::complex<double> v{1, 0};
        for (auto j : idx) v *= local[j];
        re.add(v.real());
        im.add(v.imag());
    }
    return {re.value(), im.value()};
}

void check_degenerate(const BoxValues& bv) {
    if (bv.values.empty() && bv.zeros > 0) throw DegenerateForm("every filtered box value is 0");
}

}  // namespace

BoxValues cubic_box_values(const CubicForm& form, i64 a, double B1, double B2, i64 b) {
    form.validate();
    if (a < 1 || b < 1) throw ValidationError("need a, b >= 1");
    const i64 Y1 = box_side(B1), Y2 = box_side(B2);
    BoxValues out;
    const i128 limit = static_cast<i128>(1) << 63;
    for (i64 y1 = 1; y1 <= Y1; ++y1)
        for (i64 y2 = 1; y2 <= Y2; ++y2) {
            i128 c = form(y1, y2);
            if (c % a != 0) continue;
            if (c == 0) {
                ++out.zeros;
                continue;
            }
            if (c < 0) c = -c;
            c = c / a * b;
            if (c >= limit) throw BudgetExceeded("cubic form value exceeds 63 bits");
            out.values.push_back(static_cast<u64>(c));
        }
    return out;
}

ConjectureReport cubic_form_character_sum(const HeckeCharacter& chi, const CubicForm& form, i64 a, double B1,
                                          double B2, i64 b) {
    auto bv = cubic_box_values(form, a, B1, B2, b);
    check_degenerate(bv);
    auto fb = factor_values(bv.values);
    ConjectureReport r;
    r.form = form;
    r.a = a;
    r.b = b;
    r.d = chi.d();
    r.ell = chi.ell();
    r.chi = chi.chi_index();
    r.B1 = B1;
    r.B2 = B2;
    r.sum_value = character_sum(chi, fb);
    r.trivial_bound = static_cast<double>(bv.values.size());
    r.max_divisor_count = fb.max_divisor_count;
    return r;
}

ConjectureReport cubic_form_lambda_sum(const HeckeCharacter& chi, const CubicForm& form, i64 a, double B1, double B2,
                                       i64 b) {
    if (chi.is_trivial()) throw ValidationError("cubic_form_lambda_sum needs a nontrivial character");
    return cubic_form_character_sum(chi, form, a, B1, B2, b);
}

std::complex<double> cubic_form_weight_sum(const std::function<double(u64)>& w, const CubicForm& form, i64 a, double B1,
                                           double B2) {
    auto bv = cubic_box_values(form, a, B1, B2);
    check_degenerate(bv);
    CompensatedSum<double> s;
    for (u64 n : bv.values) s.add(w(n));
    return {s.value(), 0};
}

i64 lambda_one_flat(i64 d, u64 n, double T) {
    if (n == 0) return 0;
    i64 s = 0;
    for (u64 c : divisors(factorize(n)))
        if (static_cast<double>(c) > T) s += kronecker_symbol(d, static_cast<i64>(c));
    return s;
}

FlatReport cubic_form_lambda_flat_sum(i64 d, const CubicForm& form, i64 a, double B1, double B2, double T, double eta,
                                      bool check_window) {
    if (!(eta > 0 && eta < 1)) throw ValidationError("need 0 < eta < 1");
    if (check_window) {
        double top = B1 + B2;
        if (!(T >= std::pow(top, 1 - eta) && T <= top)) throw ValidationError("T outside [(B1+B2)^(1-eta), B1+B2]");
    }
    FlatReport r;
    r.field_disc = field_discriminant_of(d);
    auto bv = cubic_box_values(form, a, B1, B2);
    check_degenerate(bv);
    r.trivial_bound = static_cast<double>(bv.values.size());
    r.envelope = B1 * B1 + B2 * B2;
    std::unordered_map<u64, i64> memo;
    for (u64 n : bv.values) {
        auto it = memo.find(n);
        if (it == memo.end()) it = memo.emplace(n, lambda_one_flat(r.field_disc, n, T)).first;
        r.value += it->second;
    }
    return r;
}

void check_ladder(const std::vector<std::pair<double, double>>& boxes) {
    if (boxes.size() < 4) throw InsufficientLadder("need at least 4 boxes");
    double ratio = (boxes[1].first + boxes[1].second) / (boxes[0].first + boxes[0].second);
    if (!(ratio > 1.05)) throw InsufficientLadder("boxes must grow");
    for (size_t i = 1; i < boxes.size(); ++i) {
        double r = (boxes[i].first + boxes[i].second) / (boxes[i - 1].first + boxes[i - 1].second);
        if (std::fabs(r / ratio - 1) > 0.02) throw InsufficientLadder("boxes are not geometrically spaced");
    }
}

std::vector<std::pair<double, double>> square_ladder(const std::vector<double>& Bs) {
    std::vector<std::pair<double, double>> out;
    for (double B : Bs) out.emplace_back(B, B);
    return out;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& boxes, const std::vector<double>& magnitudes) {
    check_ladder(boxes);
    if (magnitudes.size() != boxes.size()) throw ValidationError("one magnitude per box");
    ExponentFit fit;
    fit.boxes = boxes;
    fit.magnitudes = magnitudes;
    const size_t n = boxes.size();
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(magnitudes[i] > 0)) throw ValidationError("zero sum on the ladder, exponent undefined");
        x[i] = std::log(boxes[i].first + boxes[i].second);
        y[i] = std::log(magnitudes[i]);
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.epsilon = (fit.slope - 1) / 2;
    double rss = 0;
    for (size_t i = 0; i < n; ++i) {
        double e = y[i] - (my + fit.slope * (x[i] - mx));
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

ExponentFit exponent_scan(const HeckeCharacter& chi, const CubicForm& form, i64 a,
                          const std::vector<std::pair<double, double>>& boxes, int threads) {
    check_ladder(boxes);
    std::vector<double> mags(boxes.size());
    parallel_for(boxes.size(), threads, [&](size_t i) {
        mags[i] = std::abs(cubic_form_character_sum(chi, form, a, boxes[i].first, boxes[i].second).sum_value);
    });
    return fit_exponent(boxes, mags);
}

ExponentFit exponent_scan_weights(const std::function<double(u64)>& w, const CubicForm& form, i64 a,
                                  const std::vector<std::pair<double, double>>& boxes) {
    check_ladder(boxes);
    std::vector<double> mags;
    for (auto [B1, B2] : boxes) mags.push_back(std::abs(cubic_form_weight_sum(w, form, a, B1, B2)));
    return fit_exponent(boxes, mags);
}

double random_sign(u64 seed, u64 n) {
    // splitmix64 finalizer on a mixed key
    u64 z = seed * 0x9E3779B97F4A7C15ull + n + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return (z >> 63) ? 1.0 : -1.0;
}

ExponentFit random_sign_calibration(const CubicForm& form, i64 a, const std::vector<std::pair<double, double>>& boxes,
                                    int trials, u64 seed) {
    check_ladder(boxes);
    if (trials < 1) throw ValidationError("trials >= 1");
    std::vector<double> mags;
    for (auto [B1, B2] : boxes) {
        auto bv = cubic_box_values(form, a, B1, B2);
        double ms = 0;
        for (int t = 0; t < trials; ++t) {
            CompensatedSum<double> s;
            for (u64 n : bv.values) s.add(random_sign(seed + static_cast<u64>(t), n));
            ms += s.value() * s.value() / trials;
        }
        mags.push_back(std::sqrt(ms));
    }
    return fit_exponent(boxes, mags);
}

Checkpoint::Checkpoint(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key, tok;
        if (!(ls >> key)) continue;
        std::vector<double> v;
        while (ls >> tok) v.push_back(std::strtod(tok.c_str(), nullptr));
        entries_[key] = std::move(v);
    }
}

std::optional<std::vector<double>> Checkpoint::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void Checkpoint::put(const std::string& key, const std::vector<double>& values) {
    entries_[key] = values;
}

void Checkpoint::flush() const {
    if (path_.empty()) return;
    std::string tmp = path_ + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ValidationError("cannot write checkpoint " + path_);
        char buf[64];
        for (auto& [k, v] : entries_) {
            out << k;
            for (double x : v) {
                std::snprintf(buf, sizeof buf, " %a", x);
                out << buf;
            }
            out << '\n';
        }
    }
    std::rename(tmp.c_str(), path_.c_str());
}

std::vector<std::pair<double, double>> doubling_ladder(double B1, double B2, int steps) {
    if (steps < 1) throw ValidationError("steps >= 1");
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < steps; ++i) out.emplace_back(std::ldexp(B1, i), std::ldexp(B2, i));
    return out;
}

ScanReport conjecture_scan(const HeckeCharacter& chi, const CubicForm& form, i64 a, i64 b,
                           const std::vector<std::pair<double, double>>& boxes, int threads,
                           const std::string& checkpoint) {
    if (chi.is_trivial()) throw ValidationError("conjecture_scan needs a nontrivial character");
    if (boxes.empty()) throw ValidationError("no boxes");
    Checkpoint ck(checkpoint);
    auto key_of = [&](const std::pair<double, double>& B) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%lld,%lld,%d,%lld,%lld,%lld,%lld,%a,%a", static_cast<long long>(chi.d()),
                      static_cast<long long>(chi.ell()), chi.chi_index(), static_cast<long long>(form.c1),
                      static_cast<long long>(form.c2), static_cast<long long>(a), static_cast<long long>(b), B.first,
                      B.second);
        return std::string(buf);
    };
    ScanReport out;
    out.boxes.resize(boxes.size());
    std::vector<size_t> todo;
    for (size_t i = 0; i < boxes.size(); ++i) {
        auto saved = ck.get(key_of(boxes[i]));
        if (saved && saved->size() == 4) {
            auto& r = out.boxes[i];
            r.form = form;
            r.a = a;
            r.b = b;
            r.d = chi.d();
            r.ell = chi.ell();
            r.chi = chi.chi_index();
            r.B1 = boxes[i].first;
            r.B2 = boxes[i].second;
            r.sum_value = {(*saved)[0], (*saved)[1]};
            r.trivial_bound = (*saved)[2];
            r.max_divisor_count = static_cast<u64>((*saved)[3]);
            ++out.resumed;
        } else {
            todo.push_back(i);
        }
    }
    // Batches of `threads` boxes; finished batches are flushed before the next one starts.
    const size_t batch = static_cast<size_t>(std::max(1, threads));
    for (size_t start = 0; start < todo.size(); start += batch) {
        size_t n = std::min(batch, todo.size() - start);
        parallel_for(n, threads, [&](size_t j) {
            size_t i = todo[start + j];
            out.boxes[i] = cubic_form_lambda_sum(chi, form, a, boxes[i].first, boxes[i].second, b);
        });
        for (size_t j = 0; j < n; ++j) {
            auto& r = out.boxes[todo[start + j]];
            ck.put(key_of({r.B1, r.B2}), {r.sum_value.real(), r.sum_value.imag(), r.trivial_bound,
                                          static_cast<double>(r.max_divisor_count)});
        }
        ck.flush();
    }
    if (boxes.size() >= 4) {
        try {
            check_ladder(boxes);
            std::vector<double> mags;
            for (auto& r : out.boxes) mags.push_back(std::abs(r.sum_value));
            out.fit = fit_exponent(boxes, mags);
            for (auto& r : out.boxes) r.fitted_exponent = out.fit->epsilon;
        } catch (const InsufficientLadder&) {
        }
    }
    return out;
}

std::vector<std::pair<i64, i64>> large_sieve_pairs(i64 N) {
    std::vector<i64> odd_sf;
    for (i64 n = 1; n <= N; n += 2)
        if (mobius(factorize(static_cast<u64>(n))) != 0) odd_sf.push_back(n);
    std::vector<std::pair<i64, i64>> out;
    for (i64 n1 : odd_sf)
        for (i64 n2 : odd_sf)
            if (n1 * n2 > 1 && gcd64(n1, n2) == 1) out.emplace_back(n1, n2);
    return out;
}

namespace {

std::string pair_key(i64 n1, i64 n2) {
    return std::to_string(n1) + ":" + std::to_string(n2);
}

}  // namespace

LargeSieveReport large_sieve_aggregate(const LargeSieveConfig& cfg) {
    if (cfg.N < 1) throw ValidationError("N >= 1");
    if (cfg.a < 1 || cfg.b < 1 || gcd64(cfg.a, cfg.b) != 1) throw ValidationError("need coprime a, b >= 1");
    if (!(cfg.ell_cap_factor >= 0)) throw ValidationError("ell_cap_factor >= 0");
    if (!(cfg.eta > 0 && cfg.eta < 1)) throw ValidationError("need 0 < eta < 1");
    const double T = cfg.T > 0 ? cfg.T : cfg.B1 + cfg.B2;
    const i64 Y1 = box_side(cfg.B1), Y2 = box_side(cfg.B2);

    LargeSieveReport rep;
    rep.envelope = std::pow(static_cast<double>(cfg.N), 2 - cfg.eta) * (cfg.B1 + cfg.B2) * (cfg.B1 + cfg.B2);
    Checkpoint ck(cfg.checkpoint);
    double work = 0;
    CompensatedSum<double> total;
    for (auto [n1, n2] : large_sieve_pairs(cfg.N)) {
        PairTerm pt;
        pt.n1 = n1;
        pt.n2 = n2;
        const std::string key = pair_key(n1, n2);
        if (auto saved = ck.get(key); saved && saved->size() == 5) {
            pt.field_disc = static_cast<i64>((*saved)[0]);
            pt.characters = static_cast<int>((*saved)[1]);
            pt.ell_max = static_cast<i64>((*saved)[2]);
            pt.value = (*saved)[3];
            rep.terms += static_cast<u64>((*saved)[4]);
            pt.resumed = true;
            total.add(pt.value);
            rep.pairs.push_back(pt);
            continue;
        }
        auto field = RealQuadraticField::make(field_discriminant_of(n1 * n2));
        auto family = HeckeFamily::canonical(field);
        pt.field_disc = field->d();
        const int h = family->character_count();
        pt.ell_max = static_cast<i64>(
            std::floor(cfg.ell_cap_factor * std::pow(static_cast<double>(cfg.N), cfg.eta) * static_cast<double>(field->regulator())));
        const int cells = h * static_cast<int>(2 * pt.ell_max + 1);
        pt.characters = cells;

        // Values (b/a)|n1 y2^3 - n2 y1^3| with n1 y2^3 = n2 y1^3 mod a.
        std::vector<u64> values;
        const i128 limit = static_cast<i128>(1) << 63;
        for (i64 y1 = 1; y1 <= Y1; ++y1)
            for (i64 y2 = 1; y2 <= Y2; ++y2) {
                i128 c = static_cast<i128>(n1) * y2 * y2 * y2 - static_cast<i128>(n2) * y1 * y1 * y1;
                if (c % cfg.a != 0 || c == 0) continue;
                if (c < 0) c = -c;
                c = c / cfg.a * cfg.b;
                if (c >= limit) throw BudgetExceeded("aggregate value exceeds 63 bits");
                values.push_back(static_cast<u64>(c));
            }
        const double pair_work = static_cast<double>(cells) * static_cast<double>(values.size());
        if (work + pair_work > cfg.max_work) {
            ck.flush();
            throw BudgetExceeded("large_sieve_aggregate: work budget exhausted at pair " + key +
                                 (ck.enabled() ? ", partial results checkpointed" : ""));
        }
        work += pair_work;
        auto fb = factor_values(values);

        std::vector<double> cell_abs(static_cast<size_t>(cells));
        parallel_for(cell_abs.size(), cfg.threads, [&](size_t c) {
            const i64 ell = static_cast<i64>(c / h) - pt.ell_max;
            auto chi = HeckeCharacter::from_index(family, ell, static_cast<int>(c % h));
            if (chi.is_trivial()) {
                std::unordered_map<u64, i64> memo;
                i64 s = 0;
                for (u64 n : values) {
                    auto it = memo.find(n);
                    if (it == memo.end()) it = memo.emplace(n, lambda_one_flat(pt.field_disc, n, T)).first;
                    s += it->second;
                }
                cell_abs[c] = std::fabs(static_cast<double>(s));
            } else {
                cell_abs[c] = std::abs(character_sum(chi, fb));
            }
        });
        CompensatedSum<double> ps;
        for (double v : cell_abs) ps.add(v);
        pt.value = ps.value();
        rep.terms += static_cast<u64>(cells);
        total.add(pt.value);
        rep.pairs.push_back(pt);
        ck.put(key, {static_cast<double>(pt.field_disc), static_cast<double>(pt.characters),
                     static_cast<double>(pt.ell_max), pt.value, static_cast<double>(cells)});
    }
    ck.flush();
    rep.value = total.value();
    return rep;
}

u64 upsilon_count(i64 n1, i64 n2, i64 m, double B, i64 a, i64 b) {
    if (n1 < 1 || n2 < 1 || a < 1 || b < 1) throw ValidationError("upsilon_count: positive parameters");
    if (!(B >= 0)) throw ValidationError("upsilon_count: B >= 0");
    const i64 lo = static_cast<i64>(std::floor(B)) + 1, hi = static_cast<i64>(std::floor(2 * B));
    u64 count = 0;
    const i128 am = static_cast<i128>(a) * m;
    for (i64 y1 = lo; y1 <= hi; ++y1) {
        // n1 b y2^3 = a m + n2 b y1^3
        i128 rhs = am + static_cast<i128>(n2) * b * y1 * y1 * y1;
        i128 den = static_cast<i128>(n1) * b;
        if (rhs <= 0 || rhs % den != 0) continue;
        i128 cube = rhs / den;
        if (cube >= (static_cast<i128>(1) << 63)) continue;
        auto r = exact_root(static_cast<u64>(cube), 3);
        if (r && static_cast<i64>(*r) >= lo && static_cast<i64>(*r) <= hi) ++count;
    }
    return count;
}

}  // namespace axby
