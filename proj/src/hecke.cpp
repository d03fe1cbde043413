#include "axby/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "axby/numtheory.hpp"

namespace axby {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

long double mod_r(long double x, long double R) {
    long double y = std::fmod(x, R);
    return y < 0 ? y + R : y;
}

long double frac_centered(long double x) {
    return x - std::nearbyint(x);
}

}  // namespace

std::complex<double> unit_phase(long double x) {
    long double f = frac_centered(x);
    if (f == 0) return {1.0, 0.0};
    if (f == 0.5L || f == -0.5L) return {-1.0, 0.0};
    if (f == 0.25L || f == -0.25L) return {0.0, f > 0 ? 1.0 : -1.0};
    long double ang = 2 * kPi * f;
    return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

HyperbolicCoords hyperbolic_coords(const BigQuadElement& z) {
    if (z.u == 0 && z.v == 0) throw ZeroElement("hyperbolic_coords: zero element");
    long double lz = z.log_abs();
    long double lc = z.log_abs_conjugate();
    HyperbolicCoords c;
    c.alpha = 0.5L * (lz - lc);
    c.r = z.sign() * std::exp(0.5L * (lz + lc));
    return c;
}

HyperbolicCoords hyperbolic_coords(const QuadElement& z) {
    return hyperbolic_coords(BigQuadElement{z.u, z.v, z.d});
}

std::pair<long double, long double> reconstruct(const HyperbolicCoords& c, int norm_sign) {
    long double z = c.r * std::exp(c.alpha);
    long double zs = norm_sign * c.r * std::exp(-c.alpha);
    return {z, zs};
}

QuadIdeal principal_ideal(const QuadElement& z) {
    if (z.is_zero()) throw ZeroElement("principal_ideal: zero element");
    const i64 d = z.d;
    const i64 delta = d & 1;
    // Coordinates in the basis {1, (delta + sqrt d)/2}: (u + v sqrt d)/2 -> ((u - v delta)/2, v).
    auto coords = [&](i128 u, i128 v) { return std::pair<i128, i128>{(u - v * delta) / 2, v}; };
    // z * (delta + sqrt d)/2 = ((u delta + v d)/2 + (u + v delta)/2 sqrt d)/2
    auto [x1, y1] = coords(z.u, z.v);
    auto [x2, y2] = coords((static_cast<i128>(z.u) * delta + static_cast<i128>(z.v) * d) / 2,
                           (static_cast<i128>(z.u) + static_cast<i128>(z.v) * delta) / 2);
    i128 det = x1 * y2 - x2 * y1;
    if (det < 0) det = -det;
    i64 s, cx, cy;
    s = ext_gcd(static_cast<i64>(y1), static_cast<i64>(y2), cx, cy);
    i128 xs = cx * x1 + cy * x2;
    i128 a = det / (static_cast<i128>(s) * s);
    i128 b = 2 * (xs / s) + delta;
    return QuadIdeal::make(static_cast<i64>(a), static_cast<i64>(mod_floor(static_cast<i64>(b % (2 * a)), static_cast<i64>(2 * a))), s, d);
}

std::vector<QuadIdeal> prime_ideals_above(i64 d, u64 p) {
    int k = kronecker_symbol(d, static_cast<i64>(p));
    if (k == -1) return {};
    std::vector<QuadIdeal> out;
    const i64 P = static_cast<i64>(p);
    if (p == 2) {
        for (i64 b = 0; b < 4; ++b)
            if (mod_floor(b * b - d, 8) == 0) out.push_back(QuadIdeal::make(2, b, 1, d));
    } else if (k == 0) {
        out.push_back(QuadIdeal::make(P, (d & 1) ? P : 0, 1, d));
    } else {
        u64 r = *sqrt_mod_prime(static_cast<u64>(mod_floor(d, P)), p);
        i64 b = static_cast<i64>(r);
        if (((b - d) & 1) != 0) b += P;
        out.push_back(QuadIdeal::make(P, b, 1, d));
        out.push_back(QuadIdeal::make(P, -b, 1, d));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<QuadIdeal> ideals_of_norm(i64 d, u64 n) {
    if (n == 0) throw ValidationError("ideals_of_norm: n >= 1");
    std::vector<QuadIdeal> acc{QuadIdeal::unit(d)};
    for (auto& pk : factorize(n)) {
        std::vector<QuadIdeal> local;
        auto primes = prime_ideals_above(d, pk.p);
        auto power = [&](const QuadIdeal& I, int e) {
            QuadIdeal r = QuadIdeal::unit(d);
            for (int i = 0; i < e; ++i) r = multiply(r, I);
            return r;
        };
        if (primes.empty()) {
            if (pk.k % 2 == 0) {
                i64 s = 1;
                for (int i = 0; i < pk.k / 2; ++i) s *= static_cast<i64>(pk.p);
                local.push_back(QuadIdeal::make(1, d & 1, s, d));
            }
        } else if (primes.size() == 1) {
            local.push_back(power(primes[0], pk.k));
        } else {
            for (int i = 0; i <= pk.k; ++i) local.push_back(multiply(power(primes[0], i), power(primes[1], pk.k - i)));
        }
        std::vector<QuadIdeal> next;
        for (auto& x : acc)
            for (auto& y : local) next.push_back(multiply(x, y));
        acc.swap(next);
        if (acc.empty()) break;
    }
    std::sort(acc.begin(), acc.end());
    return acc;
}

HeckeFamily::HeckeFamily(std::shared_ptr<const RealQuadraticField> field, Anchors anchors)
    : field_(std::move(field)), anchors_(std::move(anchors)) {
    const auto& G = field_->group();
    const long double R = field_->regulator();
    const size_t r = anchors_.basis.size();
    if (anchors_.ref_pos.size() != static_cast<size_t>(G.h) || anchors_.orders.size() != r ||
        anchors_.branch.size() != r)
        throw ValidationError("HeckeFamily: inconsistent anchors");
    // Exponent table for the anchor basis.
    exps_.assign(G.h, {});
    std::vector<int> e(r, 0);
    int seen = 0;
    std::function<void(size_t, int)> rec = [&](size_t i, int cls) {
        if (i == r) {
            if (!exps_[cls].empty() || (r == 0 && seen > 0)) throw ValidationError("HeckeFamily: basis not free");
            exps_[cls] = e;
            ++seen;
            return;
        }
        int x = cls;
        for (int k = 0; k < anchors_.orders[i]; ++k) {
            e[i] = k;
            rec(i + 1, x);
            x = G.compose(x, anchors_.basis[i]);
        }
        e[i] = 0;
    };
    rec(0, 0);
    if (seen != G.h) throw ValidationError("HeckeFamily: basis does not span");

    auto ref = [&](int cls) { return Tracked{cls, anchors_.ref_pos[cls], 0.0L}; };
    Gamma_.assign(r, 0);
    for (size_t i = 0; i < r; ++i) {
        Tracked t{0, field_->unit_position(), 0.0L};
        for (int j = 0; j < anchors_.orders[i]; ++j) t = compose(t, ref(anchors_.basis[i]));
        if (t.cls != 0) throw std::logic_error("HeckeFamily: b^n not principal");
        Gamma_[i] = mod_r(tracked_principal_alpha(t), R);
    }
    A_.assign(G.h, 0);
    for (int c = 0; c < G.h; ++c) {
        Tracked t = ref(c);
        for (size_t i = 0; i < r; ++i) {
            Tracked conj = track(reduced_ideal(anchors_.basis[i], anchors_.ref_pos[anchors_.basis[i]]).conjugate());
            for (int j = 0; j < exps_[c][i]; ++j) t = compose(t, conj);
        }
        if (t.cls != 0) throw std::logic_error("HeckeFamily: anchor product not principal");
        A_[c] = mod_r(tracked_principal_alpha(t), R);
    }
}

std::shared_ptr<const HeckeFamily> HeckeFamily::canonical(std::shared_ptr<const RealQuadraticField> field) {
    const auto& G = field->group();
    Anchors a;
    a.ref_pos.assign(G.h, 0);
    a.basis = G.basis;
    a.orders = G.structure;
    a.branch.assign(G.basis.size(), 0);
    return with_anchors(std::move(field), std::move(a));
}

std::shared_ptr<const HeckeFamily> HeckeFamily::with_anchors(std::shared_ptr<const RealQuadraticField> field,
                                                             Anchors anchors) {
    return std::shared_ptr<const HeckeFamily>(new HeckeFamily(std::move(field), std::move(anchors)));
}

std::shared_ptr<const HeckeFamily> HeckeFamily::reanchored(std::mt19937_64& rng) const {
    const auto& G = field_->group();
    Anchors a;
    a.orders = G.structure;
    for (int c = 0; c < G.h; ++c) {
        auto len = field_->cycles()[c].ideals.size();
        a.ref_pos.push_back(static_cast<int>(rng() % len));
    }
    // Random basis with the same invariant factors: random elements of the right
    // orders, accepted when they generate the group freely.
    a.basis = G.basis;
    for (int attempt = 0; attempt < 2000 && !G.basis.empty(); ++attempt) {
        std::vector<int> cand;
        for (int n : a.orders) {
            std::vector<int> pool;
            for (int x = 0; x < G.h; ++x)
                if (G.order(x) == n) pool.push_back(x);
            cand.push_back(pool[rng() % pool.size()]);
        }
        std::set<int> span;
        std::vector<int> e(cand.size(), 0);
        std::function<void(size_t, int)> rec = [&](size_t i, int cls) {
            if (i == cand.size()) {
                span.insert(cls);
                return;
            }
            int x = cls;
            for (int k = 0; k < a.orders[i]; ++k) {
                rec(i + 1, x);
                x = G.compose(x, cand[i]);
            }
        };
        rec(0, 0);
        if (static_cast<int>(span.size()) == G.h) {
            a.basis = cand;
            break;
        }
    }
    for (int n : a.orders) a.branch.push_back(static_cast<int>(rng() % static_cast<u64>(n)));
    return with_anchors(field_, std::move(a));
}

QuadIdeal HeckeFamily::reduced_ideal(int cls, int pos) const {
    auto [a, b] = field_->cycles()[cls].ideals[pos];
    return QuadIdeal::make(a, b, 1, field_->d());
}

HeckeFamily::Tracked HeckeFamily::track(const QuadIdeal& I) const {
    auto loc = field_->locate(I);
    return {loc.cls, loc.pos, loc.dist};
}

HeckeFamily::Tracked HeckeFamily::compose(const Tracked& x, const Tracked& y) const {
    QuadIdeal p = multiply(reduced_ideal(x.cls, x.pos), reduced_ideal(y.cls, y.pos));
    auto loc = field_->locate(p);
    return {loc.cls, loc.pos, x.dist + y.dist + loc.dist};
}

long double HeckeFamily::tracked_principal_alpha(const Tracked& t) const {
    const auto& off = field_->cycles()[0].offsets;
    return t.dist + off[t.pos] - off[field_->unit_position()];
}

long double HeckeFamily::principal_alpha(const QuadIdeal& I) const {
    Tracked t = track(I);
    if (t.cls != 0) throw ValidationError("principal_alpha: ideal is not principal");
    return mod_r(tracked_principal_alpha(t), field_->regulator());
}

IdealPhase HeckeFamily::phase_data(const QuadIdeal& I) const {
    auto loc = field_->locate(I);
    const auto& cyc = field_->cycles()[loc.cls];
    const long double R = field_->regulator();
    long double t = loc.dist + cyc.offsets[loc.pos] - cyc.offsets[anchors_.ref_pos[loc.cls]];
    long double x = mod_r(t + A_[loc.cls], R);
    const auto& e = exps_[loc.cls];
    long double theta = x / R;
    for (size_t i = 0; i < e.size(); ++i) theta += e[i] * Gamma_[i] / (anchors_.orders[i] * R);
    return {theta, loc.cls};
}

std::vector<IdealPhase> HeckeFamily::prime_phases(u64 p) const {
    std::vector<IdealPhase> out;
    for (auto& P : prime_ideals_above(field_->d(), p)) out.push_back(phase_data(P));
    return out;
}

HeckeCharacter::HeckeCharacter(std::shared_ptr<const HeckeFamily> family, i64 ell, std::vector<int> k)
    : family_(std::move(family)), ell_(ell), k_(std::move(k)) {
    const auto& orders = family_->anchors().orders;
    if (k_.empty()) k_.assign(orders.size(), 0);
    if (k_.size() != orders.size()) throw ValidationError("HeckeCharacter: label length mismatch");
    for (size_t i = 0; i < k_.size(); ++i) k_[i] = static_cast<int>(mod_floor(k_[i], orders[i]));
    if (std::fabs(static_cast<long double>(ell_)) > 1e6L)
        throw ValidationError("HeckeCharacter: |ell| above 1e6 exceeds the phase precision budget");
}

HeckeCharacter HeckeCharacter::from_index(std::shared_ptr<const HeckeFamily> family, i64 ell, int chi_index) {
    const auto& orders = family->anchors().orders;
    int h = family->character_count();
    if (chi_index < 0 || chi_index >= h) throw ValidationError("chi index out of range");
    std::vector<int> k;
    for (int n : orders) {
        k.push_back(chi_index % n);
        chi_index /= n;
    }
    return {std::move(family), ell, std::move(k)};
}

int HeckeCharacter::chi_index() const {
    const auto& orders = family_->anchors().orders;
    int idx = 0;
    for (size_t i = orders.size(); i-- > 0;) idx = idx * orders[i] + k_[i];
    return idx;
}

bool HeckeCharacter::is_trivial() const {
    if (ell_ != 0) return false;
    const auto& a = family_->anchors();
    for (size_t i = 0; i < k_.size(); ++i)
        if ((k_[i] + a.branch[i]) % a.orders[i] != 0) return false;
    return true;
}

long double HeckeCharacter::phase(const IdealPhase& ph) const {
    const auto& a = family_->anchors();
    const auto& e = family_->exponents(ph.cls);
    long double x = ell_ == 0 ? 0.0L : frac_centered(static_cast<long double>(ell_) * ph.theta);
    // Rational part as one exact fraction num / L, centered so that the conjugate
    // character produces exactly -x.
    i64 L = 1;
    for (int n : a.orders) L = L / gcd64(L, n) * n;
    i64 num = 0;
    for (size_t i = 0; i < e.size(); ++i)
        num = (num + static_cast<i64>(e[i]) * (a.branch[i] + k_[i]) % a.orders[i] * (L / a.orders[i])) % L;
    num = mod_floor(num, L);
    if (2 * num > L || (2 * num == L && x < 0)) num -= L;
    if (num) x += static_cast<long double>(num) / static_cast<long double>(L);
    return x;
}

std::complex<double> HeckeCharacter::operator()(const QuadIdeal& I) const {
    return unit_phase(phase(family_->phase_data(I)));
}

std::complex<double> HeckeCharacter::lambda_prime_power(u64 p, int k) const {
    if (k == 0) return {1, 0};
    auto ph = family_->prime_phases(p);
    if (ph.empty()) return (k % 2 == 0) ? std::complex<double>{1, 0} : std::complex<double>{0, 0};
    if (ph.size() == 1) return unit_phase(k * phase(ph[0]));
    long double t1 = phase(ph[0]), t2 = phase(ph[1]);
    std::complex<double> s{0, 0};
    for (int i = 0; i <= k; ++i) s += unit_phase(i * t1 + (k - i) * t2);
    return s;
}

std::complex<double> HeckeCharacter::lambda(u64 n) const {
    if (n == 0) return {0, 0};
    std::complex<double> r{1, 0};
    for (auto& pk : factorize(n)) r *= lambda_prime_power(pk.p, pk.k);
    return r;
}

HeckeCharacter HeckeCharacter::conjugate() const {
    const auto& a = family_->anchors();
    std::vector<int> k(k_.size());
    for (size_t i = 0; i < k.size(); ++i) k[i] = static_cast<int>(mod_floor(-k_[i] - 2 * a.branch[i], a.orders[i]));
    return {family_, -ell_, k};
}

EigenvalueTable::EigenvalueTable(const HeckeCharacter& chi, std::uint32_t n_max) {
    auto st = linear_sieve(n_max);
    values_.assign(static_cast<size_t>(n_max) + 1, {0, 0});
    if (n_max >= 1) values_[1] = {1, 0};
    for (std::uint32_t n = 2; n <= n_max; ++n) {
        std::uint32_t p = st.spf[n];
        std::uint32_t m = n;
        int k = 0;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        values_[n] = (m == 1) ? chi.lambda_prime_power(p, k) : values_[n / m] * values_[m];
    }
}

std::complex<double> lambda(const HeckeCharacter& chi, u64 n) {
    return chi.lambda(n);
}

i64 lambda_one(i64 d, u64 n) {
    if (n == 0) return 0;
    i64 s = 0;
    for (u64 c : divisors(factorize(n))) s += kronecker_symbol(d, static_cast<i64>(c));
    return s;
}

i64 lambda_one_sharp(i64 d, u64 n, double T) {
    if (n == 0) return 0;
    i64 s = 0;
    for (u64 c : divisors(factorize(n)))
        if (static_cast<double>(c) <= T) s += kronecker_symbol(d, static_cast<i64>(c));
    return s;
}

std::complex<double> lambda_flat(const HeckeCharacter& chi, u64 n, double T) {
    if (n == 0) return {0, 0};
    if (!chi.is_trivial()) return chi.lambda(n);
    return chi.lambda(n) - std::complex<double>(static_cast<double>(lambda_one_sharp(chi.d(), n, T)), 0);
}

std::complex<double> smooth_lambda_sum(const HeckeCharacter& chi, u64 q, double N, const SmoothBump& f) {
    if (q == 0) throw ValidationError("smooth_lambda_sum: q >= 1");
    u64 n0 = static_cast<u64>(std::max(1.0, std::floor(N * f.lo())));
    u64 n1 = static_cast<u64>(std::max(0.0, std::ceil(N * f.hi())));
    if (n1 < n0 || N * f.hi() < 1) return {0, 0};
    u64 top = q * n1;
    if (top > 200'000'000ull) throw BudgetExceeded("smooth_lambda_sum: q N above table budget");
    EigenvalueTable tab(chi, static_cast<std::uint32_t>(top));
    CompensatedSum<double> re, im;
    for (u64 n = n0; n <= n1; ++n) {
        double w = f(static_cast<double>(n) / N);
        if (w == 0) continue;
        auto v = tab[static_cast<std::uint32_t>(q * n)];
        re.add(w * v.real());
        im.add(w * v.imag());
    }
    return {re.value(), im.value()};
}

FlatSumResult lambda_flat_smooth_sum(i64 d, u64 q, double N, double T, const SmoothBump& f, double nu) {
    if (!(nu > 0 && nu < f.delta())) throw ValidationError("lambda_flat_smooth_sum: need 0 < nu < delta");
    FlatSumResult out;
    out.envelope = (static_cast<double>(q) * N / T) * std::sqrt(static_cast<double>(d)) / nu + nu * N;
    u64 n0 = static_cast<u64>(std::max(1.0, std::floor(N * f.lo())));
    u64 n1 = static_cast<u64>(std::max(0.0, std::ceil(N * f.hi())));
    if (n1 < n0) return out;
    u64 top = q * n1;
    if (top > 200'000'000ull) throw BudgetExceeded("lambda_flat_smooth_sum: q N above budget");
    auto st = linear_sieve(static_cast<std::uint32_t>(top));
    CompensatedSum<double> acc;
    std::vector<u64> divs;
    for (u64 n = n0; n <= n1; ++n) {
        double w = f(static_cast<double>(n) / N);
        if (w == 0) continue;
        u64 m = q * n;
        divs.assign(1, 1);
        u64 x = m;
        while (x > 1) {
            u64 p = st.spf[x];
            int k = 0;
            while (x % p == 0) {
                x /= p;
                ++k;
            }
            size_t cur = divs.size();
            u64 pp = 1;
            for (int i = 0; i < k; ++i) {
                pp *= p;
                for (size_t j = 0; j < cur; ++j) divs.push_back(divs[j] * pp);
            }
        }
        i64 s = 0;
        for (u64 c : divs)
            if (static_cast<double>(c) > T) s += kronecker_symbol(d, static_cast<i64>(c));
        acc.add(w * static_cast<double>(s));
    }
    out.value = acc.value();
    return out;
}

}  // namespace axby
