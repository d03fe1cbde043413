#include "axby/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "axby/numtheory.hpp"

namespace axby {

namespace {

bool squarefree(u64 n) {
    for (auto& pk : factorize(n))
        if (pk.k > 1) return false;
    return true;
}

long double big_log(const BigInt& x) {
    BigInt a = abs(x);
    if (a == 0) return -INFINITY;
    unsigned msb = boost::multiprecision::msb(a);
    if (msb < 62) return std::log(a.convert_to<long double>());
    unsigned shift = msb - 62;
    BigInt top = a >> shift;
    return std::log(top.convert_to<long double>()) + shift * std::log(2.0L);
}

// log|u + v sqrt d| when u and v have the same sign (no cancellation).
long double log_sum_same_sign(const BigInt& u, const BigInt& v, i64 d) {
    BigInt au = abs(u), av = abs(v);
    unsigned msb = std::max(au == 0 ? 0u : boost::multiprecision::msb(au),
                            av == 0 ? 0u : boost::multiprecision::msb(av));
    unsigned shift = msb > 62 ? msb - 62 : 0;
    long double U = BigInt(au >> shift).convert_to<long double>();
    long double V = BigInt(av >> shift).convert_to<long double>();
    return std::log(U + V * std::sqrt(static_cast<long double>(d))) + shift * std::log(2.0L);
}

int sgn(const BigInt& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

bool is_fundamental_discriminant(i64 d) {
    if (d <= 1) return false;
    if ((d & 3) == 1) return squarefree(static_cast<u64>(d));
    if ((d & 3) == 0) {
        i64 m = d / 4;
        if ((m & 3) != 2 && (m & 3) != 3) return false;
        return squarefree(static_cast<u64>(m));
    }
    return false;
}

int kronecker_symbol(i64 a, i64 b) {
    static constexpr int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
    if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (b & 1) == 0) return 0;
    int v = 0;
    while ((b & 1) == 0) {
        ++v;
        b >>= 1;
    }
    int k = (v & 1) ? tab2[a & 7] : 1;
    if (b < 0) {
        b = -b;
        if (a < 0) k = -k;
    }
    while (true) {
        if (a == 0) return b > 1 ? 0 : k;
        v = 0;
        while ((a & 1) == 0) {
            ++v;
            a >>= 1;
        }
        if (v & 1) k *= tab2[b & 7];
        if (a & b & 2) k = -k;
        i64 r = a < 0 ? -a : a;
        a = b % r;
        b = r;
    }
}

FundamentalDiscriminant::FundamentalDiscriminant(i64 d) : d_(d), sqrt_(0) {
    if (!is_fundamental_discriminant(d))
        throw ValidationError("not a fundamental discriminant: " + std::to_string(d));
    sqrt_ = isqrt(static_cast<u64>(d));
}

i64 field_discriminant_of(i64 n) {
    if (n <= 1) throw ValidationError("field_discriminant_of: need n > 1");
    i64 core = 1;
    for (auto& pk : factorize(static_cast<u64>(n)))
        if (pk.k & 1) core *= static_cast<i64>(pk.p);
    if (core == 1) throw ValidationError("field_discriminant_of: square argument");
    return (core & 3) == 1 ? core : 4 * core;
}

QuadElement QuadElement::make(i64 u, i64 v, i64 d) {
    if (((u - v * (d & 1)) & 1) != 0) throw ValidationError("QuadElement: u and v*d differ in parity");
    return {u, v, d};
}

i64 QuadElement::norm() const {
    i128 n = static_cast<i128>(u) * u - static_cast<i128>(d) * v * v;
    n /= 4;
    if (n > INT64_MAX || n < INT64_MIN) throw OverflowUnit("QuadElement::norm overflow");
    return static_cast<i64>(n);
}

long double QuadElement::value() const {
    long double s = std::sqrt(static_cast<long double>(d));
    if ((u >= 0) == (v >= 0) || u == 0 || v == 0) return (u + v * s) / 2;
    long double n4 = static_cast<long double>(static_cast<i128>(u) * u - static_cast<i128>(d) * v * v);
    return n4 / (2 * (u - v * s));
}

long double QuadElement::conjugate_value() const {
    return conjugate().value();
}

long double BigQuadElement::log_abs() const {
    if (u == 0 && v == 0) throw ZeroElement("log of zero element");
    if (sgn(u) * sgn(v) >= 0) return log_sum_same_sign(u, v, d) - std::log(2.0L);
    // |u + v sqrt d| = |u^2 - d v^2| / |u - v sqrt d|
    BigInt n4 = u * u - BigInt(d) * v * v;
    return big_log(n4) - log_sum_same_sign(u, -v, d) - std::log(2.0L);
}

long double BigQuadElement::log_abs_conjugate() const {
    return conjugate().log_abs();
}

int BigQuadElement::sign() const {
    if (sgn(u) * sgn(v) >= 0) return sgn(u) != 0 ? sgn(u) : sgn(v);
    // sign of u + v sqrt d is sign(u) iff u^2 > d v^2
    BigInt n4 = u * u - BigInt(d) * v * v;
    return n4 > 0 ? sgn(u) : sgn(v);
}

std::optional<QuadElement> UnitData::epsilon64() const {
    if (abs(epsilon.u) > BigInt(INT64_MAX) || abs(epsilon.v) > BigInt(INT64_MAX)) return std::nullopt;
    return QuadElement{epsilon.u.convert_to<i64>(), epsilon.v.convert_to<i64>(), epsilon.d};
}

namespace {

inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowUnit("fundamental unit exceeds 64 bits");
    return r;
}
inline i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowUnit("fundamental unit exceeds 64 bits");
    return r;
}
inline BigInt checked_mul(const BigInt& a, const BigInt& b) { return a * b; }
inline BigInt checked_add(const BigInt& a, const BigInt& b) { return a + b; }

// Continued fraction of omega = (P0 + sqrt d)/Q0; the first convergent x/y whose
// element has norm +-1 gives the fundamental unit.
template <class Int>
UnitData unit_by_continued_fraction(i64 d) {
    const i64 s = static_cast<i64>(isqrt(static_cast<u64>(d)));
    const bool one_mod_4 = (d & 3) == 1;
    i64 P = one_mod_4 ? 1 : 0;
    i64 Q = 2;
    Int p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
    for (long iter = 0; iter < 100'000'000L; ++iter) {
        i64 num = P + s;
        i64 a = Q > 0 ? floor_div(num, Q) : -(floor_div(num, -Q) + 1);
        Int p = checked_add(checked_mul(Int(a), p_prev), p_prev2);
        Int q = checked_add(checked_mul(Int(a), q_prev), q_prev2);
        BigInt x(p), y(q);
        BigInt u = one_mod_4 ? BigInt(2 * x - y) : BigInt(2 * x);
        BigInt v = y;
        BigInt n4 = u * u - BigInt(d) * v * v;
        if (n4 == 4 || n4 == -4) {
            if constexpr (std::is_same_v<Int, i64>) {
                if (abs(u) > BigInt(INT64_MAX)) throw OverflowUnit("fundamental unit exceeds 64 bits");
            }
            UnitData out;
            out.epsilon = BigQuadElement{abs(u), abs(v), d};
            out.norm_sign = n4 > 0 ? 1 : -1;
            out.regulator = out.epsilon.log_abs();
            return out;
        }
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;
        i64 P_next = a * Q - P;
        i64 Q_next = (d - P_next * P_next) / Q;
        P = P_next;
        Q = Q_next;
    }
    throw CeilingExceeded("fundamental unit: continued fraction did not terminate");
}

}  // namespace

UnitData fundamental_unit_64(const FundamentalDiscriminant& D) {
    return unit_by_continued_fraction<i64>(D.value());
}

UnitData fundamental_unit(const FundamentalDiscriminant& D) {
    try {
        return unit_by_continued_fraction<i64>(D.value());
    } catch (const OverflowUnit&) {
        UnitData u = unit_by_continued_fraction<BigInt>(D.value());
        u.promoted = true;
        return u;
    }
}

QuadIdeal QuadIdeal::make(i64 a, i64 b, i64 scale, i64 d) {
    if (a <= 0 || scale <= 0) throw ValidationError("QuadIdeal: a and scale must be positive");
    i128 diff = static_cast<i128>(b) * b - d;
    if (diff % (4 * static_cast<i128>(a)) != 0) throw ValidationError("QuadIdeal: b^2 != d mod 4a");
    return {a, mod_floor(b, 2 * a), scale, d};
}

QuadIdeal QuadIdeal::unit(i64 d) {
    return make(1, d & 1, 1, d);
}

u64 QuadIdeal::norm() const {
    u128 n = static_cast<u128>(scale) * static_cast<u128>(scale) * static_cast<u128>(a);
    if (n > UINT64_MAX) throw CeilingExceeded("ideal norm exceeds 64 bits");
    return static_cast<u64>(n);
}

QuadIdeal QuadIdeal::conjugate() const {
    return make(a, -b, scale, d);
}

bool QuadIdeal::contains(const QuadElement& z) const {
    if (z.v % scale != 0) return false;
    i128 t = static_cast<i128>(z.u) - static_cast<i128>(z.v) * b;
    return t % (2 * static_cast<i128>(scale) * a) == 0;
}

bool QuadIdeal::contains(const BigQuadElement& z) const {
    if (z.v % scale != 0) return false;
    BigInt t = z.u - z.v * b;
    return t % (BigInt(2) * scale * a) == 0;
}

QuadIdeal multiply(const QuadIdeal& x, const QuadIdeal& y) {
    if (x.d != y.d) throw ValidationError("multiply: discriminant mismatch");
    const i64 D = x.d;
    i128 a1 = x.a, b1 = x.b, a2 = y.a, b2 = y.b;
    if (a1 > a2) {
        std::swap(a1, a2);
        std::swap(b1, b2);
    }
    i128 c2 = (b2 * b2 - D) / (4 * a2);
    i128 s = (b1 + b2) / 2;
    i128 n = b2 - s;
    i128 y1, dd;
    if (a2 % a1 == 0) {
        y1 = 0;
        dd = a1;
    } else {
        i64 u, v;
        dd = ext_gcd(static_cast<i64>(a2), static_cast<i64>(a1), u, v);
        y1 = u;
    }
    i128 x2, y2, d1;
    if (s % dd == 0) {
        y2 = -1;
        x2 = 0;
        d1 = dd;
    } else {
        i64 u, v;
        d1 = ext_gcd(static_cast<i64>(s), static_cast<i64>(dd), u, v);
        x2 = u;
        y2 = -v;
    }
    i128 v1 = a1 / d1, v2 = a2 / d1;
    i128 r = ((y1 * y2 % v1) * (n % v1) - (x2 % v1) * (c2 % v1)) % v1;
    if (r < 0) r += v1;
    i128 b3 = b2 + 2 * v2 * r;
    i128 a3 = v1 * v2;
    i128 sc = static_cast<i128>(x.scale) * y.scale * d1;
    if (a3 > INT64_MAX || sc > INT64_MAX) throw CeilingExceeded("ideal product exceeds 64 bits");
    i128 bm = b3 % (2 * a3);
    if (bm < 0) bm += 2 * a3;
    return QuadIdeal::make(static_cast<i64>(a3), static_cast<i64>(bm), static_cast<i64>(sc), D);
}

QuadIdeal form_ideal_correspondence(const IndefiniteForm& f) {
    i64 d = f.discriminant();
    if (d <= 0) throw ValidationError("form is not indefinite");
    if (f.A == 0) throw ValidationError("form with A = 0 has square discriminant");
    return QuadIdeal::make(f.A < 0 ? -f.A : f.A, f.B, 1, d);
}

IndefiniteForm ideal_to_form(const QuadIdeal& I) {
    i128 c = (static_cast<i128>(I.b) * I.b - I.d) / (4 * static_cast<i128>(I.a));
    return {I.a, I.b, static_cast<i64>(c)};
}

long double rho_step_alpha(i64 b, i64 d) {
    if (b == 0) return 0;
    long double diff = std::fabs(static_cast<long double>(static_cast<i128>(b) * b - d));
    long double ab = static_cast<long double>(b < 0 ? -b : b);
    long double val = 0.5L * std::log(diff) - std::log(ab + std::sqrt(static_cast<long double>(d)));
    return b > 0 ? val : -val;
}

int ClassGroup::power(int x, i64 e) const {
    int r = 0;
    e = mod_floor(e, order(x));
    for (i64 i = 0; i < e; ++i) r = compose(r, x);
    return r;
}

int ClassGroup::order(int x) const {
    int r = x, k = 1;
    while (r != 0) {
        r = compose(r, x);
        ++k;
    }
    return k;
}

int ClassGroup::from_exponents(const std::vector<int>& e) const {
    int r = 0;
    for (size_t i = 0; i < basis.size(); ++i) r = compose(r, power(basis[i], e[i]));
    return r;
}

i64 RealQuadraticField::normalize_b(i64 a, i64 b, i64 d, u64 sqrt_d) {
    const i64 m = 2 * a;
    if (static_cast<i128>(a) * a < d) {
        const i64 s = static_cast<i64>(sqrt_d);
        return s - mod_floor(s - b, m);
    }
    i64 r = mod_floor(b, m);
    if (r > a) r -= m;
    return r;
}

bool RealQuadraticField::is_reduced(i64 a, i64 b, i64 d, u64 sqrt_d) {
    const i64 s = static_cast<i64>(sqrt_d);
    if (b <= 0 || b > s) return false;
    if (2 * a >= s + 1 + b) return false;
    i128 L = static_cast<i128>(d) + 4 * static_cast<i128>(a) * a - static_cast<i128>(b) * b;
    if (L < 0) return true;
    return L * L < 16 * static_cast<i128>(a) * a * d;
}

namespace {

struct RhoResult {
    i64 a;
    i64 b;
    long double alpha;
};

RhoResult rho(i64 a, i64 b, i64 d, u64 s) {
    i128 c = (static_cast<i128>(b) * b - d) / (4 * static_cast<i128>(a));
    i64 an = static_cast<i64>(c < 0 ? -c : c);
    i64 bn = RealQuadraticField::normalize_b(an, -b, d, s);
    return {an, bn, rho_step_alpha(b, d)};
}

std::vector<std::pair<i64, i64>> reduced_ideals(i64 d, u64 s) {
    std::vector<std::pair<i64, i64>> out;
    for (i64 b = (d & 1) ? 1 : 2; b <= static_cast<i64>(s); b += 2) {
        u64 m = static_cast<u64>((d - b * b) / 4);
        for (u64 a : divisors(factorize(m))) {
            if (RealQuadraticField::is_reduced(static_cast<i64>(a), b, d, s))
                out.emplace_back(static_cast<i64>(a), b);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

RealQuadraticField::RealQuadraticField(const FundamentalDiscriminant& D, i64 ceiling)
    : D_(D), unit_(fundamental_unit(D)) {
    build_cycles(ceiling);
    build_group();
}

std::shared_ptr<const RealQuadraticField> RealQuadraticField::make(i64 d) {
    return std::make_shared<const RealQuadraticField>(FundamentalDiscriminant(d));
}

void RealQuadraticField::build_cycles(i64 ceiling) {
    const i64 d = D_.value();
    const u64 s = D_.isqrt_d();
    if (d > ceiling) throw CeilingExceeded("class group: discriminant above ceiling");
    auto red = reduced_ideals(d, s);
    std::set<std::pair<i64, i64>> pending(red.begin(), red.end());

    auto walk = [&](std::pair<i64, i64> root) {
        Cycle cyc;
        auto cur = root;
        long double off = 0;
        const int cls = static_cast<int>(cycles_.size());
        do {
            if (!pending.erase(cur)) throw std::logic_error("ideal cycle left the reduced set");
            where_[cur] = {cls, static_cast<int>(cyc.ideals.size())};
            cyc.ideals.push_back(cur);
            cyc.offsets.push_back(off);
            RhoResult r = rho(cur.first, cur.second, d, s);
            off += r.alpha;
            cur = {r.a, r.b};
        } while (cur != root);
        cyc.period = off;
        long double R = unit_.regulator;
        if (std::fabs(std::fabs(off) - R) > 1e-9L * std::max(1.0L, R))
            throw std::logic_error("cycle period does not match the regulator");
        cycles_.push_back(std::move(cyc));
    };

    std::pair<i64, i64> one{1, normalize_b(1, d & 1, d, s)};
    if (!pending.count(one)) throw std::logic_error("unit ideal not reduced");
    walk(one);
    unit_pos_ = 0;
    for (auto& id : red)
        if (pending.count(id)) walk(id);
}

RealQuadraticField::Located RealQuadraticField::locate(const QuadIdeal& I) const {
    const i64 d = D_.value();
    const u64 s = D_.isqrt_d();
    if (I.d != d) throw ValidationError("locate: discriminant mismatch");
    i64 a = I.a;
    i64 b = normalize_b(a, I.b, d, s);
    long double dist = 0;
    int guard = 0;
    while (!is_reduced(a, b, d, s)) {
        RhoResult r = rho(a, b, d, s);
        dist -= r.alpha;
        a = r.a;
        b = r.b;
        if (++guard > 100000) throw std::logic_error("reduction did not terminate");
    }
    auto it = where_.find({a, b});
    if (it == where_.end()) throw std::logic_error("reduced ideal missing from cycle table");
    return {it->second.first, it->second.second, dist};
}

std::optional<BigQuadElement> RealQuadraticField::principal_generator(const QuadIdeal& I) const {
    const i64 d = D_.value();
    const u64 s = D_.isqrt_d();
    if (!is_principal(I)) return std::nullopt;
    // I = (mu) J with mu = (U + V sqrt d)/W; walk J until it is O_d.
    BigInt U = 1, V = 0, W = 1;
    i64 a = I.a;
    i64 b = normalize_b(a, I.b, d, s);
    const std::pair<i64, i64> one = cycles_[0].ideals[static_cast<size_t>(unit_pos_)];
    size_t guard = 0;
    while (!(a == one.first && b == one.second)) {
        // mu <- mu * 2a (b + sqrt d) / (b^2 - d)
        BigInt nu = U * b + V * BigInt(d);
        BigInt nv = U + V * b;
        BigInt den = BigInt(b) * b - d;
        U = nu * (2 * a);
        V = nv * (2 * a);
        W = W * den;
        BigInt g = gcd(gcd(abs(U), abs(V)), abs(W));
        U /= g;
        V /= g;
        W /= g;
        if (W < 0) {
            U = -U;
            V = -V;
            W = -W;
        }
        RhoResult r = rho(a, b, d, s);
        a = r.a;
        b = r.b;
        if (++guard > 10 * (where_.size() + 64)) throw std::logic_error("generator walk did not close");
    }
    // (U + V sqrt d)/W = (u + v sqrt d)/2
    BigInt u2 = 2 * U, v2 = 2 * V;
    if (u2 % W != 0 || v2 % W != 0) throw std::logic_error("generator not integral");
    BigQuadElement g{u2 / W * I.scale, v2 / W * I.scale, d};
    return g;
}

namespace {

// Cyclic decomposition of a p-group given by a subset of elements.
bool sylow_basis(const ClassGroup& G, const std::vector<int>& elems, std::vector<int>& basis,
                 std::vector<int>& span) {
    if (span.size() == elems.size()) return true;
    std::vector<int> cands;
    std::set<int> in_span(span.begin(), span.end());
    for (int g : elems) {
        bool trivial = true;
        int x = g;
        int ord = G.order(g);
        for (int i = 1; i < ord; ++i) {
            if (in_span.count(x)) {
                trivial = false;
                break;
            }
            x = G.compose(x, g);
        }
        if (trivial) cands.push_back(g);
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [&](int x, int y) { return G.order(x) > G.order(y); });
    for (int g : cands) {
        std::vector<int> nspan;
        int ord = G.order(g);
        int x = 0;
        for (int i = 0; i < ord; ++i) {
            for (int e : span) nspan.push_back(G.compose(e, x));
            x = G.compose(x, g);
        }
        std::set<int> uniq(nspan.begin(), nspan.end());
        if (uniq.size() != nspan.size()) continue;
        basis.push_back(g);
        if (sylow_basis(G, elems, basis, nspan)) {
            span = nspan;
            return true;
        }
        basis.pop_back();
    }
    return false;
}

void decompose(ClassGroup& G) {
    const int h = G.h;
    std::vector<int> ords(h);
    for (int i = 0; i < h; ++i) ords[i] = G.order(i);
    // Per prime, cyclic generators with their orders, largest first.
    std::vector<std::vector<std::pair<int, int>>> per_prime;
    for (auto& pk : factorize(static_cast<u64>(h))) {
        std::vector<int> elems;
        for (int i = 0; i < h; ++i) {
            int o = ords[i];
            while (o % static_cast<int>(pk.p) == 0) o /= static_cast<int>(pk.p);
            if (o == 1) elems.push_back(i);
        }
        std::vector<int> basis, span{0};
        if (!sylow_basis(G, elems, basis, span)) throw std::logic_error("sylow decomposition failed");
        std::vector<std::pair<int, int>> comps;
        for (int g : basis) comps.push_back({ords[g], g});
        std::sort(comps.rbegin(), comps.rend());
        per_prime.push_back(comps);
    }
    size_t r = 0;
    for (auto& c : per_prime) r = std::max(r, c.size());
    // Invariant factors: the i-th largest factor combines the i-th component of each prime.
    std::vector<std::pair<int, int>> factors;
    for (size_t i = 0; i < r; ++i) {
        int n = 1, g = 0;
        for (auto& c : per_prime) {
            if (i < c.size()) {
                n *= c[i].first;
                g = G.compose(g, c[i].second);
            }
        }
        factors.push_back({n, g});
    }
    std::reverse(factors.begin(), factors.end());
    G.structure.clear();
    G.basis.clear();
    for (auto& [n, g] : factors) {
        G.structure.push_back(n);
        G.basis.push_back(g);
    }
    G.exponents.assign(h, {});
    std::vector<int> e(G.basis.size(), 0);
    int seen = 0;
    std::function<void(size_t, int)> rec = [&](size_t i, int cls) {
        if (i == G.basis.size()) {
            if (!G.exponents[cls].empty() || (G.basis.empty() && seen > 0))
                throw std::logic_error("class group basis is not free");
            G.exponents[cls] = e;
            ++seen;
            return;
        }
        int x = cls;
        for (int k = 0; k < G.structure[i]; ++k) {
            e[i] = k;
            rec(i + 1, x);
            x = G.compose(x, G.basis[i]);
        }
        e[i] = 0;
    };
    rec(0, 0);
    if (seen != h) throw std::logic_error("class group basis does not span");
}

}  // namespace

void RealQuadraticField::build_group() {
    const i64 d = D_.value();
    ClassGroup& G = group_;
    G.d = d;
    G.h = static_cast<int>(cycles_.size());
    for (auto& c : cycles_) G.representatives.push_back(QuadIdeal::make(c.ideals[0].first, c.ideals[0].second, 1, d));
    G.table.assign(static_cast<size_t>(G.h) * G.h, 0);
    for (int i = 0; i < G.h; ++i)
        for (int j = i; j < G.h; ++j) {
            int k = class_of(multiply(G.representatives[i], G.representatives[j]));
            G.table[static_cast<size_t>(i) * G.h + j] = k;
            G.table[static_cast<size_t>(j) * G.h + i] = k;
        }
    G.inverse.assign(G.h, 0);
    for (int i = 0; i < G.h; ++i) G.inverse[i] = class_of(G.representatives[i].conjugate());
    G.narrow_h = narrow_form_cycle_count(D_);
    decompose(G);
}

ClassGroup class_group(const FundamentalDiscriminant& d) {
    return RealQuadraticField(d).group();
}

int narrow_form_cycle_count(const FundamentalDiscriminant& D) {
    const i64 d = D.value();
    const u64 s = D.isqrt_d();
    // Reduced forms (A, B, C): 0 < B < sqrt d, sqrt d - B < 2|A| < sqrt d + B.
    std::set<std::tuple<i64, i64, i64>> pending;
    for (auto& [a, b] : reduced_ideals(d, s)) {
        i64 c = (b * b - d) / (4 * a);
        pending.insert({a, b, c});
        pending.insert({-a, b, -c});
    }
    int narrow = 0;
    std::vector<std::vector<std::tuple<i64, i64, i64>>> cyc;
    std::map<std::tuple<i64, i64, i64>, int> idx;
    while (!pending.empty()) {
        auto start = *pending.begin();
        auto cur = start;
        std::vector<std::tuple<i64, i64, i64>> members;
        do {
            if (!pending.erase(cur)) throw std::logic_error("form cycle left the reduced set");
            members.push_back(cur);
            idx[cur] = narrow;
            auto [A, B, C] = cur;
            i64 aC = C < 0 ? -C : C;
            i64 Bn = RealQuadraticField::normalize_b(aC, -B, d, s);
            i64 An = static_cast<i64>((static_cast<i128>(Bn) * Bn - d) / (4 * static_cast<i128>(C)));
            cur = {C, Bn, An};
        } while (cur != start);
        cyc.push_back(members);
        ++narrow;
    }
    // Merging under (A, B, C) -> (-A, B, -C) must reproduce the ideal cycle count.
    std::vector<int> parent(narrow);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto& [f, i] : idx) {
        auto [A, B, C] = f;
        parent[find(i)] = find(idx.at({-A, B, -C}));
    }
    std::set<int> roots;
    for (int i = 0; i < narrow; ++i) roots.insert(find(i));
    int wide = static_cast<int>(roots.size());
    int ideal_cycles = 0;
    {
        std::set<std::pair<i64, i64>> seen;
        for (auto& [a, b] : reduced_ideals(d, s)) seen.insert({a, b});
        std::set<std::pair<i64, i64>> left = seen;
        while (!left.empty()) {
            auto st = *left.begin();
            auto cur = st;
            do {
                left.erase(cur);
                auto r = rho(cur.first, cur.second, d, s);
                cur = {r.a, r.b};
            } while (cur != st);
            ++ideal_cycles;
        }
    }
    if (wide != ideal_cycles) throw std::logic_error("form cycles and ideal cycles disagree");
    return narrow;
}

long double l_one_exact(const FundamentalDiscriminant& D) {
    const i64 d = D.value();
    const long double pi = 3.141592653589793238462643383279502884L;
    CompensatedSum<long double> acc;
    // The character is even, so pair a with d - a.
    for (i64 a = 1; 2 * a < d; ++a) {
        int chi = kronecker_symbol(d, a);
        if (chi == 0) continue;
        acc.add(2.0L * chi * std::log(std::sin(pi * a / d)));
    }
    return -acc.value() / std::sqrt(static_cast<long double>(d));
}

double verify_class_number_formula(const FundamentalDiscriminant& D) {
    RealQuadraticField F(D);
    long double lhs = 2.0L * F.group().h * F.regulator();
    long double rhs = std::sqrt(static_cast<long double>(D.value())) * l_one_exact(D);
    return static_cast<double>(std::fabs(lhs / rhs - 1.0L));
}

double l_inverse_truncation_error(i64 D, i64 K) {
    if (D < 1 || K < 1) throw ValidationError("l_inverse_truncation_error: D, K >= 1");
    SieveTables st = linear_sieve(static_cast<std::uint32_t>(std::max(D, K)));
    CompensatedSum<long double> total;
    for (i64 d = 1; d <= D; d += 2) {
        if (st.mu[d] == 0) continue;
        long double inv_l = 0;
        if (d > 1) {
            long double L;
            if ((d & 3) == 1)
                L = l_one_exact(FundamentalDiscriminant(d)) * (1.0L - kronecker_symbol(d, 2) / 2.0L);
            else
                L = l_one_exact(FundamentalDiscriminant(4 * d));
            inv_l = 1.0L / L;
        }
        CompensatedSum<long double> trunc;
        for (i64 k = 1; k <= K; k += 2) {
            if (st.mu[k] == 0) continue;
            trunc.add(static_cast<long double>(st.mu[k] * kronecker_symbol(4 * d, k)) / k);
        }
        long double diff = inv_l - trunc.value();
        total.add(diff * diff);
    }
    return static_cast<double>(total.value());
}

}  // namespace axby
