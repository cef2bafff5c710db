#include "kf/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kf {

namespace {

bool is_squarefree(long n) {
    if (n < 0) n = -n;
    if (n == 0) return false;
    for (long q = 2; q * q <= n; ++q) {
        if (n % (q * q) == 0) return false;
        while (n % q == 0) n /= q;
    }
    return true;
}

long mod_pos(long x, long m) {
    long r = x % m;
    return r < 0 ? r + m : r;
}

// modular exponentiation for long (m < 2^31 so products fit in long long via mpz)
long pow_mod(long base, long e, long m) {
    mpz_class b = base, mm = m, r;
    mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), (unsigned long)e, mm.get_mpz_t());
    return r.get_si();
}

// Tonelli-Shanks; returns -1 when a is a non-residue mod odd prime p
long sqrt_mod(long a, long p) {
    a = mod_pos(a, p);
    if (a == 0) return 0;
    if (p == 2) return a;
    if (pow_mod(a, (p - 1) / 2, p) != 1) return -1;
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
    long q = p - 1, s = 0;
    while (q % 2 == 0) { q /= 2; ++s; }
    long z = 2;
    while (pow_mod(z, (p - 1) / 2, p) != p - 1) ++z;
    long m = s, cc = pow_mod(z, q, p);
    long t = pow_mod(a, q, p), r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        long i = 0, tt = t;
        while (tt != 1) { tt = (long)((__int128)tt * tt % p); ++i; }
        long b = cc;
        for (long k = 0; k < m - i - 1; ++k) b = (long)((__int128)b * b % p);
        m = i;
        cc = (long)((__int128)b * b % p);
        t = (long)((__int128)t * cc % p);
        r = (long)((__int128)r * b % p);
    }
    return r;
}

}  // namespace

QuadField make_field(long d) {
    if (d >= 0) throw std::invalid_argument("d must be negative");
    if (!is_squarefree(d)) throw std::invalid_argument("d must be squarefree");
    QuadField F;
    F.d = d;
    F.omega_half = (mod_pos(d, 4) == 1);
    F.disc = F.omega_half ? d : 4 * d;
    F.w_K = (F.disc == -4) ? 4 : (F.disc == -3) ? 6 : 2;
    return F;
}

std::vector<QuadInt> QuadField::units() const {
    if (d == -1) return {QuadInt(1, 0), QuadInt(0, 1), QuadInt(-1, 0), QuadInt(0, -1)};
    if (d == -3) {
        // powers of zeta_6 = omega
        return {QuadInt(1, 0), QuadInt(0, 1), QuadInt(-1, 1),
                QuadInt(-1, 0), QuadInt(0, -1), QuadInt(1, -1)};
    }
    return {QuadInt(1, 0), QuadInt(-1, 0)};
}

Cplx QuadField::omega_embed(long prec) const {
    Real s = sqrt(Real::of_long(-d, prec));
    if (omega_half) return Cplx(Real::of_str("0.5", prec), s / 2);
    return Cplx(Real::of_long(0, prec), s);
}

Cplx QuadField::embed(const QuadInt& v, long prec) const {
    Cplx om = omega_embed(prec);
    Real xr(prec), yr(prec);
    mpfr_set_z(xr.v, v.x.get_mpz_t(), MPFR_RNDN);
    mpfr_set_z(yr.v, v.y.get_mpz_t(), MPFR_RNDN);
    return Cplx(xr + yr * om.re, yr * om.im);
}

bool IntegralIdeal::contains(const QuadField& F, const QuadInt& v) const {
    (void)F;
    if (v.y % c != 0) return false;
    mpz_class q = v.y / c;
    mpz_class x0 = v.x - q * b;
    return x0 % a == 0;
}

IntegralIdeal QuadField::ideal_from_gens(const std::vector<QuadInt>& gens) const {
    // Z-module generated by g and g*omega for each generator, then HNF
    std::vector<QuadInt> vecs;
    for (const auto& g : gens) {
        vecs.push_back(g);
        vecs.push_back(mul(g, QuadInt(0, 1)));
    }
    // c = gcd of y-parts, with Bezout combination giving the (b, c) row
    mpz_class c = 0;
    for (auto& v : vecs) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), v.y.get_mpz_t());
    if (c == 0) throw std::invalid_argument("zero ideal");
    // find combination with y = c by iterated extended gcd
    mpz_class by = 0, bx = 0;  // accumulated vector (bx, by)
    for (auto& v : vecs) {
        if (by == 0) { bx = v.x; by = v.y; continue; }
        if (v.y == 0) continue;
        mpz_class g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), by.get_mpz_t(), v.y.get_mpz_t());
        mpz_class nx = s * bx + t * v.x;
        bx = nx; by = g;
    }
    if (by == 0) throw std::invalid_argument("rank-deficient ideal basis");
    if (by < 0) { by = -by; bx = -bx; }
    // a = gcd of x-parts after clearing y with the (bx, by) row
    mpz_class a = 0;
    for (auto& v : vecs) {
        mpz_class q = v.y / by;
        mpz_class x0 = v.x - q * bx;
        mpz_gcd(a.get_mpz_t(), a.get_mpz_t(), x0.get_mpz_t());
    }
    if (a == 0) throw std::invalid_argument("rank-deficient ideal basis");
    mpz_class b = bx % a;
    if (b < 0) b += a;
    IntegralIdeal I(a, b, by);
    // closure sanity: omega * basis stays inside
    if (!I.contains(*this, mul(QuadInt(a, 0), QuadInt(0, 1))) ||
        !I.contains(*this, mul(QuadInt(b, by), QuadInt(0, 1))))
        throw std::logic_error("ideal HNF not omega-stable");
    return I;
}

IntegralIdeal QuadField::mul(const IntegralIdeal& I, const IntegralIdeal& J) const {
    QuadInt i1(I.a, 0), i2(I.b, I.c), j1(J.a, 0), j2(J.b, J.c);
    return ideal_from_gens({mul(i1, j1), mul(i1, j2), mul(i2, j1), mul(i2, j2)});
}

IntegralIdeal QuadField::add(const IntegralIdeal& I, const IntegralIdeal& J) const {
    return ideal_from_gens({QuadInt(I.a, 0), QuadInt(I.b, I.c), QuadInt(J.a, 0), QuadInt(J.b, J.c)});
}

IntegralIdeal QuadField::conj_ideal(const IntegralIdeal& I) const {
    return ideal_from_gens({conj(QuadInt(I.a, 0)), conj(QuadInt(I.b, I.c))});
}

IntegralIdeal QuadField::pow(const IntegralIdeal& I, long e) const {
    if (e < 0) throw std::invalid_argument("negative ideal power");
    IntegralIdeal r = ring(), base = I;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = (e >>= 1) ? mul(base, base) : base;
    }
    return r;
}

bool QuadField::ideal_contains(const IntegralIdeal& I, const IntegralIdeal& J) const {
    return I.contains(*this, QuadInt(J.a, 0)) && I.contains(*this, QuadInt(J.b, J.c));
}

bool QuadField::coprime(const IntegralIdeal& I, const IntegralIdeal& J) const {
    return add(I, J).is_ring();
}

IntegralIdeal QuadField::divide(const IntegralIdeal& I, const IntegralIdeal& J) const {
    // I * conj(J) = N(J) * (I/J) when J divides I
    IntegralIdeal prod = mul(I, conj_ideal(J));
    mpz_class n = J.norm();
    if (prod.a % n != 0 || prod.b % n != 0 || prod.c % n != 0)
        throw std::invalid_argument("ideal division is not exact");
    return IntegralIdeal(prod.a / n, prod.b / n, prod.c / n);
}

long QuadField::valuation(const IntegralIdeal& I, const IntegralIdeal& P) const {
    long v = 0;
    IntegralIdeal cur = I;
    while (ideal_contains(P, cur)) {
        cur = divide(cur, P);
        ++v;
        if (v > 4096) throw std::logic_error("runaway valuation");
    }
    return v;
}

PrimeSplit QuadField::factor_rational_prime(long p) const {
    PrimeSplit out;
    out.p = p;
    long tr = omega_tr();
    mpz_class nmz = omega_nm();
    long nm = mpz_fdiv_ui(nmz.get_mpz_t(), p);
    if (p == 2) {
        // roots of x^2 - tr x + nm over F_2
        std::vector<long> roots;
        for (long r : {0L, 1L})
            if (mod_pos(r * r - tr * r + nm, 2) == 0) roots.push_back(r);
        if (roots.empty()) {
            out.kind = PrimeSplit::inert;
            out.primes = {IntegralIdeal(2, 0, 2)};
        } else if (roots.size() == 2) {
            out.kind = PrimeSplit::split;
            out.primes = {IntegralIdeal(2, mod_pos(-roots[0], 2), 1),
                          IntegralIdeal(2, mod_pos(-roots[1], 2), 1)};
        } else {
            out.kind = PrimeSplit::ramified;
            out.primes = {IntegralIdeal(2, mod_pos(-roots[0], 2), 1)};
        }
        return out;
    }
    long D = mod_pos(disc % p, p);
    if (D == 0) {
        out.kind = PrimeSplit::ramified;
        // double root tr/2 mod p
        long inv2 = pow_mod(2, p - 2, p);
        long r = mod_pos(tr * inv2 % p, p);
        out.primes = {IntegralIdeal(p, mod_pos(-r, p), 1)};
        return out;
    }
    long s = sqrt_mod(D, p);
    if (s < 0) {
        out.kind = PrimeSplit::inert;
        out.primes = {IntegralIdeal(p, 0, p)};
        return out;
    }
    // roots (tr +- s')/2 where s'^2 = tr^2 - 4 nm = disc (as residues)
    long inv2 = pow_mod(2, p - 2, p);
    long r1 = mod_pos((tr + s) % p * inv2 % p, p);
    long r2 = mod_pos((tr - s + 2 * p) % p * inv2 % p, p);
    out.kind = PrimeSplit::split;
    out.primes = {IntegralIdeal(p, mod_pos(-r1, p), 1), IntegralIdeal(p, mod_pos(-r2, p), 1)};
    if (out.primes[1].b < out.primes[0].b) std::swap(out.primes[0], out.primes[1]);
    return out;
}

std::vector<IdealFactor> QuadField::factor_ideal(const IntegralIdeal& I) const {
    std::vector<IdealFactor> out;
    mpz_class n = I.norm();
    if (n == 1) return out;
    if (!n.fits_slong_p()) throw std::invalid_argument("ideal norm too large to factor");
    long nn = n.get_si();
    for (long p = 2; (__int128)p * p <= nn; ++p) {
        if (nn % p) continue;
        while (nn % p == 0) nn /= p;
        auto sp = factor_rational_prime(p);
        for (auto& P : sp.primes) {
            long v = valuation(I, P);
            if (v > 0) out.push_back({P, v, p});
        }
    }
    if (nn > 1) {
        auto sp = factor_rational_prime(nn);
        for (auto& P : sp.primes) {
            long v = valuation(I, P);
            if (v > 0) out.push_back({P, v, nn});
        }
    }
    // verify the product reproduces the ideal
    IntegralIdeal prod = ring();
    for (auto& f : out) prod = mul(prod, pow(f.prime, f.exponent));
    if (!(prod == I)) throw std::logic_error("ideal factorization failed to reproduce input");
    return out;
}

std::optional<QuadInt> QuadField::generator_of(const IntegralIdeal& I) const {
    mpz_class N = I.norm();
    if (!N.fits_slong_p()) return std::nullopt;
    // search x + y*omega with norm N inside I; Im(omega)^2 = -d or -d/4
    // N = x^2 + tr x y + nm y^2 >= (Im om)^2 y^2
    double imom2 = omega_half ? (-(double)d) / 4.0 : -(double)d;
    long ymax = (long)(std::sqrt(N.get_d() / imom2)) + 1;
    QuadInt best;
    bool found = false;
    for (long y = -ymax; y <= ymax; ++y) {
        // x^2 + tr x y + (nm y^2 - N) = 0
        mpz_class cterm = omega_nm() * y * y - N;
        mpz_class discq = mpz_class(omega_tr() * y) * mpz_class(omega_tr() * y) - 4 * cterm;
        if (discq < 0) continue;
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), discq.get_mpz_t());
        if (s * s != discq) continue;
        for (int sign = 0; sign < 2; ++sign) {
            mpz_class num = -mpz_class(omega_tr() * y) + (sign ? -s : s);
            if (num % 2 != 0) continue;
            QuadInt cand(num / 2, y);
            if (norm(cand) != N) continue;
            if (!I.contains(*this, cand)) continue;
            if (!found) { best = cand; found = true; continue; }
            // canonical: lexicographic on (y, x)
            if (cand.y < best.y || (cand.y == best.y && cand.x < best.x)) best = cand;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

QuadInt QuadField::reduce_mod(const QuadInt& v, const IntegralIdeal& I) const {
    mpz_class qy;
    mpz_fdiv_q(qy.get_mpz_t(), v.y.get_mpz_t(), I.c.get_mpz_t());
    mpz_class y = v.y - qy * I.c;
    mpz_class x = v.x - qy * I.b;
    mpz_class qx;
    mpz_fdiv_q(qx.get_mpz_t(), x.get_mpz_t(), I.a.get_mpz_t());
    x -= qx * I.a;
    return QuadInt(x, y);
}

bool QuadField::invertible_mod(const QuadInt& v, const IntegralIdeal& I) const {
    if (I.is_ring()) return true;
    if (reduce_mod(v, I).is_zero()) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), norm(v).get_mpz_t(), I.norm().get_mpz_t());
    if (g == 1) return true;
    // gcd of norms > 1 is not decisive in general: check (v) + I = O
    return coprime(principal(v), I);
}

std::vector<QuadInt> QuadField::residues(const IntegralIdeal& I) const {
    std::vector<QuadInt> out;
    if (!I.norm().fits_slong_p()) throw std::invalid_argument("modulus too large to enumerate");
    for (mpz_class y = 0; y < I.c; ++y)
        for (mpz_class x = 0; x < I.a; ++x) out.push_back(QuadInt(x, y));
    return out;
}

std::vector<QuadInt> QuadField::invertible_residues(const IntegralIdeal& I) const {
    std::vector<QuadInt> out;
    for (auto& r : residues(I))
        if (invertible_mod(r, I)) out.push_back(r);
    return out;
}

std::optional<QuadInt> QuadField::inverse_mod(const QuadInt& v, const IntegralIdeal& I) const {
    // v * conj(v) = N(v); invert the rational integer N(v) mod N(I) and clear
    if (!invertible_mod(v, I)) return std::nullopt;
    mpz_class n = norm(v), m = I.norm(), inv;
    if (mpz_invert(inv.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t()) == 0) {
        // N(v) need not be invertible mod N(I) even when (v, I) = 1: fall back
        // to a search over residues (moduli here are small)
        for (auto& r : invertible_residues(I)) {
            if (reduce_mod(mul(r, v), I) == reduce_mod(QuadInt(1, 0), I)) return r;
        }
        return std::nullopt;
    }
    QuadInt w = conj(v);
    QuadInt res = reduce_mod(QuadInt(w.x * inv, w.y * inv), I);
    if (!(reduce_mod(mul(res, v), I) == reduce_mod(QuadInt(1, 0), I)))
        throw std::logic_error("inverse_mod failed verification");
    return res;
}

mpz_class totient(const QuadField& F, const IntegralIdeal& f) {
    if (f.is_ring()) return 1;
    mpz_class phi = f.norm();
    for (auto& fac : F.factor_ideal(f)) {
        mpz_class np = fac.prime.norm();
        phi = phi / np * (np - 1);
    }
    return phi;
}

long count_invertible_residues(const QuadField& F, const IntegralIdeal& f) {
    long cnt = 0;
    for (auto& r : F.residues(f))
        if (F.invertible_mod(r, f)) ++cnt;
    return cnt;
}

IdeleRep canonical_idele(const QuadField& F, const IntegralIdeal& m) {
    IdeleRep rho;
    rho.m = m;
    auto gen = F.generator_of(m);
    if (!gen) throw std::invalid_argument("canonical idele wants a principal modulus");
    for (auto& fac : F.factor_ideal(m)) {
        // local generator at p: the global generator works at every p | m
        rho.local_gens.push_back({fac.prime, *gen});
    }
    return rho;
}

FieldFraction choose_f_m(const QuadField& F, const IntegralIdeal& m, const IdeleRep& rho) {
    if (m.is_ring()) throw std::invalid_argument("f_m needs m != (1)");
    auto t0 = F.generator_of(m);
    if (!t0) throw std::invalid_argument("choose_f_m supports principal moduli");
    // f = t0 / c with c integral coprime to m.  Then v_p(f) = -v_p(c) <= 0
    // away from m, and the congruence condition at p | m reads
    //   v_p(f^{-1} - g_p^{-1}) >= 0  <=>  v_p(c * g_p - t0) >= 2 v_p(m).
    auto check = [&](const QuadInt& c) {
        if (c.is_zero() || !F.invertible_mod(c, m)) return false;
        for (auto& [P, g] : rho.local_gens) {
            long need = 2 * F.valuation(m, P);
            QuadInt diff = F.sub(F.mul(c, g), *t0);
            if (!diff.is_zero()) {
                long v = F.valuation(F.principal(diff), P);
                if (v < need) return false;
            }
        }
        return true;
    };
    IntegralIdeal m2 = F.mul(m, m);
    long budget = 0;
    for (auto& c : F.residues(m2)) {
        if (++budget > 2000000)
            throw std::runtime_error("choose_f_m: CRT search exhausted its budget");
        if (!check(c)) continue;
        FieldFraction f{*t0, c};
        // recompute every valuation of the accepted f as a final gate
        for (auto& fac : F.factor_ideal(F.principal(c)))
            if (!F.ideal_contains(fac.prime, m) && fac.exponent < 0)
                throw std::logic_error("choose_f_m: impossible pole pattern");
        for (auto& fac : F.factor_ideal(m)) {
            long vf = F.valuation(F.principal(*t0), fac.prime) -
                      F.valuation(F.principal(c), fac.prime);
            if (vf != fac.exponent)
                throw std::logic_error("choose_f_m: wrong valuation at a prime of m");
        }
        return f;
    }
    throw std::runtime_error("choose_f_m: CRT search exhausted its budget");
}

}  // namespace kf
