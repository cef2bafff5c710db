// Exact arithmetic in imaginary quadratic fields K = Q(sqrt(d)), d < 0
// squarefree.  Elements are x + y*omega over the ring basis (1, omega),
// omega = sqrt(d) or (1+sqrt(d))/2; ideals are stored in Hermite form
// Z*a + Z*(b + c*omega) with c | a, c | b, 0 <= b < a, norm = a*c.

#pragma once

#include <gmpxx.h>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kf/real.hpp"

namespace kf {

struct QuadInt {
    mpz_class x = 0, y = 0;  // x + y*omega
    QuadInt() = default;
    QuadInt(mpz_class xx, mpz_class yy) : x(std::move(xx)), y(std::move(yy)) {}
    QuadInt(long xx, long yy) : x(xx), y(yy) {}
    bool operator==(const QuadInt& o) const { return x == o.x && y == o.y; }
    bool is_zero() const { return x == 0 && y == 0; }
};

class QuadField;

class IntegralIdeal {
  public:
    mpz_class a = 1, b = 0, c = 1;

    IntegralIdeal() = default;
    IntegralIdeal(mpz_class A, mpz_class B, mpz_class C)
        : a(std::move(A)), b(std::move(B)), c(std::move(C)) {}
    mpz_class norm() const { return a * c; }
    bool is_ring() const { return a == 1 && b == 0 && c == 1; }
    bool operator==(const IntegralIdeal& o) const { return a == o.a && b == o.b && c == o.c; }
    bool contains(const QuadField& F, const QuadInt& v) const;
};

struct PrimeSplit {
    enum Kind { split, inert, ramified } kind;
    long p;
    std::vector<IntegralIdeal> primes;  // one or two ideals above p
};

struct IdealFactor {
    IntegralIdeal prime;
    long exponent;
    long residue_char;  // rational prime under the prime ideal
};

class QuadField {
  public:
    long d;          // squarefree negative integer
    long disc;       // fundamental discriminant
    int w_K;         // number of roots of unity
    bool omega_half; // omega = (1+sqrt d)/2 when true, else sqrt d

    // minimal polynomial of omega: X^2 - tr*X + nm
    long omega_tr() const { return omega_half ? 1 : 0; }
    mpz_class omega_nm() const {
        return omega_half ? mpz_class((1 - mpz_class(d)) / 4) : mpz_class(-mpz_class(d));
    }

    QuadInt conj(const QuadInt& v) const {
        // conj(omega) = -omega or 1-omega
        if (omega_half) return QuadInt(v.x + v.y, -v.y);
        return QuadInt(v.x, -v.y);
    }
    QuadInt mul(const QuadInt& u, const QuadInt& v) const {
        // omega^2 = tr*omega - nm
        mpz_class cross = u.x * v.y + u.y * v.x;
        mpz_class yy = u.y * v.y;
        return QuadInt(u.x * v.x - yy * omega_nm(), cross + yy * omega_tr());
    }
    QuadInt add(const QuadInt& u, const QuadInt& v) const { return QuadInt(u.x + v.x, u.y + v.y); }
    QuadInt sub(const QuadInt& u, const QuadInt& v) const { return QuadInt(u.x - v.x, u.y - v.y); }
    QuadInt neg(const QuadInt& u) const { return QuadInt(-u.x, -u.y); }
    mpz_class norm(const QuadInt& v) const {
        // (x + y*om)(x + y*conj om) = x^2 + tr*x*y + nm*y^2
        return v.x * v.x + v.x * v.y * omega_tr() + v.y * v.y * omega_nm();
    }
    mpz_class trace(const QuadInt& v) const { return 2 * v.x + v.y * omega_tr(); }

    std::vector<QuadInt> units() const;

    // complex embedding with Im(omega) > 0
    Cplx embed(const QuadInt& v, long prec) const;
    Cplx omega_embed(long prec) const;

    // --- ideals ---
    IntegralIdeal ring() const { return IntegralIdeal(1, 0, 1); }
    IntegralIdeal ideal_from_gens(const std::vector<QuadInt>& gens) const;
    IntegralIdeal principal(const QuadInt& g) const { return ideal_from_gens({g}); }
    IntegralIdeal mul(const IntegralIdeal& I, const IntegralIdeal& J) const;
    IntegralIdeal add(const IntegralIdeal& I, const IntegralIdeal& J) const;
    IntegralIdeal conj_ideal(const IntegralIdeal& I) const;
    IntegralIdeal pow(const IntegralIdeal& I, long e) const;
    // exact quotient I/J, requires J | I
    IntegralIdeal divide(const IntegralIdeal& I, const IntegralIdeal& J) const;
    bool ideal_contains(const IntegralIdeal& I, const IntegralIdeal& J) const;  // J subset of I
    bool coprime(const IntegralIdeal& I, const IntegralIdeal& J) const;
    long valuation(const IntegralIdeal& I, const IntegralIdeal& P) const;

    PrimeSplit factor_rational_prime(long p) const;
    std::vector<IdealFactor> factor_ideal(const IntegralIdeal& I) const;

    // smallest-norm generator of a principal ideal (canonical tie-break);
    // nullopt when the ideal is not principal
    std::optional<QuadInt> generator_of(const IntegralIdeal& I) const;

    // residue arithmetic mod I
    QuadInt reduce_mod(const QuadInt& v, const IntegralIdeal& I) const;
    bool invertible_mod(const QuadInt& v, const IntegralIdeal& I) const;
    std::vector<QuadInt> residues(const IntegralIdeal& I) const;
    std::vector<QuadInt> invertible_residues(const IntegralIdeal& I) const;
    // solve u*v == 1 mod I
    std::optional<QuadInt> inverse_mod(const QuadInt& v, const IntegralIdeal& I) const;
};

QuadField make_field(long d);

mpz_class totient(const QuadField& F, const IntegralIdeal& f);
long count_invertible_residues(const QuadField& F, const IntegralIdeal& f);

// local generator data for the idele rho_m: a global element g_p per prime
// p | m with v_p(g_p) = v_p(m)
struct IdeleRep {
    IntegralIdeal m;
    std::vector<std::pair<IntegralIdeal, QuadInt>> local_gens;  // (prime, generator)
};

IdeleRep canonical_idele(const QuadField& F, const IntegralIdeal& m);

// f_m in K^*, returned as a fraction num/den of ring elements satisfying
//   v_p(f) <= 0 for p not dividing m,  v_p(f^{-1} - rho_p^{-1}) >= 0 for p | m.
struct FieldFraction {
    QuadInt num;
    QuadInt den;
};

FieldFraction choose_f_m(const QuadField& F, const IntegralIdeal& m, const IdeleRep& rho);

}  // namespace kf
