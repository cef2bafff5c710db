// Desk-scale Iwasawa algebra toolkit: truncated elements of Z_p[[T]] modulo
// (p^N, T^M), Weierstrass preparation, characteristic ideals of finitely
// presented torsion modules, eigenspace idempotents e_chi in Z_p[Delta], and
// the Herbrand-quotient identity across a four-term exact sequence.
//
// Every reported order is certified by recomputation at a bumped truncation;
// disagreement yields "inconclusive" rather than a wrong number.

#pragma once

#include <gmpxx.h>
#include <optional>
#include <string>
#include <vector>

namespace kf {

struct Truncation {
    long p = 3;
    long N = 32;  // p-adic precision
    long M = 64;  // T-adic precision
    bool operator==(const Truncation& o) const { return p == o.p && N == o.N && M == o.M; }
    Truncation bumped() const { return {p, N + 8, (3 * M) / 2}; }
    mpz_class pN() const {
        mpz_class r = 1;
        for (long i = 0; i < N; ++i) r *= p;
        return r;
    }
};

class LambdaElement {
  public:
    Truncation tr;
    std::vector<mpz_class> c;  // coefficients of T^0..T^{M-1}, reduced mod p^N

    explicit LambdaElement(Truncation t) : tr(t), c(t.M, 0) {}
    static LambdaElement from_coeffs(Truncation t, const std::vector<long>& coeffs);
    LambdaElement at(Truncation t2) const;  // re-truncate (coefficients carried over)

    bool is_zero() const;
    bool is_unit() const;  // constant term a p-unit
    LambdaElement operator+(const LambdaElement& o) const;
    LambdaElement operator-(const LambdaElement& o) const;
    LambdaElement operator*(const LambdaElement& o) const;
    LambdaElement scalar(const mpz_class& a) const;
    LambdaElement inverse() const;  // for units
    long mu() const;                // min p-valuation of the coefficients (capped at N)
    std::string str() const;
};

struct WeierstrassPrep {
    long mu = 0;
    long lambda = 0;               // degree of the distinguished polynomial
    LambdaElement unit;
    LambdaElement distinguished;   // monic, lower coefficients divisible by p
};

WeierstrassPrep weierstrass_prep(const LambdaElement& f, long slack = 4);

struct LambdaModulePresentation {
    Truncation tr;
    size_t rows = 0, cols = 0;
    std::vector<LambdaElement> mat;  // row-major; module = Lambda^rows / column span

    const LambdaElement& at(size_t i, size_t j) const { return mat[i * cols + j]; }
};

// normalized generator p^mu * distinguished of det(presentation)
LambdaElement char_ideal(const LambdaModulePresentation& M);

// ---------------------------------------------------------------- Delta ---

struct GroupAlgebraElement {
    std::vector<long> delta;  // invariant factors of Delta
    Truncation tr;            // only p, N used
    std::vector<mpz_class> c; // one coefficient per group element, mixed radix

    GroupAlgebraElement mul(const GroupAlgebraElement& o) const;
    GroupAlgebraElement add(const GroupAlgebraElement& o) const;
    GroupAlgebraElement sub(const GroupAlgebraElement& o) const;
    bool congruent(const GroupAlgebraElement& o, long upto_pk) const;
};

// e_chi = (1/#Delta) sum_tau Tr(chi(tau)) tau^{-1} for the Z_p-irreducible
// character with orbit representative chi (exponent tuple)
GroupAlgebraElement idempotent(const std::vector<long>& delta, const std::vector<long>& chi,
                               Truncation tr);

// representatives of the Frobenius orbits (Z_p-irreducible characters)
std::vector<std::vector<long>> zp_character_orbits(const std::vector<long>& delta, long p);

// ------------------------------------------------------------- Herbrand ---

// X = sum_i Lambda/(f_i), Y = sum_j Lambda/(g_j), phi given by H (g x f),
// well-defined when g_j | h_{ji} f_i for all i, j.
struct ExactSequenceData {
    Truncation tr;
    std::vector<LambdaElement> f;
    std::vector<LambdaElement> g;
    std::vector<std::vector<LambdaElement>> H;
};

struct HerbrandRecord {
    bool conclusive = false;
    std::string note;
    // orders as powers of p (only finite cases are conclusive)
    long ker_alpha = 0, coker_alpha = 0, ker_beta = 0, coker_beta = 0;
    bool equal = false;
};

HerbrandRecord herbrand_check(const ExactSequenceData& seq);

// #(M/gM) for M = Lambda^k/columns, as a power of p; nullopt = infinite or
// unstable at this truncation
std::optional<long> finite_quotient_order(const LambdaModulePresentation& M,
                                          const LambdaElement& g);

}  // namespace kf
