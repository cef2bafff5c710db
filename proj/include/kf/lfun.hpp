// Hecke L-functions of ray class characters over imaginary quadratic fields:
// Dirichlet series by ideal enumeration, the completed Lambda through
// incomplete-gamma smoothed sums, numerically solved root numbers,
// L'(chi,-j) via the reflection formula, zeta*_F(1-m) as a product of
// per-character derivatives, and the exact rational bookkeeping feeding the
// covolume identity.

#pragma once

#include "kf/kronecker.hpp"

namespace kf {

struct LValueResult {
    std::string character_id;
    std::string method;  // dirichlet | euler | functional_equation | kronecker
    Cplx value;
    long err2 = 0;
    long terms_used = 0;
};

// Evaluation engine for one character (lifted to its conductor internally).
class LSeriesEngine {
  public:
    LSeriesEngine(const HeckeCharacter& chi, const PrecisionContext& ctx);

    bool trivial() const { return trivial_; }
    const IntegralIdeal& conductor() const { return cond_; }
    // sqrt(|d_K| N(conductor))
    const Real& completed_scale() const { return A_; }

    // root number W with |W| = 1; solved once and cached
    Cplx root_number();

    // completed Lambda(chi, s) at integer s via the smoothed identity
    Cplx lambda_at(long s);

    // L(chi, s) at integer s >= 2 (primitive series)
    Cplx l_at(long s);

    // L'(chi, -j), j >= 1 (first-order trivial zero)
    Cplx lprime_neg(long j);

    long terms_used() const { return terms_; }
    long work_bits() const { return wp_; }

  private:
    PrecisionContext ctx_;
    QuadField F_;
    PrimitiveCharacter prim_;
    bool trivial_;
    IntegralIdeal cond_;
    Real A_;
    long wp_;       // inflated working precision
    long kappa_den_ = 0;  // polar residue h/w for the trivial character
    long kappa_num_ = 0;
    std::vector<Cplx> coeff_;  // chi(a) summed per norm, 1..X
    std::optional<Cplx> W_;
    long terms_ = 0;

    Cplx smoothed_F(bool conjugated, long s) const;
    Cplx dirichlet_tail_free(long s) const;  // sum c[n] n^{-s} for large integer s
};

// the spec-level operations ------------------------------------------------

// L(chi, s) for Re(s) >= 1.25; integer real s >= 2 uses the smoothed exact
// path, otherwise a truncated ideal sum with a divisor-bound tail estimate.
LValueResult l_series(const HeckeCharacter& chi, const Cplx& s, const PrecisionContext& ctx);

// Euler product over prime ideals of norm <= bound (cross-check route)
LValueResult euler_product(const HeckeCharacter& chi, long s, long norm_bound,
                           const PrecisionContext& ctx);

LValueResult functional_equation_lprime(const HeckeCharacter& chi, long j,
                                        const PrecisionContext& ctx);

struct ZetaStarResult {
    Real value;
    long err2;
    long vanishing_order;
    std::vector<LValueResult> factors;
};

// zeta*_{K(f)}(1-m) = prod_chi L'(chi, 1-m), real
ZetaStarResult zeta_star(const QuadField& F, const IntegralIdeal& f, long m,
                         const PrecisionContext& ctx);

struct RationalFactor {
    mpq_class value;
    struct Piece {
        std::string character_id;
        mpz_class phi_cond;
    };
    std::vector<Piece> per_character;
};

// prod_chi (-1)^{1-m} (2m)! Phi(f) / ((2 N f)^{m-1} Phi(f_chi)), exact
RationalFactor lichtenbaum_rational_factor(const QuadField& F, const IntegralIdeal& f, long m);

// prod_chi (2 N f)^{m-1} Phi(f_chi) / ((-1)^{1-m} (2m)! Phi(f)) * L'(chi, 1-m)
ZetaStarResult covolume_motivic(const QuadField& F, const IntegralIdeal& f, long m,
                                const PrecisionContext& ctx);

std::string character_id(const HeckeCharacter& chi);

}  // namespace kf
