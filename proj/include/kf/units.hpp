// Elliptic units: the numbers _a z_f = vartheta(1; f, a^{-1} f) and
// u(a) = Delta(O)/Delta(a^{-1}), their Galois orbits, the exchange and
// norm-compatibility laws, and integer-polynomial recognition of full
// conjugate orbits.  Class-number-one regime throughout.

#pragma once

#include "kf/lfun.hpp"

namespace kf {

struct EllipticUnitSpec {
    QuadField field;
    IntegralIdeal conductor;  // f != (1)
    IntegralIdeal aux;        // a, coprime to 6f
    Cplx value;
    long err2;
};

EllipticUnitSpec elliptic_unit(const QuadField& F, const IntegralIdeal& f, const IntegralIdeal& a,
                               const PrecisionContext& ctx);

// u(a) = Delta(O_K)/Delta(a^{-1}); for principal a = (alpha) this is alpha^{-12}
CErr u_unit(const QuadField& F, const IntegralIdeal& a, const PrecisionContext& ctx);

// value of _a z_f under the Artin symbol of c, i.e. vartheta(1; c^{-1}f, c^{-1}a^{-1}f)
Cplx galois_conjugate(const EllipticUnitSpec& spec, const IntegralIdeal& c,
                      const PrecisionContext& ctx);

struct LawRecord {
    std::string law;       // "4.3iii" | "4.3iv-a" | "4.3iv-b" | "4.3iv-c"
    Cplx lhs, rhs;
    long residual_log2;    // log2 |lhs - rhs| relative to |rhs|
    bool accepted;
};

// exchange law (_a z_f)^{Nc - sigma_c} = (_c z_f)^{Na - sigma_a}
LawRecord exchange_law(const QuadField& F, const IntegralIdeal& f, const IntegralIdeal& a,
                       const IntegralIdeal& c, const PrecisionContext& ctx);

// norm compatibility across K(pf)/K(f); case tag per the three regimes
LawRecord verify_norm_compat(const QuadField& F, const IntegralIdeal& f, const IntegralIdeal& p,
                             const IntegralIdeal& a, const PrecisionContext& ctx);

struct AlgebraicRecognition {
    std::vector<mpz_class> coeffs;  // monic: coeffs[k] multiplies x^k, coeffs.back() = 1
    double residual_log2;
    bool accepted;
    mpz_class value_scale;          // values were multiplied by this before rounding
};

// expands prod (x - scale*v_i) and rounds the coefficients to integers;
// scale clears predicted denominators (1 when the values are integral)
AlgebraicRecognition recognize_algebraic(const std::vector<Cplx>& orbit, const PrecisionContext& ctx,
                                         const mpz_class& value_scale = 1);

struct IntegralityRecord {
    std::string kind;  // "unit" | "p-unit"
    long prime;        // underlying rational prime in the p-unit case
    long prime_power;  // exponent k with |constant| = prime^k
    AlgebraicRecognition poly;
};

// full conjugate orbit of _a z_f (ray classes and complex conjugation),
// recognized as an integer polynomial; checks the two integrality cases
IntegralityRecord verify_integrality(const QuadField& F, const IntegralIdeal& f,
                                     const IntegralIdeal& a, const PrecisionContext& ctx);

// orbit values of _a z_f over all ray classes mod f (no conjugation closure)
std::vector<Cplx> unit_orbit(const QuadField& F, const IntegralIdeal& f, const IntegralIdeal& a,
                             const PrecisionContext& ctx);

}  // namespace kf
