// High-precision evaluation of the transcendental layer: Dedekind eta,
// Delta, the theta function
//   theta(z,tau) = i e^{(pi i z/2)(z-zbar)/(tau-taubar)} q_tau^{1/12}
//                  q_z^{-1/2}(1-q_z) prod (1-q_z q^n)(1-q_z^{-1} q^n),
// Weierstrass wp, and Robert's lattice-pair function
//   vartheta(z; L, L') = delta(L,L') prod_{u in T} (wp(z;L)-wp(u;L))^{-1}
// with the 12th root of unity pinned by the m = 2,3 norm relations.
//
// All series are evaluated after reduction (tau to the fundamental domain,
// z modulo the lattice) and carry certified absolute error bounds.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "kf/field.hpp"

namespace kf {

// value with absolute error bound 2^err2
struct CErr {
    Cplx value;
    long err2;
};

struct ComplexLattice {
    Cplx w1, w2;  // oriented basis, Im(w1/w2) > 0

    ComplexLattice(Cplx a, Cplx b);  // reorients if needed
    Cplx tau() const { return w1 / w2; }
    Real covolume() const;  // Im(w1 * conj(w2)) > 0
};

// lattice I/den inside C via the fixed embedding of K (Im omega > 0)
struct CMLattice {
    QuadField F;
    IntegralIdeal I;
    mpz_class den = 1;

    ComplexLattice embed(long prec) const;
    CMLattice scaled_inverse_mul(const IntegralIdeal& a) const;  // a^{-1} * this
    CMLattice mul(const IntegralIdeal& a) const;                 // a * this
};

class NearDivisor : public std::runtime_error {
  public:
    explicit NearDivisor(const std::string& m) : std::runtime_error(m) {}
};

// Dedekind eta of tau (upper half plane), with modular reduction
CErr eta(const Cplx& tau, const PrecisionContext& ctx);
// eta(w1, w2) = w2^{-1} 2 pi eta(tau)^2
CErr eta_basis(const ComplexLattice& L, const PrecisionContext& ctx);
// Delta(L) = eta(w1,w2)^12, basis independent
CErr delta_lattice(const ComplexLattice& L, const PrecisionContext& ctx);

CErr theta(const Cplx& z, const Cplx& tau, const PrecisionContext& ctx);
CErr theta_basis(const Cplx& z, const ComplexLattice& L, const PrecisionContext& ctx);

CErr wp(const Cplx& z, const ComplexLattice& L, const PrecisionContext& ctx);
CErr wp_prime(const Cplx& z, const ComplexLattice& L, const PrecisionContext& ctx);
// invariants g2, g3 with (wp')^2 = 4 wp^3 - g2 wp - g3
std::pair<CErr, CErr> lattice_invariants(const ComplexLattice& L, const PrecisionContext& ctx);

// z reduced into the centered fundamental cell, returning also the removed
// lattice coordinates
Cplx reduce_mod_lattice(const Cplx& z, const ComplexLattice& L, long* mm = nullptr,
                        long* nn = nullptr);

class LatticePair {
  public:
    ComplexLattice L, Lp;
    long index;                                    // [Lp : L], prime to 6
    std::array<std::array<long, 2>, 2> M;          // columns: L basis in Lp coords
    std::vector<std::pair<long, long>> transversal;  // T in Lp coords (+- reduced)
    std::vector<std::pair<long, long>> cosets;       // all of Lp/L in Lp coords

    // root data, filled by pin_root()
    std::optional<Cplx> delta_pair;  // delta(L, L')
    std::optional<Cplx> root_choice; // C(omega, omega')

    // cached wp values at the transversal, keyed by working precision
    std::vector<Cplx> wp_T_cache;
    long cache_bits = 0;

    // exact coordinates: columns of M express (L.w1, L.w2) in (Lp.w1, Lp.w2)
    LatticePair(ComplexLattice l, ComplexLattice lp, std::array<std::array<long, 2>, 2> m);

    // numeric constructor: coordinates recovered by rounding, then verified
    static LatticePair from_lattices(const ComplexLattice& l, const ComplexLattice& lp,
                                     const PrecisionContext& ctx);

    Cplx coset_point(const std::pair<long, long>& c) const;

    void pin_root(const PrecisionContext& ctx);
};

LatticePair pair_of_cm(const CMLattice& L, const IntegralIdeal& a, long prec);

// vartheta(z; L, L') - elliptic in z w.r.t. L
CErr robert_theta(const Cplx& z, LatticePair& pair, const PrecisionContext& ctx);

// Kato's Theta_a(z) = vartheta(z; L, a^{-1}L), a prime to 6
CErr kato_theta(const Cplx& z, const CMLattice& L, const IntegralIdeal& a,
                const PrecisionContext& ctx);

// winding number of f along a small circle |z - z0| = r (zero/pole counting)
long winding_number(const std::function<Cplx(const Cplx&)>& f, const Cplx& z0, const Real& r,
                    long samples, long prec);

}  // namespace kf
