// Class groups via reduced binary quadratic forms, ray class groups via the
// unit exact sequence over (O/f)^x, and Hecke (ray class) characters with
// conductor computation.

#pragma once

#include <map>
#include <vector>

#include "kf/field.hpp"

namespace kf {

struct AbelianGroupStructure {
    std::vector<long> invariant_factors;   // ascending divisibility: n1 | n2 | ...
    std::vector<IntegralIdeal> generators; // representative ideals, one per factor
    long order() const {
        long o = 1;
        for (long n : invariant_factors) o *= n;
        return o;
    }
};

struct QForm {
    mpz_class a, b, c;
    bool operator<(const QForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
    bool operator==(const QForm& o) const { return a == o.a && b == o.b && c == o.c; }
};

std::vector<QForm> reduced_forms(long disc);
long class_number(const QuadField& F);
AbelianGroupStructure class_group(const QuadField& F);

class RayClassGroup {
  public:
    QuadField field;
    IntegralIdeal modulus;
    AbelianGroupStructure structure;
    long w_m = 1;  // #{zeta in mu(K) : zeta == 1 mod modulus}

    long order() const { return structure.order(); }
    size_t rank() const { return structure.invariant_factors.size(); }

    // exponent vector of the ray class of an ideal coprime to the modulus
    std::vector<long> class_of(const IntegralIdeal& a) const;
    std::vector<long> class_of_residue(const QuadInt& r) const;
    std::vector<long> identity_class() const { return std::vector<long>(rank(), 0); }

    std::vector<std::vector<long>> all_classes() const;
    std::vector<long> compose(const std::vector<long>& u, const std::vector<long>& v) const;
    std::vector<long> inverse_class(const std::vector<long>& v) const;

    // representative ideal of a class, optionally coprime to extra
    IntegralIdeal ideal_in_class(const std::vector<long>& v) const;
    IntegralIdeal ideal_in_class_coprime(const std::vector<long>& v,
                                         const IntegralIdeal& extra) const;

    // --- internals, exposed for the character layer ---
    // residue-group data for (O/f)^x
    std::vector<long> residue_orders;                       // orders of residue generators
    std::vector<QuadInt> residue_gens;
    std::map<std::pair<long, long>, std::vector<long>> residue_dlog;
    // class-group extension data (empty when h = 1)
    std::vector<IntegralIdeal> cls_gens;
    std::vector<long> cls_orders;
    // transform: exponent vector over (residue gens | cls gens) -> structure coords
    std::vector<std::vector<mpz_class>> V;     // column transform from SNF
    std::vector<long> diag;                    // SNF diagonal (pre filtering)
    std::vector<size_t> keep;                  // indices with diag > 1

    std::vector<long> project(const std::vector<mpz_class>& raw) const;
};

RayClassGroup ray_class_group(const QuadField& F, const IntegralIdeal& f);

class HeckeCharacter {
  public:
    const RayClassGroup* group = nullptr;
    std::vector<long> exps;      // angle on generator i is exps[i] / n_i
    IntegralIdeal conductor;

    bool is_trivial() const {
        for (long e : exps)
            if (e) return false;
        return true;
    }
    long order() const;
    HeckeCharacter conjugate() const;

    // exact angle t in [0,1) with chi = e^{2 pi i t}, as reduced num/den
    std::pair<long, long> angle_class(const std::vector<long>& v) const;
    std::pair<long, long> angle_ideal(const IntegralIdeal& a) const;
    Cplx value_class(const std::vector<long>& v, long prec) const;
    Cplx value_ideal(const IntegralIdeal& a, long prec) const;
};

std::vector<HeckeCharacter> characters(const RayClassGroup& G);

// all ideal divisors of f, from its prime factorization
std::vector<IntegralIdeal> ideal_divisors(const QuadField& F, const IntegralIdeal& f);

}  // namespace kf
