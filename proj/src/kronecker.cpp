#include "kf/kronecker.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kf {

Real area_invariant(const ComplexLattice& L, long prec) {
    Real V = L.covolume();
    Real out(prec);
    mpfr_set(out.v, V.v, MPFR_RNDN);
    return out / Real::pi(prec);
}

Cplx pontryagin_pairing(const Cplx& z, const Cplx& gamma, const ComplexLattice& L) {
    long prec = std::max(z.prec(), L.w1.prec());
    Real V = L.covolume();
    // exponent = 2 pi i Im(z conj gamma) / V
    Real im = z.im * gamma.re - z.re * gamma.im;
    return polar_unit(2 * Real::pi(prec) * im / V);
}

namespace {

// upper incomplete gamma at integer order n >= 1: (n-1)! e^{-x} sum x^k/k!
Real gamma_upper_int(long n, const Real& x) {
    long prec = x.prec();
    Real sum = Real::of_long(1, prec), term = Real::of_long(1, prec);
    for (long k = 1; k < n; ++k) {
        term = term * x / k;
        sum += term;
    }
    Real fact = Real::of_long(1, prec);
    for (long k = 2; k < n; ++k) fact = fact * k;
    return fact * exp(-x) * sum;
}

// Gamma(-j, x) for j >= 0 by downward recursion from Gamma(0,x) = E1(x)
Real gamma_upper_negint(long j, const Real& x) {
    long prec = x.prec();
    Real cur(prec);
    Real mx = -x;
    mpfr_eint(cur.v, mx.v, MPFR_RNDN);
    cur = -cur;  // E1(x)
    Real emx = exp(-x);
    for (long s = 0; s > -j; --s) {
        // Gamma(s-1, x) = (Gamma(s,x) - x^{s-1} e^{-x}) / (s - 1)
        cur = (cur - pow_si(x, s - 1) * emx) / (s - 1);
    }
    return cur;
}

struct ShellEnum {
    // deterministic square-shell enumeration over a Gauss-reduced basis
    ComplexLattice R;
    explicit ShellEnum(const ComplexLattice& L, long wp)
        : R(ComplexLattice(Cplx(L.w1), Cplx(L.w2))) {
        // Gauss reduction (same lattice)
        for (int it = 0; it < 4000; ++it) {
            Real mu = round_nearest((R.w1.re * R.w2.re + R.w1.im * R.w2.im) / abs2(R.w2));
            if (!mu.is_zero()) R.w1 = R.w1 - R.w2 * mu;
            if (abs2(R.w1) < abs2(R.w2)) { std::swap(R.w1, R.w2); continue; }
            break;
        }
        (void)wp;
    }
};

}  // namespace

CErr kronecker_sum_point(const ComplexLattice& L, const Cplx& w_in, bool in_lattice, long j,
                         const PrecisionContext& ctx) {
    if (j < 1) throw std::invalid_argument("kronecker_sum needs j >= 1 (absolute convergence)");
    long wp = ctx.work_plus(64);
    ShellEnum SE(L, wp);
    const ComplexLattice& R = SE.R;
    Real V = R.covolume();
    Real pi = Real::pi(wp);
    long s = 1 + j;

    Cplx w(wp);
    w.re = w_in.re; w.im = w_in.im;
    // reduce w into the fundamental cell (the pairing and the translated sum
    // are both invariant under w -> w + L)
    w = reduce_mod_lattice(w, R);
    if (in_lattice) w = Cplx::of_long(0, 0, wp);

    // shells until the Gaussian factor is negligible: pi |gamma|^2 / V > bound
    double bound = ((double)wp + 12) * 0.6931471805599453;
    double w1n = std::sqrt(abs2(R.w1).to_double()), w2n = std::sqrt(abs2(R.w2).to_double());
    double Vd = V.to_double();
    double rmax = std::sqrt(bound * Vd / 3.141592653589793) + w1n + w2n + 2;
    long Amax = (long)(rmax / std::max(1e-9, std::min(w1n * 0.49, w2n * 0.49))) + 2;

    Cplx primal = Cplx::of_long(0, 0, wp);
    Cplx dual = Cplx::of_long(0, 0, wp);

    // t0 = 1/V balances both sides
    Real t0 = Real::of_long(1, wp) / V;

    for (long shell = 0; shell <= Amax; ++shell) {
        bool any = false;
        for (long a = -shell; a <= shell; ++a) {
            for (long b = -shell; b <= shell; ++b) {
                if (std::max(std::abs(a), std::abs(b)) != shell) continue;
                Cplx gamma = R.w1 * Real::of_long(a, wp) + R.w2 * Real::of_long(b, wp);
                // primal: skip gamma = 0
                if (shell != 0) {
                    Real g2 = abs2(gamma);
                    double g2d = g2.to_double();
                    if (3.141592653589793 * t0.to_double() * g2d < bound + 10) {
                        Cplx pair = in_lattice ? Cplx::of_long(1, 0, wp)
                                               : pontryagin_pairing(w, gamma, R);
                        Real x = pi * t0 * g2;
                        Real term = gamma_upper_int(s, x) / pow_si(pi * g2, s);
                        primal += pair * term;
                        any = true;
                    }
                }
                // dual: lambda + w
                Cplx lw = gamma + w;
                Real l2 = abs2(lw);
                if (l2.mag2() < -wp) {
                    // lambda = -w exactly (only when w in L): polar handled below
                    any = true;
                    continue;
                }
                double l2d = l2.to_double();
                if (3.141592653589793 / t0.to_double() * l2d / (Vd * Vd) < bound + 10) {
                    Real x = pi * l2 / (t0 * V * V);
                    Real term = pow_si(pi * l2 / (V * V), s - 1) * gamma_upper_negint(j, x);
                    dual += Cplx(term, Real::of_long(0, wp));
                    any = true;
                }
            }
        }
        if (!any && shell > 2) break;
    }
    dual = dual / V;

    // polar pieces: -t0^s / s, plus t0^{s-1}/(s-1)/V when w in L
    Real polar_term = -pow_si(t0, s) / s;
    if (in_lattice) polar_term += pow_si(t0, s - 1) / (s - 1) / V;

    Cplx total = primal + dual + Cplx(polar_term, Real::of_long(0, wp));
    // M_j = pi^s / Gamma(s) * total
    Real fact = Real::of_long(1, wp);
    for (long k = 2; k <= j; ++k) fact = fact * k;
    Cplx out = total * (pow_si(pi, s) / fact);
    return {out, -(ctx.target_bits + ctx.guard_bits - 16) + std::max(0L, mag2(out))};
}

CErr kronecker_sum(const TorsionDivisor& x, long j, const PrecisionContext& ctx) {
    long wp = ctx.work_plus(64);
    Cplx acc = Cplx::of_long(0, 0, wp);
    long err = -(1 << 30);
    for (auto& p : x.points) {
        // w = cx w1 + cy w2
        Real cx(wp), cy(wp);
        mpfr_set_q(cx.v, p.cx.get_mpq_t(), MPFR_RNDN);
        mpfr_set_q(cy.v, p.cy.get_mpq_t(), MPFR_RNDN);
        Cplx w = x.lattice.w1 * cx + x.lattice.w2 * cy;
        bool in_lat = (p.cx.get_den() == 1 && p.cy.get_den() == 1);
        CErr m = kronecker_sum_point(x.lattice, w, in_lat, j, ctx);
        Real mult(wp);
        mpfr_set_q(mult.v, p.mult.get_mpq_t(), MPFR_RNDN);
        acc += m.value * mult;
        err = std::max(err, m.err2 + (long)std::ceil(std::log2(1 + std::abs(mult.to_double()))));
    }
    return {acc, err + (long)x.points.size()};
}

TorsionDivisor eisenstein_correction(const TorsionDivisor& beta, long N, long j,
                                     long correction_exponent) {
    if (N < 2) throw std::invalid_argument("eisenstein_correction needs N >= 2");
    long e = correction_exponent ? correction_exponent : 2 + 2 * j;
    mpq_class deg = beta.degree();
    // c = deg / N^2 * (1 - N^{-e})^{-1} = deg * N^{e-2} / (N^e - 1)
    mpz_class Ne = 1;
    for (long t = 0; t < e; ++t) Ne *= N;
    mpq_class c = deg * mpq_class(Ne / (N * N), Ne - 1);
    c.canonicalize();

    std::map<std::pair<mpq_class, mpq_class>, mpq_class> coeff;
    auto fracpart = [](mpq_class q) {
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
        q -= fl;
        q.canonicalize();
        return q;
    };
    auto addpt = [&](const mpq_class& cx, const mpq_class& cy, const mpq_class& m) {
        coeff[{fracpart(cx), fracpart(cy)}] += m;
    };
    for (auto& p : beta.points) addpt(p.cx, p.cy, p.mult);
    addpt(0, 0, -deg + c * N * N);
    for (long a = 0; a < N; ++a)
        for (long b = 0; b < N; ++b)
            addpt(mpq_class(a, N), mpq_class(b, N), -c);

    TorsionDivisor out(beta.lattice);
    for (auto& [key, m] : coeff) {
        mpq_class mm = m;
        mm.canonicalize();
        if (mm != 0) out.points.push_back({key.first, key.second, mm});
    }
    if (out.degree() != 0) throw std::logic_error("corrected divisor has nonzero degree");
    return out;
}

// ----------------------------------------------------------------- L' ---

PrimitiveCharacter primitive_lift(const HeckeCharacter& chi) {
    const RayClassGroup& G = *chi.group;
    PrimitiveCharacter out;
    out.group = std::make_shared<RayClassGroup>(ray_class_group(G.field, chi.conductor));
    HeckeCharacter lifted;
    lifted.group = out.group.get();
    lifted.conductor = chi.conductor;
    for (size_t k = 0; k < out.group->rank(); ++k) {
        long n = out.group->structure.invariant_factors[k];
        std::vector<long> ek(out.group->rank(), 0);
        ek[k] = 1;
        IntegralIdeal rep = out.group->ideal_in_class_coprime(ek, G.modulus);
        auto [num, den] = chi.angle_ideal(rep);
        // angle must be a multiple of 1/n
        if ((num * n) % den != 0)
            throw std::logic_error("primitive lift angle is not compatible");
        lifted.exps.push_back(((num * n / den) % n + n) % n);
    }
    out.chi = lifted;
    // consistency: the lift agrees with chi on the generators of G
    for (size_t k = 0; k < G.rank(); ++k) {
        const IntegralIdeal& g = G.structure.generators[k];
        std::vector<long> vk(G.rank(), 0);
        vk[k] = 1;
        if (out.chi.angle_ideal(g) != chi.angle_class(vk))
            throw std::logic_error("primitive lift disagrees with chi");
    }
    return out;
}

std::pair<mpq_class, mpq_class> CMData::torsion_coords(const QuadInt& b) const {
    // b * f_m^{-1} = b * den(f) / num(f); over (1, omega):
    // b*den * conj(num) / N(num)
    QuadInt numer = field.mul(field.mul(b, f_m.den), field.conj(f_m.num));
    mpz_class nn = field.norm(f_m.num);
    mpq_class cx(numer.x, nn), cy(numer.y, nn);
    cx.canonicalize();
    cy.canonicalize();
    return {cx, cy};
}

CMData build_cm_data(const QuadField& F, const RayClassGroup& Gf, const IntegralIdeal& cond_chi,
                     const FieldFraction& f_m) {
    CMData cm;
    cm.field = F;
    cm.period = Cplx::of_long(1, 0, 64);
    cm.conductor = Gf.modulus;
    cm.cond_chi = cond_chi;
    cm.f_m = f_m;
    cm.w_f = Gf.w_m;
    if (class_number(F) != 1)
        throw std::invalid_argument("unsupported regime: class number > 1");
    // one representative residue per ray class, canonical enumeration order
    std::map<std::vector<long>, QuadInt> reps;
    for (auto& r : F.invertible_residues(Gf.modulus)) {
        auto cls = Gf.class_of_residue(r);
        if (!reps.count(cls)) reps[cls] = r;
    }
    if ((long)reps.size() != Gf.order())
        throw std::logic_error("class representative enumeration is incomplete");
    for (auto& [cls, r] : reps) cm.class_reps.push_back({cls, r});
    return cm;
}

LprimeResult lprime_kronecker(const QuadField& F, const HeckeCharacter& chi, long j,
                              const CMData& cm, const PrecisionContext& ctx,
                              const LprimeOptions& opt) {
    if (chi.is_trivial()) throw std::invalid_argument("chi must be nontrivial");
    if (class_number(F) != 1)
        throw std::invalid_argument("unsupported regime: class number > 1");
    if (j < 1) throw std::invalid_argument("j >= 1 required");
    long wp = ctx.work_plus(64);
    Real pi = Real::pi(wp);

    ComplexLattice O = CMLattice{F, F.ring(), 1}.embed(wp);

    // chi(rho_{f_chi}): the class of the cofactor ideal c with (f_m^{-1}) = c m^{-1}
    PrimitiveCharacter prim = primitive_lift(chi);
    IntegralIdeal cofactor = F.principal(cm.f_m.den);
    auto [rnum, rden] = prim.chi.angle_ideal(cofactor);
    if (opt.rho == RhoConvention::chi_bar_of_c) rnum = (rden - rnum) % rden;
    Cplx chi_rho = (rnum == 0) ? Cplx::of_long(1, 0, wp) : polar_unit(pi * (2 * rnum) / rden);

    Cplx sum = Cplx::of_long(0, 0, wp);
    long errmax = -(1 << 30);
    std::vector<IntegralIdeal> reps;
    for (auto& [cls, b] : cm.class_reps) {
        Cplx chig = chi.value_class(cls, wp);
        auto [cx, cy] = cm.torsion_coords(b);
        CErr Mj{Cplx(wp), 0};
        Real A(wp);
        if (opt.lambda == LambdaConvention::b) {
            // Gamma_g = O, beta_g = b * f_m^{-1}
            TorsionDivisor div(O);
            // point coordinates are over (1, omega) = (w2, w1) of the embedded basis
            div.points.push_back({cy, cx, 1});
            Mj = kronecker_sum(div, j, ctx);
            A = area_invariant(O, wp);
        } else {
            // Gamma_g = b^{-1} O, beta_g = b^{-1} * f_m^{-1}
            Cplx bemb = F.embed(b, wp);
            ComplexLattice Lg(O.w1 / bemb, O.w2 / bemb);
            auto [fx, fy] = cm.torsion_coords(QuadInt(1, 0));  // f_m^{-1} itself
            Real qx(wp), qy(wp);
            mpfr_set_q(qx.v, fx.get_mpq_t(), MPFR_RNDN);
            mpfr_set_q(qy.v, fy.get_mpq_t(), MPFR_RNDN);
            Cplx beta = (F.omega_embed(wp) * qy + Cplx(qx, Real::of_long(0, wp))) / bemb;
            Mj = kronecker_sum_point(Lg, beta, false, j, ctx);
            A = area_invariant(Lg, wp);
        }
        sum += chig * pow_si(Cplx(A, Real::of_long(0, wp)), 1 + j) * Mj.value;
        errmax = std::max(errmax, Mj.err2);
        reps.push_back(F.principal(b));
    }

    // prefactor: (-1)^j Phi(m)(j!)^2/Phi(f) (sqrt(|d|) N m / 2 pi)^j / w_f
    mpz_class phim = totient(F, cm.cond_chi), phif = totient(F, cm.conductor);
    Real fact = Real::of_long(1, wp);
    for (long k = 2; k <= j; ++k) fact = fact * k;
    Real ratio(wp);
    {
        mpq_class r(phim, phif);
        r.canonicalize();
        mpfr_set_q(ratio.v, r.get_mpq_t(), MPFR_RNDN);
    }
    Real nm(wp);
    mpfr_set_z(nm.v, cm.cond_chi.norm().get_mpz_t(), MPFR_RNDN);
    Real pref = ratio * fact * fact * pow_si(sqrt(Real::of_long(-F.d, wp)) *
                                             (F.omega_half ? Real::of_long(1, wp)
                                                           : Real::of_long(2, wp)) *
                                                 nm / (2 * pi),
                                             j);
    // sqrt(|d_K|): |disc| = |d| (omega_half) or 4|d|
    if (j % 2) pref = -pref;
    Cplx value = chi_rho * sum * pref / Real::of_long(cm.w_f, wp);

    LprimeResult out;
    out.value = value;
    (void)errmax;
    out.err2 = std::max(mag2(value), 0L) - (ctx.target_bits + ctx.guard_bits - 20);
    out.normalization = std::string(opt.lambda == LambdaConvention::b ? "lambda=b" : "lambda=b-inverse") +
                        "," + (opt.rho == RhoConvention::chi_of_c ? "rho=chi(c)" : "rho=conj-chi(c)");
    out.rep_ideals = reps;
    return out;
}

}  // namespace kf
