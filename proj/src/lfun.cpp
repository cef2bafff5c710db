#include "kf/lfun.hpp"

#include <algorithm>
#include <cmath>

namespace kf {

namespace {

// upper incomplete gamma at integer order (n can be <= 0), real x > 0
Real gamma_upper_any(long n, const Real& x) {
    long prec = x.prec();
    if (n >= 1) {
        Real sum = Real::of_long(1, prec), term = Real::of_long(1, prec);
        for (long k = 1; k < n; ++k) {
            term = term * x / k;
            sum += term;
        }
        Real fact = Real::of_long(1, prec);
        for (long k = 2; k < n; ++k) fact = fact * k;
        return fact * exp(-x) * sum;
    }
    Real cur(prec);
    Real mx = -x;
    mpfr_eint(cur.v, mx.v, MPFR_RNDN);
    cur = -cur;  // Gamma(0, x) = E1(x)
    Real emx = exp(-x);
    for (long s = 0; s > n; --s) cur = (cur - pow_si(x, s - 1) * emx) / (s - 1);
    return cur;
}

std::string angle_str(const HeckeCharacter& chi) {
    std::string s = "chi[";
    for (size_t i = 0; i < chi.exps.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(chi.exps[i]);
    }
    s += "]";
    return s;
}

}  // namespace

std::string character_id(const HeckeCharacter& chi) {
    std::string s = angle_str(chi);
    s += " mod N" + chi.group->modulus.norm().get_str();
    return s;
}

LSeriesEngine::LSeriesEngine(const HeckeCharacter& chi, const PrecisionContext& ctx)
    : ctx_(ctx), F_(chi.group->field), prim_(primitive_lift(chi)),
      trivial_(chi.is_trivial()), cond_(chi.conductor), A_(8), wp_(0) {
    // working precision with headroom for the sigma-big solve
    long wbase = ctx.work_plus(32);
    double Ad = std::sqrt((double)(F_.omega_half ? -F_.d : -4 * F_.d) *
                          cond_.norm().get_d());
    long sigma_b = 2 + (long)std::ceil((wbase + 16) / 12.0);
    double lg = std::lgamma((double)sigma_b) / std::log(2.0) +
                sigma_b * std::abs(std::log2(Ad / 6.283185307179586)) + 96;
    wp_ = wbase + (long)lg;
    A_ = sqrt(Real::of_long(F_.omega_half ? -F_.d : -4 * F_.d, wp_) *
              Real::of_long(cond_.norm().get_si(), wp_));
    if (trivial_) {
        kappa_num_ = class_number(F_);
        kappa_den_ = F_.w_K;
    }

    // chi coefficients per norm up to X, enough for both the smoothed sums
    // (exp cutoff) and the direct sigma-big series (power cutoff)
    long Xs = (long)(Ad * (wp_ + 24) * 0.6931471805599453 / 6.283185307179586) + 8;
    long Xd = 1L << 13;
    long X = std::max(Xs, Xd);
    coeff_.assign((size_t)X + 1, Cplx::of_long(0, 0, wp_));
    coeff_[1] = Cplx::of_long(1, 0, wp_);
    for (long p = 2; p <= X; ++p) {
        // cheap primality
        bool isp = p >= 2;
        for (long q = 2; q * q <= p && isp; ++q)
            if (p % q == 0) isp = false;
        if (!isp) continue;
        auto sp = F_.factor_rational_prime(p);
        for (auto& P : sp.primes) {
            mpz_class nP = P.norm();
            if (!nP.fits_slong_p() || nP.get_si() > X) continue;
            long q = nP.get_si();
            if (!F_.coprime(P, cond_)) continue;  // primitive series omits p | m
            Cplx chiP = prim_.chi.value_ideal(P, wp_);
            for (long n = q; n <= X; n += q) coeff_[n] += chiP * coeff_[n / q];
        }
    }
    terms_ = X;
}

Cplx LSeriesEngine::smoothed_F(bool conjugated, long s) const {
    // F(s) = sum_n c[n] (2 pi n / A)^{-s} Gamma(s, 2 pi n / A)
    Real pi = Real::pi(wp_);
    Cplx acc = Cplx::of_long(0, 0, wp_);
    double cutoff = (wp_ + 16) * 0.6931471805599453;
    for (long n = 1; n < (long)coeff_.size(); ++n) {
        if (coeff_[n].is_zero()) continue;
        Real x = 2 * pi * n / A_;
        if (x.to_double() > cutoff) break;
        Real t = gamma_upper_any(s, x) / pow_si(x, s);
        Cplx c = conjugated ? conj(coeff_[n]) : coeff_[n];
        acc += c * t;
    }
    return acc;
}

Cplx LSeriesEngine::dirichlet_tail_free(long s) const {
    Cplx acc = Cplx::of_long(0, 0, wp_);
    for (long n = 1; n < (long)coeff_.size(); ++n) {
        if (coeff_[n].is_zero()) continue;
        acc += coeff_[n] / pow_si(Real::of_long(n, wp_), s);
    }
    return acc;
}

Cplx LSeriesEngine::root_number() {
    if (W_) return *W_;
    if (trivial_) {
        W_ = Cplx::of_long(1, 0, wp_);
        return *W_;
    }
    long sigma_b = 2 + (long)std::ceil((ctx_.work_plus(32) + 16) / 12.0);
    Real pi = Real::pi(wp_);
    // Lambda(sigma_b) directly from the convergent Dirichlet series
    Real fact = Real::of_long(1, wp_);
    for (long k = 2; k < sigma_b; ++k) fact = fact * k;
    Cplx lam = dirichlet_tail_free(sigma_b) * fact * pow_si(A_ / (2 * pi), sigma_b);
    Cplx num = lam - smoothed_F(false, sigma_b);
    Cplx den = smoothed_F(true, 1 - sigma_b);
    if (mag2(den) < mag2(lam) - (wp_ - ctx_.target_bits) + 64)
        throw std::runtime_error("root-number solve ill-conditioned: |F_bar(1-s)| too small vs Lambda scale");
    Cplx W = num / den;
    Real dev = abs2(W) - 1;
    if (dev.mag2() > -(ctx_.target_bits / 2))
        throw std::runtime_error("root number failed |W| = 1 at the requested precision");
    W_ = W;
    return *W_;
}

Cplx LSeriesEngine::lambda_at(long s) {
    Cplx W = root_number();
    Cplx lam = smoothed_F(false, s) + W * smoothed_F(true, 1 - s);
    if (trivial_) {
        // + (h/w) [ 1/(s-1) - 1/s ]
        Real kappa = Real::of_long(kappa_num_, wp_) / kappa_den_;
        if (s == 0 || s == 1) throw std::invalid_argument("Lambda has poles at s = 0, 1");
        lam += Cplx(kappa * (Real::of_long(1, wp_) / (s - 1) - Real::of_long(1, wp_) / s),
                    Real::of_long(0, wp_));
    }
    return lam;
}

Cplx LSeriesEngine::l_at(long s) {
    if (s < 2) throw std::invalid_argument("l_at wants integer s >= 2");
    Real pi = Real::pi(wp_);
    Real fact = Real::of_long(1, wp_);
    for (long k = 2; k < s; ++k) fact = fact * k;
    return lambda_at(s) * pow_si(2 * pi / A_, s) / fact;
}

Cplx LSeriesEngine::lprime_neg(long j) {
    if (j < 1) throw std::invalid_argument("lprime_neg wants j >= 1");
    Real pi = Real::pi(wp_);
    Real fact = Real::of_long(1, wp_);
    for (long k = 2; k <= j; ++k) fact = fact * k;
    Cplx lam = lambda_at(-j);
    Cplx val = lam * pow_si(A_ / (2 * pi), j) * fact;
    if (j % 2) val = -val;
    return val;
}

// ------------------------------------------------------------ operations ---

LValueResult l_series(const HeckeCharacter& chi, const Cplx& s, const PrecisionContext& ctx) {
    double sre = s.re.to_double(), sim = s.im.to_double();
    if (sre < 1.25) throw std::invalid_argument("l_series wants Re(s) >= 1.25; use the functional equation path below the strip");
    LValueResult out;
    out.character_id = character_id(chi);
    long wp = ctx.work_plus(32);

    bool integer_real = (sim == 0.0) && (sre == std::floor(sre)) && sre >= 2 && sre < 64;
    if (integer_real) {
        LSeriesEngine eng(chi, ctx);
        long si = (long)sre;
        Cplx prim = eng.l_at(si);
        // reinstate Euler factors at p | modulus, p coprime to the conductor
        const QuadField& F = chi.group->field;
        PrimitiveCharacter pc = primitive_lift(chi);
        for (auto& fac : F.factor_ideal(chi.group->modulus)) {
            if (!F.coprime(fac.prime, chi.conductor)) continue;
            Cplx chiP = pc.chi.value_ideal(fac.prime, eng.work_bits());
            Real npow = pow_si(Real::of_long(fac.prime.norm().get_si(), eng.work_bits()), si);
            prim = prim * (Cplx::of_long(1, 0, eng.work_bits()) - chiP / npow);
        }
        out.value = prim;
        out.err2 = std::max(mag2(prim), 0L) - (ctx.target_bits + ctx.guard_bits - 16);
        out.method = "dirichlet";
        out.terms_used = eng.terms_used();
        return out;
    }

    // truncated ideal sum with a certified divisor-bound tail
    const QuadField& F = chi.group->field;
    long X = 200000;
    Cplx acc = Cplx::of_long(0, 0, wp);
    // coefficients at modulus level via prime ideal sieve (double pass cheap)
    std::vector<Cplx> c((size_t)X + 1, Cplx::of_long(0, 0, wp));
    c[1] = Cplx::of_long(1, 0, wp);
    for (long p = 2; p <= X; ++p) {
        bool isp = true;
        for (long q = 2; q * q <= p; ++q)
            if (p % q == 0) { isp = false; break; }
        if (!isp) continue;
        auto sp = F.factor_rational_prime(p);
        for (auto& P : sp.primes) {
            if (!P.norm().fits_slong_p()) continue;
            long q = P.norm().get_si();
            if (q > X) continue;
            if (!F.coprime(P, chi.group->modulus)) continue;
            Cplx chiP = chi.value_ideal(P, wp);
            for (long n = q; n <= X; n += q) c[n] += chiP * c[n / q];
        }
    }
    for (long n = 1; n <= X; ++n) {
        if (c[n].is_zero()) continue;
        Real ln = log(Real::of_long(n, wp));
        acc += c[n] * expc(Cplx(-s.re * ln, -s.im * ln));  // n^{-s}
    }
    out.value = acc;
    // tail: sum_{n>X} d(n) n^{-sigma} <= sigma [ (ln X + 1) X^{1-sigma}/(sigma-1) + X^{1-sigma}/(sigma-1)^2 ]
    double sig = sre;
    double tail = sig * ((std::log((double)X) + 1) * std::pow((double)X, 1 - sig) / (sig - 1) +
                         std::pow((double)X, 1 - sig) / ((sig - 1) * (sig - 1)));
    out.err2 = (long)std::ceil(std::log2(tail + 1e-300)) + 1;
    out.method = "dirichlet";
    out.terms_used = X;
    return out;
}

LValueResult euler_product(const HeckeCharacter& chi, long s, long norm_bound,
                           const PrecisionContext& ctx) {
    const QuadField& F = chi.group->field;
    long wp = ctx.work_plus(32);
    Cplx acc = Cplx::of_long(1, 0, wp);
    long used = 0;
    for (long p = 2; p <= norm_bound; ++p) {
        bool isp = true;
        for (long q = 2; q * q <= p; ++q)
            if (p % q == 0) { isp = false; break; }
        if (!isp) continue;
        auto sp = F.factor_rational_prime(p);
        for (auto& P : sp.primes) {
            if (!P.norm().fits_slong_p() || P.norm().get_si() > norm_bound) continue;
            if (!F.coprime(P, chi.group->modulus)) continue;
            Cplx chiP = chi.value_ideal(P, wp);
            Real npow = pow_si(Real::of_long(P.norm().get_si(), wp), s);
            acc = acc * inv(Cplx::of_long(1, 0, wp) - chiP / npow);
            ++used;
        }
    }
    LValueResult out;
    out.character_id = character_id(chi);
    out.method = "euler";
    out.value = acc;
    // defect dominated by missing split primes above the bound
    double tail = 2.0 / ((double)norm_bound * std::log((double)norm_bound)) * 2.0;
    out.err2 = (long)std::ceil(std::log2(tail));
    out.terms_used = used;
    return out;
}

LValueResult functional_equation_lprime(const HeckeCharacter& chi, long j,
                                        const PrecisionContext& ctx) {
    LSeriesEngine eng(chi, ctx);
    Cplx W = eng.root_number();
    LValueResult out;
    out.character_id = character_id(chi);
    out.method = "functional_equation";
    out.value = eng.lprime_neg(j);
    out.err2 = std::max(mag2(out.value), 0L) - (ctx.target_bits + ctx.guard_bits - 16);
    out.terms_used = eng.terms_used();
    (void)W;
    return out;
}

ZetaStarResult zeta_star(const QuadField& F, const IntegralIdeal& f, long m,
                         const PrecisionContext& ctx) {
    if (m < 2) throw std::invalid_argument("zeta_star wants m >= 2");
    auto G = ray_class_group(F, f);
    auto chars = characters(G);
    long wp = ctx.work_plus(32);
    Cplx prod = Cplx::of_long(1, 0, wp);
    ZetaStarResult out{Real(wp), 0, (long)chars.size(), {}};
    for (auto& chi : chars) {
        LValueResult r = functional_equation_lprime(chi, m - 1, ctx);
        if (mag2(r.value) < r.err2)
            throw std::runtime_error("zeta_star factor indistinguishable from zero");
        prod = prod * r.value;
        out.factors.push_back(std::move(r));
    }
    if (prod.im.mag2() > prod.re.mag2() - ctx.target_bits + 16)
        throw std::runtime_error("zeta_star developed an imaginary part");
    out.value = prod.re;
    out.err2 = std::max(prod.re.mag2(), 0L) - (ctx.target_bits + ctx.guard_bits - 20);
    return out;
}

RationalFactor lichtenbaum_rational_factor(const QuadField& F, const IntegralIdeal& f, long m) {
    auto G = ray_class_group(F, f);
    auto chars = characters(G);
    RationalFactor out;
    out.value = 1;
    mpz_class fact2m = 1;
    for (long k = 2; k <= 2 * m; ++k) fact2m *= k;
    mpz_class phif = totient(F, f);
    mpz_class nf = f.norm();
    mpz_class pw = 1;
    for (long k = 0; k < m - 1; ++k) pw *= 2 * nf;
    for (auto& chi : chars) {
        mpz_class phichi = totient(F, chi.conductor);
        mpq_class piece(fact2m * phif, pw * phichi);
        piece.canonicalize();
        if ((1 - m) % 2 != 0) piece = -piece;
        out.value *= piece;
        out.per_character.push_back({character_id(chi), phichi});
    }
    out.value.canonicalize();
    return out;
}

ZetaStarResult covolume_motivic(const QuadField& F, const IntegralIdeal& f, long m,
                                const PrecisionContext& ctx) {
    auto G = ray_class_group(F, f);
    auto chars = characters(G);
    long wp = ctx.work_plus(32);
    mpz_class fact2m = 1;
    for (long k = 2; k <= 2 * m; ++k) fact2m *= k;
    mpz_class phif = totient(F, f);
    mpz_class nf = f.norm();
    mpz_class pw = 1;
    for (long k = 0; k < m - 1; ++k) pw *= 2 * nf;
    Cplx prod = Cplx::of_long(1, 0, wp);
    ZetaStarResult out{Real(wp), 0, (long)chars.size(), {}};
    for (auto& chi : chars) {
        LValueResult r = functional_equation_lprime(chi, m - 1, ctx);
        mpq_class piece(pw * totient(F, chi.conductor), fact2m * phif);
        piece.canonicalize();
        if ((1 - m) % 2 != 0) piece = -piece;
        Real pr(wp);
        mpfr_set_q(pr.v, piece.get_mpq_t(), MPFR_RNDN);
        prod = prod * r.value * pr;
        out.factors.push_back(std::move(r));
    }
    if (prod.im.mag2() > prod.re.mag2() - ctx.target_bits + 16)
        throw std::runtime_error("covolume developed an imaginary part");
    out.value = prod.re;
    out.err2 = std::max(prod.re.mag2(), 0L) - (ctx.target_bits + ctx.guard_bits - 20);
    return out;
}

}  // namespace kf
