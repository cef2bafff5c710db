#include "kf/modular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace kf {

namespace {

long default_err2(const PrecisionContext& ctx, const Cplx& v) {
    long m = std::max(mag2(v), 0L);
    return m - (ctx.target_bits + ctx.guard_bits - 16);
}

Real real_of(double x, long prec) { return Real::of_double(x, prec); }

}  // namespace

ComplexLattice::ComplexLattice(Cplx a, Cplx b) : w1(std::move(a)), w2(std::move(b)) {
    Real s = w1.im * w2.re - w1.re * w2.im;  // Im(w1 * conj(w2))
    if (s.is_zero()) throw std::invalid_argument("degenerate lattice basis");
    if (s.sign() < 0) w1 = -w1;
}

Real ComplexLattice::covolume() const {
    return w1.im * w2.re - w1.re * w2.im;
}

ComplexLattice CMLattice::embed(long prec) const {
    Cplx g1 = F.embed(QuadInt(I.b, I.c), prec);
    Cplx g2 = F.embed(QuadInt(I.a, mpz_class(0)), prec);
    Real d(prec);
    mpfr_set_z(d.v, den.get_mpz_t(), MPFR_RNDN);
    return ComplexLattice(g1 / d, g2 / d);
}

CMLattice CMLattice::scaled_inverse_mul(const IntegralIdeal& a) const {
    CMLattice out;
    out.F = F;
    out.I = F.mul(F.conj_ideal(a), I);
    out.den = den * a.norm();
    return out;
}

CMLattice CMLattice::mul(const IntegralIdeal& a) const {
    CMLattice out;
    out.F = F;
    out.I = F.mul(a, I);
    out.den = den;
    return out;
}

// ------------------------------------------------------------------- eta ---

CErr eta(const Cplx& tau_in, const PrecisionContext& ctx) {
    if (tau_in.im.sign() <= 0) throw std::invalid_argument("eta needs Im(tau) > 0");
    long wp = ctx.work_plus(32);
    Cplx tau(wp);
    tau.re = tau_in.re;
    tau.im = tau_in.im;
    Cplx pref = Cplx::of_long(1, 0, wp);
    long phase24 = 0;  // accumulated e^{i pi k / 12}
    for (int iter = 0;; ++iter) {
        if (iter > 4000) throw std::runtime_error("eta reduction did not converge");
        Real re_r = round_nearest(tau.re);
        long n = re_r.to_long();
        if (n != 0) {
            tau.re = tau.re - Real::of_long(n, wp);
            phase24 = ((phase24 + n) % 24 + 24) % 24;
        }
        Real a2 = abs2(tau);
        if (mpfr_cmp_d(a2.v, 0.999999) < 0) {
            // eta(tau) = eta(-1/tau') with tau' = -1/tau: eta(old) = sqrt(-i tau') eta(tau')
            Cplx taup = -inv(tau);
            pref = pref * sqrtc(Cplx(taup.im, -taup.re));  // -i*taup
            tau = taup;
            continue;
        }
        break;
    }
    Real pi = Real::pi(wp);
    if (phase24) pref = pref * polar_unit(pi * phase24 / 12);

    // pentagonal series sum_k (-1)^k q^{k(3k-1)/2}
    Cplx q = expc(Cplx(-2 * pi * tau.im, 2 * pi * tau.re));  // e^{2 pi i tau}
    double lq = (abs2(q).mag2()) / 2.0;                      // log2|q| (<= -8 in the domain)
    Cplx sum = Cplx::of_long(1, 0, wp);
    long K = 1;
    while (true) {
        long e1 = K * (3 * K - 1) / 2, e2 = K * (3 * K + 1) / 2;
        Cplx term = pow_si(q, e1) + pow_si(q, e2);
        if (K % 2) sum -= term;
        else sum += term;
        if ((double)e1 * lq < -(double)(wp + 8)) break;
        ++K;
        if (K > 10000) throw std::runtime_error("eta series did not converge");
    }
    Cplx val = pref * polar_unit(pi * tau.re / 12) * Cplx(exp(-pi * tau.im / 12), Real::of_long(0, wp)) * sum;
    return {val, default_err2(ctx, val)};
}

CErr eta_basis(const ComplexLattice& L, const PrecisionContext& ctx) {
    long wp = ctx.work_plus(32);
    CErr e = eta(L.tau(), ctx);
    Real pi = Real::pi(wp);
    Cplx val = (e.value * e.value) * Real::of_long(2, wp) * pi / L.w2;
    return {val, default_err2(ctx, val)};
}

CErr delta_lattice(const ComplexLattice& L, const PrecisionContext& ctx) {
    CErr e = eta_basis(L, ctx);
    Cplx val = pow_si(e.value, 12);
    return {val, default_err2(ctx, val)};
}

// ----------------------------------------------------------------- theta ---

namespace {

// direct product at reduced z (|coords| <= 1/2): J(z) q^{1/12} prefactor
Cplx theta_reduced(const Cplx& z, const Cplx& tau, long wp, long tail_target) {
    Real pi = Real::pi(wp);
    Cplx two_pi_i_z(-2 * pi * z.im, 2 * pi * z.re);
    Cplx qz = expc(two_pi_i_z);
    Cplx q = expc(Cplx(-2 * pi * tau.im, 2 * pi * tau.re));
    double lq = abs2(q).mag2() / 2.0;
    double lqz = abs2(qz).mag2() / 2.0;

    Cplx prod = Cplx::of_long(1, 0, wp);
    Cplx qn = q;
    long n = 1;
    while (true) {
        Cplx a = qn * qz, b = qn * inv(qz);
        Cplx f1 = Cplx::of_long(1, 0, wp) - a;
        Cplx f2 = Cplx::of_long(1, 0, wp) - b;
        prod = prod * f1 * f2;
        double worst = (double)n * lq + std::abs(lqz);
        if (worst < -(double)(tail_target + 8) && n > 2) break;
        qn = qn * q;
        ++n;
        if (n > 100000) throw std::runtime_error("theta product did not converge");
    }
    // i e^{P(z)} q^{1/12} q_z^{-1/2} (1 - q_z) * prod
    Real R = z.im / tau.im;  // (z - zbar)/(tau - taubar)
    Cplx Pz = Cplx(-(pi / 2) * z.im * R, (pi / 2) * z.re * R);
    Cplx q12 = expc(Cplx(-pi * tau.im / 6, pi * tau.re / 6));
    Cplx qzm12 = expc(Cplx(pi * z.im, -pi * z.re));  // e^{-pi i z}
    Cplx val = Cplx::of_long(0, 1, wp) * expc(Pz) * q12 * qzm12 *
               (Cplx::of_long(1, 0, wp) - qz) * prod;
    return val;
}

}  // namespace

CErr theta(const Cplx& z_in, const Cplx& tau_in, const PrecisionContext& ctx) {
    if (tau_in.im.sign() <= 0) throw std::invalid_argument("theta needs Im(tau) > 0");
    // headroom for the quasi-periodicity cocycle (exponent grows like n^2 Im tau)
    double zd = std::abs(z_in.re.to_double()) + std::abs(z_in.im.to_double());
    double td = std::abs(tau_in.re.to_double()) + tau_in.im.to_double();
    double n_est = std::abs(z_in.im.to_double() / tau_in.im.to_double()) + 1;
    long extra = 64 + (long)(5.0 * n_est * (n_est * td + zd + 1));
    long wp = ctx.work_plus(std::min(extra, 1L << 16));
    Cplx z(wp), tau(wp);
    z.re = z_in.re; z.im = z_in.im;
    tau.re = tau_in.re; tau.im = tau_in.im;

    // z = z_red + m + n tau with coordinates in [-1/2, 1/2)
    Real bq = z.im / tau.im;
    long n = round_nearest(bq).to_long();
    Cplx zr = z - Cplx(tau.re * n, tau.im * n);
    long m = round_nearest(zr.re).to_long();
    zr.re = zr.re - Real::of_long(m, wp);

    Cplx base = theta_reduced(zr, tau, wp, ctx.work());
    if (m == 0 && n == 0) return {base, default_err2(ctx, base)};

    // theta(zr + m + n tau) = (-1)^{m+n} exp(dP - 2 pi i n zr - pi i n^2 tau) theta(zr)
    // with dP = (pi i/2) [ (m + n tau) R + n zr + n (m + n tau) ], R = Im zr / Im tau
    Real pi = Real::pi(wp);
    Real R = zr.im / tau.im;
    Cplx mntau(tau.re * n + m, tau.im * n);
    Cplx inner = mntau * R + zr * Real::of_long(n, wp) + mntau * Real::of_long(n, wp);
    Cplx dP = Cplx(-(pi / 2) * inner.im, (pi / 2) * inner.re);
    Cplx t2 = Cplx(2 * pi * zr.im * n, -2 * pi * zr.re * n);          // -2 pi i n zr
    Cplx t3 = Cplx(pi * tau.im * n * n, -pi * tau.re * n * n);        // -pi i n^2 tau
    Cplx factor = expc(dP + t2 + t3);
    if ((m + n) % 2 != 0) factor = -factor;
    Cplx val = factor * base;
    return {val, default_err2(ctx, val)};
}

CErr theta_basis(const Cplx& z, const ComplexLattice& L, const PrecisionContext& ctx) {
    return theta(z / L.w2, L.tau(), ctx);
}

// -------------------------------------------------------------------- wp ---

namespace {

// Gauss-reduced basis of the same lattice: |Re(w1/w2)| <= 1/2, |w1/w2| >= 1
ComplexLattice reduce_basis(ComplexLattice L) {
    for (int iter = 0; iter < 4000; ++iter) {
        Real mu = round_nearest((L.w1.re * L.w2.re + L.w1.im * L.w2.im) / abs2(L.w2));
        if (!mu.is_zero()) L.w1 = L.w1 - L.w2 * mu;
        if (abs2(L.w1) < abs2(L.w2)) {
            std::swap(L.w1, L.w2);
            continue;
        }
        return ComplexLattice(L.w1, L.w2);
    }
    throw std::runtime_error("basis reduction did not converge");
}

}  // namespace

Cplx reduce_mod_lattice(const Cplx& z, const ComplexLattice& L, long* mm, long* nn) {
    Real D = L.covolume();
    // z = x w1 + y w2: x = Im(z conj w2)/D, y = -Im(z conj w1)/D
    Real x = (z.im * L.w2.re - z.re * L.w2.im) / D;
    Real y = -(z.im * L.w1.re - z.re * L.w1.im) / D;
    long rx = round_nearest(x).to_long();
    long ry = round_nearest(y).to_long();
    if (mm) *mm = rx;
    if (nn) *nn = ry;
    return z - L.w1 * Real::of_long(rx, z.prec()) - L.w2 * Real::of_long(ry, z.prec());
}

namespace {

struct WpSetup {
    ComplexLattice R;  // reduced basis
    Cplx q;            // e^{2 pi i tau}
    double lq;
    long wp;
    WpSetup(const ComplexLattice& L, long wprec)
        : R(reduce_basis(ComplexLattice(Cplx(L.w1), Cplx(L.w2)))), q(wprec), lq(0), wp(wprec) {
        Real pi = Real::pi(wp);
        Cplx tau = R.tau();
        q = expc(Cplx(-2 * pi * tau.im, 2 * pi * tau.re));
        lq = abs2(q).mag2() / 2.0;
    }
};

// wp and wp' on Z + Z tau at u = e^{2 pi i z}; returns scaled by (2 pi i)^k
void wp_qseries(const Cplx& u, const WpSetup& S, Cplx* p2, Cplx* p3) {
    long wp = S.wp;
    Cplx one = Cplx::of_long(1, 0, wp);
    if (p2) {
        Cplx d = one - u;
        Real twelfth = Real::of_long(1, wp) / 12;
        *p2 = Cplx(twelfth, Real::of_long(0, wp)) + u * inv(d * d);
    }
    if (p3) {
        Cplx d = one - u;
        *p3 = u * (one + u) * inv(d * d * d);
    }
    Cplx qn = S.q;
    long n = 1;
    while (true) {
        Cplx a = qn * u, b = qn * inv(u);
        Cplx da = Cplx::of_long(1, 0, wp) - a, db = Cplx::of_long(1, 0, wp) - b;
        Cplx dq = Cplx::of_long(1, 0, wp) - qn;
        if (p2) *p2 += a * inv(da * da) + b * inv(db * db) - (qn * inv(dq * dq)) * Real::of_long(2, wp);
        if (p3) *p3 += a * (Cplx::of_long(1, 0, wp) + a) * inv(da * da * da) -
                       b * (Cplx::of_long(1, 0, wp) + b) * inv(db * db * db);
        double worst = (double)n * S.lq + std::abs(abs2(u).mag2() / 2.0);
        if (worst < -(double)(wp - 16) && n > 2) break;
        qn = qn * S.q;
        ++n;
        if (n > 100000) throw std::runtime_error("wp series did not converge");
    }
}

void wp_eval(const Cplx& z_in, const ComplexLattice& L, const PrecisionContext& ctx, Cplx* out2,
             Cplx* out3, long* err2) {
    long wp = ctx.work_plus(64);
    WpSetup S(L, wp);
    Cplx z(wp);
    z.re = z_in.re; z.im = z_in.im;
    z = reduce_mod_lattice(z, S.R);
    // refusal near the lattice divisor
    Real dist2 = abs2(z);
    if (dist2.mag2() / 2 < -(ctx.target_bits / 4))
        throw NearDivisor("wp: z within 2^{-P/4} of a lattice point");
    Cplx w2 = S.R.w2;
    Real pi = Real::pi(wp);
    Cplx zz = z / w2;
    Cplx u = expc(Cplx(-2 * pi * zz.im, 2 * pi * zz.re));
    Cplx p2(wp), p3(wp);
    wp_qseries(u, S, out2 ? &p2 : nullptr, out3 ? &p3 : nullptr);
    // wp(z; L) = (2 pi i / w2)^2 [q-series], wp'(z; L) = (2 pi i / w2)^3 [q-series]
    Cplx twopii(Real::of_long(0, wp), 2 * pi);
    if (out2) *out2 = pow_si(twopii / w2, 2) * p2;
    if (out3) *out3 = pow_si(twopii / w2, 3) * p3;
    if (err2) {
        Cplx big = out2 ? *out2 : *out3;
        *err2 = default_err2(ctx, big);
    }
}

}  // namespace

CErr wp(const Cplx& z, const ComplexLattice& L, const PrecisionContext& ctx) {
    Cplx v(ctx.work());
    long e = 0;
    wp_eval(z, L, ctx, &v, nullptr, &e);
    return {v, e};
}

CErr wp_prime(const Cplx& z, const ComplexLattice& L, const PrecisionContext& ctx) {
    Cplx v(ctx.work());
    long e = 0;
    wp_eval(z, L, ctx, nullptr, &v, &e);
    return {v, e};
}

std::pair<CErr, CErr> lattice_invariants(const ComplexLattice& L, const PrecisionContext& ctx) {
    long wp = ctx.work_plus(32);
    WpSetup S(L, wp);
    // E4 = 1 + 240 sum sigma3(n) q^n, E6 = 1 - 504 sum sigma5(n) q^n
    long N = 1;
    while ((double)N * S.lq >= -(double)(wp + 8)) ++N;
    N += 2;
    std::vector<long> s3(N + 1, 0), s5(N + 1, 0);
    for (long d = 1; d <= N; ++d)
        for (long k = d; k <= N; k += d) {
            s3[k] += d * d * d;
            s5[k] += d * d * d * d * d;
        }
    Cplx e4 = Cplx::of_long(1, 0, wp), e6 = Cplx::of_long(1, 0, wp), qn = S.q;
    for (long n = 1; n <= N; ++n) {
        e4 += qn * Real::of_long(240 * s3[n], wp);
        e6 -= qn * Real::of_long(504 * s5[n], wp);
        qn = qn * S.q;
    }
    Real pi = Real::pi(wp);
    Cplx w4 = pow_si(S.R.w2, 4), w6 = pow_si(S.R.w2, 6);
    Cplx g2 = e4 * pow_si(Cplx(pi, Real::of_long(0, wp)), 4) * (Real::of_long(4, wp) / 3) / w4;
    Cplx g3 = e6 * pow_si(Cplx(pi, Real::of_long(0, wp)), 6) * (Real::of_long(8, wp) / 27) / w6;
    return {CErr{g2, default_err2(ctx, g2)}, CErr{g3, default_err2(ctx, g3)}};
}

// ----------------------------------------------------------- lattice pair ---

LatticePair::LatticePair(ComplexLattice l, ComplexLattice lp, std::array<std::array<long, 2>, 2> m)
    : L(std::move(l)), Lp(std::move(lp)), M(m) {
    long det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (det <= 0) throw std::invalid_argument("lattice pair must preserve orientation");
    index = det;
    if (index % 2 == 0 || index % 3 == 0)
        throw std::invalid_argument("lattice pair index must be prime to 6");
    // verify numerically: Lp basis * M == L basis
    long prec = L.w1.prec();
    for (int j = 0; j < 2; ++j) {
        Cplx want = (j == 0) ? L.w1 : L.w2;
        Cplx got = Lp.w1 * Real::of_long(M[0][j], prec) + Lp.w2 * Real::of_long(M[1][j], prec);
        Cplx diff = want - got;
        if (mag2(diff) > mag2(want) - prec / 2)
            throw std::invalid_argument("lattice pair coordinate matrix mismatch");
    }
    // column HNF of M: cosets of L inside Lp
    long a = M[0][0], b = M[0][1], c = M[1][0], d = M[1][1];
    // columns (a, c), (b, d); make top row (g, 0) by column gcd steps
    auto colred = [&]() {
        while (b != 0) {
            long q = a / b;
            a -= q * b; c -= q * d;
            std::swap(a, b); std::swap(c, d);
        }
        if (a < 0) { a = -a; c = -c; }
        long dd = d < 0 ? -d : d;
        long cc = ((c % dd) + dd) % dd;
        c = cc; d = dd;
    };
    colred();
    long h11 = a, h21 = c, h22 = d;
    if (h11 * h22 != index) throw std::logic_error("coset HNF determinant mismatch");
    auto coset_reduce = [&](long y1, long y2) {
        long k = (long)std::floor((double)y1 / h11);
        y1 -= k * h11; y2 -= k * h21;
        // exact correction in case of double rounding
        while (y1 < 0) { y1 += h11; y2 += h21; }
        while (y1 >= h11) { y1 -= h11; y2 -= h21; }
        y2 = ((y2 % h22) + h22) % h22;
        return std::pair<long, long>(y1, y2);
    };
    for (long r1 = 0; r1 < h11; ++r1)
        for (long r2 = 0; r2 < h22; ++r2) cosets.push_back({r1, r2});
    for (auto& r : cosets) {
        if (r.first == 0 && r.second == 0) continue;
        auto nr = coset_reduce(-r.first, -r.second);
        if (r < nr || nr == r) transversal.push_back(r);
        // exactly one of {r, -r} enters unless 2-torsion (excluded: index odd)
    }
    if ((long)transversal.size() != (index - 1) / 2)
        throw std::logic_error("transversal size mismatch");
}

LatticePair LatticePair::from_lattices(const ComplexLattice& l, const ComplexLattice& lp,
                                       const PrecisionContext& ctx) {
    // solve for integer coordinates of l's basis in lp's basis
    Real D = lp.covolume();
    std::array<std::array<long, 2>, 2> m{};
    for (int j = 0; j < 2; ++j) {
        const Cplx& v = (j == 0) ? l.w1 : l.w2;
        Real x = (v.im * lp.w2.re - v.re * lp.w2.im) / D;
        Real y = -(v.im * lp.w1.re - v.re * lp.w1.im) / D;
        long rx = round_nearest(x).to_long(), ry = round_nearest(y).to_long();
        if ((x - Real::of_long(rx, x.prec())).mag2() > -(ctx.target_bits / 2) ||
            (y - Real::of_long(ry, y.prec())).mag2() > -(ctx.target_bits / 2))
            throw std::invalid_argument("L is not a sublattice of L' at this precision");
        m[0][j] = rx;
        m[1][j] = ry;
    }
    return LatticePair(l, lp, m);
}

Cplx LatticePair::coset_point(const std::pair<long, long>& c) const {
    long prec = Lp.w1.prec();
    return Lp.w1 * Real::of_long(c.first, prec) + Lp.w2 * Real::of_long(c.second, prec);
}

namespace {

// prod over the transversal of (wp(z) - wp(u))^{-1}
struct ProdEvaluator {
    LatticePair& pair;
    const PrecisionContext& ctx;

    ProdEvaluator(LatticePair& p, const PrecisionContext& c) : pair(p), ctx(c) {
        if (pair.cache_bits != ctx.target_bits) {
            pair.wp_T_cache.clear();
            for (auto& t : pair.transversal)
                pair.wp_T_cache.push_back(wp(pair.coset_point(t), pair.L, ctx).value);
            pair.cache_bits = ctx.target_bits;
        }
    }
    Cplx eval(const Cplx& z) const {
        Cplx p = Cplx::of_long(1, 0, z.prec());
        Cplx wz = wp(z, pair.L, ctx).value;
        for (auto& wu : pair.wp_T_cache) {
            Cplx diff = wz - wu;
            if (mag2(diff) < -(ctx.target_bits / 2))
                throw NearDivisor("vartheta: z within refusal distance of its divisor");
            p = p * inv(diff);
        }
        return p;
    }
};

}  // namespace

void LatticePair::pin_root(const PrecisionContext& ctx) {
    if (delta_pair) return;
    long wp_ = ctx.work_plus(32);
    ProdEvaluator P(*this, ctx);
    Cplx z0 = L.w1 * Real::of_str("0.31271", wp_) + L.w2 * Real::of_str("0.27193", wp_);

    // norm-relation defect: delta^{m^2-1} = P(m z0) / prod_t P(z0 + t)
    auto u_of = [&](long m) {
        Cplx denom = Cplx::of_long(1, 0, wp_);
        for (long i = 0; i < m; ++i)
            for (long j = 0; j < m; ++j) {
                Cplx t = (L.w1 * Real::of_long(i, wp_) + L.w2 * Real::of_long(j, wp_)) / Real::of_long(m, wp_);
                denom = denom * P.eval(z0 + t);
            }
        return P.eval(z0 * Real::of_long(m, wp_)) / denom;
    };
    Cplx u2 = u_of(2), u3 = u_of(3);
    Cplx delta = pow_si(u2, 3) / u3;  // delta^(9-8)
    // consistency: u2^8 == u3^3
    Cplx cons = pow_si(u2, 8) / pow_si(u3, 3) - Cplx::of_long(1, 0, wp_);
    if (mag2(cons) > -(ctx.target_bits / 2))
        throw std::runtime_error("vartheta root pinning inconsistent between m=2 and m=3");
    // delta^12 must equal Delta(L)^n / Delta(L')
    Cplx d12 = pow_si(delta, 12);
    Cplx want = pow_si(delta_lattice(L, ctx).value, index) / delta_lattice(Lp, ctx).value;
    Cplx rel = d12 / want - Cplx::of_long(1, 0, wp_);
    if (mag2(rel) > -(ctx.target_bits / 2))
        throw std::runtime_error("delta(L,L')^12 does not match Delta(L)^n/Delta(L')");

    // C(omega, omega') = delta * eta(omega') / eta(omega)^n, a 12th root of unity
    Cplx etaL = eta_basis(L, ctx).value, etaLp = eta_basis(Lp, ctx).value;
    Cplx C = delta * etaLp / pow_si(etaL, index);
    Cplx c12 = pow_si(C, 12) - Cplx::of_long(1, 0, wp_);
    if (mag2(c12) > -(ctx.target_bits / 2))
        throw std::runtime_error("C(omega,omega') is not a 12th root of unity");

    // uniqueness scan: among the 12 candidate roots, only one may satisfy the
    // distribution relation at 5 random z for both m = 2 and m = 3
    Rng rng(0x5eed0000 + (uint64_t)index);
    Real pi = Real::pi(wp_);
    int pass_count[12] = {0};
    int trials = 5;
    for (int t = 0; t < trials; ++t) {
        Cplx z = L.w1 * real_of(0.07 + 0.8 * rng.unit(), wp_) +
                 L.w2 * real_of(0.07 + 0.8 * rng.unit(), wp_);
        for (long m : {2L, 3L}) {
            Cplx denom = Cplx::of_long(1, 0, wp_);
            for (long i = 0; i < m; ++i)
                for (long j = 0; j < m; ++j) {
                    Cplx tt = (L.w1 * Real::of_long(i, wp_) + L.w2 * Real::of_long(j, wp_)) /
                              Real::of_long(m, wp_);
                    denom = denom * P.eval(z + tt);
                }
            // candidate k: defect = zeta_12^{k (m^2-1)} * D0
            Cplx D0 = pow_si(delta, m * m - 1) * denom / P.eval(z * Real::of_long(m, wp_));
            for (int k = 0; k < 12; ++k) {
                Cplx zeta = polar_unit(pi * (2 * k * (m * m - 1)) / 12);
                Cplx defect = zeta * D0 - Cplx::of_long(1, 0, wp_);
                if (mag2(defect) < -(ctx.target_bits / 2)) pass_count[k] += 1;
            }
        }
    }
    int winners = 0;
    for (int k = 0; k < 12; ++k)
        if (pass_count[k] == 2 * trials) ++winners;
    if (winners != 1 || pass_count[0] != 2 * trials)
        throw std::runtime_error("ambiguous 12th-root determination for vartheta");

    delta_pair = delta;
    root_choice = C;
}

CErr robert_theta(const Cplx& z, LatticePair& pair, const PrecisionContext& ctx) {
    pair.pin_root(ctx);
    ProdEvaluator P(pair, ctx);
    Cplx val = *pair.delta_pair * P.eval(z);
    return {val, default_err2(ctx, val)};
}

LatticePair pair_of_cm(const CMLattice& L, const IntegralIdeal& a, long prec) {
    CMLattice Lp = L.scaled_inverse_mul(a);
    mpz_class Na = a.norm();
    // coords of N(a) * v in the HNF basis of Lp.I, for v the basis of L.I
    auto coords = [&](const QuadInt& v) {
        mpz_class vy = v.y * Na, vx = v.x * Na;
        if (vy % Lp.I.c != 0) throw std::logic_error("cm pair: inexact y coordinate");
        mpz_class al = vy / Lp.I.c;
        mpz_class rest = vx - al * Lp.I.b;
        if (rest % Lp.I.a != 0) throw std::logic_error("cm pair: inexact x coordinate");
        mpz_class be = rest / Lp.I.a;
        return std::pair<long, long>(al.get_si(), be.get_si());
    };
    auto c1 = coords(QuadInt(L.I.b, L.I.c));  // L.w1
    auto c2 = coords(QuadInt(L.I.a, mpz_class(0)));  // L.w2
    std::array<std::array<long, 2>, 2> m{{{c1.first, c2.first}, {c1.second, c2.second}}};
    return LatticePair(L.embed(prec), Lp.embed(prec), m);
}

CErr kato_theta(const Cplx& z, const CMLattice& L, const IntegralIdeal& a,
                const PrecisionContext& ctx) {
    mpz_class n = a.norm();
    if (n % 2 == 0 || n % 3 == 0) throw std::invalid_argument("Theta_a needs a prime to 6");
    LatticePair pair = pair_of_cm(L, a, ctx.work_plus(32));
    return robert_theta(z, pair, ctx);
}

long winding_number(const std::function<Cplx(const Cplx&)>& f, const Cplx& z0, const Real& r,
                    long samples, long prec) {
    Real pi = Real::pi(prec);
    Real total(prec);
    Cplx prev(prec);
    Cplx first(prec);
    for (long k = 0; k <= samples; ++k) {
        Real ang = pi * (2 * (k % samples)) / samples;
        Cplx z = z0 + Cplx(r * cos(ang), r * sin(ang));
        Cplx v = f(z);
        if (k == 0) { first = v; prev = v; continue; }
        Cplx ratio = v / prev;
        total += atan2r(ratio.im, ratio.re);
        prev = v;
    }
    Real turns = total / (2 * pi);
    return round_nearest(turns).to_long();
}

}  // namespace kf
