// Arbitrary-precision real and complex arithmetic for kronecker-forge.
//
// Real is an RAII wrapper around mpfr_t; every value carries its own
// precision and binary operations round to the wider of the two operands.
// Cplx is a plain rectangular complex built on Real.  PrecisionContext
// holds the user-facing target precision plus guard bits; all internal
// computation runs at ctx.work() bits and published values carry an
// a-posteriori absolute error bound as a power-of-two exponent.

#pragma once

#include <mpfr.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace kf {

struct PrecisionContext {
    long target_bits = 128;
    long guard_bits = 32;

    explicit PrecisionContext(long bits = 128, long guard = 32)
        : target_bits(bits), guard_bits(guard) {
        if (bits < 8) throw std::invalid_argument("target_bits too small");
    }
    long work() const { return target_bits + guard_bits; }
    // Working precision with extra headroom for cancellation-heavy series.
    long work_plus(long extra) const { return work() + extra; }
    PrecisionContext bumped() const { return PrecisionContext(2 * target_bits, guard_bits); }
};

class Real {
  public:
    mpfr_t v;

    explicit Real(long prec = 64) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
    Real(const Real& o) { mpfr_init2(v, mpfr_get_prec(o.v)); mpfr_set(v, o.v, MPFR_RNDN); }
    Real(Real&& o) noexcept {
        mpfr_init2(v, 8);
        mpfr_swap(v, o.v);
    }
    Real& operator=(const Real& o) {
        if (this != &o) { mpfr_set_prec(v, mpfr_get_prec(o.v)); mpfr_set(v, o.v, MPFR_RNDN); }
        return *this;
    }
    Real& operator=(Real&& o) noexcept { mpfr_swap(v, o.v); return *this; }
    ~Real() { mpfr_clear(v); }

    static Real of_long(long x, long prec) { Real r(prec); mpfr_set_si(r.v, x, MPFR_RNDN); return r; }
    static Real of_double(double x, long prec) { Real r(prec); mpfr_set_d(r.v, x, MPFR_RNDN); return r; }
    static Real of_str(const std::string& s, long prec) {
        Real r(prec);
        if (mpfr_set_str(r.v, s.c_str(), 10, MPFR_RNDN) != 0)
            throw std::invalid_argument("bad decimal literal: " + s);
        return r;
    }
    static Real pi(long prec) { Real r(prec); mpfr_const_pi(r.v, MPFR_RNDN); return r; }
    static Real euler(long prec) { Real r(prec); mpfr_const_euler(r.v, MPFR_RNDN); return r; }

    long prec() const { return mpfr_get_prec(v); }
    bool is_zero() const { return mpfr_zero_p(v); }
    int sign() const { return mpfr_sgn(v); }
    double to_double() const { return mpfr_get_d(v, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v, MPFR_RNDN); }

    // log2 of |x|, rounded up; very negative for 0.
    long mag2() const {
        if (mpfr_zero_p(v)) return -(1L << 30);
        return static_cast<long>(mpfr_get_exp(v));
    }

    friend Real operator+(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec())); mpfr_add(r.v, a.v, b.v, MPFR_RNDN); return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec())); mpfr_sub(r.v, a.v, b.v, MPFR_RNDN); return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec())); mpfr_mul(r.v, a.v, b.v, MPFR_RNDN); return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec())); mpfr_div(r.v, a.v, b.v, MPFR_RNDN); return r;
    }
    Real operator-() const { Real r(prec()); mpfr_neg(r.v, v, MPFR_RNDN); return r; }

    Real& operator+=(const Real& o) { mpfr_add(v, v, o.v, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(v, v, o.v, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(v, v, o.v, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { mpfr_div(v, v, o.v, MPFR_RNDN); return *this; }

    friend Real operator*(const Real& a, long b) { Real r(a.prec()); mpfr_mul_si(r.v, a.v, b, MPFR_RNDN); return r; }
    friend Real operator*(long b, const Real& a) { return a * b; }
    friend Real operator/(const Real& a, long b) { Real r(a.prec()); mpfr_div_si(r.v, a.v, b, MPFR_RNDN); return r; }
    friend Real operator+(const Real& a, long b) { Real r(a.prec()); mpfr_add_si(r.v, a.v, b, MPFR_RNDN); return r; }
    friend Real operator-(const Real& a, long b) { Real r(a.prec()); mpfr_sub_si(r.v, a.v, b, MPFR_RNDN); return r; }
    friend Real operator-(long b, const Real& a) { Real r(a.prec()); mpfr_si_sub(r.v, b, a.v, MPFR_RNDN); return r; }
    friend Real operator/(long b, const Real& a) { Real r(a.prec()); mpfr_si_div(r.v, b, a.v, MPFR_RNDN); return r; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v, b.v) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v, b.v) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v, b.v) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v, b.v) >= 0; }

    Real mul_2si(long e) const { Real r(prec()); mpfr_mul_2si(r.v, v, e, MPFR_RNDN); return r; }

    friend Real sqrt(const Real& a) { Real r(a.prec()); mpfr_sqrt(r.v, a.v, MPFR_RNDN); return r; }
    friend Real exp(const Real& a) { Real r(a.prec()); mpfr_exp(r.v, a.v, MPFR_RNDN); return r; }
    friend Real log(const Real& a) { Real r(a.prec()); mpfr_log(r.v, a.v, MPFR_RNDN); return r; }
    friend Real sin(const Real& a) { Real r(a.prec()); mpfr_sin(r.v, a.v, MPFR_RNDN); return r; }
    friend Real cos(const Real& a) { Real r(a.prec()); mpfr_cos(r.v, a.v, MPFR_RNDN); return r; }
    friend Real atan2r(const Real& y, const Real& x) {
        Real r(std::max(y.prec(), x.prec())); mpfr_atan2(r.v, y.v, x.v, MPFR_RNDN); return r;
    }
    friend Real abs(const Real& a) { Real r(a.prec()); mpfr_abs(r.v, a.v, MPFR_RNDN); return r; }
    friend Real floor(const Real& a) { Real r(a.prec()); mpfr_rint_floor(r.v, a.v, MPFR_RNDN); return r; }
    friend Real round_nearest(const Real& a) { Real r(a.prec()); mpfr_round(r.v, a.v); return r; }
    friend Real pow_si(const Real& a, long e) { Real r(a.prec()); mpfr_pow_si(r.v, a.v, e, MPFR_RNDN); return r; }
    // upper incomplete gamma Gamma(a, x)
    friend Real gamma_upper(const Real& a, const Real& x) {
        Real r(std::max(a.prec(), x.prec())); mpfr_gamma_inc(r.v, a.v, x.v, MPFR_RNDN); return r;
    }
    friend Real gamma_fn(const Real& a) { Real r(a.prec()); mpfr_gamma(r.v, a.v, MPFR_RNDN); return r; }

    // Decimal string with explicit exponent; round-trips exactly at this
    // precision when reparsed with at least the same precision.
    std::string to_decimal() const;
};

std::string decimal_of(const Real& x, long target_bits);

// Complex value in rectangular form.  All operations round at the operand
// precision; nothing here tracks error - analytic routines attach bounds.
class Cplx {
  public:
    Real re, im;

    explicit Cplx(long prec = 64) : re(prec), im(prec) {}
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    static Cplx of_long(long r, long i, long prec) {
        return Cplx(Real::of_long(r, prec), Real::of_long(i, prec));
    }
    long prec() const { return std::max(re.prec(), im.prec()); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    friend Cplx operator+(const Cplx& a, const Cplx& b) { return Cplx(a.re + b.re, a.im + b.im); }
    friend Cplx operator-(const Cplx& a, const Cplx& b) { return Cplx(a.re - b.re, a.im - b.im); }
    Cplx operator-() const { return Cplx(-re, -im); }
    friend Cplx operator*(const Cplx& a, const Cplx& b) {
        return Cplx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend Cplx operator*(const Cplx& a, const Real& b) { return Cplx(a.re * b, a.im * b); }
    friend Cplx operator*(const Real& b, const Cplx& a) { return a * b; }
    friend Cplx operator/(const Cplx& a, const Real& b) { return Cplx(a.re / b, a.im / b); }
    friend Cplx operator/(const Cplx& a, const Cplx& b) {
        Real n = b.re * b.re + b.im * b.im;
        return Cplx((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o) { *this = *this * o; return *this; }

    friend Cplx conj(const Cplx& a) { return Cplx(a.re, -a.im); }
    friend Real abs2(const Cplx& a) { return a.re * a.re + a.im * a.im; }
    friend Real absc(const Cplx& a) { return sqrt(abs2(a)); }
    friend Cplx inv(const Cplx& a) {
        Real n = abs2(a);
        return Cplx(a.re / n, -a.im / n);
    }
    friend Cplx expc(const Cplx& a) {
        Real m = exp(a.re);
        return Cplx(m * cos(a.im), m * sin(a.im));
    }
    friend Cplx sqrtc(const Cplx& a);
    friend Cplx pow_si(const Cplx& a, long e);

    // distance from a to b in log2 terms, for residual checks
    friend long mag2(const Cplx& a) { return std::max(a.re.mag2(), a.im.mag2()); }
};

Cplx polar_unit(const Real& angle);  // e^{i*angle}

// Deterministic splitmix64 stream; the only randomness source in the
// project so reports reproduce bit-identically for a fixed master seed.
class Rng {
    uint64_t s_;
  public:
    explicit Rng(uint64_t seed) : s_(seed) {}
    uint64_t next() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    uint64_t below(uint64_t n) { return next() % n; }
    // uniform in [0,1) with 53 bits
    double unit() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }
    Rng fork(uint64_t salt) { return Rng(next() ^ (salt * 0x9e3779b97f4a7c15ULL)); }
};

}  // namespace kf
