#include "kf/real.hpp"

#include <cstdlib>
#include <cstring>
#include <vector>

namespace kf {

std::string Real::to_decimal() const {
    return decimal_of(*this, prec());
}

std::string decimal_of(const Real& x, long target_bits) {
    if (mpfr_zero_p(x.v)) return "0";
    if (!mpfr_number_p(x.v)) return "nan";
    // digits for exact round-trip at target_bits
    size_t digits = static_cast<size_t>(target_bits * 0.30103) + 3;
    mpfr_exp_t e = 0;
    char* s = mpfr_get_str(nullptr, &e, 10, digits, x.v, MPFR_RNDN);
    std::string body(s);
    mpfr_free_str(s);
    std::string sign;
    if (!body.empty() && body[0] == '-') { sign = "-"; body = body.substr(1); }
    // strip trailing zeros but keep at least one digit
    size_t last = body.find_last_not_of('0');
    body = body.substr(0, std::max<size_t>(last + 1, 1));
    // mpfr returns mantissa 0.ddd * 10^e; emit d.dd...E(e-1)
    std::string out = sign + body.substr(0, 1);
    if (body.size() > 1) out += "." + body.substr(1);
    out += "E" + std::to_string(static_cast<long>(e) - 1);
    return out;
}

Cplx sqrtc(const Cplx& a) {
    long p = a.prec();
    if (a.im.is_zero()) {
        if (a.re.sign() >= 0) return Cplx(sqrt(a.re), Real::of_long(0, p));
        return Cplx(Real::of_long(0, p), sqrt(-a.re));
    }
    // principal branch: sqrt(r) * e^{i theta/2}
    Real r = absc(a);
    Real u = sqrt((r + a.re) / 2);
    Real w = sqrt((r - a.re) / 2);
    if (a.im.sign() < 0) w = -w;
    return Cplx(u, w);
}

Cplx pow_si(const Cplx& a, long e) {
    long p = a.prec();
    if (e == 0) return Cplx::of_long(1, 0, p);
    bool neg = e < 0;
    unsigned long k = neg ? -(unsigned long)e : (unsigned long)e;
    Cplx base = a, acc = Cplx::of_long(1, 0, p);
    while (k) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return neg ? inv(acc) : acc;
}

Cplx polar_unit(const Real& angle) {
    return Cplx(cos(angle), sin(angle));
}

}  // namespace kf
