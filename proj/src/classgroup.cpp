#include "kf/classgroup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace kf {

// ---------------------------------------------------------------- forms ---

std::vector<QForm> reduced_forms(long disc) {
    if (disc >= 0) throw std::invalid_argument("discriminant must be negative");
    if (-disc > 1000000) throw std::invalid_argument("|disc| beyond supported bound 10^6");
    std::vector<QForm> out;
    long amax = (long)std::sqrt((double)(-disc) / 3.0) + 1;
    for (long a = 1; a <= amax; ++a) {
        for (long b = -a + 1; b <= a; ++b) {
            if (((b * b - disc) % (4 * a)) != 0) continue;
            long c = (b * b - disc) / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            long g = std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
            if (g != 1) continue;
            out.push_back({a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

long class_number(const QuadField& F) { return (long)reduced_forms(F.disc).size(); }

namespace {

QForm reduce_form(QForm f) {
    while (true) {
        // normalize: -a < b <= a
        mpz_class r = f.b % (2 * f.a);
        if (r > f.a) r -= 2 * f.a;
        if (r <= -f.a) r += 2 * f.a;
        f.c -= (f.b - r) / (2 * f.a) * ((f.b + r) / 2);
        f.b = r;
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        break;
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    if (f.b == -f.a) f.b = f.a;
    return f;
}

// form of an ideal in HNF (a, b + c*omega): the norm form on its basis
QForm form_of_ideal(const QuadField& F, const IntegralIdeal& I) {
    // strip content so the ideal is primitive
    mpz_class a = I.a / I.c, b = I.b / I.c;
    long tr = F.omega_tr();
    mpz_class nm = F.omega_nm();
    QForm f;
    f.a = a;
    // conjugate-oriented basis so that ideal_of_form below is a two-sided
    // inverse on classes
    f.b = -(2 * b + tr);
    f.c = (b * b + b * tr + nm) / a;
    return reduce_form(f);
}

IntegralIdeal ideal_of_form(const QuadField& F, const QForm& f) {
    // ideal Z a + Z (-b + sqrt(disc))/2 written over (1, omega)
    mpz_class bcoord;
    if (F.omega_half) bcoord = (-f.b - 1) / 2;   // sqrt(disc) = 2 omega - 1
    else bcoord = -f.b / 2;                      // sqrt(disc) = 2 omega
    mpz_class bm = bcoord % f.a;
    if (bm < 0) bm += f.a;
    return IntegralIdeal(f.a, bm, 1);
}

// ------------------------------------------ generic finite abelian groups ---

// Structure of a small abelian group given by explicit elements and a
// multiplication callback.  Elements are opaque longs (indices).
struct FAGroup {
    std::vector<long> inv_factors;              // descending chain n1 >= n2, n_{i+1} | n_i
    std::vector<long> gens;                     // element indices
    std::vector<std::vector<long>> dlog;        // per element: exponent vector
};

long pow_elt(long x, long e, long id, const std::function<long(long, long)>& mul);

// order via divisors of the group order (Lagrange)
long elt_order_in(long x, long n, long id, const std::function<long(long, long)>& mul) {
    long o = n;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (o % p == 0 && pow_elt(x, o / p, id, mul) == id) o /= p;
    }
    long nn = n;
    for (long p = 2; p * p <= nn; ++p)
        while (nn % p == 0) nn /= p;
    if (nn > 1)
        while (o % nn == 0 && pow_elt(x, o / nn, id, mul) == id) o /= nn;
    return o;
}

// factor n into prime powers
std::vector<std::pair<long, long>> factor_long(long n) {
    std::vector<std::pair<long, long>> out;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        long e = 0;
        while (n % p == 0) { n /= p; ++e; }
        out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

long pow_elt(long x, long e, long id, const std::function<long(long, long)>& mul) {
    long r = id, base = x;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

FAGroup abelian_structure(long n_elts, long id, const std::function<long(long, long)>& mul) {
    FAGroup G;
    if (n_elts == 1) {
        G.dlog.assign(1, {});
        return G;
    }
    std::vector<long> ord(n_elts);
    for (long x = 0; x < n_elts; ++x) ord[x] = elt_order_in(x, n_elts, id, mul);

    auto primes = factor_long(n_elts);
    // per prime: partition lambda and a generating tuple of the Sylow subgroup
    struct Sylow {
        long p;
        std::vector<long> lambda;   // descending exponents
        std::vector<long> gens;     // basis elements of orders p^lambda_i
    };
    std::vector<Sylow> sylows;
    for (auto [p, e] : primes) {
        Sylow S;
        S.p = p;
        // counts: #(x : x^{p^k} = 1) = p^{sum min(k, lambda_i)}
        std::vector<long> cnt(e + 2, 0);
        for (long x = 0; x < n_elts; ++x) {
            long o = ord[x];
            // p-part of the order of x
            long po = 1;
            while (o % p == 0) { o /= p; po *= p; }
            long k = 0;
            long t = po;
            while (t > 1) { t /= p; ++k; }
            if (k <= e) ++cnt[k];  // x's p-part has exact order p^k
        }
        // cumulative: a_k = #(p-part order dividing p^k) over the Sylow subgroup
        // elements of the Sylow subgroup are x^{m} with m = n/p^e ... simpler:
        // the p-part of any x is x^{coprime part}, and counts above already give
        // the exact-order census of p-parts, each Sylow element arising n/|Syl| times.
        long syl = 1;
        for (long i = 0; i < e; ++i) syl *= p;
        long mult = n_elts / syl;
        std::vector<long> atmost(e + 1, 0);
        for (long k = 0; k <= e; ++k) {
            atmost[k] = 0;
            for (long j = 0; j <= k; ++j) atmost[k] += cnt[j];
            if (atmost[k] % mult) throw std::logic_error("sylow census inconsistent");
            atmost[k] /= mult;
        }
        // recover partition: log_p atmost[k] = sum min(k, lambda_i)
        std::vector<long> s(e + 1);
        for (long k = 0; k <= e; ++k) {
            long a = atmost[k], lg = 0;
            while (a > 1) { a /= p; ++lg; }
            s[k] = lg;
        }
        for (long k = 1; k <= e; ++k) {
            long parts_ge_k = s[k] - s[k - 1];  // #(lambda_i >= k)
            for (long i = 0; i < parts_ge_k; ++i) {
                if ((long)S.lambda.size() < i + 1) S.lambda.push_back(0);
                S.lambda[i] = k;
            }
        }
        std::sort(S.lambda.rbegin(), S.lambda.rend());

        // pick a basis greedily: S.gens[i] of exact p-power order p^{lambda_i},
        // with cyclic subgroup meeting the span of earlier ones trivially
        long coprime = n_elts / syl;  // map x -> x^{coprime} lands in the Sylow subgroup
        std::set<long> span = {id};
        for (size_t i = 0; i < S.lambda.size(); ++i) {
            long want = 1;
            for (long t = 0; t < S.lambda[i]; ++t) want *= p;
            bool found = false;
            for (long x = 0; x < n_elts && !found; ++x) {
                long y = pow_elt(x, coprime, id, mul);
                if (elt_order_in(y, n_elts, id, mul) != want) continue;
                // trivial intersection of <y> with current span
                bool okk = true;
                long cur = y;
                for (long t = 1; t < want; ++t) {
                    if (span.count(cur)) { okk = false; break; }
                    cur = mul(cur, y);
                }
                if (!okk) continue;
                // extend span
                std::set<long> wide;
                cur = id;
                for (long t = 0; t < want; ++t) {
                    for (long s0 : span) wide.insert(mul(s0, cur));
                    cur = mul(cur, y);
                }
                if ((long)wide.size() != (long)span.size() * want)
                    throw std::logic_error("sylow basis extension not direct");
                span = std::move(wide);
                S.gens.push_back(y);
                found = true;
            }
            if (!found) throw std::logic_error("sylow basis search failed");
        }
        sylows.push_back(std::move(S));
    }

    // combine sylow bases into invariant factors (descending chain)
    size_t rk = 0;
    for (auto& S : sylows) rk = std::max(rk, S.lambda.size());
    std::vector<long> factors(rk, 1);
    std::vector<long> gens(rk, id);
    for (auto& S : sylows) {
        for (size_t i = 0; i < S.lambda.size(); ++i) {
            long pk = 1;
            for (long t = 0; t < S.lambda[i]; ++t) pk *= S.p;
            factors[i] *= pk;
            gens[i] = mul(gens[i], S.gens[i]);
        }
    }
    G.inv_factors = factors;
    G.gens = gens;

    // dlog by full product enumeration
    G.dlog.assign(n_elts, {});
    std::vector<bool> seen(n_elts, false);
    std::vector<long> idx(rk, 0);
    long total = 1;
    for (long f : factors) total *= f;
    if (total != n_elts) throw std::logic_error("abelian structure order mismatch");
    long count = 0;
    std::function<void(size_t, long)> rec = [&](size_t i, long acc) {
        if (i == rk) {
            if (seen[acc]) throw std::logic_error("abelian dlog collision");
            seen[acc] = true;
            G.dlog[acc] = idx;
            ++count;
            return;
        }
        long cur = acc;
        for (long t = 0; t < factors[i]; ++t) {
            idx[i] = t;
            rec(i + 1, cur);
            cur = mul(cur, gens[i]);
        }
    };
    rec(0, id);
    if (count != n_elts) throw std::logic_error("abelian dlog enumeration incomplete");
    return G;
}

// ------------------------------------------------------- Smith normal form ---

// SNF of an integer matrix (rows = relations).  Returns diagonal and the
// column transform V with inverse, so new coords = old * V.
struct SnfResult {
    std::vector<long> diag;
    std::vector<std::vector<mpz_class>> V, Vinv;
};

SnfResult snf(std::vector<std::vector<mpz_class>> M, size_t cols) {
    size_t rows = M.size();
    SnfResult R;
    R.V.assign(cols, std::vector<mpz_class>(cols, 0));
    R.Vinv.assign(cols, std::vector<mpz_class>(cols, 0));
    for (size_t i = 0; i < cols; ++i) R.V[i][i] = R.Vinv[i][i] = 1;

    auto col_addmul = [&](size_t j, size_t i, const mpz_class& t) {
        for (size_t r = 0; r < rows; ++r) M[r][j] += t * M[r][i];
        for (size_t r = 0; r < cols; ++r) R.V[r][j] += t * R.V[r][i];
        for (size_t cc = 0; cc < cols; ++cc) R.Vinv[i][cc] -= t * R.Vinv[j][cc];
    };
    auto col_swap = [&](size_t i, size_t j) {
        for (size_t r = 0; r < rows; ++r) std::swap(M[r][i], M[r][j]);
        for (size_t r = 0; r < cols; ++r) std::swap(R.V[r][i], R.V[r][j]);
        std::swap(R.Vinv[i], R.Vinv[j]);
    };
    auto col_neg = [&](size_t j) {
        for (size_t r = 0; r < rows; ++r) M[r][j] = -M[r][j];
        for (size_t r = 0; r < cols; ++r) R.V[r][j] = -R.V[r][j];
        for (size_t cc = 0; cc < cols; ++cc) R.Vinv[j][cc] = -R.Vinv[j][cc];
    };
    auto row_addmul = [&](size_t j, size_t i, const mpz_class& t) {
        for (size_t cc = 0; cc < cols; ++cc) M[j][cc] += t * M[i][cc];
    };

    size_t k = 0;
    size_t dim = std::min(rows, cols);
    while (k < dim) {
        // find pivot: nonzero entry of minimal abs value in submatrix
        bool any = false;
        size_t pi = k, pj = k;
        mpz_class best = 0;
        for (size_t i = k; i < rows; ++i)
            for (size_t j = k; j < cols; ++j)
                if (M[i][j] != 0 && (!any || abs(M[i][j]) < best)) {
                    any = true;
                    best = abs(M[i][j]);
                    pi = i; pj = j;
                }
        if (!any) break;
        std::swap(M[pi], M[k]);
        if (pj != k) col_swap(pj, k);
        if (M[k][k] < 0) col_neg(k);
        bool dirty = false;
        for (size_t i = k + 1; i < rows; ++i) {
            if (M[i][k] == 0) continue;
            mpz_class q = M[i][k] / M[k][k];
            row_addmul(i, k, -q);
            if (M[i][k] != 0) dirty = true;
        }
        for (size_t j = k + 1; j < cols; ++j) {
            if (M[k][j] == 0) continue;
            mpz_class q = M[k][j] / M[k][k];
            col_addmul(j, k, -q);
            if (M[k][j] != 0) dirty = true;
        }
        if (dirty) continue;  // remainders left; pick a smaller pivot again
        ++k;
    }
    // enforce divisibility chain d_i | d_{i+1}
    for (size_t i = 0; i + 1 < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
            if (M[j][j] % M[i][i] == 0) continue;
            // standard trick: fold column j into i and re-eliminate 2x2 block
            col_addmul(i, j, 1);
            // now M[i][i], M[j][i] nonzero: clear by gcd steps
            while (true) {
                if (M[j][i] == 0) break;
                mpz_class q = M[i][i] / M[j][i];
                row_addmul(i, j, -q);
                std::swap(M[i], M[j]);
            }
            if (M[i][i] < 0) col_neg(i);
            // M[i][j] may be nonzero now; clear it
            if (M[i][j] != 0) {
                mpz_class q = M[i][j] / M[i][i];
                col_addmul(j, i, -q);
                if (M[i][j] != 0) throw std::logic_error("snf chain fixup failed");
            }
            if (M[j][j] < 0) col_neg(j);
            if (M[j][j] % M[i][i] != 0) { j--; continue; }
        }
    }
    R.diag.assign(cols, 0);
    for (size_t i = 0; i < k; ++i) R.diag[i] = mpz_class(M[i][i]).get_si();
    return R;
}

}  // namespace

// ------------------------------------------------------------ class group ---

AbelianGroupStructure class_group(const QuadField& F) {
    auto forms = reduced_forms(F.disc);
    long h = (long)forms.size();
    AbelianGroupStructure S;
    if (h == 1) return S;
    std::map<QForm, long> index;
    for (long i = 0; i < h; ++i) index[forms[i]] = i;
    auto mul = [&](long i, long j) -> long {
        IntegralIdeal I = F.mul(ideal_of_form(F, forms[i]), ideal_of_form(F, forms[j]));
        return index.at(form_of_ideal(F, I));
    };
    // principal form: x^2 + tr xy + nm y^2
    QForm one = reduce_form({mpz_class(1), mpz_class(F.omega_tr()), F.omega_nm()});
    FAGroup G = abelian_structure(h, index.at(one), mul);
    // ascending divisibility order for the published structure
    std::vector<long> inv(G.inv_factors.rbegin(), G.inv_factors.rend());
    std::vector<long> gens(G.gens.rbegin(), G.gens.rend());
    S.invariant_factors = inv;
    for (long g : gens) S.generators.push_back(ideal_of_form(F, forms[g]));
    return S;
}

// -------------------------------------------------------- ray class groups ---

namespace {

std::pair<long, long> key_of(const QuadInt& r) {
    return {(long)r.x.get_si(), (long)r.y.get_si()};
}

}  // namespace

RayClassGroup ray_class_group(const QuadField& F, const IntegralIdeal& f) {
    if (f.norm() == 0) throw std::invalid_argument("zero modulus");
    if (!f.norm().fits_slong_p() || f.norm().get_si() > 200000)
        throw std::invalid_argument("modulus norm beyond supported bound");
    RayClassGroup G;
    G.field = F;
    G.modulus = f;

    // residue group (O/f)^x
    auto res = F.invertible_residues(f);
    std::map<std::pair<long, long>, long> idx;
    for (size_t i = 0; i < res.size(); ++i) idx[key_of(res[i])] = (long)i;
    auto mulr = [&](long i, long j) -> long {
        return idx.at(key_of(F.reduce_mod(F.mul(res[i], res[j]), f)));
    };
    long id = idx.at(key_of(F.reduce_mod(QuadInt(1, 0), f)));
    FAGroup R = abelian_structure((long)res.size(), id, mulr);

    size_t nr = R.inv_factors.size();
    for (size_t i = 0; i < nr; ++i) {
        G.residue_orders.push_back(R.inv_factors[i]);
        G.residue_gens.push_back(res[R.gens[i]]);
    }
    for (size_t i = 0; i < res.size(); ++i) {
        std::vector<long> v = R.dlog[i];
        G.residue_dlog[key_of(res[i])] = v;
    }

    // units of K and their residue dlogs; also w_m
    std::vector<std::vector<mpz_class>> rel;
    for (size_t i = 0; i < nr; ++i) {
        std::vector<mpz_class> row;
        for (size_t j = 0; j < nr; ++j) row.push_back(i == j ? R.inv_factors[i] : 0);
        rel.push_back(row);
    }
    G.w_m = 0;
    for (auto& u : F.units()) {
        QuadInt ur = F.reduce_mod(u, f);
        if (ur == F.reduce_mod(QuadInt(1, 0), f)) ++G.w_m;
        std::vector<long> dl = R.dlog[idx.at(key_of(ur))];
        std::vector<mpz_class> row(dl.begin(), dl.end());
        rel.push_back(row);
    }

    // class-group extension for h > 1
    auto cls = class_group(F);
    size_t nc = cls.invariant_factors.size();
    if (nc > 0) {
        // choose class generators coprime to f; small prime search in the class
        for (size_t j = 0; j < nc; ++j) {
            IntegralIdeal cj = cls.generators[j];
            if (!F.coprime(cj, f)) {
                // scan small primes for one in the same form-class
                QForm want = form_of_ideal(F, cj);
                bool ok = false;
                for (long p = 2; p < 5000 && !ok; ++p) {
                    auto sp = F.factor_rational_prime(p);
                    if (sp.kind == PrimeSplit::inert) continue;
                    for (auto& P : sp.primes) {
                        if (!F.coprime(P, f)) continue;
                        if (form_of_ideal(F, P) == want) { cj = P; ok = true; break; }
                    }
                }
                if (!ok) throw std::runtime_error("no coprime class representative found");
            }
            G.cls_gens.push_back(cj);
            G.cls_orders.push_back(cls.invariant_factors[j]);
        }
        // widen existing relation rows with zeros
        for (auto& row : rel) row.resize(nr + nc, 0);
        // principality relations c_j^{m_j} = (gamma_j)
        for (size_t j = 0; j < nc; ++j) {
            IntegralIdeal power = F.pow(G.cls_gens[j], G.cls_orders[j]);
            auto gamma = F.generator_of(power);
            if (!gamma) throw std::runtime_error("principalization search failed");
            auto dl = R.dlog[idx.at(key_of(F.reduce_mod(*gamma, f)))];
            std::vector<mpz_class> row(nr + nc, 0);
            for (size_t i = 0; i < nr; ++i) row[i] = -mpz_class(dl[i]);
            row[nr + j] = G.cls_orders[j];
            rel.push_back(row);
        }
    }

    size_t cols = nr + nc;
    if (cols == 0) {
        G.structure = AbelianGroupStructure{};
        return G;
    }
    SnfResult S = snf(rel, cols);
    G.V = S.V;
    G.diag = S.diag;
    for (size_t i = 0; i < cols; ++i) {
        if (S.diag[i] == 0)
            throw std::logic_error("ray class group came out infinite");
        if (S.diag[i] > 1) G.keep.push_back(i);
    }
    AbelianGroupStructure st;
    for (size_t i : G.keep) st.invariant_factors.push_back(S.diag[i]);
    // representative ideals for the new generators: rows of Vinv give old
    // exponents of new generators
    for (size_t i : G.keep) {
        IntegralIdeal rep = F.ring();
        for (size_t j = 0; j < cols; ++j) {
            mpz_class e = S.Vinv[i][j];
            long n = (j < nr) ? G.residue_orders[j] : G.cls_orders[j - nr];
            long em = (long)mpz_class(((e % n) + n) % n).get_si();
            if (em == 0) continue;
            IntegralIdeal base = (j < nr) ? F.principal(G.residue_gens[j]) : G.cls_gens[j - nr];
            rep = F.mul(rep, F.pow(base, em));
        }
        st.generators.push_back(rep);
    }
    // divisibility sanity
    for (size_t i = 0; i + 1 < st.invariant_factors.size(); ++i)
        if (st.invariant_factors[i + 1] % st.invariant_factors[i] != 0)
            throw std::logic_error("invariant factors out of order");
    G.structure = st;
    return G;
}

std::vector<long> RayClassGroup::project(const std::vector<mpz_class>& raw) const {
    size_t cols = V.size();
    std::vector<long> out;
    for (size_t t = 0; t < keep.size(); ++t) {
        size_t i = keep[t];
        mpz_class acc = 0;
        for (size_t j = 0; j < cols; ++j) acc += raw[j] * V[j][i];
        long d = diag[i];
        long v = (long)mpz_class(((acc % d) + d) % d).get_si();
        out.push_back(v);
    }
    return out;
}

std::vector<long> RayClassGroup::class_of_residue(const QuadInt& r) const {
    QuadInt rr = field.reduce_mod(r, modulus);
    auto it = residue_dlog.find({(long)rr.x.get_si(), (long)rr.y.get_si()});
    if (it == residue_dlog.end())
        throw std::invalid_argument("residue not invertible mod the modulus");
    std::vector<mpz_class> raw(V.size(), 0);
    for (size_t i = 0; i < it->second.size(); ++i) raw[i] = it->second[i];
    return project(raw);
}

std::vector<long> RayClassGroup::class_of(const IntegralIdeal& a) const {
    if (!field.coprime(a, modulus))
        throw std::invalid_argument("ideal not coprime to the modulus");
    size_t nr = residue_orders.size(), nc = cls_orders.size();
    if (nc == 0) {
        auto g = field.generator_of(a);
        if (!g) throw std::invalid_argument("non-principal ideal in h=1 regime");
        return class_of_residue(*g);
    }
    // peel off the ideal-class part: find t with a * prod c_j^{t_j} principal
    std::vector<long> t(nc, 0);
    while (true) {
        IntegralIdeal prod = a;
        for (size_t j = 0; j < nc; ++j)
            if (t[j]) prod = field.mul(prod, field.pow(cls_gens[j], t[j]));
        auto g = field.generator_of(prod);
        if (g) {
            QuadInt gr = field.reduce_mod(*g, modulus);
            auto it = residue_dlog.find({(long)gr.x.get_si(), (long)gr.y.get_si()});
            if (it == residue_dlog.end()) throw std::logic_error("generator not coprime");
            std::vector<mpz_class> raw(V.size(), 0);
            for (size_t i = 0; i < nr; ++i) raw[i] = it->second[i];
            for (size_t j = 0; j < nc; ++j) raw[nr + j] = -mpz_class(t[j]);
            return project(raw);
        }
        // next exponent tuple
        size_t j = 0;
        while (j < nc) {
            if (++t[j] < cls_orders[j]) break;
            t[j++] = 0;
        }
        if (j == nc) throw std::logic_error("class group dlog exhausted");
    }
}

std::vector<std::vector<long>> RayClassGroup::all_classes() const {
    std::vector<std::vector<long>> out;
    std::vector<long> v(rank(), 0);
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == rank()) { out.push_back(v); return; }
        for (long t = 0; t < structure.invariant_factors[i]; ++t) { v[i] = t; rec(i + 1); }
    };
    rec(0);
    return out;
}

std::vector<long> RayClassGroup::compose(const std::vector<long>& u,
                                         const std::vector<long>& v) const {
    std::vector<long> w(rank());
    for (size_t i = 0; i < rank(); ++i)
        w[i] = (u[i] + v[i]) % structure.invariant_factors[i];
    return w;
}

std::vector<long> RayClassGroup::inverse_class(const std::vector<long>& v) const {
    std::vector<long> w(rank());
    for (size_t i = 0; i < rank(); ++i)
        w[i] = (structure.invariant_factors[i] - v[i]) % structure.invariant_factors[i];
    return w;
}

IntegralIdeal RayClassGroup::ideal_in_class(const std::vector<long>& v) const {
    IntegralIdeal rep = field.ring();
    for (size_t i = 0; i < rank(); ++i)
        if (v[i]) rep = field.mul(rep, field.pow(structure.generators[i], v[i]));
    return rep;
}

IntegralIdeal RayClassGroup::ideal_in_class_coprime(const std::vector<long>& v,
                                                    const IntegralIdeal& extra) const {
    // small principal lifts first: for h = 1 every class is a residue coset;
    // shift by elements of the modulus to reach coprimality with extra
    if (modulus.norm().fits_slong_p() && modulus.norm().get_si() <= 200000) {
        for (auto& r : field.invertible_residues(modulus)) {
            if (class_of_residue(r) != v) continue;
            QuadInt m1(modulus.a, 0), m2(modulus.b, modulus.c);
            for (long k1 = 0; k1 <= 12; ++k1)
                for (long k2 = 0; k2 <= 12; ++k2) {
                    QuadInt cand = field.add(r, field.add(QuadInt(m1.x * k1, m1.y * k1),
                                                          QuadInt(m2.x * k2, m2.y * k2)));
                    if (cand.is_zero()) continue;
                    IntegralIdeal I = field.principal(cand);
                    if (field.coprime(I, modulus) && field.coprime(I, extra)) return I;
                }
        }
    }
    IntegralIdeal direct = ideal_in_class(v);
    if (field.coprime(direct, extra)) return direct;
    IntegralIdeal big = field.mul(modulus, extra);
    // fall back: small primes times principal adjustments
    for (long p = 2; p < 2000; ++p) {
        auto sp = field.factor_rational_prime(p);
        for (auto& P : sp.primes) {
            if (!field.coprime(P, big)) continue;
            auto cp = class_of(P);
            // need Q with class v - cp principal-reachable
            auto need = compose(v, inverse_class(cp));
            for (auto& r : field.residues(big)) {
                if (!field.invertible_mod(r, big)) continue;
                if (class_of_residue(r) == need) {
                    IntegralIdeal cand = field.mul(P, field.principal(r));
                    if (field.coprime(cand, extra)) return cand;
                }
            }
        }
    }
    throw std::runtime_error("class representative search failed");
}

// ---------------------------------------------------------- characters ---

long HeckeCharacter::order() const {
    long o = 1;
    for (size_t i = 0; i < exps.size(); ++i) {
        long n = group->structure.invariant_factors[i];
        long g = std::gcd(exps[i], n);
        o = std::lcm(o, n / g);
    }
    return o;
}

HeckeCharacter HeckeCharacter::conjugate() const {
    HeckeCharacter c = *this;
    for (size_t i = 0; i < exps.size(); ++i) {
        long n = group->structure.invariant_factors[i];
        c.exps[i] = (n - exps[i]) % n;
    }
    return c;
}

std::pair<long, long> HeckeCharacter::angle_class(const std::vector<long>& v) const {
    // t = sum exps[i] v[i] / n_i mod 1
    long den = 1;
    for (long n : group->structure.invariant_factors) den = std::lcm(den, n);
    long num = 0;
    for (size_t i = 0; i < exps.size(); ++i) {
        long n = group->structure.invariant_factors[i];
        num = (num + exps[i] % n * (v[i] % n) % den * (den / n)) % den;
    }
    num %= den;
    if (num < 0) num += den;
    long g = std::gcd(num, den);
    if (num == 0) return {0, 1};
    return {num / g, den / g};
}

std::pair<long, long> HeckeCharacter::angle_ideal(const IntegralIdeal& a) const {
    return angle_class(group->class_of(a));
}

Cplx HeckeCharacter::value_class(const std::vector<long>& v, long prec) const {
    auto [num, den] = angle_class(v);
    if (num == 0) return Cplx::of_long(1, 0, prec);
    Real ang = Real::pi(prec) * (2 * num) / den;
    return polar_unit(ang);
}

Cplx HeckeCharacter::value_ideal(const IntegralIdeal& a, long prec) const {
    return value_class(group->class_of(a), prec);
}

std::vector<IntegralIdeal> ideal_divisors(const QuadField& F, const IntegralIdeal& f) {
    auto facs = F.factor_ideal(f);
    std::vector<IntegralIdeal> out = {F.ring()};
    for (auto& fac : facs) {
        std::vector<IntegralIdeal> next;
        IntegralIdeal pk = F.ring();
        for (long e = 0; e <= fac.exponent; ++e) {
            for (auto& d : out) next.push_back(F.mul(d, pk));
            if (e < fac.exponent) pk = F.mul(pk, fac.prime);
        }
        out = std::move(next);
    }
    return out;
}

std::vector<HeckeCharacter> characters(const RayClassGroup& G) {
    std::vector<HeckeCharacter> chars;
    std::vector<long> e(G.rank(), 0);
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == G.rank()) {
            HeckeCharacter chi;
            chi.group = &G;
            chi.exps = e;
            chars.push_back(chi);
            return;
        }
        for (long t = 0; t < G.structure.invariant_factors[i]; ++t) { e[i] = t; rec(i + 1); }
    };
    rec(0);

    // conductors: minimal divisor of the modulus through which chi factors
    const QuadField& F = G.field;
    auto divisors = ideal_divisors(F, G.modulus);
    std::sort(divisors.begin(), divisors.end(),
              [](const IntegralIdeal& A, const IntegralIdeal& B) { return A.norm() < B.norm(); });
    // cache: for each divisor, the classes of G that die in the quotient mod m
    std::vector<std::vector<std::vector<long>>> kernels;
    auto all = G.all_classes();
    for (auto& m : divisors) {
        RayClassGroup Gm = ray_class_group(F, m);
        std::vector<std::vector<long>> ker;
        for (auto& v : all) {
            IntegralIdeal rep = G.ideal_in_class_coprime(v, G.modulus);
            if (Gm.class_of(rep) == Gm.identity_class()) ker.push_back(v);
        }
        kernels.push_back(std::move(ker));
    }
    for (auto& chi : chars) {
        std::vector<size_t> passing;
        for (size_t di = 0; di < divisors.size(); ++di) {
            bool factors = true;
            for (auto& v : kernels[di])
                if (chi.angle_class(v).first != 0) { factors = false; break; }
            if (factors) passing.push_back(di);
        }
        if (passing.empty()) throw std::logic_error("character has no conductor");
        chi.conductor = divisors[passing[0]];
        // minimality sanity: the smallest passing divisor divides all others
        for (size_t k = 1; k < passing.size(); ++k)
            if (!F.ideal_contains(chi.conductor, divisors[passing[k]]))
                throw std::logic_error("conductor not minimal by divisibility");
    }
    return chars;
}

}  // namespace kf
