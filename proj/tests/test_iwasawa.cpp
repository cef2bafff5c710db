#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kf/iwasawa.hpp"
#include "kf/real.hpp"

using namespace kf;

namespace {

Truncation tr5{5, 32, 64};

LambdaElement poly(Truncation t, std::vector<long> cs) { return LambdaElement::from_coeffs(t, cs); }

}  // namespace

TEST_CASE("lambda element arithmetic") {
    LambdaElement a = poly(tr5, {1, 2, 3});
    LambdaElement b = poly(tr5, {4, 5});
    LambdaElement c = a * b;
    CHECK(c.c[0] == 4);
    CHECK(c.c[1] == 13);
    CHECK(c.c[2] == 22);
    CHECK(c.c[3] == 15);
    CHECK(a.is_unit());
    CHECK(!poly(tr5, {5, 1}).is_unit());
    LambdaElement inv = a.inverse();
    LambdaElement one = a * inv;
    CHECK(one.c[0] == 1);
    for (long i = 1; i < tr5.M; ++i) CHECK(one.c[i] == 0);
}

TEST_CASE("weierstrass preparation") {
    // T + p is already distinguished
    LambdaElement f = poly(tr5, {5, 1});
    WeierstrassPrep w = weierstrass_prep(f);
    CHECK(w.mu == 0);
    CHECK(w.lambda == 1);
    CHECK(w.distinguished.c[0] == 5);
    CHECK(w.distinguished.c[1] == 1);

    // p*T: mu = 1, distinguished T
    LambdaElement g = poly(tr5, {0, 5});
    WeierstrassPrep wg = weierstrass_prep(g);
    CHECK(wg.mu == 1);
    CHECK(wg.lambda == 1);
    CHECK(wg.distinguished.c[0] == 0);
    CHECK(wg.distinguished.c[1] == 1);

    // (1 + T)(T^2 + p T + p): recover degree 2, mu = 0, and reconstruct
    LambdaElement u = poly(tr5, {1, 1});
    LambdaElement d = poly(tr5, {5, 5, 1});
    WeierstrassPrep wp = weierstrass_prep(u * d);
    CHECK(wp.mu == 0);
    CHECK(wp.lambda == 2);
    LambdaElement diff = wp.distinguished - d;
    CHECK(diff.is_zero());

    CHECK_THROWS(weierstrass_prep(LambdaElement(tr5)));
}

TEST_CASE("weierstrass reconstruction on random inputs") {
    Rng rng(404);
    for (int t = 0; t < 500; ++t) {
        Truncation tr{t % 3 == 0 ? 3L : (t % 3 == 1 ? 5L : 7L), 24, 24};
        LambdaElement f(tr);
        bool nonzero = false;
        for (long i = 0; i < 6; ++i) {
            long v = (long)rng.below(50) - 25;
            f.c[i] = ((v % 40) + 40) % 40;
            if (f.c[i] != 0) nonzero = true;
        }
        if (!nonzero || f.mu() >= tr.N - 6) continue;
        WeierstrassPrep w = weierstrass_prep(f);
        // multiply back and compare mod p^{N-4}
        mpz_class pmu = 1;
        for (long i = 0; i < w.mu; ++i) pmu *= tr.p;
        LambdaElement recon = (w.unit * w.distinguished).scalar(pmu);
        LambdaElement diff = recon - f;
        mpz_class ps = 1;
        for (long i = 0; i < tr.N - 4; ++i) ps *= tr.p;
        for (long i = 0; i < tr.M; ++i) CHECK(diff.c[i] % ps == 0);
    }
}

TEST_CASE("characteristic ideals") {
    // diagonal
    LambdaModulePresentation M{tr5, 2, 2, {}};
    LambdaElement f = poly(tr5, {5, 1}), g = poly(tr5, {25, 0, 1});
    LambdaElement z(tr5);
    M.mat = {f, z, z, g};
    LambdaElement ch = char_ideal(M);
    LambdaElement want = f * g;
    // char is normalized p^mu * distinguished; f*g is already distinguished
    LambdaElement diff = ch - want;
    CHECK(diff.is_zero());

    // single relation
    LambdaModulePresentation M1{tr5, 1, 1, {f}};
    CHECK((char_ideal(M1) - f).is_zero());

    // random unit-triangular factors: det matches direct product
    LambdaElement u = poly(tr5, {1, 3, 2});
    LambdaModulePresentation M2{tr5, 2, 2, {}};
    // [[f, u*f],[0, g]] has det f*g
    M2.mat = {f, u * f, z, g};
    LambdaElement ch2 = char_ideal(M2);
    WeierstrassPrep wfg = weierstrass_prep(f * g);
    mpz_class pmu = 1;
    for (long i = 0; i < wfg.mu; ++i) pmu *= tr5.p;
    CHECK((ch2 - wfg.distinguished.scalar(pmu)).is_zero());

    // non-torsion: zero matrix rejected
    LambdaModulePresentation M3{tr5, 1, 1, {z}};
    CHECK_THROWS(char_ideal(M3));

    // lambda additivity: deg distinguished of char(M (+) M') adds
    WeierstrassPrep w1 = weierstrass_prep(char_ideal(M1));
    WeierstrassPrep w2 = weierstrass_prep(char_ideal(M));
    LambdaModulePresentation M4{tr5, 3, 3, {}};
    M4.mat = {f, z, z, z, f, z, z, z, g};
    WeierstrassPrep w4 = weierstrass_prep(char_ideal(M4));
    CHECK(w4.lambda == w1.lambda + w2.lambda);
}

TEST_CASE("idempotents: trivial, Z/2, Z/4 at split and inert primes") {
    // trivial character on any Delta: (1/|Delta|) sum tau
    Truncation t5{5, 20, 4};
    auto e1 = idempotent({2}, {0}, t5);
    // coefficients all = inverse of 2 mod 5^20
    CHECK(e1.c[0] == e1.c[1]);
    auto ee = e1.mul(e1);
    CHECK(ee.congruent(e1, 18));

    // Z/2 nontrivial at p=5: (1 - tau)/2
    auto e2 = idempotent({2}, {1}, t5);
    auto sum = e1.add(e2);
    GroupAlgebraElement one{{2}, t5, {1, 0}};
    CHECK(sum.congruent(one, 18));
    CHECK(e1.mul(e2).congruent(GroupAlgebraElement{{2}, t5, {0, 0}}, 18));

    // Z/4, p=5 (zeta_4 in Z_5): four idempotents summing to 1
    std::vector<GroupAlgebraElement> es;
    GroupAlgebraElement acc{{4}, t5, {0, 0, 0, 0}};
    for (auto& orb : zp_character_orbits({4}, 5)) {
        auto e = idempotent({4}, orb, t5);
        CHECK(e.mul(e).congruent(e, 18));
        acc = acc.add(e);
        es.push_back(e);
    }
    GroupAlgebraElement one4{{4}, t5, {1, 0, 0, 0}};
    CHECK(acc.congruent(one4, 18));
    for (size_t i = 0; i < es.size(); ++i)
        for (size_t j = i + 1; j < es.size(); ++j)
            CHECK(es[i].mul(es[j]).congruent(GroupAlgebraElement{{4}, t5, {0, 0, 0, 0}}, 18));

    // Z/4 at p=3: zeta_4 needs the unramified quadratic extension
    Truncation t3{3, 20, 4};
    GroupAlgebraElement acc3{{4}, t3, {0, 0, 0, 0}};
    for (auto& orb : zp_character_orbits({4}, 3)) {
        auto e = idempotent({4}, orb, t3);
        CHECK(e.mul(e).congruent(e, 18));
        acc3 = acc3.add(e);
    }
    GroupAlgebraElement one43{{4}, t3, {1, 0, 0, 0}};
    CHECK(acc3.congruent(one43, 18));

    CHECK_THROWS(idempotent({5}, {1}, t5));  // p divides |Delta|
}

TEST_CASE("finite quotient orders") {
    Truncation tr{5, 32, 64};
    // Lambda/(T - p) mod T -> order p
    LambdaModulePresentation M{tr, 1, 1, {poly(tr, {-5, 1})}};
    auto o1 = finite_quotient_order(M, poly(tr, {0, 1}));
    REQUIRE(o1.has_value());
    CHECK(*o1 == 1);

    // Lambda/(T) mod (T - p) -> order p
    LambdaModulePresentation M2{tr, 1, 1, {poly(tr, {0, 1})}};
    auto o2 = finite_quotient_order(M2, poly(tr, {-5, 1}));
    REQUIRE(o2.has_value());
    CHECK(*o2 == 1);

    // Lambda/(T^2 - p) mod T -> order p
    LambdaModulePresentation M3{tr, 1, 1, {poly(tr, {-5, 0, 1})}};
    auto o3 = finite_quotient_order(M3, poly(tr, {0, 1}));
    REQUIRE(o3.has_value());
    CHECK(*o3 == 1);

    // Lambda/(T) mod T is infinite -> inconclusive
    auto o4 = finite_quotient_order(M2, poly(tr, {0, 1}));
    CHECK(!o4.has_value());
}

TEST_CASE("herbrand: identity map and the T-p example") {
    Truncation tr{5, 32, 64};
    // X = Y = Lambda/(T - p), map mult by (T - a), a = 2 a p-unit
    ExactSequenceData seq;
    seq.tr = tr;
    seq.f = {poly(tr, {-5, 1})};
    seq.g = {poly(tr, {-5, 1})};
    seq.H = {{poly(tr, {-2, 1})}};
    HerbrandRecord r = herbrand_check(seq);
    REQUIRE(r.conclusive);
    CHECK(r.equal);
    // beta is multiplication by (0 - 2) = -2 on Z/5: iso
    CHECK(r.ker_beta == 0);
    CHECK(r.coker_beta == 0);

    // map mult by (T - 5): beta is multiplication by -5 = 0 on Z/5
    ExactSequenceData seq2 = seq;
    seq2.H = {{poly(tr, {-5, 1})}};
    HerbrandRecord r2 = herbrand_check(seq2);
    REQUIRE(r2.conclusive);
    CHECK(r2.equal);
    CHECK(r2.ker_beta == 1);
    CHECK(r2.coker_beta == 1);

    // mismatched characteristic ideals are rejected as inconclusive
    ExactSequenceData bad = seq;
    bad.g = {poly(tr, {-25, 1})};
    HerbrandRecord rb = herbrand_check(bad);
    CHECK(!rb.conclusive);
}

TEST_CASE("herbrand: randomized suite") {
    Rng rng(20260808);
    long conclusive = 0, trials = 0;
    while (conclusive < 100 && trials < 1000) {
        ++trials;
        long p = std::vector<long>{3, 5, 7}[rng.below(3)];
        Truncation tr{p, 32, 64};
        long k = 1 + (long)rng.below(2);
        ExactSequenceData seq;
        seq.tr = tr;
        auto rand_dist = [&]() {
            // distinguished-ish polynomial of degree <= 3 with f(0) != 0
            long deg = 1 + (long)rng.below(3);
            std::vector<long> cs(deg + 1, 0);
            cs[deg] = 1;
            for (long i = 0; i < deg; ++i) cs[i] = (long)(p * (1 + rng.below(4)));
            if (cs[0] == 0) cs[0] = p;
            return poly(tr, cs);
        };
        std::vector<LambdaElement> fs;
        for (long i = 0; i < k; ++i) fs.push_back(rand_dist());
        seq.f = fs;
        // Y: same factors times units (char equal), occasionally permuted
        std::vector<LambdaElement> gs;
        for (long i = 0; i < k; ++i) {
            std::vector<long> uc = {1 + (long)rng.below(3) * (long)p, (long)rng.below(5)};
            gs.push_back(fs[i] * poly(tr, uc));
        }
        seq.g = gs;
        // map: diagonal random + off-diagonal multiples of g_j
        seq.H.assign(k, std::vector<LambdaElement>());
        for (long j = 0; j < k; ++j)
            for (long i = 0; i < k; ++i) {
                if (i == j) {
                    std::vector<long> hc = {(long)rng.below(2 * p) + 1, (long)rng.below(5)};
                    seq.H[j].push_back(poly(tr, hc));
                } else {
                    seq.H[j].push_back(gs[j] * poly(tr, {(long)rng.below(3)}));
                }
            }
        HerbrandRecord r = herbrand_check(seq);
        if (!r.conclusive) continue;
        ++conclusive;
        CHECK(r.equal);
    }
    CHECK(conclusive == 100);
}
