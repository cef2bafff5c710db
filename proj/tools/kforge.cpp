// kforge: command-line front end for the kronecker-forge verification engine.
//
// Subcommands:
//   lvalue     cross-validate L'(chi,-j) (lattice-sum vs functional equation)
//   zeta-star  leading zeta derivative product over a ray class field
//   eunit      evaluate an elliptic unit and its orbit polynomial
//   verify     run configured verification suites, emit a JSON report
//   iwasawa    randomized Herbrand-quotient suite
//
// Exit codes: 0 all checks accepted, 1 some check rejected, 2 configuration
// or unsupported-regime errors.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "kf/report.hpp"

using namespace kf;

namespace {

long default_bits() {
    if (const char* e = std::getenv("KF_DEFAULT_BITS")) return std::atol(e);
    return 128;
}

// conductor syntax: "x,y" for the principal ideal (x + y*omega); "1,0" is O
IntegralIdeal parse_ideal(const QuadField& F, const std::string& s) {
    size_t comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("ideal must be given as x,y");
    long x = std::stol(s.substr(0, comma)), y = std::stol(s.substr(comma + 1));
    QuadInt g(x, y);
    if (F.norm(g) == 0) throw CLI::ValidationError("zero ideal");
    return F.principal(g);
}

int run_lvalue(long d, const std::string& cond, long chi_index, long j, long bits) {
    auto F = make_field(d);
    if (class_number(F) != 1) {
        std::cerr << "unsupported regime: class number of Q(sqrt(" << d << ")) exceeds 1\n";
        return 2;
    }
    PrecisionContext ctx(bits);
    IntegralIdeal f = parse_ideal(F, cond);
    auto G = ray_class_group(F, f);
    auto chars = characters(G);
    if (chi_index < 0 || chi_index >= (long)chars.size()) {
        std::cerr << "character index out of range (group order " << chars.size() << ")\n";
        return 2;
    }
    const HeckeCharacter& chi = chars[chi_index];
    if (chi.is_trivial()) {
        std::cerr << "chi must be nontrivial\n";
        return 2;
    }
    LValueResult oracle = functional_equation_lprime(chi, j, ctx);
    auto rho = canonical_idele(F, chi.conductor);
    auto fm = choose_f_m(F, chi.conductor, rho);
    CMData cm = build_cm_data(F, G, chi.conductor, fm);
    LprimeResult kr = lprime_kronecker(F, chi, j, cm, ctx);
    Cplx diff = kr.value - oracle.value;
    double rel = std::sqrt(abs2(diff).to_double() / abs2(oracle.value).to_double());
    std::cout << "character        " << character_id(chi) << "\n";
    std::cout << "kronecker        " << decimal_of(kr.value.re, bits) << " + "
              << decimal_of(kr.value.im, bits) << " i\n";
    std::cout << "functional-eq    " << decimal_of(oracle.value.re, bits) << " + "
              << decimal_of(oracle.value.im, bits) << " i\n";
    std::cout << "normalization    " << kr.normalization << "\n";
    std::cout << "relative diff    " << rel << "\n";
    return rel < 1e-8 ? 0 : 1;
}

int run_zeta_star(long d, const std::string& cond, long m, long bits) {
    auto F = make_field(d);
    if (class_number(F) != 1) {
        std::cerr << "unsupported regime: class number > 1\n";
        return 2;
    }
    if (m < 2) {
        std::cerr << "m must be at least 2\n";
        return 2;
    }
    PrecisionContext ctx(bits);
    IntegralIdeal f = cond.empty() ? F.ring() : parse_ideal(F, cond);
    ZetaStarResult z = zeta_star(F, f, m, ctx);
    RationalFactor rf = lichtenbaum_rational_factor(F, f, m);
    std::cout << "zeta*_{K(f)}(1-m)  " << decimal_of(z.value, bits) << "\n";
    std::cout << "vanishing order    " << z.vanishing_order << "\n";
    std::cout << "rational factor    " << rf.value.get_str() << "\n";
    return 0;
}

int run_eunit(long d, const std::string& cond, const std::string& aux, long bits) {
    auto F = make_field(d);
    if (class_number(F) != 1) {
        std::cerr << "unsupported regime: class number > 1\n";
        return 2;
    }
    PrecisionContext ctx(bits);
    IntegralIdeal f = parse_ideal(F, cond);
    IntegralIdeal a = parse_ideal(F, aux);
    EllipticUnitSpec spec = elliptic_unit(F, f, a, ctx);
    std::cout << "value   " << decimal_of(spec.value.re, bits) << " + "
              << decimal_of(spec.value.im, bits) << " i\n";
    IntegralityRecord rec = verify_integrality(F, f, a, ctx);
    std::cout << "kind    " << rec.kind;
    if (rec.kind == "p-unit") std::cout << " (p = " << rec.prime << "^" << rec.prime_power << ")";
    std::cout << "\n";
    std::cout << "polynomial";
    for (auto it = rec.poly.coeffs.rbegin(); it != rec.poly.coeffs.rend(); ++it)
        std::cout << " " << it->get_str();
    std::cout << "\n";
    return 0;
}

int run_verify(const std::string& config_path, const std::string& out_path, long bits,
               uint64_t seed, long workers, bool seed_set, bool bits_set, bool workers_set,
               const std::string& out_cli) {
    SuiteConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read config " << config_path << "\n";
            return 2;
        }
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        try {
            cfg = parse_config_text(text);
        } catch (std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    } else {
        cfg.suites = {"modular-fns", "lvalue-crosscheck", "elliptic-laws", "iwasawa"};
        cfg.fields = {-1, -3, -7};
        cfg.conductor_norm_bound = 9;
        cfg.bits = 96;
        cfg.herbrand_instances = 25;
    }
    if (bits_set) cfg.bits = bits;
    if (seed_set) cfg.seed = seed;
    if (workers_set) cfg.workers = workers;
    if (!out_cli.empty()) cfg.out_path = out_cli;
    else if (!out_path.empty() && cfg.out_path.empty()) cfg.out_path = out_path;
    VerificationReport rep;
    try {
        rep = run_suite(cfg);
    } catch (std::exception& e) {
        std::cerr << "suite error: " << e.what() << "\n";
        return 2;
    }
    std::string why;
    if (!validate_report(rep.doc, &why)) {
        std::cerr << "internal report validation failed: " << why << "\n";
        return 2;
    }
    if (cfg.out_path.empty()) std::cout << rep.doc.dump(1) << "\n";
    std::cerr << "records " << rep.total << ": " << rep.accepted << " accepted, " << rep.rejected
              << " rejected, " << rep.skipped << " skipped\n";
    return rep.all_ok() ? 0 : 1;
}

int run_iwasawa(long p, long instances, uint64_t seed) {
    SuiteConfig cfg;
    cfg.suites = {"iwasawa"};
    cfg.seed = seed;
    cfg.herbrand_instances = instances;
    (void)p;
    VerificationReport rep = run_suite(cfg);
    std::cout << rep.doc["records"].dump(1) << "\n";
    return rep.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kronecker-forge: numerical verification of elliptic-unit identities"};
    app.require_subcommand(1);

    long field = -1, j = 1, m = 2, chi_index = 0, bits = default_bits(), workers = 1, p = 5,
         instances = 25;
    uint64_t seed = 1;
    std::string conductor, aux = "2,1", config_path, out_path;

    auto* lv = app.add_subcommand("lvalue", "cross-validate L'(chi,-j)");
    lv->add_option("--field", field, "squarefree negative d");
    lv->add_option("--conductor", conductor, "principal conductor x,y for x+y*omega")->required();
    lv->add_option("--char", chi_index, "character index");
    lv->add_option("--j", j, "derivative point s = -j");
    lv->add_option("--bits", bits, "target precision bits");

    auto* zs = app.add_subcommand("zeta-star", "zeta*_{K(f)}(1-m)");
    zs->add_option("--field", field);
    zs->add_option("--conductor", conductor, "ray field conductor (omit for K itself)");
    zs->add_option("--m", m);
    zs->add_option("--bits", bits);

    auto* eu = app.add_subcommand("eunit", "elliptic unit and its orbit polynomial");
    eu->add_option("--field", field);
    eu->add_option("--conductor", conductor)->required();
    eu->add_option("--aux", aux, "auxiliary ideal x,y");
    eu->add_option("--bits", bits);

    auto* vf = app.add_subcommand("verify", "run verification suites");
    auto* vf_cfg = vf->add_option("--config", config_path, "flat key=value config file");
    auto* vf_bits = vf->add_option("--bits", bits);
    auto* vf_seed = vf->add_option("--seed", seed);
    auto* vf_workers = vf->add_option("--workers", workers);
    auto* vf_out = vf->add_option("--out", out_path, "report path (stdout if omitted)");

    auto* iw = app.add_subcommand("iwasawa", "randomized Herbrand suite");
    iw->add_option("--p", p);
    iw->add_option("--instances", instances);
    iw->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (lv->parsed()) return run_lvalue(field, conductor, chi_index, j, bits);
        if (zs->parsed()) return run_zeta_star(field, conductor, m, bits);
        if (eu->parsed()) return run_eunit(field, conductor, aux, bits);
        if (vf->parsed())
            return run_verify(config_path, "", bits, seed, workers, vf_seed->count() > 0,
                              vf_bits->count() > 0, vf_workers->count() > 0,
                              vf_out->count() > 0 ? out_path : "");
        if (iw->parsed()) return run_iwasawa(p, instances, seed);
        (void)vf_cfg;
    } catch (CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
