// Machine-readable verification reports and the suite orchestrator.
// Reports are a single JSON document with a stable field order; every real
// number is a decimal string, and the timestamp sits in one header field so
// determinism checks can mask it.

#pragma once

#include <json.hpp>

#include "kf/iwasawa.hpp"
#include "kf/units.hpp"

namespace kf {

using ojson = nlohmann::ordered_json;

struct SuiteConfig {
    std::vector<long> fields = {-1, -3, -7};
    long conductor_norm_bound = 10;
    std::string char_selection = "all";  // all | nontrivial
    long bits = 128;
    long j_min = 1, j_max = 1;
    long m_min = 2, m_max = 2;
    std::vector<std::string> suites;  // lvalue-crosscheck | elliptic-laws | iwasawa | modular-fns
    uint64_t seed = 1;
    std::string out_path;
    long workers = 1;
    long herbrand_instances = 100;
};

SuiteConfig parse_config_text(const std::string& text);

struct VerificationReport {
    ojson doc;
    long total = 0, accepted = 0, rejected = 0, skipped = 0;
    bool all_ok() const { return rejected == 0; }
};

VerificationReport run_suite(const SuiteConfig& cfg);

// serialization helpers
ojson json_cplx(const Cplx& z, long err2, long bits);
ojson json_ideal(const QuadField& F, const IntegralIdeal& I);
ojson json_rational(const mpq_class& q);
ojson json_lambda(const LambdaElement& e);
ojson json_group(const QuadField& F, const AbelianGroupStructure& S);

// schema-level sanity of a finished report
bool validate_report(const ojson& doc, std::string* why = nullptr);

}  // namespace kf
