// Exercises the kforge binary end to end: exit codes, report schema,
// determinism modulo the volatile header.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kf/report.hpp"

namespace {

std::string bin() {
    const char* b = std::getenv("KFORGE_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = bin() + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int st = pclose(p);
    return {WEXITSTATUS(st), out};
}

}  // namespace

TEST_CASE("lvalue subcommand") {
    auto r = run("lvalue --field -1 --conductor 3,0 --char 1 --j 1 --bits 96");
    CHECK(r.code == 0);
    CHECK(r.out.find("relative diff") != std::string::npos);

    // trivial character rejected with exit 2 (index 0 is trivial in this group)
    auto r0 = run("lvalue --field -1 --conductor 3,0 --char 0 --j 1 --bits 96");
    CHECK(r0.code == 2);

    // class number > 1 field is an unsupported regime
    auto r5 = run("lvalue --field -5 --conductor 3,0 --char 1 --j 1 --bits 96");
    CHECK(r5.code == 2);
}

TEST_CASE("zeta-star subcommand") {
    auto r = run("zeta-star --field -1 --m 2 --bits 96");
    CHECK(r.code == 0);
    CHECK(r.out.find("-4.8593") != std::string::npos);  // -0.04859... printed as decimal E-string
    auto r1 = run("zeta-star --field -1 --m 1");
    CHECK(r1.code == 2);
}

TEST_CASE("eunit subcommand") {
    auto r = run("eunit --field -1 --conductor 3,0 --aux 2,1 --bits 128");
    CHECK(r.code == 0);
    CHECK(r.out.find("p-unit") != std::string::npos);
}

TEST_CASE("verify: schema, exit code, determinism modulo volatile header") {
    std::string cfgpath = "/tmp/kf_test_config.txt";
    {
        std::ofstream f(cfgpath);
        f << "suite = modular-fns\n"
             "suite = iwasawa\n"
             "field = -1\n"
             "bits = 64\n"
             "seed = 9\n"
             "herbrand_instances = 5\n"
             "workers = 2\n";
    }
    auto r1 = run("verify --config " + cfgpath);
    CHECK(r1.code == 0);
    auto d1 = nlohmann::ordered_json::parse(r1.out);
    std::string why;
    CHECK(kf::validate_report(d1, &why));

    auto r2 = run("verify --config " + cfgpath);
    auto d2 = nlohmann::ordered_json::parse(r2.out);
    d1.erase("volatile");
    d2.erase("volatile");
    CHECK(d1.dump() == d2.dump());

    // empty suite list is a config error
    std::string badpath = "/tmp/kf_test_bad.txt";
    {
        std::ofstream f(badpath);
        f << "field = -1\nbits = 64\n";
    }
    auto rb = run("verify --config " + badpath);
    CHECK(rb.code == 2);
}

TEST_CASE("config parser") {
    auto cfg = kf::parse_config_text("suite = iwasawa\nfield = -7\nbits = 80\nseed = 4\n");
    CHECK(cfg.fields == std::vector<long>{-7});
    CHECK(cfg.bits == 80);
    CHECK(cfg.seed == 4);
    CHECK_THROWS(kf::parse_config_text("nonsense_key = 1\nsuite = iwasawa\n"));
    CHECK_THROWS(kf::parse_config_text("field = -1\n"));  // no suite
}
