#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ppsdf/config.hpp"

using namespace ppsdf;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string name, const std::string& text) : path(std::move(name)) {
        std::ofstream os(path);
        os << text;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("defaults are valid and consistent") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.degree == 3);
    CHECK(cfg.segments == 4);
    CHECK(cfg.lambda_t == 0.1);

    const BasisConfig basis = cfg.basis_config();
    CHECK(basis.degree == cfg.degree);
    CHECK(basis.dim == cfg.dim);
    for (int d = 0; d < 3; ++d) {
        CHECK(basis.domain[d].lo == 0.0);
        CHECK(basis.domain[d].hi == 1.0);
    }

    const RegularizerSpec spec = cfg.regularizer_spec();
    CHECK(spec.lambda_d == cfg.lambda_d);
    CHECK(spec.sigma2 == cfg.sigma2);
    CHECK(spec.tension_points == cfg.tension_points);
}

TEST_CASE("config file parsing") {
    TempFile f("t_cfg.conf",
               "# comment line\n"
               "degree = 2\n"
               "segments=6\n"
               "lambda_t = 0.25   # inline comment\n"
               "\n"
               "prior_center = 0.4 0.5 0.6\n"
               "in = data/cloud.xyz\n");
    const RunConfig cfg = parse_config_file(f.path);
    CHECK(cfg.degree == 2);
    CHECK(cfg.segments == 6);
    CHECK(cfg.lambda_t == 0.25);
    CHECK(cfg.prior_center.x() == 0.4);
    CHECK(cfg.prior_center.z() == 0.6);
    CHECK(cfg.input_path == "data/cloud.xyz");
    // Untouched keys keep their defaults.
    CHECK(cfg.lambda_d == 1.0);
}

TEST_CASE("unknown and malformed keys are rejected by name") {
    TempFile typo("t_typo.conf", "lamda_d = 2\n");
    CHECK_THROWS_WITH(parse_config_file(typo.path), doctest::Contains("lamda_d"));

    TempFile malformed("t_malformed.conf", "degree two\n");
    CHECK_THROWS(parse_config_file(malformed.path));

    TempFile badval("t_badval.conf", "degree = soup\n");
    CHECK_THROWS(parse_config_file(badval.path));

    CHECK_THROWS(parse_config_file("no_such.conf"));
}

TEST_CASE("overrides win over file values") {
    TempFile f("t_base.conf", "segments = 6\nlambda_g = 3\n");
    RunConfig cfg = parse_config_file(f.path);
    apply_override(cfg, "segments", "8");
    apply_override(cfg, "seed", "42");
    CHECK(cfg.segments == 8);
    CHECK(cfg.lambda_g == 3.0);
    CHECK(cfg.seed == 42);

    CHECK_THROWS(apply_override(cfg, "not_a_key", "1"));
}

TEST_CASE("validation catches bad combinations") {
    RunConfig cfg;
    cfg.degree = 0;
    CHECK_THROWS(cfg.validate());

    cfg = RunConfig{};
    cfg.sigma2 = -1.0;
    CHECK_THROWS(cfg.validate());

    cfg = RunConfig{};
    cfg.dim = 4;
    CHECK_THROWS(cfg.validate());

    cfg = RunConfig{};
    cfg.grid_res = 1;
    CHECK_THROWS(cfg.validate());
}
