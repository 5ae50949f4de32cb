// Exercises the shared-library C interface the way an external client would:
// through nhsym/nhsym.h only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include <nhsym/nhsym.h>

TEST_CASE("version and error plumbing") {
    CHECK(std::strlen(nhsym_version()) > 0);
    nhsym_expr* e = nullptr;
    CHECK(nhsym_expr_parse(nullptr, &e) == NHSYM_ERROR_INVALID_ARGUMENT);
    CHECK(nhsym_expr_parse("1 +", &e) == NHSYM_ERROR_PARSE);
    CHECK(std::strlen(nhsym_last_error()) > 0);
    CHECK(e == nullptr);
}

TEST_CASE("expression lifecycle through the C surface") {
    nhsym_expr* e = nullptr;
    REQUIRE(nhsym_expr_parse("1/sqrt(1+a^2*q2^2)", &e) == NHSYM_OK);

    const char* names[] = {"a"};
    double values[] = {1.0};
    double q[] = {0.0, 1.0};
    double out = 0.0;
    REQUIRE(nhsym_expr_eval(e, 0.0, q, 2, nullptr, 0, names, values, 1, &out) == NHSYM_OK);
    CHECK(out == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    nhsym_expr* d = nullptr;
    REQUIRE(nhsym_expr_diff(e, "q2", &d) == NHSYM_OK);
    REQUIRE(nhsym_expr_eval(d, 0.0, q, 2, nullptr, 0, names, values, 1, &out) == NHSYM_OK);
    CHECK(out == doctest::Approx(-1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));

    // format/parse round trip across the boundary
    nhsym_expr* back = nullptr;
    REQUIRE(nhsym_expr_parse(nhsym_expr_format(e), &back) == NHSYM_OK);
    CHECK(std::string(nhsym_expr_format(back)) == nhsym_expr_format(e));

    // domain error surfaces as a status
    double qneg[] = {0.0, 1.0};
    nhsym_expr* bad = nullptr;
    REQUIRE(nhsym_expr_parse("sqrt(q1-1)", &bad) == NHSYM_OK);
    CHECK(nhsym_expr_eval(bad, 0.0, qneg, 2, nullptr, 0, nullptr, nullptr, 0, &out) ==
          NHSYM_ERROR_DOMAIN);

    nhsym_expr_free(e);
    nhsym_expr_free(d);
    nhsym_expr_free(back);
    nhsym_expr_free(bad);
}

TEST_CASE("builtin listing") {
    int count = nhsym_builtin_count();
    CHECK(count >= 8);
    bool saw_momentum = false, saw_energy = false;
    for (int i = 0; i < count; ++i) {
        std::string name = nhsym_builtin_name(i);
        CHECK(!name.empty());
        CHECK(std::strlen(nhsym_builtin_summary(i)) > 0);
        saw_momentum = saw_momentum || name == "example1-momentum";
        saw_energy = saw_energy || name == "example2-energy";
    }
    CHECK(saw_momentum);
    CHECK(saw_energy);
    std::string listing = nhsym_builtin_listing();
    CHECK(listing.find("example1-momentum") != std::string::npos);
    CHECK(listing.find("example2-energy") != std::string::npos);
}

TEST_CASE("scenario open, validate, run and inspect") {
    nhsym_scenario* sc = nullptr;
    REQUIRE(nhsym_scenario_open("example1-momentum", &sc) == NHSYM_OK);
    CHECK(std::string(nhsym_scenario_name(sc)) == "example1-momentum");
    CHECK(nhsym_scenario_validate(sc) == NHSYM_OK);
    REQUIRE(nhsym_scenario_set_steps(sc, 300) == NHSYM_OK);

    std::filesystem::path dir = std::filesystem::temp_directory_path() / "nhsym-capi-out";
    std::filesystem::remove_all(dir);
    nhsym_run* run = nullptr;
    REQUIRE(nhsym_scenario_run(sc, dir.string().c_str(), &run) == NHSYM_OK);
    CHECK(nhsym_run_passed(run) == 1);
    int checks = nhsym_run_check_count(run);
    CHECK(checks >= 4);
    for (int i = 0; i < checks; ++i) {
        CHECK(std::strlen(nhsym_run_check_name(run, i)) > 0);
        CHECK(nhsym_run_check_passed(run, i) == 1);
        CHECK(nhsym_run_check_tolerance(run, i) > 0.0);
        CHECK(nhsym_run_check_residual(run, i) <= nhsym_run_check_tolerance(run, i));
    }
    CHECK(std::string(nhsym_run_report_text(run)).find("overall: pass") != std::string::npos);
    CHECK(std::string(nhsym_run_report_json(run)).find("\"pass\": true") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "trajectory.csv"));
    CHECK(std::filesystem::exists(dir / "report.txt"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    std::filesystem::remove_all(dir);

    nhsym_run_free(run);
    nhsym_scenario_free(sc);
}

TEST_CASE("a failing control reports pass = 0 through the C surface") {
    nhsym_scenario* sc = nullptr;
    REQUIRE(nhsym_scenario_open("example1-gauge-control", &sc) == NHSYM_OK);
    REQUIRE(nhsym_scenario_set_steps(sc, 2000) == NHSYM_OK);
    nhsym_run* run = nullptr;
    REQUIRE(nhsym_scenario_run(sc, nullptr, &run) == NHSYM_OK);
    CHECK(nhsym_run_passed(run) == 0);
    nhsym_run_free(run);
    nhsym_scenario_free(sc);
}

TEST_CASE("unknown scenarios and invalid arguments are reported") {
    nhsym_scenario* sc = nullptr;
    CHECK(nhsym_scenario_open("definitely-not-a-scenario", &sc) != NHSYM_OK);
    CHECK(sc == nullptr);
    CHECK(std::string(nhsym_last_error()).find("definitely-not-a-scenario") !=
          std::string::npos);
    CHECK(nhsym_scenario_set_step(nullptr, 0.1) == NHSYM_ERROR_INVALID_ARGUMENT);
    CHECK(nhsym_run_passed(nullptr) == 0);
}
