#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caplab/caplab.h"

#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <string>

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Move-only RAII wrappers so failed CHECKs cannot leak handles.
struct Space {
    caplab_space* p = nullptr;
    Space() = default;
    Space(Space&& o) noexcept : p(o.p) { o.p = nullptr; }
    Space(const Space&) = delete;
    Space& operator=(const Space&) = delete;
    ~Space() { caplab_space_free(p); }
};

struct Cap {
    caplab_capacity* p = nullptr;
    Cap() = default;
    Cap(Cap&& o) noexcept : p(o.p) { o.p = nullptr; }
    Cap(const Cap&) = delete;
    Cap& operator=(const Cap&) = delete;
    ~Cap() { caplab_capacity_free(p); }
};

struct Str {
    char* p = nullptr;
    Str() = default;
    Str(Str&& o) noexcept : p(o.p) { o.p = nullptr; }
    Str(const Str&) = delete;
    Str& operator=(const Str&) = delete;
    ~Str() { caplab_string_free(p); }
    json parse() const {
        REQUIRE(p != nullptr);
        return json::parse(p);
    }
};

Space grid(size_t resolution) {
    Space s;
    REQUIRE(caplab_space_grid(resolution, 0, 1, 1, 1, &s.p) == CAPLAB_OK);
    return s;
}

Cap make_capacity(const caplab_space* space, const char* spec) {
    Cap c;
    REQUIRE(caplab_capacity_create(space, spec, &c.p) == CAPLAB_OK);
    return c;
}

constexpr const char* kHuberSpec =
    R"({"kind": "huber", "weights": ["uniform"], "eps": [1, 10], "delta": [1, 20]})";

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "caplab_capi_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("version and error channel") {
    const char* v = caplab_version();
    REQUIRE(v != nullptr);
    CHECK(std::strlen(v) > 0);
    caplab_string_free(nullptr);  // free(NULL) must be a no-op

    Space ok = grid(11);
    CHECK(std::string(caplab_last_error()).empty());  // success clears the slot

    caplab_space* bad = nullptr;
    CHECK(caplab_space_grid(1, 0, 1, 1, 1, &bad) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(!std::string(caplab_last_error()).empty());
}

TEST_CASE("space lifecycle") {
    Space s = grid(11);
    CHECK(caplab_space_size(s.p) == 11);
    CHECK(caplab_space_size(nullptr) == 0);

    caplab_space* out = nullptr;
    CHECK(caplab_space_grid(5, 1, 1, 0, 1, &out) == CAPLAB_ERR_INVALID_ARGUMENT);  // a >= b
    CHECK(caplab_space_grid(5, 0, 0, 1, 1, &out) == CAPLAB_ERR_INVALID_ARGUMENT);  // 0 denominator
    CHECK(caplab_space_grid(5, 0, 1, 1, 1, nullptr) == CAPLAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("capacity evaluation through hex masks") {
    Space s = grid(11);
    Cap huber = make_capacity(s.p, kHuberSpec);

    double value = -1.0;
    REQUIRE(caplab_capacity_value(huber.p, "0x1", &value) == CAPLAB_OK);
    CHECK(value == doctest::Approx(21.0 / 110).epsilon(1e-15));
    REQUIRE(caplab_capacity_value(huber.p, "0x0", &value) == CAPLAB_OK);
    CHECK(value == 0.0);
    REQUIRE(caplab_capacity_value(huber.p, "0x7ff", &value) == CAPLAB_OK);
    CHECK(value == 1.0);

    CHECK(caplab_capacity_value(huber.p, "0xzz", &value) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_capacity_value(huber.p, "0x800", &value) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_capacity_value(huber.p, nullptr, &value) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_capacity_value(huber.p, "0x1", nullptr) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_capacity_value(nullptr, "0x1", &value) == CAPLAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("capacity creation failure modes") {
    Space s = grid(11);
    caplab_capacity* out = nullptr;

    CHECK(caplab_capacity_create(s.p, "{ not json", &out) == CAPLAB_ERR_SCENARIO_INVALID);
    CHECK(out == nullptr);
    CHECK(caplab_capacity_create(s.p, R"({"kind": "mystery"})", &out) ==
          CAPLAB_ERR_SCENARIO_INVALID);
    CHECK(caplab_capacity_create(nullptr, kHuberSpec, &out) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_capacity_create(s.p, nullptr, &out) == CAPLAB_ERR_INVALID_ARGUMENT);

    // Removing the whole space leaves nothing to normalize.
    const char* degenerate = R"({
        "kind": "restricted",
        "base": {"kind": "measure", "weights": ["uniform"]},
        "removed": {"kind": "whole-space"}
    })";
    CHECK(caplab_capacity_create(s.p, degenerate, &out) == CAPLAB_ERR_DEGENERATE_RESTRICTION);
    CHECK(!std::string(caplab_last_error()).empty());
}

TEST_CASE("property checks return one report per property") {
    Space s = grid(8);
    Cap huber = make_capacity(s.p, kHuberSpec);

    Str doc;
    REQUIRE(caplab_check_properties(huber.p, 7, &doc.p) == CAPLAB_OK);
    const json j = doc.parse();
    CHECK(j.at("axioms").at("holds") == true);
    CHECK(j.at("subadditive").at("holds") == true);
    CHECK(j.at("two_alternating").at("holds") == true);
    CHECK(j.at("subadditive").at("mode") == "exhaustive");

    CHECK(caplab_check_properties(nullptr, 7, &doc.p) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_check_properties(huber.p, 7, nullptr) == CAPLAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("core emptiness certificates") {
    Space s = grid(8);
    Cap huber = make_capacity(s.p, kHuberSpec);

    Str doc;
    REQUIRE(caplab_core_nonempty(huber.p, &doc.p) == CAPLAB_OK);
    const json j = doc.parse();
    CHECK(j.at("nonempty") == true);
    CHECK(j.at("witness_verified") == true);

    // The dual LP needs the dense table, so large grounds are refused.
    Space big = grid(21);
    Cap big_cap = make_capacity(big.p, kHuberSpec);
    Str unused;
    CHECK(caplab_core_nonempty(big_cap.p, &unused.p) == CAPLAB_ERR_SIZE_CAP);
    CHECK(unused.p == nullptr);
}

TEST_CASE("min removal mirrors the solver") {
    Space s = grid(11);
    Cap huber = make_capacity(s.p, kHuberSpec);
    std::vector<double> u(11, 0.0);
    u[0] = 1.0;  // indicator of the left endpoint

    Str exact, greedy, oracle;
    REQUIRE(caplab_min_removal(huber.p, u.data(), u.size(), 0.5, 1, 5, "exact", &exact.p) ==
            CAPLAB_OK);
    const json je = exact.parse();
    CHECK(je.at("removed") == "0x1");
    CHECK(je.at("value") == "0.190909090909091");
    CHECK(je.at("optimal") == true);

    REQUIRE(caplab_min_removal(huber.p, u.data(), u.size(), 0.5, 1, 5, "greedy", &greedy.p) ==
            CAPLAB_OK);
    REQUIRE(caplab_min_removal(huber.p, u.data(), u.size(), 0.5, 1, 5, "oracle", &oracle.p) ==
            CAPLAB_OK);
    CHECK(oracle.parse().at("removed") == "0x1");

    Str bad;
    CHECK(caplab_min_removal(huber.p, u.data(), u.size(), 0.5, 1, 5, "magic", &bad.p) ==
          CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_min_removal(huber.p, u.data(), 7, 0.5, 1, 5, "exact", &bad.p) ==
          CAPLAB_ERR_INVALID_ARGUMENT);  // u length mismatch
    CHECK(caplab_min_removal(huber.p, nullptr, 11, 0.5, 1, 5, "exact", &bad.p) ==
          CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_min_removal(huber.p, u.data(), u.size(), 0.5, 0, 1, "exact", &bad.p) ==
          CAPLAB_ERR_INVALID_ARGUMENT);  // zero scale

    // The enumeration cap surfaces through the status code as well.
    Space big = grid(16);
    Cap big_cap = make_capacity(big.p, kHuberSpec);
    std::vector<double> ub(16, 0.0);
    ub[0] = 1.0;
    CHECK(caplab_min_removal(big_cap.p, ub.data(), ub.size(), 0.5, 1, 5, "oracle", &bad.p) ==
          CAPLAB_ERR_SIZE_CAP);
}

TEST_CASE("default configs roundtrip") {
    Str doc;
    REQUIRE(caplab_default_config("counterexample", &doc.p) == CAPLAB_OK);
    const json j = doc.parse();
    CHECK(j.at("kind") == "counterexample");
    CHECK(j.at("schema_version") == 1);

    Str bad;
    CHECK(caplab_default_config("no-such-kind", &bad.p) == CAPLAB_ERR_SCENARIO_INVALID);
    CHECK(caplab_default_config(nullptr, &bad.p) == CAPLAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("scenarios run end to end") {
    const fs::path dir = fresh_dir("run");
    const std::string trimmed = R"({"space": {"resolutions": [11]}})";
    int exit_code = -1;
    Str report;
    REQUIRE(caplab_run_scenario("counterexample", trimmed.c_str(), dir.string().c_str(), "json",
                                /*has_seed=*/1, 42, &exit_code, &report.p) == CAPLAB_OK);
    CHECK(exit_code == 0);
    const json j = report.parse();
    CHECK(j.at("pass") == true);
    CHECK(j.at("seed") == 42);
    CHECK(j.at("lusin").at(0).at("exact").at("value") == "0.190909090909091");
    CHECK(fs::exists(dir / "counterexample_report.json"));

    // A measure cannot hold the removal optimum above eps: assertion failure,
    // reported through exit_code rather than the status.
    const fs::path dir2 = fresh_dir("run-measure");
    const std::string measure =
        R"({"capacity_kind": "measure", "space": {"resolutions": [11]}})";
    int exit2 = -1;
    REQUIRE(caplab_run_scenario("counterexample", measure.c_str(), dir2.string().c_str(), "json",
                                0, 0, &exit2, nullptr) == CAPLAB_OK);
    CHECK(exit2 == 1);

    int exit3 = -1;
    Str bad;
    CHECK(caplab_run_scenario("counterexample", R"({"epss": [1, 10]})", dir.string().c_str(),
                              "json", 0, 0, &exit3, &bad.p) == CAPLAB_ERR_SCENARIO_INVALID);
    CHECK(caplab_run_scenario("counterexample", "{ not json", dir.string().c_str(), "json", 0, 0,
                              &exit3, &bad.p) == CAPLAB_ERR_SCENARIO_INVALID);
    CHECK(caplab_run_scenario("counterexample", nullptr, dir.string().c_str(), "xml", 0, 0, &exit3,
                              &bad.p) == CAPLAB_ERR_SCENARIO_INVALID);
    CHECK(caplab_run_scenario(nullptr, nullptr, dir.string().c_str(), "json", 0, 0, &exit3,
                              &bad.p) == CAPLAB_ERR_INVALID_ARGUMENT);
    CHECK(caplab_run_scenario("counterexample", nullptr, dir.string().c_str(), "json", 0, 0,
                              nullptr, &bad.p) == CAPLAB_ERR_INVALID_ARGUMENT);
}
