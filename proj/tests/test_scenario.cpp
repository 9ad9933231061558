#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caplab/errors.hpp"
#include "caplab/rational.hpp"
#include "caplab/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace caplab;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "caplab_scenario_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Keeps the heavy default grids out of the unit tests; the full defaults run
// in the acceptance suite.
json trimmed(json overrides) {
    json cfg = overrides;
    cfg["space"]["resolutions"] = json::array({11, 101});
    return cfg;
}

bool assertion_holds(const json& report, const std::string& name) {
    for (const auto& entry : report.at("assertions")) {
        if (entry.at("name") == name) return entry.at("holds").get<bool>();
    }
    FAIL("assertion '", name, "' not found in report");
    return false;
}

}  // namespace

TEST_CASE("config merge semantics") {
    const json base = {{"a", 1},
                       {"nested", {{"x", 1}, {"y", 2}}},
                       {"list", {1, 2, 3}}};
    const json overlay = {{"nested", {{"y", 5}}}, {"list", {9}}, {"b", "new"}};
    const json merged = merge_config(base, overlay);
    CHECK(merged["a"] == 1);
    CHECK(merged["nested"]["x"] == 1);
    CHECK(merged["nested"]["y"] == 5);
    CHECK(merged["list"] == json::array({9}));  // arrays replace, never splice
    CHECK(merged["b"] == "new");

    // Switching a discriminated union replaces the object wholesale instead
    // of bleeding the old variant's fields into the new one.
    const json huber = {{"kind", "huber"}, {"weights", {"uniform"}}, {"eps", {1, 10}}};
    const json as_measure = merge_config(huber, {{"kind", "measure"}, {"weights", {"uniform"}}});
    CHECK_FALSE(as_measure.contains("eps"));
    const json retuned = merge_config(huber, {{"kind", "huber"}, {"eps", {1, 5}}});
    CHECK(retuned["weights"] == json::array({"uniform"}));
    CHECK(retuned["eps"] == json::array({1, 5}));
}

TEST_CASE("config hashing") {
    const json a = {{"kind", "counterexample"}, {"seed", 42}};
    const json b = {{"kind", "counterexample"}, {"seed", 43}};
    CHECK(config_hash(a) == config_hash(a));
    CHECK(config_hash(a) != config_hash(b));
    const std::string hex = hash_hex(config_hash(a));
    CHECK(hex.size() == 18);
    CHECK(hex.substr(0, 2) == "0x");
}

TEST_CASE("default configs exist for every scenario kind") {
    for (const char* kind : {"chain-probe", "counterexample", "positive-case", "set-equality",
                             "property-sweep", "lusin-sweep"}) {
        const json cfg = default_scenario_config(kind);
        CHECK(cfg.at("kind") == kind);
        CHECK(cfg.at("schema_version") == 1);
        CHECK(cfg.contains("seed"));
    }
    CHECK_THROWS_AS(default_scenario_config("no-such-kind"), ScenarioInvalidError);
}

TEST_CASE("capacity specs parse and instantiate") {
    auto g11 = std::make_shared<const FiniteMetricSpace>(
        FiniteMetricSpace::interval_grid(11, Rat(0), Rat(1)));

    const json huber = {{"kind", "huber"},
                        {"weights", {"uniform"}},
                        {"eps", {1, 10}},
                        {"delta", {1, 20}}};
    CapacitySpec hs = capacity_spec_from_json(huber);
    CHECK(hs.label() == "huber(eps=1/10, delta=1/20)");
    Capacity h = hs.instantiate(g11);
    CHECK(h(SubsetMask::from_indices(11, {0})) == doctest::Approx(21.0 / 110).epsilon(1e-15));

    const json restricted = {{"kind", "restricted"},
                             {"base", {{"kind", "measure"}, {"weights", {"uniform"}}}},
                             {"removed", {{"kind", "points"}, {"indices", {0}}}}};
    Capacity r = capacity_spec_from_json(restricted).instantiate(g11);
    CHECK(r(SubsetMask::from_indices(11, {0, 1})) == doctest::Approx(0.1).epsilon(1e-15));

    const json explicit_weights = {{"kind", "measure"},
                                   {"weights", json::array({json::array(
                                       {json::array({1, 2}), json::array({1, 2})})})}};
    CapacitySpec es = capacity_spec_from_json(explicit_weights);
    CHECK(es.components.at(0).label() == "explicit");
    CHECK_THROWS_AS(es.instantiate(g11), ScenarioInvalidError);  // 2 weights vs 11 points

    CHECK_THROWS_AS(capacity_spec_from_json({{"kind", "mystery"}}), ScenarioInvalidError);
    CHECK_THROWS_AS(capacity_spec_from_json({{"kind", "huber"},
                                             {"weights", {"uniform"}},
                                             {"eps", {3, 2}},
                                             {"delta", {1, 20}}}),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(capacity_spec_from_json({{"kind", "huber"},
                                             {"weights", {"uniform"}},
                                             {"eps", {1, 0}},
                                             {"delta", {1, 20}}}),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(capacity_spec_from_json({{"kind", "measure"},
                                             {"weights", {"gaussian"}}}),
                    ScenarioInvalidError);
}

TEST_CASE("chain specs") {
    ChainSpec harmonic;
    harmonic.harmonic = true;
    harmonic.k_max = 0;
    CHECK(harmonic.depth(101) == 101);
    harmonic.k_max = 16;
    CHECK(harmonic.depth(101) == 16);
    CHECK(harmonic.all_open());
    const SetDescriptor d2 = harmonic.at(2);
    CHECK(d2.kind == SetDescriptor::Kind::intervals);
    CHECK(d2.intervals.at(0).hi == rat(1, 2));
    CHECK_FALSE(d2.intervals.at(0).closed_lo);

    harmonic.right_closed = true;
    CHECK_FALSE(harmonic.all_open());
    CHECK(harmonic.at(3).intervals.at(0).closed_hi);
}

TEST_CASE("continuity gaps along the harmonic chain") {
    ChainScenario sc;
    sc.resolutions = {5, 11};
    sc.capacity = capacity_spec_from_json({{"kind", "measure"}, {"weights", {"uniform"}}});
    sc.chain.harmonic = true;

    GapReport rep = continuity_gap(sc);
    CHECK(rep.rows.size() == 16);  // depth = resolution at both grids
    CHECK(rep.finest_resolution == 11);
    CHECK(rep.chain_all_open);
    CHECK(rep.finest_infimum == 0.0);  // (0, 1/10) catches no grid point
    REQUIRE(rep.min_nonempty_gap.has_value());
    CHECK(*rep.min_nonempty_gap == doctest::Approx(1.0 / 11).epsilon(1e-12));

    // Row (resolution 5, k = 1) is (0, 1) = three interior points.
    const GapRow& first = rep.rows.front();
    CHECK(first.resolution == 5);
    CHECK(first.k == 1);
    CHECK_FALSE(first.realized_empty);
    CHECK(first.v_chain == doctest::Approx(3.0 / 5).epsilon(1e-12));
    CHECK(first.v_limit == 0.0);

    const json j = rep.to_json();
    CHECK(j["rows"].size() == 16);
    CHECK(j["chain_all_open"] == true);
}

TEST_CASE("continuity gap rejects broken chains") {
    ChainScenario sc;
    sc.resolutions = {5};
    sc.capacity = capacity_spec_from_json({{"kind", "measure"}, {"weights", {"uniform"}}});
    sc.chain.harmonic = false;
    sc.chain.descriptors = {SetDescriptor::from_indices({0}), SetDescriptor::from_indices({0, 1})};
    sc.chain.limit = SetDescriptor::empty_set();

    try {
        continuity_gap(sc);
        FAIL("expected a nesting error");
    } catch (const ScenarioInvalidError& e) {
        CHECK(std::string(e.what()).find("step k = 2") != std::string::npos);
    }

    sc.chain.descriptors = {SetDescriptor::from_indices({0, 1})};
    sc.chain.limit = SetDescriptor::from_indices({4});
    try {
        continuity_gap(sc);
        FAIL("expected a limit containment error");
    } catch (const ScenarioInvalidError& e) {
        CHECK(std::string(e.what()).find("does not contain the limit") != std::string::npos);
    }
}

TEST_CASE("counterexample scenario pins the frozen optima") {
    const fs::path dir = fresh_dir("counterexample");
    const json cfg = trimmed({{"kind", "counterexample"}});
    ScenarioOutcome out = run_scenario("counterexample", cfg, dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 0);
    CHECK(out.pass);
    REQUIRE(out.files.size() == 1);
    CHECK(out.files[0] == "counterexample_report.json");

    const json& rep = out.report;
    CHECK(rep["kind"] == "counterexample");
    CHECK(rep["capacity"] == "huber");
    CHECK(rep["all_sets_variant"] == true);  // default chain is (0, 1/k]

    const json& rows = rep["lusin"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["resolution"] == 11);
    CHECK(rows[0]["exact"]["value"] == "0.190909090909091");
    CHECK(rows[0]["exact"]["removed"] == "0x1");
    CHECK(rows[0]["edges"] == 1);
    CHECK(rows[0]["oracle_matches"] == true);
    CHECK(rows[1]["exact"]["value"] == "0.159405940594059");
    CHECK(rows[1]["oracle"].is_null());  // 101 points exceed the oracle cap

    CHECK(assertion_holds(rep, "removal_value_at_least_eps"));
    CHECK(assertion_holds(rep, "oracle_agreement"));
    CHECK(assertion_holds(rep, "chain_gap_at_least_eps_on_nonempty_rows"));
    CHECK(assertion_holds(rep, "chain_has_nonempty_rows"));

    // The report on disk is the same document.
    const json disk = json::parse(slurp(dir / "counterexample_report.json"));
    CHECK(disk == rep);
}

TEST_CASE("measure substitution defeats the counterexample assertions") {
    const fs::path dir = fresh_dir("counterexample-measure");
    const json cfg = trimmed({{"kind", "counterexample"}, {"capacity_kind", "measure"}});
    ScenarioOutcome out = run_scenario("counterexample", cfg, dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 1);
    CHECK_FALSE(out.pass);
    CHECK(out.report["lusin"][0]["exact"]["value"] == "0.0909090909090909");
    CHECK_FALSE(assertion_holds(out.report, "removal_value_at_least_eps"));
    CHECK_FALSE(assertion_holds(out.report, "chain_gap_at_least_eps_on_nonempty_rows"));
    CHECK(assertion_holds(out.report, "oracle_agreement"));
}

TEST_CASE("zero contamination degenerates the threshold to zero") {
    const fs::path dir = fresh_dir("counterexample-eps0");
    const json cfg = trimmed({{"kind", "counterexample"}, {"eps", {0, 1}}});
    ScenarioOutcome out = run_scenario("counterexample", cfg, dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 0);
    CHECK(out.report["lusin"][0]["exact"]["value"] == "0.0909090909090909");
}

TEST_CASE("config validation failures") {
    const fs::path dir = fresh_dir("invalid");
    const std::string d = dir.string();

    CHECK_THROWS_AS(run_scenario("counterexample", {{"epss", {1, 10}}}, d, "json", std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("counterexample", {{"kind", "chain-probe"}}, d, "json",
                                 std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("counterexample", {{"schema_version", 2}}, d, "json",
                                 std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("counterexample", json(), d, "xml", std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("counterexample", {{"eps", {1, 0}}}, d, "json", std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("counterexample", {{"scale_steps", 0}}, d, "json", std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("no-such-kind", json(), d, "json", std::nullopt),
                    ScenarioInvalidError);
    CHECK_THROWS_AS(run_scenario("counterexample", json::array({1}), d, "json", std::nullopt),
                    ScenarioInvalidError);

    try {
        run_scenario("counterexample", {{"epss", {1, 10}}}, d, "json", std::nullopt);
    } catch (const ScenarioInvalidError& e) {
        CHECK(std::string(e.what()).find("unknown field 'epss'") != std::string::npos);
    }
}

TEST_CASE("seeds come from the config unless overridden") {
    const fs::path dir = fresh_dir("seeds");
    const json cfg = trimmed({{"kind", "counterexample"}, {"seed", 9}});
    ScenarioOutcome by_config =
        run_scenario("counterexample", cfg, (dir / "a").string(), "json", std::nullopt);
    CHECK(by_config.report["seed"] == 9);
    CHECK(by_config.report["config"]["seed"] == 9);

    ScenarioOutcome overridden =
        run_scenario("counterexample", cfg, (dir / "b").string(), "json", 7);
    CHECK(overridden.report["seed"] == 7);
    CHECK(overridden.report["config"]["seed"] == 7);
    CHECK(by_config.report["config_hash"] != overridden.report["config_hash"]);
}

TEST_CASE("reports are byte-deterministic") {
    const json cfg = trimmed({{"kind", "counterexample"}, {"seed", 42}});
    const fs::path a = fresh_dir("det-a");
    const fs::path b = fresh_dir("det-b");
    ScenarioOutcome ra = run_scenario("counterexample", cfg, a.string(), "csv", std::nullopt);
    ScenarioOutcome rb = run_scenario("counterexample", cfg, b.string(), "csv", std::nullopt);
    REQUIRE(ra.files == rb.files);
    CHECK(ra.files.size() == 3);  // report + chain csv + lusin csv
    for (const std::string& name : ra.files) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
}

TEST_CASE("csv format adds row tables") {
    const fs::path dir = fresh_dir("csv");
    const json cfg = trimmed({{"kind", "counterexample"}});
    ScenarioOutcome out = run_scenario("counterexample", cfg, dir.string(), "csv", std::nullopt);
    REQUIRE(out.files.size() == 3);
    CHECK(out.files[0] == "counterexample_report.json");
    CHECK(out.files[1] == "counterexample_chain.csv");
    CHECK(out.files[2] == "counterexample_lusin.csv");
    const std::string lusin = slurp(dir / "counterexample_lusin.csv");
    CHECK(lusin.rfind("resolution,eta,scale,method,value,removed,optimal,nodes", 0) == 0);
    CHECK(lusin.find("11,1/2,1/5,exact,0.190909090909091,0x1,true,") != std::string::npos);
}

TEST_CASE("chain probe scenario") {
    const fs::path dir = fresh_dir("chain-probe");
    const json cfg = trimmed({{"kind", "chain-probe"}});
    ScenarioOutcome out = run_scenario("chain-probe", cfg, dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 0);
    CHECK(out.report["assertions"].empty());  // probe reports findings only
    CHECK(out.report["all_sets_variant"] == false);
    CHECK(out.report["capacity"] == "huber(eps=1/10, delta=1/20)");
    // Default chain depth is 16 per resolution.
    CHECK(out.report["gap"]["rows"].size() == 32);
    // Huber floor: every nonempty chain set keeps the gap above eps.
    CHECK(out.report["gap"]["min_nonempty_gap"].get<std::string>().substr(0, 3) == "0.1");
}

TEST_CASE("positive case scenario") {
    const fs::path dir = fresh_dir("positive");
    const json cfg = trimmed({{"kind", "positive-case"}});
    ScenarioOutcome out = run_scenario("positive-case", cfg, dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 0);
    const json& rows = out.report["lusin"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["exact"]["value"] == "0.0909090909090909");
    CHECK(rows[1]["exact"]["value"] == "0.0099009900990099");
    CHECK(rows[0]["ball_bound"] == "0.272727272727273");  // 3 grid points of mass
    CHECK(assertion_holds(out.report, "optimum_strictly_decreasing"));
    CHECK(assertion_holds(out.report, "optimum_within_ball_bound"));
    CHECK(assertion_holds(out.report, "oracle_agreement"));
    // 1/101 already clears the 0.01 decay target.
    CHECK(assertion_holds(out.report, "optimum_below_target_at_finest"));
    CHECK(assertion_holds(out.report, "chain_gap_infimum_below_target"));
    CHECK(out.report["capacity"] == "sup(uniform, triangular)");
}

TEST_CASE("set equality scenario") {
    const fs::path dir = fresh_dir("set-equality");
    ScenarioOutcome out =
        run_scenario("set-equality", json(), dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 0);
    CHECK(out.report["all_equal"] == true);
    CHECK(assertion_holds(out.report, "neighborhood_of_intersection_within_intersection"));
    REQUIRE(out.report["rows"].size() == 2);
    CHECK(out.report["rows"][0]["equal"] == true);

    // Disjoint singleton "chain": the equality breaks, but only as a finding.
    const json disc = {{"kind", "set-equality"},
                       {"space", {{"a", {0, 1}}, {"b", {1, 1}}, {"resolutions", {11}}}},
                       {"chain",
                        {{"family", "explicit"},
                         {"descriptors",
                          json::array({json{{"kind", "points"}, {"indices", {0}}},
                                       json{{"kind", "points"}, {"indices", {2}}}})},
                         {"limit", {{"kind", "empty"}}}}}};
    const fs::path dir2 = fresh_dir("set-equality-disc");
    ScenarioOutcome broken = run_scenario("set-equality", disc, dir2.string(), "json", std::nullopt);
    CHECK(broken.exit_code == 0);
    CHECK(broken.report["all_equal"] == false);
    CHECK(broken.report["rows"][0]["lhs"] == "0x0");
    CHECK(broken.report["rows"][0]["rhs"] == "0x2");
    CHECK(broken.report["rows"][0]["discrepancy"] == "0x2");
    CHECK(assertion_holds(broken.report, "neighborhood_of_intersection_within_intersection"));
}

TEST_CASE("property sweep scenario") {
    const fs::path dir = fresh_dir("property-sweep");
    ScenarioOutcome out =
        run_scenario("property-sweep", json(), dir.string(), "json", std::nullopt);
    CHECK(out.exit_code == 0);
    CHECK(out.report["zoo"] == "default");
    CHECK(assertion_holds(out.report, "no_unexpected_property_results"));
    CHECK(assertion_holds(out.report, "two_alternating_implies_subadditive"));
    CHECK(assertion_holds(out.report, "greedy_measures_in_core"));
    CHECK(assertion_holds(out.report, "core_nonempty_for_two_alternating"));
    CHECK(assertion_holds(out.report, "pinned_two_alternating_witness"));

    // A wrong expectation is caught and fails the run.
    const json lying = {{"kind", "property-sweep"},
                        {"sizes", {4}},
                        {"trials", 10},
                        {"zoo", json::array({json{
                            {"label", "uniform"},
                            {"capacity", {{"kind", "measure"}, {"weights", {"uniform"}}}},
                            {"expect", {{"subadditive", false}, {"two_alternating", true}}}}})}};
    const fs::path dir2 = fresh_dir("property-sweep-lying");
    ScenarioOutcome bad = run_scenario("property-sweep", lying, dir2.string(), "json", std::nullopt);
    CHECK(bad.exit_code == 1);
    CHECK_FALSE(assertion_holds(bad.report, "no_unexpected_property_results"));
}

TEST_CASE("lusin sweep scenario") {
    const fs::path dir = fresh_dir("lusin-sweep");
    ScenarioOutcome out = run_scenario("lusin-sweep", json(), dir.string(), "csv", std::nullopt);
    CHECK(out.exit_code == 0);
    CHECK(assertion_holds(out.report, "kept_sets_conflict_free"));
    CHECK(assertion_holds(out.report, "greedy_at_least_exact"));
    CHECK(assertion_holds(out.report, "oracle_matches_exact"));
    const json& rows = out.report["rows"];
    REQUIRE(rows.size() == 2);  // resolutions 11 and 101, one eta, one scale
    CHECK(rows[0]["resolution"] == 11);
    CHECK_FALSE(rows[0]["oracle"].is_null());
    CHECK(rows[0]["oracle_skipped"].is_null());
    CHECK(rows[1]["oracle"].is_null());
    CHECK_FALSE(rows[1]["oracle_skipped"].is_null());
    CHECK(out.files == std::vector<std::string>{"lusin_sweep_report.json", "lusin_sweep_rows.csv"});
}

TEST_CASE("config files load with validation") {
    const fs::path dir = fresh_dir("config-files");
    const fs::path good = dir / "good.json";
    std::ofstream(good) << R"({"kind": "counterexample", "seed": 3})";
    const json loaded = load_config_file(good.string());
    CHECK(loaded["seed"] == 3);

    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(load_config_file(bad.string()), ScenarioInvalidError);
    CHECK_THROWS_AS(load_config_file((dir / "missing.json").string()), ScenarioInvalidError);
}
