#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "caplab/capacity.hpp"
#include "caplab/finite_space.hpp"
#include "caplab/rational.hpp"

namespace caplab {

// ---------------------------------------------------------------------------
// Config plumbing.  Scenario configs are JSON documents with schema_version 1;
// rationals are encoded as [numerator, denominator] integer pairs.  Unknown
// fields are rejected so that typos cannot silently change a run.
// ---------------------------------------------------------------------------

// Deep merge: nested objects merge key-wise, arrays and scalars are replaced
// by the overlay value.  Objects that disagree on a "kind" or "family"
// discriminator are replaced wholesale, so switching a capacity or chain
// variant does not inherit the other variant's fields.  Used to put a user
// config on top of the defaults.
nlohmann::json merge_config(const nlohmann::json& base, const nlohmann::json& overlay);

// Built-in default config document for a scenario kind.
// Kinds: chain-probe, counterexample, positive-case, set-equality,
// property-sweep, lusin-sweep.  Throws ScenarioInvalidError on unknown kind.
nlohmann::json default_scenario_config(const std::string& kind);

// Read and parse a config file.  Throws ScenarioInvalidError on I/O or parse
// failure.
nlohmann::json load_config_file(const std::string& path);

// FNV-1a (64-bit) over the canonical sorted-key dump of the effective config.
std::uint64_t config_hash(const nlohmann::json& config);

// Hex rendering used for hashes in reports ("0x" + 16 lowercase digits).
std::string hash_hex(std::uint64_t h);

// ---------------------------------------------------------------------------
// Chain scenarios: a decreasing family of descriptor sets, realized per
// resolution, with the capacity evaluated along the chain against its limit.
// ---------------------------------------------------------------------------

// Weight recipe instantiable at any resolution: a named family or an explicit
// per-point list (which then pins the usable resolution).
struct WeightSpec {
    std::string named;        // "uniform" | "triangular" | "" when explicit
    std::vector<Rat> values;  // explicit weights, must match the resolution

    WeightVector realize(std::size_t n) const;
    std::string label() const;
};

// Capacity recipe instantiable on any resolution of the ambient grid.
struct CapacitySpec {
    std::string kind = "measure";  // measure | sup-of-measures | huber | restricted
    std::vector<WeightSpec> components{WeightSpec{"uniform", {}}};
    Rat eps = rat(1, 10);     // huber
    Rat delta = rat(1, 20);   // huber
    std::shared_ptr<CapacitySpec> base;     // restricted: capacity being restricted
    std::optional<SetDescriptor> removed;   // restricted: the null set

    Capacity instantiate(SpacePtr space) const;
    std::string label() const;
};

// Parses a capacity spec document, e.g.
// {"kind": "huber", "weights": ["uniform"], "eps": [1, 10], "delta": [1, 20]}.
CapacitySpec capacity_spec_from_json(const nlohmann::json& j);

// Harmonic family: step k is the interval from 0 to 1/k with the configured
// endpoint flags; the limit is the empty set.  k_max = 0 means "auto", i.e.
// one step per grid point of the resolution being realized.  Explicit chains
// carry their own descriptor list and limit.
struct ChainSpec {
    bool harmonic = true;
    bool left_closed = false;
    bool right_closed = false;
    std::size_t k_max = 0;
    std::vector<SetDescriptor> descriptors;
    SetDescriptor limit = SetDescriptor::empty_set();

    std::size_t depth(std::size_t resolution) const;
    SetDescriptor at(std::size_t k) const;  // k is 1-based
    bool all_open() const;
};

struct ChainScenario {
    Rat a = Rat(0);
    Rat b = Rat(1);
    std::vector<std::size_t> resolutions{11, 101, 1001};
    CapacitySpec capacity;
    ChainSpec chain;
};

struct GapRow {
    std::size_t resolution = 0;
    std::size_t k = 0;  // 1-based step
    std::string descriptor;
    bool open_flagged = true;
    bool realized_empty = false;
    double v_chain = 0.0;
    double v_limit = 0.0;
    double gap = 0.0;
};

struct GapReport {
    std::vector<GapRow> rows;
    std::size_t finest_resolution = 0;
    double finest_infimum = 0.0;             // inf gap over all rows at the finest resolution
    std::optional<double> min_nonempty_gap;  // min gap over rows with nonempty realization
    bool chain_all_open = true;

    nlohmann::json to_json() const;
};

// Realizes the chain at every resolution, validates that the realized sets
// are nested (throws ScenarioInvalidError naming the offending step if not),
// and evaluates the capacity gap v(O_k) - v(limit) per row.  Rows more
// negative than -1e-12 indicate a broken capacity and are rejected the same
// way.
GapReport continuity_gap(const ChainScenario& sc);

// ---------------------------------------------------------------------------
// Scenario runners.
// ---------------------------------------------------------------------------

struct ScenarioOutcome {
    int exit_code = 0;  // 0 = pass, 1 = scenario assertion failed
    bool pass = true;
    nlohmann::json report;
    std::vector<std::string> files;  // names written under out_dir
    std::string summary;             // human-readable lines for the CLI
};

// Runs one scenario end to end: merge config onto defaults, validate, compute,
// write <kind>_report.json (and CSV row tables when format == "csv") under
// out_dir, and return the outcome.  `user_config` may be null to run the
// defaults.  `seed_override` (the CLI flag) wins over the config seed.
// Throws ScenarioInvalidError for bad kind/config/format and propagates
// library errors; scenario assertion failures are reported via exit_code 1,
// not exceptions.
ScenarioOutcome run_scenario(const std::string& kind, const nlohmann::json& user_config,
                             const std::string& out_dir, const std::string& format,
                             std::optional<std::uint64_t> seed_override);

}  // namespace caplab
