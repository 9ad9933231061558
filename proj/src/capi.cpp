#include "caplab/caplab.h"

#include "caplab/axioms.hpp"
#include "caplab/capacity.hpp"
#include "caplab/core_lp.hpp"
#include "caplab/errors.hpp"
#include "caplab/finite_space.hpp"
#include "caplab/lusin.hpp"
#include "caplab/scenario.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

struct caplab_space {
    caplab::SpacePtr ptr;
};

struct caplab_capacity {
    caplab::Capacity value;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

caplab_status fail(caplab_status status, const char* what) {
    g_last_error = what ? what : "";
    return status;
}

// Runs the body and maps the library's exception taxonomy onto status codes.
template <typename F>
caplab_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return CAPLAB_OK;
    } catch (const caplab::ScenarioInvalidError& e) {
        return fail(CAPLAB_ERR_SCENARIO_INVALID, e.what());
    } catch (const caplab::SizeCapError& e) {
        return fail(CAPLAB_ERR_SIZE_CAP, e.what());
    } catch (const caplab::DegenerateRestrictionError& e) {
        return fail(CAPLAB_ERR_DEGENERATE_RESTRICTION, e.what());
    } catch (const caplab::ConstructionInfeasibleError& e) {
        return fail(CAPLAB_ERR_CONSTRUCTION_INFEASIBLE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(CAPLAB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc& e) {
        return fail(CAPLAB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CAPLAB_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

const char* require(const char* s, const char* what) {
    if (!s) throw std::invalid_argument(std::string(what) + " must not be null");
    return s;
}

}  // namespace

extern "C" {

const char* caplab_version(void) { return "1.0.0"; }

const char* caplab_last_error(void) { return g_last_error.c_str(); }

void caplab_string_free(char* s) { std::free(s); }

caplab_status caplab_space_grid(size_t resolution, int64_t a_num, int64_t a_den, int64_t b_num,
                                int64_t b_den, caplab_space** out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("out must not be null");
        auto space = std::make_shared<const caplab::FiniteMetricSpace>(
            caplab::FiniteMetricSpace::interval_grid(resolution, caplab::rat(a_num, a_den),
                                                     caplab::rat(b_num, b_den)));
        *out = new caplab_space{std::move(space)};
    });
}

void caplab_space_free(caplab_space* space) { delete space; }

size_t caplab_space_size(const caplab_space* space) { return space ? space->ptr->size() : 0; }

caplab_status caplab_capacity_create(const caplab_space* space, const char* spec_json,
                                     caplab_capacity** out) {
    return guarded([&] {
        if (!space) throw std::invalid_argument("space must not be null");
        require(spec_json, "spec_json");
        if (!out) throw std::invalid_argument("out must not be null");
        json spec;
        try {
            spec = json::parse(spec_json);
        } catch (const json::parse_error& e) {
            throw caplab::ScenarioInvalidError(std::string("capacity spec is not valid JSON: ") +
                                               e.what());
        }
        caplab::Capacity v = caplab::capacity_spec_from_json(spec).instantiate(space->ptr);
        *out = new caplab_capacity{std::move(v)};
    });
}

void caplab_capacity_free(caplab_capacity* capacity) { delete capacity; }

caplab_status caplab_capacity_value(const caplab_capacity* capacity, const char* mask_hex,
                                    double* out) {
    return guarded([&] {
        if (!capacity) throw std::invalid_argument("capacity must not be null");
        require(mask_hex, "mask_hex");
        if (!out) throw std::invalid_argument("out must not be null");
        const caplab::SubsetMask mask =
            caplab::SubsetMask::from_hex(capacity->value.ground_size(), mask_hex);
        *out = capacity->value(mask);
    });
}

caplab_status caplab_check_properties(const caplab_capacity* capacity, uint64_t seed,
                                      char** out_json) {
    return guarded([&] {
        if (!capacity) throw std::invalid_argument("capacity must not be null");
        if (!out_json) throw std::invalid_argument("out_json must not be null");
        const caplab::DenseSetFunction f = caplab::dense_table(capacity->value);
        caplab::CheckOptions opts;
        opts.seed = seed;
        json doc{{"axioms", caplab::check_capacity_axioms(f, opts).to_json()},
                 {"subadditive", caplab::check_subadditive(f, opts).to_json()},
                 {"two_alternating", caplab::check_two_alternating(f, opts).to_json()}};
        *out_json = dup_string(doc.dump(2));
    });
}

caplab_status caplab_core_nonempty(const caplab_capacity* capacity, char** out_json) {
    return guarded([&] {
        if (!capacity) throw std::invalid_argument("capacity must not be null");
        if (!out_json) throw std::invalid_argument("out_json must not be null");
        *out_json = dup_string(caplab::core_nonempty(capacity->value).to_json().dump(2));
    });
}

caplab_status caplab_min_removal(const caplab_capacity* capacity, const double* u, size_t u_len,
                                 double eta, int64_t scale_num, int64_t scale_den,
                                 const char* method, char** out_json) {
    return guarded([&] {
        if (!capacity) throw std::invalid_argument("capacity must not be null");
        if (!u) throw std::invalid_argument("u must not be null");
        require(method, "method");
        if (!out_json) throw std::invalid_argument("out_json must not be null");
        caplab::LusinInstance inst{capacity->value, std::vector<double>(u, u + u_len), eta,
                                   caplab::rat(scale_num, scale_den)};
        const std::string m = method;
        caplab::LusinResult res;
        if (m == "exact")
            res = caplab::exact_min_removal(inst);
        else if (m == "greedy")
            res = caplab::greedy_removal(inst);
        else if (m == "oracle")
            res = caplab::brute_force_oracle(inst);
        else
            throw std::invalid_argument("method must be 'exact', 'greedy' or 'oracle'");
        *out_json = dup_string(res.to_json().dump(2));
    });
}

caplab_status caplab_default_config(const char* kind, char** out_json) {
    return guarded([&] {
        require(kind, "kind");
        if (!out_json) throw std::invalid_argument("out_json must not be null");
        *out_json = dup_string(caplab::default_scenario_config(kind).dump(2));
    });
}

caplab_status caplab_run_scenario(const char* kind, const char* config_json, const char* out_dir,
                                  const char* format, int has_seed, uint64_t seed, int* exit_code,
                                  char** out_json) {
    return guarded([&] {
        require(kind, "kind");
        require(out_dir, "out_dir");
        require(format, "format");
        if (!exit_code) throw std::invalid_argument("exit_code must not be null");
        json cfg = nullptr;
        if (config_json) {
            try {
                cfg = json::parse(config_json);
            } catch (const json::parse_error& e) {
                throw caplab::ScenarioInvalidError(std::string("config is not valid JSON: ") +
                                                   e.what());
            }
        }
        std::optional<std::uint64_t> seed_override;
        if (has_seed) seed_override = seed;
        const caplab::ScenarioOutcome outcome =
            caplab::run_scenario(kind, cfg, out_dir, format, seed_override);
        *exit_code = outcome.exit_code;
        if (out_json) *out_json = dup_string(outcome.report.dump(2));
    });
}

}  // extern "C"
