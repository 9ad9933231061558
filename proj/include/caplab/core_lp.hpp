#pragma once

#include "caplab/capacity.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace caplab {

// Constraint-level tolerance for core decisions; looser than the value
// tolerance because greedy marginals accumulate up to n subtractions.
inline constexpr double kCoreTolerance = 1e-9;

// Ground-size cap for core_nonempty: 2^12 = 4096 constraint sets.
inline constexpr std::size_t kCoreDenseLimit = 12;

struct MembershipOptions {
    std::optional<bool> exhaustive;  // default: exhaustive iff n <= 20
    std::uint64_t seed = 0;
    std::uint64_t trials = 200'000;
    double tolerance = 1e-12;
};

struct MembershipResult {
    bool member = false;
    double worst_slack = 0.0;  // min over checked A of v(A) - nu(A)
    std::optional<SubsetMask> violating;
    std::string mode;
    std::uint64_t checked = 0;
};

// Is nu dominated by v on every (checked) set?
MembershipResult core_membership(const Capacity& v, const WeightVector& nu,
                                 const MembershipOptions& opts = {});

// Marginal vector of v along a chain: nu[ordering[k]] = v(first k+1) - v(first k).
WeightVector greedy_chain_measure(const Capacity& v, std::span<const std::size_t> ordering);

struct CoreQueryResult {
    bool nonempty = false;
    // Optimal cost of a fractional set cover weighted by v; the core is
    // nonempty exactly when no cover is cheaper than 1.
    double cover_cost = 0.0;
    std::optional<WeightVector> witness;
    bool witness_verified = false;
    double witness_worst_slack = 0.0;
    std::vector<SubsetMask> binding;  // sets with |witness(A) - v(A)| <= 1e-9
    // Cheap cover certificate when the core is empty: (set, weight) pairs.
    std::vector<std::pair<SubsetMask, double>> cover;
    std::uint64_t iterations = 0;
    std::string note;

    nlohmann::json to_json() const;
};

// Decides emptiness of {nu >= 0, nu(X) = 1, nu(A) <= v(A) for all A}.
// Two-alternating capacities take the greedy fast path; everything else is
// settled by an exact fractional-cover optimization over all 2^n - 1 sets.
CoreQueryResult core_nonempty(const Capacity& v);

// v(A) - nu_A(A) for the greedy measure nu_A listing A's points first;
// <= 1e-9 for two-alternating capacities, >= -1e-9 always.
double core_exactness_gap(const Capacity& v, const SubsetMask& a);

}  // namespace caplab
