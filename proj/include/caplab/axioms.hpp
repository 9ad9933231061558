#pragma once

#include "caplab/capacity.hpp"
#include "caplab/finite_space.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace caplab {

// Comparison slack for double-valued set-function inequalities.
inline constexpr double kValueTolerance = 1e-12;

// Pair checks walk all 4^n ordered pairs up to this ground size and fall
// back to seeded sampling beyond it; monotonicity walks 3^n subset pairs
// up to its own (larger) limit.
inline constexpr std::size_t kExhaustivePairLimit = 10;
inline constexpr std::size_t kExhaustiveMonotoneLimit = 12;

struct WitnessSet {
    std::string role;  // "A", "B", "union", "intersection", "empty", "whole"
    SubsetMask mask;
    double value = 0.0;
};

struct ViolationWitness {
    std::vector<WitnessSet> sets;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct PropertyReport {
    std::string property;  // normalized | monotone | subadditive | two-alternating
    bool holds = true;
    std::string mode;  // "exhaustive" or "sampled"
    std::uint64_t checked = 0;
    std::uint64_t seed = 0;  // sampled mode only
    std::optional<ViolationWitness> witness;
    std::string note;

    nlohmann::json to_json() const;
};

struct CheckOptions {
    std::optional<bool> exhaustive;  // force a mode; default decided by ground size
    std::uint64_t seed = 0;
    std::uint64_t trials = 1'000'000;
};

// Exact normalization (table[empty] == 0, table[full] == 1) followed by
// monotonicity within kValueTolerance over all subset pairs (or samples).
// Continuity along monotone sequences is vacuous on a finite ground set;
// the report notes that and defers to the chain scenarios.
PropertyReport check_capacity_axioms(const DenseSetFunction& f, const CheckOptions& opts = {});

// v(A | B) <= v(A) + v(B) + tol over pairs of masks.
PropertyReport check_subadditive(const DenseSetFunction& f, const CheckOptions& opts = {});

// v(A | B) + v(A & B) <= v(A) + v(B) + tol over pairs of masks.
PropertyReport check_two_alternating(const DenseSetFunction& f, const CheckOptions& opts = {});

struct RegularityProbeResult {
    SubsetMask probed;
    double eps = 0.0;
    bool achieved = false;
    Rat delta;               // achieving delta, or the best-band delta on failure
    SubsetMask inner;        // delta_shrink(A, delta)
    SubsetMask outer;        // open_neighborhood(A, delta)
    double band_value = 0.0; // v(outer \ inner)
    std::vector<std::pair<Rat, double>> trace;  // (delta, band value) as probed

    nlohmann::json to_json() const;
};

// Walks the shrink schedule (strictly decreasing, all positive) and stops at
// the first delta whose sandwich band O \ F has capacity <= eps. On failure
// the reported delta/masks belong to the smallest band seen.
RegularityProbeResult regularity_probe(const Capacity& v, const SubsetMask& a, double eps,
                                       std::span<const Rat> schedule);

}  // namespace caplab
