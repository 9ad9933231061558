#pragma once

#include "caplab/axioms.hpp"
#include "caplab/capacity.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace caplab {

// Branch-and-bound cap on conflict-graph vertices and oracle cap on points.
inline constexpr std::size_t kExactSearchVertexCap = 30;
inline constexpr std::size_t kOracleCap = 15;

// One keep/remove problem: find K minimizing v(X \ K) such that u varies by
// at most eta across kept pairs closer than scale. On a finite space every
// function is continuous, so the (eta, scale) modulus is what gives the
// continuity constraint content; both knobs are explicit instance data and
// are echoed into every report.
struct LusinInstance {
    Capacity capacity;      // carries the space
    std::vector<double> u;  // one value per point
    double eta = 0.0;       // oscillation bound; negative values allowed (then
                            // every near pair conflicts, even at equal u)
    Rat scale;              // pairs strictly closer than this are constrained

    const FiniteMetricSpace& space() const { return *capacity.space(); }
    void validate() const;
};

struct ConflictGraph {
    // Unordered conflicting pairs (x < y), lexicographically sorted.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    // Endpoints of at least one edge, ascending.
    std::vector<std::size_t> vertices;
};

// All pairs with d(x, y) < scale (exact comparison) and |u(x) - u(y)| > eta.
ConflictGraph conflict_pairs(const LusinInstance& instance);

// Does `kept` avoid every conflict pair? Recomputed from scratch.
bool conflict_free(const LusinInstance& instance, const SubsetMask& kept);

struct LusinResult {
    SubsetMask kept;     // K
    SubsetMask removed;  // X \ K
    double value = 0.0;  // v(X \ K)
    std::string method;  // exact | greedy | constructive | oracle
    bool optimal = false;
    std::uint64_t nodes = 0;  // search nodes / scanned masks

    nlohmann::json to_json() const;
};

// Minimal-capacity removal via branch-and-bound over vertex covers of the
// conflict graph. Non-conflict points are always kept (v is monotone, so
// removing them cannot help), and equal-value optima are resolved toward
// the removed mask with the smallest numeric value.
LusinResult exact_min_removal(const LusinInstance& instance);

// Heuristic cover: repeatedly remove the vertex with the smallest capacity
// increment per still-uncovered incident edge.
LusinResult greedy_removal(const LusinInstance& instance);

// Independent full enumeration of all 2^n keep-sets (n <= 15), same
// tie-break as exact_min_removal. Exists to validate the search.
LusinResult brute_force_oracle(const LusinInstance& instance);

// u_n(x) = floor(u(x) * levels) / levels.
std::vector<double> quantize_function(std::span<const double> u, std::size_t levels);

// Partition of the ground set by exact u-value, cells ordered by first
// occurrence; the canonical partition input for constructive_simple.
std::vector<SubsetMask> level_cells(std::span<const double> u, std::size_t n);

struct CellRecord {
    std::size_t index = 0;  // 1-based position in the partition
    SubsetMask cell;
    double budget = 0.0;
    bool achieved = false;
    Rat delta;
    double band_value = 0.0;
};

struct ConstructiveResult {
    LusinResult result;
    std::vector<CellRecord> cells;
    double tail_value = 0.0;  // v(union of outers \ K), must be <= eps/2
    // Modulus certified by the construction: K is conflict-free for any
    // eta >= separation_eta and any scale <= separation_scale.
    double separation_eta = 0.0;
    std::optional<Rat> separation_scale;

    nlohmann::json to_json() const;
};

// The simple-function route: per-cell regularity probes with budgets
// eps * 2^-(j+2) (j = 1-based cell index), kept set K = union of the inner
// sandwich sets. Throws ConstructionInfeasibleError naming the first cell
// whose probe misses its budget, or the tail check (index N+1) when the
// leftover band exceeds eps/2.
ConstructiveResult constructive_simple(const LusinInstance& instance,
                                       const std::vector<SubsetMask>& partition,
                                       double eps_budget, std::span<const Rat> schedule);

}  // namespace caplab
