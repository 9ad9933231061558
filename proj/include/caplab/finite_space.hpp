#pragma once

#include "caplab/rational.hpp"
#include "caplab/subset_mask.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace caplab {

// Hard cap on the number of points in any space; keeps every mask/table
// operation comfortably in memory and every probe sub-second.
inline constexpr std::size_t kMaxSpacePoints = 4096;

// Finite 1-D metric space with exact rational coordinates; the metric is
// |x - y|. A uniform-grid flag unlocks index-arithmetic fast paths for
// neighborhood operators, but every answer agrees with the generic route.
class FiniteMetricSpace {
public:
    // `resolution` evenly spaced points covering [a, b] inclusive.
    static FiniteMetricSpace interval_grid(std::size_t resolution, const Rat& a, const Rat& b);
    static FiniteMetricSpace from_points(std::vector<Rat> coords, std::string label = "points");

    std::size_t size() const { return coords_.size(); }
    const Rat& coord(std::size_t i) const { return coords_.at(i); }
    const std::vector<Rat>& coords() const { return coords_; }
    Rat distance(std::size_t i, std::size_t j) const;

    bool is_uniform_grid() const { return step_.has_value(); }
    // Grid spacing; only valid when is_uniform_grid().
    const Rat& step() const;
    const std::string& label() const { return label_; }

    Rat min_coord() const;
    Rat max_coord() const;
    // Smallest nonzero pairwise distance; the scale below which any two
    // distinct points are "far". Requires size() >= 2.
    Rat min_positive_distance() const;

private:
    FiniteMetricSpace(std::vector<Rat> coords, std::optional<Rat> step, std::string label);
    std::vector<Rat> coords_;
    std::optional<Rat> step_;
    std::string label_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

// Declarative subset of a space: a union of rational intervals with per-end
// open/closed flags, an explicit mask, the whole space, or the empty set.
struct IntervalSpec {
    Rat lo;
    Rat hi;
    bool closed_lo = true;
    bool closed_hi = true;
};

struct SetDescriptor {
    enum class Kind { intervals, mask, whole_space, empty };

    Kind kind = Kind::empty;
    std::vector<IntervalSpec> intervals;  // kind == intervals
    std::vector<std::size_t> indices;     // kind == mask

    static SetDescriptor whole();
    static SetDescriptor empty_set();
    static SetDescriptor interval(const Rat& lo, const Rat& hi, bool closed_lo, bool closed_hi);
    static SetDescriptor from_indices(std::vector<std::size_t> idx);

    // True when the descriptor denotes a set that is open in the ambient
    // interval topology (all-open intervals, the whole space, or empty).
    bool open_flagged() const;
    std::string to_text() const;
};

// Points within strict distance delta of A; empty A maps to the empty set.
SubsetMask open_neighborhood(const FiniteMetricSpace& space, const SubsetMask& a, const Rat& delta);

// Points within distance <= delta of A.
SubsetMask closed_neighborhood(const FiniteMetricSpace& space, const SubsetMask& a, const Rat& delta);

// Points of A at strict distance > delta from the complement of A.
SubsetMask delta_shrink(const FiniteMetricSpace& space, const SubsetMask& a, const Rat& delta);

// Trace of the described set on the space's points, via exact comparisons.
SubsetMask realize_descriptor(const FiniteMetricSpace& space, const SetDescriptor& d);

}  // namespace caplab
