#include "caplab/finite_space.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace caplab {

FiniteMetricSpace::FiniteMetricSpace(std::vector<Rat> coords, std::optional<Rat> step,
                                     std::string label)
    : coords_(std::move(coords)), step_(std::move(step)), label_(std::move(label)) {}

FiniteMetricSpace FiniteMetricSpace::interval_grid(std::size_t resolution, const Rat& a,
                                                   const Rat& b) {
    if (resolution < 2) throw std::invalid_argument("interval_grid: resolution must be >= 2");
    if (resolution > kMaxSpacePoints) throw std::invalid_argument("interval_grid: resolution above point cap");
    if (!(a < b)) throw std::invalid_argument("interval_grid: requires a < b");
    const Rat h = (b - a) / Rat(static_cast<std::int64_t>(resolution - 1));
    std::vector<Rat> coords;
    coords.reserve(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        coords.push_back(a + Rat(static_cast<std::int64_t>(i)) * h);
    }
    std::string label = "grid[" + caplab::to_string(a) + "," + caplab::to_string(b) + "]x" +
                        std::to_string(resolution);
    return FiniteMetricSpace(std::move(coords), h, std::move(label));
}

FiniteMetricSpace FiniteMetricSpace::from_points(std::vector<Rat> coords, std::string label) {
    if (coords.empty()) throw std::invalid_argument("from_points: no points");
    if (coords.size() > kMaxSpacePoints) throw std::invalid_argument("from_points: above point cap");
    std::set<Rat> distinct(coords.begin(), coords.end());
    if (distinct.size() != coords.size()) {
        throw std::invalid_argument("from_points: duplicate coordinates break the metric");
    }
    return FiniteMetricSpace(std::move(coords), std::nullopt, std::move(label));
}

Rat FiniteMetricSpace::distance(std::size_t i, std::size_t j) const {
    const Rat& x = coords_.at(i);
    const Rat& y = coords_.at(j);
    return x < y ? y - x : x - y;
}

const Rat& FiniteMetricSpace::step() const {
    if (!step_) throw std::logic_error("step(): not a uniform grid");
    return *step_;
}

Rat FiniteMetricSpace::min_coord() const {
    return *std::min_element(coords_.begin(), coords_.end());
}

Rat FiniteMetricSpace::max_coord() const {
    return *std::max_element(coords_.begin(), coords_.end());
}

Rat FiniteMetricSpace::min_positive_distance() const {
    if (coords_.size() < 2) throw std::logic_error("min_positive_distance: needs >= 2 points");
    std::vector<Rat> sorted = coords_;
    std::sort(sorted.begin(), sorted.end());
    Rat best = sorted[1] - sorted[0];
    for (std::size_t i = 2; i < sorted.size(); ++i) {
        const Rat gap = sorted[i] - sorted[i - 1];
        if (gap < best) best = gap;
    }
    return best;
}

namespace {

void check_same_universe(const FiniteMetricSpace& space, const SubsetMask& a, const char* op) {
    if (a.universe_size() != space.size()) {
        throw std::invalid_argument(std::string(op) + ": mask universe does not match space");
    }
}

// Number of grid steps k such that k*h compares to delta as requested.
std::size_t grid_radius(const Rat& h, const Rat& delta, bool strict) {
    const Rat q = delta / h;
    std::int64_t r = floor_nonneg(q);
    if (strict && Rat(r) == q) r -= 1;  // k*h < delta excludes the exact multiple
    if (r < 0) return 0;
    return static_cast<std::size_t>(r);
}

SubsetMask neighborhood_generic(const FiniteMetricSpace& space, const SubsetMask& a,
                                const Rat& delta, bool strict) {
    const std::size_t n = space.size();
    SubsetMask out(n);
    const auto members = a.indices();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y : members) {
            const Rat d = space.distance(x, y);
            if (strict ? d < delta : d <= delta) {
                out.set(x);
                break;
            }
        }
    }
    return out;
}

}  // namespace

SubsetMask open_neighborhood(const FiniteMetricSpace& space, const SubsetMask& a,
                             const Rat& delta) {
    check_same_universe(space, a, "open_neighborhood");
    if (!(delta > Rat(0))) throw std::invalid_argument("open_neighborhood: delta must be > 0");
    if (a.none()) return SubsetMask(space.size());
    if (space.is_uniform_grid()) {
        return a.dilate(grid_radius(space.step(), delta, /*strict=*/true));
    }
    return neighborhood_generic(space, a, delta, /*strict=*/true);
}

SubsetMask closed_neighborhood(const FiniteMetricSpace& space, const SubsetMask& a,
                               const Rat& delta) {
    check_same_universe(space, a, "closed_neighborhood");
    if (delta < Rat(0)) throw std::invalid_argument("closed_neighborhood: delta must be >= 0");
    if (a.none()) return SubsetMask(space.size());
    if (space.is_uniform_grid()) {
        return a.dilate(grid_radius(space.step(), delta, /*strict=*/false));
    }
    return neighborhood_generic(space, a, delta, /*strict=*/false);
}

SubsetMask delta_shrink(const FiniteMetricSpace& space, const SubsetMask& a, const Rat& delta) {
    check_same_universe(space, a, "delta_shrink");
    if (delta < Rat(0)) throw std::invalid_argument("delta_shrink: delta must be >= 0");
    // Deliberately evaluated from the definition, point by point, so the
    // closed-neighborhood duality can be cross-checked through separate code.
    const auto outside = a.complement().indices();
    SubsetMask out(space.size());
    a.for_each([&](std::size_t x) {
        for (std::size_t y : outside) {
            if (space.distance(x, y) <= delta) return;
        }
        out.set(x);
    });
    return out;
}

SetDescriptor SetDescriptor::whole() {
    SetDescriptor d;
    d.kind = Kind::whole_space;
    return d;
}

SetDescriptor SetDescriptor::empty_set() {
    SetDescriptor d;
    d.kind = Kind::empty;
    return d;
}

SetDescriptor SetDescriptor::interval(const Rat& lo, const Rat& hi, bool closed_lo,
                                      bool closed_hi) {
    SetDescriptor d;
    d.kind = Kind::intervals;
    d.intervals.push_back(IntervalSpec{lo, hi, closed_lo, closed_hi});
    return d;
}

SetDescriptor SetDescriptor::from_indices(std::vector<std::size_t> idx) {
    SetDescriptor d;
    d.kind = Kind::mask;
    d.indices = std::move(idx);
    return d;
}

bool SetDescriptor::open_flagged() const {
    switch (kind) {
        case Kind::whole_space:
        case Kind::empty:
            return true;
        case Kind::mask:
            return false;
        case Kind::intervals:
            for (const auto& iv : intervals) {
                if (iv.closed_lo || iv.closed_hi) return false;
            }
            return true;
    }
    return false;
}

std::string SetDescriptor::to_text() const {
    switch (kind) {
        case Kind::whole_space:
            return "X";
        case Kind::empty:
            return "{}";
        case Kind::mask: {
            std::string s = "points{";
            for (std::size_t i = 0; i < indices.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(indices[i]);
            }
            return s + "}";
        }
        case Kind::intervals: {
            std::string s;
            for (std::size_t i = 0; i < intervals.size(); ++i) {
                const auto& iv = intervals[i];
                if (i) s += " U ";
                s += iv.closed_lo ? "[" : "(";
                s += caplab::to_string(iv.lo) + "," + caplab::to_string(iv.hi);
                s += iv.closed_hi ? "]" : ")";
            }
            return s;
        }
    }
    return "?";
}

SubsetMask realize_descriptor(const FiniteMetricSpace& space, const SetDescriptor& d) {
    const std::size_t n = space.size();
    switch (d.kind) {
        case SetDescriptor::Kind::whole_space:
            return SubsetMask::full_set(n);
        case SetDescriptor::Kind::empty:
            return SubsetMask(n);
        case SetDescriptor::Kind::mask:
            return SubsetMask::from_indices(n, d.indices);
        case SetDescriptor::Kind::intervals: {
            const Rat lo_bound = space.min_coord();
            const Rat hi_bound = space.max_coord();
            SubsetMask out(n);
            for (const auto& iv : d.intervals) {
                if (iv.hi < iv.lo) throw std::invalid_argument("descriptor interval: hi < lo");
                if (iv.lo < lo_bound || iv.hi > hi_bound) {
                    throw std::invalid_argument("descriptor interval: endpoint outside space range");
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Rat& c = space.coord(i);
                    const bool lo_ok = iv.closed_lo ? c >= iv.lo : c > iv.lo;
                    const bool hi_ok = iv.closed_hi ? c <= iv.hi : c < iv.hi;
                    if (lo_ok && hi_ok) out.set(i);
                }
            }
            return out;
        }
    }
    throw std::invalid_argument("descriptor: unknown kind");
}

}  // namespace caplab
