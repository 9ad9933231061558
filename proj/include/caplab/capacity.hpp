#pragma once

#include "caplab/finite_space.hpp"
#include "caplab/rational.hpp"
#include "caplab/subset_mask.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace caplab {

// Probability weights over the points of a space. The double vector is the
// working representation; when the weights were given as rationals the exact
// values ride along so saturation comparisons can be decided exactly.
struct WeightVector {
    std::vector<double> w;
    std::vector<Rat> exact;  // empty, or one rational per weight

    static WeightVector from_doubles(std::vector<double> weights);
    static WeightVector from_rationals(const std::vector<Rat>& weights);

    std::size_t size() const { return w.size(); }
    bool has_exact() const { return !exact.empty(); }

    // Sum of member weights in ascending index order.
    double mass(const SubsetMask& a) const;
    Rat exact_mass(const SubsetMask& a) const;  // requires has_exact()
};

WeightVector uniform_weights(std::size_t n);
// Symmetric triangular profile min(i+1, n-i) / total.
WeightVector triangular_weights(std::size_t n);

enum class CapacityKind { measure, sup_of_measures, huber, restricted, dense, custom };

std::string kind_name(CapacityKind k);

// Normalized set function on the subsets of a finite space, wrapped behind
// a pure evaluator. Construction asserts v(empty) = 0 and v(X) = 1 exactly
// on the two extreme masks; nothing in between is checked here, so broken
// monotonicity can still be built and handed to the property checkers
// (fully adversarial tables bypass Capacity and go in as DenseSetFunction).
class Capacity {
public:
    Capacity(SpacePtr space, CapacityKind kind, std::string name,
             std::function<double(const SubsetMask&)> eval,
             std::map<std::string, std::string> params = {});

    double operator()(const SubsetMask& a) const;
    const SpacePtr& space() const { return space_; }
    std::size_t ground_size() const { return space_->size(); }
    CapacityKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const std::map<std::string, std::string>& params() const { return params_; }

private:
    SpacePtr space_;
    CapacityKind kind_;
    std::string name_;
    std::function<double(const SubsetMask&)> eval_;
    std::map<std::string, std::string> params_;
};

// v(A) = sum of weights over A.
Capacity measure_from_weights(SpacePtr space, WeightVector weights, std::string name = "measure");

// v(A) = max_j mu_j(A). One component reproduces the plain measure values.
Capacity sup_of_measures(SpacePtr space, std::vector<WeightVector> components,
                         std::string name = "sup");

// v(A) = min(mu(closed delta-neighborhood of A) + eps, 1) for nonempty A.
// Requires 0 <= eps < 1 and delta > 0; eps = 0 degenerates to the
// neighborhood-smeared measure. When mu carries exact rationals the
// saturation test against 1 is decided in exact arithmetic.
Capacity huber_contamination(SpacePtr space, WeightVector mu, const Rat& eps, const Rat& delta,
                             std::string name = "huber");

// v~(A) = v(A \ o) / v(X \ o). Throws DegenerateRestrictionError when the
// denominator vanishes.
Capacity restrict_normalize(const Capacity& v, const SubsetMask& o);

// Set function given by an explicit table indexed by bit mask (n <= 20).
// Must be normalized like any Capacity; monotonicity is not required.
Capacity capacity_from_table(SpacePtr space, std::vector<double> table, std::string name = "dense");

// Dense cap keeping 2^n tables and subset convolutions affordable.
inline constexpr std::size_t kMaxDensePoints = 20;

struct DenseSetFunction {
    std::size_t n = 0;
    std::vector<double> table;  // 2^n entries, indexed by bit mask

    double at(std::uint32_t mask) const { return table[mask]; }
    std::uint32_t full_mask() const { return static_cast<std::uint32_t>((1u << n) - 1); }
};

// Materializes all 2^n values of v; SizeCapError above kMaxDensePoints.
DenseSetFunction dense_table(const Capacity& v);

// Moebius inversion: m(A) = sum over B subset of A of (-1)^{|A\B|} f(B).
std::vector<double> mobius_transform(const DenseSetFunction& f);

// Zeta transform, the inverse direction: f(A) = sum over B subset of A of m(B).
DenseSetFunction from_mobius(std::size_t n, const std::vector<double>& mobius);

// Choquet integral of u against v via the layer-cake sum over the sorted
// distinct levels of u. Handles negative values by shifting.
double choquet_integral(const Capacity& v, std::span<const double> u);

}  // namespace caplab
