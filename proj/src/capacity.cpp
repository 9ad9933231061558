#include "caplab/capacity.hpp"

#include "caplab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caplab {

namespace {
constexpr double kWeightSumTolerance = 1e-12;
}

WeightVector WeightVector::from_doubles(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("weights: empty vector");
    double sum = 0.0;
    for (double x : weights) {
        if (!(x >= 0.0)) throw std::invalid_argument("weights: negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw std::invalid_argument("weights: sum differs from 1 beyond 1e-12");
    }
    WeightVector v;
    v.w = std::move(weights);
    return v;
}

WeightVector WeightVector::from_rationals(const std::vector<Rat>& weights) {
    if (weights.empty()) throw std::invalid_argument("weights: empty vector");
    Rat sum(0);
    for (const Rat& x : weights) {
        if (x < Rat(0)) throw std::invalid_argument("weights: negative entry");
        sum += x;
    }
    if (sum != Rat(1)) throw std::invalid_argument("weights: rationals must sum to exactly 1");
    WeightVector v;
    v.exact = weights;
    v.w.reserve(weights.size());
    for (const Rat& x : weights) v.w.push_back(to_double(x));
    return v;
}

double WeightVector::mass(const SubsetMask& a) const {
    double s = 0.0;
    a.for_each([&](std::size_t i) { s += w[i]; });
    return s;
}

Rat WeightVector::exact_mass(const SubsetMask& a) const {
    if (!has_exact()) throw std::logic_error("exact_mass: no exact weights stored");
    Rat s(0);
    a.for_each([&](std::size_t i) { s += exact[i]; });
    return s;
}

WeightVector uniform_weights(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_weights: n must be >= 1");
    std::vector<Rat> r(n, Rat(1, static_cast<std::int64_t>(n)));
    return WeightVector::from_rationals(r);
}

WeightVector triangular_weights(std::size_t n) {
    if (n == 0) throw std::invalid_argument("triangular_weights: n must be >= 1");
    std::vector<std::int64_t> raw(n);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = static_cast<std::int64_t>(std::min(i + 1, n - i));
        total += raw[i];
    }
    std::vector<Rat> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = Rat(raw[i], total);
    return WeightVector::from_rationals(r);
}

std::string kind_name(CapacityKind k) {
    switch (k) {
        case CapacityKind::measure: return "measure";
        case CapacityKind::sup_of_measures: return "sup-of-measures";
        case CapacityKind::huber: return "huber";
        case CapacityKind::restricted: return "restricted";
        case CapacityKind::dense: return "dense";
        case CapacityKind::custom: return "custom";
    }
    return "?";
}

Capacity::Capacity(SpacePtr space, CapacityKind kind, std::string name,
                   std::function<double(const SubsetMask&)> eval,
                   std::map<std::string, std::string> params)
    : space_(std::move(space)),
      kind_(kind),
      name_(std::move(name)),
      eval_(std::move(eval)),
      params_(std::move(params)) {
    if (!space_) throw std::invalid_argument("capacity: null space");
    if (!eval_) throw std::invalid_argument("capacity: null evaluator");
    // Grounding and normalization are the one pair of axioms every Capacity
    // carries by construction; they must hold exactly, not within tolerance.
    if (eval_(SubsetMask(space_->size())) != 0.0) {
        throw std::invalid_argument("capacity: evaluator(empty) != 0");
    }
    if (eval_(SubsetMask::full_set(space_->size())) != 1.0) {
        throw std::invalid_argument("capacity: evaluator(X) != 1");
    }
}

double Capacity::operator()(const SubsetMask& a) const {
    if (a.universe_size() != space_->size()) {
        throw std::invalid_argument("capacity: mask universe does not match space");
    }
    return eval_(a);
}

namespace {

void check_weight_count(const FiniteMetricSpace& space, const WeightVector& w, const char* who) {
    if (w.size() != space.size()) {
        throw std::invalid_argument(std::string(who) + ": weight count does not match space size");
    }
}

}  // namespace

Capacity measure_from_weights(SpacePtr space, WeightVector weights, std::string name) {
    if (!space) throw std::invalid_argument("measure_from_weights: null space");
    check_weight_count(*space, weights, "measure_from_weights");
    auto eval = [weights](const SubsetMask& a) -> double {
        if (a.none()) return 0.0;
        if (a.is_full()) return 1.0;  // normalization holds exactly, not to rounding
        return weights.mass(a);
    };
    return Capacity(std::move(space), CapacityKind::measure, std::move(name), std::move(eval));
}

Capacity sup_of_measures(SpacePtr space, std::vector<WeightVector> components, std::string name) {
    if (!space) throw std::invalid_argument("sup_of_measures: null space");
    if (components.empty()) throw std::invalid_argument("sup_of_measures: needs >= 1 component");
    for (const auto& c : components) check_weight_count(*space, c, "sup_of_measures");
    std::map<std::string, std::string> params{{"components", std::to_string(components.size())}};
    auto eval = [components](const SubsetMask& a) -> double {
        if (a.none()) return 0.0;
        if (a.is_full()) return 1.0;
        double best = 0.0;
        for (const auto& c : components) best = std::max(best, c.mass(a));
        return best;
    };
    return Capacity(std::move(space), CapacityKind::sup_of_measures, std::move(name),
                    std::move(eval), std::move(params));
}

Capacity huber_contamination(SpacePtr space, WeightVector mu, const Rat& eps, const Rat& delta,
                             std::string name) {
    if (!space) throw std::invalid_argument("huber_contamination: null space");
    check_weight_count(*space, mu, "huber_contamination");
    // eps = 0 degenerates to the neighborhood-smeared measure; still a valid capacity.
    if (eps < Rat(0) || eps >= Rat(1)) {
        throw std::invalid_argument("huber_contamination: eps must lie in [0, 1)");
    }
    if (!(delta > Rat(0))) throw std::invalid_argument("huber_contamination: delta must be > 0");
    std::map<std::string, std::string> params{
        {"eps", caplab::to_string(eps)},
        {"delta", caplab::to_string(delta)},
        {"extension", "total: defined on every subset, empty set pinned to 0"}};
    const double eps_d = to_double(eps);
    SpacePtr sp = space;
    auto eval = [sp, mu, eps, eps_d, delta](const SubsetMask& a) -> double {
        if (a.none()) return 0.0;
        if (a.is_full()) return 1.0;
        const SubsetMask nb = closed_neighborhood(*sp, a, delta);
        if (mu.has_exact()) {
            const Rat v = mu.exact_mass(nb) + eps;
            return v >= Rat(1) ? 1.0 : to_double(v);
        }
        return std::min(mu.mass(nb) + eps_d, 1.0);
    };
    return Capacity(std::move(space), CapacityKind::huber, std::move(name), std::move(eval),
                    std::move(params));
}

Capacity restrict_normalize(const Capacity& v, const SubsetMask& o) {
    if (o.universe_size() != v.ground_size()) {
        throw std::invalid_argument("restrict_normalize: mask universe does not match space");
    }
    const SubsetMask rest = o.complement();
    const double denom = v(rest);
    if (denom == 0.0) {
        throw DegenerateRestrictionError("restrict_normalize: v(X \\ O) = 0");
    }
    std::map<std::string, std::string> params{{"removed", o.to_hex()},
                                              {"base", v.name()}};
    auto eval = [v, o, denom](const SubsetMask& a) -> double { return v(a.minus(o)) / denom; };
    return Capacity(v.space(), CapacityKind::restricted, v.name() + "-restricted",
                    std::move(eval), std::move(params));
}

Capacity capacity_from_table(SpacePtr space, std::vector<double> table, std::string name) {
    if (!space) throw std::invalid_argument("capacity_from_table: null space");
    const std::size_t n = space->size();
    if (n > kMaxDensePoints) throw std::invalid_argument("capacity_from_table: space above dense cap");
    if (table.size() != (std::size_t(1) << n)) {
        throw std::invalid_argument("capacity_from_table: table size is not 2^n");
    }
    for (double x : table) {
        if (!std::isfinite(x)) throw std::invalid_argument("capacity_from_table: non-finite entry");
    }
    auto eval = [table](const SubsetMask& a) -> double {
        return table[static_cast<std::size_t>(a.low_bits())];
    };
    return Capacity(std::move(space), CapacityKind::dense, std::move(name), std::move(eval));
}

DenseSetFunction dense_table(const Capacity& v) {
    const std::size_t n = v.ground_size();
    if (n > kMaxDensePoints) {
        throw SizeCapError("dense_table: ground set above " + std::to_string(kMaxDensePoints) +
                           " points");
    }
    DenseSetFunction f;
    f.n = n;
    f.table.resize(std::size_t(1) << n);
    SubsetMask scratch(n);
    for (std::size_t m = 0; m < f.table.size(); ++m) {
        scratch.assign_bits(m);
        f.table[m] = v(scratch);
    }
    return f;
}

std::vector<double> mobius_transform(const DenseSetFunction& f) {
    if (f.n > kMaxDensePoints) throw SizeCapError("mobius_transform: above dense cap");
    if (f.table.size() != (std::size_t(1) << f.n)) {
        throw std::invalid_argument("mobius_transform: table size is not 2^n");
    }
    std::vector<double> t = f.table;
    for (std::size_t i = 0; i < f.n; ++i) {
        const std::size_t bit = std::size_t(1) << i;
        for (std::size_t m = 0; m < t.size(); ++m) {
            if (m & bit) t[m] -= t[m ^ bit];
        }
    }
    return t;
}

DenseSetFunction from_mobius(std::size_t n, const std::vector<double>& mobius) {
    if (n > kMaxDensePoints) throw SizeCapError("from_mobius: above dense cap");
    if (mobius.size() != (std::size_t(1) << n)) {
        throw std::invalid_argument("from_mobius: table size is not 2^n");
    }
    DenseSetFunction f;
    f.n = n;
    f.table = mobius;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bit = std::size_t(1) << i;
        for (std::size_t m = 0; m < f.table.size(); ++m) {
            if (m & bit) f.table[m] += f.table[m ^ bit];
        }
    }
    return f;
}

double choquet_integral(const Capacity& v, std::span<const double> u) {
    const std::size_t n = v.ground_size();
    if (u.size() != n) throw std::invalid_argument("choquet_integral: u size does not match space");
    for (double x : u) {
        if (!std::isfinite(x)) throw std::invalid_argument("choquet_integral: non-finite value");
    }
    const double mn = *std::min_element(u.begin(), u.end());
    std::vector<double> levels(u.begin(), u.end());
    for (double& x : levels) x -= mn;
    std::vector<double> sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    double integral = mn;  // mn * v(X), and v(X) = 1
    double prev = 0.0;
    for (double t : sorted) {
        if (t <= 0.0) continue;
        SubsetMask level(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (levels[i] >= t) level.set(i);
        }
        integral += (t - prev) * v(level);
        prev = t;
    }
    return integral;
}

}  // namespace caplab
