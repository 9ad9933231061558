#include "caplab/axioms.hpp"

#include "caplab/errors.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace caplab {

namespace {

nlohmann::json witness_to_json(const ViolationWitness& w) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& s : w.sets) {
        sets.push_back({{"role", s.role}, {"mask", s.mask.to_hex()}, {"value", s.value}});
    }
    return {{"sets", sets}, {"lhs", w.lhs}, {"rhs", w.rhs}};
}

void validate_dense(const DenseSetFunction& f, const char* who) {
    if (f.n > kMaxDensePoints) throw SizeCapError(std::string(who) + ": above dense cap");
    if (f.table.size() != (std::size_t(1) << f.n)) {
        throw std::invalid_argument(std::string(who) + ": table size is not 2^n");
    }
}

}  // namespace

nlohmann::json PropertyReport::to_json() const {
    nlohmann::json j{{"property", property}, {"holds", holds},     {"mode", mode},
                     {"checked", checked},   {"seed", seed},       {"note", note}};
    j["witness"] = witness ? witness_to_json(*witness) : nlohmann::json();
    return j;
}

nlohmann::json RegularityProbeResult::to_json() const {
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& [d, val] : trace) {
        tr.push_back({{"delta", caplab::to_string(d)}, {"band_value", val}});
    }
    return {{"probed", probed.to_hex()},
            {"eps", eps},
            {"achieved", achieved},
            {"delta", caplab::to_string(delta)},
            {"inner", inner.to_hex()},
            {"outer", outer.to_hex()},
            {"band_value", band_value},
            {"trace", tr}};
}

namespace {

struct PairCondition {
    const DenseSetFunction& f;
    bool two_alternating;

    // True when (a, b) violates the inequality beyond tolerance.
    bool operator()(std::size_t a, std::size_t b) const {
        const double vu = f.table[a | b];
        const double lhs = two_alternating ? vu + f.table[a & b] : vu;
        return lhs > f.table[a] + f.table[b] + kValueTolerance;
    }
};

// Greedy witness minimization: repeatedly drop single bits from either mask
// while the violation persists, so regression logs show small witnesses.
void minimize_pair(const PairCondition& violates, std::size_t& a, std::size_t& b) {
    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        for (std::size_t i = 0; i < violates.f.n; ++i) {
            const std::size_t bit = std::size_t(1) << i;
            if ((a & bit) && violates(a ^ bit, b)) {
                a ^= bit;
                shrunk = true;
            }
        }
        for (std::size_t i = 0; i < violates.f.n; ++i) {
            const std::size_t bit = std::size_t(1) << i;
            if ((b & bit) && violates(a, b ^ bit)) {
                b ^= bit;
                shrunk = true;
            }
        }
    }
}

PropertyReport check_pairwise(const DenseSetFunction& f, const CheckOptions& opts,
                              bool two_alternating) {
    validate_dense(f, two_alternating ? "check_two_alternating" : "check_subadditive");
    const std::size_t n = f.n;
    PropertyReport rep;
    rep.property = two_alternating ? "two-alternating" : "subadditive";

    const bool exhaustive = opts.exhaustive.value_or(n <= kExhaustivePairLimit);
    rep.mode = exhaustive ? "exhaustive" : "sampled";

    const PairCondition violates{f, two_alternating};

    const auto record = [&](std::size_t a, std::size_t b) {
        minimize_pair(violates, a, b);
        ViolationWitness w;
        const std::size_t u = a | b, in = a & b;
        w.sets.push_back({"A", SubsetMask::from_bits(n, a), f.table[a]});
        w.sets.push_back({"B", SubsetMask::from_bits(n, b), f.table[b]});
        w.sets.push_back({"union", SubsetMask::from_bits(n, u), f.table[u]});
        if (two_alternating) {
            w.sets.push_back({"intersection", SubsetMask::from_bits(n, in), f.table[in]});
            w.lhs = f.table[u] + f.table[in];
        } else {
            w.lhs = f.table[u];
        }
        w.rhs = f.table[a] + f.table[b];
        rep.witness = std::move(w);
        rep.holds = false;
    };

    if (exhaustive) {
        const std::size_t count = f.table.size();
        for (std::size_t a = 0; a < count && rep.holds; ++a) {
            for (std::size_t b = 0; b < count; ++b) {
                ++rep.checked;
                if (violates(a, b)) {
                    record(a, b);
                    break;
                }
            }
        }
        return rep;
    }

    rep.seed = opts.seed;
    std::mt19937_64 rng(opts.seed);
    const std::uint64_t full = f.table.size() - 1;
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        const std::size_t a = static_cast<std::size_t>(rng() & full);
        const std::size_t b = static_cast<std::size_t>(rng() & full);
        ++rep.checked;
        if (violates(a, b)) {
            record(a, b);
            break;
        }
    }
    return rep;
}

}  // namespace

PropertyReport check_capacity_axioms(const DenseSetFunction& f, const CheckOptions& opts) {
    validate_dense(f, "check_capacity_axioms");
    const std::size_t n = f.n;
    PropertyReport rep;
    const std::string continuity_note =
        "monotone-sequence continuity is vacuous on a finite ground set; see chain scenarios";

    const double ve = f.table.front();
    const double vf = f.table.back();
    if (ve != 0.0 || vf != 1.0) {
        rep.property = "normalized";
        rep.holds = false;
        rep.mode = "exhaustive";
        rep.checked = 2;
        rep.note = continuity_note;
        ViolationWitness w;
        if (ve != 0.0) {
            w.sets.push_back({"empty", SubsetMask(n), ve});
            w.lhs = ve;
            w.rhs = 0.0;
        } else {
            w.sets.push_back({"whole", SubsetMask::full_set(n), vf});
            w.lhs = vf;
            w.rhs = 1.0;
        }
        rep.witness = std::move(w);
        return rep;
    }

    rep.property = "monotone";
    rep.note = "normalization holds exactly; " + continuity_note;
    rep.checked = 2;

    const bool exhaustive = opts.exhaustive.value_or(n <= kExhaustiveMonotoneLimit);
    rep.mode = exhaustive ? "exhaustive" : "sampled";

    const auto record = [&](std::size_t a, std::size_t b) {
        ViolationWitness w;
        w.sets.push_back({"A", SubsetMask::from_bits(n, a), f.table[a]});
        w.sets.push_back({"B", SubsetMask::from_bits(n, b), f.table[b]});
        w.lhs = f.table[a];
        w.rhs = f.table[b];
        rep.witness = std::move(w);
        rep.holds = false;
    };

    if (exhaustive) {
        const std::size_t count = f.table.size();
        for (std::size_t b = 1; b < count && rep.holds; ++b) {
            // Proper submasks of b, descending enumeration, empty set last.
            for (std::size_t sub = (b - 1) & b;; sub = (sub - 1) & b) {
                ++rep.checked;
                if (f.table[sub] > f.table[b] + kValueTolerance) {
                    record(sub, b);
                    break;
                }
                if (sub == 0) break;
            }
        }
        return rep;
    }

    rep.seed = opts.seed;
    std::mt19937_64 rng(opts.seed);
    const std::uint64_t full = f.table.size() - 1;
    for (std::uint64_t t = 0; t < opts.trials && rep.holds; ++t) {
        const std::size_t b = static_cast<std::size_t>(rng() & full);
        const std::size_t a = static_cast<std::size_t>(rng() & full) & b;
        ++rep.checked;
        if (f.table[a] > f.table[b] + kValueTolerance) record(a, b);
    }
    return rep;
}

PropertyReport check_subadditive(const DenseSetFunction& f, const CheckOptions& opts) {
    return check_pairwise(f, opts, /*two_alternating=*/false);
}

PropertyReport check_two_alternating(const DenseSetFunction& f, const CheckOptions& opts) {
    return check_pairwise(f, opts, /*two_alternating=*/true);
}

RegularityProbeResult regularity_probe(const Capacity& v, const SubsetMask& a, double eps,
                                       std::span<const Rat> schedule) {
    const FiniteMetricSpace& space = *v.space();
    if (a.universe_size() != space.size()) {
        throw std::invalid_argument("regularity_probe: mask universe does not match space");
    }
    if (!std::isfinite(eps) || eps <= 0.0) {
        throw std::invalid_argument("regularity_probe: eps must be finite and > 0");
    }
    if (schedule.empty()) throw std::invalid_argument("regularity_probe: empty shrink schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > Rat(0))) {
            throw std::invalid_argument("regularity_probe: schedule deltas must be > 0");
        }
        if (i > 0 && !(schedule[i] < schedule[i - 1])) {
            throw std::invalid_argument("regularity_probe: schedule must be strictly decreasing");
        }
    }

    RegularityProbeResult res;
    res.probed = a;
    res.eps = eps;

    bool have_best = false;
    double best_val = 0.0;
    Rat best_delta;
    SubsetMask best_inner, best_outer;

    for (const Rat& delta : schedule) {
        const SubsetMask inner = delta_shrink(space, a, delta);
        const SubsetMask outer = open_neighborhood(space, a, delta);
        const double val = v(outer.minus(inner));
        res.trace.emplace_back(delta, val);
        if (val <= eps) {
            res.achieved = true;
            res.delta = delta;
            res.inner = inner;
            res.outer = outer;
            res.band_value = val;
            return res;
        }
        if (!have_best || val < best_val) {
            have_best = true;
            best_val = val;
            best_delta = delta;
            best_inner = inner;
            best_outer = outer;
        }
    }

    res.achieved = false;
    res.delta = best_delta;
    res.inner = std::move(best_inner);
    res.outer = std::move(best_outer);
    res.band_value = best_val;
    return res;
}

}  // namespace caplab
