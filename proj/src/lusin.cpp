#include "caplab/lusin.hpp"

#include "caplab/errors.hpp"
#include "caplab/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace caplab {

void LusinInstance::validate() const {
    const std::size_t n = capacity.ground_size();
    if (u.size() != n) throw std::invalid_argument("lusin instance: u size does not match space");
    for (double x : u) {
        if (!std::isfinite(x)) throw std::invalid_argument("lusin instance: non-finite u value");
    }
    if (!std::isfinite(eta)) throw std::invalid_argument("lusin instance: non-finite eta");
    if (!(scale > Rat(0))) throw std::invalid_argument("lusin instance: scale must be > 0");
}

nlohmann::json LusinResult::to_json() const {
    return {{"kept", kept.to_hex()},       {"removed", removed.to_hex()},
            {"value", fmt_sig15(value)},   {"method", method},
            {"optimal", optimal},          {"nodes", nodes}};
}

ConflictGraph conflict_pairs(const LusinInstance& instance) {
    instance.validate();
    const FiniteMetricSpace& space = instance.space();
    const std::size_t n = space.size();
    ConflictGraph g;
    std::vector<bool> touched(n, false);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            if (space.distance(x, y) < instance.scale &&
                std::abs(instance.u[x] - instance.u[y]) > instance.eta) {
                g.edges.emplace_back(x, y);
                touched[x] = touched[y] = true;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (touched[i]) g.vertices.push_back(i);
    }
    return g;
}

bool conflict_free(const LusinInstance& instance, const SubsetMask& kept) {
    for (const auto& [x, y] : conflict_pairs(instance).edges) {
        if (kept.test(x) && kept.test(y)) return false;
    }
    return true;
}

namespace {

// True when `candidate` beats the incumbent: smaller value, or equal value
// with numerically smaller removed mask.
bool improves(double value, const SubsetMask& removed, bool have_best, double best_value,
              const SubsetMask& best_removed) {
    if (!have_best) return true;
    if (value < best_value) return true;
    return value == best_value && removed.compare_value(best_removed) < 0;
}

struct BranchAndBound {
    const Capacity& v;
    const std::vector<std::pair<std::size_t, std::size_t>>& edges;
    std::vector<std::vector<std::size_t>> adj;  // neighbors per point id

    SubsetMask best_removed;
    double best_value = 0.0;
    bool have_best = false;
    std::uint64_t nodes = 0;

    BranchAndBound(const Capacity& cap,
                   const std::vector<std::pair<std::size_t, std::size_t>>& es, std::size_t n)
        : v(cap), edges(es), adj(n) {
        for (const auto& [x, y] : es) {
            adj[x].push_back(y);
            adj[y].push_back(x);
        }
    }

    void search(SubsetMask& removed, SubsetMask& excluded) {
        ++nodes;
        // Monotonicity makes v(removed) an admissible bound for every
        // completion; completions also only grow the mask numerically, so
        // equal-bound subtrees that cannot win the tie-break are cut too.
        const double bound = v(removed);
        if (have_best) {
            if (bound > best_value) return;
            if (bound == best_value && removed.compare_value(best_removed) >= 0) return;
        }

        const auto uncovered = [&]() -> const std::pair<std::size_t, std::size_t>* {
            for (const auto& e : edges) {
                if (!removed.test(e.first) && !removed.test(e.second)) return &e;
            }
            return nullptr;
        }();

        if (uncovered == nullptr) {
            if (improves(bound, removed, have_best, best_value, best_removed)) {
                have_best = true;
                best_value = bound;
                best_removed = removed;
            }
            return;
        }

        const std::size_t x = uncovered->first;

        if (!excluded.test(x)) {
            removed.set(x);
            search(removed, excluded);
            removed.reset(x);
        }

        // Exclude x from the cover: every uncovered edge at x must then be
        // covered from the other side, which forces all those neighbors in.
        std::vector<std::size_t> forced;
        for (std::size_t z : adj[x]) {
            if (!removed.test(z)) {
                if (excluded.test(z)) return;  // edge (x, z) can never be covered
                forced.push_back(z);
            }
        }
        const bool flip_x = !excluded.test(x);
        if (flip_x) excluded.set(x);
        for (std::size_t z : forced) removed.set(z);
        search(removed, excluded);
        for (std::size_t z : forced) removed.reset(z);
        if (flip_x) excluded.reset(x);
    }
};

LusinResult trivial_keep_all(const LusinInstance& instance, const char* method) {
    const std::size_t n = instance.space().size();
    LusinResult res;
    res.removed = SubsetMask(n);
    res.kept = SubsetMask::full_set(n);
    res.value = instance.capacity(res.removed);
    res.method = method;
    res.optimal = true;
    res.nodes = 1;
    return res;
}

}  // namespace

LusinResult exact_min_removal(const LusinInstance& instance) {
    const ConflictGraph g = conflict_pairs(instance);
    if (g.edges.empty()) return trivial_keep_all(instance, "exact");
    if (g.vertices.size() > kExactSearchVertexCap) {
        throw SizeCapError("exact_min_removal: conflict graph above " +
                           std::to_string(kExactSearchVertexCap) +
                           " vertices; use greedy_removal");
    }

    const std::size_t n = instance.space().size();
    BranchAndBound bb(instance.capacity, g.edges, n);
    SubsetMask removed(n), excluded(n);
    bb.search(removed, excluded);

    LusinResult res;
    res.removed = bb.best_removed;
    res.kept = bb.best_removed.complement();
    res.value = bb.best_value;
    res.method = "exact";
    res.optimal = true;
    res.nodes = bb.nodes;
    return res;
}

LusinResult greedy_removal(const LusinInstance& instance) {
    const ConflictGraph g = conflict_pairs(instance);
    if (g.edges.empty()) return trivial_keep_all(instance, "greedy");

    const std::size_t n = instance.space().size();
    SubsetMask removed(n);
    std::uint64_t steps = 0;

    while (true) {
        // Count uncovered incident edges per vertex.
        std::vector<std::size_t> load(n, 0);
        bool any = false;
        for (const auto& [x, y] : g.edges) {
            if (!removed.test(x) && !removed.test(y)) {
                ++load[x];
                ++load[y];
                any = true;
            }
        }
        if (!any) break;

        const double current = instance.capacity(removed);
        std::size_t pick = n;
        double pick_score = 0.0;
        for (std::size_t x : g.vertices) {
            if (removed.test(x) || load[x] == 0) continue;
            SubsetMask trial = removed;
            trial.set(x);
            const double score =
                (instance.capacity(trial) - current) / static_cast<double>(load[x]);
            if (pick == n || score < pick_score) {
                pick = x;
                pick_score = score;
            }
        }
        removed.set(pick);
        ++steps;
    }

    LusinResult res;
    res.removed = removed;
    res.kept = removed.complement();
    res.value = instance.capacity(removed);
    res.method = "greedy";
    res.optimal = res.value == 0.0;  // cannot beat zero
    res.nodes = steps;
    return res;
}

LusinResult brute_force_oracle(const LusinInstance& instance) {
    instance.validate();
    const std::size_t n = instance.space().size();
    if (n > kOracleCap) {
        throw SizeCapError("brute_force_oracle: above " + std::to_string(kOracleCap) + " points");
    }
    const ConflictGraph g = conflict_pairs(instance);
    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& [x, y] : g.edges) {
        adj[x] |= std::uint32_t(1) << y;
        adj[y] |= std::uint32_t(1) << x;
    }

    const std::uint32_t count = std::uint32_t(1) << n;
    const std::uint32_t full = count - 1;
    SubsetMask scratch(n);
    bool have_best = false;
    double best_value = 0.0;
    std::uint32_t best_removed = 0;

    for (std::uint32_t m = 0; m < count; ++m) {
        const std::uint32_t keep = full & ~m;
        bool ok = true;
        for (std::uint32_t rest = keep; rest && ok;) {
            const unsigned x = static_cast<unsigned>(__builtin_ctz(rest));
            if (adj[x] & keep) ok = false;
            rest &= rest - 1;
        }
        if (!ok) continue;
        scratch.assign_bits(m);
        const double val = instance.capacity(scratch);
        // Ascending scan: the first strict improvement is automatically the
        // numerically smallest removed mask among ties.
        if (!have_best || val < best_value) {
            have_best = true;
            best_value = val;
            best_removed = m;
        }
    }

    LusinResult res;
    res.removed = SubsetMask::from_bits(n, best_removed);
    res.kept = res.removed.complement();
    res.value = best_value;
    res.method = "oracle";
    res.optimal = true;
    res.nodes = count;
    return res;
}

std::vector<double> quantize_function(std::span<const double> u, std::size_t levels) {
    if (levels == 0) throw std::invalid_argument("quantize_function: levels must be >= 1");
    std::vector<double> out;
    out.reserve(u.size());
    const double n = static_cast<double>(levels);
    for (double x : u) {
        if (!std::isfinite(x)) throw std::invalid_argument("quantize_function: non-finite value");
        out.push_back(std::floor(x * n) / n);
    }
    return out;
}

std::vector<SubsetMask> level_cells(std::span<const double> u, std::size_t n) {
    if (u.size() != n) throw std::invalid_argument("level_cells: u size mismatch");
    std::vector<double> seen;
    std::vector<SubsetMask> cells;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t at = seen.size();
        for (std::size_t j = 0; j < seen.size(); ++j) {
            if (seen[j] == u[i]) {
                at = j;
                break;
            }
        }
        if (at == seen.size()) {
            seen.push_back(u[i]);
            cells.emplace_back(n);
        }
        cells[at].set(i);
    }
    return cells;
}

nlohmann::json ConstructiveResult::to_json() const {
    nlohmann::json cell_rows = nlohmann::json::array();
    for (const auto& c : cells) {
        cell_rows.push_back({{"index", c.index},
                             {"cell", c.cell.to_hex()},
                             {"budget", fmt_sig15(c.budget)},
                             {"achieved", c.achieved},
                             {"delta", caplab::to_string(c.delta)},
                             {"band_value", fmt_sig15(c.band_value)}});
    }
    nlohmann::json j{{"result", result.to_json()},
                     {"cells", cell_rows},
                     {"tail_value", fmt_sig15(tail_value)},
                     {"separation_eta", fmt_sig15(separation_eta)}};
    j["separation_scale"] =
        separation_scale ? nlohmann::json(caplab::to_string(*separation_scale)) : nlohmann::json();
    return j;
}

ConstructiveResult constructive_simple(const LusinInstance& instance,
                                       const std::vector<SubsetMask>& partition,
                                       double eps_budget, std::span<const Rat> schedule) {
    instance.validate();
    const Capacity& v = instance.capacity;
    const FiniteMetricSpace& space = instance.space();
    const std::size_t n = space.size();
    if (!(eps_budget > 0.0) || !std::isfinite(eps_budget)) {
        throw std::invalid_argument("constructive_simple: eps_budget must be > 0");
    }
    if (partition.empty()) throw std::invalid_argument("constructive_simple: empty partition");

    SubsetMask covered(n);
    for (const auto& cell : partition) {
        if (cell.universe_size() != n) {
            throw std::invalid_argument("constructive_simple: cell universe mismatch");
        }
        if (cell.none()) throw std::invalid_argument("constructive_simple: empty cell");
        if (covered.intersects(cell)) {
            throw std::invalid_argument("constructive_simple: cells overlap");
        }
        covered |= cell;
        // u must be constant on the cell; quantize_function + level_cells
        // produce exactly this shape.
        double first = 0.0;
        bool got = false;
        bool constant = true;
        cell.for_each([&](std::size_t i) {
            if (!got) {
                first = instance.u[i];
                got = true;
            } else if (instance.u[i] != first) {
                constant = false;
            }
        });
        if (!constant) {
            throw std::invalid_argument("constructive_simple: u is not constant on a cell");
        }
    }
    if (!covered.is_full()) {
        throw std::invalid_argument("constructive_simple: partition does not cover the space");
    }

    ConstructiveResult out;
    SubsetMask kept(n);
    SubsetMask outer_union(n);

    for (std::size_t j = 1; j <= partition.size(); ++j) {
        const SubsetMask& cell = partition[j - 1];
        const double budget = std::ldexp(eps_budget, -static_cast<int>(j) - 2);
        const RegularityProbeResult probe = regularity_probe(v, cell, budget, schedule);
        out.cells.push_back(
            {j, cell, budget, probe.achieved, probe.delta, probe.band_value});
        if (!probe.achieved) {
            throw ConstructionInfeasibleError(
                "constructive_simple: cell " + std::to_string(j) + " (" + cell.to_hex() +
                    ") cannot meet regularity budget " + fmt_sig15(budget) +
                    "; best band value " + fmt_sig15(probe.band_value),
                j, cell.to_hex(), budget, probe.band_value);
        }
        kept |= probe.inner;
        outer_union |= probe.outer;
    }

    out.tail_value = v(outer_union.minus(kept));
    if (out.tail_value > eps_budget / 2.0) {
        const SubsetMask tail = outer_union.minus(kept);
        throw ConstructionInfeasibleError(
            "constructive_simple: tail band " + tail.to_hex() + " has value " +
                fmt_sig15(out.tail_value) + " above eps/2 = " + fmt_sig15(eps_budget / 2.0),
            partition.size() + 1, tail.to_hex(), eps_budget / 2.0, out.tail_value);
    }

    // Modulus certificate. Distinct cell values sorted; half the minimal gap
    // bounds eta, the minimal distance between kept cells of different value
    // bounds scale.
    std::vector<double> values;
    for (const auto& cell : partition) {
        std::size_t first = n;
        cell.for_each([&](std::size_t i) {
            if (first == n) first = i;
        });
        values.push_back(instance.u[first]);
    }
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() >= 2) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < distinct.size(); ++i) {
            gap = std::min(gap, distinct[i] - distinct[i - 1]);
        }
        out.separation_eta = gap / 2.0;
    }

    bool have_scale = false;
    Rat min_dist;
    for (std::size_t a = 0; a < partition.size(); ++a) {
        for (std::size_t b = a + 1; b < partition.size(); ++b) {
            if (values[a] == values[b]) continue;
            const SubsetMask fa = kept & partition[a];
            const SubsetMask fb = kept & partition[b];
            fa.for_each([&](std::size_t x) {
                fb.for_each([&](std::size_t y) {
                    const Rat d = space.distance(x, y);
                    if (!have_scale || d < min_dist) {
                        have_scale = true;
                        min_dist = d;
                    }
                });
            });
        }
    }
    if (have_scale) out.separation_scale = min_dist;

    out.result.kept = kept;
    out.result.removed = kept.complement();
    out.result.value = v(out.result.removed);
    out.result.method = "constructive";
    out.result.optimal = false;
    out.result.nodes = 0;
    return out;
}

}  // namespace caplab
