#include "caplab/core_lp.hpp"

#include "caplab/axioms.hpp"
#include "caplab/errors.hpp"
#include "caplab/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace caplab {

nlohmann::json CoreQueryResult::to_json() const {
    nlohmann::json j;
    j["nonempty"] = nonempty;
    j["cover_cost"] = fmt_sig15(cover_cost);
    if (witness) {
        nlohmann::json w = nlohmann::json::array();
        for (double x : witness->w) w.push_back(fmt_sig15(x));
        j["witness"] = w;
    } else {
        j["witness"] = nullptr;
    }
    j["witness_verified"] = witness_verified;
    j["witness_worst_slack"] = fmt_sig15(witness_worst_slack);
    nlohmann::json b = nlohmann::json::array();
    for (const auto& m : binding) b.push_back(m.to_hex());
    j["binding"] = b;
    nlohmann::json cov = nlohmann::json::array();
    for (const auto& [m, y] : cover) {
        cov.push_back({{"mask", m.to_hex()}, {"weight", fmt_sig15(y)}});
    }
    j["cover"] = cov;
    j["iterations"] = iterations;
    j["note"] = note;
    return j;
}

MembershipResult core_membership(const Capacity& v, const WeightVector& nu,
                                 const MembershipOptions& opts) {
    const std::size_t n = v.ground_size();
    if (nu.size() != n) throw std::invalid_argument("core_membership: weight count mismatch");

    MembershipResult res;
    const bool exhaustive = opts.exhaustive.value_or(n <= kMaxDensePoints);
    if (exhaustive && n > kMaxDensePoints) {
        throw SizeCapError("core_membership: exhaustive mode above dense cap");
    }
    res.mode = exhaustive ? "exhaustive" : "sampled";

    double worst = std::numeric_limits<double>::infinity();
    std::optional<SubsetMask> argmin;

    if (exhaustive) {
        const DenseSetFunction f = dense_table(v);
        const std::size_t count = f.table.size();
        // nu(A) by dynamic programming over the lowest set bit.
        std::vector<double> nu_sum(count, 0.0);
        for (std::size_t m = 1; m < count; ++m) {
            const std::size_t low = m & (~m + 1);
            nu_sum[m] = nu_sum[m ^ low] + nu.w[static_cast<std::size_t>(__builtin_ctzll(low))];
        }
        for (std::size_t m = 0; m < count; ++m) {
            const double slack = f.table[m] - nu_sum[m];
            if (slack < worst) {
                worst = slack;
                argmin = SubsetMask::from_bits(n, m);
            }
        }
        res.checked = count;
    } else {
        std::mt19937_64 rng(opts.seed);
        for (std::uint64_t t = 0; t < opts.trials; ++t) {
            const SubsetMask a = SubsetMask::random(n, rng);
            const double slack = v(a) - nu.mass(a);
            if (slack < worst) {
                worst = slack;
                argmin = a;
            }
        }
        res.checked = opts.trials;
    }

    res.worst_slack = worst;
    res.member = worst >= -opts.tolerance;
    if (!res.member) res.violating = argmin;
    return res;
}

WeightVector greedy_chain_measure(const Capacity& v, std::span<const std::size_t> ordering) {
    const std::size_t n = v.ground_size();
    if (ordering.size() != n) throw std::invalid_argument("greedy_chain_measure: not a permutation");
    std::vector<bool> seen(n, false);
    for (std::size_t i : ordering) {
        if (i >= n || seen[i]) throw std::invalid_argument("greedy_chain_measure: not a permutation");
        seen[i] = true;
    }
    std::vector<double> w(n, 0.0);
    SubsetMask prefix(n);
    double prev = v(prefix);
    for (std::size_t i : ordering) {
        prefix.set(i);
        const double cur = v(prefix);
        w[i] = cur - prev;
        prev = cur;
    }
    return WeightVector::from_doubles(std::move(w));
}

namespace {

// Minimum-cost fractional cover of the points by sets weighted with v:
//   min sum_A y_A v(A)  s.t.  sum_{A contains i} y_A >= 1,  y >= 0.
// Solved by revised simplex with Bland's rule (deterministic, finite).
// The simplex multipliers at the optimum are dual-feasible: pi >= 0 and
// pi(A) <= v(A) for every A, with sum pi = optimal cost; when that cost
// reaches 1 the multipliers are exactly a core measure.
struct CoverSolver {
    const DenseSetFunction& f;
    std::size_t n;
    std::size_t set_count;    // 2^n, set columns are ids 1 .. set_count-1
    std::size_t surplus_base; // surplus column for row r has id surplus_base + r

    std::vector<std::size_t> basis;
    std::vector<double> b_inv;  // n x n row-major
    std::uint64_t iterations = 0;
    bool unbounded = false;

    explicit CoverSolver(const DenseSetFunction& table)
        : f(table), n(table.n), set_count(table.table.size()), surplus_base(set_count) {}

    double cost(std::size_t id) const { return id < set_count ? f.table[id] : 0.0; }

    double entry(std::size_t id, std::size_t row) const {
        if (id < set_count) return (id >> row) & 1u ? 1.0 : 0.0;
        return id == surplus_base + row ? -1.0 : 0.0;
    }

    void column(std::size_t id, std::vector<double>& out) const {
        for (std::size_t r = 0; r < n; ++r) out[r] = entry(id, r);
    }

    void solve() {
        basis.resize(n);
        basis[0] = set_count - 1;  // the whole space covers every point once
        for (std::size_t r = 1; r < n; ++r) basis[r] = surplus_base + r;
        // Basis matrix [ones | -e_1 .. -e_{n-1}] is its own inverse.
        b_inv.assign(n * n, 0.0);
        b_inv[0] = 1.0;
        for (std::size_t r = 1; r < n; ++r) {
            b_inv[r * n] = 1.0;
            b_inv[r * n + r] = -1.0;
        }

        std::vector<double> pi(n), x_b(n), dir(n), col(n);
        const double rc_eps = 1e-12;
        while (true) {
            if (++iterations > 200'000) {
                throw std::runtime_error("cover optimization failed to converge");
            }
            // pi = c_B * B^{-1}
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r) s += cost(basis[r]) * b_inv[r * n + j];
                pi[j] = s;
            }
            // Bland: first column (ascending id) with negative reduced cost.
            std::size_t entering = 0;
            bool found = false;
            for (std::size_t id = 1; id < surplus_base + n && !found; ++id) {
                double rc = cost(id);
                if (id < set_count) {
                    for (std::size_t r = 0; r < n; ++r) {
                        if ((id >> r) & 1u) rc -= pi[r];
                    }
                } else {
                    rc += pi[id - surplus_base];
                }
                if (rc < -rc_eps) {
                    entering = id;
                    found = true;
                }
            }
            if (!found) return;  // optimal

            column(entering, col);
            for (std::size_t r = 0; r < n; ++r) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += b_inv[r * n + j] * col[j];
                dir[r] = s;
            }
            // x_B = B^{-1} * 1
            for (std::size_t r = 0; r < n; ++r) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += b_inv[r * n + j];
                x_b[r] = s;
            }
            std::size_t leave = n;
            double best_ratio = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (dir[r] > 1e-12) {
                    const double ratio = x_b[r] / dir[r];
                    if (leave == n || ratio < best_ratio - 1e-15 ||
                        (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[leave])) {
                        leave = r;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave == n) {
                unbounded = true;  // only reachable when v takes negative values
                return;
            }
            // Pivot: replace basis[leave], update B^{-1} by row elimination.
            const double piv = dir[leave];
            for (std::size_t j = 0; j < n; ++j) b_inv[leave * n + j] /= piv;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == leave || dir[r] == 0.0) continue;
                const double factor = dir[r];
                for (std::size_t j = 0; j < n; ++j) {
                    b_inv[r * n + j] -= factor * b_inv[leave * n + j];
                }
            }
            basis[leave] = entering;
        }
    }

    double objective() const {
        double s = 0.0;
        std::vector<double> x_b(n);
        for (std::size_t r = 0; r < n; ++r) {
            double t = 0.0;
            for (std::size_t j = 0; j < n; ++j) t += b_inv[r * n + j];
            x_b[r] = t;
        }
        for (std::size_t r = 0; r < n; ++r) s += cost(basis[r]) * x_b[r];
        return s;
    }

    std::vector<double> multipliers() const {
        std::vector<double> pi(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += cost(basis[r]) * b_inv[r * n + j];
            pi[j] = s;
        }
        return pi;
    }

    std::vector<std::pair<std::size_t, double>> basic_sets() const {
        std::vector<double> x_b(n);
        for (std::size_t r = 0; r < n; ++r) {
            double t = 0.0;
            for (std::size_t j = 0; j < n; ++j) t += b_inv[r * n + j];
            x_b[r] = t;
        }
        std::vector<std::pair<std::size_t, double>> out;
        for (std::size_t r = 0; r < n; ++r) {
            if (basis[r] < set_count && x_b[r] > kCoreTolerance) {
                out.emplace_back(basis[r], x_b[r]);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

void attach_witness(CoreQueryResult& res, const Capacity& v, const DenseSetFunction& f,
                    WeightVector nu) {
    MembershipOptions mo;
    mo.tolerance = kCoreTolerance;
    const MembershipResult check = core_membership(v, nu, mo);
    res.witness_verified = check.member;
    res.witness_worst_slack = check.worst_slack;
    const std::size_t n = v.ground_size();
    std::vector<double> nu_sum(f.table.size(), 0.0);
    for (std::size_t m = 1; m < f.table.size(); ++m) {
        const std::size_t low = m & (~m + 1);
        nu_sum[m] = nu_sum[m ^ low] + nu.w[static_cast<std::size_t>(__builtin_ctzll(low))];
    }
    for (std::size_t m = 0; m < f.table.size(); ++m) {
        if (std::abs(nu_sum[m] - f.table[m]) <= kCoreTolerance) {
            res.binding.push_back(SubsetMask::from_bits(n, m));
        }
    }
    res.witness = std::move(nu);
}

}  // namespace

CoreQueryResult core_nonempty(const Capacity& v) {
    const std::size_t n = v.ground_size();
    if (n > kCoreDenseLimit) {
        throw SizeCapError("core_nonempty: ground set above " + std::to_string(kCoreDenseLimit) +
                           " points");
    }

    CoreQueryResult res;
    const DenseSetFunction f = dense_table(v);

    CheckOptions strict;
    strict.exhaustive = true;
    if (check_two_alternating(f, strict).holds) {
        std::vector<std::size_t> identity(n);
        for (std::size_t i = 0; i < n; ++i) identity[i] = i;
        attach_witness(res, v, f, greedy_chain_measure(v, identity));
        if (res.witness_verified) {
            res.nonempty = true;
            res.cover_cost = 1.0;
            res.note = "greedy identity witness via the two-alternating fast path";
            return res;
        }
        // Verification can only fail on pathological rounding; fall through
        // to the general method rather than trust the fast path.
        res = CoreQueryResult{};
    }

    CoverSolver solver(f);
    solver.solve();
    res.iterations = solver.iterations;

    if (solver.unbounded) {
        res.nonempty = false;
        res.cover_cost = -std::numeric_limits<double>::infinity();
        res.note = "cover cost unbounded below (capacity takes negative values)";
        return res;
    }

    res.cover_cost = solver.objective();
    res.nonempty = res.cover_cost >= 1.0 - kCoreTolerance;
    for (const auto& [mask, weight] : solver.basic_sets()) {
        res.cover.emplace_back(SubsetMask::from_bits(n, mask), weight);
    }

    if (res.nonempty) {
        std::vector<double> pi = solver.multipliers();
        double sum = 0.0;
        for (double& x : pi) {
            if (x < 0.0) x = 0.0;  // clip simplex noise
            sum += x;
        }
        if (sum > 0.0) {
            for (double& x : pi) x /= sum;
            attach_witness(res, v, f, WeightVector::from_doubles(pi));
        }
        res.note = "witness from optimal cover multipliers";
    } else {
        res.note = "fractional cover cheaper than 1 rules out any core measure";
    }
    return res;
}

double core_exactness_gap(const Capacity& v, const SubsetMask& a) {
    const std::size_t n = v.ground_size();
    if (n > kMaxDensePoints) throw SizeCapError("core_exactness_gap: above dense cap");
    if (a.universe_size() != n) {
        throw std::invalid_argument("core_exactness_gap: mask universe mismatch");
    }
    std::vector<std::size_t> ordering = a.indices();
    a.complement().for_each([&](std::size_t i) { ordering.push_back(i); });
    const WeightVector nu = greedy_chain_measure(v, ordering);
    return v(a) - nu.mass(a);
}

}  // namespace caplab
