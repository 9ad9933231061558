#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caplab/axioms.hpp"
#include "caplab/capacity.hpp"
#include "caplab/errors.hpp"
#include "caplab/finite_space.hpp"
#include "caplab/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace caplab;

namespace {

SpacePtr grid(std::size_t n) {
    return std::make_shared<const FiniteMetricSpace>(
        FiniteMetricSpace::interval_grid(n, Rat(0), Rat(1)));
}

DenseSetFunction dense(std::size_t n, std::vector<double> table) {
    DenseSetFunction f;
    f.n = n;
    f.table = std::move(table);
    return f;
}

}  // namespace

TEST_CASE("axiom check accepts monotone tables") {
    // {0} and {1} are incomparable, so this one is monotone despite the dip.
    PropertyReport rep = check_capacity_axioms(dense(2, {0.0, 0.5, 0.2, 1.0}));
    CHECK(rep.holds);
    CHECK(rep.property == "monotone");
    CHECK(rep.mode == "exhaustive");
    CHECK_FALSE(rep.witness.has_value());
    CHECK_FALSE(rep.note.empty());
    CHECK(rep.to_json()["holds"] == true);
}

TEST_CASE("axiom check flags broken normalization and monotonicity") {
    PropertyReport bad_empty = check_capacity_axioms(dense(2, {0.1, 0.5, 0.5, 1.0}));
    CHECK_FALSE(bad_empty.holds);
    CHECK(bad_empty.property == "normalized");
    REQUIRE(bad_empty.witness.has_value());
    CHECK(bad_empty.witness->sets.at(0).role == "empty");
    CHECK(bad_empty.witness->lhs == 0.1);

    PropertyReport bad_full = check_capacity_axioms(dense(2, {0.0, 0.5, 0.5, 0.9}));
    CHECK_FALSE(bad_full.holds);
    CHECK(bad_full.property == "normalized");
    REQUIRE(bad_full.witness.has_value());
    CHECK(bad_full.witness->sets.at(0).role == "whole");

    PropertyReport dip = check_capacity_axioms(
        dense(3, {0.0, 0.5, 0.1, 0.4, 0.1, 0.6, 0.2, 1.0}));
    CHECK_FALSE(dip.holds);
    CHECK(dip.property == "monotone");
    REQUIRE(dip.witness.has_value());
    CHECK(dip.witness->sets.at(0).mask.to_hex() == "0x1");
    CHECK(dip.witness->sets.at(1).mask.to_hex() == "0x3");
    CHECK(dip.witness->lhs == 0.5);
    CHECK(dip.witness->rhs == 0.4);
}

TEST_CASE("subadditivity check") {
    PropertyReport ok = check_subadditive(dense(2, {0.0, 0.6, 0.7, 1.0}));
    CHECK(ok.holds);
    CHECK(ok.checked == 16);  // all ordered pairs

    PropertyReport bad = check_subadditive(dense(2, {0.0, 0.0, 0.0, 1.0}));
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->sets.at(0).mask.to_hex() == "0x1");
    CHECK(bad.witness->sets.at(1).mask.to_hex() == "0x2");
    CHECK(bad.witness->sets.at(2).mask.to_hex() == "0x3");
    CHECK(bad.witness->lhs == 1.0);
    CHECK(bad.witness->rhs == 0.0);
}

TEST_CASE("two-alternating check with the parity sup witness") {
    // sup of the even-points and odd-points measures on four points.
    auto g = grid(4);
    Capacity s = sup_of_measures(
        g, {WeightVector::from_rationals({rat(1, 2), Rat(0), rat(1, 2), Rat(0)}),
            WeightVector::from_rationals({Rat(0), rat(1, 2), Rat(0), rat(1, 2)})});
    DenseSetFunction f = dense_table(s);

    PropertyReport sub = check_subadditive(f);
    CHECK(sub.holds);

    PropertyReport alt = check_two_alternating(f);
    CHECK_FALSE(alt.holds);
    REQUIRE(alt.witness.has_value());
    // Greedy minimization lands on the canonical two-interval overlap.
    CHECK(alt.witness->sets.at(0).role == "A");
    CHECK(alt.witness->sets.at(0).mask.to_hex() == "0x3");
    CHECK(alt.witness->sets.at(1).mask.to_hex() == "0x6");
    CHECK(alt.witness->lhs == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(alt.witness->rhs == doctest::Approx(1.0).epsilon(1e-15));

    // A plain measure is modular, hence two-alternating.
    DenseSetFunction m = dense_table(measure_from_weights(g, triangular_weights(4)));
    CHECK(check_two_alternating(m).holds);
    CHECK(check_subadditive(m).holds);
}

TEST_CASE("huber capacities pass both pair checks exhaustively") {
    for (std::size_t n : {5ul, 7ul}) {
        auto g = grid(n);
        Capacity h = huber_contamination(g, uniform_weights(n), rat(1, 10), rat(1, 5));
        DenseSetFunction f = dense_table(h);
        CHECK(check_capacity_axioms(f).holds);
        PropertyReport sub = check_subadditive(f);
        PropertyReport alt = check_two_alternating(f);
        CHECK(sub.holds);
        CHECK(alt.holds);
        CHECK(sub.mode == "exhaustive");
        CHECK(sub.checked == (1ull << (2 * n)));
    }
}

TEST_CASE("sampled mode is deterministic in the seed") {
    auto g = grid(12);
    Capacity h = huber_contamination(g, uniform_weights(12), rat(1, 10), rat(1, 11));
    DenseSetFunction f = dense_table(h);
    CheckOptions opts;
    opts.exhaustive = false;
    opts.seed = 99;
    opts.trials = 5000;
    PropertyReport a = check_two_alternating(f, opts);
    PropertyReport b = check_two_alternating(f, opts);
    CHECK(a.holds);
    CHECK(a.mode == "sampled");
    CHECK(a.seed == 99);
    CHECK(a.checked == 5000);
    CHECK(a.to_json() == b.to_json());

    CheckOptions mono = opts;
    PropertyReport am = check_capacity_axioms(f, mono);
    CHECK(am.holds);
    CHECK(am.mode == "sampled");
}

TEST_CASE("dense cap and table validation") {
    DenseSetFunction oversized;
    oversized.n = kMaxDensePoints + 1;
    CHECK_THROWS_AS(check_subadditive(oversized), SizeCapError);
    CHECK_THROWS_AS(check_capacity_axioms(dense(2, {0.0, 0.5, 1.0})), std::invalid_argument);
}

TEST_CASE("regularity probe on a plain measure") {
    auto g = grid(101);
    Capacity m = measure_from_weights(g, uniform_weights(101));
    const SubsetMask a =
        realize_descriptor(*g, SetDescriptor::interval(rat(1, 4), rat(1, 2), true, true));
    const Rat schedule[] = {rat(1, 4), rat(1, 10), rat(1, 100)};

    RegularityProbeResult res = regularity_probe(m, a, 0.02, schedule);
    CHECK(res.achieved);
    CHECK(res.delta == rat(1, 100));
    CHECK(res.trace.size() == 3);
    // At delta = h the open neighborhood is A itself and the shrink drops the
    // two boundary points, so the sandwich band is exactly those two points.
    CHECK(res.outer == a);
    CHECK(res.outer.minus(res.inner).count() == 2);
    CHECK(res.band_value == doctest::Approx(2.0 / 101).epsilon(1e-12));
    CHECK(res.inner ==
          realize_descriptor(*g, SetDescriptor::interval(rat(26, 100), rat(49, 100), true, true)));

    // Band values shrink along the schedule for this instance.
    CHECK(res.trace[0].second > res.trace[1].second);
    CHECK(res.trace[1].second > res.trace[2].second);
}

TEST_CASE("regularity probe fails below the contamination floor") {
    auto g = grid(101);
    Capacity h = huber_contamination(g, uniform_weights(101), rat(1, 10), rat(1, 20));
    const SubsetMask origin = SubsetMask::from_indices(101, {0});
    const Rat schedule[] = {rat(1, 4), rat(1, 10), rat(1, 100)};

    // Any sandwich band around {0} is nonempty, so its value is at least eps.
    RegularityProbeResult res = regularity_probe(h, origin, 0.05, schedule);
    CHECK_FALSE(res.achieved);
    CHECK(res.trace.size() == 3);
    CHECK(res.delta == rat(1, 100));  // smallest band seen
    CHECK(res.inner.none());
    CHECK(res.outer == origin);
    CHECK(res.band_value == doctest::Approx(6.0 / 101 + 0.1).epsilon(1e-12));

    // The same probe with a budget above the floor succeeds.
    RegularityProbeResult loose = regularity_probe(h, origin, 0.2, schedule);
    CHECK(loose.achieved);
}

TEST_CASE("regularity probe validates its inputs") {
    auto g = grid(11);
    Capacity m = measure_from_weights(g, uniform_weights(11));
    const SubsetMask a = SubsetMask::from_indices(11, {3});
    const Rat good[] = {rat(1, 4), rat(1, 10)};
    const Rat increasing[] = {rat(1, 10), rat(1, 4)};
    const Rat with_zero[] = {rat(1, 4), Rat(0)};
    CHECK_THROWS_AS(regularity_probe(m, a, 0.0, good), std::invalid_argument);
    CHECK_THROWS_AS(regularity_probe(m, a, -0.1, good), std::invalid_argument);
    CHECK_THROWS_AS(regularity_probe(m, a, 0.1, increasing), std::invalid_argument);
    CHECK_THROWS_AS(regularity_probe(m, a, 0.1, with_zero), std::invalid_argument);
    CHECK_THROWS_AS(regularity_probe(m, a, 0.1, std::span<const Rat>{}), std::invalid_argument);
    CHECK_THROWS_AS(regularity_probe(m, SubsetMask(5), 0.1, good), std::invalid_argument);
}
