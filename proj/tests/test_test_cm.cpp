#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "cmatch/prob.hpp"
#include "cmatch/test_cm.hpp"

using namespace cmatch;
using Catch::Approx;

namespace {

TestScenario example1() {
    return TestScenario::gaussian({0.8, 0.2}, {30.0, 70.0}, {15.0, 10.0}, 2);
}

TestScenario example2() {
    return TestScenario::gaussian({0.8, 0.2}, {30.0, 70.0}, {15.0, 10.0}, 3, 2);
}

TestScenario example3() {
    return TestScenario::gaussian({0.5, 0.35, 0.15}, {20.0, 50.0, 80.0}, {15.0, 10.0, 10.0}, 3);
}

}  // namespace

TEST_CASE("right step on the first example") {
    TestScenario sc = example1();
    Partition part = Partition::from_boundaries(100, {50}, {0, 1});
    MatchedSemantics ms = right_step(sc, part);

    SECTION("truth rows carry the no-confidence ratios") {
        // with the positive row peaking on x1, T(theta1|x0) = P(y1|x0)/P(y1|x1)
        REQUIRE(ms.sem[1][1] == Approx(1.0));
        REQUIRE(ms.sem[1][0] ==
                Approx(ms.channel(1, 0) / ms.channel(1, 1)).margin(1e-12));
        REQUIRE(ms.sem[0][0] == Approx(1.0));
        REQUIRE(ms.sem[0][1] ==
                Approx(ms.channel(0, 1) / ms.channel(0, 0)).margin(1e-12));
    }
    SECTION("logical probabilities mix the prior") {
        REQUIRE(ms.logical_probs[1] ==
                Approx(sc.prior[1] + ms.sem[1][0] * sc.prior[0]).margin(1e-12));
    }
    SECTION("the two curves cross exactly once") {
        int sign_changes = 0;
        for (std::size_t k = 0; k + 1 < 100; ++k) {
            double d0 = ms.curves[0][k] - ms.curves[1][k];
            double d1 = ms.curves[0][k + 1] - ms.curves[1][k + 1];
            if (d0 >= 0.0 && d1 < 0.0) ++sign_changes;
            if (d0 < 0.0 && d1 >= 0.0) ++sign_changes;
        }
        REQUIRE(sign_changes == 1);
    }
    SECTION("matched semantics reach the Shannon mutual information") {
        REQUIRE(ms.semantic_info ==
                Approx(mutual_information(sc.prior, ms.channel)).margin(1e-9));
    }
}

TEST_CASE("right step structure checks") {
    SECTION("noiseless scenario separates cleanly") {
        TestScenario sc = TestScenario::gaussian({0.5, 0.5}, {25.0, 75.0}, {3.0, 3.0}, 2);
        Partition part = Partition::from_boundaries(100, {50}, {0, 1});
        MatchedSemantics ms = right_step(sc, part);
        REQUIRE(ms.info_bits[0][0] > 0.0);
        REQUIRE(ms.info_bits[1][1] > 0.0);
        // each curve peaks inside its own region
        for (std::size_t k = 0; k < 40; ++k) REQUIRE(ms.curves[0][k] > ms.curves[1][k]);
        for (std::size_t k = 60; k < 100; ++k) REQUIRE(ms.curves[1][k] > ms.curves[0][k]);
    }
    SECTION("single class means zero curves") {
        TestScenario sc = TestScenario::gaussian({1.0}, {50.0}, {10.0}, 2);
        Partition part = Partition::from_boundaries(100, {50}, {0, 1});
        MatchedSemantics ms = right_step(sc, part);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 100; ++k)
                REQUIRE(ms.curves[j][k] == Approx(0.0).margin(1e-12));
    }
    SECTION("empty region is degenerate") {
        TestScenario sc = example1();
        Partition all_zero;
        all_zero.labels.assign(100, 0);
        REQUIRE_THROWS_AS(right_step(sc, all_zero), std::domain_error);
    }
}

TEST_CASE("left step") {
    TestScenario sc = example1();

    SECTION("first move from the initial threshold goes to 53") {
        Partition part = Partition::from_boundaries(100, {50}, {0, 1});
        MatchedSemantics ms = right_step(sc, part);
        Partition next = left_step(ms.curves);
        REQUIRE(next.boundaries() == std::vector<int>{53});
    }
    SECTION("dominant curve claims every cell") {
        std::vector<std::vector<double>> curves(2, std::vector<double>(100, 0.0));
        for (std::size_t k = 0; k < 100; ++k) curves[1][k] = 1.0;
        Partition p = left_step(curves);
        REQUIRE(p.boundaries().empty());
        REQUIRE(p.labels[0] == 1);
        REQUIRE_FALSE(p.contiguous(2));  // degenerate: one label never used
    }
    SECTION("symmetric scenario splits at the midpoint") {
        TestScenario sym = TestScenario::gaussian({0.5, 0.5}, {40.0, 60.0}, {10.0, 10.0}, 2);
        Partition part = Partition::from_boundaries(100, {50}, {0, 1});
        MatchedSemantics ms = right_step(sym, part);
        Partition next = left_step(ms.curves);
        REQUIRE(next.boundaries() == std::vector<int>{50});
    }
    SECTION("invariant under adding a constant to all curves") {
        Partition part = Partition::from_boundaries(100, {50}, {0, 1});
        MatchedSemantics ms = right_step(sc, part);
        Partition base = left_step(ms.curves);
        auto shifted = ms.curves;
        for (auto& row : shifted)
            for (double& v : row) v += 3.7;
        REQUIRE(left_step(shifted) == base);
    }
}

TEST_CASE("full runs reproduce the worked examples") {
    SECTION("example 1: 50 -> 53 -> 54 -> 54") {
        TestScenario sc = example1();
        Partition init = Partition::from_boundaries(100, {50}, {0, 1});
        TestTrace tr = run_cm_test(sc, init);
        REQUIRE(tr.converged);
        REQUIRE(tr.steps.size() >= 4);
        REQUIRE(tr.steps[0].boundaries == std::vector<int>{50});
        REQUIRE(tr.steps[1].boundaries == std::vector<int>{53});
        REQUIRE(tr.steps[2].boundaries == std::vector<int>{54});
        REQUIRE(tr.steps[3].boundaries == std::vector<int>{54});
        REQUIRE(tr.final_step().boundaries == std::vector<int>{54});
        MatchedSemantics ms = right_step(sc, tr.final_step().partition);
        REQUIRE(mutual_information(sc.prior, ms.channel) == Approx(0.47).margin(0.01));
    }
    SECTION("example 2 with the neutral hypothesis") {
        TestScenario sc = example2();
        Partition init = Partition::from_boundaries(100, {50, 60}, {0, 2, 1});
        TestTrace tr = run_cm_test(sc, init);
        REQUIRE(tr.converged);
        REQUIRE(tr.final_step().boundaries == std::vector<int>{47, 59});
        MatchedSemantics ms = right_step(sc, tr.final_step().partition);
        REQUIRE(mutual_information(sc.prior, ms.channel) == Approx(0.52).margin(0.01));
    }
    SECTION("example 3 from both starts") {
        TestScenario sc = example3();
        TestTrace good =
            run_cm_test(sc, Partition::from_boundaries(100, {50, 60}, {0, 1, 2}));
        REQUIRE(good.converged);
        REQUIRE(good.final_step().boundaries == std::vector<int>{35, 66});
        REQUIRE(good.iterations <= 5);
        TestTrace bad = run_cm_test(sc, Partition::from_boundaries(100, {9, 20}, {0, 1, 2}));
        REQUIRE(bad.converged);
        REQUIRE(bad.final_step().boundaries == std::vector<int>{35, 66});
        REQUIRE(bad.iterations >= 8);
        REQUIRE(bad.iterations <= 14);
    }
    SECTION("recorded information never decreases") {
        for (auto [sc, bounds, order] :
             {std::tuple{example1(), std::vector<int>{50}, std::vector<int>{0, 1}},
              std::tuple{example2(), std::vector<int>{50, 60}, std::vector<int>{0, 2, 1}},
              std::tuple{example3(), std::vector<int>{9, 20}, std::vector<int>{0, 1, 2}}}) {
            TestTrace tr = run_cm_test(sc, Partition::from_boundaries(100, bounds, order));
            for (std::size_t k = 0; k + 1 < tr.steps.size(); ++k)
                REQUIRE(tr.steps[k + 1].info_bits >= tr.steps[k].info_bits - 1e-9);
        }
    }
    SECTION("example 2 alternative neutral mode lands elsewhere") {
        TestScenario sc = example2();
        sc.neutral_as_tautology = false;
        Partition init = Partition::from_boundaries(100, {50, 60}, {0, 2, 1});
        TestTrace tr = run_cm_test(sc, init);
        REQUIRE(tr.converged);
        REQUIRE(tr.final_step().boundaries != std::vector<int>{47, 59});
    }
}

TEST_CASE("fuzzy classifier") {
    TestScenario sc = example1();
    Partition init = Partition::from_boundaries(100, {50}, {0, 1});
    TestTrace tr = run_cm_test(sc, init);
    MatchedSemantics ms = right_step(sc, tr.final_step().partition);
    Distribution py(Alphabet::indexed(2), {0.5, 0.5});

    SECTION("s = 0 returns the marginal") {
        auto table = fuzzy_classifier(ms.curves, Distribution(Alphabet::indexed(2), {0.3, 0.7}),
                                      0.0);
        for (std::size_t k = 0; k < 100; ++k) {
            REQUIRE(table[0][k] == Approx(0.3).margin(1e-12));
            REQUIRE(table[1][k] == Approx(0.7).margin(1e-12));
        }
    }
    SECTION("crisp limit recovers the converged partition") {
        auto table = fuzzy_classifier(ms.curves, py, 0.0, /*crisp=*/true);
        for (std::size_t k = 0; k < 100; ++k) {
            int label = table[1][k] == 1.0 ? 1 : 0;
            REQUIRE(label == tr.final_step().partition.labels[k]);
        }
    }
    SECTION("columns are normalized") {
        auto table = fuzzy_classifier(ms.curves, py, 1.7);
        for (std::size_t k = 0; k < 100; ++k)
            REQUIRE(table[0][k] + table[1][k] == Approx(1.0).margin(1e-12));
    }
    SECTION("base-2 exponent against a hand-built instance") {
        // two cells: curve difference of exactly one bit at s=1, uniform py
        std::vector<std::vector<double>> curves = {{1.0, 0.0}, {0.0, 1.0}};
        auto table = fuzzy_classifier(curves, py, 1.0);
        REQUIRE(table[0][0] == Approx(2.0 / 3.0).margin(1e-12));
        REQUIRE(table[1][0] == Approx(1.0 / 3.0).margin(1e-12));
    }
    SECTION("infinite s behaves as the crisp sentinel") {
        auto crisp = fuzzy_classifier(ms.curves, py, 0.0, /*crisp=*/true);
        auto inf = fuzzy_classifier(ms.curves, py, std::numeric_limits<double>::infinity());
        REQUIRE(inf == crisp);
    }
}

TEST_CASE("minimum error partition diagnostic") {
    REQUIRE(min_error_partition(example1()).boundaries() == std::vector<int>{57});
}
