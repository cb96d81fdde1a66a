#include <doctest.h>

#include "sta/pathmodel.hpp"
#include "sta/rng.hpp"
#include "sta/synth.hpp"

using namespace sta;
using pathmodel::PathDag;

namespace {

PathDag chain_dag() {
    PathDag dag;
    dag.nodes = {"X", "M", "Y"};
    dag.edges = {{"X", "M"}, {"M", "Y"}};
    dag.exposure = "X";
    dag.outcome = "Y";
    return dag;
}

PathDag full_dag() {
    PathDag dag;
    dag.nodes = {"X", "M", "Y"};
    dag.edges = {{"X", "M"}, {"M", "Y"}, {"X", "Y"}};
    dag.exposure = "X";
    dag.outcome = "Y";
    return dag;
}

}  // namespace

TEST_CASE("topological order and cycle detection") {
    auto dag = chain_dag();
    auto order = dag.topo_order();
    CHECK(order == std::vector<int>{0, 1, 2});
    dag.edges.push_back({"Y", "X"});
    CHECK_THROWS_AS(dag.topo_order(), CyclicGraph);
}

TEST_CASE("chi-square helpers match known quantiles") {
    // chi2(0.95; 1) = 3.841, chi2(0.95; 10) = 18.307
    CHECK(pathmodel::chi2_cdf(3.841, 1) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(pathmodel::chi2_cdf(18.307, 10) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(pathmodel::normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-5));
    // noncentral cdf reduces to central at lambda 0 and shifts right with lambda
    CHECK(pathmodel::noncentral_chi2_cdf(5.0, 3, 0.0) ==
          doctest::Approx(pathmodel::chi2_cdf(5.0, 3)));
    CHECK(pathmodel::noncentral_chi2_cdf(5.0, 3, 4.0) < pathmodel::chi2_cdf(5.0, 3));
}

TEST_CASE("d-separation basis set tests the implied independencies") {
    auto dag = chain_dag();
    std::map<std::pair<std::string, std::string>, double> coef = {{{"X", "M"}, 0.6},
                                                                  {{"M", "Y"}, 0.5}};
    auto data = synth::simulate_from_dag(dag, coef, 4000, CounterRng(21));
    auto tests = pathmodel::check_dag(dag, data);
    REQUIRE(tests.size() == 1);  // only X _||_ Y | M is testable
    CHECK(tests[0].x == "X");
    CHECK(tests[0].y == "Y");
    REQUIRE(tests[0].given.size() == 1);
    CHECK(tests[0].given[0] == "M");
    CHECK(std::fabs(tests[0].partial_correlation) < 0.05);
    CHECK(tests[0].p_value > 0.01);

    // data with a real direct effect violates the chain's implication
    auto bad = synth::simulate_from_dag(full_dag(),
                                        {{{"X", "M"}, 0.6}, {{"M", "Y"}, 0.5}, {{"X", "Y"}, 0.4}},
                                        4000, CounterRng(22));
    auto tests2 = pathmodel::check_dag(dag, bad);
    CHECK(tests2[0].p_value < 1e-6);

    // a saturated DAG has no testable implications
    CHECK(pathmodel::check_dag(full_dag(), data).empty());
}

TEST_CASE("saturated model reproduces the sample moments exactly") {
    auto data = synth::simulate_from_dag(
        full_dag(), {{{"X", "M"}, 0.5}, {{"M", "Y"}, 0.4}, {{"X", "Y"}, 0.2}}, 500,
        CounterRng(23));
    auto fit = pathmodel::fit_paths(full_dag(), data);
    CHECK(fit.indices.df == doctest::Approx(0.0));
    CHECK(std::fabs(fit.indices.srmr) < 1e-9);
    CHECK(fit.indices.chi2 < 1e-8);
    CHECK(fit.indices.cfi == doctest::Approx(1.0));
    CHECK(fit.indices.rmsea == doctest::Approx(0.0));
}

TEST_CASE("one predictor equals the weighted correlation") {
    PathDag dag;
    dag.nodes = {"X", "Y"};
    dag.edges = {{"X", "Y"}};
    auto data = synth::simulate_from_dag(dag, {{{"X", "Y"}, 0.37}}, 3000, CounterRng(24));
    auto fit = pathmodel::fit_paths(dag, data);
    Eigen::VectorXd w = pathmodel::normalize_weights(data.weights);
    Eigen::VectorXd x = data.values.col(0), y = data.values.col(1);
    double r = pathmodel::wcov(x, y, w) /
               std::sqrt(pathmodel::wcov(x, x, w) * pathmodel::wcov(y, y, w));
    CHECK(fit.coefficient("X", "Y") == doctest::Approx(r).epsilon(1e-9));
}

TEST_CASE("standardized coefficients are scale invariant") {
    auto dag = full_dag();
    auto data = synth::simulate_from_dag(
        dag, {{{"X", "M"}, 0.5}, {{"M", "Y"}, 0.4}, {{"X", "Y"}, 0.2}}, 2000, CounterRng(25));
    auto fit1 = pathmodel::fit_paths(dag, data);
    auto scaled = data;
    scaled.values.col(0) *= 1000.0;           // X in different units
    scaled.values.col(2) = scaled.values.col(2).array() * 0.01 + 7.0;  // Y shifted and scaled
    auto fit2 = pathmodel::fit_paths(dag, scaled);
    for (auto [f, t] : dag.edges)
        CHECK(fit1.coefficient(f, t) == doctest::Approx(fit2.coefficient(f, t)).epsilon(1e-9));
    // weight rescaling changes nothing either
    auto reweighted = data;
    reweighted.weights *= 13.0;
    auto fit3 = pathmodel::fit_paths(dag, reweighted);
    CHECK(fit1.coefficient("X", "Y") == doctest::Approx(fit3.coefficient("X", "Y")).epsilon(1e-12));
}

TEST_CASE("coefficient recovery on simulated data") {
    auto dag = full_dag();
    std::map<std::pair<std::string, std::string>, double> coef = {
        {{"X", "M"}, -0.37}, {{"M", "Y"}, 0.23}, {{"X", "Y"}, 0.13}};
    auto data = synth::simulate_from_dag(dag, coef, 20000, CounterRng(26));
    auto fit = pathmodel::fit_paths(dag, data);
    for (const auto& [edge, value] : coef)
        CHECK(fit.coefficient(edge.first, edge.second) == doctest::Approx(value).epsilon(0.15));
    // SEs are sane: within a factor of a few of 1/sqrt(n)
    for (const auto& eq : fit.equations)
        for (int i = 0; i < eq.se.size(); ++i) {
            CHECK(eq.se[i] > 0.0);
            CHECK(eq.se[i] < 0.05);
        }
}

TEST_CASE("effect decomposition is additive and matches hand algebra") {
    SUBCASE("from known coefficients") {
        auto effects = pathmodel::decompose_from_coefficients(
            full_dag(), {{{"X", "M"}, -0.37}, {{"M", "Y"}, 0.23}, {{"X", "Y"}, 0.13}}, "X", "Y");
        CHECK(effects.direct == doctest::Approx(0.13));
        CHECK(effects.indirect == doctest::Approx(-0.37 * 0.23).epsilon(1e-12));
        CHECK(effects.total == doctest::Approx(0.13 - 0.37 * 0.23).epsilon(1e-12));
        CHECK(std::fabs(effects.direct + effects.indirect - effects.total) < 1e-12);
        REQUIRE(effects.paths.size() == 2);
    }
    SUBCASE("from a fitted model") {
        auto dag = full_dag();
        auto data = synth::simulate_from_dag(
            dag, {{{"X", "M"}, 0.5}, {{"M", "Y"}, 0.4}, {{"X", "Y"}, 0.2}}, 5000, CounterRng(27));
        auto fit = pathmodel::fit_paths(dag, data);
        auto effects = pathmodel::decompose_effects(fit, "X", "Y");
        CHECK(effects.direct == doctest::Approx(fit.coefficient("X", "Y")));
        CHECK(effects.indirect ==
              doctest::Approx(fit.coefficient("X", "M") * fit.coefficient("M", "Y")));
        CHECK(std::fabs(effects.direct + effects.indirect - effects.total) < 1e-12);
        CHECK(effects.total_se > 0.0);
        CHECK(effects.indirect_se > 0.0);
    }
    SUBCASE("no path throws") {
        auto fit = pathmodel::fit_paths(
            chain_dag(),
            synth::simulate_from_dag(chain_dag(), {{{"X", "M"}, 0.5}, {{"M", "Y"}, 0.4}}, 200,
                                     CounterRng(28)));
        CHECK_THROWS_AS(pathmodel::decompose_effects(fit, "Y", "X"), MissingPath);
    }
}

TEST_CASE("VIF pruning drops collinear and near-constant candidates") {
    const size_t n = 2000;
    CounterRng rng(29);
    pathmodel::Dataset data;
    data.names = {"a", "b", "a_copy", "constant", "indep"};
    data.values.resize(long(n), 5);
    data.weights = Eigen::VectorXd::Ones(long(n));
    for (size_t i = 0; i < n; ++i) {
        double a = rng.next_normal();
        data.values(long(i), 0) = a;
        data.values(long(i), 1) = rng.next_normal();
        data.values(long(i), 2) = a + 0.05 * rng.next_normal();  // VIF far above 7
        data.values(long(i), 3) = 1.0;                            // no variance
        data.values(long(i), 4) = rng.next_normal();
    }
    auto kept = pathmodel::vif_prune({"a", "b", "a_copy", "constant", "indep"}, data);
    // the constant goes first, then exactly one of the a twins
    CHECK(std::find(kept.begin(), kept.end(), "constant") == kept.end());
    bool has_a = std::find(kept.begin(), kept.end(), "a") != kept.end();
    bool has_copy = std::find(kept.begin(), kept.end(), "a_copy") != kept.end();
    CHECK(has_a != has_copy);
    CHECK(std::find(kept.begin(), kept.end(), "b") != kept.end());
    CHECK(std::find(kept.begin(), kept.end(), "indep") != kept.end());
    // independent variables survive untouched
    auto kept2 = pathmodel::vif_prune({"a", "b", "indep"}, data);
    CHECK(kept2.size() == 3);
}

TEST_CASE("singular designs are rejected") {
    pathmodel::Dataset data;
    data.names = {"X1", "X2", "Y"};
    const size_t n = 100;
    data.values.resize(long(n), 3);
    data.weights = Eigen::VectorXd::Ones(long(n));
    CounterRng rng(30);
    for (size_t i = 0; i < n; ++i) {
        double x = rng.next_normal();
        data.values(long(i), 0) = x;
        data.values(long(i), 1) = 2.0 * x;  // perfectly collinear
        data.values(long(i), 2) = rng.next_normal();
    }
    PathDag dag;
    dag.nodes = {"X1", "X2", "Y"};
    dag.edges = {{"X1", "Y"}, {"X2", "Y"}};
    CHECK_THROWS_AS(pathmodel::fit_paths(dag, data), SingularDesign);
}

TEST_CASE("a misspecified model shows misfit") {
    // fit a chain to data that has a strong direct effect
    auto data = synth::simulate_from_dag(
        full_dag(), {{{"X", "M"}, 0.5}, {{"M", "Y"}, 0.2}, {{"X", "Y"}, 0.6}}, 5000,
        CounterRng(31));
    auto fit = pathmodel::fit_paths(chain_dag(), data);
    CHECK(fit.indices.df == doctest::Approx(1.0));
    CHECK(fit.indices.chi2 > 100.0);
    CHECK(fit.indices.rmsea > 0.1);
    CHECK(fit.indices.srmr > 0.05);
    CHECK(fit.indices.cfi < 0.95);
    CHECK(fit.indices.rmsea_lo90 < fit.indices.rmsea);
    CHECK(fit.indices.rmsea < fit.indices.rmsea_hi90);
}
