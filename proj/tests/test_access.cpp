#include <doctest.h>

#include <set>

#include "sta/access.hpp"
#include "sta/synth.hpp"

using namespace sta;

namespace {

BoundingBox box() { return {48.80, 2.25, 48.92, 2.45}; }

Poi poi_at(const std::string& id, double lat, double lon) {
    Poi p;
    p.poi_id = id;
    p.lat = lat;
    p.lon = lon;
    p.social_leisure = true;
    p.confidence = 0.9;
    return p;
}

}  // namespace

TEST_CASE("weighted median follows the midpoint rule at exact half mass") {
    CHECK(weighted_median({{10, 1}, {20, 1}, {100, 2}}) == doctest::Approx(60.0));
    CHECK(weighted_median({{1, 1}, {2, 1}, {3, 1}}) == doctest::Approx(2.0));
    CHECK(weighted_median({{5, 1}, {7, 1}}) == doctest::Approx(6.0));
    CHECK(weighted_median({{42, 3}}) == doctest::Approx(42.0));
    CHECK(weighted_median({{1, 1}, {2, 3}}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(weighted_median({}), ParseError);

    PersonRecord p;
    p.commute_samples = {{10, 1}, {20, 1}, {100, 2}};
    CHECK(estimate_commute_time(p) == doctest::Approx(60.0));
}

TEST_CASE("feasibility uses the full home-work-poi-home chain") {
    CellIndex index(box());
    BudgetSpec budget;  // 90 min, 17:00
    std::vector<Poi> pois = {poi_at("a", 48.85, 2.35), poi_at("b", 48.88, 2.42)};

    SUBCASE("commute exceeding the budget leaves nothing") {
        LegTimes wk = {std::optional<double>(0.0), std::optional<double>(0.0)};
        LegTimes kh = wk;
        auto fs = compute_spa("p", Mode::car, 95.0, pois, wk, kh, budget, index);
        CHECK(fs.entries.empty());
        CHECK(fs.total_pois == 0);
    }
    SUBCASE("a colocated poi with zero legs is feasible with full remaining budget") {
        LegTimes wk = {std::optional<double>(0.0), std::nullopt};
        LegTimes kh = {std::optional<double>(0.0), std::nullopt};
        auto fs = compute_spa("p", Mode::car, 30.0, pois, wk, kh, budget, index);
        REQUIRE(fs.entries.size() == 1);
        CHECK(fs.total_pois == 1);
        CHECK(fs.entries[0].best_remaining_min == doctest::Approx(60.0));
        CHECK(fs.entries[0].rank == 1);
    }
    SUBCASE("the budget boundary is inclusive") {
        LegTimes wk = {std::optional<double>(30.0 * 60), std::optional<double>(30.0 * 60 + 1)};
        LegTimes kh = {std::optional<double>(30.0 * 60), std::optional<double>(30.0 * 60)};
        auto fs = compute_spa("p", Mode::car, 30.0, pois, wk, kh, budget, index);
        // poi a: 30+30+30 = 90 <= 90 feasible; poi b: 1 s over, infeasible
        REQUIRE(fs.total_pois == 1);
        CHECK(fs.entries[0].best_remaining_min == doctest::Approx(0.0));
    }
    SUBCASE("cells rank by best remaining budget, ties by token") {
        std::vector<Poi> many = {poi_at("a", 48.85, 2.35), poi_at("a2", 48.8502, 2.3502),
                                 poi_at("b", 48.88, 2.42)};
        LegTimes wk = {std::optional<double>(20.0 * 60), std::optional<double>(5.0 * 60),
                       std::optional<double>(10.0 * 60)};
        LegTimes kh = {std::optional<double>(20.0 * 60), std::optional<double>(5.0 * 60),
                       std::optional<double>(10.0 * 60)};
        auto fs = compute_spa("p", Mode::car, 30.0, many, wk, kh, budget, index);
        REQUIRE(fs.entries.size() == 2);
        CHECK(fs.total_pois == 3);
        // cell of a/a2 scores best remaining 50 (via a2), b's cell scores 40
        CHECK(fs.entries[0].poi_count == 2);
        CHECK(fs.entries[0].best_remaining_min == doctest::Approx(50.0));
        CHECK(fs.entries[0].rank == 1);
        CHECK(fs.entries[1].best_remaining_min == doctest::Approx(40.0));
        CHECK(fs.entries[1].rank == 2);
    }
}

TEST_CASE("feasible sets are monotone in budget and commute time") {
    CellIndex index(box());
    CounterRng rng(7);
    std::vector<Poi> pois;
    for (int i = 0; i < 60; ++i)
        pois.push_back(poi_at("p" + std::to_string(i), 48.81 + 0.1 * rng.next_double(),
                              2.26 + 0.18 * rng.next_double()));
    for (int rep = 0; rep < 50; ++rep) {
        LegTimes wk(pois.size()), kh(pois.size());
        for (size_t k = 0; k < pois.size(); ++k) {
            wk[k] = rng.next_double() < 0.1
                        ? std::nullopt
                        : std::optional<double>(3600.0 * rng.next_double());
            kh[k] = rng.next_double() < 0.1
                        ? std::nullopt
                        : std::optional<double>(3600.0 * rng.next_double());
        }
        double t_hw = 60.0 * rng.next_double();
        BudgetSpec small{60.0 + 30.0 * rng.next_double(), 17 * 3600};
        BudgetSpec large{small.tb_min + 15.0, 17 * 3600};
        auto fs_small = compute_spa("p", Mode::car, t_hw, pois, wk, kh, small, index);
        auto fs_large = compute_spa("p", Mode::car, t_hw, pois, wk, kh, large, index);
        auto fs_longer_commute =
            compute_spa("p", Mode::car, t_hw + 10.0, pois, wk, kh, small, index);
        CHECK(fs_large.total_pois >= fs_small.total_pois);
        CHECK(fs_longer_commute.total_pois <= fs_small.total_pois);
        // set containment, not just counts
        auto tokens = [](const FeasibleSet& fs) {
            std::set<std::string> t;
            for (const auto& e : fs.entries) t.insert(e.coarse_cell.token);
            return t;
        };
        auto s = tokens(fs_small), l = tokens(fs_large), c = tokens(fs_longer_commute);
        CHECK(std::includes(l.begin(), l.end(), s.begin(), s.end()));
        CHECK(std::includes(s.begin(), s.end(), c.begin(), c.end()));
    }
}

TEST_CASE("engine output equals the exhaustive oracle on synthetic cities") {
    for (uint64_t seed : {5ull, 6ull}) {
        synth::SynthSpec spec;
        spec.seed = seed;
        spec.n_persons = 8;
        auto city = synth::gen_city(spec);
        CellIndex index(city.box);
        auto persons = synth::gen_persons(spec, city, index);
        RoadNetwork roads(city.roads);
        RouterConfig cfg;
        cfg.max_transfers = 16;
        TransitNetwork net(city.gtfs, roads, spec.date, cfg);
        BudgetSpec budget;
        SpaEngine engine(roads, net, city.pois, index, budget, cfg);
        for (const auto& p : persons) {
            for (Mode mode : {Mode::car, Mode::transit}) {
                auto got = engine.spa_for(p, mode);
                auto want = synth::oracle_spa(p, mode, city, roads, net, index, budget,
                                              spec.date);
                CHECK(got.t_hw_min == doctest::Approx(want.t_hw_min));
                CHECK(got.total_pois == want.total_pois);
                REQUIRE(got.entries.size() == want.entries.size());
                for (size_t i = 0; i < got.entries.size(); ++i) {
                    CHECK(got.entries[i].coarse_cell.token == want.entries[i].coarse_cell.token);
                    CHECK(got.entries[i].poi_count == want.entries[i].poi_count);
                    CHECK(got.entries[i].rank == want.entries[i].rank);
                    CHECK(got.entries[i].best_remaining_min ==
                          doctest::Approx(want.entries[i].best_remaining_min).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("commute falls back to routing when no samples exist") {
    synth::SynthSpec spec;
    spec.n_persons = 2;
    auto city = synth::gen_city(spec);
    CellIndex index(city.box);
    auto persons = synth::gen_persons(spec, city, index);
    persons[0].commute_samples.clear();
    RoadNetwork roads(city.roads);
    TransitNetwork net(city.gtfs, roads, spec.date);
    SpaEngine engine(roads, net, city.pois, index, {});
    auto fs = engine.spa_for(persons[0], Mode::car);
    CHECK(fs.t_hw_from_router);
    auto fs1 = engine.spa_for(persons[1], Mode::car);
    CHECK_FALSE(fs1.t_hw_from_router);
}
