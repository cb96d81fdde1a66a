#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sta/access.hpp"
#include "sta/behavior.hpp"
#include "sta/ingest.hpp"
#include "sta/pathmodel.hpp"
#include "sta/rng.hpp"
#include "sta/router.hpp"
#include "sta/types.hpp"

namespace sta::synth {

struct SynthSpec {
    int grid_nx = 5, grid_ny = 5;
    double spacing_m = 500.0;
    double car_speed_kmh = 30.0;
    int n_lines = 2;             // horizontal + vertical transit lines
    double headway_min = 10.0;
    double transit_speed_kmh = 20.0;
    int service_start_s = 6 * 3600;
    int service_end_s = 22 * 3600;
    int n_pois = 40;
    int n_clusters = 3;
    double cluster_sd_m = 300.0;
    int n_persons = 20;
    double base_lat = 48.85, base_lon = 2.35;
    std::string date = "20230315";
    uint64_t seed = 42;
    double car_share = 0.4;
    std::string world = "selective";  // "null" draws visits uniformly from SPA
    double rank_bias = 0.5;           // geometric preference toward better ranks
    int max_visit_cells = 6;
    double commute_mean_min = 30.0, commute_sd_min = 10.0;
};

struct City {
    RoadGraphSource roads;
    GtfsBundle gtfs;
    std::vector<Poi> pois;
    BoundingBox box;
};

inline LatLon grid_coord(const SynthSpec& s, int i, int j) {
    double dy = j * s.spacing_m;
    double dx = i * s.spacing_m;
    double lat = s.base_lat + rad2deg(dy / kEarthRadiusM);
    double lon = s.base_lon + rad2deg(dx / (kEarthRadiusM * std::cos(deg2rad(s.base_lat))));
    return {lat, lon};
}

inline City gen_city(const SynthSpec& spec) {
    CounterRng rng = CounterRng(spec.seed).fork("city");
    City city;

    // Grid road network, bidirectional car+walk edges.
    auto node_id = [&](int i, int j) { return "n" + std::to_string(i) + "_" + std::to_string(j); };
    std::map<std::pair<int, int>, uint32_t> node_at;
    for (int j = 0; j < spec.grid_ny; ++j)
        for (int i = 0; i < spec.grid_nx; ++i) {
            LatLon c = grid_coord(spec, i, j);
            node_at[{i, j}] = uint32_t(city.roads.nodes.size());
            city.roads.nodes.push_back({node_id(i, j), c.lat, c.lon});
        }
    auto add_edge = [&](uint32_t a, uint32_t b) {
        city.roads.edges.push_back({a, b, spec.spacing_m, spec.car_speed_kmh,
                                    kModeCar | kModeWalk});
        city.roads.edges.push_back({b, a, spec.spacing_m, spec.car_speed_kmh,
                                    kModeCar | kModeWalk});
    };
    for (int j = 0; j < spec.grid_ny; ++j)
        for (int i = 0; i < spec.grid_nx; ++i) {
            if (i + 1 < spec.grid_nx) add_edge(node_at[{i, j}], node_at[{i + 1, j}]);
            if (j + 1 < spec.grid_ny) add_edge(node_at[{i, j}], node_at[{i, j + 1}]);
        }

    // Transit: alternating horizontal and vertical lines with regular headways.
    std::map<std::pair<int, int>, uint32_t> stop_at;
    auto stop_for = [&](int i, int j) {
        auto it = stop_at.find({i, j});
        if (it != stop_at.end()) return it->second;
        LatLon c = grid_coord(spec, i, j);
        uint32_t idx = uint32_t(city.gtfs.stops.size());
        city.gtfs.stops.push_back({"st" + std::to_string(i) + "_" + std::to_string(j), c.lat,
                                   c.lon});
        stop_at[{i, j}] = idx;
        return idx;
    };
    city.gtfs.services.push_back({"svc", {spec.date}});
    int hop_s = int(std::lround(spec.spacing_m / (spec.transit_speed_kmh * 1000.0 / 3600.0)));
    for (int line = 0; line < spec.n_lines; ++line) {
        bool horizontal = line % 2 == 0;
        int fixed = horizontal ? (line / 2 + 1) * spec.grid_ny / (spec.n_lines / 2 + 2)
                               : (line / 2 + 1) * spec.grid_nx / (spec.n_lines / 2 + 2);
        fixed = std::clamp(fixed, 0, (horizontal ? spec.grid_ny : spec.grid_nx) - 1);
        std::string route_id = "L" + std::to_string(line);
        city.gtfs.routes.push_back({route_id, route_id});
        std::vector<uint32_t> stops;
        int len = horizontal ? spec.grid_nx : spec.grid_ny;
        for (int k = 0; k < len; ++k)
            stops.push_back(horizontal ? stop_for(k, fixed) : stop_for(fixed, k));
        int headway_s = int(spec.headway_min * 60.0);
        int trip_no = 0;
        for (int dir = 0; dir < 2; ++dir) {
            auto seq = stops;
            if (dir == 1) std::reverse(seq.begin(), seq.end());
            for (int dep = spec.service_start_s; dep <= spec.service_end_s; dep += headway_s) {
                GtfsTrip trip;
                trip.id = route_id + "_d" + std::to_string(dir) + "_t" + std::to_string(trip_no++);
                trip.route_id = route_id;
                trip.service_id = "svc";
                int t = dep;
                for (size_t k = 0; k < seq.size(); ++k) {
                    trip.stop_times.push_back({t, t, int(k + 1), seq[k]});
                    t += hop_s;
                }
                city.gtfs.trips.push_back(std::move(trip));
            }
        }
    }

    // POIs clustered around a few centers inside the grid.
    double margin = rad2deg((2.0 * spec.spacing_m) / kEarthRadiusM);
    LatLon lo = grid_coord(spec, 0, 0), hi = grid_coord(spec, spec.grid_nx - 1, spec.grid_ny - 1);
    city.box = {lo.lat - margin, lo.lon - margin, hi.lat + margin, hi.lon + margin};
    std::vector<LatLon> centers;
    for (int c = 0; c < spec.n_clusters; ++c) {
        int i = int(rng.next_below(uint64_t(spec.grid_nx)));
        int j = int(rng.next_below(uint64_t(spec.grid_ny)));
        centers.push_back(grid_coord(spec, i, j));
    }
    for (int k = 0; k < spec.n_pois; ++k) {
        const LatLon& c = centers[k % centers.size()];
        double dx = rng.next_normal() * spec.cluster_sd_m;
        double dy = rng.next_normal() * spec.cluster_sd_m;
        double lat = c.lat + rad2deg(dy / kEarthRadiusM);
        double lon = c.lon + rad2deg(dx / (kEarthRadiusM * std::cos(deg2rad(spec.base_lat))));
        // clamp to the grid extent so derived coarse cells stay well inside
        // the bounding box
        lat = std::clamp(lat, lo.lat, hi.lat);
        lon = std::clamp(lon, lo.lon, hi.lon);
        Poi p;
        p.poi_id = "poi" + std::to_string(k);
        p.lat = lat;
        p.lon = lon;
        p.social_leisure = true;
        p.confidence = 0.71 + 0.29 * rng.next_double();
        city.pois.push_back(std::move(p));
    }
    return city;
}

// ------------------------------------------------------------------
// Independent routing oracles

// Single-pair earliest arrival over the raw timetable: Dijkstra on the
// time-expanded state graph (stop x arrived-by-walk flag). Shares walk-leg
// data with the main engine but none of the round-based search machinery.
inline std::optional<double> oracle_transit_time(const GtfsBundle& bundle,
                                                 const TransitNetwork& net,
                                                 const std::string& date, LatLon origin,
                                                 LatLon dest, int depart_s) {
    const size_t n_stops = bundle.stops.size();
    struct Conn {
        int dep_s, arr_s;
        uint32_t to;
    };
    std::vector<std::vector<Conn>> conns(n_stops);  // outgoing ride segments per stop
    for (const auto& trip : bundle.trips) {
        if (!bundle.service_active(trip.service_id, date)) continue;
        for (size_t i = 0; i + 1 < trip.stop_times.size(); ++i) {
            const auto& a = trip.stop_times[i];
            const auto& b = trip.stop_times[i + 1];
            conns[a.stop_index].push_back({a.departure_s, b.arrival_s, b.stop_index});
        }
    }

    auto access = net.access_walk(origin);
    auto egress = net.access_walk(dest, /*reverse=*/true);

    // state = stop * 2 + flag, flag 1 = arrived by ride (may take a footpath)
    std::vector<double> dist(n_stops * 2, kInf);
    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (size_t s = 0; s < n_stops; ++s) {
        if (access[s] == kInf) continue;
        dist[s * 2] = depart_s + access[s];
        pq.push({dist[s * 2], s * 2});
    }
    double best_arrival = kInf;
    if (dest.lat == origin.lat && dest.lon == origin.lon) best_arrival = depart_s;
    if (auto w = net.direct_walk(origin, dest)) best_arrival = std::min(best_arrival, depart_s + *w);

    while (!pq.empty()) {
        auto [d, state] = pq.top();
        pq.pop();
        if (d > dist[state]) continue;
        size_t s = state / 2;
        bool by_ride = state % 2 == 1;
        if (egress[s] != kInf) best_arrival = std::min(best_arrival, d + egress[s]);
        for (const auto& c : conns[s]) {
            if (c.dep_s < d) continue;
            size_t ns = c.to * 2 + 1;
            if (c.arr_s < dist[ns]) {
                dist[ns] = c.arr_s;
                pq.push({double(c.arr_s), ns});
            }
        }
        if (by_ride) {
            for (auto [t, secs] : net.footpaths(uint32_t(s))) {
                size_t ns = size_t(t) * 2;
                if (d + secs < dist[ns]) {
                    dist[ns] = d + secs;
                    pq.push({dist[ns], ns});
                }
            }
        }
    }
    if (best_arrival == kInf) return std::nullopt;
    return best_arrival - depart_s;
}

// Bellman-Ford one-to-all car seconds; brute-force check of the Dijkstra path.
inline std::vector<double> oracle_car_seconds(const RoadGraphSource& src, uint32_t origin) {
    std::vector<double> dist(src.nodes.size(), kInf);
    dist[origin] = 0.0;
    for (size_t it = 0; it < src.nodes.size(); ++it) {
        bool changed = false;
        for (const auto& e : src.edges) {
            if (!(e.mode_mask & kModeCar)) continue;
            if (dist[e.from] == kInf) continue;
            double nd = dist[e.from] + e.travel_s();
            if (nd < dist[e.to] - 1e-12) {
                dist[e.to] = nd;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return dist;
}

// Exhaustive per-POI feasibility check using the oracle routers; reference
// for compute_spa on small instances.
inline FeasibleSet oracle_spa(const PersonRecord& person, Mode mode, const City& city,
                              const RoadNetwork& roads, const TransitNetwork& net,
                              const CellIndex& index, const BudgetSpec& budget,
                              const std::string& date) {
    LatLon work = index.centroid(person.work_cell);
    LatLon home = index.centroid(person.home_cell);

    auto travel_min = [&](LatLon a, LatLon b) -> std::optional<double> {
        if (mode == Mode::car) {
            if (a.lat == b.lat && a.lon == b.lon) return 0.0;
            uint32_t na = roads.snap(a, net.config().snap_radius_m);
            uint32_t nb = roads.snap(b, net.config().snap_radius_m);
            if (na == kNoNode || nb == kNoNode) return std::nullopt;
            auto d = oracle_car_seconds(city.roads, na);
            if (d[nb] == kInf) return std::nullopt;
            return d[nb] / 60.0;
        }
        auto t = oracle_transit_time(city.gtfs, net, date, a, b, budget.depart_s);
        return t ? std::optional<double>(*t / 60.0) : std::nullopt;
    };

    double t_hw;
    if (person.commute_samples.empty()) {
        auto routed = travel_min(work, home);
        t_hw = routed ? *routed : budget.tb_min + 1.0;
    } else {
        std::vector<std::pair<double, double>> vw;
        for (const auto& s : person.commute_samples) vw.push_back({s.duration_min, s.day_weight});
        t_hw = weighted_median(std::move(vw));
    }

    struct Agg {
        double best = 0.0;
        int count = 0;
    };
    std::map<std::string, Agg> cells;
    for (const auto& poi : city.pois) {
        auto wk = travel_min(work, {poi.lat, poi.lon});
        auto kh = travel_min({poi.lat, poi.lon}, home);
        if (!wk || !kh) continue;
        double total = t_hw + *wk + *kh;
        if (total > budget.tb_min) continue;
        double remaining = budget.tb_min - total;
        auto cell = index.bin_point(poi.lat, poi.lon, Resolution::coarse);
        auto [it, fresh] = cells.try_emplace(cell.token);
        if (fresh || remaining > it->second.best) it->second.best = remaining;
        it->second.count += 1;
    }

    FeasibleSet fs;
    fs.person_id = person.person_id;
    fs.mode = mode;
    fs.t_hw_min = t_hw;
    fs.t_hw_from_router = person.commute_samples.empty();
    for (auto& [token, agg] : cells) {
        fs.entries.push_back({{token, Resolution::coarse}, agg.best, agg.count, 0});
        fs.total_pois += agg.count;
    }
    std::sort(fs.entries.begin(), fs.entries.end(), [](const auto& a, const auto& b) {
        if (a.best_remaining_min != b.best_remaining_min)
            return a.best_remaining_min > b.best_remaining_min;
        return a.coarse_cell.token < b.coarse_cell.token;
    });
    for (size_t i = 0; i < fs.entries.size(); ++i) fs.entries[i].rank = int(i + 1);
    return fs;
}

// ------------------------------------------------------------------
// Population, diary and SEM simulation

inline std::vector<PersonRecord> gen_persons(const SynthSpec& spec, const City& city,
                                             const CellIndex& index) {
    CounterRng rng = CounterRng(spec.seed).fork("persons");
    static const char* households[] = {
        "Living alone", "In a couple w/o children", "Single parent", "Living with parent(s)",
        "In a couple w/ child(ren)"};
    static const char* education[] = {"Vocational", "Upper secondary",
                                      "3-4-year higher education",
                                      "5-year-and-above higher education"};
    std::vector<PersonRecord> persons;
    for (int i = 0; i < spec.n_persons; ++i) {
        PersonRecord p;
        p.person_id = "p" + std::to_string(i);
        int hi = int(rng.next_below(uint64_t(city.roads.nodes.size())));
        int wi = int(rng.next_below(uint64_t(city.roads.nodes.size())));
        const auto& hn = city.roads.nodes[hi];
        const auto& wn = city.roads.nodes[wi];
        p.home_cell = index.bin_point(hn.lat, hn.lon, Resolution::fine);
        p.work_cell = index.bin_point(wn.lat, wn.lon, Resolution::fine);
        p.weight = std::exp(0.3 * rng.next_normal());
        bool car = rng.next_double() < spec.car_share;
        p.attributes["main_mode"] = car ? "car" : "transit";
        p.attributes["active_mode"] = rng.next_double() < 0.379 ? "yes" : "no";
        p.attributes["pt_subscription"] = rng.next_double() < (car ? 0.3 : 0.8) ? "yes" : "no";
        p.attributes["household_type"] = households[rng.next_below(5)];
        p.attributes["education"] = education[rng.next_below(4)];
        p.attributes["gender"] = rng.next_below(2) ? "Man" : "Woman";
        p.attributes["age"] = csv::Writer::fmt(std::clamp(43.0 + 12.0 * rng.next_normal(), 16.0,
                                                          80.0), 2);
        p.attributes["zone_poverty_rate"] =
            csv::Writer::fmt(std::clamp(15.8 + 8.0 * rng.next_normal(), 0.0, 60.0), 4);
        for (int d = 0; d < 3; ++d) {
            double dur = std::max(5.0, spec.commute_mean_min + spec.commute_sd_min *
                                                                   rng.next_normal());
            p.commute_samples.push_back({dur, 1.0});
        }
        persons.push_back(std::move(p));
    }
    return persons;
}

// Distinct coarse cells drawn from a feasible set, uniformly in the null
// world, geometrically biased toward better ranks otherwise.
inline std::vector<int> draw_visit_cells(const FeasibleSet& spa, int k, bool null_world,
                                         double rank_bias, CounterRng& rng) {
    int n = int(spa.entries.size());
    k = std::min(k, n);
    if (null_world) {
        auto idx = rng.sample_without_replacement(uint32_t(n), uint32_t(k));
        return std::vector<int>(idx.begin(), idx.end());
    }
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> out;
    for (int pick = 0; pick < k; ++pick) {
        std::vector<double> weightv(pool.size());
        double tot = 0.0;
        for (size_t i = 0; i < pool.size(); ++i) {
            weightv[i] = std::pow(1.0 - rank_bias, double(spa.entries[pool[i]].rank - 1));
            tot += weightv[i];
        }
        double u = rng.next_double() * tot, cum = 0.0;
        size_t chosen = pool.size() - 1;
        for (size_t i = 0; i < pool.size(); ++i) {
            cum += weightv[i];
            if (u <= cum) {
                chosen = i;
                break;
            }
        }
        out.push_back(pool[chosen]);
        pool.erase(pool.begin() + chosen);
    }
    return out;
}

// Fine cell that is guaranteed to map back to the given coarse parent.
inline CellId fine_inside(const CellIndex& index, const CellId& coarse) {
    LatLon c = index.centroid(coarse);
    return index.bin_point(c.lat, c.lon, Resolution::fine);
}

struct Diary {
    std::vector<TripRecord> trips;
    std::map<std::string, VisitSet> visits;  // ground truth by person
};

inline Diary gen_diary(const SynthSpec& spec, const std::vector<PersonRecord>& persons,
                       const std::vector<FeasibleSet>& spa_sets, const CellIndex& index) {
    Diary diary;
    bool null_world = spec.world == "null";
    static const char* dates[] = {"20230313", "20230314", "20230315"};
    for (size_t pi = 0; pi < persons.size(); ++pi) {
        const auto& person = persons[pi];
        const auto& spa = spa_sets[pi];
        CounterRng rng = CounterRng(spec.seed).fork("diary").fork(person.person_id);
        // Commute trips, one per diary day.
        for (int d = 0; d < 3; ++d) {
            TripRecord t;
            t.person_id = person.person_id;
            t.date = dates[d];
            t.origin_cell = person.home_cell;
            t.dest_cell = person.work_cell;
            t.mode = person.attributes.at("main_mode") == "car" ? Mode::car : Mode::transit;
            t.purpose = Purpose::work;
            t.duration_min = person.commute_samples[d % person.commute_samples.size()].duration_min;
            t.depart_time = 8 * 3600 + int(rng.next_below(1800));
            diary.trips.push_back(t);
        }
        if (spa.entries.empty()) continue;
        int k = 1 + int(rng.next_below(uint64_t(spec.max_visit_cells)));
        auto cells = draw_visit_cells(spa, k, null_world, spec.rank_bias, rng);
        VisitSet vs;
        vs.person_id = person.person_id;
        for (int ci : cells) {
            int times = 1 + int(rng.next_below(3));
            const CellId& coarse = spa.entries[ci].coarse_cell;
            vs.visits[coarse.token] += times;
            CellId fine = fine_inside(index, coarse);
            for (int v = 0; v < times; ++v) {
                TripRecord t;
                t.person_id = person.person_id;
                t.date = dates[rng.next_below(3)];
                t.origin_cell = person.work_cell;
                t.dest_cell = fine;
                t.mode = person.attributes.at("main_mode") == "car" ? Mode::car : Mode::transit;
                t.purpose = Purpose::leisure;
                t.duration_min = 10.0 + 20.0 * rng.next_double();
                t.depart_time = 17 * 3600 + int(rng.next_below(3600));
                diary.trips.push_back(t);
            }
        }
        diary.visits[person.person_id] = std::move(vs);
    }
    return diary;
}

// ------------------------------------------------------------------
// Dataset writers: one directory in the layout the ingest module expects.

inline void write_inputs(const City& city, const std::vector<PersonRecord>& persons,
                         const std::vector<TripRecord>& trips,
                         const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        csv::Writer w(dir / "roads_nodes.csv");
        w.row({"node_id", "lat", "lon"});
        for (const auto& n : city.roads.nodes)
            w.row({n.id, csv::Writer::fmt(n.lat, 7), csv::Writer::fmt(n.lon, 7)});
    }
    {
        csv::Writer w(dir / "roads_edges.csv");
        w.row({"from_node", "to_node", "length_m", "speed_kmh", "modes"});
        for (const auto& e : city.roads.edges) {
            std::string modes;
            if (e.mode_mask & kModeCar) modes += "car";
            if (e.mode_mask & kModeWalk) modes += modes.empty() ? "walk" : "|walk";
            w.row({city.roads.nodes[e.from].id, city.roads.nodes[e.to].id,
                   csv::Writer::fmt(e.length_m, 2), csv::Writer::fmt(e.speed_kmh, 2), modes});
        }
    }
    {
        csv::Writer w(dir / "pois.csv");
        w.row({"poi_id", "lat", "lon", "category", "confidence"});
        for (const auto& p : city.pois)
            w.row({p.poi_id, csv::Writer::fmt(p.lat, 7), csv::Writer::fmt(p.lon, 7),
                   p.social_leisure ? "social_leisure" : "other",
                   csv::Writer::fmt(p.confidence, 4)});
    }
    {
        csv::Writer w(dir / "persons.csv");
        w.row({"person_id", "weight", "home_cell", "work_cell", "household_type", "education",
               "gender", "active_mode", "pt_subscription", "main_mode", "age",
               "zone_poverty_rate"});
        for (const auto& p : persons)
            w.row({p.person_id, csv::Writer::fmt(p.weight, 6), p.home_cell.token,
                   p.work_cell.token, p.attributes.at("household_type"),
                   p.attributes.at("education"), p.attributes.at("gender"),
                   p.attributes.at("active_mode"), p.attributes.at("pt_subscription"),
                   p.attributes.at("main_mode"), p.attributes.at("age"),
                   p.attributes.at("zone_poverty_rate")});
    }
    {
        csv::Writer w(dir / "trips.csv");
        w.row({"person_id", "date", "origin_cell", "dest_cell", "mode", "purpose",
               "duration_min", "depart_time"});
        for (const auto& t : trips)
            w.row({t.person_id, t.date, t.origin_cell.token, t.dest_cell.token,
                   mode_name(t.mode), ingest::purpose_name(t.purpose),
                   csv::Writer::fmt(t.duration_min, 3), std::to_string(t.depart_time)});
    }
    ingest::write_gtfs(city.gtfs, dir / "gtfs");
}

// Simulates observations from a recursive DAG with the given standardized
// edge coefficients; exogenous nodes are independent standard normals and
// residual variances keep every variable at unit population variance. The
// fitted standardized coefficients of the correct model recover the inputs.
inline pathmodel::Dataset simulate_from_dag(
    const pathmodel::PathDag& dag,
    const std::map<std::pair<std::string, std::string>, double>& coef, size_t n,
    CounterRng rng) {
    auto order = dag.topo_order();
    const int p = int(dag.nodes.size());

    // Population covariance by path tracing with unit variances.
    Eigen::MatrixXd Sigma = Eigen::MatrixXd::Identity(p, p);
    std::vector<double> resid_sd(p, 1.0);
    std::vector<bool> done(p, false);
    for (int node : order) {
        auto parents = dag.parents(node);
        if (parents.empty()) {
            done[node] = true;
            continue;
        }
        Eigen::VectorXd beta(parents.size());
        for (size_t k = 0; k < parents.size(); ++k)
            beta[int(k)] = coef.at({dag.nodes[parents[k]], dag.nodes[node]});
        for (int z = 0; z < p; ++z) {
            if (!done[z] || z == node) continue;
            double c = 0.0;
            for (size_t k = 0; k < parents.size(); ++k) c += beta[int(k)] * Sigma(parents[k], z);
            Sigma(node, z) = Sigma(z, node) = c;
        }
        double explained = 0.0;
        for (size_t a = 0; a < parents.size(); ++a)
            for (size_t b = 0; b < parents.size(); ++b)
                explained += beta[int(a)] * beta[int(b)] * Sigma(parents[a], parents[b]);
        if (explained >= 1.0)
            throw ParseError("coefficients imply variance >= 1 at " + dag.nodes[node]);
        resid_sd[node] = std::sqrt(1.0 - explained);
        Sigma(node, node) = 1.0;
        done[node] = true;
    }

    pathmodel::Dataset data;
    data.names = dag.nodes;
    data.values.resize(long(n), p);
    data.weights = Eigen::VectorXd::Ones(long(n));
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> row(p, 0.0);
        for (int node : order) {
            auto parents = dag.parents(node);
            double v = 0.0;
            for (int pa : parents) v += coef.at({dag.nodes[pa], dag.nodes[node]}) * row[pa];
            v += resid_sd[node] * rng.next_normal();
            row[node] = v;
        }
        for (int j = 0; j < p; ++j) data.values(long(i), j) = row[j];
    }
    // Mildly varying survey weights keep the weighted path exercised.
    for (size_t i = 0; i < n; ++i) data.weights[long(i)] = std::exp(0.2 * rng.next_normal());
    return data;
}

}  // namespace sta::synth
