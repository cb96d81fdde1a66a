#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "sta/errors.hpp"
#include "sta/types.hpp"

namespace sta {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr uint32_t kNoNode = std::numeric_limits<uint32_t>::max();

struct RouterConfig {
    double walk_speed_kmh = 4.8;   // walk legs use this speed over edge lengths
    double snap_radius_m = 500.0;  // point -> nearest road node
    double walk_radius_m = 500.0;  // max length of one walk leg (access/egress/footpath)
    int max_transfers = 5;
};

struct TravelTimeMatrix {
    std::string origin_id;
    int depart_s = 0;
    Mode mode = Mode::car;
    // Indexed like the query's destination list; nullopt = unreachable.
    std::vector<std::optional<double>> seconds;
};

// ------------------------------------------------------------------
// Road network

class RoadNetwork {
public:
    explicit RoadNetwork(const RoadGraphSource& src) : nodes_(src.nodes) {
        car_adj_.resize(nodes_.size());
        walk_adj_.resize(nodes_.size());
        walk_radj_.resize(nodes_.size());
        for (const auto& e : src.edges) {
            if (e.from >= nodes_.size() || e.to >= nodes_.size())
                throw DanglingReference("node", std::to_string(std::max(e.from, e.to)));
            if (e.mode_mask & kModeCar) car_adj_[e.from].push_back({e.to, e.travel_s()});
            if (e.mode_mask & kModeWalk) {
                walk_adj_[e.from].push_back({e.to, e.length_m});
                walk_radj_[e.to].push_back({e.from, e.length_m});
            }
        }
        flag_components();
    }

    size_t node_count() const { return nodes_.size(); }
    const RoadNode& node(uint32_t i) const { return nodes_[i]; }
    size_t off_main_component() const { return off_main_component_; }

    uint32_t snap(LatLon p, double radius_m) const {
        uint32_t best = kNoNode;
        double best_d = radius_m;
        for (uint32_t i = 0; i < nodes_.size(); ++i) {
            double d = haversine_m(p, {nodes_[i].lat, nodes_[i].lon});
            if (d < best_d || (best == kNoNode && d <= best_d)) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    // One-to-all car travel seconds from a node.
    std::vector<double> car_seconds_from(uint32_t origin) const {
        return dijkstra(car_adj_, origin, kInf);
    }

    // Walk distances (meters) within max_dist_m, forward or reverse.
    std::vector<double> walk_meters_from(uint32_t origin, double max_dist_m,
                                         bool reverse = false) const {
        return dijkstra(reverse ? walk_radj_ : walk_adj_, origin, max_dist_m);
    }

private:
    using Adj = std::vector<std::vector<std::pair<uint32_t, double>>>;

    static std::vector<double> dijkstra(const Adj& adj, uint32_t origin, double cap) {
        std::vector<double> dist(adj.size(), kInf);
        using Item = std::pair<double, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[origin] = 0.0;
        pq.push({0.0, origin});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (auto [v, w] : adj[u]) {
                double nd = d + w;
                if (nd <= cap && nd < dist[v]) {
                    dist[v] = nd;
                    pq.push({nd, v});
                }
            }
        }
        return dist;
    }

    void flag_components() {
        // Union over undirected reachability of any edge type.
        std::vector<uint32_t> parent(nodes_.size());
        for (uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
        std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](uint32_t a, uint32_t b) { parent[find(a)] = find(b); };
        for (uint32_t u = 0; u < nodes_.size(); ++u) {
            for (auto [v, w] : car_adj_[u]) unite(u, v);
            for (auto [v, w] : walk_adj_[u]) unite(u, v);
        }
        std::unordered_map<uint32_t, size_t> sizes;
        for (uint32_t i = 0; i < nodes_.size(); ++i) sizes[find(i)]++;
        size_t largest = 0;
        for (auto& [r, n] : sizes) largest = std::max(largest, n);
        off_main_component_ = nodes_.size() - largest;
    }

    std::vector<RoadNode> nodes_;
    Adj car_adj_, walk_adj_, walk_radj_;
    size_t off_main_component_ = 0;
};

// One-to-many free-flow car times. Departure time is recorded but does not
// affect the result.
inline TravelTimeMatrix car_travel_time(const RoadNetwork& net, LatLon origin,
                                        const std::vector<LatLon>& dests, int depart_s,
                                        const RouterConfig& cfg = {}) {
    TravelTimeMatrix m;
    m.depart_s = depart_s;
    m.mode = Mode::car;
    uint32_t o = net.snap(origin, cfg.snap_radius_m);
    if (o == kNoNode) throw SnapFailure(origin.lat, origin.lon);
    auto dist = net.car_seconds_from(o);
    m.seconds.reserve(dests.size());
    for (const auto& d : dests) {
        if (d.lat == origin.lat && d.lon == origin.lon) {
            m.seconds.push_back(0.0);
            continue;
        }
        uint32_t dn = net.snap(d, cfg.snap_radius_m);
        if (dn == kNoNode) throw SnapFailure(d.lat, d.lon);
        if (dist[dn] == kInf) m.seconds.push_back(std::nullopt);
        else m.seconds.push_back(dist[dn]);
    }
    return m;
}

// ------------------------------------------------------------------
// Transit network (compiled timetable)

struct StopEvent {
    int arrival_s = 0;
    int departure_s = 0;
};

struct CompiledRoute {
    std::vector<uint32_t> stops;                 // stop indices along the route
    std::vector<std::vector<StopEvent>> trips;   // sorted by first departure, non-overtaking
};

class TransitNetwork {
public:
    TransitNetwork(const GtfsBundle& bundle, const RoadNetwork& roads, const std::string& date,
                   const RouterConfig& cfg = {})
        : roads_(&roads), cfg_(cfg) {
        stops_.reserve(bundle.stops.size());
        for (const auto& s : bundle.stops) stops_.push_back({s.lat, s.lon});
        stop_nodes_.resize(stops_.size(), kNoNode);
        for (size_t i = 0; i < stops_.size(); ++i)
            stop_nodes_[i] = roads.snap(stops_[i], cfg.snap_radius_m);

        compile(bundle, date);
        build_footpaths(bundle);
    }

    size_t stop_count() const { return stops_.size(); }
    size_t route_count() const { return routes_.size(); }
    const std::vector<CompiledRoute>& routes() const { return routes_; }
    const RouterConfig& config() const { return cfg_; }
    const RoadNetwork& roads() const { return *roads_; }
    LatLon stop_coord(uint32_t s) const { return stops_[s]; }
    uint32_t stop_node(uint32_t s) const { return stop_nodes_[s]; }
    const std::vector<std::pair<uint32_t, double>>& footpaths(uint32_t s) const {
        return footpaths_[s];
    }

    double walk_seconds(double meters) const {
        return meters / (cfg_.walk_speed_kmh * 1000.0 / 3600.0);
    }

    // Walk seconds from a coordinate to every stop within the walk radius.
    std::vector<double> access_walk(LatLon origin, bool reverse = false) const {
        std::vector<double> out(stops_.size(), kInf);
        uint32_t n = roads_->snap(origin, cfg_.snap_radius_m);
        if (n == kNoNode) return out;
        auto dist = roads_->walk_meters_from(n, cfg_.walk_radius_m, reverse);
        for (size_t s = 0; s < stops_.size(); ++s)
            if (stop_nodes_[s] != kNoNode && dist[stop_nodes_[s]] != kInf)
                out[s] = walk_seconds(dist[stop_nodes_[s]]);
        return out;
    }

    // Direct walk seconds between two coordinates, capped by the walk radius.
    std::optional<double> direct_walk(LatLon a, LatLon b) const {
        if (a.lat == b.lat && a.lon == b.lon) return 0.0;
        uint32_t na = roads_->snap(a, cfg_.snap_radius_m);
        uint32_t nb = roads_->snap(b, cfg_.snap_radius_m);
        if (na == kNoNode || nb == kNoNode) return std::nullopt;
        if (na == nb) return 0.0;
        auto dist = roads_->walk_meters_from(na, cfg_.walk_radius_m);
        if (dist[nb] == kInf) return std::nullopt;
        return walk_seconds(dist[nb]);
    }

private:
    void compile(const GtfsBundle& bundle, const std::string& date) {
        // Group active trips by their exact stop sequence.
        std::map<std::vector<uint32_t>, std::vector<std::vector<StopEvent>>> groups;
        bool any_active = false;
        for (const auto& trip : bundle.trips) {
            if (trip.stop_times.empty()) continue;
            if (!bundle.service_active(trip.service_id, date)) continue;
            any_active = true;
            std::vector<uint32_t> seq;
            std::vector<StopEvent> events;
            for (const auto& st : trip.stop_times) {
                seq.push_back(st.stop_index);
                events.push_back({st.arrival_s, st.departure_s});
            }
            groups[seq].push_back(std::move(events));
        }
        if (!any_active) throw NoServiceOnDate(date);

        // Sort by first departure and split overtaking trips so each compiled
        // route is FIFO.
        for (auto& [seq, trips] : groups) {
            std::sort(trips.begin(), trips.end(),
                      [](const auto& a, const auto& b) {
                          return a.front().departure_s < b.front().departure_s;
                      });
            std::vector<CompiledRoute> split;
            for (auto& trip : trips) {
                bool placed = false;
                for (auto& r : split) {
                    const auto& last = r.trips.back();
                    bool dominated = true;
                    for (size_t i = 0; i < trip.size(); ++i)
                        dominated &= trip[i].arrival_s >= last[i].arrival_s &&
                                     trip[i].departure_s >= last[i].departure_s;
                    if (dominated) {
                        r.trips.push_back(trip);
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    CompiledRoute r;
                    r.stops = seq;
                    r.trips.push_back(trip);
                    split.push_back(std::move(r));
                }
            }
            for (auto& r : split) routes_.push_back(std::move(r));
        }

        routes_at_stop_.resize(stops_.size());
        for (uint32_t r = 0; r < routes_.size(); ++r)
            for (uint32_t i = 0; i < routes_[r].stops.size(); ++i)
                routes_at_stop_[routes_[r].stops[i]].push_back({r, i});
    }

    void build_footpaths(const GtfsBundle& bundle) {
        footpaths_.resize(stops_.size());
        for (uint32_t s = 0; s < stops_.size(); ++s) {
            if (stop_nodes_[s] == kNoNode) continue;
            auto dist = roads_->walk_meters_from(stop_nodes_[s], cfg_.walk_radius_m);
            for (uint32_t t = 0; t < stops_.size(); ++t) {
                if (t == s || stop_nodes_[t] == kNoNode) continue;
                if (dist[stop_nodes_[t]] != kInf)
                    footpaths_[s].push_back({t, walk_seconds(dist[stop_nodes_[t]])});
            }
        }
        for (const auto& tr : bundle.transfers) {
            bool found = false;
            for (auto& [t, secs] : footpaths_[tr.from_stop])
                if (t == tr.to_stop) {
                    secs = std::max(secs, double(tr.min_transfer_s));
                    found = true;
                }
            if (!found)
                footpaths_[tr.from_stop].push_back({tr.to_stop, double(tr.min_transfer_s)});
        }
    }

public:
    // Exposed for the round-based search below.
    const std::vector<std::vector<std::pair<uint32_t, uint32_t>>>& routes_at_stop() const {
        return routes_at_stop_;
    }

private:
    const RoadNetwork* roads_;
    RouterConfig cfg_;
    std::vector<LatLon> stops_;
    std::vector<uint32_t> stop_nodes_;
    std::vector<CompiledRoute> routes_;
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> routes_at_stop_;  // (route, offset)
    std::vector<std::vector<std::pair<uint32_t, double>>> footpaths_;          // (stop, seconds)
};

// Round-based earliest-arrival search at a fixed departure clock time.
// One walk access leg, up to max_transfers+1 rides with footpaths between
// rides, one walk egress leg. Unreachable destinations stay absent.
inline TravelTimeMatrix transit_travel_time(const TransitNetwork& net, LatLon origin,
                                            const std::vector<LatLon>& dests, int depart_s) {
    const auto& cfg = net.config();
    const size_t n_stops = net.stop_count();
    const double depart = double(depart_s);

    std::vector<double> tau(n_stops, kInf);   // best arrival by any means
    std::vector<double> ride(n_stops, kInf);  // best arrival ending with a ride
    std::vector<bool> marked(n_stops, false);

    auto access = net.access_walk(origin);
    for (size_t s = 0; s < n_stops; ++s) {
        if (access[s] == kInf) continue;
        tau[s] = depart + access[s];
        marked[s] = true;
    }

    int rounds = cfg.max_transfers + 1;
    for (int k = 0; k < rounds; ++k) {
        // Collect routes touching marked stops, with the earliest marked offset.
        std::unordered_map<uint32_t, uint32_t> queue;  // route -> min offset
        for (uint32_t s = 0; s < n_stops; ++s) {
            if (!marked[s]) continue;
            for (auto [r, off] : net.routes_at_stop()[s]) {
                auto it = queue.find(r);
                if (it == queue.end() || off < it->second) queue[r] = off;
            }
            marked[s] = false;
        }

        std::vector<uint32_t> improved;
        std::vector<std::pair<uint32_t, uint32_t>> ordered(queue.begin(), queue.end());
        std::sort(ordered.begin(), ordered.end());
        for (auto [r, off0] : ordered) {
            const auto& route = net.routes()[r];
            int trip = -1;
            for (uint32_t i = off0; i < route.stops.size(); ++i) {
                uint32_t s = route.stops[i];
                if (trip >= 0) {
                    double arr = route.trips[trip][i].arrival_s;
                    // A ride arrival later than a walk arrival still matters:
                    // only it unlocks a footpath from this stop.
                    if (arr < ride[s]) {
                        ride[s] = arr;
                        improved.push_back(s);
                    }
                    if (arr < tau[s]) {
                        tau[s] = arr;
                        marked[s] = true;
                    }
                }
                // Hop on an earlier trip if boarding here is possible sooner.
                double board = tau[s];
                if (board != kInf) {
                    int lo = trip >= 0 ? trip : int(route.trips.size());
                    for (int t = 0; t < lo; ++t) {
                        if (route.trips[t][i].departure_s >= board) {
                            trip = t;
                            break;
                        }
                    }
                }
            }
        }

        // Footpaths fan out from ride arrivals only, so two footpaths never
        // chain: the relaxation reads ride[] and writes tau[] only.
        std::sort(improved.begin(), improved.end());
        improved.erase(std::unique(improved.begin(), improved.end()), improved.end());
        for (uint32_t s : improved) {
            for (auto [t, secs] : net.footpaths(s)) {
                double nt = ride[s] + secs;
                if (nt < tau[t]) {
                    tau[t] = nt;
                    marked[t] = true;
                }
            }
        }
        bool any = false;
        for (uint32_t s = 0; s < n_stops; ++s) any |= marked[s];
        if (!any) break;
    }

    TravelTimeMatrix m;
    m.depart_s = depart_s;
    m.mode = Mode::transit;
    m.seconds.reserve(dests.size());
    for (const auto& d : dests) {
        double arrival = kInf;
        if (d.lat == origin.lat && d.lon == origin.lon) arrival = depart;
        auto egress = net.access_walk(d, /*reverse=*/true);
        for (size_t s = 0; s < n_stops; ++s)
            if (tau[s] != kInf && egress[s] != kInf)
                arrival = std::min(arrival, tau[s] + egress[s]);
        if (auto w = net.direct_walk(origin, d)) arrival = std::min(arrival, depart + *w);
        if (arrival == kInf) m.seconds.push_back(std::nullopt);
        else m.seconds.push_back(arrival - depart);
    }
    return m;
}

inline TransitNetwork build_transit(const GtfsBundle& bundle, const RoadNetwork& roads,
                                    const std::string& date, const RouterConfig& cfg = {}) {
    return TransitNetwork(bundle, roads, date, cfg);
}

}  // namespace sta
