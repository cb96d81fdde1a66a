#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "sta/parallel.hpp"
#include "sta/router.hpp"
#include "sta/spatial.hpp"
#include "sta/types.hpp"

namespace sta {

struct BudgetSpec {
    double tb_min = 90.0;
    int depart_s = 17 * 3600;
};

struct FeasibleEntry {
    CellId coarse_cell;
    double best_remaining_min = 0.0;
    int poi_count = 0;
    int rank = 0;  // 1 = best
};

struct FeasibleSet {
    std::string person_id;
    Mode mode = Mode::car;
    double t_hw_min = 0.0;
    bool t_hw_from_router = false;  // fallback path, no observed commutes
    std::vector<FeasibleEntry> entries;
    long total_pois = 0;  // A_i

    size_t cell_count() const { return entries.size(); }  // N_i
};

// Weighted median of observed commute durations. When the cumulative weight
// hits exactly half the total mass, the median is the midpoint of the
// straddling values.
inline double weighted_median(std::vector<std::pair<double, double>> value_weight) {
    if (value_weight.empty()) throw ParseError("weighted_median of empty sample set");
    std::sort(value_weight.begin(), value_weight.end());
    double total = 0.0;
    for (auto& [v, w] : value_weight) total += w;
    double half = total / 2.0, cum = 0.0;
    for (size_t i = 0; i < value_weight.size(); ++i) {
        cum += value_weight[i].second;
        if (cum > half) return value_weight[i].first;
        if (cum == half) {
            if (i + 1 < value_weight.size())
                return 0.5 * (value_weight[i].first + value_weight[i + 1].first);
            return value_weight[i].first;
        }
    }
    return value_weight.back().first;
}

inline double estimate_commute_time(const PersonRecord& person) {
    std::vector<std::pair<double, double>> vw;
    vw.reserve(person.commute_samples.size());
    for (const auto& s : person.commute_samples) vw.push_back({s.duration_min, s.day_weight});
    return weighted_median(std::move(vw));
}

// Per-POI leg times in seconds; nullopt = unreachable.
using LegTimes = std::vector<std::optional<double>>;

// Eq.-style feasibility over every POI: a POI counts iff
// t_hw + t_wk + t_kh <= tb, all in minutes. Feasible POIs are grouped into
// coarse cells; each cell scores the best remaining budget of its POIs.
inline FeasibleSet compute_spa(const std::string& person_id, Mode mode, double t_hw_min,
                               const std::vector<Poi>& pois, const LegTimes& work_to_poi_s,
                               const LegTimes& poi_to_home_s, const BudgetSpec& budget,
                               const CellIndex& index) {
    FeasibleSet fs;
    fs.person_id = person_id;
    fs.mode = mode;
    fs.t_hw_min = t_hw_min;

    struct CellAgg {
        double best_remaining = 0.0;
        int count = 0;
    };
    std::map<std::string, CellAgg> cells;
    for (size_t k = 0; k < pois.size(); ++k) {
        if (!work_to_poi_s[k] || !poi_to_home_s[k]) continue;
        double total = t_hw_min + *work_to_poi_s[k] / 60.0 + *poi_to_home_s[k] / 60.0;
        if (total > budget.tb_min) continue;
        double remaining = budget.tb_min - total;
        CellId cell = index.bin_point(pois[k].lat, pois[k].lon, Resolution::coarse);
        auto [it, fresh] = cells.try_emplace(cell.token);
        if (fresh || remaining > it->second.best_remaining) it->second.best_remaining = remaining;
        it->second.count += 1;
    }
    for (auto& [token, agg] : cells) {
        fs.entries.push_back({{token, Resolution::coarse}, agg.best_remaining, agg.count, 0});
        fs.total_pois += agg.count;
    }
    std::sort(fs.entries.begin(), fs.entries.end(),
              [](const FeasibleEntry& a, const FeasibleEntry& b) {
                  if (a.best_remaining_min != b.best_remaining_min)
                      return a.best_remaining_min > b.best_remaining_min;
                  return a.coarse_cell.token < b.coarse_cell.token;
              });
    for (size_t i = 0; i < fs.entries.size(); ++i) fs.entries[i].rank = int(i + 1);
    return fs;
}

enum class ModePolicy { person_main_mode, force_car, force_transit };

inline ModePolicy parse_mode_policy(const std::string& s) {
    if (s == "person_main_mode") return ModePolicy::person_main_mode;
    if (s == "force_car") return ModePolicy::force_car;
    if (s == "force_transit") return ModePolicy::force_transit;
    throw UnknownLevel("mode_policy", s);
}

// Runs SPA for a whole population, caching one-to-many matrices per unique
// anchor coordinate so persons sharing a work or home cell share a search.
class SpaEngine {
public:
    SpaEngine(const RoadNetwork& roads, const TransitNetwork& transit,
              const std::vector<Poi>& pois, const CellIndex& index, BudgetSpec budget,
              RouterConfig router_cfg = {}, int workers = 1)
        : roads_(roads), transit_(transit), pois_(pois), index_(index), budget_(budget),
          cfg_(router_cfg), workers_(workers) {
        poi_coords_.reserve(pois.size());
        for (const auto& p : pois) poi_coords_.push_back({p.lat, p.lon});
    }

    FeasibleSet spa_for(const PersonRecord& person, Mode mode) {
        LatLon work = index_.centroid(person.work_cell);
        LatLon home = index_.centroid(person.home_cell);
        double t_hw;
        bool routed = person.commute_samples.empty();
        if (routed) {
            auto leg = leg_times(work, {home}, mode);
            t_hw = leg[0] ? *leg[0] / 60.0 : budget_.tb_min + 1.0;  // unreachable: no budget left
        } else {
            t_hw = estimate_commute_time(person);
        }
        auto wk = leg_times(work, poi_coords_, mode);
        auto kh = poi_to_point(home, mode);
        auto fs = compute_spa(person.person_id, mode, t_hw, pois_, wk, kh, budget_, index_);
        fs.t_hw_from_router = routed;
        return fs;
    }

    std::vector<FeasibleSet> spa_population(const std::vector<PersonRecord>& persons,
                                            ModePolicy policy) {
        // Warm anchor caches in a deterministic order, in parallel.
        std::vector<LatLon> works, homes;
        std::map<std::string, LatLon> uniq_w, uniq_h;
        for (const auto& p : persons) {
            uniq_w.emplace(p.work_cell.token, index_.centroid(p.work_cell));
            uniq_h.emplace(p.home_cell.token, index_.centroid(p.home_cell));
        }
        for (auto& [t, c] : uniq_w) works.push_back(c);
        for (auto& [t, c] : uniq_h) homes.push_back(c);
        std::vector<Mode> modes;
        if (policy == ModePolicy::force_car) modes = {Mode::car};
        else if (policy == ModePolicy::force_transit) modes = {Mode::transit};
        else modes = {Mode::car, Mode::transit};
        for (Mode m : modes) {
            parallel_for(works.size(), workers_,
                         [&](size_t i) { leg_times(works[i], poi_coords_, m); });
            parallel_for(homes.size(), workers_, [&](size_t i) { poi_to_point(homes[i], m); });
        }

        std::vector<FeasibleSet> out(persons.size());
        parallel_for(persons.size(), workers_, [&](size_t i) {
            const auto& p = persons[i];
            Mode m = policy == ModePolicy::force_car ? Mode::car
                     : policy == ModePolicy::force_transit
                         ? Mode::transit
                         : (p.attributes.at("main_mode") == "car" ? Mode::car : Mode::transit);
            out[i] = spa_for(p, m);
        });
        return out;
    }

    // Travel seconds origin -> each dest, for the configured departure.
    LegTimes leg_times(LatLon origin, const std::vector<LatLon>& dests, Mode mode) {
        bool cacheable = &dests == &poi_coords_;
        std::string key;
        if (cacheable) {
            key = cache_key(origin, mode);
            std::lock_guard lock(mu_);
            auto it = origin_cache_.find(key);
            if (it != origin_cache_.end()) return it->second;
        }
        TravelTimeMatrix m = mode == Mode::car
                                 ? car_travel_time(roads_, origin, dests, budget_.depart_s, cfg_)
                                 : transit_travel_time(transit_, origin, dests, budget_.depart_s);
        if (cacheable) {
            std::lock_guard lock(mu_);
            origin_cache_[key] = m.seconds;
        }
        return m.seconds;
    }

    // Travel seconds POI k -> point, one entry per POI.
    LegTimes poi_to_point(LatLon dest, Mode mode) {
        std::string key = cache_key(dest, mode);
        {
            std::lock_guard lock(mu_);
            auto it = dest_cache_.find(key);
            if (it != dest_cache_.end()) return it->second;
        }
        LegTimes out(pois_.size());
        for (size_t k = 0; k < pois_.size(); ++k) {
            TravelTimeMatrix m =
                mode == Mode::car
                    ? car_travel_time(roads_, poi_coords_[k], {dest}, budget_.depart_s, cfg_)
                    : transit_travel_time(transit_, poi_coords_[k], {dest}, budget_.depart_s);
            out[k] = m.seconds[0];
        }
        std::lock_guard lock(mu_);
        dest_cache_[key] = out;
        return out;
    }

private:
    static std::string cache_key(LatLon p, Mode m) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.9f/%.9f/%d", p.lat, p.lon, int(m));
        return buf;
    }

    const RoadNetwork& roads_;
    const TransitNetwork& transit_;
    const std::vector<Poi>& pois_;
    std::vector<LatLon> poi_coords_;
    const CellIndex& index_;
    BudgetSpec budget_;
    RouterConfig cfg_;
    int workers_;
    std::mutex mu_;
    std::unordered_map<std::string, LegTimes> origin_cache_;
    std::unordered_map<std::string, LegTimes> dest_cache_;
};

}  // namespace sta
