#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sta/access.hpp"
#include "sta/errors.hpp"
#include "sta/rng.hpp"
#include "sta/types.hpp"

namespace sta {

struct VisitSet {
    std::string person_id;
    std::map<std::string, int> visits;  // coarse cell token -> visit count
    int total() const {
        int n = 0;
        for (auto& [c, k] : visits) n += k;
        return n;
    }
    size_t distinct() const { return visits.size(); }
};

inline VisitSet visits_from_trips(const std::string& person_id,
                                  const std::vector<TripRecord>& trips, const CellIndex& index) {
    VisitSet v;
    v.person_id = person_id;
    for (const auto& t : trips) {
        if (t.person_id != person_id || t.purpose != Purpose::leisure) continue;
        CellId parent = index.parent(t.dest_cell);
        v.visits[parent.token] += 1;
    }
    return v;
}

struct SelectivityResult {
    std::string person_id;
    bool applicable = false;   // k_i >= 1
    int k = 0;                 // distinct visited cells inside SPA_i
    double share_outside = 0.0;
    double t_act = 0.0;        // observed mean rank
    double null_mean = 0.0;
    double null_sd = 0.0;
    double p_value = 1.0;
    std::optional<double> effect_size;  // absent when null is degenerate (k == N)
    int draws = 0;
};

// Mean-rank selectivity test: observed mean rank of visited feasible cells
// against B uniform draws of the same number of distinct cells from SPA_i.
// Low p = the person picks better-ranked cells than chance.
inline SelectivityResult selectivity_test(const FeasibleSet& spa, const VisitSet& visits, int B,
                                          CounterRng rng) {
    if (spa.entries.empty()) throw EmptyFeasibleSet(spa.person_id);
    SelectivityResult res;
    res.person_id = spa.person_id;
    res.draws = B;

    std::unordered_map<std::string, int> rank_of;
    for (const auto& e : spa.entries) rank_of[e.coarse_cell.token] = e.rank;

    std::vector<int> inside_ranks;
    for (const auto& [cell, n] : visits.visits) {
        auto it = rank_of.find(cell);
        if (it != rank_of.end()) inside_ranks.push_back(it->second);
    }
    size_t v_total = visits.distinct();
    if (v_total == 0) throw EmptyVisits(visits.person_id);
    res.k = int(inside_ranks.size());
    res.share_outside = double(v_total - inside_ranks.size()) / double(v_total);
    if (res.k == 0) return res;  // nothing inside the feasible set: not applicable
    res.applicable = true;

    double sum = 0.0;
    for (int r : inside_ranks) sum += r;
    res.t_act = sum / res.k;

    const int n_cells = int(spa.entries.size());
    if (res.k == n_cells) {
        // Every draw reproduces the full set: degenerate null.
        res.null_mean = res.t_act;
        res.null_sd = 0.0;
        res.p_value = 1.0;
        res.effect_size = std::nullopt;
        return res;
    }

    std::vector<double> null_means(B);
    int count_le = 0;
    for (int b = 0; b < B; ++b) {
        auto draw = rng.sample_without_replacement(uint32_t(n_cells), uint32_t(res.k));
        double s = 0.0;
        for (uint32_t idx : draw) s += spa.entries[idx].rank;
        null_means[b] = s / res.k;
        if (null_means[b] <= res.t_act + 1e-12) ++count_le;
    }
    double mu = 0.0;
    for (double m : null_means) mu += m;
    mu /= B;
    double var = 0.0;
    for (double m : null_means) var += (m - mu) * (m - mu);
    double sd = std::sqrt(var / B);

    res.null_mean = mu;
    res.null_sd = sd;
    res.p_value = double(1 + count_le) / double(B + 1);
    if (sd > 0.0) res.effect_size = (res.t_act - mu) / sd;
    return res;
}

// Hill number of order 1: exp of Shannon entropy of the visit distribution.
inline double hill_diversity(const VisitSet& visits) {
    double n = visits.total();
    if (n < 1) throw EmptyVisits(visits.person_id);
    double h = 0.0;
    for (const auto& [cell, nk] : visits.visits) {
        if (nk == 0) continue;
        double p = nk / n;
        h -= p * std::log(p);
    }
    return std::exp(h);
}

// Daily total travel time, then per-person mean over observed days.
inline double daily_total_min(const std::vector<TripRecord>& day_trips) {
    double s = 0.0;
    for (const auto& t : day_trips) s += t.duration_min;
    return s;
}

inline std::unordered_map<std::string, double> total_travel_time(
    const std::vector<TripRecord>& trips) {
    std::map<std::string, std::map<std::string, double>> per_day;  // person -> date -> sum
    for (const auto& t : trips) per_day[t.person_id][t.date] += t.duration_min;
    std::unordered_map<std::string, double> out;
    for (const auto& [pid, days] : per_day) {
        double s = 0.0;
        for (const auto& [d, v] : days) s += v;
        out[pid] = s / double(days.size());
    }
    return out;
}

struct WeightedStats {
    double mean = 0.0;
    double sd = 0.0;
};

// Weighted mean / SD with weights normalized to mean one; equal weights
// reduce to the unweighted sample statistics.
inline WeightedStats weighted_stats(const std::vector<double>& values,
                                    const std::vector<double>& weights) {
    if (values.empty() || values.size() != weights.size())
        throw ParseError("weighted_stats: bad input sizes");
    double wsum = 0.0;
    for (double w : weights) {
        if (w <= 0.0) throw BadWeight("weighted_stats");
        wsum += w;
    }
    double scale = double(values.size()) / wsum;  // normalize to mean 1
    double mean = 0.0, norm = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        mean += weights[i] * scale * values[i];
        norm += weights[i] * scale;
    }
    mean /= norm;
    double ss = 0.0;
    for (size_t i = 0; i < values.size(); ++i)
        ss += weights[i] * scale * (values[i] - mean) * (values[i] - mean);
    WeightedStats out;
    out.mean = mean;
    out.sd = values.size() > 1 ? std::sqrt(ss / (norm - 1.0)) : 0.0;
    return out;
}

inline double weighted_share(const std::vector<bool>& flag, const std::vector<double>& weights) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < flag.size(); ++i) {
        num += flag[i] ? weights[i] : 0.0;
        den += weights[i];
    }
    return den > 0 ? num / den : 0.0;
}

struct MedianBootstrap {
    double median = 0.0;
    double se = 0.0;
};

// Point estimate is the weighted median; SE from R weight-proportional
// resamples of the persons.
inline MedianBootstrap weighted_median_bootstrap(const std::vector<double>& values,
                                                 const std::vector<double>& weights, int R,
                                                 CounterRng rng) {
    if (values.empty() || values.size() != weights.size() || R < 1)
        throw ParseError("weighted_median_bootstrap: bad input");
    std::vector<std::pair<double, double>> vw;
    for (size_t i = 0; i < values.size(); ++i) vw.push_back({values[i], weights[i]});
    MedianBootstrap out;
    out.median = weighted_median(vw);

    std::vector<double> cum(weights.size());
    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        cum[i] = total;
    }
    std::vector<double> medians(R);
    std::vector<std::pair<double, double>> sample;
    for (int r = 0; r < R; ++r) {
        sample.clear();
        for (size_t i = 0; i < values.size(); ++i) {
            double u = rng.next_double() * total;
            size_t j = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
            if (j >= values.size()) j = values.size() - 1;
            sample.push_back({values[j], 1.0});
        }
        medians[r] = weighted_median(sample);
    }
    double mu = 0.0;
    for (double m : medians) mu += m;
    mu /= R;
    double ss = 0.0;
    for (double m : medians) ss += (m - mu) * (m - mu);
    out.se = R > 1 ? std::sqrt(ss / (R - 1)) : 0.0;
    return out;
}

}  // namespace sta
