#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sta/access.hpp"
#include "sta/behavior.hpp"
#include "sta/geojson.hpp"
#include "sta/ingest.hpp"
#include "sta/pathmodel.hpp"
#include "sta/router.hpp"
#include "sta/rng.hpp"

namespace sta::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// All tunables of a run; the resolved snapshot written next to the outputs is
// the single source of truth for what a run used.
struct RunConfig {
    std::string input_dir;
    std::string gtfs_dir;  // defaults to <input_dir>/gtfs
    std::string out_dir = "out";
    std::string date;
    int depart_s = 17 * 3600;
    double tb_min = 90.0;
    int B = 1000;
    int bootstrap_R = 200;
    uint64_t seed = 42;
    std::string mode_policy = "person_main_mode";
    double poi_confidence = 0.7;
    int workers = 1;
    double walk_speed_kmh = 4.8;
    double snap_radius_m = 500.0;
    double walk_radius_m = 500.0;
    int max_transfers = 5;
    // bounding box; all zero = derive from road nodes with a margin
    double bbox_min_lat = 0, bbox_min_lon = 0, bbox_max_lat = 0, bbox_max_lon = 0;

    RouterConfig router() const {
        return {walk_speed_kmh, snap_radius_m, walk_radius_m, max_transfers};
    }
    BudgetSpec budget() const { return {tb_min, depart_s}; }
    bool has_bbox() const {
        return !(bbox_min_lat == 0 && bbox_min_lon == 0 && bbox_max_lat == 0 && bbox_max_lon == 0);
    }
};

inline RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config " + path.string());
    RunConfig c;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("bad config line: " + line);
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "input_dir") c.input_dir = val;
        else if (key == "gtfs_dir") c.gtfs_dir = val;
        else if (key == "out_dir") c.out_dir = val;
        else if (key == "date") c.date = val;
        else if (key == "depart_s") c.depart_s = std::stoi(val);
        else if (key == "tb_min") c.tb_min = std::stod(val);
        else if (key == "B") c.B = std::stoi(val);
        else if (key == "bootstrap_R") c.bootstrap_R = std::stoi(val);
        else if (key == "seed") c.seed = std::stoull(val);
        else if (key == "mode_policy") c.mode_policy = val;
        else if (key == "poi_confidence") c.poi_confidence = std::stod(val);
        else if (key == "workers") c.workers = std::stoi(val);
        else if (key == "walk_speed_kmh") c.walk_speed_kmh = std::stod(val);
        else if (key == "snap_radius_m") c.snap_radius_m = std::stod(val);
        else if (key == "walk_radius_m") c.walk_radius_m = std::stod(val);
        else if (key == "max_transfers") c.max_transfers = std::stoi(val);
        else if (key == "bbox_min_lat") c.bbox_min_lat = std::stod(val);
        else if (key == "bbox_min_lon") c.bbox_min_lon = std::stod(val);
        else if (key == "bbox_max_lat") c.bbox_max_lat = std::stod(val);
        else if (key == "bbox_max_lon") c.bbox_max_lon = std::stod(val);
        else throw ParseError("unknown config key: " + key);
    }
    return c;
}

inline void write_config(const RunConfig& c, const fs::path& path) {
    std::ofstream out(path);
    out << "input_dir=" << c.input_dir << "\n"
        << "gtfs_dir=" << c.gtfs_dir << "\n"
        << "out_dir=" << c.out_dir << "\n"
        << "date=" << c.date << "\n"
        << "depart_s=" << c.depart_s << "\n"
        << "tb_min=" << csv::Writer::fmt(c.tb_min, 3) << "\n"
        << "B=" << c.B << "\n"
        << "bootstrap_R=" << c.bootstrap_R << "\n"
        << "seed=" << c.seed << "\n"
        << "mode_policy=" << c.mode_policy << "\n"
        << "poi_confidence=" << csv::Writer::fmt(c.poi_confidence, 3) << "\n"
        << "workers=" << c.workers << "\n"
        << "walk_speed_kmh=" << csv::Writer::fmt(c.walk_speed_kmh, 3) << "\n"
        << "snap_radius_m=" << csv::Writer::fmt(c.snap_radius_m, 1) << "\n"
        << "walk_radius_m=" << csv::Writer::fmt(c.walk_radius_m, 1) << "\n"
        << "max_transfers=" << c.max_transfers << "\n"
        << "bbox_min_lat=" << csv::Writer::fmt(c.bbox_min_lat, 7) << "\n"
        << "bbox_min_lon=" << csv::Writer::fmt(c.bbox_min_lon, 7) << "\n"
        << "bbox_max_lat=" << csv::Writer::fmt(c.bbox_max_lat, 7) << "\n"
        << "bbox_max_lon=" << csv::Writer::fmt(c.bbox_max_lon, 7) << "\n";
}

// Everything parsed and compiled for one run.
struct Workspace {
    RunConfig cfg;
    BoundingBox box{};
    std::optional<CellIndex> index;
    RoadGraphSource roads_src;
    std::optional<RoadNetwork> roads;
    GtfsBundle gtfs;
    std::optional<TransitNetwork> transit;
    std::vector<Poi> pois;
    std::vector<PersonRecord> persons;
    std::vector<TripRecord> trips;
};

inline BoundingBox derive_box(const RoadGraphSource& roads, double margin_m = 2000.0) {
    BoundingBox b{90, 180, -90, -180};
    for (const auto& n : roads.nodes) {
        b.min_lat = std::min(b.min_lat, n.lat);
        b.max_lat = std::max(b.max_lat, n.lat);
        b.min_lon = std::min(b.min_lon, n.lon);
        b.max_lon = std::max(b.max_lon, n.lon);
    }
    double dlat = rad2deg(margin_m / kEarthRadiusM);
    double mid = 0.5 * (b.min_lat + b.max_lat);
    double dlon = rad2deg(margin_m / (kEarthRadiusM * std::cos(deg2rad(mid))));
    return {b.min_lat - dlat, b.min_lon - dlon, b.max_lat + dlat, b.max_lon + dlon};
}

// need_transit=false lets table-only commands skip compiling the timetable.
inline Workspace load_workspace(const RunConfig& cfg, bool need_transit = true) {
    Workspace w;
    w.cfg = cfg;
    fs::path in = cfg.input_dir;
    w.roads_src = ingest::parse_roads(in / "roads_nodes.csv", in / "roads_edges.csv");
    w.box = cfg.has_bbox()
                ? BoundingBox{cfg.bbox_min_lat, cfg.bbox_min_lon, cfg.bbox_max_lat,
                              cfg.bbox_max_lon}
                : derive_box(w.roads_src);
    w.index.emplace(w.box);
    w.persons = ingest::parse_persons(in / "persons.csv", &*w.index);
    w.trips = ingest::parse_trips(in / "trips.csv", &*w.index);
    w.pois = ingest::parse_pois(in / "pois.csv", cfg.poi_confidence);
    ingest::attach_commute_samples(w.persons, w.trips);
    w.roads.emplace(w.roads_src);
    if (need_transit) {
        w.gtfs = ingest::parse_gtfs(cfg.gtfs_dir.empty() ? in / "gtfs" : fs::path(cfg.gtfs_dir));
        w.transit.emplace(w.gtfs, *w.roads, cfg.date, cfg.router());
    }
    return w;
}

inline std::vector<FeasibleSet> compute_spa_sets(Workspace& w) {
    SpaEngine engine(*w.roads, *w.transit, w.pois, *w.index, w.cfg.budget(), w.cfg.router(),
                     w.cfg.workers);
    return engine.spa_population(w.persons, parse_mode_policy(w.cfg.mode_policy));
}

inline void write_spa_outputs(const std::vector<FeasibleSet>& sets, const fs::path& out) {
    csv::Writer spa(out / "spa.csv");
    spa.row({"person_id", "mode", "t_hw_min", "t_hw_source", "A", "log1p_A"});
    for (const auto& fs_ : sets)
        spa.row({fs_.person_id, mode_name(fs_.mode), csv::Writer::fmt(fs_.t_hw_min, 3),
                 fs_.t_hw_from_router ? "routed" : "observed", std::to_string(fs_.total_pois),
                 csv::Writer::fmt(std::log1p(double(fs_.total_pois)), 6)});
    csv::Writer sets_w(out / "spa_sets.csv");
    sets_w.row({"person_id", "coarse_cell", "rank", "best_remaining_min", "poi_count"});
    for (const auto& fs_ : sets)
        for (const auto& e : fs_.entries)
            sets_w.row({fs_.person_id, e.coarse_cell.token, std::to_string(e.rank),
                        csv::Writer::fmt(e.best_remaining_min, 4), std::to_string(e.poi_count)});
}

struct PersonOutcome {
    std::optional<SelectivityResult> selectivity;
    std::optional<double> hill;
    double total_travel_min = 0.0;
    VisitSet visits;
};

inline std::vector<PersonOutcome> compute_outcomes(const Workspace& w,
                                                   const std::vector<FeasibleSet>& spa_sets) {
    auto ttt = total_travel_time(w.trips);
    CounterRng rng(w.cfg.seed);
    std::vector<PersonOutcome> outcomes(w.persons.size());
    for (size_t i = 0; i < w.persons.size(); ++i) {
        auto& o = outcomes[i];
        o.visits = visits_from_trips(w.persons[i].person_id, w.trips, *w.index);
        auto it = ttt.find(w.persons[i].person_id);
        o.total_travel_min = it != ttt.end() ? it->second : 0.0;
        if (o.visits.total() > 0) o.hill = hill_diversity(o.visits);
        if (!spa_sets[i].entries.empty() && o.visits.distinct() > 0)
            o.selectivity = selectivity_test(spa_sets[i], o.visits, w.cfg.B,
                                             rng.fork(w.persons[i].person_id));
    }
    return outcomes;
}

inline void write_selectivity(const Workspace& w, const std::vector<FeasibleSet>& spa_sets,
                              const std::vector<PersonOutcome>& outcomes, const fs::path& out) {
    csv::Writer sel(out / "selectivity.csv");
    sel.row({"person_id", "A", "n_cells", "k", "share_outside", "t_act", "null_mean", "null_sd",
             "p_value", "d", "B"});
    for (size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].selectivity) continue;
        const auto& s = *outcomes[i].selectivity;
        sel.row({s.person_id, std::to_string(spa_sets[i].total_pois),
                 std::to_string(spa_sets[i].entries.size()), std::to_string(s.k),
                 csv::Writer::fmt(s.share_outside, 4), csv::Writer::fmt(s.t_act, 4),
                 csv::Writer::fmt(s.null_mean, 4), csv::Writer::fmt(s.null_sd, 4),
                 csv::Writer::fmt(s.p_value, 6),
                 s.effect_size ? csv::Writer::fmt(*s.effect_size, 4) : "NA",
                 std::to_string(s.draws)});
    }
}

inline void write_diversity(const Workspace& w, const std::vector<PersonOutcome>& outcomes,
                            const fs::path& out) {
    csv::Writer div(out / "diversity.csv");
    div.row({"person_id", "n_visits", "k_distinct", "hill_h1", "total_travel_min"});
    for (size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        div.row({w.persons[i].person_id, std::to_string(o.visits.total()),
                 std::to_string(o.visits.distinct()),
                 o.hill ? csv::Writer::fmt(*o.hill, 4) : "NA",
                 csv::Writer::fmt(o.total_travel_min, 3)});
    }
}

// Weighted descriptive table over persons, accessibility and participation.
inline void write_stats(const Workspace& w, const std::vector<FeasibleSet>& spa_sets,
                        const std::vector<PersonOutcome>& outcomes, const fs::path& out) {
    csv::Writer st(out / "stats.csv");
    st.row({"group", "variable", "statistic", "value"});
    std::vector<double> wts, age, pov, ttv, logs;
    std::vector<bool> nonzero, active;
    for (size_t i = 0; i < w.persons.size(); ++i) {
        wts.push_back(w.persons[i].weight);
        age.push_back(std::stod(w.persons[i].attributes.at("age")));
        pov.push_back(std::stod(w.persons[i].attributes.at("zone_poverty_rate")));
        ttv.push_back(outcomes[i].total_travel_min);
        logs.push_back(std::log1p(double(spa_sets[i].total_pois)));
        nonzero.push_back(spa_sets[i].total_pois > 0);
        active.push_back(w.persons[i].attributes.at("active_mode") == "yes");
    }
    auto emit = [&](const char* grp, const char* var, const char* statname, double v) {
        st.row({grp, var, statname, csv::Writer::fmt(v, 4)});
    };
    auto ws_age = weighted_stats(age, wts);
    emit("individual", "age", "wmean", ws_age.mean);
    emit("individual", "age", "wsd", ws_age.sd);
    auto ws_pov = weighted_stats(pov, wts);
    emit("individual", "zone_poverty_rate", "wmean", ws_pov.mean);
    emit("individual", "zone_poverty_rate", "wsd", ws_pov.sd);
    emit("individual", "active_mode_yes", "wshare", weighted_share(active, wts));
    emit("accessibility", "spa_nonzero", "wshare", weighted_share(nonzero, wts));
    auto ws_log = weighted_stats(logs, wts);
    emit("accessibility", "spa_log1p", "wmean", ws_log.mean);
    emit("accessibility", "spa_log1p", "wsd", ws_log.sd);
    auto ws_ttt = weighted_stats(ttv, wts);
    emit("trip_making", "total_travel_min", "wmean", ws_ttt.mean);
    emit("trip_making", "total_travel_min", "wsd", ws_ttt.sd);
    std::vector<double> hills, hw;
    for (size_t i = 0; i < outcomes.size(); ++i)
        if (outcomes[i].hill) {
            hills.push_back(*outcomes[i].hill);
            hw.push_back(w.persons[i].weight);
        }
    if (!hills.empty()) {
        auto ws_h = weighted_stats(hills, hw);
        emit("participation", "hill_h1", "wmean", ws_h.mean);
        emit("participation", "hill_h1", "wsd", ws_h.sd);
        auto boot = weighted_median_bootstrap(hills, hw, w.cfg.bootstrap_R,
                                              CounterRng(w.cfg.seed).fork("hill_boot"));
        emit("participation", "hill_h1", "wmedian", boot.median);
        emit("participation", "hill_h1", "wmedian_se", boot.se);
    }
}

// DAG of the default leisure-participation path model; pruned of any
// variables the data cannot support.
inline pathmodel::PathDag default_dag(const std::vector<std::string>& z_block,
                                      const std::vector<std::string>& m_block) {
    pathmodel::PathDag dag;
    for (const auto& z : z_block) dag.nodes.push_back(z);
    for (const auto& m : m_block) dag.nodes.push_back(m);
    dag.nodes.push_back("A");
    dag.nodes.push_back("B");
    dag.nodes.push_back("H1");
    for (const auto& m : m_block)
        for (const auto& z : z_block) dag.edges.push_back({z, m});
    for (const auto& z : z_block) {
        dag.edges.push_back({z, "A"});
        dag.edges.push_back({z, "B"});
        dag.edges.push_back({z, "H1"});
    }
    for (const auto& m : m_block) {
        dag.edges.push_back({m, "A"});
        dag.edges.push_back({m, "B"});
        dag.edges.push_back({m, "H1"});
    }
    dag.edges.push_back({"A", "B"});
    dag.edges.push_back({"A", "H1"});
    dag.edges.push_back({"B", "H1"});
    dag.exposure = "A";
    dag.outcome = "H1";
    return dag;
}

inline pathmodel::Dataset person_dataset(const Workspace& w,
                                         const std::vector<FeasibleSet>& spa_sets,
                                         const std::vector<PersonOutcome>& outcomes) {
    pathmodel::Dataset data;
    data.names = {"hh_couple_children", "active_mode", "car_main", "pt_sub", "A", "B", "H1"};
    data.values.resize(long(w.persons.size()), long(data.names.size()));
    data.weights = Eigen::VectorXd::Zero(long(w.persons.size()));
    for (size_t i = 0; i < w.persons.size(); ++i) {
        const auto& a = w.persons[i].attributes;
        data.values(long(i), 0) = a.at("household_type") == "In a couple w/ child(ren)";
        data.values(long(i), 1) = a.at("active_mode") == "yes";
        data.values(long(i), 2) = a.at("main_mode") == "car";
        data.values(long(i), 3) = a.at("pt_subscription") == "yes";
        data.values(long(i), 4) = std::log1p(double(spa_sets[i].total_pois));
        data.values(long(i), 5) = outcomes[i].total_travel_min;
        data.values(long(i), 6) = outcomes[i].hill ? *outcomes[i].hill : 1.0;
        data.weights[long(i)] = w.persons[i].weight;
    }
    return data;
}

inline json fit_report_json(const pathmodel::FitResult& fit) {
    json j;
    j["n"] = fit.n;
    json nodes = json::array();
    for (const auto& n : fit.dag.nodes) nodes.push_back(n);
    j["nodes"] = nodes;
    json edges = json::array();
    for (const auto& [p, c] : fit.dag.edges) edges.push_back({p, c});
    j["edges"] = edges;
    j["exposure"] = fit.dag.exposure;
    j["outcome"] = fit.dag.outcome;
    json eqs = json::array();
    for (const auto& eq : fit.equations) {
        json e;
        e["target"] = eq.target;
        e["r2"] = eq.r2;
        e["residual_var"] = eq.residual_var;
        json coefs = json::array();
        for (size_t i = 0; i < eq.predictors.size(); ++i)
            coefs.push_back({{"predictor", eq.predictors[i]},
                             {"estimate", eq.beta[int(i)]},
                             {"se", eq.se[int(i)]},
                             {"p", eq.p_values[i]}});
        e["coefficients"] = coefs;
        json cov = json::array();
        for (int a = 0; a < eq.cov.rows(); ++a) {
            json row = json::array();
            for (int b = 0; b < eq.cov.cols(); ++b) row.push_back(eq.cov(a, b));
            cov.push_back(row);
        }
        e["cov"] = cov;
        eqs.push_back(e);
    }
    j["equations"] = eqs;
    const auto& ix = fit.indices;
    j["fit"] = {{"chi2", ix.chi2},
                {"df", ix.df},
                {"chi2_baseline", ix.chi2_baseline},
                {"df_baseline", ix.df_baseline},
                {"cfi", ix.cfi},
                {"tli", ix.tli},
                {"rmsea", ix.rmsea},
                {"rmsea_lo90", ix.rmsea_lo90},
                {"rmsea_hi90", ix.rmsea_hi90},
                {"srmr", ix.srmr}};
    return j;
}

inline pathmodel::FitResult fit_from_json(const json& j) {
    pathmodel::FitResult fit;
    for (const auto& n : j.at("nodes")) fit.dag.nodes.push_back(n.get<std::string>());
    for (const auto& e : j.at("edges"))
        fit.dag.edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    fit.dag.exposure = j.value("exposure", "");
    fit.dag.outcome = j.value("outcome", "");
    fit.n = j.value("n", size_t(0));
    for (const auto& e : j.at("equations")) {
        pathmodel::Equation eq;
        eq.target = e.at("target").get<std::string>();
        eq.r2 = e.value("r2", 0.0);
        eq.residual_var = e.value("residual_var", 0.0);
        const auto& coefs = e.at("coefficients");
        eq.beta = Eigen::VectorXd::Zero(long(coefs.size()));
        eq.se = Eigen::VectorXd::Zero(long(coefs.size()));
        int i = 0;
        for (const auto& c : coefs) {
            eq.predictors.push_back(c.at("predictor").get<std::string>());
            eq.beta[i] = c.at("estimate").get<double>();
            eq.se[i] = c.value("se", 0.0);
            eq.p_values.push_back(c.value("p", 1.0));
            ++i;
        }
        eq.cov = Eigen::MatrixXd::Zero(long(coefs.size()), long(coefs.size()));
        if (e.contains("cov")) {
            const auto& cov = e.at("cov");
            for (size_t a = 0; a < cov.size(); ++a)
                for (size_t b = 0; b < cov[a].size(); ++b)
                    eq.cov(long(a), long(b)) = cov[a][b].get<double>();
        }
        fit.equations.push_back(std::move(eq));
    }
    return fit;
}

inline std::string fit_report_text(const pathmodel::FitResult& fit) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "path model fit, n=%zu\n", fit.n);
    out += buf;
    for (const auto& eq : fit.equations) {
        std::snprintf(buf, sizeof(buf), "equation %s  (R2=%.4f)\n", eq.target.c_str(), eq.r2);
        out += buf;
        for (size_t i = 0; i < eq.predictors.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "  %-24s %+9.4f  se=%.4f  p=%.4g\n",
                          eq.predictors[i].c_str(), eq.beta[int(i)], eq.se[int(i)],
                          eq.p_values[i]);
            out += buf;
        }
    }
    const auto& ix = fit.indices;
    std::snprintf(buf, sizeof(buf),
                  "chi2=%.4f df=%.0f  CFI=%.4f TLI=%.4f RMSEA=%.4f [%.4f, %.4f] SRMR=%.5f\n",
                  ix.chi2, ix.df, ix.cfi, ix.tli, ix.rmsea, ix.rmsea_lo90, ix.rmsea_hi90,
                  ix.srmr);
    out += buf;
    return out;
}

inline json effects_json(const pathmodel::EffectTable& effects, const std::string& exposure,
                         const std::string& outcome) {
    json paths = json::array();
    for (const auto& term : effects.paths) {
        json nodes = json::array();
        for (const auto& n : term.nodes) nodes.push_back(n);
        paths.push_back({{"nodes", nodes}, {"product", term.product}});
    }
    return {{"exposure", exposure},
            {"outcome", outcome},
            {"direct", effects.direct},
            {"indirect", effects.indirect},
            {"total", effects.total},
            {"direct_se", effects.direct_se},
            {"indirect_se", effects.indirect_se},
            {"total_se", effects.total_se},
            {"paths", paths}};
}

// Fit + decomposition over the default person-level model.
inline void write_pathfit(const Workspace& w, const std::vector<FeasibleSet>& spa_sets,
                          const std::vector<PersonOutcome>& outcomes, const fs::path& out) {
    auto data = person_dataset(w, spa_sets, outcomes);
    auto z_keep = pathmodel::vif_prune({"hh_couple_children", "active_mode"}, data);
    auto m_keep = pathmodel::vif_prune({"car_main", "pt_sub"}, data);
    auto dag = default_dag(z_keep, m_keep);
    auto fit = pathmodel::fit_paths(dag, data);
    geojson::write(fit_report_json(fit), out / "pathfit.json");
    std::ofstream txt(out / "pathfit.txt");
    txt << fit_report_text(fit);
    auto effects = pathmodel::decompose_effects(fit, "A", "H1");
    geojson::write(effects_json(effects, "A", "H1"), out / "effects.json");
}

// Map layers per home coarse cell.
inline void write_maps(const Workspace& w, const std::vector<FeasibleSet>& spa_sets,
                       const std::vector<PersonOutcome>& outcomes, const fs::path& out) {
    std::map<std::string, std::vector<size_t>> by_cell;
    for (size_t i = 0; i < w.persons.size(); ++i)
        by_cell[w.index->parent(w.persons[i].home_cell).token].push_back(i);
    std::map<std::string, std::map<std::string, double>> share_layer, ttt_layer, div_layer;
    for (const auto& [cell, idxs] : by_cell) {
        std::vector<bool> nz;
        std::vector<double> weights;
        std::vector<std::pair<double, double>> ttw, hvw;
        for (size_t i : idxs) {
            weights.push_back(w.persons[i].weight);
            nz.push_back(spa_sets[i].total_pois > 0);
            ttw.push_back({outcomes[i].total_travel_min, w.persons[i].weight});
            if (outcomes[i].hill) hvw.push_back({*outcomes[i].hill, w.persons[i].weight});
        }
        share_layer[cell]["share_spa_nonzero"] = weighted_share(nz, weights);
        share_layer[cell]["persons"] = double(idxs.size());
        ttt_layer[cell]["median_total_travel_min"] = weighted_median(ttw);
        ttt_layer[cell]["persons"] = double(idxs.size());
        if (!hvw.empty()) {
            div_layer[cell]["median_hill_h1"] = weighted_median(hvw);
            div_layer[cell]["persons"] = double(hvw.size());
        }
    }
    geojson::write(geojson::cell_layer(*w.index, share_layer), out / "map_spa_share.geojson");
    geojson::write(geojson::cell_layer(*w.index, ttt_layer), out / "map_travel_time.geojson");
    geojson::write(geojson::cell_layer(*w.index, div_layer), out / "map_diversity.geojson");
}

// ------------------------------------------------------------------
// Full pipeline

inline int run_pipeline(const RunConfig& cfg) {
    fs::path out = cfg.out_dir;
    fs::create_directories(out);
    fs::path sentinel = out / "FAILED";
    std::error_code ec;
    fs::remove(sentinel, ec);
    try {
        Workspace w = load_workspace(cfg);
        RunConfig resolved = cfg;
        resolved.bbox_min_lat = w.box.min_lat;
        resolved.bbox_min_lon = w.box.min_lon;
        resolved.bbox_max_lat = w.box.max_lat;
        resolved.bbox_max_lon = w.box.max_lon;
        write_config(resolved, out / "run_config.resolved");

        auto spa_sets = compute_spa_sets(w);
        write_spa_outputs(spa_sets, out);
        auto outcomes = compute_outcomes(w, spa_sets);
        write_selectivity(w, spa_sets, outcomes, out);
        write_diversity(w, outcomes, out);
        write_stats(w, spa_sets, outcomes, out);
        write_pathfit(w, spa_sets, outcomes, out);
        write_maps(w, spa_sets, outcomes, out);
        return 0;
    } catch (const std::exception& e) {
        std::ofstream f(sentinel);
        f << e.what() << "\n";
        throw;
    }
}

}  // namespace sta::pipeline
