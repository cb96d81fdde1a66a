#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sta/pipeline.hpp"
#include "sta/synth.hpp"

namespace fs = std::filesystem;
using sta::pipeline::RunConfig;

namespace {

// "17:00", "17:00:00" or plain seconds.
int parse_clock(const std::string& s) {
    int h = 0, m = 0, sec = 0;
    if (std::sscanf(s.c_str(), "%d:%d:%d", &h, &m, &sec) >= 2) return h * 3600 + m * 60 + sec;
    return std::stoi(s);
}

struct ConfigOpts {
    std::string config_path;
    std::string input_dir, gtfs_dir, out_dir, date, depart, mode_policy;
    int B = -1, bootstrap_R = -1, workers = -1, max_transfers = -1;
    double tb_min = -1, poi_confidence = -1, walk_speed = -1, snap_radius = -1, walk_radius = -1;
    long seed = -1;
};

void add_config_options(CLI::App* cmd, ConfigOpts& o) {
    cmd->add_option("--config", o.config_path, "run configuration file (key=value)");
    cmd->add_option("--input", o.input_dir, "input directory");
    cmd->add_option("--gtfs", o.gtfs_dir, "GTFS directory (default <input>/gtfs)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--date", o.date, "analysis date YYYYMMDD");
    cmd->add_option("--depart", o.depart, "departure clock time (default 17:00)");
    cmd->add_option("--budget", o.tb_min, "time budget in minutes (default 90)");
    cmd->add_option("--draws", o.B, "Monte Carlo draws for the selectivity null (default 1000)");
    cmd->add_option("--bootstrap", o.bootstrap_R, "bootstrap replicates for median SEs");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--mode-policy", o.mode_policy,
                    "person_main_mode | force_car | force_transit");
    cmd->add_option("--confidence", o.poi_confidence, "POI confidence threshold (default 0.7)");
    cmd->add_option("--walk-speed", o.walk_speed, "walk speed km/h");
    cmd->add_option("--snap-radius", o.snap_radius, "snap radius m");
    cmd->add_option("--walk-radius", o.walk_radius, "walk leg radius m");
    cmd->add_option("--max-transfers", o.max_transfers, "max transit transfers");
}

RunConfig resolve_config(const ConfigOpts& o) {
    RunConfig c;
    if (!o.config_path.empty()) c = sta::pipeline::load_config(o.config_path);
    if (!o.input_dir.empty()) c.input_dir = o.input_dir;
    if (!o.gtfs_dir.empty()) c.gtfs_dir = o.gtfs_dir;
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (!o.date.empty()) c.date = o.date;
    if (!o.depart.empty()) c.depart_s = parse_clock(o.depart);
    if (o.tb_min >= 0) c.tb_min = o.tb_min;
    if (o.B >= 0) c.B = o.B;
    if (o.bootstrap_R >= 0) c.bootstrap_R = o.bootstrap_R;
    if (o.seed >= 0) c.seed = uint64_t(o.seed);
    if (o.workers >= 0) c.workers = o.workers;
    if (!o.mode_policy.empty()) c.mode_policy = o.mode_policy;
    if (o.poi_confidence >= 0) c.poi_confidence = o.poi_confidence;
    if (o.walk_speed >= 0) c.walk_speed_kmh = o.walk_speed;
    if (o.snap_radius >= 0) c.snap_radius_m = o.snap_radius;
    if (o.walk_radius >= 0) c.walk_radius_m = o.walk_radius;
    if (o.max_transfers >= 0) c.max_transfers = o.max_transfers;
    if (c.input_dir.empty()) throw sta::ParseError("no input directory configured");
    if (c.date.empty()) throw sta::ParseError("no analysis date configured");
    return c;
}

// Plain-text DAG description: node/edge/exposure/outcome lines.
sta::pathmodel::PathDag parse_model_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw sta::ParseError("cannot read model file " + path.string());
    sta::pathmodel::PathDag dag;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "node") {
            std::string n;
            ls >> n;
            dag.nodes.push_back(n);
        } else if (kw == "edge") {
            std::string a, b;
            ls >> a >> b;
            dag.edges.push_back({a, b});
        } else if (kw == "exposure") {
            ls >> dag.exposure;
        } else if (kw == "outcome") {
            ls >> dag.outcome;
        } else {
            throw sta::ParseError("bad model line: " + line);
        }
    }
    return dag;
}

int cmd_synth(const sta::synth::SynthSpec& spec, const std::string& out_dir) {
    using namespace sta;
    auto city = synth::gen_city(spec);
    CellIndex index(city.box);
    auto persons = synth::gen_persons(spec, city, index);
    RoadNetwork roads(city.roads);
    TransitNetwork transit(city.gtfs, roads, spec.date);
    SpaEngine engine(roads, transit, city.pois, index, {});
    std::vector<FeasibleSet> spa_sets;
    for (const auto& p : persons)
        spa_sets.push_back(engine.spa_for(
            p, p.attributes.at("main_mode") == "car" ? Mode::car : Mode::transit));
    auto diary = synth::gen_diary(spec, persons, spa_sets, index);
    synth::write_inputs(city, persons, diary.trips, out_dir);

    RunConfig cfg;
    cfg.input_dir = out_dir;
    cfg.out_dir = (fs::path(out_dir) / "out").string();
    cfg.date = spec.date;
    cfg.seed = spec.seed;
    cfg.bbox_min_lat = city.box.min_lat;
    cfg.bbox_min_lon = city.box.min_lon;
    cfg.bbox_max_lat = city.box.max_lat;
    cfg.bbox_max_lon = city.box.max_lon;
    sta::pipeline::write_config(cfg, fs::path(out_dir) / "run_config");
    std::cout << "wrote " << out_dir << ": " << city.roads.nodes.size() << " nodes, "
              << city.gtfs.trips.size() << " transit trips, " << city.pois.size() << " pois, "
              << persons.size() << " persons, " << diary.trips.size() << " diary trips\n";
    return 0;
}

int cmd_ingest_check(const RunConfig& cfg) {
    using namespace sta;
    fs::path in = cfg.input_dir;
    auto roads = ingest::parse_roads(in / "roads_nodes.csv", in / "roads_edges.csv");
    auto box = cfg.has_bbox() ? BoundingBox{cfg.bbox_min_lat, cfg.bbox_min_lon,
                                            cfg.bbox_max_lat, cfg.bbox_max_lon}
                              : pipeline::derive_box(roads);
    CellIndex index(box);
    auto persons = ingest::parse_persons(in / "persons.csv", &index);
    auto trips = ingest::parse_trips(in / "trips.csv", &index);
    auto pois = ingest::parse_pois(in / "pois.csv", cfg.poi_confidence);
    ingest::GtfsParseStats stats;
    ingest::parse_gtfs(cfg.gtfs_dir.empty() ? in / "gtfs" : fs::path(cfg.gtfs_dir), &stats);
    RoadNetwork net(roads);
    std::cout << "roads: " << roads.nodes.size() << " nodes, " << roads.edges.size()
              << " edges, " << net.off_main_component() << " off main component\n"
              << "gtfs: " << stats.stops << " stops, " << stats.routes << " routes, "
              << stats.trips << " trips, " << stats.stop_times << " stop_times, "
              << stats.services << " services\n"
              << "pois kept (social_leisure, confidence > "
              << csv::Writer::fmt(cfg.poi_confidence, 2) << "): " << pois.size() << "\n"
              << "persons: " << persons.size() << ", trips: " << trips.size() << "\n"
              << "ok\n";
    return 0;
}

int cmd_matrix(const ConfigOpts& opts, const std::string& points_path,
               const std::string& mode_str, const std::string& out_path) {
    using namespace sta;
    RunConfig cfg = resolve_config(opts);
    auto w = pipeline::load_workspace(cfg);
    auto pts = csv::Table::read_file(points_path);
    std::vector<std::string> ids;
    std::vector<LatLon> coords;
    for (size_t r = 0; r < pts.rows(); ++r) {
        ids.push_back(pts.cell(r, "id"));
        coords.push_back({pts.num(r, "lat"), pts.num(r, "lon")});
    }
    std::vector<Mode> modes;
    if (mode_str == "car") modes = {Mode::car};
    else if (mode_str == "transit") modes = {Mode::transit};
    else if (mode_str == "both") modes = {Mode::car, Mode::transit};
    else throw UnknownLevel("mode", mode_str);

    csv::Writer out(out_path);
    out.row({"origin", "dest", "mode", "depart_s", "travel_s"});
    for (Mode m : modes) {
        std::vector<TravelTimeMatrix> rows(coords.size());
        parallel_for(coords.size(), cfg.workers, [&](size_t i) {
            rows[i] = m == Mode::car
                          ? car_travel_time(*w.roads, coords[i], coords, cfg.depart_s,
                                            cfg.router())
                          : transit_travel_time(*w.transit, coords[i], coords, cfg.depart_s);
        });
        for (size_t i = 0; i < coords.size(); ++i)
            for (size_t j = 0; j < coords.size(); ++j)
                out.row({ids[i], ids[j], mode_name(m), std::to_string(cfg.depart_s),
                         rows[i].seconds[j] ? csv::Writer::fmt(*rows[i].seconds[j], 1) : "NA"});
    }
    return 0;
}

// Shared prefix of the analysis subcommands: workspace + SPA + outcomes.
struct Analysis {
    sta::pipeline::Workspace w;
    std::vector<sta::FeasibleSet> spa_sets;
    std::vector<sta::pipeline::PersonOutcome> outcomes;
};

Analysis run_analysis(const ConfigOpts& opts) {
    Analysis a;
    RunConfig cfg = resolve_config(opts);
    fs::create_directories(cfg.out_dir);
    a.w = sta::pipeline::load_workspace(cfg);
    a.spa_sets = sta::pipeline::compute_spa_sets(a.w);
    a.outcomes = sta::pipeline::compute_outcomes(a.w, a.spa_sets);
    return a;
}

int cmd_pathfit(const std::string& model_path, const std::string& data_path,
                const std::string& weights_col, const std::string& out_dir, bool check) {
    using namespace sta;
    auto dag = parse_model_file(model_path);
    auto t = csv::Table::read_file(data_path);
    pathmodel::Dataset data;
    data.names = dag.nodes;
    data.values.resize(long(t.rows()), long(dag.nodes.size()));
    data.weights = Eigen::VectorXd::Ones(long(t.rows()));
    for (size_t r = 0; r < t.rows(); ++r) {
        for (size_t j = 0; j < dag.nodes.size(); ++j)
            data.values(long(r), long(j)) = t.num(r, dag.nodes[j]);
        if (!weights_col.empty()) data.weights[long(r)] = t.num(r, weights_col);
    }
    fs::create_directories(out_dir);
    auto fit = pathmodel::fit_paths(dag, data);
    sta::geojson::write(sta::pipeline::fit_report_json(fit), fs::path(out_dir) / "pathfit.json");
    std::string text = sta::pipeline::fit_report_text(fit);
    {
        std::ofstream f(fs::path(out_dir) / "pathfit.txt");
        f << text;
    }
    std::cout << text;
    if (check) {
        auto tests = pathmodel::check_dag(dag, data);
        for (const auto& test : tests) {
            std::string given;
            for (const auto& g : test.given) given += (given.empty() ? "" : ",") + g;
            std::printf("independence %s _||_ %s | {%s}: r=%.4f p=%.4g\n", test.x.c_str(),
                        test.y.c_str(), given.c_str(), test.partial_correlation, test.p_value);
        }
        if (tests.empty()) std::cout << "no testable independence implications (saturated)\n";
    }
    if (!dag.exposure.empty() && !dag.outcome.empty()) {
        auto effects = pathmodel::decompose_effects(fit, dag.exposure, dag.outcome);
        sta::geojson::write(sta::pipeline::effects_json(effects, dag.exposure, dag.outcome),
                            fs::path(out_dir) / "effects.json");
        std::printf("effects %s -> %s: direct=%.6f (se %.6f) indirect=%.6f (se %.6f) "
                    "total=%.6f (se %.6f)\n",
                    dag.exposure.c_str(), dag.outcome.c_str(), effects.direct,
                    effects.direct_se, effects.indirect, effects.indirect_se, effects.total,
                    effects.total_se);
    }
    return 0;
}

int cmd_decompose(const std::string& report_path, const std::vector<std::string>& coef_args,
                  std::string exposure, std::string outcome, const std::string& out_path) {
    using namespace sta;
    pathmodel::EffectTable effects;
    if (!report_path.empty()) {
        std::ifstream in(report_path);
        if (!in) throw ParseError("cannot read report " + report_path);
        auto j = sta::pipeline::json::parse(in);
        auto fit = sta::pipeline::fit_from_json(j);
        if (exposure.empty()) exposure = fit.dag.exposure;
        if (outcome.empty()) outcome = fit.dag.outcome;
        effects = pathmodel::decompose_effects(fit, exposure, outcome);
    } else {
        // build a DAG from edge coefficients given as FROM->TO=VALUE
        pathmodel::PathDag dag;
        std::map<std::pair<std::string, std::string>, double> coef;
        auto add_node = [&](const std::string& n) {
            if (dag.index(n) < 0) dag.nodes.push_back(n);
        };
        for (const auto& arg : coef_args) {
            auto arrow = arg.find("->");
            auto eq = arg.find('=', arrow == std::string::npos ? 0 : arrow);
            if (arrow == std::string::npos || eq == std::string::npos)
                throw ParseError("bad coefficient (want FROM->TO=VALUE): " + arg);
            std::string from = arg.substr(0, arrow);
            std::string to = arg.substr(arrow + 2, eq - arrow - 2);
            double value = std::stod(arg.substr(eq + 1));
            add_node(from);
            add_node(to);
            dag.edges.push_back({from, to});
            coef[{from, to}] = value;
        }
        if (exposure.empty() || outcome.empty())
            throw ParseError("--exposure and --outcome are required with --coef");
        effects = pathmodel::decompose_from_coefficients(dag, coef, exposure, outcome);
    }
    auto j = sta::pipeline::effects_json(effects, exposure, outcome);
    if (!out_path.empty()) sta::geojson::write(j, out_path);
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"space-time accessibility toolkit"};
    app.require_subcommand(1);

    // synth
    sta::synth::SynthSpec spec;
    std::string synth_out;
    long synth_seed = long(spec.seed);
    auto* synth = app.add_subcommand("synth", "generate a synthetic city and travel diary");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--persons", spec.n_persons, "number of persons");
    synth->add_option("--pois", spec.n_pois, "number of POIs");
    synth->add_option("--grid-nx", spec.grid_nx, "grid width");
    synth->add_option("--grid-ny", spec.grid_ny, "grid height");
    synth->add_option("--world", spec.world, "selective | null");
    synth->add_option("--rank-bias", spec.rank_bias, "rank preference strength");
    synth->add_option("--car-share", spec.car_share, "share of car users");
    synth->add_option("--date", spec.date, "service/diary date YYYYMMDD");

    // ingest-check
    ConfigOpts ic_opts;
    auto* ic = app.add_subcommand("ingest-check", "parse all inputs and report counts");
    add_config_options(ic, ic_opts);

    // matrix
    ConfigOpts mx_opts;
    std::string mx_points, mx_mode = "both", mx_out = "matrix.csv";
    auto* mx = app.add_subcommand("matrix", "point-to-point travel time matrix");
    add_config_options(mx, mx_opts);
    mx->add_option("--points", mx_points, "CSV of id,lat,lon")->required();
    mx->add_option("--mode", mx_mode, "car | transit | both");
    mx->add_option("--matrix-out", mx_out, "output CSV path");

    // analysis subcommands sharing the config surface
    ConfigOpts spa_opts, sel_opts, div_opts, st_opts, run_opts;
    auto* spa_cmd = app.add_subcommand("spa", "space-time accessibility per person");
    add_config_options(spa_cmd, spa_opts);
    auto* sel_cmd = app.add_subcommand("selectivity", "mean-rank selectivity test per person");
    add_config_options(sel_cmd, sel_opts);
    auto* div_cmd = app.add_subcommand("diversity", "visited-cell diversity per person");
    add_config_options(div_cmd, div_opts);
    auto* st_cmd = app.add_subcommand("stats", "weighted descriptive statistics");
    add_config_options(st_cmd, st_opts);
    auto* run_cmd = app.add_subcommand("run", "full pipeline");
    add_config_options(run_cmd, run_opts);

    // pathfit
    std::string pf_model, pf_data, pf_weights, pf_out = "pathfit_out";
    bool pf_check = false;
    auto* pf = app.add_subcommand("pathfit", "fit a recursive path model");
    pf->add_option("--model", pf_model, "model file (node/edge/exposure/outcome lines)")
        ->required();
    pf->add_option("--data", pf_data, "data CSV")->required();
    pf->add_option("--weights", pf_weights, "weight column");
    pf->add_option("--out", pf_out, "output directory");
    pf->add_flag("--check-dag", pf_check, "test the DAG's independence implications");

    // decompose
    std::string dc_report, dc_exposure, dc_outcome, dc_out;
    std::vector<std::string> dc_coefs;
    auto* dc = app.add_subcommand("decompose", "direct/indirect/total effect decomposition");
    dc->add_option("--report", dc_report, "fitted model report (pathfit.json)");
    dc->add_option("--coef", dc_coefs, "edge coefficient FROM->TO=VALUE (repeatable)");
    dc->add_option("--exposure", dc_exposure, "exposure node");
    dc->add_option("--outcome", dc_outcome, "outcome node");
    dc->add_option("--out", dc_out, "write the decomposition JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            spec.seed = uint64_t(synth_seed);
            return cmd_synth(spec, synth_out);
        }
        if (*ic) return cmd_ingest_check(resolve_config(ic_opts));
        if (*mx) return cmd_matrix(mx_opts, mx_points, mx_mode, mx_out);
        if (*spa_cmd) {
            auto a = run_analysis(spa_opts);
            sta::pipeline::write_spa_outputs(a.spa_sets, a.w.cfg.out_dir);
            return 0;
        }
        if (*sel_cmd) {
            auto a = run_analysis(sel_opts);
            sta::pipeline::write_selectivity(a.w, a.spa_sets, a.outcomes, a.w.cfg.out_dir);
            return 0;
        }
        if (*div_cmd) {
            auto a = run_analysis(div_opts);
            sta::pipeline::write_diversity(a.w, a.outcomes, a.w.cfg.out_dir);
            return 0;
        }
        if (*st_cmd) {
            auto a = run_analysis(st_opts);
            sta::pipeline::write_stats(a.w, a.spa_sets, a.outcomes, a.w.cfg.out_dir);
            return 0;
        }
        if (*pf) return cmd_pathfit(pf_model, pf_data, pf_weights, pf_out, pf_check);
        if (*dc) return cmd_decompose(dc_report, dc_coefs, dc_exposure, dc_outcome, dc_out);
        if (*run_cmd) return sta::pipeline::run_pipeline(resolve_config(run_opts));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
