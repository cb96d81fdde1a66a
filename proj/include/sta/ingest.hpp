#pragma once

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sta/csv.hpp"
#include "sta/errors.hpp"
#include "sta/types.hpp"

namespace sta::ingest {

namespace fs = std::filesystem;

// Closed vocabularies. Levels are the survey labels verbatim.
inline const std::set<std::string>& household_levels() {
    static const std::set<std::string> v{
        "Living alone",
        "In a couple w/o children",
        "Single parent",
        "Living with parent(s)",
        "Not related to other household members",
        "In a shared apartment",
        "In a couple w/ child(ren)",
        "Another family member in the household",
    };
    return v;
}

inline const std::set<std::string>& education_levels() {
    static const std::set<std::string> v{
        "No diploma",      "Vocational",
        "Lower secondary", "Upper secondary",
        "3-4-year higher education", "5-year-and-above higher education",
        "Missing",
    };
    return v;
}

inline const std::set<std::string>& gender_levels() {
    static const std::set<std::string> v{"Man", "Woman"};
    return v;
}

inline Mode parse_mode(const std::string& s) {
    if (s == "car") return Mode::car;
    if (s == "transit") return Mode::transit;
    if (s == "walk") return Mode::walk;
    if (s == "bike") return Mode::bike;
    if (s == "other") return Mode::other;
    throw UnknownLevel("mode", s);
}

inline Purpose parse_purpose(const std::string& s) {
    if (s == "LEISURE") return Purpose::leisure;
    if (s == "HOME") return Purpose::home;
    if (s == "WORK") return Purpose::work;
    if (s == "OTHER") return Purpose::other;
    throw UnknownLevel("purpose", s);
}

inline const char* purpose_name(Purpose p) {
    switch (p) {
        case Purpose::leisure: return "LEISURE";
        case Purpose::home: return "HOME";
        case Purpose::work: return "WORK";
        case Purpose::other: return "OTHER";
    }
    return "OTHER";
}

// "HH:MM:SS", hours may exceed 24 for post-midnight service.
inline int parse_gtfs_time(const std::string& s, const std::string& where) {
    int h = 0, m = 0, sec = 0;
    if (std::sscanf(s.c_str(), "%d:%d:%d", &h, &m, &sec) != 3 || h < 0 || m < 0 || m > 59 ||
        sec < 0 || sec > 59)
        throw ParseError("bad GTFS time '" + s + "' at " + where);
    return h * 3600 + m * 60 + sec;
}

// ------------------------------------------------------------------
// persons.csv
//
// Cells come either as pre-binned tokens (home_cell / work_cell) or, when a
// CellIndex is supplied and lat/lon columns are present, derived from
// home_lat/home_lon and work_lat/work_lon.
inline std::vector<PersonRecord> parse_persons(const fs::path& path,
                                               const CellIndex* index = nullptr) {
    auto t = csv::Table::read_file(path);
    bool tokens = t.has_column("home_cell");
    std::vector<PersonRecord> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        std::string loc = path.filename().string() + " row " + std::to_string(r + 2);
        PersonRecord p;
        p.person_id = t.cell(r, "person_id");
        if (p.person_id.empty()) throw ParseError(loc + ": empty person_id");
        p.weight = t.num(r, "weight");
        if (p.weight <= 0.0) throw BadWeight(loc);
        if (tokens) {
            std::string h = t.cell(r, "home_cell"), w = t.cell(r, "work_cell");
            if (h.empty() || w.empty()) throw MissingAnchor(loc);
            p.home_cell = {h, Resolution::fine};
            p.work_cell = {w, Resolution::fine};
        } else {
            if (!index) throw ParseError(loc + ": lat/lon anchors need a cell index");
            p.home_cell = index->bin_point(t.num(r, "home_lat"), t.num(r, "home_lon"),
                                           Resolution::fine);
            p.work_cell = index->bin_point(t.num(r, "work_lat"), t.num(r, "work_lon"),
                                           Resolution::fine);
        }
        auto level = [&](const std::string& col, const std::set<std::string>& vocab) {
            const std::string& v = t.cell(r, col);
            if (!vocab.count(v)) throw UnknownLevel(col, v);
            return v;
        };
        auto yesno = [&](const std::string& col) {
            const std::string& v = t.cell(r, col);
            if (v != "yes" && v != "no") throw UnknownLevel(col, v);
            return v;
        };
        p.attributes["household_type"] = level("household_type", household_levels());
        p.attributes["education"] = level("education", education_levels());
        p.attributes["gender"] = level("gender", gender_levels());
        p.attributes["active_mode"] = yesno("active_mode");
        p.attributes["pt_subscription"] = yesno("pt_subscription");
        {
            const std::string& v = t.cell(r, "main_mode");
            if (v != "car" && v != "transit") throw UnknownLevel("main_mode", v);
            p.attributes["main_mode"] = v;
        }
        p.attributes["age"] = csv::Writer::fmt(t.num(r, "age"), 2);
        p.attributes["zone_poverty_rate"] = csv::Writer::fmt(t.num(r, "zone_poverty_rate"), 4);
        out.push_back(std::move(p));
    }
    return out;
}

// trips.csv
inline std::vector<TripRecord> parse_trips(const fs::path& path,
                                           const CellIndex* index = nullptr) {
    auto t = csv::Table::read_file(path);
    bool tokens = t.has_column("origin_cell");
    std::vector<TripRecord> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        std::string loc = path.filename().string() + " row " + std::to_string(r + 2);
        TripRecord trip;
        trip.person_id = t.cell(r, "person_id");
        trip.date = t.cell(r, "date");
        if (tokens) {
            trip.origin_cell = {t.cell(r, "origin_cell"), Resolution::fine};
            trip.dest_cell = {t.cell(r, "dest_cell"), Resolution::fine};
        } else {
            if (!index) throw ParseError(loc + ": lat/lon trips need a cell index");
            trip.origin_cell = index->bin_point(t.num(r, "origin_lat"), t.num(r, "origin_lon"),
                                                Resolution::fine);
            trip.dest_cell = index->bin_point(t.num(r, "dest_lat"), t.num(r, "dest_lon"),
                                              Resolution::fine);
        }
        trip.mode = parse_mode(t.cell(r, "mode"));
        trip.purpose = parse_purpose(t.cell(r, "purpose"));
        trip.duration_min = t.num(r, "duration_min");
        if (trip.duration_min < 0.0) throw ParseError(loc + ": negative duration");
        trip.depart_time = int(t.integer(r, "depart_time"));
        out.push_back(std::move(trip));
    }
    return out;
}

// pois.csv; keeps only social/leisure POIs strictly above the confidence
// threshold.
inline std::vector<Poi> parse_pois(const fs::path& path, double confidence_threshold) {
    if (confidence_threshold < 0.0 || confidence_threshold > 1.0)
        throw ParseError("confidence threshold outside [0,1]");
    auto t = csv::Table::read_file(path);
    std::vector<Poi> out;
    for (size_t r = 0; r < t.rows(); ++r) {
        std::string loc = path.filename().string() + " row " + std::to_string(r + 2);
        Poi p;
        p.poi_id = t.cell(r, "poi_id");
        p.lat = t.num(r, "lat");
        p.lon = t.num(r, "lon");
        validate_coordinate(p.lat, p.lon, loc);
        const std::string& cat = t.cell(r, "category");
        if (cat != "social_leisure" && cat != "other") throw UnknownLevel("category", cat);
        p.social_leisure = cat == "social_leisure";
        p.confidence = t.num(r, "confidence");
        if (p.social_leisure && p.confidence > confidence_threshold) out.push_back(std::move(p));
    }
    return out;
}

// roads_nodes.csv + roads_edges.csv
inline RoadGraphSource parse_roads(const fs::path& nodes_path, const fs::path& edges_path) {
    auto nt = csv::Table::read_file(nodes_path);
    RoadGraphSource g;
    std::unordered_map<std::string, uint32_t> node_index;
    g.nodes.reserve(nt.rows());
    for (size_t r = 0; r < nt.rows(); ++r) {
        RoadNode n;
        n.id = nt.cell(r, "node_id");
        n.lat = nt.num(r, "lat");
        n.lon = nt.num(r, "lon");
        validate_coordinate(n.lat, n.lon, nodes_path.filename().string() + " row " +
                                              std::to_string(r + 2));
        if (!node_index.emplace(n.id, uint32_t(g.nodes.size())).second)
            throw ParseError("duplicate node id " + n.id);
        g.nodes.push_back(std::move(n));
    }
    auto et = csv::Table::read_file(edges_path);
    g.edges.reserve(et.rows());
    for (size_t r = 0; r < et.rows(); ++r) {
        std::string loc = edges_path.filename().string() + " row " + std::to_string(r + 2);
        RoadEdge e;
        auto from = node_index.find(et.cell(r, "from_node"));
        auto to = node_index.find(et.cell(r, "to_node"));
        if (from == node_index.end()) throw DanglingReference("node", et.cell(r, "from_node"));
        if (to == node_index.end()) throw DanglingReference("node", et.cell(r, "to_node"));
        e.from = from->second;
        e.to = to->second;
        e.length_m = et.num(r, "length_m");
        e.speed_kmh = et.num(r, "speed_kmh");
        if (!(e.length_m > 0.0) || !(e.speed_kmh > 0.0))
            throw ParseError(loc + ": length and speed must be positive");
        e.mode_mask = 0;
        std::string modes = et.cell(r, "modes");
        if (modes.find("car") != std::string::npos) e.mode_mask |= kModeCar;
        if (modes.find("walk") != std::string::npos) e.mode_mask |= kModeWalk;
        if (e.mode_mask == 0) throw UnknownLevel("modes", modes);
        g.edges.push_back(e);
    }
    return g;
}

// ------------------------------------------------------------------
// GTFS

struct GtfsParseStats {
    size_t stops = 0, routes = 0, trips = 0, stop_times = 0, services = 0;
};

inline GtfsBundle parse_gtfs(const fs::path& dir, GtfsParseStats* stats = nullptr) {
    auto table = [&](const char* name, bool required) -> std::optional<csv::Table> {
        fs::path p = dir / name;
        if (!fs::exists(p)) {
            if (required) throw MissingTable((dir / name).string());
            return std::nullopt;
        }
        return csv::Table::read_file(p);
    };

    GtfsBundle b;
    std::unordered_map<std::string, uint32_t> stop_index;
    {
        auto t = *table("stops.txt", true);
        for (size_t r = 0; r < t.rows(); ++r) {
            GtfsStop s;
            s.id = t.cell(r, "stop_id");
            s.lat = t.num(r, "stop_lat");
            s.lon = t.num(r, "stop_lon");
            if (!stop_index.emplace(s.id, uint32_t(b.stops.size())).second)
                throw ParseError("duplicate stop_id " + s.id);
            b.stops.push_back(std::move(s));
        }
    }
    std::unordered_set<std::string> route_ids;
    {
        auto t = *table("routes.txt", true);
        for (size_t r = 0; r < t.rows(); ++r) {
            GtfsRoute route;
            route.id = t.cell(r, "route_id");
            if (t.has_column("route_short_name")) route.short_name = t.cell(r, "route_short_name");
            route_ids.insert(route.id);
            b.routes.push_back(std::move(route));
        }
    }

    // calendar.txt and/or calendar_dates.txt; at least one must exist.
    std::unordered_map<std::string, GtfsService> services;
    auto cal = table("calendar.txt", false);
    auto cal_dates = table("calendar_dates.txt", false);
    if (!cal && !cal_dates) throw MissingTable((dir / "calendar(.txt|_dates.txt)").string());
    if (cal) {
        static const char* days[7] = {"monday", "tuesday", "wednesday", "thursday",
                                      "friday", "saturday", "sunday"};
        for (size_t r = 0; r < cal->rows(); ++r) {
            std::string sid = cal->cell(r, "service_id");
            long start = cal->integer(r, "start_date"), end = cal->integer(r, "end_date");
            bool dow[7];
            for (int d = 0; d < 7; ++d) dow[d] = cal->integer(r, days[d]) != 0;
            auto& svc = services[sid];
            svc.id = sid;
            // expand date range day by day
            auto to_tm = [](long yyyymmdd) {
                std::tm tm{};
                tm.tm_year = int(yyyymmdd / 10000) - 1900;
                tm.tm_mon = int(yyyymmdd / 100 % 100) - 1;
                tm.tm_mday = int(yyyymmdd % 100);
                tm.tm_hour = 12;
                return tm;
            };
            std::tm tm = to_tm(start);
            std::time_t cur = timegm(&tm);
            std::tm end_tm = to_tm(end);
            std::time_t stop = timegm(&end_tm);
            for (; cur <= stop; cur += 86400) {
                std::tm* g = gmtime(&cur);
                int wd = (g->tm_wday + 6) % 7;  // monday = 0
                if (dow[wd]) {
                    char buf[40];
                    std::snprintf(buf, sizeof(buf), "%04d%02d%02d", g->tm_year + 1900,
                                  g->tm_mon + 1, g->tm_mday);
                    svc.active_dates.push_back(buf);
                }
            }
        }
    }
    if (cal_dates) {
        for (size_t r = 0; r < cal_dates->rows(); ++r) {
            std::string sid = cal_dates->cell(r, "service_id");
            std::string date = cal_dates->cell(r, "date");
            long ex = cal_dates->integer(r, "exception_type");
            auto& svc = services[sid];
            svc.id = sid;
            if (ex == 1) {
                svc.active_dates.push_back(date);
            } else {
                auto& d = svc.active_dates;
                d.erase(std::remove(d.begin(), d.end(), date), d.end());
            }
        }
    }
    for (auto& [id, svc] : services) {
        std::sort(svc.active_dates.begin(), svc.active_dates.end());
        svc.active_dates.erase(std::unique(svc.active_dates.begin(), svc.active_dates.end()),
                               svc.active_dates.end());
        b.services.push_back(std::move(svc));
    }
    std::sort(b.services.begin(), b.services.end(),
              [](const GtfsService& a, const GtfsService& bb) { return a.id < bb.id; });

    std::unordered_map<std::string, uint32_t> trip_index;
    {
        auto t = *table("trips.txt", true);
        for (size_t r = 0; r < t.rows(); ++r) {
            GtfsTrip trip;
            trip.id = t.cell(r, "trip_id");
            trip.route_id = t.cell(r, "route_id");
            trip.service_id = t.cell(r, "service_id");
            if (!route_ids.count(trip.route_id)) throw DanglingReference("route", trip.route_id);
            bool svc_ok = false;
            for (const auto& s : b.services) svc_ok |= s.id == trip.service_id;
            if (!svc_ok) throw DanglingReference("service", trip.service_id);
            if (!trip_index.emplace(trip.id, uint32_t(b.trips.size())).second)
                throw ParseError("duplicate trip_id " + trip.id);
            b.trips.push_back(std::move(trip));
        }
    }
    size_t n_stop_times = 0;
    {
        auto t = *table("stop_times.txt", true);
        for (size_t r = 0; r < t.rows(); ++r) {
            std::string tid = t.cell(r, "trip_id");
            auto ti = trip_index.find(tid);
            if (ti == trip_index.end()) throw DanglingReference("trip", tid);
            auto si = stop_index.find(t.cell(r, "stop_id"));
            if (si == stop_index.end()) throw DanglingReference("stop", t.cell(r, "stop_id"));
            GtfsStopTime st;
            std::string loc = "stop_times.txt row " + std::to_string(r + 2);
            st.arrival_s = parse_gtfs_time(t.cell(r, "arrival_time"), loc);
            st.departure_s = parse_gtfs_time(t.cell(r, "departure_time"), loc);
            st.stop_sequence = int(t.integer(r, "stop_sequence"));
            st.stop_index = si->second;
            b.trips[ti->second].stop_times.push_back(st);
            ++n_stop_times;
        }
    }
    if (fs::exists(dir / "transfers.txt")) {
        auto t = *table("transfers.txt", false);
        for (size_t r = 0; r < t.rows(); ++r) {
            auto from = stop_index.find(t.cell(r, "from_stop_id"));
            auto to = stop_index.find(t.cell(r, "to_stop_id"));
            if (from == stop_index.end()) throw DanglingReference("stop", t.cell(r, "from_stop_id"));
            if (to == stop_index.end()) throw DanglingReference("stop", t.cell(r, "to_stop_id"));
            GtfsTransfer tr;
            tr.from_stop = from->second;
            tr.to_stop = to->second;
            tr.min_transfer_s = t.has_column("min_transfer_time")
                                    ? int(t.integer(r, "min_transfer_time"))
                                    : 0;
            b.transfers.push_back(tr);
        }
    }

    // Sort each trip by stop_sequence, then validate monotonicity.
    for (auto& trip : b.trips) {
        std::sort(trip.stop_times.begin(), trip.stop_times.end(),
                  [](const GtfsStopTime& a, const GtfsStopTime& bb) {
                      return a.stop_sequence < bb.stop_sequence;
                  });
        for (size_t i = 0; i < trip.stop_times.size(); ++i) {
            const auto& st = trip.stop_times[i];
            if (st.departure_s < st.arrival_s) throw NonMonotoneStopTimes(trip.id);
            if (i > 0) {
                const auto& prev = trip.stop_times[i - 1];
                if (st.stop_sequence <= prev.stop_sequence || st.arrival_s < prev.departure_s)
                    throw NonMonotoneStopTimes(trip.id);
            }
        }
    }

    if (stats) {
        stats->stops = b.stops.size();
        stats->routes = b.routes.size();
        stats->trips = b.trips.size();
        stats->stop_times = n_stop_times;
        stats->services = b.services.size();
    }
    return b;
}

inline std::string fmt_gtfs_time(int s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", s / 3600, s / 60 % 60, s % 60);
    return buf;
}

// Writes a bundle back out as a GTFS directory (calendar_dates form).
inline void write_gtfs(const GtfsBundle& b, const fs::path& dir) {
    fs::create_directories(dir);
    {
        csv::Writer w(dir / "stops.txt");
        w.row({"stop_id", "stop_lat", "stop_lon"});
        for (const auto& s : b.stops)
            w.row({s.id, csv::Writer::fmt(s.lat, 7), csv::Writer::fmt(s.lon, 7)});
    }
    {
        csv::Writer w(dir / "routes.txt");
        w.row({"route_id", "route_short_name", "route_type"});
        for (const auto& r : b.routes) w.row({r.id, r.short_name, "3"});
    }
    {
        csv::Writer w(dir / "trips.txt");
        w.row({"route_id", "service_id", "trip_id"});
        for (const auto& t : b.trips) w.row({t.route_id, t.service_id, t.id});
    }
    {
        csv::Writer w(dir / "stop_times.txt");
        w.row({"trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"});
        for (const auto& t : b.trips)
            for (const auto& st : t.stop_times)
                w.row({t.id, fmt_gtfs_time(st.arrival_s), fmt_gtfs_time(st.departure_s),
                       b.stops[st.stop_index].id, std::to_string(st.stop_sequence)});
    }
    {
        csv::Writer w(dir / "calendar_dates.txt");
        w.row({"service_id", "date", "exception_type"});
        for (const auto& s : b.services)
            for (const auto& d : s.active_dates) w.row({s.id, d, "1"});
    }
    if (!b.transfers.empty()) {
        csv::Writer w(dir / "transfers.txt");
        w.row({"from_stop_id", "to_stop_id", "transfer_type", "min_transfer_time"});
        for (const auto& t : b.transfers)
            w.row({b.stops[t.from_stop].id, b.stops[t.to_stop].id, "2",
                   std::to_string(t.min_transfer_s)});
    }
}

// Commute samples for estimate_commute_time: observed work-bound trips of the
// person, one sample per trip, weighted equally per day.
inline void attach_commute_samples(std::vector<PersonRecord>& persons,
                                   const std::vector<TripRecord>& trips) {
    std::unordered_map<std::string, PersonRecord*> by_id;
    for (auto& p : persons) by_id[p.person_id] = &p;
    for (const auto& t : trips) {
        if (t.purpose != Purpose::work) continue;
        auto it = by_id.find(t.person_id);
        if (it == by_id.end()) continue;
        it->second->commute_samples.push_back({t.duration_min, 1.0});
    }
}

}  // namespace sta::ingest
