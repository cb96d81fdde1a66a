#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sta/spatial.hpp"

namespace sta {

enum class Mode { car, transit, walk, bike, other };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::car: return "car";
        case Mode::transit: return "transit";
        case Mode::walk: return "walk";
        case Mode::bike: return "bike";
        case Mode::other: return "other";
    }
    return "other";
}

enum class Purpose { leisure, home, work, other };

struct CommuteSample {
    double duration_min = 0.0;
    double day_weight = 1.0;
};

struct PersonRecord {
    std::string person_id;
    CellId home_cell;  // fine resolution
    CellId work_cell;
    double weight = 1.0;
    std::map<std::string, std::string> attributes;
    std::vector<CommuteSample> commute_samples;
};

struct TripRecord {
    std::string person_id;
    std::string date;
    CellId origin_cell;
    CellId dest_cell;
    Mode mode = Mode::other;
    Purpose purpose = Purpose::other;
    double duration_min = 0.0;
    int depart_time = 0;  // seconds since midnight
};

struct Poi {
    std::string poi_id;
    double lat = 0.0;
    double lon = 0.0;
    bool social_leisure = false;
    double confidence = 0.0;
};

// --- GTFS ---

struct GtfsStop {
    std::string id;
    double lat = 0.0, lon = 0.0;
};

struct GtfsRoute {
    std::string id;
    std::string short_name;
};

struct GtfsStopTime {
    int arrival_s = 0;
    int departure_s = 0;
    int stop_sequence = 0;
    uint32_t stop_index = 0;  // into GtfsBundle::stops
};

struct GtfsTrip {
    std::string id;
    std::string route_id;
    std::string service_id;
    std::vector<GtfsStopTime> stop_times;  // ordered by stop_sequence
};

struct GtfsService {
    std::string id;
    std::vector<std::string> active_dates;  // YYYYMMDD
};

struct GtfsTransfer {
    uint32_t from_stop = 0, to_stop = 0;
    int min_transfer_s = 0;
};

struct GtfsBundle {
    std::vector<GtfsStop> stops;
    std::vector<GtfsRoute> routes;
    std::vector<GtfsTrip> trips;
    std::vector<GtfsService> services;
    std::vector<GtfsTransfer> transfers;

    bool service_active(const std::string& service_id, const std::string& date) const {
        for (const auto& s : services)
            if (s.id == service_id)
                for (const auto& d : s.active_dates)
                    if (d == date) return true;
        return false;
    }
};

// --- Road network source ---

struct RoadNode {
    std::string id;
    double lat = 0.0, lon = 0.0;
};

enum ModeMask : unsigned { kModeCar = 1u, kModeWalk = 2u };

struct RoadEdge {
    uint32_t from = 0, to = 0;  // node indices
    double length_m = 0.0;
    double speed_kmh = 0.0;
    unsigned mode_mask = kModeCar | kModeWalk;

    double travel_s(double speed_override_kmh = 0.0) const {
        double v = speed_override_kmh > 0.0 ? speed_override_kmh : speed_kmh;
        return length_m / (v * 1000.0 / 3600.0);
    }
};

struct RoadGraphSource {
    std::vector<RoadNode> nodes;
    std::vector<RoadEdge> edges;
};

}  // namespace sta
