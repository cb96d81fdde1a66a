#pragma once

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "sta/spatial.hpp"

namespace sta::geojson {

using json = nlohmann::ordered_json;

// One hexagon Feature per cell; properties carry raw statistics only.
inline json cell_layer(const CellIndex& index,
                       const std::map<std::string, std::map<std::string, double>>& cell_props) {
    json features = json::array();
    for (const auto& [token, props] : cell_props) {
        CellId cell{token, Resolution::coarse};
        auto corners = index.corners(cell);
        json ring = json::array();
        for (const auto& c : corners) ring.push_back({c.lon, c.lat});
        ring.push_back({corners[0].lon, corners[0].lat});
        json properties;
        properties["cell"] = token;
        for (const auto& [k, v] : props) properties[k] = v;
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}},
                            {"properties", properties}});
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

inline void write(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

}  // namespace sta::geojson
