#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "sta/errors.hpp"

namespace sta {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kPi = 3.141592653589793;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline void validate_coordinate(double lat, double lon, const std::string& where) {
    if (!(lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0) ||
        std::isnan(lat) || std::isnan(lon))
        throw BadCoordinate(where);
}

inline double haversine_m(LatLon a, LatLon b) {
    double dlat = deg2rad(b.lat - a.lat);
    double dlon = deg2rad(b.lon - a.lon);
    double s = std::sin(dlat / 2), t = std::sin(dlon / 2);
    double h = s * s + std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) * t * t;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

enum class Resolution { fine, coarse };

struct CellId {
    std::string token;
    Resolution resolution = Resolution::fine;

    bool operator==(const CellId& o) const {
        return token == o.token && resolution == o.resolution;
    }
    bool operator<(const CellId& o) const { return token < o.token; }
};

struct BoundingBox {
    double min_lat, min_lon, max_lat, max_lon;
    bool contains(double lat, double lon) const {
        return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
    }
};

// Hexagonal binning at two resolutions over a local azimuthal projection
// centered on the study box. Pointy-top axial lattice; the edge lengths are
// chosen to hit the target mean cell areas (0.015 km^2 fine, 0.74 km^2
// coarse). Tokens are "f:q:r" / "c:q:r".
class CellIndex {
public:
    explicit CellIndex(BoundingBox box) : box_(box) {
        lat0_ = 0.5 * (box.min_lat + box.max_lat);
        lon0_ = 0.5 * (box.min_lon + box.max_lon);
        coslat0_ = std::cos(deg2rad(lat0_));
        // hex area = 3*sqrt(3)/2 * s^2
        edge_fine_ = std::sqrt(2.0 * 15000.0 / (3.0 * std::sqrt(3.0)));
        edge_coarse_ = std::sqrt(2.0 * 740000.0 / (3.0 * std::sqrt(3.0)));
        // allow one coarse cell of slack so centroids of boundary cells,
        // which can fall just outside the box, still bin
        double slack_m = 2.0 * edge_coarse_;
        tol_lat_ = rad2deg(slack_m / kEarthRadiusM);
        tol_lon_ = rad2deg(slack_m / (kEarthRadiusM * std::max(coslat0_, 1e-6)));
    }

    const BoundingBox& box() const { return box_; }

    CellId bin_point(double lat, double lon, Resolution res) const {
        validate_coordinate(lat, lon, "bin_point");
        if (lat < box_.min_lat - tol_lat_ || lat > box_.max_lat + tol_lat_ ||
            lon < box_.min_lon - tol_lon_ || lon > box_.max_lon + tol_lon_)
            throw OutOfBounds(lat, lon);
        auto [x, y] = project(lat, lon);
        auto [q, r] = hex_round(x, y, edge(res));
        return {token(res, q, r), res};
    }

    LatLon centroid(const CellId& cell) const {
        long q, r;
        if (!parse_token(cell, q, r)) throw UnknownCell(cell.token);
        double s = edge(cell.resolution);
        double x = s * std::sqrt(3.0) * (double(q) + double(r) / 2.0);
        double y = s * 1.5 * double(r);
        return unproject(x, y);
    }

    // Coarse parent of a fine cell, defined via the fine cell's centroid so
    // the mapping is a function even when a fine hex straddles a coarse edge.
    CellId parent(const CellId& fine_cell) const {
        if (fine_cell.resolution != Resolution::fine) throw UnknownCell(fine_cell.token);
        LatLon c = centroid(fine_cell);
        auto [x, y] = project(c.lat, c.lon);
        auto [q, r] = hex_round(x, y, edge_coarse_);
        return {token(Resolution::coarse, q, r), Resolution::coarse};
    }

    double edge(Resolution res) const {
        return res == Resolution::fine ? edge_fine_ : edge_coarse_;
    }

    // Hex corners, lat/lon, for GeoJSON output.
    std::array<LatLon, 6> corners(const CellId& cell) const {
        long q, r;
        if (!parse_token(cell, q, r)) throw UnknownCell(cell.token);
        double s = edge(cell.resolution);
        double cx = s * std::sqrt(3.0) * (double(q) + double(r) / 2.0);
        double cy = s * 1.5 * double(r);
        std::array<LatLon, 6> out;
        for (int i = 0; i < 6; ++i) {
            double ang = kPi / 180.0 * (60.0 * i - 30.0) + kPi / 2.0;  // pointy-top
            out[i] = unproject(cx + s * std::cos(ang), cy + s * std::sin(ang));
        }
        return out;
    }

    static bool parse_token(const CellId& cell, long& q, long& r) {
        char kind = 0;
        if (std::sscanf(cell.token.c_str(), "%c:%ld:%ld", &kind, &q, &r) != 3) return false;
        if (kind != (cell.resolution == Resolution::fine ? 'f' : 'c')) return false;
        return true;
    }

private:
    static std::string token(Resolution res, long q, long r) {
        return std::string(1, res == Resolution::fine ? 'f' : 'c') + ":" + std::to_string(q) +
               ":" + std::to_string(r);
    }

    std::pair<double, double> project(double lat, double lon) const {
        double x = deg2rad(lon - lon0_) * kEarthRadiusM * coslat0_;
        double y = deg2rad(lat - lat0_) * kEarthRadiusM;
        return {x, y};
    }

    LatLon unproject(double x, double y) const {
        return {lat0_ + rad2deg(y / kEarthRadiusM), lon0_ + rad2deg(x / (kEarthRadiusM * coslat0_))};
    }

    // Axial coordinates via cube rounding; ties resolve deterministically
    // through the fixed rounding order so boundary points always land in the
    // same cell.
    static std::pair<long, long> hex_round(double x, double y, double s) {
        double qf = (std::sqrt(3.0) / 3.0 * x - 1.0 / 3.0 * y) / s;
        double rf = (2.0 / 3.0 * y) / s;
        double sf = -qf - rf;
        double q = std::round(qf), r = std::round(rf), z = std::round(sf);
        double dq = std::fabs(q - qf), dr = std::fabs(r - rf), dz = std::fabs(z - sf);
        if (dq > dr && dq > dz) q = -r - z;
        else if (dr > dz) r = -q - z;
        return {long(q), long(r)};
    }

    BoundingBox box_;
    double lat0_, lon0_, coslat0_;
    double edge_fine_, edge_coarse_;
    double tol_lat_ = 0.0, tol_lon_ = 0.0;
};

}  // namespace sta

template <>
struct std::hash<sta::CellId> {
    size_t operator()(const sta::CellId& c) const {
        return std::hash<std::string>{}(c.token) ^ (size_t(c.resolution) << 1);
    }
};
