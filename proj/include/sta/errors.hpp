#pragma once

#include <stdexcept>
#include <string>

namespace sta {

// Base for all toolkit errors. Messages carry a locator (file, row, id)
// whenever one exists.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingTable : Error {
    explicit MissingTable(const std::string& table)
        : Error("missing table: " + table), table(table) {}
    std::string table;
};

struct DanglingReference : Error {
    DanglingReference(const std::string& kind, const std::string& id)
        : Error("dangling " + kind + " reference: " + id), id(id) {}
    std::string id;
};

struct NonMonotoneStopTimes : Error {
    explicit NonMonotoneStopTimes(const std::string& trip_id)
        : Error("non-monotone stop_times in trip: " + trip_id), trip_id(trip_id) {}
    std::string trip_id;
};

struct BadWeight : Error {
    explicit BadWeight(const std::string& where) : Error("nonpositive weight at " + where) {}
};

struct UnknownLevel : Error {
    UnknownLevel(const std::string& attr, const std::string& level)
        : Error("unknown level '" + level + "' for attribute " + attr) {}
};

struct MissingAnchor : Error {
    explicit MissingAnchor(const std::string& where) : Error("missing home/work anchor at " + where) {}
};

struct BadCoordinate : Error {
    explicit BadCoordinate(const std::string& where) : Error("bad coordinate at " + where) {}
};

struct OutOfBounds : Error {
    OutOfBounds(double lat, double lon)
        : Error("point outside study bounding box: " + std::to_string(lat) + "," + std::to_string(lon)) {}
};

struct UnknownCell : Error {
    explicit UnknownCell(const std::string& token) : Error("unknown cell token: " + token) {}
};

struct NoServiceOnDate : Error {
    explicit NoServiceOnDate(const std::string& date) : Error("no transit service active on " + date) {}
};

struct SnapFailure : Error {
    SnapFailure(double lat, double lon)
        : Error("no road node within snap radius of " + std::to_string(lat) + "," + std::to_string(lon)) {}
};

struct EmptyFeasibleSet : Error {
    explicit EmptyFeasibleSet(const std::string& person)
        : Error("empty feasible set for person " + person) {}
};

struct EmptyVisits : Error {
    explicit EmptyVisits(const std::string& person) : Error("no leisure visits for person " + person) {}
};

struct CyclicGraph : Error {
    explicit CyclicGraph(const std::string& node) : Error("cycle through node " + node) {}
};

struct SingularDesign : Error {
    explicit SingularDesign(const std::string& equation)
        : Error("singular design matrix in equation for " + equation) {}
};

struct MissingPath : Error {
    MissingPath(const std::string& from, const std::string& to)
        : Error("no directed path " + from + " -> " + to) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace sta
