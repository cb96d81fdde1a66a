#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sta/ingest.hpp"
#include "sta/synth.hpp"

using namespace sta;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("sta_ingest_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

const char* kPersonHeader =
    "person_id,weight,home_cell,work_cell,household_type,education,gender,active_mode,"
    "pt_subscription,main_mode,age,zone_poverty_rate\n";

std::string person_row(const std::string& id, const std::string& weight,
                       const std::string& household = "Living alone") {
    return id + "," + weight + ",f:0:0,f:1:1," + household +
           ",Vocational,Woman,yes,no,car,41,12.5\n";
}

}  // namespace

TEST_CASE("persons parse with closed vocabularies") {
    auto dir = tmp_dir("persons");
    write(dir / "persons.csv", std::string(kPersonHeader) + person_row("p1", "1.5") +
                                   person_row("p2", "0.7", "In a shared apartment"));
    auto persons = ingest::parse_persons(dir / "persons.csv");
    REQUIRE(persons.size() == 2);
    CHECK(persons[0].weight == doctest::Approx(1.5));
    CHECK(persons[0].home_cell.token == "f:0:0");
    CHECK(persons[1].attributes.at("household_type") == "In a shared apartment");
    CHECK(persons[0].attributes.at("age") == "41.00");
}

TEST_CASE("persons with bad fields are rejected") {
    auto dir = tmp_dir("persons_bad");
    write(dir / "zero_weight.csv", std::string(kPersonHeader) + person_row("p1", "0"));
    CHECK_THROWS_AS(ingest::parse_persons(dir / "zero_weight.csv"), BadWeight);
    write(dir / "neg_weight.csv", std::string(kPersonHeader) + person_row("p1", "-2"));
    CHECK_THROWS_AS(ingest::parse_persons(dir / "neg_weight.csv"), BadWeight);
    write(dir / "bad_level.csv", std::string(kPersonHeader) + person_row("p1", "1", "Flatmates"));
    CHECK_THROWS_AS(ingest::parse_persons(dir / "bad_level.csv"), UnknownLevel);
    write(dir / "no_anchor.csv",
          std::string(kPersonHeader) +
              "p1,1,,f:1:1,Living alone,Vocational,Woman,yes,no,car,41,12.5\n");
    CHECK_THROWS_AS(ingest::parse_persons(dir / "no_anchor.csv"), MissingAnchor);
    write(dir / "bad_mode.csv",
          std::string(kPersonHeader) +
              "p1,1,f:0:0,f:1:1,Living alone,Vocational,Woman,yes,no,bike,41,12.5\n");
    CHECK_THROWS_AS(ingest::parse_persons(dir / "bad_mode.csv"), UnknownLevel);
}

TEST_CASE("trips parse and validate") {
    auto dir = tmp_dir("trips");
    write(dir / "trips.csv",
          "person_id,date,origin_cell,dest_cell,mode,purpose,duration_min,depart_time\n"
          "p1,20230315,f:0:0,f:1:1,car,WORK,25.5,28800\n"
          "p1,20230315,f:1:1,f:2:2,transit,LEISURE,12,64800\n");
    auto trips = ingest::parse_trips(dir / "trips.csv");
    REQUIRE(trips.size() == 2);
    CHECK(trips[0].purpose == Purpose::work);
    CHECK(trips[1].mode == Mode::transit);
    CHECK(trips[0].duration_min == doctest::Approx(25.5));

    write(dir / "neg.csv",
          "person_id,date,origin_cell,dest_cell,mode,purpose,duration_min,depart_time\n"
          "p1,20230315,f:0:0,f:1:1,car,WORK,-1,28800\n");
    CHECK_THROWS_AS(ingest::parse_trips(dir / "neg.csv"), ParseError);
    write(dir / "badpurpose.csv",
          "person_id,date,origin_cell,dest_cell,mode,purpose,duration_min,depart_time\n"
          "p1,20230315,f:0:0,f:1:1,car,errand,5,28800\n");
    CHECK_THROWS_AS(ingest::parse_trips(dir / "badpurpose.csv"), UnknownLevel);
}

TEST_CASE("poi filter is strict on the confidence threshold") {
    auto dir = tmp_dir("pois");
    write(dir / "pois.csv",
          "poi_id,lat,lon,category,confidence\n"
          "a,48.85,2.35,social_leisure,0.70\n"   // exactly at threshold: excluded
          "b,48.85,2.35,social_leisure,0.71\n"   // above: kept
          "c,48.85,2.35,other,0.99\n"            // wrong category: excluded
          "d,48.85,2.35,social_leisure,0.999\n");
    auto pois = ingest::parse_pois(dir / "pois.csv", 0.7);
    REQUIRE(pois.size() == 2);
    CHECK(pois[0].poi_id == "b");
    CHECK(pois[1].poi_id == "d");

    write(dir / "badlat.csv",
          "poi_id,lat,lon,category,confidence\na,91.0,2.35,social_leisure,0.9\n");
    CHECK_THROWS_AS(ingest::parse_pois(dir / "badlat.csv", 0.7), BadCoordinate);
    CHECK_THROWS_AS(ingest::parse_pois(dir / "pois.csv", 1.5), ParseError);
}

TEST_CASE("road edges must reference known nodes") {
    auto dir = tmp_dir("roads");
    write(dir / "roads_nodes.csv", "node_id,lat,lon\nn1,48.85,2.35\nn2,48.86,2.36\n");
    write(dir / "roads_edges.csv",
          "from_node,to_node,length_m,speed_kmh,modes\nn1,n2,500,30,car|walk\n");
    auto g = ingest::parse_roads(dir / "roads_nodes.csv", dir / "roads_edges.csv");
    CHECK(g.nodes.size() == 2);
    CHECK(g.edges.size() == 1);
    CHECK(g.edges[0].mode_mask == (kModeCar | kModeWalk));

    write(dir / "roads_edges.csv",
          "from_node,to_node,length_m,speed_kmh,modes\nn1,nX,500,30,car\n");
    CHECK_THROWS_AS(ingest::parse_roads(dir / "roads_nodes.csv", dir / "roads_edges.csv"),
                    DanglingReference);
}

namespace {

void write_minimal_gtfs(const fs::path& dir, const std::string& stop_times) {
    fs::create_directories(dir);
    write(dir / "stops.txt",
          "stop_id,stop_lat,stop_lon\ns1,48.85,2.35\ns2,48.86,2.36\ns3,48.87,2.37\n");
    write(dir / "routes.txt", "route_id,route_short_name\nr1,R1\n");
    write(dir / "trips.txt", "route_id,service_id,trip_id\nr1,svc,t1\n");
    write(dir / "calendar_dates.txt", "service_id,date,exception_type\nsvc,20230315,1\n");
    write(dir / "stop_times.txt", stop_times);
}

}  // namespace

TEST_CASE("minimal GTFS feed parses") {
    auto dir = tmp_dir("gtfs_min");
    write_minimal_gtfs(dir / "gtfs",
                       "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                       "t1,17:00:00,17:00:00,s1,1\n"
                       "t1,17:05:00,17:06:00,s2,2\n"
                       "t1,17:10:00,17:10:00,s3,3\n");
    ingest::GtfsParseStats stats;
    auto b = ingest::parse_gtfs(dir / "gtfs", &stats);
    CHECK(stats.stops == 3);
    CHECK(stats.trips == 1);
    CHECK(stats.stop_times == 3);
    CHECK(b.service_active("svc", "20230315"));
    CHECK_FALSE(b.service_active("svc", "20230316"));
    CHECK(b.trips[0].stop_times[1].departure_s == 17 * 3600 + 6 * 60);
}

TEST_CASE("GTFS integrity violations throw") {
    auto dir = tmp_dir("gtfs_bad");
    write_minimal_gtfs(dir / "dangling",
                       "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                       "t1,17:00:00,17:00:00,sX,1\n");
    CHECK_THROWS_AS(ingest::parse_gtfs(dir / "dangling"), DanglingReference);

    write_minimal_gtfs(dir / "nonmono",
                       "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                       "t1,17:10:00,17:10:00,s1,1\n"
                       "t1,17:05:00,17:05:00,s2,2\n");
    CHECK_THROWS_AS(ingest::parse_gtfs(dir / "nonmono"), NonMonotoneStopTimes);

    write_minimal_gtfs(dir / "deparr",
                       "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                       "t1,17:10:00,17:09:00,s1,1\n");
    CHECK_THROWS_AS(ingest::parse_gtfs(dir / "deparr"), NonMonotoneStopTimes);

    write_minimal_gtfs(dir / "missing",
                       "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                       "t1,17:00:00,17:00:00,s1,1\n");
    fs::remove(dir / "missing" / "routes.txt");
    CHECK_THROWS_AS(ingest::parse_gtfs(dir / "missing"), MissingTable);
}

TEST_CASE("calendar day-of-week expansion") {
    auto dir = tmp_dir("gtfs_cal");
    fs::create_directories(dir / "gtfs");
    write(dir / "gtfs" / "stops.txt", "stop_id,stop_lat,stop_lon\ns1,48.85,2.35\ns2,48.86,2.36\n");
    write(dir / "gtfs" / "routes.txt", "route_id\nr1\n");
    write(dir / "gtfs" / "trips.txt", "route_id,service_id,trip_id\nr1,wk,t1\n");
    // weekdays only across one week; 20230315 is a Wednesday, 20230318 a Saturday
    write(dir / "gtfs" / "calendar.txt",
          "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,"
          "end_date\nwk,1,1,1,1,1,0,0,20230313,20230319\n");
    write(dir / "gtfs" / "calendar_dates.txt",
          "service_id,date,exception_type\nwk,20230316,2\n");  // remove the Thursday
    write(dir / "gtfs" / "stop_times.txt",
          "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
          "t1,17:00:00,17:00:00,s1,1\nt1,17:05:00,17:05:00,s2,2\n");
    auto b = ingest::parse_gtfs(dir / "gtfs");
    CHECK(b.service_active("wk", "20230315"));
    CHECK_FALSE(b.service_active("wk", "20230318"));
    CHECK_FALSE(b.service_active("wk", "20230316"));
}

TEST_CASE("GTFS write/parse round trip preserves the timetable") {
    synth::SynthSpec spec;
    spec.grid_nx = spec.grid_ny = 3;
    auto city = synth::gen_city(spec);
    auto dir = tmp_dir("gtfs_rt");
    ingest::write_gtfs(city.gtfs, dir / "gtfs");
    auto back = ingest::parse_gtfs(dir / "gtfs");
    REQUIRE(back.stops.size() == city.gtfs.stops.size());
    REQUIRE(back.trips.size() == city.gtfs.trips.size());
    CHECK(back.service_active("svc", spec.date));
    // compare stop_times trip by trip (ids survive the round trip)
    std::map<std::string, const GtfsTrip*> orig;
    for (const auto& t : city.gtfs.trips) orig[t.id] = &t;
    for (const auto& t : back.trips) {
        const auto* o = orig.at(t.id);
        REQUIRE(t.stop_times.size() == o->stop_times.size());
        for (size_t i = 0; i < t.stop_times.size(); ++i) {
            CHECK(t.stop_times[i].arrival_s == o->stop_times[i].arrival_s);
            CHECK(t.stop_times[i].departure_s == o->stop_times[i].departure_s);
            CHECK(back.stops[t.stop_times[i].stop_index].id ==
                  city.gtfs.stops[o->stop_times[i].stop_index].id);
        }
    }
}

TEST_CASE("commute samples come from observed work trips") {
    auto dir = tmp_dir("commute");
    write(dir / "persons.csv", std::string(kPersonHeader) + person_row("p1", "1"));
    write(dir / "trips.csv",
          "person_id,date,origin_cell,dest_cell,mode,purpose,duration_min,depart_time\n"
          "p1,20230313,f:0:0,f:1:1,car,WORK,20,28800\n"
          "p1,20230314,f:0:0,f:1:1,car,WORK,30,28800\n"
          "p1,20230314,f:1:1,f:2:2,car,LEISURE,15,64800\n");
    auto persons = ingest::parse_persons(dir / "persons.csv");
    auto trips = ingest::parse_trips(dir / "trips.csv");
    ingest::attach_commute_samples(persons, trips);
    REQUIRE(persons[0].commute_samples.size() == 2);
    CHECK(persons[0].commute_samples[0].duration_min == doctest::Approx(20.0));
    CHECK(persons[0].commute_samples[1].duration_min == doctest::Approx(30.0));
}
