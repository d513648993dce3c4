#include <doctest.h>

#include <cmath>
#include <map>

#include "thermnet/config.hpp"
#include "thermnet/elements.hpp"
#include "thermnet/simulate.hpp"
#include "thermnet/statespace.hpp"
#include "thermnet/timeseries_io.hpp"

using namespace thermnet;

namespace {

const char* kDividerDoc = R"(# two raw circuits sharing a node
circuit left
  node a capacity=100 flow output
  node b
  branch b1 ref a g=2.0 temp
  branch b2 a b g=3.0
end
circuit right
  node c capacity=50
  branch b1 ref c g=1.5 temp
end
connect left.b right.c
bind T_out left.b1
bind T_in right.b1
bind Q left.a scale=0.5
output right.c
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("figure-1 style fixture parses to three circuits and two connections") {
    const BuildingDescription desc =
        parse_building(std::string(THERMNET_DATA_DIR) + "/figure1.tc");
    CHECK(desc.elements.size() == 3);
    CHECK(desc.connections.size() == 2);
    for (const auto& element : desc.elements)
        CHECK(std::holds_alternative<RawCircuitDecl>(element));

    const BuildingModel model = compile_building(desc);
    CHECK(model.assembled.branch_count() == 5);
    CHECK(model.assembled.node_count() == 3);
    IntVector f(3);
    f << 1, 0, 1;
    CHECK(model.assembled.flow_source_flags == f);
}

TEST_CASE("empty documents are rejected") {
    CHECK_THROWS_WITH_AS(parse_building_text("", "empty.tc"),
                         doctest::Contains("no circuits declared"), ParseError);
    CHECK_THROWS_WITH_AS(parse_building_text("# only a comment\n", "empty.tc"),
                         doctest::Contains("no circuits declared"), ParseError);
}

TEST_CASE("unknown declarations and keys are rejected with locations") {
    try {
        parse_building_text("frobnicate x\n", "bad.tc");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(doctest::String(e.what()) == doctest::Contains("unknown declaration"));
    }
    try {
        parse_building_text("zone z volume=10 shape=round\n", "bad.tc");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(doctest::String(e.what()) == doctest::Contains("unknown key 'shape'"));
    }
}

TEST_CASE("unresolved connection labels carry their location") {
    const std::string doc = std::string(kDividerDoc) + "connect left.b right.nope\n";
    try {
        parse_building_text(doc, "divider.tc");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(doctest::String(e.what()) == doctest::Contains("unresolved node label"));
        CHECK(doctest::String(e.what()) == doctest::Contains("right.nope"));
        CHECK(e.line() == 17);
    }
}

TEST_CASE("binding a flagless source is rejected") {
    const std::string doc = std::string(kDividerDoc) + "bind X left.b2\n";
    CHECK_THROWS_WITH_AS(parse_building_text(doc, "divider.tc"),
                         doctest::Contains("no temperature-source flag"), ParseError);
}

TEST_CASE("parse, serialize and reparse is the identity") {
    const BuildingDescription first = parse_building_text(kDividerDoc, "divider.tc");
    const std::string text = serialize_building(first);
    const BuildingDescription second = parse_building_text(text, "roundtrip.tc");
    CHECK(first == second);
    CHECK(serialize_building(second) == text);
}

TEST_CASE("round trip covers element declarations") {
    const char* doc = R"(material brick k=0.22 rho=800 cp=1000
walltype shell absorptance=0.23 emissivity=0.9
  layer brick d=0.2 slices=3
end
windowtype small overall=2.0 glass=1.5
  tau 0 0.7
  tau 60 0.5
end
wall south type=shell area=10.5 h_in=8.1
window w type=small u=1.1
zone z volume=46
airflow vent flow=60
connect south.inside z.air
connect w.inside z.air
connect vent.inside z.air
bind T_out south.film_out
bind T_out w.film_out
bind T_sup vent.flow
bind Q z.air scale=0.7
output z.air
)";
    const BuildingDescription first = parse_building_text(doc, "demo.tc");
    const BuildingDescription second =
        parse_building_text(serialize_building(first), "demo2.tc");
    CHECK(first == second);
}

TEST_CASE("compiled divider resolves bindings onto global indices") {
    const BuildingDescription desc = parse_building_text(kDividerDoc, "divider.tc");
    const BuildingModel model = compile_building(desc);
    REQUIRE(model.bindings.size() == 3);
    CHECK(model.bindings[0].channel == "T_out");
    CHECK(model.bindings[0].is_branch);
    CHECK(model.bindings[0].global_index == 0);
    CHECK(model.bindings[1].channel == "T_in");
    CHECK(model.bindings[1].global_index == 2);
    CHECK(model.bindings[2].channel == "Q");
    CHECK_FALSE(model.bindings[2].is_branch);
    CHECK(model.bindings[2].scale == 0.5);

    // left.b merged with right.c; output display names follow the flags.
    CHECK(model.assembled.node_count() == 2);
    REQUIRE(model.output_display_names.size() == 2);
    CHECK(model.output_display_names[0] == "left.a");
    CHECK(model.output_display_names[1] == "right.c");
}

TEST_CASE("duplicate temperature bindings are rejected") {
    const std::string doc = std::string(kDividerDoc) + "bind T_other left.b1\n";
    CHECK_THROWS_WITH_AS(parse_building_text(doc, "divider.tc"),
                         doctest::Contains("bound more than once"), ParseError);
}

TEST_CASE("time series ingestion parses the documented format") {
    const TimeSeries series = parse_timeseries(
        "time,T_out,Q_heater\n0,10.5,0\n600,11,500\n1200,12,500\n", "inputs.csv");
    CHECK(series.step == 600.0);
    CHECK(series.names == std::vector<std::string>{"T_out", "Q_heater"});
    CHECK(series.sample_count() == 3);
    CHECK(series.channel("T_out")[0] == 10.5);
    CHECK(series.channel("Q_heater")[2] == 500.0);
}

TEST_CASE("single-row series is a valid constant input") {
    const TimeSeries series = parse_timeseries("time,T\n0,21\n", "one.csv");
    CHECK(series.sample_count() == 1);
    CHECK(series.step == 0.0);
    CHECK(series.channel("T")[0] == 21.0);
}

TEST_CASE("non-uniform steps are rejected") {
    CHECK_THROWS_WITH_AS(
        parse_timeseries("time,T\n0,1\n600,2\n1500,3\n", "bad.csv"),
        doctest::Contains("non-uniform"), ParseError);
}

TEST_CASE("duplicate channels and bad cells are rejected with locations") {
    CHECK_THROWS_WITH_AS(parse_timeseries("time,T,T\n0,1,2\n", "dup.csv"),
                         doctest::Contains("duplicate channel"), ParseError);
    try {
        parse_timeseries("time,T\n0,1\n600,abc\n", "cell.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 5);
        CHECK(doctest::String(e.what()) == doctest::Contains("expected a number"));
    }
}

TEST_CASE("shipped material tables reproduce the declared element data") {
    const BuildingDescription desc = parse_building_text(
        "include twin_house.tc\nzone probe volume=1\n", "probe.tc", THERMNET_DATA_DIR);

    std::map<std::string, Material> materials;
    for (const auto& m : desc.materials) materials[m.name] = m.material;
    auto wall_type_u = [&](const std::string& name) {
        for (const auto& wt : desc.wall_types) {
            if (wt.name != name) continue;
            WallSpec spec;
            spec.area = 1.0;
            for (const auto& layer : wt.layers)
                spec.layers.push_back({materials.at(layer.material), layer.thickness, 1});
            return wall_u_value(spec);
        }
        FAIL("missing walltype ", name);
        return 0.0;
    };
    auto close = [](double a, double b) { return std::abs(a - b) / std::max(a, b) <= 0.10; };
    CHECK(close(wall_type_u("ext_wall"), 0.20));
    CHECK(close(wall_type_u("ceiling"), 0.25));
    CHECK(close(wall_type_u("ground"), 0.32));

    std::map<std::string, const WindowTypeDecl*> windows;
    for (const auto& wt : desc.window_types) windows[wt.name] = &wt;
    REQUIRE(windows.count("W1"));
    REQUIRE(windows.count("W3"));
    CHECK(windows["W1"]->glass_area == doctest::Approx(1.30 * 0.99).epsilon(1e-12));
    CHECK(windows["W1"]->overall_area == doctest::Approx(1.74 * 1.23).epsilon(1e-12));
    CHECK(windows["W3"]->glass_area == doctest::Approx(3 * 1.385 * 0.99).epsilon(1e-12));
}

TEST_CASE("includes resolve relative to the including file") {
    const BuildingDescription desc =
        parse_building(std::string(THERMNET_DATA_DIR) + "/demo_living_room.tc");
    const BuildingModel model = compile_building(desc);
    CHECK(model.circuits.size() == 13);

    const DaeSystem dae = build_dae(model.assembled);
    const StateSpace ss = extract_state_space(dae, model.assembled);
    CHECK(ss.state_count() == 28);
}

TEST_SUITE_END();
