#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "srq/instance_io.hpp"

using namespace srq;

namespace {

const char* kPaperText = R"(# day-ahead EV charging under uncertain PV
horizon = 1

prices {
  ev = 0.25
  buy = 0.4
  sell = 0.1
}

timestep {
  j_bits = 2
  j_offset = 0
  recourse_bits = 2
  dist = [1:0.2, 2:0.5, 3:0.3]
}
)";

} // namespace

TEST_SUITE("instance_io") {

TEST_CASE("parses the bundled paper-style instance") {
    const InstanceSpec instance = parse_instance(kPaperText);
    CHECK(instance.horizon == 1);
    CHECK(instance.prices.ev == doctest::Approx(0.25));
    CHECK(instance.prices.intraday_buy == doctest::Approx(0.4));
    CHECK(instance.prices.intraday_sell == doctest::Approx(0.1));
    REQUIRE(instance.j_vars.size() == 1);
    CHECK(instance.j_vars[0].bit_width == 2);
    CHECK(instance.j_vars[0].offset == 0);
    CHECK(instance.recourse_bit_width == 2);
    REQUIRE(instance.p_dists.size() == 1);
    REQUIRE(instance.p_dists[0].support.size() == 3);
    CHECK(instance.p_dists[0].support[1].value == 2);
    CHECK(instance.p_dists[0].support[1].probability == doctest::Approx(0.5));
    CHECK(validate(instance).empty());
}

TEST_CASE("horizon defaults to the timestep count") {
    const std::string text = R"(
prices { ev = 0.25  buy = 0.4  sell = 0.1 }
timestep { j_bits = 1  recourse_bits = 2  dist = [1:1.0] }
timestep { j_bits = 1  recourse_bits = 2  dist = [2:1.0] }
)";
    const InstanceSpec instance = parse_instance(text);
    CHECK(instance.horizon == 2);
    CHECK(validate(instance).empty());
}

TEST_CASE("offsets are parsed") {
    const std::string text = R"(
horizon = 1
prices { ev = 0.25  buy = 0.4  sell = 0.1 }
timestep {
  j_bits = 2
  j_offset = -1
  recourse_bits = 3
  p_offset = 1
  dist = [1:0.5, 3:0.5]
}
)";
    const InstanceSpec instance = parse_instance(text);
    CHECK(instance.j_vars[0].offset == -1);
    CHECK(instance.p_dists[0].register_offset == 1);
    CHECK(validate(instance).empty());
}

TEST_CASE("parse failures carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_instance("horizon = \n"), doctest::Contains("end of input"),
                         ParseError);
    CHECK_THROWS_WITH_AS(parse_instance("horizon = 1\nbogus = 2\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_AS(parse_instance("prices { ev = 0.25 "), ParseError);
    CHECK_THROWS_WITH_AS(parse_instance("horizon = 1\nprices { ev = 0.25 buy = 0.4 sell = 0.1 }"),
                         doctest::Contains("recourse_bits"), ParseError);
    CHECK_THROWS_AS(parse_instance("timestep { dist = [1:0.5 2:0.5] } @"), ParseError);
    CHECK_THROWS_WITH_AS(parse_instance("horizon = 1.5\n"), doctest::Contains("integer"),
                         ParseError);
}

TEST_CASE("missing prices section is rejected") {
    CHECK_THROWS_WITH_AS(
        parse_instance("horizon = 1\ntimestep { recourse_bits = 2 dist = [1:1.0] }"),
        doctest::Contains("prices"), ParseError);
}

TEST_CASE("file loading") {
    const std::string path = "io_test_instance.tmp";
    {
        std::ofstream out(path);
        out << kPaperText;
    }
    const InstanceSpec instance = load_instance_file(path);
    CHECK(instance.horizon == 1);
    std::remove(path.c_str());

    CHECK_THROWS_WITH_AS(load_instance_file("does-not-exist.instance"),
                         doctest::Contains("cannot open"), ParseError);
}

} // TEST_SUITE
