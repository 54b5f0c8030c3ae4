#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "evcharge/sim/recording.hpp"

using namespace evcharge;

TEST_CASE("CSV round trip is bit exact", "[recording]") {
  sim::Recording rec({"a", "b"});
  const double rows[][2] = {{0.1, -1e-300}, {1.0 / 3.0, 12345.678901234567}, {2.5e-7, 0.0}};
  double t = 0.0;
  for (const auto& r : rows) rec.append(t += 0.02, r);
  std::stringstream ss;
  sim::write_csv(ss, rec);
  const auto back = sim::read_csv(ss);
  REQUIRE(back == rec);
  REQUIRE(back.series("b")[1] == 12345.678901234567);
}

TEST_CASE("CSV header only for an empty recording", "[recording]") {
  sim::Recording rec({"x"});
  std::stringstream ss;
  sim::write_csv(ss, rec);
  REQUIRE(ss.str() == "t,x\n");
  REQUIRE(sim::read_csv(ss).empty());
}

TEST_CASE("malformed CSV is rejected", "[recording]") {
  std::stringstream no_t("time,x\n0,1\n");
  REQUIRE_THROWS(sim::read_csv(no_t));
  std::stringstream short_row("t,x,y\n0,1\n");
  REQUIRE_THROWS(sim::read_csv(short_row));
  std::stringstream junk("t,x\n0,abc\n");
  REQUIRE_THROWS(sim::read_csv(junk));
}

TEST_CASE("columns are addressed by name", "[recording]") {
  sim::Recording rec({"i_batt", "soc"});
  const double v[] = {5.0, 10.0};
  rec.append(1.0, v);
  REQUIRE(rec.column("soc") == 1);
  REQUIRE_THROWS_AS(rec.column("Q"), std::out_of_range);
  REQUIRE(rec.frame(0).values == std::vector<double>{5.0, 10.0});
}
