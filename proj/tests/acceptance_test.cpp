#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <iostream>

#include "refugia/acceptance.hpp"

TEST_CASE("acceptance criteria") {
  const auto report = refugia::run_acceptance(std::cout);
  REQUIRE(report.results.size() == 12);
  for (const auto& r : report.results) {
    INFO("criterion ", r.id, ": ", r.name, " — ", r.details);
    CHECK(r.pass);
  }
}
