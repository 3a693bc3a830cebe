#include <doctest.h>

#include <iostream>
#include <sstream>

#include "daclab/acceptance.hpp"

namespace {

const std::vector<daclab::acceptance::CriterionResult>& results() {
  static const auto r = [] {
    std::ostringstream log;
    auto out = daclab::acceptance::run_all(daclab::acceptance::kDefaultSeed, log);
    std::cout << log.str();
    return out;
  }();
  return r;
}

const daclab::acceptance::CriterionResult& criterion(int id) {
  for (const auto& r : results()) {
    if (r.id == id) return r;
  }
  static const daclab::acceptance::CriterionResult missing;
  return missing;
}

}  // namespace

TEST_CASE("criterion 1: fixed-design linear excess-risk reproduction") {
  const auto& r = criterion(1);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 2: d-prime invariants") {
  const auto& r = criterion(2);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 3: soft-DAC variance/bias identities") {
  const auto& r = criterion(3);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 4: limit equivalences") {
  const auto& r = criterion(4);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 5: logistic qualitative reproduction") {
  const auto& r = criterion(5);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 6: misspecification qualitative reproduction") {
  // The lambda* U-shape clause is expected to fail at the example_6
  // constants: the closed-form lambda* optimizes a loose
  // surrogate and lands far above the true risk minimizer when the
  // misspecification dominates the noise scale. The criterion is
  // implemented as specified and reported honestly.
  const auto& r = criterion(6);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 7: domain-adaptation separation") {
  const auto& r = criterion(7);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 8: minority-set bound fuzz") {
  const auto& r = criterion(8);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 9: complexity bounds") {
  const auto& r = criterion(9);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 10: numerical-kernel properties") {
  const auto& r = criterion(10);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("criterion 11: ReLU consistency and fit") {
  const auto& r = criterion(11);
  INFO(r.detail);
  CHECK(r.passed);
}
