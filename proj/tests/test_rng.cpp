#include <doctest.h>

#include <cmath>
#include <vector>

#include "tarmos/rng.hpp"

using namespace tarmos;

TEST_CASE("identical seeds give identical streams") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("derived seeds differ across tags and indices") {
  auto s0 = derive_seed(7, StreamTag::Chain, 0);
  auto s1 = derive_seed(7, StreamTag::Chain, 1);
  auto sr = derive_seed(7, StreamTag::Replication, 0);
  CHECK(s0 != s1);
  CHECK(s0 != sr);
  CHECK(derive_seed(7, StreamTag::Chain, 0) == s0);
}

TEST_CASE("uniform01 stays inside the open interval") {
  RngStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_index covers the range") {
  RngStream rng(3);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 5000; ++i) ++seen[rng.uniform_index(5)];
  for (int count : seen) CHECK(count > 800);
}

TEST_CASE("normal moments") {
  RngStream rng(11);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("chi-square mean matches its degrees of freedom") {
  RngStream rng(17);
  for (double nu : {1.0, 5.0, 50.0}) {
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.chisq(nu);
    double mean = sum / n;
    CHECK(std::abs(mean - nu) < 0.05 * nu + 0.02);
  }
}

TEST_CASE("gamma mean matches its shape") {
  RngStream rng(23);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.gamma(0.5);
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}
