#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cymc/quadrature.hpp"
#include "cymc/targets.hpp"

using namespace cymc;

namespace {
Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}
} // namespace

TEST_SUITE("targets") {

TEST_CASE("frozen energy values for the toy presets") {
  Target equal = build_preset("toy1d-equal");
  CHECK(energy(equal, vec1(5.0)) == doctest::Approx(1.612085713764618).epsilon(1e-12));
  CHECK(energy(equal, vec1(0.0)) == doctest::Approx(13.418938533204672).epsilon(1e-12));
  Target unequal = build_preset("toy1d-unequal");
  CHECK(energy(unequal, vec1(-5.0)) == doctest::Approx(-0.6904993792294277).epsilon(1e-12));
}

TEST_CASE("the density integrates to one") {
  Target t = build_preset("toy1d-equal");
  double mass = 0.0;
  for (int panel = 0; panel < 40; ++panel) {
    double a = -20.0 + panel;
    mass += gl_integrate([&](double x) { return std::exp(-energy(t, vec1(x))); }, a, a + 1.0, 16);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("log-sum-exp agrees with the naive evaluation") {
  Target t = build_preset("toy1d-equal");
  for (double x : {1.0, 3.5, -2.0}) {
    double naive = 0.0;
    for (const auto& c : t.components)
      naive += c.weight / std::sqrt(2.0 * M_PI * c.variance) *
               std::exp(-(x - c.mean[0]) * (x - c.mean[0]) / (2.0 * c.variance));
    CHECK(energy(t, vec1(x)) == doctest::Approx(-std::log(naive)).epsilon(1e-12));
  }
}

TEST_CASE("component order does not matter") {
  Target t = build_preset("toy1d-unequal");
  Target reversed = t;
  std::reverse(reversed.components.begin(), reversed.components.end());
  for (double x : {-5.0, 0.0, 4.2}) CHECK(energy(t, vec1(x)) == energy(reversed, vec1(x)));
}

TEST_CASE("tempered log density scales the energy") {
  Target t = build_preset("toy1d-equal");
  CHECK(tempered_log_density(t, 0.25, vec1(5.0)) ==
        doctest::Approx(-0.25 * energy(t, vec1(5.0))));
  CHECK_THROWS_AS(tempered_log_density(t, 0.0, vec1(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(tempered_log_density(t, 1.5, vec1(0.0)), std::invalid_argument);
}

TEST_CASE("validation catches malformed targets") {
  Target t;
  t.dimension = 1;
  t.components = {{0.6, vec1(0.0), 1.0}, {0.6, vec1(1.0), 1.0}};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument); // weights sum to 1.2
  t.components = {{1.0, Vector(2), 1.0}};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument); // mean dimension mismatch
  t.components = {{1.0, vec1(0.0), -1.0}};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument); // negative variance
  Target ok = build_preset("toy1d-equal");
  Vector bad(2);
  bad << 0.0, 0.0;
  CHECK_THROWS_AS(energy(ok, bad), std::invalid_argument);
}

TEST_CASE("grid preset layout: component 25 sits at (4,4)") {
  Target t = build_preset("grid2d-unequal");
  REQUIRE(t.components.size() == 25);
  CHECK(t.components[24].mean[0] == 4.0);
  CHECK(t.components[24].mean[1] == 4.0);
  CHECK(t.components[24].variance == doctest::Approx(0.2 / 25.0));
  CHECK(t.components[0].mean[0] == -4.0);
  CHECK(t.components[0].mean[1] == -4.0);
  CHECK(t.components[1].mean[0] == -2.0); // x varies fastest
  CHECK(t.components[1].mean[1] == -4.0);
  Target eq = build_preset("grid2d-equal");
  for (const auto& c : eq.components) CHECK(c.variance == 0.2);
}

TEST_CASE("unknown preset names are rejected with the valid list") {
  try {
    build_preset("toy1d");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("toy1d-equal") != std::string::npos);
  }
}

TEST_CASE("mixture sampling hits component weights and moments") {
  Target t = build_preset("toy1d-equal");
  Rng rng(11);
  const int n = 20000;
  int right = 0;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Vector x = sample_mixture(rng, t);
    if (x[0] > 0) {
      ++right;
      sum += x[0];
      sum2 += x[0] * x[0];
    }
  }
  CHECK(static_cast<double>(right) / n == doctest::Approx(0.5).epsilon(0.03));
  double mean = sum / right;
  CHECK(mean == doctest::Approx(5.0).epsilon(0.01));
  CHECK(sum2 / right - mean * mean == doctest::Approx(1.0).epsilon(0.05));
}

} // TEST_SUITE
