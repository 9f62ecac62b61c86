#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slabmn/quadrature.hpp"

using namespace slabmn;

namespace {

double monomial_integral(double a, double b, int j) {
  return (std::pow(b, j + 1) - std::pow(a, j + 1)) / (j + 1);
}

} // namespace

TEST_CASE("gauss_lobatto_nodes includes the endpoints") {
  for (int m = 2; m <= 12; ++m) {
    auto [pts, wts] = gauss_lobatto_nodes(m);
    REQUIRE(pts.size() == std::size_t(m));
    REQUIRE(wts.size() == std::size_t(m));
    CHECK(pts.front() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(pts.back() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < pts.size(); ++i)
      CHECK(pts[i] > pts[i - 1]);
    for (double w : wts)
      CHECK(w > 0.0);
  }
}

TEST_CASE("gauss_lobatto_nodes integrates monomials exactly") {
  for (int m = 2; m <= 12; ++m) {
    auto [pts, wts] = gauss_lobatto_nodes(m);
    const int degree = 2 * m - 3;
    for (int j = 0; j <= degree; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        s += wts[i] * std::pow(pts[i], j);
      CHECK(s == doctest::Approx(monomial_integral(-1.0, 1.0, j))
                     .epsilon(0.0)
                     .scale(1.0)
                     .epsilon(1e-12));
    }
  }
}

TEST_CASE("gauss_lobatto_npoints matches the degree-of-exactness rule") {
  CHECK(gauss_lobatto_npoints(1) == 2);
  CHECK(gauss_lobatto_npoints(2) == 3);
  CHECK(gauss_lobatto_npoints(3) == 3);
  CHECK(gauss_lobatto_npoints(15) == 9);
  for (int order = 1; order <= 60; ++order) {
    const int m = gauss_lobatto_npoints(order);
    CHECK(2 * m - 3 >= order);
    CHECK(2 * (m - 1) - 3 < order);
  }
}

TEST_CASE("composite rule keeps interface nodes separate per interval") {
  const Vec partition = {-1.0, -0.5, 0.25, 1.0};
  const Quadrature q = composite_gauss_lobatto(partition, 15);
  const int m = gauss_lobatto_npoints(15);
  REQUIRE(q.size() == std::size_t(3 * m));
  // Interval labels are contiguous and interface nodes appear twice, once as
  // the right end of one interval and once as the left end of the next.
  for (std::size_t i = 0; i < q.size(); ++i)
    CHECK(q.interval[i] == int(i) / m);
  CHECK(q.points[m - 1] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(q.points[m] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(q.points[2 * m - 1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q.points[2 * m] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("composite rule is exact per interval") {
  const Vec partition = {-1.0, -0.2, 0.4, 1.0};
  const int order = 15;
  const Quadrature q = composite_gauss_lobatto(partition, order);
  for (int iv = 0; iv < 3; ++iv) {
    for (int j = 0; j <= order; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i)
        if (q.interval[i] == iv)
          s += q.weights[i] * std::pow(q.points[i], j);
      const double exact = monomial_integral(partition[iv], partition[iv + 1], j);
      CHECK(s == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("composite rule integrates constants to the domain measure") {
  const Quadrature q = composite_gauss_lobatto({-1.0, 0.0, 1.0}, 40);
  CHECK(q.integrate_constant(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q.integrate_constant(2.5) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("nodal quadrature has trapezoid weights on the partition nodes") {
  const int k = 4;
  Vec partition(k + 1);
  for (int i = 0; i <= k; ++i)
    partition[i] = -1.0 + 2.0 * i / k;
  const Quadrature q = nodal_quadrature_for_partition(partition);
  const double h = 2.0 / k;
  REQUIRE(q.size() == std::size_t(k + 1));
  for (int i = 0; i <= k; ++i) {
    CHECK(q.points[i] == doctest::Approx(partition[i]).epsilon(1e-14));
    const double expected = (i == 0 || i == k) ? h / 2.0 : h;
    CHECK(q.weights[i] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(q.integrate_constant(1.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("nodal quadrature integrates piecewise linear functions exactly") {
  Vec partition = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const Quadrature q = nodal_quadrature_for_partition(partition);
  // A hat centered at an interior node integrates to the node spacing.
  auto hat = [](double mu) { return std::max(0.0, 1.0 - std::abs(mu) / 0.5); };
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    s += q.weights[i] * hat(q.points[i]);
  CHECK(s == doctest::Approx(0.5).epsilon(1e-14));
}
