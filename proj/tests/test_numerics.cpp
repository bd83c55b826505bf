#include <doctest.h>

#include <cmath>

#include "lindyn/errors.hpp"
#include "lindyn/numerics.hpp"

using namespace lindyn;

TEST_SUITE("numerics") {

TEST_CASE("simpson integrates polynomials to machine precision") {
  auto sq = [](double x) { return x * x; };
  CHECK(adaptive_simpson(sq, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(adaptive_simpson(sq, 1.0, 0.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  auto cubic = [](double x) { return 2.0 * x * x * x - x + 0.5; };
  CHECK(adaptive_simpson(cubic, -1.0, 2.0) == doctest::Approx(7.5).epsilon(1e-13));
  CHECK(adaptive_simpson(sq, 0.7, 0.7) == 0.0);
}

TEST_CASE("simpson handles transcendental integrands") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, 3.141592653589793) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return 1.0 / x; }, 1.0, std::exp(1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simpson resolves a near-singular integrand") {
  auto f = [](double x) { return 1.0 / std::sqrt(x + 1e-4); };
  double expected = 2.0 * (std::sqrt(1.0 + 1e-4) - 1e-2);
  CHECK(adaptive_simpson(f, 0.0, 1.0, 1e-13) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("newton_bisect finds the classic fixed point") {
  auto g = [](double x) { return std::cos(x) - x; };
  auto dg = [](double x) { return -std::sin(x) - 1.0; };
  double root = newton_bisect(g, dg, 0.5, 0.0, 1.0);
  CHECK(root == doctest::Approx(0.7390851332151607).epsilon(1e-12));
}

TEST_CASE("newton_bisect returns exact endpoint zeros") {
  auto g = [](double x) { return x - 2.0; };
  auto dg = [](double) { return 1.0; };
  CHECK(newton_bisect(g, dg, 2.5, 2.0, 3.0) == 2.0);
}

TEST_CASE("newton_bisect falls back to bisection on a flat derivative") {
  auto g = [](double x) { return x * x * x; };
  auto dg = [](double) { return 0.0; };
  double root = newton_bisect(g, dg, 1.5, -1.0, 2.0);
  CHECK(std::abs(root) < 1e-10);
}

TEST_CASE("newton_bisect rejects unbracketed roots") {
  auto g = [](double x) { return x * x + 1.0; };
  auto dg = [](double x) { return 2.0 * x; };
  CHECK_THROWS_AS(newton_bisect(g, dg, 0.5, 0.0, 1.0), branch_error);
}

}
