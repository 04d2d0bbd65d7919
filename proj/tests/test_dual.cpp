#include <doctest.h>

#include "gtorsion/dual.hpp"

using gtorsion::Dual2;

namespace {

// central-difference reference for a scalar function of two variables
template <class F>
void check_against_fd(F f, double x0, double y0) {
  const double h = 1e-5;
  auto fv = [&](double x, double y) { return f(Dual2(x), Dual2(y)).v; };

  Dual2 x = Dual2::variable(x0, 0, 2);
  Dual2 y = Dual2::variable(y0, 1, 2);
  Dual2 r = f(x, y);

  double fx = (fv(x0 + h, y0) - fv(x0 - h, y0)) / (2 * h);
  double fy = (fv(x0, y0 + h) - fv(x0, y0 - h)) / (2 * h);
  CHECK(r.g[0] == doctest::Approx(fx).epsilon(1e-6));
  CHECK(r.g[1] == doctest::Approx(fy).epsilon(1e-6));

  double fxx = (fv(x0 + h, y0) - 2 * fv(x0, y0) + fv(x0 - h, y0)) / (h * h);
  double fyy = (fv(x0, y0 + h) - 2 * fv(x0, y0) + fv(x0, y0 - h)) / (h * h);
  double fxy = (fv(x0 + h, y0 + h) - fv(x0 + h, y0 - h) - fv(x0 - h, y0 + h) +
                fv(x0 - h, y0 - h)) /
               (4 * h * h);
  CHECK(r.h(0, 0) == doctest::Approx(fxx).epsilon(1e-4));
  CHECK(r.h(1, 1) == doctest::Approx(fyy).epsilon(1e-4));
  CHECK(r.h(0, 1) == doctest::Approx(fxy).epsilon(1e-4));
  CHECK(r.h(1, 0) == doctest::Approx(r.h(0, 1)));
}

}  // namespace

TEST_CASE("arithmetic jets match finite differences") {
  check_against_fd([](auto x, auto y) { return x * y + x * x * y - y / (x + 3.0); }, 0.7,
                   -0.4);
  check_against_fd([](auto x, auto y) { return (x + 2.0 * y) * (x - y) * y; }, -0.3, 1.1);
}

TEST_CASE("transcendental jets match finite differences") {
  using gtorsion::cos;
  using gtorsion::exp;
  using gtorsion::sin;
  using gtorsion::sqrt;
  check_against_fd([](auto x, auto y) { return sin(x * y) + cos(x) * exp(y); }, 0.45, 0.8);
  check_against_fd([](auto x, auto y) { return sqrt(2.0 + x * x + y * y); }, -0.6, 0.25);
}

TEST_CASE("constants carry no derivative blocks") {
  Dual2 c(3.0);
  Dual2 x = Dual2::variable(2.0, 0, 1);
  Dual2 r = c * x + 5.0;
  CHECK(r.v == doctest::Approx(11.0));
  CHECK(r.g[0] == doctest::Approx(3.0));
  CHECK(r.h(0, 0) == doctest::Approx(0.0));
  Dual2 pure = c * 2.0 - 1.0;
  CHECK(pure.constant());
}
