#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdu/error.hpp"
#include "qdu/optimizer.hpp"

using namespace qdu;

namespace {

double rosenbrock(std::span<const double> x) {
  return (1 - x[0]) * (1 - x[0]) + 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
}

}  // namespace

TEST_CASE("wrap and clip helpers") {
  CHECK(std::abs(periodic_wrap(3 * std::numbers::pi, 0, 2 * std::numbers::pi) - std::numbers::pi) < 1e-15);
  CHECK(periodic_wrap(-0.5, 0, 2) == 1.5);
  CHECK(periodic_wrap(2.0, 0, 2) == 0.0);
  CHECK(periodic_wrap(1.25, 0, 2) == 1.25);
  CHECK(bound_clip(11, 0, 10) == 10);
  CHECK(bound_clip(-1, 0, 10) == 0);
  CHECK(bound_clip(4.5, 0, 10) == 4.5);
  for (double x : {-7.3, 0.0, 1.0, 6.5, 100.0}) {
    const double w = periodic_wrap(x, 0, 2 * std::numbers::pi);
    CHECK(periodic_wrap(w, 0, 2 * std::numbers::pi) == w);
    CHECK(bound_clip(bound_clip(x, 0, 10), 0, 10) == bound_clip(x, 0, 10));
  }
}

TEST_CASE("param space validation and projection") {
  ParamSpace s;
  CHECK_THROWS_AS(s.add("bad", 1.0, 0.0), Error);
  CHECK_THROWS_AS(s.add("inf", 0.0, std::numeric_limits<double>::infinity()), Error);
  s.add("x", 0, 10).add_angle("phi");
  CHECK(s.index_of("phi") == 1);
  const double raw[] = {12.0, -std::numbers::pi / 2};
  const auto p = s.project(raw);
  CHECK(p[0] == 10.0);
  CHECK(std::abs(p[1] - 1.5 * std::numbers::pi) < 1e-15);
}

TEST_CASE("minimize examples") {
  ParamSpace s;
  s.add("x", 0, 10);
  const FitResult r = minimize([](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3); }, s, 7, {8, 500});
  CHECK(std::abs(r.params[0] - 3.0) < 1e-8);
  CHECK(r.converged);
  CHECK(r.seed == 7);

  const FitResult c = minimize([](std::span<const double>) { return 2.5; }, s, 7, {4, 100});
  CHECK(c.value == 2.5);
  CHECK(c.converged);

  ParamSpace r2;
  r2.add("x", -2, 2).add("y", -1, 3);
  const FitResult rb = minimize(rosenbrock, r2, 1, {16, 20000});
  CHECK(rb.value < 1e-8);
}

TEST_CASE("stored objective re-evaluates exactly") {
  ParamSpace s;
  s.add("x", -2, 2).add("y", -1, 3).add_angle("t");
  auto f = [](std::span<const double> x) { return rosenbrock(x) + std::sin(x[2]) + 1; };
  const FitResult r = minimize(f, s, 99, {8, 300});
  CHECK(std::abs(f(r.params) - r.value) <= 1e-12);
}

TEST_CASE("non-finite objective is rejected") {
  ParamSpace s;
  s.add("x", 0, 1);
  CHECK_THROWS_AS(minimize([](std::span<const double>) { return std::nan(""); }, s, 1, {4, 10}), Error);
  // Exceptions thrown inside parallel restarts reach the caller.
  SearchOptions o;
  o.execution = Execution::Parallel;
  CHECK_THROWS_AS(minimize([](std::span<const double>) -> double { throw std::runtime_error("boom"); }, s, 1, {4, 10}, o),
                  std::runtime_error);
}

TEST_CASE("determinism and serial/parallel equality") {
  ParamSpace s;
  s.add("x", -2, 2).add("y", -1, 3).add_angle("t");
  auto f = [](std::span<const double> x) { return rosenbrock(x) + 0.1 * std::cos(3 * x[2]); };
  SearchOptions serial, parallel;
  serial.execution = Execution::Serial;
  parallel.execution = Execution::Parallel;
  for (std::uint64_t seed : {0ull, 1ull, 12345ull, 0xdeadbeefull}) {
    const FitResult a = minimize(f, s, seed, {16, 200}, serial);
    const FitResult b = minimize(f, s, seed, {16, 200}, parallel);
    const FitResult c = minimize(f, s, seed, {16, 200}, parallel);
    CHECK(a.params == b.params);
    CHECK(a.value == b.value);
    CHECK(a.best_restart == b.best_restart);
    CHECK(a.iterations_used == b.iterations_used);
    CHECK(b.params == c.params);
  }
}

TEST_CASE("restart seeds depend only on (master, k)") {
  ParamSpace s;
  s.add("x", 0, 1).add_angle("t");
  CHECK(restart_seed(5, 3) == restart_seed(5, 3));
  CHECK(restart_seed(5, 3) != restart_seed(5, 4));
  CHECK(restart_seed(5, 3) != restart_seed(6, 3));
  CHECK(restart_start(s, 5, 3) == restart_start(s, 5, 3));
}

TEST_CASE("larger budget never worsens the stored objective") {
  ParamSpace s;
  s.add("x", -2, 2).add("y", -1, 3);
  SearchOptions o;
  o.execution = Execution::Serial;
  double prev = std::numeric_limits<double>::infinity();
  for (int restarts : {1, 2, 4, 8, 16}) {
    const FitResult r = minimize(rosenbrock, s, 3, {restarts, 50}, o);
    CHECK(r.value <= prev);
    prev = r.value;
  }
}
