#include <doctest.h>

#include <cmath>
#include <random>

#include "qdu/urn.hpp"

using namespace qdu;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidSpec;
}

ProbabilityVector ellsberg_prior(double black) {
  return ProbabilityVector({{"red", 1.0 / 3.0}, {"yellow", 2.0 / 3.0 - black}, {"black", black}});
}

}  // namespace

TEST_CASE("built-in urns match the payoff tables") {
  const UrnExperiment e = ellsberg_urn();
  CHECK(e.urn.colors == std::vector<std::string>{"red", "yellow", "black"});
  CHECK(e.act("f1").payoffs == std::map<std::string, double>{{"red", 12}, {"yellow", 0}, {"black", 0}});
  CHECK(e.act("f2").payoffs == std::map<std::string, double>{{"red", 0}, {"yellow", 0}, {"black", 12}});
  CHECK(e.act("f3").payoffs == std::map<std::string, double>{{"red", 12}, {"yellow", 12}, {"black", 0}});
  CHECK(e.act("f4").payoffs == std::map<std::string, double>{{"red", 0}, {"yellow", 12}, {"black", 12}});
  CHECK(known_probability(e.urn, "red") == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(e.observed == ChoiceCounts{6, 34, 12, 7});

  const UrnExperiment m = machina_urn();
  CHECK(m.act("f2").payoffs == std::map<std::string, double>{{"red", 0}, {"yellow", 25}, {"black", 50}, {"green", 25}});
  CHECK(m.act("f4").payoffs == std::map<std::string, double>{{"red", 25}, {"yellow", 25}, {"black", 50}, {"green", 0}});
  CHECK_NOTHROW(e.validate());
  CHECK_NOTHROW(m.validate());
  CHECK(kind_of([&] { e.act("f9"); }) == ErrorKind::UnknownAct);
}

TEST_CASE("urn validation") {
  UrnSpec u = ellsberg_urn().urn;
  u.total = 91;
  CHECK(kind_of([&] { u.validate(); }) == ErrorKind::InvalidUrn);
  u = ellsberg_urn().urn;
  u.known_counts["yellow"] = 0;  // yellow covered twice
  CHECK(kind_of([&] { u.validate(); }) == ErrorKind::InvalidUrn);
  u = ellsberg_urn().urn;
  u.unknown_groups[0].colors = {"yellow"};  // black uncovered
  CHECK(kind_of([&] { u.validate(); }) == ErrorKind::InvalidUrn);

  UrnExperiment e = ellsberg_urn();
  e.acts[0].payoffs.erase("black");
  CHECK(kind_of([&] { e.validate(); }) == ErrorKind::ColorMismatch);
  e = ellsberg_urn();
  e.acts[1].payoffs["black"] = -1.0;
  CHECK(kind_of([&] { e.validate(); }) == ErrorKind::NegativePayoff);
}

TEST_CASE("utility examples") {
  CHECK(utility_eval(UtilityFunction::linear(), 12) == 12.0);
  CHECK(utility_eval(UtilityFunction::power(0.5), 25) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(utility_eval(UtilityFunction::exponential(0.1), 0) == 0.0);
  CHECK(utility_eval(UtilityFunction::exponential(0.1), 10) ==
        doctest::Approx((1.0 - std::exp(-1.0)) / 0.1).epsilon(1e-14));
  CHECK(kind_of([] { utility_eval(UtilityFunction::linear(), -1.0); }) == ErrorKind::NegativePayoff);
  CHECK(kind_of([] { UtilityFunction::power(1.5); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([] { UtilityFunction::power(0.0); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([] { UtilityFunction::exponential(0.0); }) == ErrorKind::OutOfRange);
}

TEST_CASE("utilities are normalized and strictly increasing") {
  for (const auto& u : {UtilityFunction::linear(), UtilityFunction::power(0.25), UtilityFunction::power(0.75),
                        UtilityFunction::exponential(0.05), UtilityFunction::exponential(0.5)}) {
    CHECK(u(0.0) == 0.0);
    for (int k = 0; k < 500; ++k) CHECK(u(0.1 * k) < u(0.1 * (k + 1)));
  }
}

TEST_CASE("probability vectors") {
  CHECK(kind_of([] { ProbabilityVector({{"a", 0.5}, {"b", 0.6}}); }) == ErrorKind::InvalidDistribution);
  CHECK(kind_of([] { ProbabilityVector({{"a", -0.1}, {"b", 1.1}}); }) == ErrorKind::InvalidDistribution);
  const UrnSpec urn = ellsberg_urn().urn;
  CHECK(ellsberg_prior(0.2).consistent_with(urn));
  CHECK_FALSE(ProbabilityVector({{"red", 0.5}, {"yellow", 0.25}, {"black", 0.25}}).consistent_with(urn));
}

TEST_CASE("classical expected utility examples") {
  const UrnExperiment e = ellsberg_urn();
  const ProbabilityVector uniform({{"red", 1.0 / 3}, {"yellow", 1.0 / 3}, {"black", 1.0 / 3}});
  CHECK(std::abs(classical_expected_utility(e.act("f1"), uniform, e.utility) - 4.0) < 1e-14);
  CHECK(std::abs(classical_expected_utility(e.act("f4"), ellsberg_prior(0.1), e.utility) - 8.0) < 1e-14);
  const UrnExperiment m = machina_urn();
  const ProbabilityVector quarter({{"red", 0.25}, {"yellow", 0.25}, {"black", 0.25}, {"green", 0.25}});
  for (const auto& a : m.acts) CHECK(classical_expected_utility(a, quarter, m.utility) == 25.0);
  CHECK(kind_of([&] { classical_expected_utility(m.act("f1"), uniform, m.utility); }) == ErrorKind::ColorMismatch);
}

TEST_CASE("property: f1 and f4 are constant over admissible Ellsberg priors") {
  const UrnExperiment e = ellsberg_urn();
  for (const auto& u : {UtilityFunction::linear(), UtilityFunction::power(0.5), UtilityFunction::exponential(0.1)}) {
    for (int k = 0; k <= 1000; ++k) {
      const auto p = ellsberg_prior((2.0 / 3.0) * k / 1000.0);
      CHECK(std::abs(classical_expected_utility(e.act("f1"), p, u) - u(12) / 3.0) < 1e-12);
      CHECK(std::abs(classical_expected_utility(e.act("f4"), p, u) - 2.0 * u(12) / 3.0) < 1e-12);
    }
  }
}

TEST_CASE("property: classical EU is monotone in pointwise dominance") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pay(0.0, 100.0), unit(0.0, 1.0);
  const std::vector<std::string> colors{"a", "b", "c", "d"};
  for (int trial = 0; trial < 10000; ++trial) {
    Act f{"f", {}}, g{"g", {}};
    std::map<std::string, double> w;
    double total = 0.0;
    for (const auto& c : colors) {
      f.payoffs[c] = pay(rng);
      g.payoffs[c] = f.payoffs[c] + pay(rng) * unit(rng);
      w[c] = unit(rng);
      total += w[c];
    }
    for (auto& [c, x] : w) x /= total;
    const ProbabilityVector p(w);
    const auto u = trial % 2 ? UtilityFunction::power(0.5) : UtilityFunction::exponential(0.05);
    CHECK(classical_expected_utility(g, p, u) >= classical_expected_utility(f, p, u));
  }
}
