#include <doctest.h>

#include <cmath>
#include <random>

#include "qdu/baselines.hpp"
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

Capacity documented_capacity() {
  return Capacity::from_events({"red", "yellow", "black"}, {{{}, 0.0},
                                                            {{"red"}, 1.0 / 3.0},
                                                            {{"yellow"}, 0.25},
                                                            {{"black"}, 0.25},
                                                            {{"red", "yellow"}, 7.0 / 12.0},
                                                            {{"red", "black"}, 7.0 / 12.0},
                                                            {{"yellow", "black"}, 2.0 / 3.0},
                                                            {{"red", "yellow", "black"}, 1.0}});
}

}  // namespace

TEST_CASE("preference patterns") {
  const auto p = PreferencePattern::parse("f1>f2, f4>f3");
  CHECK(p.items().size() == 2);
  CHECK(p.to_string() == "f1>f2,f4>f3");
  CHECK(p.relation("f1", "f2") == 1);
  CHECK(p.relation("f3", "f4") == -1);
  CHECK(p.relation("f1", "f3") == 0);
  CHECK(kind_of([] { PreferencePattern::parse("f1>f1"); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { PreferencePattern::parse("f1>f2,f1>f2"); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { PreferencePattern::parse("f1>f2,f2>f1"); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { PreferencePattern::parse("f1f2"); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { PreferencePattern::parse("f1>f9").check_acts(ellsberg_urn()); }) == ErrorKind::InvalidPattern);
}

TEST_CASE("prior box of the built-in urns") {
  const PriorSet e = PriorSet::full(ellsberg_urn().urn);
  REQUIRE(e.dims() == 1);
  CHECK(e.coordinates()[0].color == "black");
  CHECK(e.coordinates()[0].lo == 0.0);
  CHECK(std::abs(e.coordinates()[0].hi - 2.0 / 3.0) < 1e-15);
  const double x[] = {0.25};
  CHECK(std::abs(e.at(x)["yellow"] - (2.0 / 3.0 - 0.25)) < 1e-15);
  const auto grid = e.grid(101);
  CHECK(grid.size() == 101);
  CHECK(grid.front()[0] == 0.0);
  CHECK(std::abs(grid.back()[0] - 2.0 / 3.0) < 1e-15);

  const PriorSet m = PriorSet::full(machina_urn().urn);
  REQUIRE(m.dims() == 2);
  CHECK(m.coordinates()[0].color == "yellow");
  CHECK(m.coordinates()[1].color == "green");
  CHECK(m.vertices().size() == 4);
  CHECK(kind_of([] { PriorSet(ellsberg_urn().urn, {{"black", 0.5, 0.9}}); }) == ErrorKind::EmptyPriorSet);
}

TEST_CASE("SEUT feasibility: Ellsberg") {
  const UrnExperiment e = ellsberg_urn();
  const auto family = default_utility_family();
  CHECK(family.size() == 8);
  const auto paradox = seut_pattern_feasibility(e, PreferencePattern::parse("f1>f2,f4>f3"), family, 101);
  CHECK_FALSE(paradox.feasible);
  REQUIRE(paradox.certificate.has_value());
  CHECK(paradox.certificate->combined.size() == 2);

  const auto consistent = seut_pattern_feasibility(e, PreferencePattern::parse("f1>f2,f3>f4"), family, 101);
  REQUIRE(consistent.feasible);
  REQUIRE(consistent.witness.has_value());
  // Independent re-verification of the witness.
  const auto& w = *consistent.witness;
  CHECK(w.prior["black"] < 1.0 / 3.0);
  CHECK(classical_expected_utility(e.act("f1"), w.prior, w.utility) -
            classical_expected_utility(e.act("f2"), w.prior, w.utility) > kPreferenceMargin);
  CHECK(classical_expected_utility(e.act("f3"), w.prior, w.utility) -
            classical_expected_utility(e.act("f4"), w.prior, w.utility) > kPreferenceMargin);
  CHECK(kind_of([&] { seut_pattern_feasibility(e, PreferencePattern::parse("f1>f2"), family, 50); }) ==
        ErrorKind::OutOfRange);
}

TEST_CASE("SEUT infeasibility is resolution-independent and matches a grid oracle") {
  const UrnExperiment e = ellsberg_urn();
  const auto pattern = PreferencePattern::parse("f1>f2,f4>f3");
  for (int grid : {100, 101, 257, 1000}) CHECK_FALSE(seut_pattern_feasibility(e, pattern, default_utility_family(), grid).feasible);
  // Oracle: direct scan over p_black in [0, 2/3] at 1e-4 spacing for each sampled utility.
  for (const auto& u : default_utility_family())
    for (int k = 0; k <= 6666; ++k) {
      const auto p = ellsberg_prior(k * 1e-4);
      const bool a = classical_expected_utility(e.act("f1"), p, u) > classical_expected_utility(e.act("f2"), p, u);
      const bool b = classical_expected_utility(e.act("f4"), p, u) > classical_expected_utility(e.act("f3"), p, u);
      CHECK_FALSE((a && b));
    }
}

TEST_CASE("SEUT feasibility: Machina") {
  const UrnExperiment m = machina_urn();
  const auto v = seut_pattern_feasibility(m, PreferencePattern::parse("f1>f2,f4>f3"), default_utility_family(), 101);
  CHECK_FALSE(v.feasible);
  REQUIRE(v.certificate.has_value());
  const auto ok = seut_pattern_feasibility(m, PreferencePattern::parse("f1>f2,f3>f4"), default_utility_family(), 101);
  REQUIRE(ok.feasible);
  CHECK(ok.witness->prior["yellow"] > ok.witness->prior["black"]);
}

TEST_CASE("serial and parallel grid scans agree") {
  const UrnExperiment m = machina_urn();
  for (const char* p : {"f1>f2,f4>f3", "f1>f2,f3>f4", "f2>f1", "f3>f4,f2>f1"}) {
    const auto pattern = PreferencePattern::parse(p);
    const auto s = seut_pattern_feasibility(m, pattern, default_utility_family(), 151, Execution::Serial);
    const auto q = seut_pattern_feasibility(m, pattern, default_utility_family(), 151, Execution::Parallel);
    CHECK(s.feasible == q.feasible);
    CHECK(s.witness.has_value() == q.witness.has_value());
    if (s.witness) {
      CHECK(s.witness->prior.values() == q.witness->prior.values());
      CHECK(s.witness->utility == q.witness->utility);
      CHECK(s.witness->margins == q.witness->margins);
    }
  }
}

TEST_CASE("sure-thing check") {
  const UrnExperiment e = ellsberg_urn();
  const auto violation =
      sure_thing_check(e, {"f1", "f2"}, {"f3", "f4"}, {"yellow"}, PreferencePattern::parse("f1>f2,f4>f3"));
  CHECK(violation.violates);
  const auto conforms =
      sure_thing_check(e, {"f1", "f2"}, {"f3", "f4"}, {"yellow"}, PreferencePattern::parse("f1>f2,f3>f4"));
  CHECK_FALSE(conforms.violates);
  CHECK(kind_of([&] {
          sure_thing_check(e, {"f1", "f2"}, {"f4", "f3"}, {"yellow"}, PreferencePattern::parse("f1>f2"));
        }) == ErrorKind::PairsNotSureThingRelated);
  CHECK(kind_of([&] {
          sure_thing_check(e, {"f1", "f2"}, {"f3", "f4"}, {"red"}, PreferencePattern::parse("f1>f2"));
        }) == ErrorKind::PairsNotSureThingRelated);
}

TEST_CASE("max-min examples") {
  const UrnExperiment e = ellsberg_urn();
  const PriorSet p = PriorSet::full(e.urn);
  const double expected[] = {4, 0, 4, 8};
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(maxmin_expected_utility(e.acts[k], p, e.utility) - expected[k]) < 1e-12);
}

TEST_CASE("property: max-min never exceeds classical EU at a member prior") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0), pay(0.0, 60.0);
  const UrnExperiment m = machina_urn();
  const PriorSet p = PriorSet::full(m.urn);
  for (int trial = 0; trial < 10000; ++trial) {
    Act f{"f", {}};
    for (const auto& c : m.urn.colors) f.payoffs[c] = pay(rng);
    const double x[] = {0.5 * unit(rng), 0.5 * unit(rng)};
    CHECK(maxmin_expected_utility(f, p, m.utility) <= classical_expected_utility(f, p.at(x), m.utility) + 1e-12);
  }
}

TEST_CASE("capacities") {
  const Capacity c = documented_capacity();
  CHECK(c.is_convex());
  CHECK_FALSE(c.is_additive());
  CHECK(kind_of([] { Capacity::from_events({"a", "b"}, {{{}, 0.0}, {{"a"}, 0.5}, {{"a", "b"}, 1.0}}); }) ==
        ErrorKind::MissingEvent);
  CHECK(kind_of([] { Capacity({"a", "b"}, {0.0, 0.7, 0.2, 0.6}); }) == ErrorKind::InvalidCapacity);  // not monotone
  CHECK(kind_of([] { Capacity({"a", "b"}, {0.1, 0.5, 0.5, 1.0}); }) == ErrorKind::InvalidCapacity);
}

TEST_CASE("Choquet examples") {
  const UrnExperiment e = ellsberg_urn();
  const Capacity c = documented_capacity();
  const double expected[] = {4, 3, 7, 8};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(choquet_expected_utility(e.acts[k], c, e.utility) - expected[k]) < 1e-12);
  const ProbabilityVector uniform({{"red", 1.0 / 3}, {"yellow", 1.0 / 3}, {"black", 1.0 / 3}});
  const Capacity add = Capacity::additive(e.urn.colors, uniform);
  CHECK(std::abs(choquet_expected_utility(e.act("f3"), add, e.utility) - 8.0) < 1e-12);
  const Act constant{"x", {{"red", 7}, {"yellow", 7}, {"black", 7}}};
  CHECK(std::abs(choquet_expected_utility(constant, c, UtilityFunction::power(0.5)) - std::sqrt(7.0)) < 1e-14);
}

TEST_CASE("property: Choquet with additive capacity is classical EU") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0), pay(0.0, 60.0);
  const std::vector<std::string> colors{"red", "yellow", "black", "green"};
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::map<std::string, double> w;
    double total = 0.0;
    Act f{"f", {}};
    for (const auto& c : colors) {
      w[c] = unit(rng);
      total += w[c];
      f.payoffs[c] = trial % 3 == 0 ? std::floor(pay(rng) / 20.0) * 20.0 : pay(rng);  // include ties
    }
    for (auto& [c, x] : w) x /= total;
    const ProbabilityVector p(w);
    const auto u = trial % 2 ? UtilityFunction::linear() : UtilityFunction::power(0.5);
    worst = std::max(worst, std::abs(choquet_expected_utility(f, Capacity::additive(colors, p), u) -
                                     classical_expected_utility(f, p, u)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("variational examples") {
  const UrnExperiment e = ellsberg_urn();
  const PriorSet p = PriorSet::full(e.urn);
  for (const auto& a : e.acts)
    CHECK(std::abs(variational_expected_utility(a, p, Penalty::zero(), e.utility) -
                   maxmin_expected_utility(a, p, e.utility)) <= 1e-12);
  CHECK(std::abs(variational_expected_utility(e.act("f2"), p, Penalty::linear("black", 12.0), e.utility)) < 1e-12);
  const Act constant{"x", {{"red", 5}, {"yellow", 5}, {"black", 5}}};
  CHECK(std::abs(variational_expected_utility(constant, p, Penalty::linear("black", 3.0), e.utility) - 5.0) < 1e-12);
  const auto grid = p.grid(101);
  std::vector<double> table(grid.size(), 1.0);
  CHECK(kind_of([&] { variational_expected_utility(e.act("f1"), p, table, e.utility, 101); }) ==
        ErrorKind::InvalidPenalty);
  table.assign(grid.size(), 0.0);
  table[3] = -0.5;
  CHECK(kind_of([&] { variational_expected_utility(e.act("f1"), p, table, e.utility, 101); }) ==
        ErrorKind::InvalidPenalty);
}

TEST_CASE("second-order examples") {
  const UrnExperiment e = ellsberg_urn();
  const std::vector<WeightedPrior> two{{ellsberg_prior(0.0), 0.5}, {ellsberg_prior(2.0 / 3.0), 0.5}};
  CHECK(std::abs(second_order_expected_utility(e.act("f2"), two, Transform::identity(), e.utility) - 4.0) < 1e-12);
  const double sqrt_case = second_order_expected_utility(e.act("f2"), two, Transform::power(0.5), e.utility);
  CHECK(std::abs(sqrt_case - std::sqrt(8.0) / 2.0) < 1e-12);
  CHECK(sqrt_case < 2.0);
  const std::vector<WeightedPrior> one{{ellsberg_prior(0.2), 1.0}};
  for (const auto& a : e.acts)
    CHECK(std::abs(second_order_expected_utility(a, one, Transform::identity(), e.utility) -
                   classical_expected_utility(a, ellsberg_prior(0.2), e.utility)) <= 1e-12);
  const std::vector<WeightedPrior> bad{{ellsberg_prior(0.2), 0.7}};
  CHECK(kind_of([&] { second_order_expected_utility(e.act("f1"), bad, Transform::identity(), e.utility); }) ==
        ErrorKind::InvalidDistribution);
}
