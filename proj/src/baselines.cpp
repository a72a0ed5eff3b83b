#include "qdu/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace qdu {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Preference patterns

PreferencePattern::PreferencePattern(std::vector<StrictPreference> items) : items_(std::move(items)) {
  require(!items_.empty(), ErrorKind::InvalidPattern, "empty pattern");
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& p = items_[i];
    require(!p.better.empty() && !p.worse.empty(), ErrorKind::InvalidPattern, "empty act name");
    require(p.better != p.worse, ErrorKind::InvalidPattern, "self-preference " + p.better + ">" + p.worse);
    for (std::size_t j = 0; j < i; ++j) {
      require(!(items_[j] == p), ErrorKind::InvalidPattern, "repeated preference " + p.better + ">" + p.worse);
      require(!(items_[j].better == p.worse && items_[j].worse == p.better), ErrorKind::InvalidPattern,
              "contradictory preferences between " + p.better + " and " + p.worse);
    }
  }
}

PreferencePattern PreferencePattern::parse(const std::string& text) {
  std::vector<StrictPreference> items;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto gt = part.find('>');
    if (gt == std::string::npos) fail(ErrorKind::InvalidPattern, "expected 'a>b' in '" + part + "'");
    items.push_back({trim(part.substr(0, gt)), trim(part.substr(gt + 1))});
  }
  return PreferencePattern(std::move(items));
}

std::string PreferencePattern::to_string() const {
  std::string out;
  for (const auto& p : items_) {
    if (!out.empty()) out += ",";
    out += p.better + ">" + p.worse;
  }
  return out;
}

void PreferencePattern::check_acts(const UrnExperiment& exp) const {
  for (const auto& p : items_) {
    require(exp.has_act(p.better), ErrorKind::InvalidPattern, "unknown act " + p.better);
    require(exp.has_act(p.worse), ErrorKind::InvalidPattern, "unknown act " + p.worse);
  }
}

int PreferencePattern::relation(const std::string& a, const std::string& b) const {
  for (const auto& p : items_) {
    if (p.better == a && p.worse == b) return 1;
    if (p.better == b && p.worse == a) return -1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Prior sets

PriorSet::PriorSet(UrnSpec urn, std::vector<Coordinate> coordinates)
    : urn_(std::move(urn)), coords_(std::move(coordinates)) {
  urn_.validate();
  std::set<std::string> expected;
  for (const auto& g : urn_.unknown_groups)
    for (std::size_t k = 1; k < g.colors.size(); ++k) expected.insert(g.colors[k]);
  std::set<std::string> given;
  for (const auto& c : coords_) {
    require(given.insert(c.color).second, ErrorKind::EmptyPriorSet, "duplicate coordinate " + c.color);
    require(std::isfinite(c.lo) && std::isfinite(c.hi) && c.lo <= c.hi, ErrorKind::EmptyPriorSet,
            "empty interval for " + c.color);
    require(c.lo >= 0.0, ErrorKind::EmptyPriorSet, "negative lower bound for " + c.color);
  }
  require(given == expected, ErrorKind::EmptyPriorSet,
          "free coordinates must be every unknown-group color except the first of its group");
  for (const auto& g : urn_.unknown_groups) {
    const double mass = static_cast<double>(g.total) / urn_.total;
    double hi_sum = 0.0;
    for (std::size_t k = 1; k < g.colors.size(); ++k)
      for (const auto& c : coords_)
        if (c.color == g.colors[k]) hi_sum += c.hi;
    require(hi_sum <= mass + 1e-12, ErrorKind::EmptyPriorSet, "box leaves the simplex for group of " + g.colors[0]);
  }
}

PriorSet PriorSet::full(const UrnSpec& urn) {
  urn.validate();
  std::vector<Coordinate> coords;
  for (const auto& g : urn.unknown_groups) {
    if (g.colors.size() < 2) continue;
    const double mass = static_cast<double>(g.total) / urn.total;
    const double hi = mass / static_cast<double>(g.colors.size() - 1);
    for (std::size_t k = 1; k < g.colors.size(); ++k) coords.push_back({g.colors[k], 0.0, hi});
  }
  return PriorSet(urn, std::move(coords));
}

ProbabilityVector PriorSet::at(std::span<const double> free) const {
  require(free.size() == coords_.size(), ErrorKind::DimensionMismatch, "prior coordinates");
  std::map<std::string, double> p;
  for (const auto& [color, count] : urn_.known_counts) p[color] = static_cast<double>(count) / urn_.total;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    require(free[i] >= coords_[i].lo - 1e-12 && free[i] <= coords_[i].hi + 1e-12, ErrorKind::OutOfRange,
            "coordinate " + coords_[i].color + " outside its box");
    p[coords_[i].color] = std::max(0.0, free[i]);
  }
  for (const auto& g : urn_.unknown_groups) {
    double rest = static_cast<double>(g.total) / urn_.total;
    for (std::size_t k = 1; k < g.colors.size(); ++k) rest -= p[g.colors[k]];
    p[g.colors[0]] = rest < 0.0 && rest > -1e-12 ? 0.0 : rest;
  }
  return ProbabilityVector(std::move(p));
}

std::pair<double, std::vector<double>> PriorSet::affine(const std::string& color) const {
  std::vector<double> grad(coords_.size(), 0.0);
  if (const auto it = urn_.known_counts.find(color); it != urn_.known_counts.end())
    return {static_cast<double>(it->second) / urn_.total, grad};
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i].color == color) {
      grad[i] = 1.0;
      return {0.0, grad};
    }
  for (const auto& g : urn_.unknown_groups) {
    if (g.colors.front() != color) continue;
    for (std::size_t k = 1; k < g.colors.size(); ++k)
      for (std::size_t i = 0; i < coords_.size(); ++i)
        if (coords_[i].color == g.colors[k]) grad[i] = -1.0;
    return {static_cast<double>(g.total) / urn_.total, grad};
  }
  fail(ErrorKind::ColorMismatch, "color " + color + " not in prior set");
}

std::vector<std::vector<double>> PriorSet::vertices() const {
  const std::size_t d = coords_.size();
  std::vector<std::vector<double>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> (d - 1 - i)) & 1U ? coords_[i].hi : coords_[i].lo;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> PriorSet::grid(int resolution) const {
  require(resolution >= 2, ErrorKind::OutOfRange, "grid resolution must be >= 2");
  const std::size_t d = coords_.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(resolution);
  std::vector<std::vector<double>> out(total, std::vector<double>(d));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = d; i-- > 0;) {
      const auto k = static_cast<double>(rem % static_cast<std::size_t>(resolution));
      rem /= static_cast<std::size_t>(resolution);
      const auto& c = coords_[i];
      out[idx][i] = k == resolution - 1 ? c.hi : c.lo + (c.hi - c.lo) * k / (resolution - 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SEUT feasibility

UtilityFamily default_utility_family() {
  return {UtilityFunction::linear(),         UtilityFunction::power(0.25),        UtilityFunction::power(0.5),
          UtilityFunction::power(0.75),      UtilityFunction::power(1.0),         UtilityFunction::exponential(0.05),
          UtilityFunction::exponential(0.1), UtilityFunction::exponential(0.5)};
}

std::optional<LinearInequality> reduce_preference(const UrnExperiment& exp, const PriorSet& priors,
                                                  const StrictPreference& pref) {
  const Act& a = exp.act(pref.better);
  const Act& b = exp.act(pref.worse);
  std::set<double> values;
  for (const auto& c : exp.urn.colors)
    if (a.payoffs.at(c) != b.payoffs.at(c)) {
      values.insert(a.payoffs.at(c));
      values.insert(b.payoffs.at(c));
    }
  if (values.size() != 2 && !values.empty()) return std::nullopt;

  // EU(a) - EU(b) = (u(high) - u(low)) * sum_c s_c p_c, and u(high) > u(low).
  LinearInequality ineq;
  ineq.source = pref;
  ineq.gradient.assign(priors.dims(), 0.0);
  std::string lhs;
  for (const auto& c : exp.urn.colors) {
    const double pa = a.payoffs.at(c), pb = b.payoffs.at(c);
    if (pa == pb) continue;
    const double s = pa > pb ? 1.0 : -1.0;
    const auto [off, grad] = priors.affine(c);
    ineq.offset += s * off;
    for (std::size_t i = 0; i < grad.size(); ++i) ineq.gradient[i] += s * grad[i];
    lhs += (s > 0 ? (lhs.empty() ? "" : " + ") : (lhs.empty() ? "-" : " - ")) + std::string("p(") + c + ")";
  }
  std::string reduced;
  if (ineq.offset != 0.0 || std::all_of(ineq.gradient.begin(), ineq.gradient.end(), [](double g) { return g == 0.0; }))
    reduced = num(ineq.offset);
  for (std::size_t i = 0; i < ineq.gradient.size(); ++i) {
    const double g = ineq.gradient[i];
    if (g == 0.0) continue;
    const std::string term = (std::abs(g) == 1.0 ? "" : num(std::abs(g)) + "*") + "p(" + priors.coordinates()[i].color + ")";
    reduced += reduced.empty() ? (g < 0 ? "-" + term : term) : (g < 0 ? " - " : " + ") + term;
  }
  ineq.text = pref.better + ">" + pref.worse + ": " + (lhs.empty() ? "0" : lhs) + " > 0  <=>  " + reduced + " > 0";
  return ineq;
}

std::optional<InfeasibilityCertificate> find_certificate(const PriorSet& priors,
                                                         std::vector<LinearInequality> inequalities) {
  constexpr double kSlack = 1e-12;
  const auto verts = priors.vertices();
  InfeasibilityCertificate cert;

  for (std::size_t i = 0; i < inequalities.size(); ++i) {
    const auto& q = inequalities[i];
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts)
      best = std::max(best, std::inner_product(q.gradient.begin(), q.gradient.end(), v.begin(), q.offset));
    if (best <= kSlack) {
      cert.combined = {i};
      cert.multipliers = {1.0};
      cert.explanation = "[" + q.text + "] cannot hold anywhere in the prior box (max " + num(best) + ")";
      cert.inequalities = std::move(inequalities);
      return cert;
    }
  }

  for (std::size_t i = 0; i < inequalities.size(); ++i) {
    const auto& gi = inequalities[i].gradient;
    const double gg = std::inner_product(gi.begin(), gi.end(), gi.begin(), 0.0);
    if (gg == 0.0) continue;
    for (std::size_t j = i + 1; j < inequalities.size(); ++j) {
      const auto& gj = inequalities[j].gradient;
      const double t = -std::inner_product(gj.begin(), gj.end(), gi.begin(), 0.0) / gg;
      if (!(t > 0.0)) continue;
      double resid = 0.0;
      for (std::size_t k = 0; k < gi.size(); ++k) resid = std::max(resid, std::abs(t * gi[k] + gj[k]));
      if (resid > kSlack) continue;
      const double c = t * inequalities[i].offset + inequalities[j].offset;
      if (c > kSlack) continue;
      cert.combined = {i, j};
      cert.multipliers = {t, 1.0};
      cert.explanation = num(t) + " x [" + inequalities[i].text + "] + 1 x [" + inequalities[j].text +
                         "] sums to 0 > " + num(c) + ", a contradiction for every strictly increasing utility";
      cert.inequalities = std::move(inequalities);
      return cert;
    }
  }
  return std::nullopt;
}

FeasibilityVerdict seut_pattern_feasibility(const UrnExperiment& exp, const PreferencePattern& pattern,
                                            const UtilityFamily& family, int grid, Execution execution) {
  pattern.check_acts(exp);
  require(grid >= 100, ErrorKind::OutOfRange, "grid resolution must be >= 100");
  require(!family.empty(), ErrorKind::OutOfRange, "empty utility family");
  const PriorSet priors = PriorSet::full(exp.urn);

  FeasibilityVerdict verdict;
  verdict.grid_resolution = grid;
  for (const auto& u : family) verdict.utilities.push_back(u.describe());

  std::vector<LinearInequality> reduced;
  for (const auto& pref : pattern.items())
    if (auto q = reduce_preference(exp, priors, pref)) reduced.push_back(std::move(*q));
  verdict.certificate = find_certificate(priors, std::move(reduced));

  // Grid scan: per color an affine map, per utility the act utilities.
  const auto points = priors.grid(grid);
  const std::size_t ncol = exp.urn.colors.size();
  std::vector<double> offsets(ncol);
  std::vector<std::vector<double>> grads(ncol);
  for (std::size_t c = 0; c < ncol; ++c) std::tie(offsets[c], grads[c]) = priors.affine(exp.urn.colors[c]);

  const auto& prefs = pattern.items();
  const auto npts = static_cast<long>(points.size());
  for (const auto& u : family) {
    // diff[k][c] = u(better_c) - u(worse_c)
    std::vector<std::vector<double>> diff(prefs.size(), std::vector<double>(ncol));
    for (std::size_t k = 0; k < prefs.size(); ++k)
      for (std::size_t c = 0; c < ncol; ++c) {
        const auto& color = exp.urn.colors[c];
        diff[k][c] = u(exp.act(prefs[k].better).payoffs.at(color)) - u(exp.act(prefs[k].worse).payoffs.at(color));
      }
    auto satisfies = [&](long idx) {
      const auto& x = points[static_cast<std::size_t>(idx)];
      for (const auto& d : diff) {
        double margin = 0.0;
        for (std::size_t c = 0; c < ncol; ++c) {
          double p = offsets[c];
          for (std::size_t i = 0; i < x.size(); ++i) p += grads[c][i] * x[i];
          margin += d[c] * p;
        }
        if (!(margin > kPreferenceMargin)) return false;
      }
      return true;
    };

    long first = npts;
    if (execution == Execution::Parallel) {
#pragma omp parallel for reduction(min : first) schedule(static)
      for (long i = 0; i < npts; ++i)
        if (i < first && satisfies(i)) first = i;
    } else {
      for (long i = 0; i < npts; ++i)
        if (satisfies(i)) {
          first = i;
          break;
        }
    }
    verdict.points_evaluated += first == npts ? npts : first + 1;
    if (first < npts) {
      FeasibilityWitness w{priors.at(points[static_cast<std::size_t>(first)]), u, {}};
      for (const auto& pref : prefs) {
        const double m = classical_expected_utility(exp.act(pref.better), w.prior, u) -
                         classical_expected_utility(exp.act(pref.worse), w.prior, u);
        if (!(m > kPreferenceMargin)) fail(ErrorKind::InvariantViolation, "witness failed re-verification");
        w.margins.push_back(m);
      }
      verdict.witness = std::move(w);
      break;
    }
  }
  verdict.feasible = verdict.witness.has_value();
  if (verdict.feasible && verdict.certificate)
    fail(ErrorKind::InvariantViolation, "grid witness contradicts analytic certificate");
  return verdict;
}

// ---------------------------------------------------------------------------
// Sure-Thing principle

SureThingReport sure_thing_check(const UrnExperiment& exp, const std::pair<std::string, std::string>& pair_a,
                                 const std::pair<std::string, std::string>& pair_b,
                                 const std::vector<std::string>& common_event, const PreferencePattern& pattern) {
  const Act& a1 = exp.act(pair_a.first);
  const Act& a2 = exp.act(pair_a.second);
  const Act& b1 = exp.act(pair_b.first);
  const Act& b2 = exp.act(pair_b.second);
  const std::set<std::string> event(common_event.begin(), common_event.end());
  for (const auto& c : event) require(exp.urn.has_color(c), ErrorKind::ColorMismatch, "event color " + c);

  for (const auto& c : exp.urn.colors) {
    if (event.count(c)) {
      if (a1.payoffs.at(c) != a2.payoffs.at(c) || b1.payoffs.at(c) != b2.payoffs.at(c))
        fail(ErrorKind::PairsNotSureThingRelated, "acts within a pair differ on common-event color " + c);
    } else if (a1.payoffs.at(c) != b1.payoffs.at(c) || a2.payoffs.at(c) != b2.payoffs.at(c)) {
      fail(ErrorKind::PairsNotSureThingRelated, "pairs differ outside the common event on " + c);
    }
  }

  SureThingReport r;
  r.common_event = common_event;
  r.pair_a_relation = pattern.relation(a1.name, a2.name);
  r.pair_b_relation = pattern.relation(b1.name, b2.name);
  require(r.pair_a_relation != 0 && r.pair_b_relation != 0, ErrorKind::InvalidPattern,
          "pattern must rank both pairs");
  r.violates = r.pair_a_relation != r.pair_b_relation;
  auto pick = [](const std::pair<std::string, std::string>& p, int rel) {
    return rel > 0 ? p.first + ">" + p.second : p.second + ">" + p.first;
  };
  r.explanation = pick(pair_a, r.pair_a_relation) + " but " + pick(pair_b, r.pair_b_relation) +
                  (r.violates ? ": ranking flips with the common-event payoff (violation)"
                              : ": ranking independent of the common-event payoff (conforms)");
  return r;
}

// ---------------------------------------------------------------------------
// Max-Min

double maxmin_expected_utility(const Act& act, const PriorSet& priors, const UtilityFunction& u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : priors.vertices()) best = std::min(best, classical_expected_utility(act, priors.at(v), u));
  return best;
}

// ---------------------------------------------------------------------------
// Capacities

Capacity::Capacity(std::vector<std::string> colors, std::vector<double> by_mask)
    : colors_(std::move(colors)), values_(std::move(by_mask)) {
  const std::size_t n = colors_.size();
  require(n >= 1 && n <= 8, ErrorKind::InvalidCapacity, "capacity needs 1..8 colors");
  const std::size_t events = std::size_t{1} << n;
  require(values_.size() == events, ErrorKind::MissingEvent, "capacity needs all 2^n events");
  for (double v : values_)
    require(std::isfinite(v) && v >= -1e-12 && v <= 1.0 + 1e-12, ErrorKind::InvalidCapacity, "value outside [0,1]");
  require(std::abs(values_[0]) <= 1e-12, ErrorKind::InvalidCapacity, "nu(empty) must be 0");
  require(std::abs(values_[events - 1] - 1.0) <= 1e-12, ErrorKind::InvalidCapacity, "nu(full) must be 1");
  for (std::size_t m = 0; m < events; ++m)
    for (std::size_t bit = 0; bit < n; ++bit)
      if (!(m >> bit & 1U))
        require(values_[m] <= values_[m | (std::size_t{1} << bit)] + 1e-12, ErrorKind::InvalidCapacity,
                "capacity not monotone");
}

Capacity Capacity::from_events(std::vector<std::string> colors, const std::map<std::set<std::string>, double>& events) {
  const std::size_t n = colors.size();
  require(n >= 1 && n <= 8, ErrorKind::InvalidCapacity, "capacity needs 1..8 colors");
  for (const auto& [event, v] : events)
    for (const auto& c : event)
      require(std::find(colors.begin(), colors.end(), c) != colors.end(), ErrorKind::InvalidCapacity,
              "event mentions unknown color " + c);
  std::vector<double> by_mask(std::size_t{1} << n);
  for (std::size_t m = 0; m < by_mask.size(); ++m) {
    std::set<std::string> event;
    for (std::size_t bit = 0; bit < n; ++bit)
      if (m >> bit & 1U) event.insert(colors[bit]);
    const auto it = events.find(event);
    if (it == events.end()) {
      std::string name = "{";
      for (const auto& c : event) name += (name.size() > 1 ? "," : "") + c;
      fail(ErrorKind::MissingEvent, "capacity has no value for " + name + "}");
    }
    by_mask[m] = it->second;
  }
  return Capacity(std::move(colors), std::move(by_mask));
}

Capacity Capacity::additive(const std::vector<std::string>& colors, const ProbabilityVector& p) {
  std::vector<double> by_mask(std::size_t{1} << colors.size(), 0.0);
  for (std::size_t m = 0; m < by_mask.size(); ++m)
    for (std::size_t bit = 0; bit < colors.size(); ++bit)
      if (m >> bit & 1U) by_mask[m] += p[colors[bit]];
  by_mask.back() = 1.0;
  return Capacity(colors, std::move(by_mask));
}

Capacity Capacity::lower_envelope(const PriorSet& priors) {
  const auto& colors = priors.urn().colors;
  std::vector<double> by_mask(std::size_t{1} << colors.size(), std::numeric_limits<double>::infinity());
  by_mask[0] = 0.0;
  for (const auto& v : priors.vertices()) {
    const ProbabilityVector p = priors.at(v);
    for (std::size_t m = 1; m < by_mask.size(); ++m) {
      double s = 0.0;
      for (std::size_t bit = 0; bit < colors.size(); ++bit)
        if (m >> bit & 1U) s += p[colors[bit]];
      by_mask[m] = std::min(by_mask[m], s);
    }
  }
  by_mask.back() = 1.0;
  return Capacity(colors, std::move(by_mask));
}

std::uint32_t Capacity::mask_of(std::span<const std::string> event) const {
  std::uint32_t m = 0;
  for (const auto& c : event) {
    const auto it = std::find(colors_.begin(), colors_.end(), c);
    if (it == colors_.end()) fail(ErrorKind::ColorMismatch, "capacity has no color " + c);
    m |= 1U << (it - colors_.begin());
  }
  return m;
}

double Capacity::of(std::span<const std::string> event) const { return values_.at(mask_of(event)); }

bool Capacity::is_convex(double tol) const {
  for (std::size_t a = 0; a < values_.size(); ++a)
    for (std::size_t b = 0; b < values_.size(); ++b)
      if (values_[a | b] + values_[a & b] < values_[a] + values_[b] - tol) return false;
  return true;
}

bool Capacity::is_additive(double tol) const {
  for (std::size_t a = 0; a < values_.size(); ++a)
    for (std::size_t b = 0; b < values_.size(); ++b)
      if ((a & b) == 0 && std::abs(values_[a | b] - values_[a] - values_[b]) > tol) return false;
  return true;
}

double choquet_expected_utility(const Act& act, const Capacity& cap, const UtilityFunction& u) {
  const auto& colors = cap.colors();
  require(act.payoffs.size() == colors.size(), ErrorKind::ColorMismatch, "act and capacity colors differ");
  std::vector<double> util(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    const auto it = act.payoffs.find(colors[i]);
    if (it == act.payoffs.end()) fail(ErrorKind::ColorMismatch, "act has no payoff for " + colors[i]);
    util[i] = u(it->second);
  }
  std::vector<std::size_t> order(colors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return util[x] > util[y]; });

  // sum_k (u_(k) - u_(k+1)) nu(top k), with u_(n+1) = 0
  double ceu = 0.0;
  std::uint32_t top = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    top |= 1U << order[k];
    const double next = k + 1 < order.size() ? util[order[k + 1]] : 0.0;
    ceu += (util[order[k]] - next) * cap[top];
  }
  return ceu;
}

// ---------------------------------------------------------------------------
// Variational preferences

Penalty Penalty::zero() {
  return Penalty("zero", [](const ProbabilityVector&) { return 0.0; });
}

Penalty Penalty::linear(std::string color, double weight) {
  require(std::isfinite(weight) && weight >= 0.0, ErrorKind::InvalidPenalty, "linear penalty weight must be >= 0");
  std::string name = "linear(" + num(weight) + "*p(" + color + "))";
  return Penalty(std::move(name), [color = std::move(color), weight](const ProbabilityVector& p) { return weight * p[color]; });
}

Penalty Penalty::quadratic(ProbabilityVector reference, double weight) {
  require(std::isfinite(weight) && weight >= 0.0, ErrorKind::InvalidPenalty, "quadratic penalty weight must be >= 0");
  return Penalty("quadratic(" + num(weight) + ")", [ref = std::move(reference), weight](const ProbabilityVector& p) {
    double s = 0.0;
    for (const auto& [c, v] : ref.values()) s += (p[c] - v) * (p[c] - v);
    return weight * s;
  });
}

double variational_expected_utility(const Act& act, const PriorSet& priors, std::span<const double> penalty_table,
                                    const UtilityFunction& u, int grid) {
  const auto points = priors.grid(grid);
  require(penalty_table.size() == points.size(), ErrorKind::InvalidPenalty, "penalty table does not match grid");
  double min_penalty = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double c = penalty_table[i];
    require(std::isfinite(c) && c >= 0.0, ErrorKind::InvalidPenalty, "penalty must be finite and >= 0");
    min_penalty = std::min(min_penalty, c);
    best = std::min(best, classical_expected_utility(act, priors.at(points[i]), u) + c);
  }
  require(min_penalty <= 1e-12, ErrorKind::InvalidPenalty, "penalty must vanish somewhere on the grid");
  return best;
}

double variational_expected_utility(const Act& act, const PriorSet& priors, const Penalty& penalty,
                                    const UtilityFunction& u, int grid) {
  const auto points = priors.grid(grid);
  std::vector<double> table(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) table[i] = penalty(priors.at(points[i]));
  return variational_expected_utility(act, priors, table, u, grid);
}

// ---------------------------------------------------------------------------
// Second-order probabilities

Transform Transform::identity() { return Transform(Kind::Identity, 1.0); }

Transform Transform::power(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::OutOfRange, "power transform needs alpha > 0");
  return Transform(Kind::Power, alpha);
}

Transform Transform::exponential(double k) {
  require(std::isfinite(k) && k > 0.0, ErrorKind::OutOfRange, "exponential transform needs k > 0");
  return Transform(Kind::Exponential, k);
}

double Transform::operator()(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Power:
      require(x >= -1e-12, ErrorKind::OutOfRange, "power transform of a negative value");
      return std::pow(std::max(0.0, x), param_);
    case Kind::Exponential: return -std::expm1(-param_ * x) / param_;
  }
  return x;
}

std::string Transform::describe() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Power: return "power(" + num(param_) + ")";
    case Kind::Exponential: return "exponential(" + num(param_) + ")";
  }
  return "?";
}

double second_order_expected_utility(const Act& act, std::span<const WeightedPrior> mu, const Transform& phi,
                                     const UtilityFunction& u) {
  require(!mu.empty(), ErrorKind::InvalidDistribution, "empty second-order distribution");
  double total = 0.0;
  for (const auto& wp : mu) {
    require(std::isfinite(wp.weight) && wp.weight >= 0.0, ErrorKind::InvalidDistribution, "negative weight");
    total += wp.weight;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorKind::InvalidDistribution, "weights sum to " + num(total));
  double out = 0.0;
  for (const auto& wp : mu) out += wp.weight * phi(classical_expected_utility(act, wp.prior, u));
  return out;
}

}  // namespace qdu
