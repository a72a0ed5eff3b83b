#include "qdu/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

#include "qdu/error.hpp"

namespace qdu {

ParamSpace& ParamSpace::add(std::string name, double lo, double hi, bool periodic) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, ErrorKind::OutOfRange, "bad bounds for " + name);
  require(!periodic || hi > lo, ErrorKind::OutOfRange, "periodic parameter needs hi > lo: " + name);
  params_.push_back({std::move(name), lo, hi, periodic});
  return *this;
}

ParamSpace& ParamSpace::add_angle(std::string name) { return add(std::move(name), 0.0, 2.0 * std::numbers::pi, true); }

std::size_t ParamSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  fail(ErrorKind::OutOfRange, "no parameter named " + name);
}

std::vector<double> ParamSpace::project(std::span<const double> raw) const {
  require(raw.size() == params_.size(), ErrorKind::DimensionMismatch, "parameter vector size");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Param& p = params_[i];
    out[i] = p.periodic ? periodic_wrap(raw[i], p.lo, p.hi) : bound_clip(raw[i], p.lo, p.hi);
  }
  return out;
}

double periodic_wrap(double x, double lo, double hi) {
  const double period = hi - lo;
  double r = std::fmod(x - lo, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return lo + r;
}

double bound_clip(double x, double lo, double hi) { return std::clamp(x, lo, hi); }

std::uint64_t restart_seed(std::uint64_t master, int restart) {
  // splitmix64 finalizer over (master, restart index)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(restart) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> restart_start(const ParamSpace& space, std::uint64_t master, int restart) {
  std::mt19937_64 rng(restart_seed(master, restart));
  std::vector<double> x(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x[i] = space[i].lo + u * (space[i].hi - space[i].lo);
  }
  return space.project(x);
}

namespace {

double checked(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  if (!std::isfinite(v)) fail(ErrorKind::NonFiniteObjective, "objective returned " + std::to_string(v));
  return v;
}

}  // namespace

LocalResult compass_descent(const Objective& f, const ParamSpace& space, std::vector<double> start, int iterations,
                            const SearchOptions& options) {
  LocalResult r;
  r.params = space.project(start);
  r.value = checked(f, r.params);
  std::vector<double> step(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) step[i] = options.initial_step * (space[i].hi - space[i].lo);

  auto small_enough = [&] {
    return std::all_of(step.begin(), step.end(), [&](double s) { return s < options.min_step; });
  };
  if (r.value <= options.target || space.size() == 0 || small_enough()) {
    r.converged = true;
    return r;
  }

  std::vector<double> trial;
  while (r.iterations < iterations) {
    ++r.iterations;
    bool improved = false;
    for (std::size_t i = 0; i < space.size() && !improved; ++i) {
      if (step[i] < options.min_step) continue;
      for (const double sign : {1.0, -1.0}) {
        trial = r.params;
        trial[i] += sign * step[i];
        trial = space.project(trial);
        if (trial[i] == r.params[i]) continue;
        const double v = checked(f, trial);
        if (v < r.value) {
          r.params = std::move(trial);
          r.value = v;
          improved = true;
          break;
        }
      }
    }
    if (r.value <= options.target) {
      r.converged = true;
      break;
    }
    if (!improved) {
      for (auto& s : step) s *= 0.5;
      if (small_enough()) {
        r.converged = true;
        break;
      }
    }
  }
  return r;
}

FitResult minimize(const Objective& f, const ParamSpace& space, std::uint64_t seed, Budget budget,
                   const SearchOptions& options) {
  require(budget.restarts > 0 && budget.iterations > 0, ErrorKind::OutOfRange, "budget must be positive");
  const int n = budget.restarts;
  std::vector<LocalResult> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));

  auto run = [&](int k) {
    try {
      results[k] = compass_descent(f, space, restart_start(space, seed, k), budget.iterations, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) run(k);
  } else {
    for (int k = 0; k < n; ++k) run(k);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  FitResult out;
  out.seed = seed;
  out.restarts_used = n;
  for (int k = 0; k < n; ++k) {
    out.iterations_used += results[k].iterations;
    if (out.best_restart < 0 || results[k].value < out.value - 1e-15) {
      out.best_restart = k;
      out.value = results[k].value;
    }
  }
  out.params = results[out.best_restart].params;
  out.converged = results[out.best_restart].converged;
  return out;
}

}  // namespace qdu
