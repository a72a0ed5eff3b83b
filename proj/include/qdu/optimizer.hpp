#pragma once

// Deterministic multi-start compass search over a box with periodic
// coordinates. Restart k draws its start from a seed that depends only on
// (master seed, k), so the serial and OpenMP paths return identical results.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace qdu {

enum class Execution { Serial, Parallel };

struct Param {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
};

class ParamSpace {
 public:
  ParamSpace& add(std::string name, double lo, double hi, bool periodic = false);
  ParamSpace& add_angle(std::string name);

  std::size_t size() const noexcept { return params_.size(); }
  const std::vector<Param>& params() const noexcept { return params_; }
  const Param& operator[](std::size_t i) const { return params_.at(i); }
  std::size_t index_of(const std::string& name) const;

  /// Wraps periodic coordinates and clips bounded ones.
  std::vector<double> project(std::span<const double> raw) const;

 private:
  std::vector<Param> params_;
};

/// Into [lo, hi); 3*pi -> pi on [0, 2*pi).
double periodic_wrap(double x, double lo, double hi);
double bound_clip(double x, double lo, double hi);

struct Budget {
  int restarts = 64;
  int iterations = 500;
};

struct SearchOptions {
  double initial_step = 0.25;  // fraction of each coordinate's range
  double min_step = 1e-10;
  /// A restart stops as soon as its objective is <= target.
  double target = -std::numeric_limits<double>::infinity();
  Execution execution = Execution::Parallel;
};

struct FitResult {
  std::vector<double> params;
  double value = std::numeric_limits<double>::infinity();
  int restarts_used = 0;
  long iterations_used = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  int best_restart = -1;
};

using Objective = std::function<double(std::span<const double>)>;

std::uint64_t restart_seed(std::uint64_t master, int restart);

/// Uniform start point for restart k.
std::vector<double> restart_start(const ParamSpace& space, std::uint64_t master, int restart);

struct LocalResult {
  std::vector<double> params;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

LocalResult compass_descent(const Objective& f, const ParamSpace& space, std::vector<double> start, int iterations,
                            const SearchOptions& options);

/// Throws NonFiniteObjective if the objective ever returns NaN or Inf.
FitResult minimize(const Objective& f, const ParamSpace& space, std::uint64_t seed, Budget budget,
                   const SearchOptions& options = {});

}  // namespace qdu
