#pragma once

// Subcommand drivers behind the `qdu` executable. Each returns a Report; the
// caller renders it. run_cli maps errors to exit codes:
//   0 success (an infeasible verdict is a result), 2 input error,
//   3 NotFound / FitFailed, 1 internal error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qdu/optimizer.hpp"
#include "qdu/report.hpp"

namespace qdu {

struct GlobalOptions {
  Format format = Format::Json;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  std::optional<std::string> out;
  bool timestamp = true;
  Execution execution = Execution::Parallel;
};

/// Seed from QDU_SEED when set, else 1. InvalidSpec if QDU_SEED is not an unsigned integer.
std::uint64_t default_seed();

Report cmd_demo(const std::string& target, const GlobalOptions& g);
Report cmd_check_seut(const std::string& spec_path, const std::string& pattern, int grid, const GlobalOptions& g);

struct BaselineOptions {
  std::string pattern = "f1>f2,f4>f3";
  int grid = 101;
  double penalty_weight = 0.0;  // variational: weight * sum_c (p_c - symmetric_c)^2
  double phi_alpha = 0.5;       // second-order: phi(x) = x^alpha
  int mu_points = 11;           // second-order: uniform mu over this grid of the prior box
};
Report cmd_baselines(const std::string& spec_path, const std::string& model, const BaselineOptions& b,
                     const GlobalOptions& g);

Report cmd_fit_state(const std::string& spec_path, const std::string& mechanism, const std::string& pattern,
                     const GlobalOptions& g);
Report cmd_fit_choice(const std::string& spec_path, const std::string& field, const GlobalOptions& g);

struct InterferenceInputs {
  std::optional<std::string> w1;  // "re,im,re,im,..."
  std::optional<std::string> w2;
  std::string a = "0.7071067811865476,0";
  std::string b = "0.7071067811865476,0";
};
Report cmd_interference(const std::string& spec_path, const InterferenceInputs& in, const GlobalOptions& g);

int exit_code_for(const std::exception& e);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdu
