#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pnj {

struct OptConfig {
  int memory = 20;
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  int max_backtracks = 70;
  double armijo = 1e-4;
  double initial_step = 1.0;
  /// Refractive index of the homogeneous starting lens.
  double initial_index = 1.5;

  void check(std::vector<std::string>& errors) const;
  void validate() const;
};

struct OptRecord {
  int iteration = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
  int backtracks = 0;
  double wall_time = 0.0;  // seconds since start
};

enum class Termination { Converged, MaxIterations, BacktrackingExhausted };

const char* to_string(Termination reason);

struct OptResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::vector<OptRecord> trace;
  Termination reason = Termination::MaxIterations;
};

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
/// Called after each accepted iterate (and once for the starting point).
using IterationFn = std::function<void(const OptRecord& record, const Eigen::VectorXd& x)>;

/// Limited-memory BFGS with a halving Armijo backtracking line search. The
/// run ends when ||g|| <= gradient_tolerance, after max_iterations, or when a
/// line search fails to find an acceptable step within max_backtracks
/// halvings. Non-finite trial values count as failed trials.
OptResult minimize(const Eigen::VectorXd& x0, const ObjectiveFn& objective, const OptConfig& cfg,
                   const IterationFn& on_iteration = {});

}  // namespace pnj
