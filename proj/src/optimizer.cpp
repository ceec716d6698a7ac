#include "pnj/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <deque>

#include "pnj/error.hpp"

namespace pnj {

void OptConfig::check(std::vector<std::string>& errors) const {
  if (memory < 1) errors.emplace_back("optimizer.memory must be >= 1");
  if (!(gradient_tolerance > 0.0)) errors.emplace_back("optimizer.gradient_tolerance must be positive");
  if (max_iterations < 0) errors.emplace_back("optimizer.max_iterations must be >= 0");
  if (max_backtracks < 1) errors.emplace_back("optimizer.max_backtracks must be >= 1");
  if (!(armijo > 0.0 && armijo < 1.0)) errors.emplace_back("optimizer.armijo must lie in (0, 1)");
  if (!(initial_step > 0.0)) errors.emplace_back("optimizer.initial_step must be positive");
  if (!(initial_index > 1.0)) errors.emplace_back("optimizer.initial_index must exceed 1");
}

void OptConfig::validate() const {
  std::vector<std::string> errors;
  check(errors);
  if (!errors.empty()) throw ConfigError(errors.front());
}

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::BacktrackingExhausted:
      return "backtracking_exhausted";
  }
  return "?";
}

namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<CurvaturePair>& pairs, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const auto& last = pairs.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return -q;
}

}  // namespace

OptResult minimize(const Eigen::VectorXd& x0, const ObjectiveFn& objective, const OptConfig& cfg,
                   const IterationFn& on_iteration) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  OptResult result;
  result.x = x0;
  Eigen::VectorXd g(x0.size());
  double f = objective(result.x, g);
  if (!std::isfinite(f) || !g.allFinite()) {
    throw NumericError("optimizer: objective or gradient is not finite at the initial point");
  }
  result.value = f;
  auto record = [&](int iteration, double step, int backtracks) {
    OptRecord r{iteration, f, g.norm(), step, backtracks, elapsed()};
    result.trace.push_back(r);
    if (on_iteration) on_iteration(r, result.x);
  };
  record(0, 0.0, 0);
  if (g.norm() <= cfg.gradient_tolerance) {
    result.reason = Termination::Converged;
    return result;
  }

  std::deque<CurvaturePair> pairs;
  Eigen::VectorXd trial(x0.size()), g_trial(x0.size());
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    Eigen::VectorXd p = pairs.empty() ? Eigen::VectorXd(-g / g.norm()) : two_loop(pairs, g);
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      pairs.clear();
      p = -g / g.norm();
      slope = g.dot(p);
    }

    double step = cfg.initial_step;
    int backtracks = 0;
    bool accepted = false;
    double f_trial = 0.0;
    while (true) {
      trial = result.x + step * p;
      bool finite = true;
      try {
        f_trial = objective(trial, g_trial);
        finite = std::isfinite(f_trial) && g_trial.allFinite();
      } catch (const NumericError&) {
        finite = false;
      }
      if (finite && f_trial <= f + cfg.armijo * step * slope) {
        accepted = true;
        break;
      }
      if (backtracks == cfg.max_backtracks) break;
      step *= 0.5;
      ++backtracks;
    }
    if (!accepted) {
      result.reason = Termination::BacktrackingExhausted;
      return result;
    }

    const Eigen::VectorXd s = trial - result.x;
    const Eigen::VectorXd y = g_trial - g;
    const double sy = s.dot(y);
    if (sy > 0.0) {
      pairs.push_back({s, y, 1.0 / sy});
      if (pairs.size() > static_cast<std::size_t>(cfg.memory)) pairs.pop_front();
    }
    result.x = trial;
    f = f_trial;
    g = g_trial;
    result.value = f;
    record(iter, step, backtracks);
    if (g.norm() <= cfg.gradient_tolerance) {
      result.reason = Termination::Converged;
      return result;
    }
  }
  result.reason = Termination::MaxIterations;
  return result;
}

}  // namespace pnj
