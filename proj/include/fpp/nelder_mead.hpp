#pragma once

#include <functional>
#include <vector>

namespace fpp {

struct NelderMeadOptions {
  int max_iters = 2000;
  /// Stop when the spread of simplex values falls below this...
  double ftol = 1e-10;
  /// ...and every vertex lies within this distance of the best one.
  double xtol = 1e-8;
  /// Edge length of the initial simplex along each coordinate.
  double initial_step = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes `objective` with the standard simplex moves (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Non-finite values are treated
/// as +infinity, so infeasible regions simply repel the simplex.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace fpp
