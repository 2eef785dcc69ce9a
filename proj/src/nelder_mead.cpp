#include "fpp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fpp {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
  if (start.empty()) throw std::invalid_argument("nelder_mead: empty start point");
  if (options.max_iters < 1) throw std::invalid_argument("nelder_mead: max_iters must be >= 1");

  const std::size_t dim = start.size();
  NelderMeadResult result;
  const auto evaluate = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double value = objective(x);
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> vertices(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) vertices[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = evaluate(vertices[i]);

  std::vector<std::size_t> order(dim + 1);
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> sorted_vertices(dim + 1);
    std::vector<double> sorted_values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      sorted_vertices[i] = std::move(vertices[order[i]]);
      sorted_values[i] = values[order[i]];
    }
    vertices = std::move(sorted_vertices);
    values = std::move(sorted_values);
  };

  const auto blend = [&](const std::vector<double>& from, const std::vector<double>& to,
                         double scale) {
    std::vector<double> point(dim);
    for (std::size_t i = 0; i < dim; ++i) point[i] = from[i] + scale * (to[i] - from[i]);
    return point;
  };

  for (result.iterations = 0; result.iterations < options.max_iters; ++result.iterations) {
    sort_simplex();
    double diameter = 0.0;
    for (std::size_t v = 1; v <= dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) {
        diameter = std::max(diameter, std::fabs(vertices[v][i] - vertices[0][i]));
      }
    }
    const double spread = values[dim] - values[0];
    if (std::isfinite(values[0]) && spread <= options.ftol && diameter <= options.xtol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += vertices[v][i] / static_cast<double>(dim);
    }
    const auto& worst = vertices[dim];

    const auto reflected = blend(centroid, worst, -1.0);
    const double f_reflected = evaluate(reflected);
    if (f_reflected < values[0]) {
      const auto expanded = blend(centroid, worst, -2.0);
      const double f_expanded = evaluate(expanded);
      if (f_expanded < f_reflected) {
        vertices[dim] = expanded;
        values[dim] = f_expanded;
      } else {
        vertices[dim] = reflected;
        values[dim] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[dim - 1]) {
      vertices[dim] = reflected;
      values[dim] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[dim];
    const auto contracted = outside ? blend(centroid, reflected, 0.5) : blend(centroid, worst, 0.5);
    const double f_contracted = evaluate(contracted);
    if (f_contracted < (outside ? f_reflected : values[dim])) {
      vertices[dim] = contracted;
      values[dim] = f_contracted;
      continue;
    }
    for (std::size_t v = 1; v <= dim; ++v) {
      vertices[v] = blend(vertices[0], vertices[v], 0.5);
      values[v] = evaluate(vertices[v]);
    }
  }

  sort_simplex();
  result.x = vertices[0];
  result.value = values[0];
  return result;
}

}  // namespace fpp
