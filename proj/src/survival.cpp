#include "sepfam/survival.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0) {
      throw DomainError("survival grid must contain finite non-negative points");
    }
    if (i > 0 && grid[i] < grid[i - 1]) throw DomainError("survival grid must be sorted");
  }
}

// Pins tiny floating-point excursions so the curve is exactly monotone.
void enforce_monotone(std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::clamp(values[i], 0.0, 1.0);
    if (i > 0) values[i] = std::min(values[i], values[i - 1]);
  }
}

}  // namespace

SurvivalCurve model_survival(const NativeParams& params, std::span<const double> grid,
                             std::string label) {
  check_grid(grid);
  validate(params);
  SurvivalCurve curve{std::move(label), {grid.begin(), grid.end()}, {}};
  curve.values.reserve(grid.size());
  for (double t : grid) curve.values.push_back(survival(params, t));
  enforce_monotone(curve.values);
  return curve;
}

SurvivalCurve model_survival(const MixtureSpec& spec, const MixtureState& state,
                             std::span<const double> grid, std::string label) {
  check_grid(grid);
  validate(spec, state);
  SurvivalCurve curve{std::move(label), {grid.begin(), grid.end()},
                      std::vector<double>(grid.size(), 0.0)};
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (state.weights[k] <= 0.0) continue;
    const NativeParams params = from_common(spec.components[k], state.cp);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      curve.values[i] += state.weights[k] * survival(params, grid[i]);
    }
  }
  enforce_monotone(curve.values);
  return curve;
}

SurvivalCurve empirical_survival(std::span<const double> data, std::span<const double> grid,
                                 std::string label) {
  if (data.empty()) throw DomainError("empirical_survival: empty data");
  for (double y : data) {
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("empirical_survival: data must be positive");
  }
  check_grid(grid);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  SurvivalCurve curve{std::move(label), {grid.begin(), grid.end()}, {}};
  curve.values.reserve(grid.size());
  for (double t : grid) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    curve.values.push_back(static_cast<double>(above) / n);
  }
  return curve;
}

std::vector<double> default_grid(std::span<const double> data, std::size_t points) {
  if (data.empty()) throw DomainError("default_grid: empty data");
  if (points < 2) throw DomainError("default_grid: need at least two points");
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double lo = 0.5 * *lo_it;
  const double hi = 1.5 * *hi_it;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

void write_curves_csv(std::ostream& out, std::span<const SurvivalCurve> curves) {
  out << "grid,value,label\n";
  const auto old_precision = out.precision(17);
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      out << c.grid[i] << ',' << c.values[i] << ',' << c.label << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace sepfam
