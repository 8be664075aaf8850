#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sepfam/families.hpp"
#include "sepfam/mixture.hpp"

namespace sepfam {

struct SurvivalCurve {
  std::string label;
  std::vector<double> grid;
  std::vector<double> values;  // nonincreasing, in [0, 1]
};

/// S(t) = 1 - F(t) of a single fitted family.
SurvivalCurve model_survival(const NativeParams& params, std::span<const double> grid,
                             std::string label);

/// Mixture survival sum_k p_k S_k(t) at a common-parameter state.
SurvivalCurve model_survival(const MixtureSpec& spec, const MixtureState& state,
                             std::span<const double> grid, std::string label);

/// Right-continuous 1 - ECDF: fraction of observations strictly above t.
SurvivalCurve empirical_survival(std::span<const double> data, std::span<const double> grid,
                                 std::string label = "empirical");

/// `points` evenly spaced values from min(data)/2 to 1.5 max(data).
std::vector<double> default_grid(std::span<const double> data, std::size_t points = 200);

/// Long-format CSV with header "grid,value,label".
void write_curves_csv(std::ostream& out, std::span<const SurvivalCurve> curves);

}  // namespace sepfam
