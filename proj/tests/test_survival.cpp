#include "catch_amalgamated.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "sepfam/survival.hpp"

using namespace sepfam;
using Catch::Approx;

TEST_CASE("model survival", "[survival]") {
  const std::vector<double> grid = {1e-12, 0.5, 1.0, 2.0, 50.0};
  const auto w = model_survival(WeibullParams{1.0, 1.0}, grid, "weibull");
  CHECK(w.label == "weibull");
  CHECK(w.values[2] == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(w.values[0] == Approx(1.0).margin(1e-9));

  for (FamilyId f : kAllFamilies) {
    const auto c = model_survival(from_common(f, {20.0, 50.0}), std::vector<double>{1e-10, 1e3}, "");
    CHECK(c.values[0] == Approx(1.0).margin(1e-9));
    CHECK(c.values[1] <= 1e-9);
  }
  CHECK_THROWS_AS(model_survival(WeibullParams{1.0, 1.0}, std::vector<double>{2.0, 1.0}, ""),
                  DomainError);
  CHECK_THROWS_AS(model_survival(WeibullParams{1.0, 1.0}, std::vector<double>{-1.0, 1.0}, ""),
                  DomainError);
  CHECK_THROWS_AS(model_survival(WeibullParams{1.0, -1.0}, grid, ""), DomainError);
}

TEST_CASE("mixture survival", "[survival]") {
  const MixtureSpec spec =
      MixtureSpec::with_defaults({FamilyId::Lognormal, FamilyId::Gamma, FamilyId::Weibull});
  const CommonParams cp{20.0, 50.0};
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.1 * i);

  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> w(3, 0.0);
    w[k] = 1.0;
    const auto mix = model_survival(spec, {cp, w}, grid, "mix");
    const auto one = model_survival(from_common(spec.components[k], cp), grid, "one");
    CHECK(mix.values == one.values);
  }

  const MixtureState s{cp, {0.2, 0.5, 0.3}};
  const auto mix = model_survival(spec, s, grid, "mix");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double direct = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      direct += s.weights[k] * survival(from_common(spec.components[k], cp), grid[i]);
    }
    CHECK(mix.values[i] == Approx(direct).margin(1e-15));
    if (i > 0) CHECK(mix.values[i] <= mix.values[i - 1]);
    CHECK(mix.values[i] >= 0.0);
    CHECK(mix.values[i] <= 1.0);
  }
}

TEST_CASE("empirical survival", "[survival]") {
  const std::vector<double> data = {1.0, 2.0, 3.0};
  const auto c = empirical_survival(data, std::vector<double>{0.5, 1.0, 1.5, 3.0, 4.0});
  CHECK(c.label == "empirical");
  CHECK(c.values[0] == 1.0);
  CHECK(c.values[1] == Approx(2.0 / 3.0));  // right-continuous at the jump
  CHECK(c.values[2] == Approx(2.0 / 3.0));
  CHECK(c.values[3] == 0.0);
  CHECK(c.values[4] == 0.0);
  CHECK_THROWS_AS(empirical_survival(std::vector<double>{}, data), DomainError);
  CHECK_THROWS_AS(empirical_survival(std::vector<double>{1.0, 0.0}, data), DomainError);
}

TEST_CASE("default grid and CSV export", "[survival]") {
  const std::vector<double> data = {2.0, 4.0, 10.0};
  const auto grid = default_grid(data, 5);
  CHECK(grid.front() == 1.0);
  CHECK(grid.back() == 15.0);
  CHECK(grid.size() == 5);

  const std::vector<SurvivalCurve> curves = {empirical_survival(data, grid),
                                             model_survival(WeibullParams{5.0, 1.5}, grid, "weibull")};
  std::ostringstream out;
  write_curves_csv(out, curves);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "grid,value,label");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);
  CHECK(out.str().find(",weibull\n") != std::string::npos);
}
