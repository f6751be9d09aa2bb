#ifndef FUNDUSML_BETTI_HPP
#define FUNDUSML_BETTI_HPP

#include <vector>

#include "fundusml/cubical.hpp"
#include "fundusml/image.hpp"

namespace fundusml::betti {

inline constexpr int kGridSize = 100;

struct BettiCurve {
    int dim{0};
    std::vector<int> grid;   // evaluation thresholds, strictly increasing
    std::vector<int> values; // alive counts per grid point
};

struct CurveBand {
    std::vector<double> median, lower, upper;
    double coverage{0.4};
};

/// 100 evenly spaced integer thresholds over [0,255].
std::vector<int> default_grid();

/// values[i] = #pairs with birth <= grid[i] < death.
BettiCurve betti_curve(const cubical::PersistenceDiagram& pd, const std::vector<int>& grid);

/// 800-dim topological feature vector:
/// [gray b0 | gray b1 | R b0 | R b1 | G b0 | G b1 | B b0 | B b1], 100 each.
std::vector<double> tda_features(const ChannelSet& channels);

inline constexpr int kTdaDim = 8 * kGridSize;

/// Pointwise median plus empirical quantile band at the given coverage.
/// Quantiles are inclusive with linear interpolation between order statistics.
CurveBand median_band(const std::vector<std::vector<double>>& curves, double coverage);

} // namespace fundusml::betti

#endif
