#include "fundusml/betti.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fundusml::betti {

std::vector<int> default_grid() {
    std::vector<int> g(kGridSize);
    for (int i = 0; i < kGridSize; ++i)
        g[i] = static_cast<int>(std::lround(i * 255.0 / (kGridSize - 1)));
    return g;
}

BettiCurve betti_curve(const cubical::PersistenceDiagram& pd, const std::vector<int>& grid) {
    if (grid.empty()) throw std::invalid_argument("betti_curve: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end())
        throw std::invalid_argument("betti_curve: grid must be strictly increasing");

    BettiCurve c{pd.dim, grid, std::vector<int>(grid.size(), 0)};
    for (const auto& p : pd.pairs) {
        // alive on grid points in [birth, death)
        auto lo = std::lower_bound(grid.begin(), grid.end(), p.birth);
        auto hi = std::lower_bound(grid.begin(), grid.end(), p.death);
        for (auto it = lo; it != hi; ++it) ++c.values[it - grid.begin()];
    }
    return c;
}

std::vector<double> tda_features(const ChannelSet& channels) {
    const auto grid = default_grid();
    std::vector<double> out;
    out.reserve(kTdaDim);
    for (const Image* ch : {&channels.gray, &channels.red, &channels.green, &channels.blue}) {
        auto [pd0, pd1] = cubical::compute_persistence(*ch);
        for (const auto* pd : {&pd0, &pd1}) {
            BettiCurve c = betti_curve(*pd, grid);
            out.insert(out.end(), c.values.begin(), c.values.end());
        }
    }
    return out;
}

namespace {

// inclusive empirical quantile with linear interpolation
double quantile(std::vector<double>& sorted_scratch, double q) {
    std::sort(sorted_scratch.begin(), sorted_scratch.end());
    const double pos = q * (sorted_scratch.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted_scratch.size() - 1);
    const double frac = pos - lo;
    return sorted_scratch[lo] * (1 - frac) + sorted_scratch[hi] * frac;
}

} // namespace

CurveBand median_band(const std::vector<std::vector<double>>& curves, double coverage) {
    if (curves.empty()) throw std::invalid_argument("median_band: no curves");
    if (!(coverage > 0.0 && coverage < 1.0))
        throw std::invalid_argument("median_band: coverage must be in (0,1)");
    const std::size_t len = curves.front().size();
    for (const auto& c : curves)
        if (c.size() != len) throw std::invalid_argument("median_band: mixed grids");

    CurveBand band;
    band.coverage = coverage;
    band.median.resize(len);
    band.lower.resize(len);
    band.upper.resize(len);
    const double qlo = (1.0 - coverage) / 2.0;
    std::vector<double> col(curves.size());
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t j = 0; j < curves.size(); ++j) col[j] = curves[j][i];
        band.median[i] = quantile(col, 0.5);
        band.lower[i] = quantile(col, qlo);
        band.upper[i] = quantile(col, 1.0 - qlo);
    }
    return band;
}

} // namespace fundusml::betti
