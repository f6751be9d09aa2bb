#ifndef FUNDUSML_REPORT_HPP
#define FUNDUSML_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fundusml/dataset.hpp"
#include "fundusml/eval.hpp"

namespace fundusml::report {

struct BenchmarkOptions {
    bool binary{true};
    std::vector<ml::ModelKind> models; // empty = all seven
    std::uint64_t seed{0};
    int folds{10};
    int threads{1};
    bool svg{false};
};

/// Runs 10-fold cross-validation per model and writes, under out_dir:
/// metrics.csv, confusion_<model>.csv, roc_<model>.csv (binary tasks),
/// radar.csv, summary.txt, and optional roc_<model>.svg plots.
std::vector<eval::MetricsReport> run_benchmark(const data::FeatureFile& file,
                                               const BenchmarkOptions& opts,
                                               const std::string& out_dir);

struct BettiBandOptions {
    bool binary{true};
    double coverage{0.4};
    bool svg{false};
};

/// Per class and per (channel, dim) block: median curve plus confidence band,
/// written as band_<class>_<channel>_b<dim>.csv with grid,median,lower,upper
/// columns; optional overlaid SVG per block.
void analyze_betti(const data::FeatureFile& file, const BettiBandOptions& opts,
                   const std::string& out_dir);

} // namespace fundusml::report

#endif
