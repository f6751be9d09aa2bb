#ifndef FUNDUSML_EVAL_HPP
#define FUNDUSML_EVAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fundusml/ml.hpp"

namespace fundusml::eval {

struct FoldSplit {
    int fold_count{10};
    std::vector<int> assignments; // per-sample fold index
    std::uint64_t seed{0};
};

/// Seeded per-class shuffle followed by round-robin assignment; the round-robin
/// position carries across classes so overall fold sizes differ by at most 1.
FoldSplit stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

struct ConfusionMatrix {
    int num_classes{0};
    std::vector<long> counts; // row = true class, column = predicted

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int k) : num_classes(k), counts(static_cast<std::size_t>(k) * k, 0) {}
    long& at(int truth, int pred) { return counts[truth * num_classes + pred]; }
    long at(int truth, int pred) const { return counts[truth * num_classes + pred]; }
    long total() const;
};

struct BasicMetrics {
    double accuracy{0}, precision{0}, recall{0}, f1{0}; // percentages
};

/// Support-weighted one-vs-rest averages (recall == accuracy by construction).
BasicMetrics metrics(const ConfusionMatrix& cm);

/// Positive-class (class 1) metrics for binary tasks.
BasicMetrics binary_positive_metrics(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr{0}, tpr{0};
};

struct RocResult {
    double auc{0}; // fraction in [0,1]
    std::vector<RocPoint> points;
};

/// AUC as the Mann-Whitney statistic with ties counted half; points swept over
/// distinct score thresholds.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct CvOptions {
    int threads{1};
    bool keep_models{false}; // retain serialized per-fold models in the report
};

struct MetricsReport {
    std::string model_name;
    int fold_count{0};
    std::uint64_t seed{0};
    int num_classes{0};
    std::vector<BasicMetrics> per_fold;
    BasicMetrics mean, stddev; // stddev with the sample (n-1) formula
    std::vector<double> per_fold_auc; // binary tasks only
    double auc_mean{0}, auc_stddev{0};
    bool has_auc{false};
    std::vector<ConfusionMatrix> fold_confusions;
    ConfusionMatrix pooled;
    std::vector<std::vector<RocPoint>> fold_roc;
    std::vector<std::string> serialized_models; // when CvOptions::keep_models
};

MetricsReport cross_validate(const ml::ModelSpec& spec, const ml::Dataset& data,
                             const FoldSplit& folds, const CvOptions& opts = {});

} // namespace fundusml::eval

#endif
