#include "fundusml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ml/model_impl.hpp"

namespace fundusml::eval {

FoldSplit stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<int>(i));

    FoldSplit split{k, std::vector<int>(labels.size(), -1), seed};
    int pos = 0;
    for (auto& [cls, idx] : by_class) {
        if (static_cast<int>(idx.size()) < k)
            throw std::invalid_argument("stratified_folds: class " + std::to_string(cls) +
                                        " has fewer members than folds");
        std::mt19937_64 rng(ml::split_seed(seed, static_cast<std::uint64_t>(cls)));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i : idx) {
            split.assignments[i] = pos;
            pos = (pos + 1) % k;
        }
    }
    return split;
}

long ConfusionMatrix::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

BasicMetrics metrics(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) throw std::invalid_argument("metrics: empty confusion matrix");
    const int k = cm.num_classes;
    long trace = 0;
    double prec_w = 0, rec_w = 0, f1_w = 0;
    for (int c = 0; c < k; ++c) {
        long tp = cm.at(c, c), support = 0, predicted = 0;
        trace += tp;
        for (int j = 0; j < k; ++j) {
            support += cm.at(c, j);
            predicted += cm.at(j, c);
        }
        const double prec = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        const double rec = support > 0 ? static_cast<double>(tp) / support : 0.0;
        const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        const double w = static_cast<double>(support) / total;
        prec_w += w * prec;
        rec_w += w * rec;
        f1_w += w * f1;
    }
    return {100.0 * trace / total, 100.0 * prec_w, 100.0 * rec_w, 100.0 * f1_w};
}

BasicMetrics binary_positive_metrics(const ConfusionMatrix& cm) {
    if (cm.num_classes != 2)
        throw std::invalid_argument("binary_positive_metrics: need a 2x2 matrix");
    const long total = cm.total();
    if (total == 0) throw std::invalid_argument("metrics: empty confusion matrix");
    const long tp = cm.at(1, 1), fp = cm.at(0, 1), fn = cm.at(1, 0);
    const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    return {100.0 * (cm.at(0, 0) + tp) / total, 100.0 * prec, 100.0 * rec, 100.0 * f1};
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const long pos = std::count(labels.begin(), labels.end(), 1);
    const long neg = static_cast<long>(labels.size()) - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("roc_auc: need both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult out;
    out.points.push_back({0.0, 0.0});
    double u = 0.0; // positive-over-negative pair wins, ties half
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        long dp = 0, dn = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            labels[order[j]] == 1 ? ++dp : ++dn;
            ++j;
        }
        // positives in this tie group beat all negatives ranked strictly below
        u += static_cast<double>(dp) * (neg - fp - dn) + 0.5 * dp * dn;
        tp += dp;
        fp += dn;
        out.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
        i = j;
    }
    out.auc = u / (static_cast<double>(pos) * neg);
    return out;
}

namespace {

BasicMetrics mean_of(const std::vector<BasicMetrics>& xs) {
    BasicMetrics m;
    for (const auto& x : xs) {
        m.accuracy += x.accuracy;
        m.precision += x.precision;
        m.recall += x.recall;
        m.f1 += x.f1;
    }
    const double n = static_cast<double>(xs.size());
    return {m.accuracy / n, m.precision / n, m.recall / n, m.f1 / n};
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
}

BasicMetrics std_of(const std::vector<BasicMetrics>& xs, const BasicMetrics& mean) {
    auto pick = [&](auto member) {
        std::vector<double> v;
        for (const auto& x : xs) v.push_back(x.*member);
        return v;
    };
    return {sample_std(pick(&BasicMetrics::accuracy), mean.accuracy),
            sample_std(pick(&BasicMetrics::precision), mean.precision),
            sample_std(pick(&BasicMetrics::recall), mean.recall),
            sample_std(pick(&BasicMetrics::f1), mean.f1)};
}

} // namespace

MetricsReport cross_validate(const ml::ModelSpec& spec, const ml::Dataset& data,
                             const FoldSplit& folds, const CvOptions& opts) {
    if (folds.assignments.size() != data.labels.size())
        throw std::invalid_argument("cross_validate: fold assignment size mismatch");

    const int k = folds.fold_count;
    MetricsReport report;
    report.model_name = ml::kind_name(spec.kind);
    report.fold_count = k;
    report.seed = folds.seed;
    report.num_classes = data.num_classes;
    report.per_fold.resize(k);
    report.fold_confusions.assign(k, ConfusionMatrix(data.num_classes));
    report.pooled = ConfusionMatrix(data.num_classes);
    report.fold_roc.resize(k);
    if (data.num_classes == 2) report.per_fold_auc.resize(k);
    if (opts.keep_models) report.serialized_models.resize(k);

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opts.threads))
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < data.labels.size(); ++i)
            (folds.assignments[i] == f ? test_idx : train_idx).push_back(i);

        ml::Dataset train;
        train.num_classes = data.num_classes;
        train.features = ml::Matrix(train_idx.size(), data.features.cols);
        for (std::size_t r = 0; r < train_idx.size(); ++r) {
            std::copy_n(data.features.row(train_idx[r]), data.features.cols,
                        train.features.a.begin() + r * data.features.cols);
            train.labels.push_back(data.labels[train_idx[r]]);
        }

        ml::TrainedModel model = ml::fit(spec, train);

        ml::Matrix test(test_idx.size(), data.features.cols);
        std::vector<int> truth;
        for (std::size_t r = 0; r < test_idx.size(); ++r) {
            std::copy_n(data.features.row(test_idx[r]), data.features.cols,
                        test.a.begin() + r * data.features.cols);
            truth.push_back(data.labels[test_idx[r]]);
        }

        const std::vector<int> pred = model.predict(test);
        auto& cm = report.fold_confusions[f];
        for (std::size_t i = 0; i < truth.size(); ++i) ++cm.at(truth[i], pred[i]);

        report.per_fold[f] =
            data.num_classes == 2 ? binary_positive_metrics(cm) : metrics(cm);

        if (data.num_classes == 2) {
            const ml::Matrix s = model.predict_score(test);
            std::vector<double> pos_scores(s.rows);
            for (std::size_t i = 0; i < s.rows; ++i) pos_scores[i] = s(i, 1);
            RocResult roc = roc_auc(pos_scores, truth);
            report.per_fold_auc[f] = roc.auc;
            report.fold_roc[f] = std::move(roc.points);
        }
        if (opts.keep_models) report.serialized_models[f] = ml::serialize(model);
    }

    for (const auto& cm : report.fold_confusions)
        for (std::size_t i = 0; i < cm.counts.size(); ++i) report.pooled.counts[i] += cm.counts[i];
    report.mean = mean_of(report.per_fold);
    report.stddev = std_of(report.per_fold, report.mean);
    if (data.num_classes == 2) {
        report.has_auc = true;
        report.auc_mean =
            std::accumulate(report.per_fold_auc.begin(), report.per_fold_auc.end(), 0.0) / k;
        report.auc_stddev = sample_std(report.per_fold_auc, report.auc_mean);
    }
    return report;
}

} // namespace fundusml::eval
