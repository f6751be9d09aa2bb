#include <algorithm>
#include <numeric>
#include <random>

#include "model_impl.hpp"

namespace fundusml::ml {

namespace {

struct TreeNode {
    int feature{-1};       // -1 marks a leaf
    double threshold{0.0}; // go left when x[feature] <= threshold
    int left{-1}, right{-1};
    std::vector<double> probs; // leaf class distribution
};

struct ClassTree {
    std::vector<TreeNode> nodes;

    const std::vector<double>& leaf_probs(const double* x) const {
        int n = 0;
        while (nodes[n].feature >= 0)
            n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
        return nodes[n].probs;
    }
};

double gini(const std::vector<double>& counts, double total) {
    double g = 1.0;
    for (double c : counts) {
        const double p = c / total;
        g -= p * p;
    }
    return g;
}

struct TreeBuildConfig {
    int num_classes;
    int max_depth;        // -1 = unlimited
    int min_leaf;
    int max_features;     // <= 0 or >= d means all
    bool random_cutpoint; // extra-trees style splits
};

class TreeBuilder {
  public:
    TreeBuilder(const Matrix& x, const std::vector<int>& y, const TreeBuildConfig& cfg,
                std::mt19937_64 rng)
        : x_(x), y_(y), cfg_(cfg), rng_(rng) {}

    // sample_weight: per-row multiplicity (bootstrap counts); rows with 0 excluded
    ClassTree build(const std::vector<double>& sample_weight) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < x_.rows; ++i)
            if (sample_weight[i] > 0) idx.push_back(static_cast<int>(i));
        weight_ = &sample_weight;
        tree_.nodes.clear();
        grow(idx, 0);
        return std::move(tree_);
    }

  private:
    int grow(std::vector<int>& idx, int depth) {
        const int node = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        std::vector<double> counts(cfg_.num_classes, 0.0);
        double total = 0.0;
        for (int i : idx) {
            counts[y_[i]] += (*weight_)[i];
            total += (*weight_)[i];
        }
        const bool pure = std::count_if(counts.begin(), counts.end(),
                                        [](double c) { return c > 0; }) <= 1;
        const bool depth_stop = cfg_.max_depth >= 0 && depth >= cfg_.max_depth;
        int best_feature = -1;
        double best_threshold = 0.0, best_score = gini(counts, total);

        if (!pure && !depth_stop && static_cast<int>(idx.size()) >= 2 * cfg_.min_leaf) {
            find_best_split(idx, counts, total, best_feature, best_threshold, best_score);
        }

        if (best_feature < 0) {
            auto& leaf = tree_.nodes[node];
            leaf.probs.resize(cfg_.num_classes);
            for (int c = 0; c < cfg_.num_classes; ++c) leaf.probs[c] = counts[c] / total;
            return node;
        }

        std::vector<int> left_idx, right_idx;
        for (int i : idx)
            (x_(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int left = grow(left_idx, depth + 1);
        const int right = grow(right_idx, depth + 1);
        auto& n = tree_.nodes[node];
        n.feature = best_feature;
        n.threshold = best_threshold;
        n.left = left;
        n.right = right;
        return node;
    }

    std::vector<int> candidate_features() {
        const int d = static_cast<int>(x_.cols);
        int m = cfg_.max_features;
        if (m <= 0 || m >= d) {
            std::vector<int> all(d);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        // partial Fisher-Yates draw of m distinct features
        std::vector<int> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < m; ++i) {
            std::uniform_int_distribution<int> pick(i, d - 1);
            std::swap(pool[i], pool[pick(rng_)]);
        }
        pool.resize(m);
        return pool;
    }

    void find_best_split(const std::vector<int>& idx, const std::vector<double>& counts,
                         double total, int& best_feature, double& best_threshold,
                         double& best_score) {
        const double parent = gini(counts, total);
        // accept zero-gain splits too: impure nodes keep splitting until pure
        // (XOR-style data needs a gain-free first cut)
        double best_gain = -1.0;
        for (int f : candidate_features()) {
            if (cfg_.random_cutpoint) {
                double lo = x_(idx[0], f), hi = lo;
                for (int i : idx) {
                    lo = std::min(lo, x_(i, f));
                    hi = std::max(hi, x_(i, f));
                }
                if (lo == hi) continue;
                std::uniform_real_distribution<double> cut(lo, hi);
                const double t = cut(rng_);
                std::vector<double> lc(cfg_.num_classes, 0.0);
                double lt = 0.0;
                for (int i : idx)
                    if (x_(i, f) <= t) {
                        lc[y_[i]] += (*weight_)[i];
                        lt += (*weight_)[i];
                    }
                if (lt == 0.0 || lt == total) continue;
                std::vector<double> rc(cfg_.num_classes);
                for (int c = 0; c < cfg_.num_classes; ++c) rc[c] = counts[c] - lc[c];
                const double gain =
                    parent - (lt / total) * gini(lc, lt) - ((total - lt) / total) * gini(rc, total - lt);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = t;
                }
            } else {
                scan_exact_splits(idx, counts, total, parent, f, best_gain, best_feature,
                                  best_threshold);
            }
        }
        best_score = parent - best_gain;
    }

    void scan_exact_splits(const std::vector<int>& idx, const std::vector<double>& counts,
                           double total, double parent, int f, double& best_gain,
                           int& best_feature, double& best_threshold) {
        sorted_ = idx;
        std::sort(sorted_.begin(), sorted_.end(),
                  [&](int a, int b) { return x_(a, f) < x_(b, f); });
        std::vector<double> lc(cfg_.num_classes, 0.0);
        double lt = 0.0;
        for (std::size_t p = 0; p + 1 < sorted_.size(); ++p) {
            const int i = sorted_[p];
            lc[y_[i]] += (*weight_)[i];
            lt += (*weight_)[i];
            const double v = x_(i, f), vnext = x_(sorted_[p + 1], f);
            if (v == vnext) continue;
            if (static_cast<int>(p + 1) < cfg_.min_leaf ||
                static_cast<int>(sorted_.size() - p - 1) < cfg_.min_leaf)
                continue;
            std::vector<double> rc(cfg_.num_classes);
            for (int c = 0; c < cfg_.num_classes; ++c) rc[c] = counts[c] - lc[c];
            const double gain =
                parent - (lt / total) * gini(lc, lt) - ((total - lt) / total) * gini(rc, total - lt);
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = f;
                best_threshold = (v + vnext) / 2.0;
            }
        }
    }

    const Matrix& x_;
    const std::vector<int>& y_;
    TreeBuildConfig cfg_;
    std::mt19937_64 rng_;
    const std::vector<double>* weight_{nullptr};
    ClassTree tree_;
    std::vector<int> sorted_;
};

nlohmann::json tree_to_json(const ClassTree& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"p", n.probs}});
    return nodes;
}

ClassTree tree_from_json(const nlohmann::json& j) {
    ClassTree t;
    for (const auto& e : j) {
        TreeNode n;
        n.feature = e.at("f").get<int>();
        n.threshold = e.at("t").get<double>();
        n.left = e.at("l").get<int>();
        n.right = e.at("r").get<int>();
        n.probs = e.at("p").get<std::vector<double>>();
        t.nodes.push_back(std::move(n));
    }
    return t;
}

class TreeEnsembleModel final : public ModelImpl {
  public:
    TreeEnsembleModel(ModelKind kind, std::vector<ClassTree> trees, int num_classes,
                      std::size_t num_features)
        : kind_(kind), trees_(std::move(trees)), num_classes_(num_classes),
          num_features_(num_features) {}

    ModelKind kind() const override { return kind_; }
    int num_classes() const override { return num_classes_; }
    std::size_t num_features() const override { return num_features_; }

    Matrix scores(const Matrix& features) const override {
        Matrix s(features.rows, num_classes_);
        for (std::size_t i = 0; i < features.rows; ++i) {
            if (trees_.size() == 1) {
                const auto& p = trees_[0].leaf_probs(features.row(i));
                for (int c = 0; c < num_classes_; ++c) s(i, c) = p[c];
            } else {
                // ensemble vote proportions; each tree votes its argmax class
                for (const auto& t : trees_) {
                    const auto& p = t.leaf_probs(features.row(i));
                    int best = 0;
                    for (int c = 1; c < num_classes_; ++c)
                        if (p[c] > p[best]) best = c;
                    s(i, best) += 1.0;
                }
                for (int c = 0; c < num_classes_; ++c) s(i, c) /= static_cast<double>(trees_.size());
            }
        }
        return s;
    }

    nlohmann::json to_json() const override {
        nlohmann::json j;
        j["subkind"] = kind_name(kind_);
        j["num_classes"] = num_classes_;
        j["num_features"] = num_features_;
        for (const auto& t : trees_) j["trees"].push_back(tree_to_json(t));
        return j;
    }

  private:
    ModelKind kind_;
    std::vector<ClassTree> trees_;
    int num_classes_;
    std::size_t num_features_;
};

} // namespace

std::shared_ptr<const ModelImpl> fit_tree_family(const ModelSpec& spec, const Dataset& data) {
    const std::size_t n = data.features.rows;
    const int d = static_cast<int>(data.features.cols);

    TreeBuildConfig cfg;
    cfg.num_classes = data.num_classes;
    cfg.max_depth = spec.max_depth;
    cfg.min_leaf = spec.min_leaf;
    cfg.random_cutpoint = spec.kind == ModelKind::ExtraTrees;
    if (spec.kind == ModelKind::DecisionTree)
        cfg.max_features = 0; // all
    else if (spec.max_features != 0)
        cfg.max_features = spec.max_features;
    else
        cfg.max_features = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));

    const int num_trees = spec.kind == ModelKind::DecisionTree ? 1 : spec.trees;
    std::vector<ClassTree> trees(num_trees);

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, spec.threads))
    for (int t = 0; t < num_trees; ++t) {
        std::mt19937_64 rng(split_seed(spec.seed, static_cast<std::uint64_t>(t)));
        std::vector<double> weight(n, 1.0);
        if (spec.kind == ModelKind::RandomForest) {
            std::fill(weight.begin(), weight.end(), 0.0);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) weight[pick(rng)] += 1.0;
        }
        TreeBuilder builder(data.features, data.labels, cfg, rng);
        trees[t] = builder.build(weight);
    }
    return std::make_shared<TreeEnsembleModel>(spec.kind, std::move(trees), data.num_classes,
                                               data.features.cols);
}

std::shared_ptr<const ModelImpl> load_tree_family(const nlohmann::json& j) {
    std::vector<ClassTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
    return std::make_shared<TreeEnsembleModel>(kind_from_name(j.at("subkind").get<std::string>()),
                                               std::move(trees), j.at("num_classes").get<int>(),
                                               j.at("num_features").get<std::size_t>());
}

} // namespace fundusml::ml
