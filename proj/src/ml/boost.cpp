#include <algorithm>
#include <numeric>

#include "model_impl.hpp"

namespace fundusml::ml {

namespace {

struct RegNode {
    int feature{-1};
    double threshold{0.0};
    int left{-1}, right{-1};
    double weight{0.0}; // leaf score
};

struct RegTree {
    std::vector<RegNode> nodes;

    double value(const double* x) const {
        int n = 0;
        while (nodes[n].feature >= 0)
            n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
        return nodes[n].weight;
    }
};

// second-order greedy regression tree on gradient/hessian statistics
class RegTreeBuilder {
  public:
    RegTreeBuilder(const Matrix& x, const std::vector<double>& g, const std::vector<double>& h,
                   double lambda, double gamma, int max_depth)
        : x_(x), g_(g), h_(h), lambda_(lambda), gamma_(gamma), max_depth_(max_depth) {}

    RegTree build() {
        std::vector<int> idx(x_.rows);
        std::iota(idx.begin(), idx.end(), 0);
        tree_.nodes.clear();
        grow(idx, 0);
        return std::move(tree_);
    }

  private:
    int grow(std::vector<int>& idx, int depth) {
        const int node = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        double G = 0.0, H = 0.0;
        for (int i : idx) {
            G += g_[i];
            H += h_[i];
        }

        int best_f = -1;
        double best_t = 0.0, best_gain = gamma_;
        if (depth < max_depth_ && idx.size() >= 2) {
            const double parent_obj = G * G / (H + lambda_);
            for (std::size_t f = 0; f < x_.cols; ++f) {
                sorted_ = idx;
                std::sort(sorted_.begin(), sorted_.end(),
                          [&](int a, int b) { return x_(a, f) < x_(b, f); });
                double GL = 0.0, HL = 0.0;
                for (std::size_t p = 0; p + 1 < sorted_.size(); ++p) {
                    const int i = sorted_[p];
                    GL += g_[i];
                    HL += h_[i];
                    const double v = x_(i, f), vnext = x_(sorted_[p + 1], f);
                    if (v == vnext) continue;
                    const double GR = G - GL, HR = H - HL;
                    const double gain = 0.5 * (GL * GL / (HL + lambda_) + GR * GR / (HR + lambda_) -
                                               parent_obj);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_f = static_cast<int>(f);
                        best_t = (v + vnext) / 2.0;
                    }
                }
            }
        }

        if (best_f < 0) {
            tree_.nodes[node].weight = -G / (H + lambda_);
            return node;
        }
        std::vector<int> li, ri;
        for (int i : idx) (x_(i, best_f) <= best_t ? li : ri).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = grow(li, depth + 1);
        const int r = grow(ri, depth + 1);
        auto& n = tree_.nodes[node];
        n.feature = best_f;
        n.threshold = best_t;
        n.left = l;
        n.right = r;
        return node;
    }

    const Matrix& x_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    double lambda_, gamma_;
    int max_depth_;
    RegTree tree_;
    std::vector<int> sorted_;
};

struct Booster {
    std::vector<RegTree> trees;
    double learning_rate{0.3};

    double raw_score(const double* x) const {
        double f = 0.0;
        for (const auto& t : trees) f += learning_rate * t.value(x);
        return f;
    }
};

Booster train_binary_boost(const Matrix& x, const std::vector<int>& y, const ModelSpec& spec) {
    Booster b;
    b.learning_rate = spec.boost_learning_rate;
    const std::size_t n = x.rows;
    std::vector<double> score(n, 0.0), g(n), h(n);
    for (int round = 0; round < spec.boost_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            g[i] = p - y[i];
            h[i] = p * (1.0 - p);
        }
        RegTreeBuilder builder(x, g, h, spec.boost_lambda, spec.boost_gamma, spec.boost_depth);
        RegTree tree = builder.build();
        for (std::size_t i = 0; i < n; ++i) score[i] += b.learning_rate * tree.value(x.row(i));
        b.trees.push_back(std::move(tree));
    }
    return b;
}

class BoostModel final : public ModelImpl {
  public:
    BoostModel(std::vector<Booster> ovr, int num_classes, std::size_t num_features)
        : ovr_(std::move(ovr)), num_classes_(num_classes), num_features_(num_features) {}

    ModelKind kind() const override { return ModelKind::GradientBoost; }
    int num_classes() const override { return num_classes_; }
    std::size_t num_features() const override { return num_features_; }

    Matrix scores(const Matrix& features) const override {
        Matrix s(features.rows, num_classes_);
        for (std::size_t i = 0; i < features.rows; ++i) {
            if (num_classes_ == 2) {
                const double p = sigmoid(ovr_[0].raw_score(features.row(i)));
                s(i, 0) = 1.0 - p;
                s(i, 1) = p;
            } else {
                double total = 0.0;
                for (int c = 0; c < num_classes_; ++c) {
                    s(i, c) = sigmoid(ovr_[c].raw_score(features.row(i)));
                    total += s(i, c);
                }
                if (total > 0)
                    for (int c = 0; c < num_classes_; ++c) s(i, c) /= total;
            }
        }
        return s;
    }

    nlohmann::json to_json() const override {
        nlohmann::json j;
        j["num_classes"] = num_classes_;
        j["num_features"] = num_features_;
        for (const auto& b : ovr_) {
            nlohmann::json jb;
            jb["learning_rate"] = b.learning_rate;
            jb["trees"] = nlohmann::json::array();
            for (const auto& t : b.trees) {
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& nd : t.nodes)
                    nodes.push_back({{"f", nd.feature},
                                     {"t", nd.threshold},
                                     {"l", nd.left},
                                     {"r", nd.right},
                                     {"w", nd.weight}});
                jb["trees"].push_back(nodes);
            }
            j["ovr"].push_back(jb);
        }
        return j;
    }

  private:
    std::vector<Booster> ovr_;
    int num_classes_;
    std::size_t num_features_;
};

} // namespace

std::shared_ptr<const ModelImpl> fit_boost(const ModelSpec& spec, const Dataset& data) {
    const int num_problems = data.num_classes == 2 ? 1 : data.num_classes;
    std::vector<Booster> ovr(num_problems);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, spec.threads))
    for (int c = 0; c < num_problems; ++c) {
        const int positive = data.num_classes == 2 ? 1 : c;
        std::vector<int> y(data.labels.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.labels[i] == positive;
        ovr[c] = train_binary_boost(data.features, y, spec);
    }
    return std::make_shared<BoostModel>(std::move(ovr), data.num_classes, data.features.cols);
}

std::shared_ptr<const ModelImpl> load_boost(const nlohmann::json& j) {
    std::vector<Booster> ovr;
    for (const auto& jb : j.at("ovr")) {
        Booster b;
        b.learning_rate = jb.at("learning_rate").get<double>();
        for (const auto& jt : jb.at("trees")) {
            RegTree t;
            for (const auto& e : jt) {
                RegNode n;
                n.feature = e.at("f").get<int>();
                n.threshold = e.at("t").get<double>();
                n.left = e.at("l").get<int>();
                n.right = e.at("r").get<int>();
                n.weight = e.at("w").get<double>();
                t.nodes.push_back(n);
            }
            b.trees.push_back(std::move(t));
        }
        ovr.push_back(std::move(b));
    }
    return std::make_shared<BoostModel>(std::move(ovr), j.at("num_classes").get<int>(),
                                        j.at("num_features").get<std::size_t>());
}

} // namespace fundusml::ml
