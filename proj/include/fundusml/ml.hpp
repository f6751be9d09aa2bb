#ifndef FUNDUSML_ML_HPP
#define FUNDUSML_ML_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fundusml::ml {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows{0}, cols{0};
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
};

struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int num_classes{2};

    void validate() const;
};

enum class ModelKind { Logistic, RandomForest, GradientBoost, Knn, DecisionTree, Svm, ExtraTrees };

const char* kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

struct ModelSpec {
    ModelKind kind{ModelKind::Logistic};
    std::uint64_t seed{0};

    // logistic regression: lambda = 1 / (n * C), batch GD with line-halving
    double logistic_c{1.0};
    int logistic_max_iter{1000};
    double logistic_tol{1e-6};

    // trees / forests
    int trees{100};
    int max_depth{-1};     // -1 = no cap
    int min_leaf{1};
    int max_features{0};   // 0 = sqrt(d) for ensembles, all for a single tree

    // kNN
    int knn_k{5};

    // SVM (RBF, kernelized Pegasos)
    double svm_c{1.0};
    double svm_gamma{0.0}; // 0 = 1 / (d * feature variance)
    int svm_epochs{50};

    // gradient boosting (second-order logistic loss)
    int boost_trees{100};
    int boost_depth{6};
    double boost_learning_rate{0.3};
    double boost_lambda{1.0};
    double boost_gamma{0.0};

    int threads{1};

    void validate() const;
};

class ModelImpl;

/// Immutable fitted model; cheap to copy and safe to share across threads.
class TrainedModel {
  public:
    TrainedModel() = default;
    explicit TrainedModel(std::shared_ptr<const ModelImpl> impl) : impl_(std::move(impl)) {}

    ModelKind kind() const;
    int num_classes() const;
    std::size_t num_features() const;

    /// Per-class scores, one row per query. Probabilistic kinds sum to 1 per
    /// row; SVM rows are one-vs-rest signed margins.
    Matrix predict_score(const Matrix& features) const;

    /// Argmax of scores; ties broken by lowest class index.
    std::vector<int> predict(const Matrix& features) const;

    bool valid() const { return impl_ != nullptr; }

    std::shared_ptr<const ModelImpl> impl() const { return impl_; }

  private:
    std::shared_ptr<const ModelImpl> impl_;
};

TrainedModel fit(const ModelSpec& spec, const Dataset& data);

/// Versioned text serialization; round-trip preserves predictions exactly.
std::string serialize(const TrainedModel& model);
TrainedModel deserialize(const std::string& text);

} // namespace fundusml::ml

#endif
