#ifndef FUNDUSML_ML_MODEL_IMPL_HPP
#define FUNDUSML_ML_MODEL_IMPL_HPP

#include <cmath>
#include <cstdint>
#include <memory>

#include "fundusml/ml.hpp"
#include "json.hpp"

namespace fundusml::ml {

class ModelImpl {
  public:
    virtual ~ModelImpl() = default;
    virtual ModelKind kind() const = 0;
    virtual int num_classes() const = 0;
    virtual std::size_t num_features() const = 0;
    virtual Matrix scores(const Matrix& features) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// Per-column standardization fitted on training data (used by logistic, SVM).
struct Scaler {
    std::vector<double> mean, stdev;

    void fit(const Matrix& x) {
        mean.assign(x.cols, 0.0);
        stdev.assign(x.cols, 0.0);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) mean[j] += x(i, j);
        for (double& m : mean) m /= static_cast<double>(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) {
                const double d = x(i, j) - mean[j];
                stdev[j] += d * d;
            }
        for (double& s : stdev) {
            s = std::sqrt(s / static_cast<double>(x.rows));
            if (s == 0.0) s = 1.0;
        }
    }
    Matrix apply(const Matrix& x) const {
        Matrix out(x.rows, x.cols);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = (x(i, j) - mean[j]) / stdev[j];
        return out;
    }
    nlohmann::json to_json() const { return {{"mean", mean}, {"stdev", stdev}}; }
    static Scaler from_json(const nlohmann::json& j) {
        Scaler s;
        s.mean = j.at("mean").get<std::vector<double>>();
        s.stdev = j.at("stdev").get<std::vector<double>>();
        return s;
    }
};

/// Deterministic stream splitting so parallel training stays reproducible.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Regularized mean cross-entropy for weights (w, b) and its analytic gradient;
/// lambda multiplies ||w||^2. Exposed so tests can finite-difference it.
double logistic_loss_and_grad(const Matrix& x, const std::vector<int>& y,
                              const std::vector<double>& w, double b, double lambda,
                              std::vector<double>& gw, double& gb);

// per-kind factories (train) and loaders (deserialize)
std::shared_ptr<const ModelImpl> fit_logistic(const ModelSpec&, const Dataset&);
std::shared_ptr<const ModelImpl> fit_tree_family(const ModelSpec&, const Dataset&);
std::shared_ptr<const ModelImpl> fit_knn(const ModelSpec&, const Dataset&);
std::shared_ptr<const ModelImpl> fit_svm(const ModelSpec&, const Dataset&);
std::shared_ptr<const ModelImpl> fit_boost(const ModelSpec&, const Dataset&);

std::shared_ptr<const ModelImpl> load_logistic(const nlohmann::json&);
std::shared_ptr<const ModelImpl> load_tree_family(const nlohmann::json&);
std::shared_ptr<const ModelImpl> load_knn(const nlohmann::json&);
std::shared_ptr<const ModelImpl> load_svm(const nlohmann::json&);
std::shared_ptr<const ModelImpl> load_boost(const nlohmann::json&);

} // namespace fundusml::ml

#endif
