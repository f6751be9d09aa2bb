#include "fundusml/ml.hpp"

#include <algorithm>
#include <stdexcept>

#include "model_impl.hpp"

namespace fundusml::ml {

void Dataset::validate() const {
    if (features.rows != labels.size())
        throw std::invalid_argument("Dataset: feature row count != label count");
    if (features.cols == 0) throw std::invalid_argument("Dataset: zero feature columns");
    if (features.rows < 2) throw std::invalid_argument("Dataset: fewer than 2 samples");
    std::vector<char> seen(num_classes, 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes)
            throw std::invalid_argument("Dataset: label outside [0, K)");
        seen[y] = 1;
    }
    if (std::count(seen.begin(), seen.end(), 1) < 2)
        throw std::invalid_argument("Dataset: fewer than 2 classes present");
}

const char* kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Logistic: return "logistic";
        case ModelKind::RandomForest: return "random_forest";
        case ModelKind::GradientBoost: return "gradient_boost";
        case ModelKind::Knn: return "knn";
        case ModelKind::DecisionTree: return "decision_tree";
        case ModelKind::Svm: return "svm";
        case ModelKind::ExtraTrees: return "extra_trees";
    }
    return "?";
}

ModelKind kind_from_name(const std::string& name) {
    for (ModelKind k : {ModelKind::Logistic, ModelKind::RandomForest, ModelKind::GradientBoost,
                        ModelKind::Knn, ModelKind::DecisionTree, ModelKind::Svm,
                        ModelKind::ExtraTrees})
        if (name == kind_name(k)) return k;
    throw std::invalid_argument("unknown model kind: " + name);
}

void ModelSpec::validate() const {
    if (logistic_c <= 0) throw std::invalid_argument("ModelSpec: C must be > 0");
    if (trees < 1 || boost_trees < 1) throw std::invalid_argument("ModelSpec: trees must be >= 1");
    if (knn_k < 1) throw std::invalid_argument("ModelSpec: k must be >= 1");
    if (svm_c <= 0) throw std::invalid_argument("ModelSpec: SVM C must be > 0");
    if (boost_lambda < 0) throw std::invalid_argument("ModelSpec: lambda must be >= 0");
    if (min_leaf < 1) throw std::invalid_argument("ModelSpec: min_leaf must be >= 1");
    if (boost_depth < 0) throw std::invalid_argument("ModelSpec: boost depth must be >= 0");
}

ModelKind TrainedModel::kind() const { return impl_->kind(); }
int TrainedModel::num_classes() const { return impl_->num_classes(); }
std::size_t TrainedModel::num_features() const { return impl_->num_features(); }

Matrix TrainedModel::predict_score(const Matrix& features) const {
    if (features.cols != impl_->num_features())
        throw std::invalid_argument("predict_score: feature dimension mismatch");
    return impl_->scores(features);
}

std::vector<int> TrainedModel::predict(const Matrix& features) const {
    Matrix s = predict_score(features);
    std::vector<int> out(s.rows);
    for (std::size_t i = 0; i < s.rows; ++i) {
        int best = 0;
        for (std::size_t c = 1; c < s.cols; ++c)
            if (s(i, c) > s(i, best)) best = static_cast<int>(c);
        out[i] = best;
    }
    return out;
}

TrainedModel fit(const ModelSpec& spec, const Dataset& data) {
    spec.validate();
    data.validate();
    switch (spec.kind) {
        case ModelKind::Logistic: return TrainedModel(fit_logistic(spec, data));
        case ModelKind::Knn: return TrainedModel(fit_knn(spec, data));
        case ModelKind::Svm: return TrainedModel(fit_svm(spec, data));
        case ModelKind::GradientBoost: return TrainedModel(fit_boost(spec, data));
        case ModelKind::DecisionTree:
        case ModelKind::RandomForest:
        case ModelKind::ExtraTrees: return TrainedModel(fit_tree_family(spec, data));
    }
    throw std::logic_error("fit: unhandled kind");
}

std::string serialize(const TrainedModel& model) {
    nlohmann::json j;
    j["format"] = "fundusml-model";
    j["version"] = 1;
    j["kind"] = kind_name(model.kind());
    j["model"] = model.impl()->to_json();
    return j.dump();
}

TrainedModel deserialize(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format") != "fundusml-model" || j.at("version") != 1)
        throw std::invalid_argument("deserialize: unknown model format or version");
    const ModelKind kind = kind_from_name(j.at("kind").get<std::string>());
    const nlohmann::json& m = j.at("model");
    switch (kind) {
        case ModelKind::Logistic: return TrainedModel(load_logistic(m));
        case ModelKind::Knn: return TrainedModel(load_knn(m));
        case ModelKind::Svm: return TrainedModel(load_svm(m));
        case ModelKind::GradientBoost: return TrainedModel(load_boost(m));
        case ModelKind::DecisionTree:
        case ModelKind::RandomForest:
        case ModelKind::ExtraTrees: return TrainedModel(load_tree_family(m));
    }
    throw std::logic_error("deserialize: unhandled kind");
}

} // namespace fundusml::ml
