#include <algorithm>

#include "model_impl.hpp"

namespace fundusml::ml {

namespace {

class KnnModel final : public ModelImpl {
  public:
    KnnModel(Matrix train, std::vector<int> labels, int k, int num_classes)
        : train_(std::move(train)), labels_(std::move(labels)), k_(k), num_classes_(num_classes) {}

    ModelKind kind() const override { return ModelKind::Knn; }
    int num_classes() const override { return num_classes_; }
    std::size_t num_features() const override { return train_.cols; }

    Matrix scores(const Matrix& features) const override {
        const std::size_t n = train_.rows;
        const std::size_t k = std::min<std::size_t>(k_, n);
        Matrix s(features.rows, num_classes_);
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t q = 0; q < features.rows; ++q) {
            for (std::size_t i = 0; i < n; ++i) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < train_.cols; ++j) {
                    const double d = features(q, j) - train_(i, j);
                    d2 += d * d;
                }
                dist[i] = {d2, i}; // index breaks distance ties deterministically
            }
            std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
            for (std::size_t i = 0; i < k; ++i) s(q, labels_[dist[i].second]) += 1.0;
            for (int c = 0; c < num_classes_; ++c) s(q, c) /= static_cast<double>(k);
        }
        return s;
    }

    nlohmann::json to_json() const override {
        return {{"rows", train_.rows}, {"cols", train_.cols}, {"data", train_.a},
                {"labels", labels_},   {"k", k_},             {"num_classes", num_classes_}};
    }

  private:
    Matrix train_;
    std::vector<int> labels_;
    int k_;
    int num_classes_;
};

} // namespace

std::shared_ptr<const ModelImpl> fit_knn(const ModelSpec& spec, const Dataset& data) {
    return std::make_shared<KnnModel>(data.features, data.labels, spec.knn_k, data.num_classes);
}

std::shared_ptr<const ModelImpl> load_knn(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.a = j.at("data").get<std::vector<double>>();
    return std::make_shared<KnnModel>(std::move(m), j.at("labels").get<std::vector<int>>(),
                                      j.at("k").get<int>(), j.at("num_classes").get<int>());
}

} // namespace fundusml::ml
