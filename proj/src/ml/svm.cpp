#include <random>

#include "model_impl.hpp"

namespace fundusml::ml {

namespace {

double rbf(const double* a, const double* b, std::size_t d, double gamma) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return std::exp(-gamma * s);
}

// kernelized Pegasos: alpha[i] counts margin violations while example i was drawn
std::vector<double> train_pegasos(const Matrix& x, const std::vector<int>& y_pm, double lambda,
                                  int epochs, std::mt19937_64& rng, double gamma) {
    const std::size_t n = x.rows;
    std::vector<double> alpha(n, 0.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const long total = static_cast<long>(epochs) * static_cast<long>(n);
    for (long t = 1; t <= total; ++t) {
        const std::size_t i = pick(rng);
        double f = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (alpha[j] != 0.0) f += alpha[j] * y_pm[j] * rbf(x.row(i), x.row(j), x.cols, gamma);
        f /= lambda * static_cast<double>(t);
        if (y_pm[i] * f < 1.0) alpha[i] += 1.0;
    }
    const double scale = 1.0 / (lambda * static_cast<double>(total));
    for (double& a : alpha) a *= scale;
    return alpha;
}

class SvmModel final : public ModelImpl {
  public:
    SvmModel(Scaler scaler, Matrix support, std::vector<int> labels,
             std::vector<std::vector<double>> ovr_alpha, double gamma, int num_classes)
        : scaler_(std::move(scaler)), support_(std::move(support)), labels_(std::move(labels)),
          ovr_alpha_(std::move(ovr_alpha)), gamma_(gamma), num_classes_(num_classes) {}

    ModelKind kind() const override { return ModelKind::Svm; }
    int num_classes() const override { return num_classes_; }
    std::size_t num_features() const override { return scaler_.mean.size(); }

    Matrix scores(const Matrix& features) const override {
        const Matrix x = scaler_.apply(features);
        Matrix s(x.rows, num_classes_);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (num_classes_ == 2) {
                const double m = margin(x.row(q), ovr_alpha_[0], 1);
                s(q, 0) = -m;
                s(q, 1) = m;
            } else {
                for (int c = 0; c < num_classes_; ++c)
                    s(q, c) = margin(x.row(q), ovr_alpha_[c], c);
            }
        }
        return s;
    }

    nlohmann::json to_json() const override {
        nlohmann::json j;
        j["scaler"] = scaler_.to_json();
        j["rows"] = support_.rows;
        j["cols"] = support_.cols;
        j["data"] = support_.a;
        j["labels"] = labels_;
        j["alpha"] = ovr_alpha_;
        j["gamma"] = gamma_;
        j["num_classes"] = num_classes_;
        return j;
    }

  private:
    double margin(const double* q, const std::vector<double>& alpha, int positive) const {
        double f = 0.0;
        for (std::size_t j = 0; j < support_.rows; ++j) {
            if (alpha[j] == 0.0) continue;
            const int y = labels_[j] == positive ? 1 : -1;
            f += alpha[j] * y * rbf(q, support_.row(j), support_.cols, gamma_);
        }
        return f;
    }

    Scaler scaler_;
    Matrix support_;
    std::vector<int> labels_;
    std::vector<std::vector<double>> ovr_alpha_;
    double gamma_;
    int num_classes_;
};

} // namespace

std::shared_ptr<const ModelImpl> fit_svm(const ModelSpec& spec, const Dataset& data) {
    Scaler scaler;
    scaler.fit(data.features);
    const Matrix x = scaler.apply(data.features);

    double gamma = spec.svm_gamma;
    if (gamma <= 0.0) {
        // 1 / (d * Var(X)) over all standardized entries
        double mean = 0.0;
        for (double v : x.a) mean += v;
        mean /= static_cast<double>(x.a.size());
        double var = 0.0;
        for (double v : x.a) var += (v - mean) * (v - mean);
        var /= static_cast<double>(x.a.size());
        if (var <= 0.0) var = 1.0;
        gamma = 1.0 / (static_cast<double>(x.cols) * var);
    }

    const double lambda = 1.0 / (static_cast<double>(x.rows) * spec.svm_c);
    const int num_problems = data.num_classes == 2 ? 1 : data.num_classes;
    std::vector<std::vector<double>> ovr_alpha(num_problems);
    for (int c = 0; c < num_problems; ++c) {
        const int positive = data.num_classes == 2 ? 1 : c;
        std::vector<int> y(data.labels.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.labels[i] == positive ? 1 : -1;
        std::mt19937_64 rng(split_seed(spec.seed, 0x53564dULL + static_cast<std::uint64_t>(c)));
        ovr_alpha[c] = train_pegasos(x, y, lambda, spec.svm_epochs, rng, gamma);
    }
    return std::make_shared<SvmModel>(std::move(scaler), x, data.labels, std::move(ovr_alpha),
                                      gamma, data.num_classes);
}

std::shared_ptr<const ModelImpl> load_svm(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.a = j.at("data").get<std::vector<double>>();
    return std::make_shared<SvmModel>(Scaler::from_json(j.at("scaler")), std::move(m),
                                      j.at("labels").get<std::vector<int>>(),
                                      j.at("alpha").get<std::vector<std::vector<double>>>(),
                                      j.at("gamma").get<double>(), j.at("num_classes").get<int>());
}

} // namespace fundusml::ml
