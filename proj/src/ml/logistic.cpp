#include <cmath>

#include "model_impl.hpp"

namespace fundusml::ml {

namespace {

struct BinaryLogistic {
    std::vector<double> w;
    double b{0.0};

    double decision(const double* x, std::size_t d) const {
        double z = b;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
        return z;
    }
};

double loss_and_grad(const Matrix& x, const std::vector<int>& y, const BinaryLogistic& m,
                     double lambda, std::vector<double>& gw, double& gb) {
    return logistic_loss_and_grad(x, y, m.w, m.b, lambda, gw, gb);
}

BinaryLogistic train_binary(const Matrix& x, const std::vector<int>& y, const ModelSpec& spec) {
    const std::size_t d = x.cols;
    BinaryLogistic m;
    m.w.assign(d, 0.0);
    const double lambda = 1.0 / (static_cast<double>(x.rows) * spec.logistic_c);

    std::vector<double> gw;
    double gb = 0.0;
    double prev = loss_and_grad(x, y, m, lambda, gw, gb);
    double step = 1.0;
    for (int it = 0; it < spec.logistic_max_iter; ++it) {
        BinaryLogistic trial = m;
        double cur = prev;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            for (std::size_t j = 0; j < d; ++j) trial.w[j] = m.w[j] - step * gw[j];
            trial.b = m.b - step * gb;
            std::vector<double> tgw;
            double tgb = 0.0;
            cur = loss_and_grad(x, y, trial, lambda, tgw, tgb);
            if (cur < prev) {
                m = trial;
                gw = std::move(tgw);
                gb = tgb;
                improved = true;
                step *= 1.5; // allow the step to recover after halvings
                break;
            }
            step *= 0.5;
        }
        if (!improved || prev - cur < spec.logistic_tol) { prev = cur; break; }
        prev = cur;
    }
    return m;
}

class LogisticModel final : public ModelImpl {
  public:
    LogisticModel(Scaler scaler, std::vector<BinaryLogistic> ovr, int k)
        : scaler_(std::move(scaler)), ovr_(std::move(ovr)), num_classes_(k) {}

    ModelKind kind() const override { return ModelKind::Logistic; }
    int num_classes() const override { return num_classes_; }
    std::size_t num_features() const override { return scaler_.mean.size(); }

    Matrix scores(const Matrix& features) const override {
        const Matrix x = scaler_.apply(features);
        Matrix s(x.rows, num_classes_);
        for (std::size_t i = 0; i < x.rows; ++i) {
            if (num_classes_ == 2) {
                const double p = sigmoid(ovr_[0].decision(x.row(i), x.cols));
                s(i, 0) = 1.0 - p;
                s(i, 1) = p;
            } else {
                double total = 0.0;
                for (int c = 0; c < num_classes_; ++c) {
                    s(i, c) = sigmoid(ovr_[c].decision(x.row(i), x.cols));
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
        j["scaler"] = scaler_.to_json();
        j["num_classes"] = num_classes_;
        for (const auto& m : ovr_) j["ovr"].push_back({{"w", m.w}, {"b", m.b}});
        return j;
    }

  private:
    Scaler scaler_;
    std::vector<BinaryLogistic> ovr_; // one entry for binary, K entries otherwise
    int num_classes_;
};

} // namespace

double logistic_loss_and_grad(const Matrix& x, const std::vector<int>& y,
                              const std::vector<double>& w, double b, double lambda,
                              std::vector<double>& gw, double& gb) {
    const std::size_t n = x.rows, d = x.cols;
    gw.assign(d, 0.0);
    gb = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double z = b;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x(i, j);
        const double p = sigmoid(z);
        // numerically stable cross-entropy: log(1+e^-|z|) + max(z,0) - z*y
        loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - z * y[i];
        const double g = p - y[i];
        gb += g;
        for (std::size_t j = 0; j < d; ++j) gw[j] += g * x(i, j);
    }
    loss /= static_cast<double>(n);
    gb /= static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j)
        gw[j] = gw[j] / static_cast<double>(n) + 2.0 * lambda * w[j];
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    return loss + lambda * reg;
}

std::shared_ptr<const ModelImpl> fit_logistic(const ModelSpec& spec, const Dataset& data) {
    Scaler scaler;
    scaler.fit(data.features);
    const Matrix x = scaler.apply(data.features);

    std::vector<BinaryLogistic> ovr;
    if (data.num_classes == 2) {
        ovr.push_back(train_binary(x, data.labels, spec));
    } else {
        for (int c = 0; c < data.num_classes; ++c) {
            std::vector<int> y(data.labels.size());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.labels[i] == c;
            ovr.push_back(train_binary(x, y, spec));
        }
    }
    return std::make_shared<LogisticModel>(std::move(scaler), std::move(ovr), data.num_classes);
}

std::shared_ptr<const ModelImpl> load_logistic(const nlohmann::json& j) {
    std::vector<BinaryLogistic> ovr;
    for (const auto& e : j.at("ovr"))
        ovr.push_back({e.at("w").get<std::vector<double>>(), e.at("b").get<double>()});
    return std::make_shared<LogisticModel>(Scaler::from_json(j.at("scaler")), std::move(ovr),
                                           j.at("num_classes").get<int>());
}

} // namespace fundusml::ml
