#include "autopv/mlp.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "autopv/errors.hpp"
#include "autopv/rng.hpp"

namespace autopv {

namespace {

constexpr double kLearningRate = 1e-3;
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr int kMaxEpochs = 300;
constexpr std::size_t kBatchSize = 256;
constexpr double kMinDelta = 1e-5;
constexpr int kPatience = 20;

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

MatrixXd apply_activation(const MatrixXd& s, MlpActivation act) {
    switch (act) {
        case MlpActivation::Logistic:
            return (1.0 / (1.0 + (-s.array()).exp())).matrix();
        case MlpActivation::Tanh:
            return s.array().tanh().matrix();
        case MlpActivation::Relu:
            return s.cwiseMax(0.0);
    }
    throw ConfigError("unknown activation");
}

// derivative expressed through the activation value
MatrixXd activation_slope(const MatrixXd& a, MlpActivation act) {
    switch (act) {
        case MlpActivation::Logistic:
            return (a.array() * (1.0 - a.array())).matrix();
        case MlpActivation::Tanh:
            return (1.0 - a.array().square()).matrix();
        case MlpActivation::Relu:
            return (a.array() > 0.0).cast<double>().matrix();
    }
    throw ConfigError("unknown activation");
}

}  // namespace

/// Training-time state: Eigen copies of the layers plus Adam moments.
struct MlpTrainer {
    const MlpRegressor& net;
    std::vector<MatrixXd> w;   // copies worked on during training
    std::vector<VectorXd> b;
    std::vector<MatrixXd> mw, vw;
    std::vector<VectorXd> mb, vb;
    std::vector<MatrixXd> gw;
    std::vector<VectorXd> gb;
    long step = 0;

    explicit MlpTrainer(const MlpRegressor& n) : net(n) {
        for (const auto& layer : n.layers_) {
            const auto rows = static_cast<Eigen::Index>(layer.w.rows);
            const auto cols = static_cast<Eigen::Index>(layer.w.cols);
            w.emplace_back(RowMajorMap(layer.w.data.data(), rows, cols));
            b.emplace_back(Eigen::Map<const VectorXd>(layer.b.data(), rows));
            mw.emplace_back(MatrixXd::Zero(rows, cols));
            vw.emplace_back(MatrixXd::Zero(rows, cols));
            mb.emplace_back(VectorXd::Zero(rows));
            vb.emplace_back(VectorXd::Zero(rows));
            gw.emplace_back(MatrixXd::Zero(rows, cols));
            gb.emplace_back(VectorXd::Zero(rows));
        }
    }

    MatrixXd forward(const MatrixXd& x, std::vector<MatrixXd>* acts) const {
        MatrixXd a = x;
        if (acts) acts->push_back(a);
        for (std::size_t l = 0; l < w.size(); ++l) {
            MatrixXd s = (a * w[l].transpose()).rowwise() + b[l].transpose();
            a = l + 1 < w.size() ? apply_activation(s, net.spec_.activation) : std::move(s);
            if (acts) acts->push_back(a);
        }
        return a;
    }

    // accumulates gradients of mean squared error over the batch into gw/gb
    double backward(const MatrixXd& x, const VectorXd& y) {
        std::vector<MatrixXd> acts;
        acts.reserve(w.size() + 1);
        const MatrixXd out = forward(x, &acts);
        const auto batch = static_cast<double>(x.rows());
        const VectorXd err = out.col(0) - y;
        const double loss = err.squaredNorm() / batch;

        MatrixXd ds = (2.0 / batch) * err;
        for (std::size_t l = w.size(); l-- > 0;) {
            gw[l].noalias() = ds.transpose() * acts[l];
            gb[l] = ds.colwise().sum().transpose();
            if (l > 0) {
                MatrixXd da = ds * w[l];
                ds = da.cwiseProduct(activation_slope(acts[l], net.spec_.activation));
            }
        }
        return loss;
    }

    void adam_update() {
        ++step;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (std::size_t l = 0; l < w.size(); ++l) {
            mw[l] = kBeta1 * mw[l] + (1.0 - kBeta1) * gw[l];
            vw[l] = kBeta2 * vw[l] + (1.0 - kBeta2) * gw[l].cwiseProduct(gw[l]);
            w[l].array() -= kLearningRate * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + kAdamEps);
            mb[l] = kBeta1 * mb[l] + (1.0 - kBeta1) * gb[l];
            vb[l] = kBeta2 * vb[l] + (1.0 - kBeta2) * gb[l].cwiseProduct(gb[l]);
            b[l].array() -= kLearningRate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + kAdamEps);
        }
    }

    void store_into(MlpRegressor& target) const {
        for (std::size_t l = 0; l < w.size(); ++l) {
            auto& layer = target.layers_[l];
            for (std::size_t r = 0; r < layer.w.rows; ++r) {
                for (std::size_t c = 0; c < layer.w.cols; ++c) {
                    layer.w.at(r, c) = w[l](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                }
            }
            for (std::size_t r = 0; r < layer.b.size(); ++r) layer.b[r] = b[l](static_cast<Eigen::Index>(r));
        }
    }
};

namespace {

MatrixXd to_eigen(const Matrix& m) {
    return RowMajorMap(m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
}

}  // namespace

std::unique_ptr<MlpRegressor> MlpRegressor::fit(const EstimatorSpec& spec, const Matrix& X,
                                                std::span<const double> y) {
    auto model = std::make_unique<MlpRegressor>();
    model->spec_ = spec;
    model->stats_ = compute_stats(X);

    std::vector<std::size_t> dims{FeatureMatrix::kColumns};
    for (const int h : spec.hidden_layer_sizes) dims.push_back(static_cast<std::size_t>(h));
    dims.push_back(1);

    Rng rng(spec.seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.w = Matrix(dims[l + 1], dims[l]);
        layer.b.assign(dims[l + 1], 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        for (double& v : layer.w.data) v = rng.uniform(-limit, limit);
        model->layers_.push_back(std::move(layer));
    }

    const Matrix Zm = apply_stats(X, model->stats_);
    const MatrixXd Z = to_eigen(Zm);
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));

    const auto n = static_cast<std::size_t>(Z.rows());
    const std::size_t val_n = std::max<std::size_t>(1, n / 10);
    const std::size_t train_n = n - val_n;
    const MatrixXd Zval = Z.bottomRows(static_cast<Eigen::Index>(val_n));
    const VectorXd yval = yv.tail(static_cast<Eigen::Index>(val_n));

    MlpTrainer trainer(*model);
    std::vector<std::size_t> perm(train_n);
    for (std::size_t i = 0; i < train_n; ++i) perm[i] = i;

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<MatrixXd> best_w = trainer.w;
    std::vector<VectorXd> best_b = trainer.b;
    int patience = 0;
    int epochs = 0;

    MatrixXd xb;
    VectorXd yb;
    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
        ++epochs;
        for (std::size_t i = train_n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(perm[i - 1], perm[j]);
        }
        for (std::size_t start = 0; start < train_n; start += kBatchSize) {
            const std::size_t count = std::min(kBatchSize, train_n - start);
            xb.resize(static_cast<Eigen::Index>(count), Z.cols());
            yb.resize(static_cast<Eigen::Index>(count));
            for (std::size_t i = 0; i < count; ++i) {
                const auto src = static_cast<Eigen::Index>(perm[start + i]);
                xb.row(static_cast<Eigen::Index>(i)) = Z.row(src);
                yb(static_cast<Eigen::Index>(i)) = yv(src);
            }
            trainer.backward(xb, yb);
            trainer.adam_update();
        }
        const MatrixXd val_out = trainer.forward(Zval, nullptr);
        const double val_loss =
            (val_out.col(0) - yval).squaredNorm() / static_cast<double>(val_n);
        if (val_loss < best_val - kMinDelta) {
            best_val = val_loss;
            best_w = trainer.w;
            best_b = trainer.b;
            patience = 0;
        } else if (++patience >= kPatience) {
            break;
        }
    }

    trainer.w = std::move(best_w);
    trainer.b = std::move(best_b);
    trainer.store_into(*model);

    model->info_.iterations = epochs;
    model->info_.final_training_loss = model->loss(X, y);
    return model;
}

std::vector<double> MlpRegressor::predict(const Matrix& X) const {
    if (X.cols != FeatureMatrix::kColumns) {
        throw ShapeError("net expects " + std::to_string(FeatureMatrix::kColumns) + " columns, got " +
                         std::to_string(X.cols));
    }
    const Matrix Zm = apply_stats(X, stats_);
    const MlpTrainer view(*this);
    const MatrixXd out = view.forward(to_eigen(Zm), nullptr);
    return {out.col(0).data(), out.col(0).data() + out.rows()};
}

double MlpRegressor::loss(const Matrix& X, std::span<const double> y) const {
    if (X.rows != y.size()) throw ShapeError("loss target length does not match rows");
    const Matrix Zm = apply_stats(X, stats_);
    const MlpTrainer view(*this);
    const MatrixXd out = view.forward(to_eigen(Zm), nullptr);
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    return (out.col(0) - yv).squaredNorm() / static_cast<double>(X.rows);
}

std::vector<double> MlpRegressor::loss_gradient(const Matrix& X, std::span<const double> y) const {
    if (X.rows != y.size()) throw ShapeError("loss target length does not match rows");
    const Matrix Zm = apply_stats(X, stats_);
    MlpTrainer view(*this);
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    view.backward(to_eigen(Zm), yv);
    std::vector<double> flat;
    for (std::size_t l = 0; l < view.gw.size(); ++l) {
        for (Eigen::Index r = 0; r < view.gw[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < view.gw[l].cols(); ++c) flat.push_back(view.gw[l](r, c));
        }
        for (Eigen::Index r = 0; r < view.gb[l].size(); ++r) flat.push_back(view.gb[l](r));
    }
    return flat;
}

std::vector<double> MlpRegressor::parameters() const {
    std::vector<double> flat;
    for (const Layer& layer : layers_) {
        flat.insert(flat.end(), layer.w.data.begin(), layer.w.data.end());
        flat.insert(flat.end(), layer.b.begin(), layer.b.end());
    }
    return flat;
}

void MlpRegressor::set_parameters(std::span<const double> theta) {
    std::size_t pos = 0;
    for (Layer& layer : layers_) {
        if (pos + layer.w.data.size() + layer.b.size() > theta.size()) {
            throw ShapeError("parameter vector too short for net");
        }
        std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(pos), layer.w.data.size(),
                    layer.w.data.begin());
        pos += layer.w.data.size();
        std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(pos), layer.b.size(), layer.b.begin());
        pos += layer.b.size();
    }
    if (pos != theta.size()) throw ShapeError("parameter vector too long for net");
}

nlohmann::json MlpRegressor::params_to_json() const {
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& layer : layers_) {
        layers.push_back({
            {"rows", layer.w.rows},
            {"cols", layer.w.cols},
            {"w", layer.w.data},
            {"b", layer.b},
        });
    }
    return {
        {"mean", stats_.mean},
        {"std", stats_.std},
        {"layers", std::move(layers)},
    };
}

std::unique_ptr<MlpRegressor> MlpRegressor::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<MlpRegressor>();
    model->spec_ = EstimatorSpec::from_json(j.at("spec"));
    model->info_.iterations = j.at("info").at("iterations").get<int>();
    model->info_.final_training_loss = j.at("info").at("final_training_loss").get<double>();
    const auto& p = j.at("params");
    for (std::size_t c = 0; c < FeatureMatrix::kColumns; ++c) {
        model->stats_.mean[c] = p.at("mean").at(c).get<double>();
        model->stats_.std[c] = p.at("std").at(c).get<double>();
    }
    for (const auto& e : p.at("layers")) {
        Layer layer;
        layer.w = Matrix(e.at("rows").get<std::size_t>(), e.at("cols").get<std::size_t>());
        layer.w.data = e.at("w").get<std::vector<double>>();
        if (layer.w.data.size() != layer.w.rows * layer.w.cols) throw IoError("net layer size mismatch");
        layer.b = e.at("b").get<std::vector<double>>();
        if (layer.b.size() != layer.w.rows) throw IoError("net bias size mismatch");
        model->layers_.push_back(std::move(layer));
    }
    if (model->layers_.empty()) throw IoError("net has no layers");
    return model;
}

}  // namespace autopv
