#include <algorithm>
#include <cmath>

#include "stratify/core/error.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::dataset {

nlohmann::json NormalizationParams::to_json() const { return {{"min", min}, {"max", max}}; }

NormalizationParams NormalizationParams::from_json(const nlohmann::json& j) {
    NormalizationParams p;
    p.min = j.at("min").get<std::vector<double>>();
    p.max = j.at("max").get<std::vector<double>>();
    if (p.min.size() != p.max.size()) throw InputError("normalizer: min/max length mismatch");
    for (std::size_t c = 0; c < p.min.size(); ++c)
        if (p.min[c] > p.max[c]) throw InputError("normalizer: min exceeds max");
    return p;
}

NormalizationParams fit_normalizer(const Matrix& train) {
    if (train.rows() == 0) throw InputError("cannot fit a normalizer on an empty matrix");
    NormalizationParams p;
    p.min.assign(train.cols(), 0.0);
    p.max.assign(train.cols(), 0.0);
    for (std::size_t c = 0; c < train.cols(); ++c) {
        p.min[c] = p.max[c] = train(0, c);
        for (std::size_t r = 1; r < train.rows(); ++r) {
            p.min[c] = std::min(p.min[c], train(r, c));
            p.max[c] = std::max(p.max[c], train(r, c));
        }
    }
    return p;
}

Matrix apply_normalizer(const NormalizationParams& params, const Matrix& X) {
    if (X.cols() != params.min.size()) throw InputError("normalizer width does not match data");
    Matrix out(X.rows(), X.cols());
    for (std::size_t c = 0; c < X.cols(); ++c) {
        double range = params.max[c] - params.min[c];
        for (std::size_t r = 0; r < X.rows(); ++r)
            out(r, c) = range > 0.0 ? (X(r, c) - params.min[c]) / range : 0.0;
    }
    return out;
}

nlohmann::json StandardizationParams::to_json() const { return {{"mean", mean}, {"sd", sd}}; }

StandardizationParams fit_standardizer(const Matrix& X) {
    if (X.rows() == 0) throw InputError("cannot fit a standardizer on an empty matrix");
    StandardizationParams p;
    p.mean.assign(X.cols(), 0.0);
    p.sd.assign(X.cols(), 0.0);
    const auto n = static_cast<double>(X.rows());
    for (std::size_t c = 0; c < X.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < X.rows(); ++r) s += X(r, c);
        double m = s / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < X.rows(); ++r) ss += (X(r, c) - m) * (X(r, c) - m);
        p.mean[c] = m;
        p.sd[c] = std::sqrt(ss / n);
    }
    return p;
}

Matrix apply_standardizer(const StandardizationParams& params, const Matrix& X) {
    if (X.cols() != params.mean.size()) throw InputError("standardizer width does not match data");
    Matrix out(X.rows(), X.cols());
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t c = 0; c < X.cols(); ++c)
            out(r, c) = params.sd[c] > 0.0 ? (X(r, c) - params.mean[c]) / params.sd[c] : 0.0;
    return out;
}

}  // namespace stratify::dataset
