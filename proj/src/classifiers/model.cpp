#include "stratify/classifiers/model.hpp"

#include <algorithm>
#include <cmath>

#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"

namespace stratify::classifiers {
namespace {

void check_inputs(const Matrix& X, const Labels& y) {
    if (X.rows() != y.size()) throw InputError("fit: label count does not match rows");
    if (X.rows() < 1) throw InputError("fit: no training rows");
    for (double v : X.values())
        if (!std::isfinite(v)) throw InputError("fit: non-finite feature value");
    for (int v : y)
        if (v != 0 && v != 1) throw InputError("fit: labels must be 0 or 1");
}

bool both_classes(const Labels& y) {
    bool seen[2] = {false, false};
    for (int v : y) seen[v] = true;
    return seen[0] && seen[1];
}

nlohmann::json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from(const nlohmann::json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), j.at("data").get<std::vector<double>>());
}

nlohmann::json trees_json(const std::vector<Tree>& trees) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : trees) a.push_back(t.to_json());
    return a;
}

std::vector<Tree> trees_from(const nlohmann::json& j) {
    std::vector<Tree> out;
    for (const auto& t : j) out.push_back(Tree::from_json(t));
    return out;
}

}  // namespace

TrainedModel fit(const Matrix& X, const Labels& y, const HyperparameterSet& h) {
    h.validate();
    check_inputs(X, y);
    TrainedModel m;
    m.hyperparameters = h;
    m.n_features = X.cols();
    m.info.train_rows = X.rows();
    const Algorithm a = h.algorithm;
    const bool tolerant = a == Algorithm::DT || a == Algorithm::KNN;
    if (!tolerant && (X.rows() < 2 || !both_classes(y)))
        throw DegenerateError(algorithm_name(a) + " needs at least two rows with both classes present");
    switch (a) {
        case Algorithm::LR:
            m.parameters = fit_logistic(X, y, h.lr, m.info);
            break;
        case Algorithm::DT:
            m.parameters = fit_tree(X, y, h.dt);
            break;
        case Algorithm::RF:
            m.parameters = fit_forest(X, y, h.rf, h.seed);
            break;
        case Algorithm::KNN:
            m.parameters = KnnModel{X, y, h.knn.n_neighbors};
            m.info.notice = "neighbours found by exhaustive search; leaf_size has no effect";
            break;
        case Algorithm::MLP:
            m.parameters = fit_mlp(X, y, h.mlp, h.seed, m.info);
            break;
        case Algorithm::SVC:
            m.parameters = fit_svc(X, y, h.svc, h.seed, m.info);
            break;
        case Algorithm::GBT:
            m.parameters = fit_gbt(X, y, h.gbt, m.info);
            break;
    }
    return m;
}

double predict_score(const TrainedModel& model, std::span<const double> x) {
    if (x.size() != model.n_features) throw InputError("predict: feature dimension does not match the model");
    double s = std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TreeModel>) return p.tree.predict(x);
            else if constexpr (std::is_same_v<T, SvcModel>) return sigmoid(p.decision(x));
            else if constexpr (std::is_same_v<T, GbtModel>) return sigmoid(p.margin(x));
            else return score(p, x);
        },
        model.parameters);
    return std::clamp(s, 0.0, 1.0);
}

std::vector<double> predict_scores(const TrainedModel& model, const Matrix& X) {
    if (X.cols() != model.n_features) throw InputError("predict: feature dimension does not match the model");
    std::vector<double> out(X.rows());
    constexpr std::size_t chunk = 256;
    parallel_for((X.rows() + chunk - 1) / chunk, [&](std::size_t c) {
        std::size_t hi = std::min(X.rows(), (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < hi; ++i) out[i] = predict_score(model, X.row(i));
    });
    return out;
}

Labels predict_labels(std::span<const double> scores, double threshold) {
    Labels out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > threshold ? 1 : 0;
    return out;
}

std::optional<TreeEnsemble> as_tree_ensemble(const TrainedModel& model) {
    TreeEnsemble e;
    e.n_features = model.n_features;
    if (const auto* t = std::get_if<TreeModel>(&model.parameters)) {
        e.trees = {t->tree};
        return e;
    }
    if (const auto* f = std::get_if<ForestModel>(&model.parameters)) {
        e.trees = f->trees;
        e.scale = 1.0 / static_cast<double>(f->trees.size());
        return e;
    }
    if (const auto* g = std::get_if<GbtModel>(&model.parameters)) {
        e.trees = g->trees;
        e.base = g->base_margin;
        return e;
    }
    return std::nullopt;
}

nlohmann::json to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["algorithm"] = algorithm_name(model.algorithm());
    j["hyperparameters"] = model.hyperparameters.to_json();
    j["n_features"] = model.n_features;
    j["training"] = {{"iterations", model.info.iterations},
                     {"loss_history", model.info.loss_history},
                     {"train_rows", model.info.train_rows},
                     {"notice", model.info.notice}};
    nlohmann::json p;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogisticModel>) {
                p = {{"w", m.w}, {"b", m.b}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                p = {{"tree", m.tree.to_json()}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                p = {{"trees", trees_json(m.trees)}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                p = {{"X", matrix_json(m.X)}, {"y", m.y}, {"k", m.k}};
            } else if constexpr (std::is_same_v<T, MlpModel>) {
                p = {{"activation", m.activation}, {"inputs", m.inputs}, {"hidden", m.hidden},
                     {"W1", m.W1}, {"b1", m.b1}, {"W2", m.W2}, {"b2", m.b2}};
            } else if constexpr (std::is_same_v<T, SvcModel>) {
                p = {{"kernel", m.kernel}, {"gamma", m.gamma}, {"support", matrix_json(m.support)},
                     {"coef", m.coef}, {"b", m.b}};
            } else {
                p = {{"base_margin", m.base_margin}, {"trees", trees_json(m.trees)}};
            }
        },
        model.parameters);
    j["parameters"] = p;
    return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion) throw InputError("unsupported model format version");
        TrainedModel m;
        HyperparameterSet base;
        base.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
        m.hyperparameters = HyperparameterSet::from_json(j.at("hyperparameters"), base);
        m.n_features = j.at("n_features").get<std::size_t>();
        const auto& t = j.at("training");
        m.info.iterations = t.at("iterations").get<std::size_t>();
        m.info.loss_history = t.at("loss_history").get<std::vector<double>>();
        m.info.train_rows = t.at("train_rows").get<std::size_t>();
        m.info.notice = t.at("notice").get<std::string>();
        const auto& p = j.at("parameters");
        switch (m.algorithm()) {
            case Algorithm::LR:
                m.parameters = LogisticModel{p.at("w").get<std::vector<double>>(), p.at("b").get<double>()};
                break;
            case Algorithm::DT:
                m.parameters = TreeModel{Tree::from_json(p.at("tree"))};
                break;
            case Algorithm::RF:
                m.parameters = ForestModel{trees_from(p.at("trees"))};
                break;
            case Algorithm::KNN:
                m.parameters = KnnModel{matrix_from(p.at("X")), p.at("y").get<Labels>(), p.at("k").get<std::size_t>()};
                break;
            case Algorithm::MLP: {
                MlpModel mm;
                mm.activation = p.at("activation").get<std::string>();
                mm.inputs = p.at("inputs").get<std::size_t>();
                mm.hidden = p.at("hidden").get<std::size_t>();
                mm.W1 = p.at("W1").get<std::vector<double>>();
                mm.b1 = p.at("b1").get<std::vector<double>>();
                mm.W2 = p.at("W2").get<std::vector<double>>();
                mm.b2 = p.at("b2").get<double>();
                m.parameters = std::move(mm);
                break;
            }
            case Algorithm::SVC: {
                SvcModel s;
                s.kernel = p.at("kernel").get<std::string>();
                s.gamma = p.at("gamma").get<double>();
                s.support = matrix_from(p.at("support"));
                s.coef = p.at("coef").get<std::vector<double>>();
                s.b = p.at("b").get<double>();
                m.parameters = std::move(s);
                break;
            }
            case Algorithm::GBT:
                m.parameters = GbtModel{p.at("base_margin").get<double>(), trees_from(p.at("trees"))};
                break;
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("model document: ") + e.what());
    }
}

}  // namespace stratify::classifiers
