#include "stratify/classifiers/hyperparameters.hpp"

#include "stratify/core/error.hpp"

namespace stratify::classifiers {
namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError("hyperparameters: " + what);
}

}  // namespace

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> a = {Algorithm::LR,  Algorithm::DT,  Algorithm::RF, Algorithm::KNN,
                                             Algorithm::MLP, Algorithm::SVC, Algorithm::GBT};
    return a;
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::LR: return "LR";
        case Algorithm::DT: return "DT";
        case Algorithm::RF: return "RF";
        case Algorithm::KNN: return "KNN";
        case Algorithm::MLP: return "MLP";
        case Algorithm::SVC: return "SVC";
        case Algorithm::GBT: return "GBT";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    for (auto a : all_algorithms())
        if (algorithm_name(a) == name) return a;
    throw InputError("unknown algorithm '" + name + "'");
}

void HyperparameterSet::validate() const {
    switch (algorithm) {
        case Algorithm::LR:
            require(lr.C > 0 && lr.tol > 0 && lr.learning_rate > 0 && lr.max_iter >= 1, "LR values must be positive");
            break;
        case Algorithm::DT:
            require(dt.min_samples_split >= 2 && dt.min_samples_leaf >= 1, "DT sample counts too small");
            break;
        case Algorithm::RF:
            require(rf.n_estimators >= 1 && rf.min_samples_split >= 2 && rf.min_samples_leaf >= 1,
                    "RF counts must be at least 1");
            break;
        case Algorithm::KNN:
            require(knn.n_neighbors >= 1 && knn.leaf_size >= 1, "KNN counts must be at least 1");
            break;
        case Algorithm::MLP:
            require(mlp.hidden >= 1 && mlp.batch_size >= 1 && mlp.max_epochs >= 1 && mlp.alpha >= 0 &&
                        mlp.learning_rate > 0 && mlp.momentum >= 0 && mlp.momentum < 1,
                    "MLP values out of range");
            require(mlp.activation == "tanh" || mlp.activation == "relu" || mlp.activation == "logistic",
                    "unknown MLP activation '" + mlp.activation + "'");
            break;
        case Algorithm::SVC:
            require(svc.C > 0 && svc.tol > 0 && svc.gamma >= 0 && svc.max_train_samples >= 2 && svc.max_passes >= 1,
                    "SVC values out of range");
            require(svc.kernel == "rbf" || svc.kernel == "linear", "unknown SVC kernel '" + svc.kernel + "'");
            break;
        case Algorithm::GBT:
            require(gbt.max_depth >= 1 && gbt.n_estimators >= 1 && gbt.max_iterations >= 1 && gbt.learning_rate > 0 &&
                        gbt.lambda >= 0 && gbt.gamma >= 0 && gbt.min_child_weight >= 0,
                    "GBT values out of range");
            break;
    }
}

nlohmann::json HyperparameterSet::to_json() const {
    nlohmann::json j;
    j["algorithm"] = algorithm_name(algorithm);
    j["seed"] = seed;
    switch (algorithm) {
        case Algorithm::LR:
            j["C"] = lr.C;
            j["tol"] = lr.tol;
            j["learning_rate"] = lr.learning_rate;
            j["max_iter"] = lr.max_iter;
            break;
        case Algorithm::DT:
            j["min_samples_split"] = dt.min_samples_split;
            j["min_samples_leaf"] = dt.min_samples_leaf;
            j["max_depth"] = dt.max_depth;
            break;
        case Algorithm::RF:
            j["n_estimators"] = rf.n_estimators;
            j["max_depth"] = rf.max_depth;
            j["min_samples_split"] = rf.min_samples_split;
            j["min_samples_leaf"] = rf.min_samples_leaf;
            j["bootstrap"] = rf.bootstrap;
            j["max_features"] = rf.max_features;
            break;
        case Algorithm::KNN:
            j["n_neighbors"] = knn.n_neighbors;
            j["leaf_size"] = knn.leaf_size;
            break;
        case Algorithm::MLP:
            j["activation"] = mlp.activation;
            j["alpha"] = mlp.alpha;
            j["hidden"] = mlp.hidden;
            j["learning_rate"] = mlp.learning_rate;
            j["momentum"] = mlp.momentum;
            j["batch_size"] = mlp.batch_size;
            j["max_epochs"] = mlp.max_epochs;
            j["tol"] = mlp.tol;
            j["n_iter_no_change"] = mlp.n_iter_no_change;
            break;
        case Algorithm::SVC:
            j["C"] = svc.C;
            j["kernel"] = svc.kernel;
            j["gamma"] = svc.gamma;
            j["tol"] = svc.tol;
            j["max_passes"] = svc.max_passes;
            j["max_train_samples"] = svc.max_train_samples;
            break;
        case Algorithm::GBT:
            j["max_depth"] = gbt.max_depth;
            j["n_estimators"] = gbt.n_estimators;
            j["max_iterations"] = gbt.max_iterations;
            j["learning_rate"] = gbt.learning_rate;
            j["lambda"] = gbt.lambda;
            j["gamma"] = gbt.gamma;
            j["min_child_weight"] = gbt.min_child_weight;
            break;
    }
    return j;
}

HyperparameterSet HyperparameterSet::from_json(const nlohmann::json& j, HyperparameterSet h) {
    if (j.contains("algorithm")) h.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    read(j, "seed", h.seed);
    try {
        switch (h.algorithm) {
            case Algorithm::LR:
                read(j, "C", h.lr.C);
                read(j, "tol", h.lr.tol);
                read(j, "learning_rate", h.lr.learning_rate);
                read(j, "max_iter", h.lr.max_iter);
                break;
            case Algorithm::DT:
                read(j, "min_samples_split", h.dt.min_samples_split);
                read(j, "min_samples_leaf", h.dt.min_samples_leaf);
                read(j, "max_depth", h.dt.max_depth);
                break;
            case Algorithm::RF:
                read(j, "n_estimators", h.rf.n_estimators);
                read(j, "max_depth", h.rf.max_depth);
                read(j, "min_samples_split", h.rf.min_samples_split);
                read(j, "min_samples_leaf", h.rf.min_samples_leaf);
                read(j, "bootstrap", h.rf.bootstrap);
                read(j, "max_features", h.rf.max_features);
                break;
            case Algorithm::KNN:
                read(j, "n_neighbors", h.knn.n_neighbors);
                read(j, "leaf_size", h.knn.leaf_size);
                break;
            case Algorithm::MLP:
                read(j, "activation", h.mlp.activation);
                read(j, "alpha", h.mlp.alpha);
                read(j, "hidden", h.mlp.hidden);
                read(j, "learning_rate", h.mlp.learning_rate);
                read(j, "momentum", h.mlp.momentum);
                read(j, "batch_size", h.mlp.batch_size);
                read(j, "max_epochs", h.mlp.max_epochs);
                read(j, "tol", h.mlp.tol);
                read(j, "n_iter_no_change", h.mlp.n_iter_no_change);
                break;
            case Algorithm::SVC:
                read(j, "C", h.svc.C);
                read(j, "kernel", h.svc.kernel);
                read(j, "gamma", h.svc.gamma);
                read(j, "tol", h.svc.tol);
                read(j, "max_passes", h.svc.max_passes);
                read(j, "max_train_samples", h.svc.max_train_samples);
                break;
            case Algorithm::GBT:
                read(j, "max_depth", h.gbt.max_depth);
                read(j, "n_estimators", h.gbt.n_estimators);
                read(j, "max_iterations", h.gbt.max_iterations);
                read(j, "learning_rate", h.gbt.learning_rate);
                read(j, "lambda", h.gbt.lambda);
                read(j, "gamma", h.gbt.gamma);
                read(j, "min_child_weight", h.gbt.min_child_weight);
                break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("hyperparameters for " + algorithm_name(h.algorithm) + ": " + e.what());
    }
    h.validate();
    return h;
}

HyperparameterSet reference_hyperparameters(Algorithm a, TableColumn column) {
    const int c = static_cast<int>(column);
    auto pick = [c](auto low, auto motivated, auto direct) { return c == 0 ? low : c == 1 ? motivated : direct; };
    HyperparameterSet h;
    h.algorithm = a;
    h.lr.C = pick(10.0, 0.1, 10.0);
    h.lr.tol = 0.002;
    h.dt.min_samples_split = 2;
    h.dt.min_samples_leaf = pick(2, 3, 1);
    h.rf.n_estimators = pick(2, 200, 2);
    h.rf.max_depth = pick(2, 7, 2);
    h.rf.min_samples_leaf = pick(13, 12, 13);
    h.knn.n_neighbors = pick(3, 20, 2);
    h.knn.leaf_size = pick(2, 3, 3);
    h.mlp.activation = "tanh";
    h.mlp.alpha = pick(0.1, 0.01, 0.1);
    h.mlp.hidden = 50;
    h.svc.C = 5.0;
    h.svc.kernel = "rbf";
    h.gbt.max_depth = pick(5, 7, 5);
    h.gbt.n_estimators = pick(100, 60, 20);
    h.gbt.max_iterations = 50;
    return h;
}

}  // namespace stratify::classifiers
