#include "seqml/estimators.hpp"

#include "seqml/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace seqml {

namespace {

void check_hyperparameters(double gamma, double lambda) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw Error(Errc::InvalidParameter, "gamma must be > 0, got " + std::to_string(gamma));
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(Errc::InvalidParameter, "lambda must be > 0, got " + std::to_string(lambda));
    }
}

void check_training_set(const RowMatrix& features, const Vector& targets) {
    if (features.rows() < 1) throw Error(Errc::Empty, "estimator needs at least one training row");
    if (features.rows() != targets.size()) {
        throw Error(Errc::LengthMismatch, "feature rows (" + std::to_string(features.rows()) + ") != targets (" +
                                              std::to_string(targets.size()) + ")");
    }
}

void check_columns(Eigen::Index expected, const RowMatrix& features) {
    if (features.cols() != expected) {
        throw Error(Errc::DimensionMismatch, "model expects " + std::to_string(expected) + " features, got " +
                                                 std::to_string(features.cols()));
    }
}

std::vector<Label> sorted_classes(const Vector& labels) {
    std::set<Label> seen;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        const double v = labels[i];
        if (!(std::floor(v) == v) || v < 0) {
            throw Error(Errc::InvalidParameter, "class labels must be non-negative integers");
        }
        seen.insert(static_cast<Label>(v));
    }
    return {seen.begin(), seen.end()};
}

Eigen::Index class_column(const std::vector<Label>& classes, double label) {
    return std::lower_bound(classes.begin(), classes.end(), static_cast<Label>(label)) - classes.begin();
}

/// rhs - system * x with long double accumulation.
Eigen::MatrixXd residual(const Eigen::MatrixXd& system, const Eigen::MatrixXd& x, const Eigen::MatrixXd& rhs) {
    Eigen::MatrixXd r(rhs.rows(), rhs.cols());
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        for (Eigen::Index i = 0; i < rhs.rows(); ++i) {
            long double acc = rhs(i, c);
            for (Eigen::Index j = 0; j < system.cols(); ++j) {
                acc -= static_cast<long double>(system(i, j)) * static_cast<long double>(x(j, c));
            }
            r(i, c) = static_cast<double>(acc);
        }
    }
    return r;
}

/// Solves (K + lambda I) X = rhs by Cholesky plus iterative refinement.
/// Small lambda makes the system badly conditioned, so residuals are
/// accumulated in extended precision.
Eigen::MatrixXd solve_regularized(const RowMatrix& support, double gamma, double lambda, const Eigen::MatrixXd& rhs) {
    constexpr int kMaxRefinements = 4;
    Eigen::MatrixXd system = rbf_kernel(support, support, gamma);
    system.diagonal().array() += lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw Error(Errc::SingularSystem, "kernel system is not positive definite; increase lambda");
    }
    Eigen::MatrixXd solution = llt.solve(rhs);
    Eigen::MatrixXd r = residual(system, solution, rhs);
    double norm = r.cwiseAbs().maxCoeff();
    for (int it = 0; it < kMaxRefinements && norm > 0.0; ++it) {
        const Eigen::MatrixXd candidate = solution + llt.solve(r);
        Eigen::MatrixXd next = residual(system, candidate, rhs);
        const double next_norm = next.cwiseAbs().maxCoeff();
        if (!(next_norm < norm)) break;
        solution = candidate;
        r = std::move(next);
        norm = next_norm;
    }
    if (!solution.allFinite()) throw Error(Errc::SingularSystem, "kernel solve produced non-finite weights");
    return solution;
}

Eigen::Index argmax_lowest(const Eigen::MatrixXd& scores, Eigen::Index row) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k) {
        if (scores(row, k) > scores(row, best)) best = k;
    }
    return best;
}

}  // namespace

Eigen::MatrixXd rbf_kernel(const RowMatrix& a, const RowMatrix& b, double gamma) {
    if (a.cols() != b.cols()) {
        throw Error(Errc::DimensionMismatch, "rbf kernel operands have " + std::to_string(a.cols()) + " and " +
                                                 std::to_string(b.cols()) + " columns");
    }
    if (!(gamma > 0.0)) throw Error(Errc::InvalidParameter, "gamma must be > 0");
    Eigen::MatrixXd out(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            out(i, j) = std::exp(-gamma * (a.row(i) - b.row(j)).squaredNorm());
        }
    }
    return out;
}

KernelRidgeModel krc_fit(const RowMatrix& features, const Vector& labels, double gamma, double lambda) {
    check_hyperparameters(gamma, lambda);
    check_training_set(features, labels);
    KernelRidgeModel model;
    model.classes = sorted_classes(labels);
    model.gamma = gamma;
    model.lambda = lambda;
    model.support = features;

    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(features.rows(), static_cast<Eigen::Index>(model.classes.size()));
    for (Eigen::Index i = 0; i < labels.size(); ++i) onehot(i, class_column(model.classes, labels[i])) = 1.0;
    model.dual_weights = solve_regularized(features, gamma, lambda, onehot);
    return model;
}

Vector krc_predict(const KernelRidgeModel& model, const RowMatrix& features) {
    check_columns(model.support.cols(), features);
    const Eigen::MatrixXd scores = rbf_kernel(features, model.support, model.gamma) * model.dual_weights;
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out[i] = static_cast<double>(model.classes[static_cast<std::size_t>(argmax_lowest(scores, i))]);
    }
    return out;
}

KernelRidgeRegressorModel krr_fit(const RowMatrix& features, const Vector& targets, double gamma, double lambda) {
    check_hyperparameters(gamma, lambda);
    check_training_set(features, targets);
    KernelRidgeRegressorModel model;
    model.gamma = gamma;
    model.lambda = lambda;
    model.support = features;
    model.dual_weights = solve_regularized(features, gamma, lambda, targets).col(0);
    return model;
}

Vector krr_predict(const KernelRidgeRegressorModel& model, const RowMatrix& features) {
    check_columns(model.support.cols(), features);
    return rbf_kernel(features, model.support, model.gamma) * model.dual_weights;
}

CentroidModel nearest_centroid_fit(const RowMatrix& features, const Vector& labels) {
    check_training_set(features, labels);
    CentroidModel model;
    model.classes = sorted_classes(labels);
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    model.centroids = RowMatrix::Zero(k, features.cols());
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const Eigen::Index c = class_column(model.classes, labels[i]);
        model.centroids.row(c) += features.row(i);
        counts[c] += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) model.centroids.row(c) /= counts[c];
    return model;
}

Vector nearest_centroid_predict(const CentroidModel& model, const RowMatrix& features) {
    check_columns(model.centroids.cols(), features);
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        Eigen::Index best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < model.centroids.rows(); ++c) {
            const double dist = (features.row(i) - model.centroids.row(c)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = c;
            }
        }
        out[i] = static_cast<double>(model.classes[static_cast<std::size_t>(best)]);
    }
    return out;
}

OneNNModel one_nn_fit(const RowMatrix& features, const Vector& targets) {
    check_training_set(features, targets);
    return {features, targets};
}

Vector one_nn_predict(const OneNNModel& model, const RowMatrix& features) {
    check_columns(model.rows.cols(), features);
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        Eigen::Index best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < model.rows.rows(); ++r) {
            const double dist = (features.row(i) - model.rows.row(r)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = r;
            }
        }
        out[i] = model.targets[best];
    }
    return out;
}

namespace {

void check_metric_inputs(const Vector& truth, const Vector& predicted) {
    if (truth.size() != predicted.size()) {
        throw Error(Errc::LengthMismatch, "metric inputs differ in length: " + std::to_string(truth.size()) + " vs " +
                                              std::to_string(predicted.size()));
    }
    if (truth.size() == 0) throw Error(Errc::Empty, "metric inputs are empty");
}

}  // namespace

double accuracy(const Vector& truth, const Vector& predicted) {
    check_metric_inputs(truth, predicted);
    return static_cast<double>((truth.array() == predicted.array()).count()) / static_cast<double>(truth.size());
}

double rmse(const Vector& truth, const Vector& predicted) {
    check_metric_inputs(truth, predicted);
    return std::sqrt((truth - predicted).squaredNorm() / static_cast<double>(truth.size()));
}

std::map<Label, ClassMetrics> per_class_metrics(const Vector& truth, const Vector& predicted) {
    check_metric_inputs(truth, predicted);
    std::map<Label, std::size_t> tp, true_count, predicted_count;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<Label>(truth[i]);
        const auto p = static_cast<Label>(predicted[i]);
        ++true_count[t];
        ++predicted_count[p];
        if (t == p) ++tp[t];
    }
    std::map<Label, ClassMetrics> out;
    auto fill = [&](Label label) {
        ClassMetrics m;
        m.support = true_count[label];
        const double hits = static_cast<double>(tp[label]);
        m.precision = predicted_count[label] ? hits / static_cast<double>(predicted_count[label]) : 0.0;
        m.recall = m.support ? hits / static_cast<double>(m.support) : 0.0;
        out[label] = m;
    };
    for (const auto& [label, _] : true_count) fill(label);
    for (const auto& [label, _] : predicted_count) {
        if (!out.contains(label)) fill(label);
    }
    return out;
}

}  // namespace seqml
