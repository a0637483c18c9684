#pragma once

#include "seqml/dataset.hpp"

#include <Eigen/Core>

#include <map>
#include <vector>

namespace seqml {

/// exp(-gamma * ||a_i - b_j||^2) for every row pair.
Eigen::MatrixXd rbf_kernel(const RowMatrix& a, const RowMatrix& b, double gamma);

/// One-vs-rest kernel ridge classifier: solves (K + lambda I) A = Y_onehot.
struct KernelRidgeModel {
    RowMatrix support;
    Eigen::MatrixXd dual_weights;  // n x K
    double gamma = 0.0;
    double lambda = 0.0;
    std::vector<Label> classes;    // sorted; column k of dual_weights is classes[k]
};

KernelRidgeModel krc_fit(const RowMatrix& features, const Vector& labels, double gamma, double lambda);
Vector krc_predict(const KernelRidgeModel& model, const RowMatrix& features);

/// Kernel ridge regression on real targets with the same kernel and solve.
struct KernelRidgeRegressorModel {
    RowMatrix support;
    Vector dual_weights;
    double gamma = 0.0;
    double lambda = 0.0;
};

KernelRidgeRegressorModel krr_fit(const RowMatrix& features, const Vector& targets, double gamma, double lambda);
Vector krr_predict(const KernelRidgeRegressorModel& model, const RowMatrix& features);

struct CentroidModel {
    RowMatrix centroids;          // one row per observed class
    std::vector<Label> classes;   // sorted
};

CentroidModel nearest_centroid_fit(const RowMatrix& features, const Vector& labels);
Vector nearest_centroid_predict(const CentroidModel& model, const RowMatrix& features);

/// Memorizes the training rows; predicts the target of the nearest one
/// (earliest row on ties).
struct OneNNModel {
    RowMatrix rows;
    Vector targets;
};

OneNNModel one_nn_fit(const RowMatrix& features, const Vector& targets);
Vector one_nn_predict(const OneNNModel& model, const RowMatrix& features);

double accuracy(const Vector& truth, const Vector& predicted);
double rmse(const Vector& truth, const Vector& predicted);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t support = 0;  // true instances of the class
};

/// Precision and recall for every label present in either vector.
std::map<Label, ClassMetrics> per_class_metrics(const Vector& truth, const Vector& predicted);

}  // namespace seqml
