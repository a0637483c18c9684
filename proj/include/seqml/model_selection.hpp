#pragma once

#include "seqml/dataset.hpp"
#include "seqml/pipeline.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace seqml {

/// Sample range [begin, end) of a parent instance that became one split instance.
struct InstanceSpan {
    std::size_t parent = 0;
    Eigen::Index begin = 0;
    Eigen::Index end = 0;

    friend bool operator==(const InstanceSpan&, const InstanceSpan&) = default;
};

struct SplitPair {
    SequenceDataset train;
    SequenceDataset test;
    // Provenance of each train/test instance, parallel to the datasets.
    std::vector<InstanceSpan> train_spans;
    std::vector<InstanceSpan> test_spans;
};

struct FoldPlan {
    std::vector<SplitPair> folds;

    std::size_t k() const noexcept { return folds.size(); }
};

/// Seeded random partition of whole instances. The test side gets
/// round(N * test_fraction) instances, clamped to [1, N - 1].
SplitPair split_instances(const SequenceDataset& dataset, double test_fraction, std::uint64_t seed);

/// Cuts every instance at T - floor(T * test_fraction); the prefix trains,
/// the suffix tests.
SplitPair temporal_split(const SequenceDataset& dataset, double test_fraction);

/// Splits every instance into k contiguous blocks (the first T mod k are one
/// sample longer). Fold j tests on block j; the train remnants on either side
/// of it stay separate instances.
FoldPlan temporal_k_fold(const SequenceDataset& dataset, int k);

/// Rows [begin, end) of an instance with its time and aligned target.
SequenceInstance slice_instance(const SequenceInstance& instance, Eigen::Index begin, Eigen::Index end);

struct ParamGrid {
    std::vector<std::pair<std::string, std::vector<Json>>> axes;

    /// {"path": [values...], ...} in document order.
    static ParamGrid from_json(const Json& grid);

    std::size_t combinations() const noexcept;
    /// The i-th combination in product order (last axis varies fastest).
    Json combination(std::size_t index) const;
};

struct GridRow {
    Json params;
    double mean_score = 0.0;           // NaN if any fold failed
    std::vector<double> fold_scores;   // NaN for failed folds
    std::vector<std::string> errors;   // one message per failed fold
};

struct GridSearchResult {
    std::vector<GridRow> table;
    std::optional<std::size_t> best_index;

    const GridRow* best() const noexcept { return best_index ? &table[*best_index] : nullptr; }
    Json to_json() const;
};

/// Exhaustive search: each combination is applied to a fresh unfitted copy of
/// `pipeline`, fitted on every fold's train side and scored on its test side.
/// Fit/score failures score NaN and never win; the first best in product
/// order wins ties.
GridSearchResult grid_search(const Pype& pipeline, const ParamGrid& grid, const FoldPlan& folds);

}  // namespace seqml
