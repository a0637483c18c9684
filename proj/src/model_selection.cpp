#include "seqml/model_selection.hpp"

#include "seqml/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace seqml {

namespace {

void check_fraction(double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(Errc::InvalidParameter, "test_fraction must be in (0, 1), got " + std::to_string(test_fraction));
    }
}

SequenceDataset empty_like(const SequenceDataset& dataset) {
    SequenceDataset out;
    out.schema = dataset.schema;
    return out;
}

void add_slice(SequenceDataset& to, std::vector<InstanceSpan>& spans, const SequenceDataset& from, std::size_t parent,
               Eigen::Index begin, Eigen::Index end) {
    to.instances.push_back(slice_instance(from[parent], begin, end));
    spans.push_back({parent, begin, end});
}

}  // namespace

SequenceInstance slice_instance(const SequenceInstance& instance, Eigen::Index begin, Eigen::Index end) {
    SequenceInstance out;
    out.samples = instance.samples.middleRows(begin, end - begin);
    if (instance.time) out.time = Vector(instance.time->segment(begin, end - begin));
    out.context = instance.context;
    if (const auto* seq = std::get_if<Vector>(&instance.target)) out.target = Vector(seq->segment(begin, end - begin));
    else out.target = instance.target;
    return out;
}

SplitPair split_instances(const SequenceDataset& dataset, double test_fraction, std::uint64_t seed) {
    check_fraction(test_fraction);
    const std::size_t n = dataset.size();
    if (n < 2) throw Error(Errc::TooFewInstances, "instance split needs at least 2 instances, got " + std::to_string(n));
    const auto rounded = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    const std::size_t n_test = std::clamp<std::size_t>(rounded, 1, n - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    SplitPair out;
    out.train = select(dataset, train_idx);
    out.test = select(dataset, test_idx);
    for (auto i : train_idx) out.train_spans.push_back({i, 0, dataset[i].length()});
    for (auto i : test_idx) out.test_spans.push_back({i, 0, dataset[i].length()});
    return out;
}

SplitPair temporal_split(const SequenceDataset& dataset, double test_fraction) {
    check_fraction(test_fraction);
    SplitPair out{empty_like(dataset), empty_like(dataset), {}, {}};
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Eigen::Index T = dataset[i].length();
        const auto test_len = static_cast<Eigen::Index>(std::floor(static_cast<double>(T) * test_fraction));
        const Eigen::Index cut = T - test_len;
        if (test_len < 1 || cut < 1) {
            throw Error(Errc::DegenerateCut, "instance " + std::to_string(i) + " (T=" + std::to_string(T) +
                                                 ") would leave an empty " + (test_len < 1 ? "test" : "train") +
                                                 " side at fraction " + std::to_string(test_fraction));
        }
        add_slice(out.train, out.train_spans, dataset, i, 0, cut);
        add_slice(out.test, out.test_spans, dataset, i, cut, T);
    }
    return out;
}

FoldPlan temporal_k_fold(const SequenceDataset& dataset, int k) {
    if (k < 2) throw Error(Errc::InvalidParameter, "k must be >= 2, got " + std::to_string(k));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].length() < k) {
            throw Error(Errc::SeriesTooShort, "instance " + std::to_string(i) + " has " +
                                                  std::to_string(dataset[i].length()) + " samples, fewer than k=" +
                                                  std::to_string(k));
        }
    }

    FoldPlan plan;
    plan.folds.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) plan.folds.push_back({empty_like(dataset), empty_like(dataset), {}, {}});

    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Eigen::Index T = dataset[i].length();
        const Eigen::Index base = T / k;
        const Eigen::Index extra = T % k;
        Eigen::Index begin = 0;
        for (int j = 0; j < k; ++j) {
            const Eigen::Index end = begin + base + (j < extra ? 1 : 0);
            SplitPair& fold = plan.folds[static_cast<std::size_t>(j)];
            add_slice(fold.test, fold.test_spans, dataset, i, begin, end);
            if (begin > 0) add_slice(fold.train, fold.train_spans, dataset, i, 0, begin);
            if (end < T) add_slice(fold.train, fold.train_spans, dataset, i, end, T);
            begin = end;
        }
    }
    return plan;
}

ParamGrid ParamGrid::from_json(const Json& grid) {
    if (!grid.is_object()) throw Error(Errc::ConfigError, "grid must be an object of path -> value list");
    ParamGrid out;
    for (const auto& [path, values] : grid.items()) {
        if (!values.is_array() || values.empty()) {
            throw Error(Errc::ConfigError, "grid entry '" + path + "' must be a non-empty list of values");
        }
        out.axes.emplace_back(path, std::vector<Json>(values.begin(), values.end()));
    }
    return out;
}

std::size_t ParamGrid::combinations() const noexcept {
    if (axes.empty()) return 0;
    std::size_t total = 1;
    for (const auto& [_, values] : axes) total *= values.size();
    return total;
}

Json ParamGrid::combination(std::size_t index) const {
    Json out = Json::object();
    std::vector<std::size_t> digits(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
        digits[a] = index % axes[a].second.size();
        index /= axes[a].second.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) out[axes[a].first] = axes[a].second[digits[a]];
    return out;
}

Json GridSearchResult::to_json() const {
    Json out;
    Json rows = Json::array();
    auto number = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
    for (const auto& row : table) {
        Json r;
        r["params"] = row.params;
        r["mean_score"] = number(row.mean_score);
        Json folds = Json::array();
        for (double s : row.fold_scores) folds.push_back(number(s));
        r["fold_scores"] = std::move(folds);
        if (!row.errors.empty()) r["errors"] = row.errors;
        rows.push_back(std::move(r));
    }
    out["table"] = std::move(rows);
    if (const GridRow* b = best()) {
        out["best_params"] = b->params;
        out["best_score"] = b->mean_score;
    } else {
        out["best_params"] = nullptr;
        out["best_score"] = nullptr;
    }
    return out;
}

GridSearchResult grid_search(const Pype& pipeline, const ParamGrid& grid, const FoldPlan& folds) {
    if (folds.k() < 1) throw Error(Errc::InvalidParameter, "grid search needs at least one fold");
    const Json known = pipeline.get_params();
    for (const auto& [path, _] : grid.axes) {
        if (!known.contains(path)) throw Error(Errc::UnknownParamPath, "unknown parameter path '" + path + "'");
    }

    GridSearchResult result;
    const std::size_t total = grid.combinations();
    result.table.reserve(total);
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < total; ++c) {
        GridRow row;
        row.params = grid.combination(c);
        Pype candidate = pipeline.clone_unfitted();
        for (const auto& [path, value] : row.params.items()) candidate = candidate.set_param(path, value);

        double sum = 0.0;
        bool failed = false;
        for (const auto& fold : folds.folds) {
            double score = std::numeric_limits<double>::quiet_NaN();
            try {
                Pype trial = candidate.clone_unfitted();
                trial.fit(fold.train);
                score = trial.score(fold.test);
            } catch (const Error& e) {
                row.errors.emplace_back(e.what());
            }
            if (std::isnan(score)) failed = true;
            sum += score;
            row.fold_scores.push_back(score);
        }
        row.mean_score = failed ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(folds.k());
        if (!failed && row.mean_score > best_score) {
            best_score = row.mean_score;
            result.best_index = c;
        }
        result.table.push_back(std::move(row));
    }
    return result;
}

}  // namespace seqml
