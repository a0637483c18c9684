#include "seqml/cli.hpp"
#include "seqml/error.hpp"
#include "seqml/model_selection.hpp"
#include "seqml/pipeline.hpp"
#include "seqml/stages.hpp"

#include "random_data.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace seqml;

namespace {

Errc error_code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected seqml::Error");
    return Errc::Empty;
}

Json benchmark_stages(Json estimator = {{"kind", "krc"}, {"gamma", 1.0 / 30.0}, {"lambda", 1e-3}}) {
    return Json::array({
        {{"kind", "truncate"}, {"length", 200}},
        {{"kind", "segment"}, {"name", "seg"}, {"width", 100}, {"overlap", 0.5}},
        {{"kind", "features"}, {"features", {"median", "min", "max", "std", "skew"}}},
        {{"kind", "standard_scaler"}},
        std::move(estimator),
    });
}

SequenceDataset synthetic(std::size_t n = 140) {
    cli::GenerateOptions options;
    options.series = n;
    return cli::generate_synthetic(options);
}

Pype memorizer(Eigen::Index width = 20) {
    std::vector<std::unique_ptr<Stage>> stages;
    stages.push_back(std::make_unique<SegmentStage>(SegmentParams{width, 0.5}));
    stages.push_back(std::make_unique<FeatureRepStage>(builtin_features().names()));
    stages.push_back(std::make_unique<OneNNStage>());
    return Pype(std::move(stages));
}

}  // namespace

TEST_CASE("benchmark shape flow", "[pipeline]") {
    const auto split = split_instances(synthetic(), 0.25, 0);
    REQUIRE(split.train.size() == 105);
    Pype pipe = make_pipeline(benchmark_stages());
    pipe.fit(split.train);
    REQUIRE(pipe.fitted());
    const auto& info = *pipe.fit_info();
    CHECK(info.segments == 315);
    CHECK(info.feature_names.size() == 30);
    CHECK(info.dropped_instances == 0);
    const auto prediction = pipe.predict(split.test);
    CHECK(prediction.size() == 105);
    CHECK(prediction.origins.size() == 105);
    CHECK(prediction.origins[1] == SegmentOrigin{0, 50});
    const double score = pipe.score(split.test);
    CHECK(score >= 0.0);
    CHECK(score <= 1.0);
}

TEST_CASE("pipeline without a segmenter uses whole series", "[pipeline]") {
    std::mt19937_64 rng(1);
    const auto ds = testing::random_labelled_dataset(rng, 10, 30, 30, 2, 2);
    Pype pipe = make_pipeline(Json::parse(R"([{"kind": "features"}, {"kind": "nearest_centroid"}])"));
    pipe.fit(ds);
    CHECK(pipe.fit_info()->segments == 10);
    CHECK(pipe.predict(ds).size() == 10);
}

TEST_CASE("pipeline construction rules", "[pipeline]") {
    CHECK(error_code_of([] {
              make_pipeline(Json::parse(R"([{"kind": "segment", "name": "seg"}, {"kind": "segment", "name": "seg"},
                                           {"kind": "features"}, {"kind": "krc"}])"));
          }) == Errc::InvalidPipeline);
    CHECK(error_code_of([] { make_pipeline(Json::parse(R"([{"kind": "features"}])")); }) == Errc::InvalidPipeline);
    CHECK(error_code_of([] { make_pipeline(Json::parse(R"([{"kind": "krc"}])")); }) == Errc::InvalidPipeline);
    CHECK(error_code_of([] {
              make_pipeline(Json::parse(R"([{"kind": "features"}, {"kind": "segment"}, {"kind": "krc"}])"));
          }) == Errc::InvalidPipeline);
    CHECK(error_code_of([] {
              make_pipeline(Json::parse(R"([{"kind": "features", "name": "a.b"}, {"kind": "krc"}])"));
          }) == Errc::InvalidPipeline);
    CHECK(error_code_of([] { make_pipeline(Json::parse(R"([{"kind": "svm"}])")); }) == Errc::ConfigError);
    CHECK(error_code_of([] {
              make_pipeline(Json::parse(R"([{"kind": "features", "features": ["nope"]}, {"kind": "krc"}])"));
          }) == Errc::UnknownFeature);
    CHECK(error_code_of([] {
              make_pipeline(Json::parse(R"([{"kind": "features", "bins": 3}, {"kind": "krc"}])"));
          }) == Errc::UnknownParamPath);
    CHECK(error_code_of([] {
              make_pipeline(Json::parse(R"([{"kind": "features"}, {"kind": "krc", "lambda": 0}])"));
          }) == Errc::InvalidParameter);
}

TEST_CASE("fit errors name the failing stage", "[pipeline]") {
    std::mt19937_64 rng(2);
    const auto ds = testing::random_labelled_dataset(rng, 4, 20, 30, 1, 2);
    Pype pipe = make_pipeline(Json::parse(R"([{"kind": "segment", "width": 50}, {"kind": "features"}, {"kind": "krc"}])"));
    try {
        pipe.fit(ds);
        FAIL("expected EmptyOutput");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyOutput);
        CHECK(std::string(e.what()).find("stage 'seg'") != std::string::npos);
    }
    CHECK_FALSE(pipe.fitted());
}

TEST_CASE("predict preconditions", "[pipeline]") {
    std::mt19937_64 rng(3);
    const auto ds = testing::random_labelled_dataset(rng, 6, 40, 40, 2, 2);
    Pype pipe = memorizer(10);
    CHECK(error_code_of([&] { pipe.predict(ds); }) == Errc::NotFitted);
    pipe.fit(ds);

    SequenceDataset empty;
    empty.schema = ds.schema;
    CHECK(pipe.predict(empty).size() == 0);

    const auto wider = testing::random_labelled_dataset(rng, 2, 40, 40, 3, 2);
    CHECK(error_code_of([&] { pipe.predict(wider); }) == Errc::SchemaMismatch);
}

TEST_CASE("score examples", "[pipeline]") {
    Prediction p;
    p.target_type = TargetType::Label;
    p.truth = Vector{{0.0, 1.0}};
    p.values = Vector{{0.0, 0.0}};
    CHECK(score_predictions(p) == 0.5);
    p.values = p.truth;
    CHECK(score_predictions(p) == 1.0);
    p.target_type = TargetType::Real;
    p.values = Vector{{0.0, 3.0}};
    CHECK(score_predictions(p) == -std::sqrt(2.0));
}

TEST_CASE("majority vote reduces segments per series", "[pipeline]") {
    Prediction p;
    p.values = Vector{{1.0, 1.0, 0.0, 2.0, 2.0}};
    p.origins = {{0, 0}, {0, 5}, {0, 10}, {1, 0}, {1, 5}};
    const auto votes = majority_vote(p);
    REQUIRE(votes.size() == 2);
    CHECK(votes[0] == std::pair<std::size_t, Label>{0, 1});
    CHECK(votes[1] == std::pair<std::size_t, Label>{1, 2});
}

TEST_CASE("sample-count law", "[pipeline][property]") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto train = testing::random_labelled_dataset(rng, 5, 20, 60, 2, 3);
        const auto test = testing::random_labelled_dataset(rng, 4, 5, 60, 2, 3);
        const Eigen::Index w = std::uniform_int_distribution<Eigen::Index>(2, 20)(rng);
        const double overlap = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
        Pype pipe = memorizer(w).set_param("seg.overlap", overlap);
        pipe.fit(train);
        Eigen::Index expected = 0;
        for (const auto& inst : test) expected += num_segments(inst.length(), {w, overlap});
        if (expected == 0) {
            CHECK(error_code_of([&] { pipe.predict(test); }) == Errc::EmptyOutput);
        } else {
            REQUIRE(static_cast<Eigen::Index>(pipe.predict(test).size()) == expected);
        }
    }
}

TEST_CASE("memorizing estimator scores 1 on its training data", "[pipeline][property]") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = testing::random_labelled_dataset(rng, 8, 30, 80, 3, 4);
        Pype pipe = memorizer(10);
        pipe.fit(ds);
        REQUIRE(pipe.score(ds) == 1.0);
    }
}

TEST_CASE("fit and predict are deterministic", "[pipeline][property]") {
    const auto split = split_instances(synthetic(28), 0.25, 3);
    Pype a = make_pipeline(benchmark_stages());
    Pype b = make_pipeline(benchmark_stages());
    a.fit(split.train);
    b.fit(split.train);
    CHECK(a.predict(split.test).values == b.predict(split.test).values);
    CHECK(a.predict(split.test).values == a.predict(split.test).values);
}

TEST_CASE("set_param and get_params", "[pipeline][params]") {
    const Pype pipe = make_pipeline(benchmark_stages());
    const Pype changed = pipe.set_param("seg.width", 50);
    CHECK(changed.get_params()["seg.width"] == 50);
    CHECK(pipe.get_params()["seg.width"] == 100);

    const auto params = pipe.get_params();
    for (const char* path : {"truncate.length", "seg.width", "seg.overlap", "seg.strategy", "features.features",
                             "est.gamma", "est.lambda"}) {
        CHECK(params.contains(path));
    }

    CHECK(error_code_of([&] { pipe.set_param("nosuch.width", 1); }) == Errc::UnknownParamPath);
    CHECK(error_code_of([&] { pipe.set_param("seg.nosuch", 1); }) == Errc::UnknownParamPath);
    CHECK(error_code_of([&] { pipe.set_param("width", 1); }) == Errc::UnknownParamPath);
    CHECK(error_code_of([&] { pipe.set_param("seg.overlap", 1.5); }) == Errc::InvalidParameter);
}

TEST_CASE("set_param and clone clear fitted state", "[pipeline][params]") {
    const auto split = split_instances(synthetic(21), 0.25, 0);
    Pype pipe = make_pipeline(benchmark_stages());
    pipe.fit(split.train);
    const auto before = pipe.predict(split.test).values;

    CHECK_FALSE(pipe.set_param("est.lambda", 1e-2).fitted());
    Pype clone = pipe.clone_unfitted();
    CHECK_FALSE(clone.fitted());
    CHECK(clone.get_params() == pipe.get_params());
    CHECK(clone.to_config() == pipe.to_config());

    clone.set_param("seg.width", 40).fit(split.train);
    clone.fit(split.test);
    CHECK(pipe.predict(split.test).values == before);
}

TEST_CASE("param round-trip leaves behavior unchanged", "[pipeline][params][property]") {
    const auto split = split_instances(synthetic(28), 0.25, 1);
    const Pype pipe = make_pipeline(benchmark_stages());
    Pype reference = pipe.clone_unfitted();
    reference.fit(split.train);
    const auto expected = reference.predict(split.test).values;
    const Json params = pipe.get_params();
    for (const auto& [path, value] : params.items()) {
        Pype round = pipe.set_param(path, value);
        round.fit(split.train);
        INFO(path);
        REQUIRE(round.predict(split.test).values == expected);
    }
}

TEST_CASE("pipeline config round-trips through make_pipeline", "[pipeline][params]") {
    const Pype pipe = make_pipeline(benchmark_stages({{"kind", "krc"}}));
    const Json config = pipe.to_config();
    CHECK(config[4]["gamma"].is_null());
    CHECK(make_pipeline(config).get_params() == pipe.get_params());
}

TEST_CASE("regression pipeline scores negative rmse", "[pipeline]") {
    SequenceDataset ds;
    ds.schema.channels = 1;
    ds.schema.target_kind = TargetKind::ScalarValue;
    for (int i = 0; i < 12; ++i) {
        SequenceInstance inst;
        inst.samples = RowMatrix::Constant(20, 1, static_cast<double>(i));
        inst.target = 2.0 * i;
        ds.instances.push_back(std::move(inst));
    }
    Pype pipe = make_pipeline(Json::parse(
        R"([{"kind": "segment", "width": 10}, {"kind": "features", "features": ["mean"]}, {"kind": "krr", "lambda": 1e-9}])"));
    pipe.fit(ds);
    const double score = pipe.score(ds);
    CHECK(score <= 0.0);
    CHECK(score > -1e-3);

    Pype wrong = make_pipeline(Json::parse(R"([{"kind": "features", "features": ["mean"]}, {"kind": "krc"}])"));
    CHECK(error_code_of([&] { wrong.fit(ds); }) == Errc::WrongTargetKind);
}
