#include "seqml/error.hpp"
#include "seqml/transforms.hpp"

#include "random_data.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

using namespace seqml;
using Catch::Matchers::WithinAbs;

namespace {

SequenceInstance ramp_instance(Eigen::Index T, Eigen::Index d, Target target) {
    SequenceInstance inst;
    inst.samples.resize(T, d);
    for (Eigen::Index r = 0; r < T; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) inst.samples(r, c) = static_cast<double>(r) + 0.1 * static_cast<double>(c);
    }
    inst.target = std::move(target);
    return inst;
}

std::shared_ptr<const SequenceDataset> labelled_series(std::size_t n, Eigen::Index T, Eigen::Index d = 1) {
    auto ds = std::make_shared<SequenceDataset>();
    ds->schema.channels = d;
    ds->schema.target_kind = TargetKind::ClassLabel;
    for (std::size_t i = 0; i < n; ++i) ds->instances.push_back(ramp_instance(T, d, static_cast<Label>(i % 3)));
    return ds;
}

std::shared_ptr<const SequenceDataset> aligned_series(const Vector& target) {
    auto ds = std::make_shared<SequenceDataset>();
    ds->schema.channels = 1;
    ds->schema.target_kind = TargetKind::AlignedSequence;
    ds->instances.push_back(ramp_instance(target.size(), 1, target));
    return ds;
}

SequenceDataset one_channel(std::initializer_list<double> values, std::optional<Vector> time = std::nullopt) {
    SequenceDataset ds;
    ds.schema.channels = 1;
    ds.schema.target_kind = TargetKind::ClassLabel;
    SequenceInstance inst;
    inst.samples.resize(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index r = 0;
    for (double v : values) inst.samples(r++, 0) = v;
    inst.time = std::move(time);
    inst.target = Label{0};
    ds.instances.push_back(std::move(inst));
    return ds;
}

Errc error_code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected seqml::Error");
    return Errc::Empty;
}

FeatureMatrix matrix_of(std::initializer_list<std::initializer_list<double>> rows) {
    FeatureMatrix fm;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(rows.begin()->size());
    fm.values.resize(n, p);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) fm.values(r, c++) = v;
        ++r;
    }
    for (Eigen::Index c = 0; c < p; ++c) fm.names.push_back("f" + std::to_string(c));
    fm.targets = Vector::Zero(n);
    fm.origins.resize(static_cast<std::size_t>(n));
    return fm;
}

}  // namespace

TEST_CASE("step follows the floor rule", "[segment]") {
    CHECK(SegmentParams{100, 0.5}.step() == 50);
    CHECK(SegmentParams{100, 0.0}.step() == 100);
    CHECK(SegmentParams{50, 0.9}.step() == 5);
    CHECK(SegmentParams{3, 0.9}.step() == 1);
    CHECK(SegmentParams{1, 0.75}.step() == 1);
    CHECK(error_code_of([] { SegmentParams{0, 0.0}.validate(); }) == Errc::InvalidParameter);
    CHECK(error_code_of([] { SegmentParams{10, 1.0}.validate(); }) == Errc::InvalidParameter);
    CHECK(error_code_of([] { SegmentParams{10, -0.1}.validate(); }) == Errc::InvalidParameter);
}

TEST_CASE("num_segments examples", "[segment]") {
    CHECK(num_segments(200, {100, 0.5}) == 3);
    for (double o : {0.0, 0.25, 0.5, 0.9}) CHECK(num_segments(100, {100, o}) == 1);
    CHECK(num_segments(99, {100, 0.5}) == 0);
}

TEST_CASE("segment starts match brute-force enumeration", "[segment][property]") {
    std::mt19937_64 rng(99);
    const double overlaps[] = {0.0, 0.25, 0.5, 0.75, 0.9};
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index T = std::uniform_int_distribution<Eigen::Index>(1, 64)(rng);
        const Eigen::Index w = std::uniform_int_distribution<Eigen::Index>(1, T)(rng);
        const double overlap = overlaps[std::uniform_int_distribution<int>(0, 4)(rng)];
        const SegmentParams params{w, overlap};

        // brute force: the step from its definition, starts k*step with k*step + w <= T
        const auto step = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(static_cast<double>(w) * (1.0 - overlap) + 1e-9)));
        std::vector<Eigen::Index> expected;
        for (Eigen::Index k = 0; k * step + w <= T; ++k) expected.push_back(k * step);

        const auto segs = segment_fixed_target(labelled_series(1, T), params);
        std::vector<Eigen::Index> starts;
        for (const auto& s : segs.segments()) starts.push_back(s.start);
        INFO("T=" << T << " w=" << w << " overlap=" << overlap);
        REQUIRE(starts == expected);
        REQUIRE(num_segments(T, params) == static_cast<Eigen::Index>(expected.size()));
        for (std::size_t i = 1; i < starts.size(); ++i) REQUIRE(starts[i] - starts[i - 1] == step);
    }
}

TEST_CASE("segment_fixed_target examples", "[segment]") {
    CHECK(segment_fixed_target(labelled_series(140, 200, 6), {100, 0.5}).size() == 420);

    const auto single = segment_fixed_target(labelled_series(1, 100), {100, 0.5});
    REQUIRE(single.size() == 1);
    CHECK(single[0].target == 0.0);
    CHECK(single.target_type() == TargetType::Label);

    CHECK(error_code_of([] { segment_fixed_target(labelled_series(1, 50), {100, 0.5}); }) == Errc::EmptyOutput);
}

TEST_CASE("short series are dropped and counted", "[segment]") {
    auto ds = std::make_shared<SequenceDataset>(*labelled_series(3, 20));
    ds->instances[1] = ramp_instance(5, 1, Label{1});
    const auto segs = segment_fixed_target(ds, {10, 0.0});
    CHECK(segs.size() == 4);
    CHECK(segs.dropped_instances() == 1);
    for (const auto& s : segs.segments()) CHECK(s.parent != 1u);
}

TEST_CASE("segments are faithful views with conserved labels", "[segment][property]") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        auto ds = std::make_shared<const SequenceDataset>(testing::random_labelled_dataset(rng, 6, 5, 40, 3, 4));
        const Eigen::Index w = std::uniform_int_distribution<Eigen::Index>(1, 5)(rng);
        const SegmentParams params{w, 0.5};
        const auto segs = segment_fixed_target(ds, params);
        std::map<std::size_t, std::size_t> per_parent;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto& s = segs[i];
            const auto& parent = (*ds)[s.parent];
            REQUIRE(RowMatrix(segs.window(i)) == parent.samples.middleRows(s.start, w));
            REQUIRE(s.target == static_cast<double>(std::get<Label>(parent.target)));
            ++per_parent[s.parent];
        }
        for (std::size_t p = 0; p < ds->size(); ++p) {
            REQUIRE(static_cast<Eigen::Index>(per_parent[p]) == num_segments((*ds)[p].length(), params));
        }
    }
}

TEST_CASE("windows share the parent's storage", "[segment]") {
    const auto ds = labelled_series(2, 10, 2);
    const auto segs = segment_fixed_target(ds, {4, 0.5});
    CHECK(segs.window(1).data() == &(*ds)[0].samples(2, 0));
}

TEST_CASE("sequence target strategies", "[segment]") {
    const Vector abc{{1.0, 2.0, 3.0}};
    CHECK(segment_sequence_target(aligned_series(abc), {3, 0.0}, TargetStrategy::Last)[0].target == 3.0);
    CHECK(segment_sequence_target(aligned_series(abc), {3, 0.0}, TargetStrategy::Mean)[0].target == 2.0);
    CHECK(segment_sequence_target(aligned_series(abc), {3, 0.0}, TargetStrategy::Middle)[0].target == 2.0);
    const Vector four{{4.0, 5.0, 6.0, 7.0}};
    CHECK(segment_sequence_target(aligned_series(four), {4, 0.0}, TargetStrategy::Middle)[0].target == 6.0);

    const auto pass = segment_sequence_target(aligned_series(four), {2, 0.0}, TargetStrategy::PassThrough);
    CHECK(pass.target_type() == TargetType::Window);
    REQUIRE(pass.size() == 2);
    CHECK(Vector(pass.target_window(1)) == Vector{{6.0, 7.0}});

    CHECK(error_code_of([&] { segment_sequence_target(labelled_series(1, 4), {2, 0.0}, TargetStrategy::Last); }) ==
          Errc::WrongTargetKind);
    auto label_seq = std::make_shared<SequenceDataset>(*aligned_series(Vector{{0.0, 1.0}}));
    label_seq->schema.label_sequence = true;
    CHECK(error_code_of([&] { segment_sequence_target(label_seq, {2, 0.0}, TargetStrategy::Mean); }) ==
          Errc::StrategyKindMismatch);
}

TEST_CASE("target strategy names round-trip", "[segment]") {
    for (auto s : {TargetStrategy::Last, TargetStrategy::Middle, TargetStrategy::Mean, TargetStrategy::PassThrough}) {
        CHECK(parse_target_strategy(to_string(s)) == s);
    }
    CHECK(error_code_of([] { parse_target_strategy("median"); }) == Errc::InvalidParameter);
}

TEST_CASE("whole_series_segments needs equal lengths", "[segment]") {
    const auto segs = whole_series_segments(labelled_series(3, 7));
    CHECK(segs.size() == 3);
    CHECK(segs.width() == 7);
    auto mixed = std::make_shared<SequenceDataset>(*labelled_series(2, 7));
    mixed->instances[1] = ramp_instance(6, 1, Label{0});
    CHECK_THROWS_AS(whole_series_segments(mixed), Error);
}

TEST_CASE("pad examples", "[pad]") {
    const auto padded = pad(one_channel({1, 2, 3}), 5, 0.0);
    CHECK(padded[0].samples.col(0) == Vector{{1, 2, 3, 0, 0}});
    const auto same = one_channel({1, 2, 3, 4, 5});
    CHECK(pad(same, 5) == same);
    CHECK(error_code_of([] { pad(one_channel({1, 2, 3}, Vector{{0, 1, 2}}), 5); }) ==
          Errc::TimePaddingUnsupported);
}

TEST_CASE("pad extends aligned targets", "[pad]") {
    SequenceDataset ds = *aligned_series(Vector{{1.0, 2.0}});
    const auto padded = pad(ds, 4, -1.0);
    CHECK(padded[0].length() == 4);
    CHECK(padded[0].samples(3, 0) == -1.0);
    CHECK(std::get<Vector>(padded[0].target).size() == 4);
    CHECK(validate(padded).ok());
}

TEST_CASE("truncate examples", "[truncate]") {
    SequenceDataset ds = *labelled_series(1, 250, 2);
    const auto cut = truncate(ds, Eigen::Index{200});
    CHECK(cut[0].length() == 200);
    CHECK(cut[0].samples == ds[0].samples.topRows(200));

    SequenceDataset mixed = *labelled_series(3, 5);
    mixed.instances[1] = ramp_instance(7, 1, Label{1});
    mixed.instances[2] = ramp_instance(9, 1, Label{2});
    for (const auto& inst : truncate(mixed, MinAcrossDataset{})) CHECK(inst.length() == 5);

    CHECK(truncate(mixed, Eigen::Index{100}) == mixed);
}

TEST_CASE("truncate and pad are idempotent", "[truncate][pad][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto ds = testing::random_dataset(rng, {.allow_time = false});
        const Eigen::Index len = std::uniform_int_distribution<Eigen::Index>(1, 50)(rng);
        const auto once = truncate(ds, len);
        REQUIRE(truncate(once, len) == once);
        const auto p1 = pad(ds, len, 0.5);
        REQUIRE(pad(p1, len, 0.5) == p1);
    }
}

TEST_CASE("interpolate examples", "[interpolate]") {
    const auto two = interpolate(one_channel({0, 4}, Vector{{0, 2}}), 1.0);
    CHECK(two[0].samples.col(0) == Vector{{0, 2, 4}});
    CHECK(*two[0].time == Vector{{0, 1, 2}});

    const auto uneven = interpolate(one_channel({0, 1, 10}, Vector{{0, 1, 10}}), 5.0);
    REQUIRE(uneven[0].length() == 3);
    CHECK_THAT(uneven[0].samples(0, 0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(uneven[0].samples(1, 0), WithinAbs(5.0, 1e-12));
    CHECK_THAT(uneven[0].samples(2, 0), WithinAbs(10.0, 1e-12));

    // no extrapolation past the last timestamp
    const auto short_grid = interpolate(one_channel({0, 1}, Vector{{0, 2.5}}), 1.0);
    CHECK(short_grid[0].length() == 3);

    CHECK(error_code_of([] { interpolate(one_channel({0, 1}), 1.0); }) == Errc::MissingTimeVector);
}

TEST_CASE("interpolate reproduces regular series", "[interpolate][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index T = std::uniform_int_distribution<Eigen::Index>(2, 60)(rng);
        const double period = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
        const double t0 = value(rng);
        SequenceDataset ds;
        ds.schema.channels = 2;
        SequenceInstance inst;
        inst.samples.resize(T, 2);
        inst.time = Vector(T);
        for (Eigen::Index r = 0; r < T; ++r) {
            (*inst.time)(r) = t0 + static_cast<double>(r) * period;
            inst.samples(r, 0) = value(rng);
            inst.samples(r, 1) = value(rng);
        }
        inst.target = Label{0};
        ds.instances.push_back(inst);
        const auto out = interpolate(ds, period);
        REQUIRE(out[0].length() == T);
        for (Eigen::Index r = 0; r < T; ++r) {
            for (Eigen::Index c = 0; c < 2; ++c) {
                REQUIRE_THAT(out[0].samples(r, c), WithinAbs(inst.samples(r, c), 1e-12));
            }
        }
    }
}

TEST_CASE("interpolate takes the nearest label", "[interpolate]") {
    SequenceDataset ds;
    ds.schema.channels = 1;
    ds.schema.target_kind = TargetKind::AlignedSequence;
    ds.schema.label_sequence = true;
    SequenceInstance inst;
    inst.samples = RowMatrix::Zero(2, 1);
    inst.time = Vector{{0.0, 2.0}};
    inst.target = Vector{{3.0, 4.0}};
    ds.instances.push_back(inst);
    const auto out = interpolate(ds, 1.0);
    CHECK(std::get<Vector>(out[0].target) == Vector{{3.0, 3.0, 4.0}});
}

TEST_CASE("scaler examples", "[scaler]") {
    const auto constant = matrix_of({{5}, {5}, {5}});
    const auto c = scaler_apply(scaler_fit(constant), constant);
    CHECK(c.values.col(0) == Vector::Zero(3));

    const auto two = matrix_of({{1}, {3}});
    const auto s = scaler_apply(scaler_fit(two), two);
    CHECK(s.values(0, 0) == -1.0);
    CHECK(s.values(1, 0) == 1.0);

    CHECK(error_code_of([&] { scaler_apply(scaler_fit(two), matrix_of({{1, 2}})); }) == Errc::DimensionMismatch);
}

TEST_CASE("scaled columns have zero mean and unit std", "[scaler][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 50)(rng);
        const Eigen::Index p = std::uniform_int_distribution<Eigen::Index>(1, 8)(rng);
        const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
        FeatureMatrix fm;
        fm.values = RowMatrix::Random(n, p) * scale;
        fm.values.col(0).array() += 1000.0;
        fm.names.assign(static_cast<std::size_t>(p), "x");
        fm.targets = Vector::Zero(n);
        fm.origins.resize(static_cast<std::size_t>(n));
        const auto out = scaler_apply(scaler_fit(fm), fm);
        for (Eigen::Index c = 0; c < p; ++c) {
            const double mean = out.values.col(c).mean();
            const double sd = std::sqrt((out.values.col(c).array() - mean).square().mean());
            REQUIRE(std::abs(mean) < 1e-9);
            REQUIRE(std::abs(sd - 1.0) < 1e-9);
        }
    }
}
