#include "seqml/features.hpp"

#include "seqml/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace seqml {

namespace feature {

namespace {

struct CentralMoments {
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    bool constant = false;
};

CentralMoments central_moments(std::span<const double> x) {
    CentralMoments m;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) {
        m.constant = true;
        return m;
    }
    const double mu = mean(x);
    for (double v : x) {
        const double d = v - mu;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

}  // namespace

double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

double median(std::span<const double> x) {
    std::vector<double> buf(x.begin(), x.end());
    const std::size_t mid = buf.size() / 2;
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
    const double upper = buf[mid];
    if (buf.size() % 2 == 1) return upper;
    const double lower = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double min(std::span<const double> x) { return *std::min_element(x.begin(), x.end()); }

double max(std::span<const double> x) { return *std::max_element(x.begin(), x.end()); }

double var(std::span<const double> x) {
    const double mu = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) { return std::sqrt(var(x)); }

double skew(std::span<const double> x) {
    const auto m = central_moments(x);
    if (m.constant || m.m2 <= 0.0) return 0.0;
    return m.m3 / std::pow(m.m2, 1.5);
}

double kurt(std::span<const double> x) {
    const auto m = central_moments(x);
    if (m.constant || m.m2 <= 0.0) return 0.0;
    return m.m4 / (m.m2 * m.m2) - 3.0;
}

double abs_energy(std::span<const double> x) { return std::inner_product(x.begin(), x.end(), x.begin(), 0.0); }

double zero_crossings(std::span<const double> x) {
    const double mu = mean(x);
    int previous = 0;
    double count = 0.0;
    for (double v : x) {
        const double d = v - mu;
        const int sign = (d > 0.0) - (d < 0.0);
        if (sign == 0) continue;
        if (previous != 0 && sign != previous) count += 1.0;
        previous = sign;
    }
    return count;
}

double line_length(std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) acc += std::abs(x[k] - x[k - 1]);
    return acc;
}

}  // namespace feature

FeatureSet::FeatureSet(std::vector<FeatureFunction> functions) {
    for (auto& f : functions) add(std::move(f));
}

void FeatureSet::add(FeatureFunction function) {
    for (const auto& existing : functions_) {
        if (existing.name == function.name) {
            throw Error(Errc::InvalidParameter, "duplicate feature name '" + function.name + "'");
        }
    }
    functions_.push_back(std::move(function));
}

std::vector<std::string> FeatureSet::names() const {
    std::vector<std::string> out;
    out.reserve(functions_.size());
    for (const auto& f : functions_) out.push_back(f.name);
    return out;
}

bool FeatureSet::has_moment_ratio() const noexcept {
    return std::any_of(functions_.begin(), functions_.end(), [](const auto& f) { return f.moment_ratio; });
}

FeatureSet builtin_features() {
    return FeatureSet({
        {"mean", feature::mean},
        {"median", feature::median},
        {"min", feature::min},
        {"max", feature::max},
        {"std", feature::stddev},
        {"var", feature::var},
        {"skew", feature::skew, true},
        {"kurt", feature::kurt, true},
        {"abs_energy", feature::abs_energy},
        {"zero_crossings", feature::zero_crossings},
        {"line_length", feature::line_length},
    });
}

FeatureSet select_features(std::span<const std::string> names) {
    const FeatureSet all = builtin_features();
    FeatureSet out;
    for (const auto& name : names) {
        auto it = std::find_if(all.begin(), all.end(), [&](const auto& f) { return f.name == name; });
        if (it == all.end()) {
            std::string valid;
            for (const auto& f : all) valid += (valid.empty() ? "" : ", ") + f.name;
            throw Error(Errc::UnknownFeature, "unknown feature '" + name + "' (valid: " + valid + ")");
        }
        out.add(*it);
    }
    return out;
}

std::vector<std::string> benchmark_feature_names() { return {"median", "min", "max", "std", "skew"}; }

FeatureMatrix extract(const SegmentSet& segments, const FeatureSet& features) {
    const Eigen::Index w = segments.width();
    const Eigen::Index d = segments.channels();
    const Eigen::Index c = segments.context_width();
    const auto nf = static_cast<Eigen::Index>(features.size());
    if (w < 1 || (w < 2 && features.has_moment_ratio())) {
        throw Error(Errc::WidthTooSmall, "segment width " + std::to_string(w) + " is too small for moment-ratio features");
    }

    FeatureMatrix out;
    const auto n = static_cast<Eigen::Index>(segments.size());
    out.values.resize(n, d * nf + c);
    out.names.reserve(static_cast<std::size_t>(d * nf + c));
    for (Eigen::Index j = 0; j < d; ++j) {
        for (const auto& f : features) out.names.push_back("ch" + std::to_string(j) + "_" + f.name);
    }
    for (Eigen::Index k = 0; k < c; ++k) out.names.push_back("ctx" + std::to_string(k));

    out.target_type = segments.target_type();
    if (out.target_type != TargetType::Window) out.targets.resize(n);
    out.origins.reserve(segments.size());

    std::vector<double> channel(static_cast<std::size_t>(w));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const auto window = segments.window(idx);
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index r = 0; r < w; ++r) channel[static_cast<std::size_t>(r)] = window(r, j);
            for (Eigen::Index f = 0; f < nf; ++f) {
                out.values(i, j * nf + f) = features[static_cast<std::size_t>(f)].eval(channel);
            }
        }
        if (c > 0) out.values.row(i).tail(c) = segments.context(idx).transpose();
        if (out.target_type != TargetType::Window) out.targets[i] = segments[idx].target;
        out.origins.push_back({segments[idx].parent, segments[idx].start});
    }
    return out;
}

}  // namespace seqml
