#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "stochsep/geometry.hpp"
#include "stochsep/min_norm.hpp"

namespace stochsep {

/// Closest pair between CH(reds) and CH(blues) with its convex weights.
template <typename T>
struct HullClosestPair {
    PointD<T> red;
    PointD<T> blue;
    T squared_distance{};
};

template <typename T>
struct MarginResult {
    Hyperplane<T> separator;  // reds on the negative side
    double margin = 0.0;
    T squared_margin{};  // exact in rational mode
    PointD<T> closest_red;
    PointD<T> closest_blue;
    std::vector<std::size_t> red_support;   // indices into the red input
    std::vector<std::size_t> blue_support;  // indices into the blue input
};

template <typename T>
struct SeparabilityResult {
    bool separable = false;
    std::optional<Hyperplane<T>> witness;
};

/// Closest pair between the hulls via the minimum-norm point of CH(R) - CH(B).
template <typename T>
HullClosestPair<T> hull_closest_pair(const std::vector<PointD<T>>& reds, const std::vector<PointD<T>>& blues)
{
    const std::size_t d = reds.front().size();
    std::vector<Vec<T>> diffs;
    diffs.reserve(reds.size() * blues.size());
    for (const auto& r : reds) {
        detail::require_dimension(r.size(), d, "hull_closest_pair");
        for (const auto& b : blues) {
            detail::require_dimension(b.size(), d, "hull_closest_pair");
            diffs.push_back(sub(r, b));
        }
    }
    auto mn = min_norm_point(diffs);
    HullClosestPair<T> out{Vec<T>(d, T(0)), Vec<T>(d, T(0)), squared_norm(mn.point)};
    for (std::size_t k = 0; k < mn.ids.size(); ++k) {
        const auto& r = reds[mn.ids[k] / blues.size()];
        const auto& b = blues[mn.ids[k] % blues.size()];
        for (std::size_t i = 0; i < d; ++i) {
            out.red[i] += mn.weights[k] * r[i];
            out.blue[i] += mn.weights[k] * b[i];
        }
    }
    return out;
}

/// Strong separability test; the witness is the bisector of the closest hull pair.
template <typename T>
SeparabilityResult<T> check_separable(const std::vector<PointD<T>>& reds, const std::vector<PointD<T>>& blues)
{
    if (reds.empty() || blues.empty()) return {true, std::nullopt};
    auto cp = hull_closest_pair(reds, blues);
    if (sign_of(cp.squared_distance) == 0) return {false, std::nullopt};
    Hyperplane<T> h{sub(cp.blue, cp.red), T(0)};
    h.offset = (dot(h.normal, cp.red) + dot(h.normal, cp.blue)) / T(2);
    return {true, std::move(h)};
}

/// Unique maximum-margin separator; nullopt when inseparable or a color is empty.
template <typename T>
std::optional<MarginResult<T>> max_margin_separator(const std::vector<PointD<T>>& reds,
                                                    const std::vector<PointD<T>>& blues)
{
    if (reds.empty() || blues.empty()) return std::nullopt;
    auto cp = hull_closest_pair(reds, blues);
    if (sign_of(cp.squared_distance) == 0) return std::nullopt;
    MarginResult<T> out;
    out.separator.normal = sub(cp.blue, cp.red);
    out.separator.offset = (dot(out.separator.normal, cp.red) + dot(out.separator.normal, cp.blue)) / T(2);
    out.squared_margin = cp.squared_distance / T(4);
    out.margin = std::sqrt(to_double(out.squared_margin));
    // every support point sits at |n.x - c| = |n|^2 / 2
    const T target = cp.squared_distance / T(2);
    for (std::size_t i = 0; i < reds.size(); ++i) {
        if (sign_of(evaluate(out.separator, reds[i]) + target) == 0) out.red_support.push_back(i);
    }
    for (std::size_t i = 0; i < blues.size(); ++i) {
        if (sign_of(evaluate(out.separator, blues[i]) - target) == 0) out.blue_support.push_back(i);
    }
    out.closest_red = std::move(cp.red);
    out.closest_blue = std::move(cp.blue);
    return out;
}

}  // namespace stochsep
