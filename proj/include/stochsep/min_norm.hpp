#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "stochsep/linalg.hpp"

namespace stochsep {

/// Minimum-norm point of a convex set, expressed as a convex combination of
/// the support points it was built from.
template <typename T>
struct MinNormResult {
    Vec<T> point;
    std::vector<std::size_t> ids;  // identifiers of the active support points
    Vec<T> weights;                // convex weights, parallel to ids
    std::size_t iterations = 0;
    bool converged = true;
};

namespace detail {

// Minimum-norm point of the affine hull of `pts`, as affine coefficients.
template <typename T>
std::optional<Vec<T>> affine_min_norm(const std::vector<Vec<T>>& pts)
{
    const std::size_t m = pts.size();
    Mat<T> a(m + 1, Vec<T>(m + 1, T(0)));
    Vec<T> b(m + 1, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            a[i][j] = dot(pts[i], pts[j]);
            a[j][i] = a[i][j];
        }
        a[i][m] = 1;
        a[m][i] = 1;
    }
    b[m] = 1;
    auto sol = solve(a, b);
    if (!sol) return std::nullopt;
    sol->resize(m);
    return sol;
}

template <typename T>
Vec<T> combine(const std::vector<Vec<T>>& pts, const Vec<T>& w)
{
    Vec<T> x(pts.front().size(), T(0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += w[i] * pts[i][k];
    }
    return x;
}

template <typename T>
bool positive(const T& v)
{
    if constexpr (NumTraits<T>::exact) {
        return sgn(v) > 0;
    } else {
        return v > 1e-14;
    }
}

}  // namespace detail

/// Wolfe's minimum-norm-point method driven by a support oracle.
///
/// `support(x)` must return a pair (point q, id) minimising x . q over the set.
/// With exact scalars and a finite point set the method terminates with the
/// exact answer; with doubles it stops once the duality gap drops below
/// `rel_gap` times |x|^2 (curved sets converge only asymptotically).
template <typename T, typename Support>
MinNormResult<T> wolfe_min_norm(Support&& support, Vec<T> start, std::size_t start_id, double rel_gap = 1e-15,
                                std::size_t max_iterations = 10000)
{
    std::vector<Vec<T>> corral{std::move(start)};
    std::vector<std::size_t> ids{start_id};
    Vec<T> lambda{T(1)};
    Vec<T> x = corral.front();
    MinNormResult<T> out;

    for (std::size_t iter = 0;; ++iter) {
        out.iterations = iter;
        if (iter >= max_iterations) {
            out.converged = false;
            break;
        }
        const T xx = squared_norm(x);
        if (sign_of(xx) == 0 && (NumTraits<T>::exact || to_double(xx) < 1e-30)) break;
        auto [q, qid] = support(x);
        const T gap = xx - dot(x, q);
        if constexpr (NumTraits<T>::exact) {
            if (sgn(gap) <= 0) break;
        } else {
            if (gap <= rel_gap * xx) break;
        }
        if (std::find(ids.begin(), ids.end(), qid) != ids.end() && NumTraits<T>::exact) break;
        corral.push_back(std::move(q));
        ids.push_back(qid);
        lambda.push_back(T(0));

        bool stalled = false;
        for (;;) {
            auto mu = detail::affine_min_norm(corral);
            if (!mu) {
                // numerically dependent corral: drop the newest point and stop
                corral.pop_back();
                ids.pop_back();
                lambda.pop_back();
                stalled = true;
                break;
            }
            bool all_positive = std::all_of(mu->begin(), mu->end(), [](const T& v) { return detail::positive(v); });
            if (all_positive) {
                lambda = *mu;
                x = detail::combine(corral, lambda);
                break;
            }
            std::optional<T> theta;
            for (std::size_t i = 0; i < mu->size(); ++i) {
                if (detail::positive((*mu)[i])) continue;
                T denom = lambda[i] - (*mu)[i];
                if (!detail::positive(denom)) continue;
                T t = lambda[i] / denom;
                if (!theta || t < *theta) theta = t;
            }
            if (!theta) theta = T(0);
            for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = *theta * (*mu)[i] + (T(1) - *theta) * lambda[i];
            std::vector<Vec<T>> kept;
            std::vector<std::size_t> kept_ids;
            Vec<T> kept_lambda;
            for (std::size_t i = 0; i < lambda.size(); ++i) {
                if (!detail::positive(lambda[i])) continue;
                kept.push_back(std::move(corral[i]));
                kept_ids.push_back(ids[i]);
                kept_lambda.push_back(lambda[i]);
            }
            if (kept.empty()) {
                stalled = true;
                break;
            }
            corral = std::move(kept);
            ids = std::move(kept_ids);
            lambda = std::move(kept_lambda);
            if constexpr (!NumTraits<T>::exact) {
                T total = 0;
                for (const auto& l : lambda) total += l;
                for (auto& l : lambda) l /= total;
            }
            x = detail::combine(corral, lambda);
        }
        if (stalled) break;
    }
    out.point = std::move(x);
    out.ids = std::move(ids);
    out.weights = std::move(lambda);
    return out;
}

/// Minimum-norm point of the convex hull of a finite, nonempty point set.
template <typename T>
MinNormResult<T> min_norm_point(const std::vector<Vec<T>>& pts)
{
    std::size_t best = 0;
    T best_norm = squared_norm(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        T n = squared_norm(pts[i]);
        if (n < best_norm) {
            best_norm = n;
            best = i;
        }
    }
    auto support = [&pts](const Vec<T>& x) {
        std::size_t arg = 0;
        T val = dot(x, pts[0]);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            T v = dot(x, pts[i]);
            if (v < val) {
                val = v;
                arg = i;
            }
        }
        return std::make_pair(pts[arg], arg);
    };
    return wolfe_min_norm<T>(support, pts[best], best);
}

}  // namespace stochsep
