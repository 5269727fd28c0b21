#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochsep/linalg.hpp"
#include "stochsep/numeric.hpp"

namespace stochsep {

template <typename T>
using PointD = Vec<T>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Oriented hyperplane {x : normal . x = offset}; positive side is normal . x > offset.
template <typename T>
struct Hyperplane {
    Vec<T> normal;
    T offset{};

    std::size_t dimension() const { return normal.size(); }
    Hyperplane flipped() const
    {
        Hyperplane h{normal, -offset};
        for (auto& v : h.normal) v = -v;
        return h;
    }
};

/// Sorted, 1-based coordinate subset used for coordinate projections.
class ProjectionIndexSet {
public:
    explicit ProjectionIndexSet(std::vector<std::size_t> one_based) : indices_(std::move(one_based))
    {
        if (indices_.empty()) throw std::invalid_argument("projection index set must be nonempty");
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (indices_[i] == 0) throw std::invalid_argument("projection indices are 1-based");
            if (i > 0 && indices_[i] <= indices_[i - 1]) {
                throw std::invalid_argument("projection indices must be strictly increasing");
            }
        }
    }

    /// {first, first+1, ..., d}
    static ProjectionIndexSet tail(std::size_t first, std::size_t d)
    {
        std::vector<std::size_t> idx;
        for (std::size_t i = first; i <= d; ++i) idx.push_back(i);
        return ProjectionIndexSet(std::move(idx));
    }

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    std::size_t max_index() const { return indices_.back(); }

private:
    std::vector<std::size_t> indices_;
};

namespace detail {

inline void require_dimension(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                             std::to_string(got));
    }
}

template <typename T>
void canonicalize(Hyperplane<T>& h)
{
    auto first = std::find_if(h.normal.begin(), h.normal.end(), [](const T& v) { return sign_of(v) != 0; });
    if (first == h.normal.end()) throw DegenerateInput("hyperplane normal is zero");
    if constexpr (NumTraits<T>::exact) {
        // primitive integer normal
        mpz_class l = 1;
        for (const auto& v : h.normal) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
        mpz_class g = 0;
        for (const auto& v : h.normal) {
            mpz_class num = v.get_num() * (l / v.get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
        }
        Rational factor = Rational(l) / Rational(g);
        if (sign_of(*first) < 0) factor = -factor;
        for (auto& v : h.normal) v *= factor;
        h.offset *= factor;
    } else {
        double norm = std::sqrt(squared_norm(h.normal));
        double factor = (*first < 0 ? -1.0 : 1.0) / norm;
        for (auto& v : h.normal) v *= factor;
        h.offset *= factor;
    }
}

}  // namespace detail

/// Sign of the homogeneous determinant with rows (1, x_i).
template <typename T>
int orient(const std::vector<PointD<T>>& points)
{
    if (points.empty()) throw DimensionError("orient: no points");
    const std::size_t d = points.size() - 1;
    Mat<T> m;
    m.reserve(points.size());
    for (const auto& p : points) {
        detail::require_dimension(p.size(), d, "orient");
        Vec<T> row;
        row.reserve(d + 1);
        row.push_back(T(1));
        row.insert(row.end(), p.begin(), p.end());
        m.push_back(std::move(row));
    }
    return sign_of(determinant(std::move(m)));
}

/// Rank of the affine hull of `points` (number of affinely independent directions).
template <typename T>
std::size_t affine_rank(const std::vector<PointD<T>>& points)
{
    if (points.size() <= 1) return 0;
    Mat<T> m;
    for (std::size_t i = 1; i < points.size(); ++i) m.push_back(sub(points[i], points[0]));
    return rank(std::move(m));
}

template <typename T>
bool affinely_independent(const std::vector<PointD<T>>& points)
{
    return affine_rank(points) + 1 == points.size();
}

/// Hyperplane through exactly d affinely independent points, canonically oriented.
template <typename T>
Hyperplane<T> span_hyperplane(const std::vector<PointD<T>>& points)
{
    if (points.empty()) throw DimensionError("span_hyperplane: no points");
    const std::size_t d = points.front().size();
    if (points.size() != d) {
        throw DimensionError("span_hyperplane: need exactly " + std::to_string(d) + " points in R^" +
                             std::to_string(d) + ", got " + std::to_string(points.size()));
    }
    Mat<T> m;
    for (std::size_t i = 1; i < points.size(); ++i) {
        detail::require_dimension(points[i].size(), d, "span_hyperplane");
        m.push_back(sub(points[i], points[0]));
    }
    auto basis = null_space(std::move(m), d);
    if (basis.size() != 1) throw DegenerateInput("span_hyperplane: points are affinely dependent");
    Hyperplane<T> h{std::move(basis.front()), T(0)};
    h.offset = dot(h.normal, points[0]);
    detail::canonicalize(h);
    return h;
}

template <typename T>
T evaluate(const Hyperplane<T>& h, const PointD<T>& x)
{
    detail::require_dimension(x.size(), h.dimension(), "side_of");
    return dot(h.normal, x) - h.offset;
}

template <typename T>
int side_of(const Hyperplane<T>& h, const PointD<T>& x)
{
    return sign_of(evaluate(h, x));
}

template <typename T>
PointD<T> project(const PointD<T>& p, const ProjectionIndexSet& set)
{
    if (set.max_index() > p.size()) {
        throw DimensionError("project: index " + std::to_string(set.max_index()) + " exceeds dimension " +
                             std::to_string(p.size()));
    }
    PointD<T> out;
    out.reserve(set.size());
    for (auto i : set.indices()) out.push_back(p[i - 1]);
    return out;
}

template <typename T>
std::vector<PointD<T>> project(const std::vector<PointD<T>>& points, const ProjectionIndexSet& set)
{
    std::vector<PointD<T>> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(project(p, set));
    return out;
}

template <typename T>
std::vector<PointD<T>> convert_points(const std::vector<PointD<Rational>>& points)
{
    std::vector<PointD<T>> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        PointD<T> q;
        q.reserve(p.size());
        for (const auto& v : p) q.push_back(from_rational<T>(v));
        out.push_back(std::move(q));
    }
    return out;
}

template <typename T>
PointD<T> convert_point(const PointD<Rational>& p)
{
    PointD<T> q;
    q.reserve(p.size());
    for (const auto& v : p) q.push_back(from_rational<T>(v));
    return q;
}

}  // namespace stochsep
