#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "stochsep/numeric.hpp"

namespace stochsep {

template <typename T>
using Vec = std::vector<T>;

template <typename T>
using Mat = std::vector<std::vector<T>>;

template <typename T>
T dot(const Vec<T>& a, const Vec<T>& b)
{
    T s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <typename T>
Vec<T> sub(const Vec<T>& a, const Vec<T>& b)
{
    Vec<T> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

template <typename T>
Vec<T> add(const Vec<T>& a, const Vec<T>& b)
{
    Vec<T> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

template <typename T>
Vec<T> scale(const Vec<T>& a, const T& s)
{
    Vec<T> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

template <typename T>
T squared_norm(const Vec<T>& a)
{
    return dot(a, a);
}

namespace detail {

// Row index of the pivot for column `col` among rows [from, rows), or -1.
template <typename T>
long choose_pivot(const Mat<T>& m, std::size_t from, std::size_t col)
{
    long best = -1;
    for (std::size_t r = from; r < m.size(); ++r) {
        if (sign_of(m[r][col]) == 0) continue;
        if constexpr (NumTraits<T>::exact) {
            return static_cast<long>(r);
        } else {
            if (best < 0 || NumTraits<T>::abs(m[r][col]) > NumTraits<T>::abs(m[static_cast<std::size_t>(best)][col])) {
                best = static_cast<long>(r);
            }
        }
    }
    return best;
}

}  // namespace detail

/// Reduced row echelon form in place; returns pivot columns.
template <typename T>
std::vector<std::size_t> rref(Mat<T>& m, std::size_t cols)
{
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        long p = detail::choose_pivot(m, row, col);
        if (p < 0) {
            if constexpr (!NumTraits<T>::exact) {
                for (std::size_t r = row; r < m.size(); ++r) m[r][col] = 0;
            }
            continue;
        }
        std::swap(m[row], m[static_cast<std::size_t>(p)]);
        T inv = T(1) / m[row][col];
        for (std::size_t c = col; c < m[row].size(); ++c) m[row][c] *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            T f = m[r][col];
            for (std::size_t c = col; c < m[r].size(); ++c) m[r][c] -= f * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <typename T>
std::size_t rank(Mat<T> m)
{
    if (m.empty()) return 0;
    return rref(m, m.front().size()).size();
}

/// Basis of {x : m x = 0}; `cols` is the number of unknowns.
template <typename T>
std::vector<Vec<T>> null_space(Mat<T> m, std::size_t cols)
{
    auto pivots = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<Vec<T>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vec<T> v(cols, T(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves the square system a x = b; nullopt when singular.
template <typename T>
std::optional<Vec<T>> solve(const Mat<T>& a, const Vec<T>& b)
{
    const std::size_t n = a.size();
    Mat<T> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = a[i];
        m[i].push_back(b[i]);
    }
    auto pivots = rref(m, n);
    if (pivots.size() < n) return std::nullopt;
    Vec<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n];
    return x;
}

template <typename T>
T determinant(Mat<T> m)
{
    const std::size_t n = m.size();
    T det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        long p = detail::choose_pivot(m, col, col);
        if (p < 0) return T(0);
        if (static_cast<std::size_t>(p) != col) {
            std::swap(m[col], m[static_cast<std::size_t>(p)]);
            det = -det;
        }
        det *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            T f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return det;
}

}  // namespace stochsep
