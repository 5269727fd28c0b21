#include "stochsep/general_position.hpp"

#include <cmath>
#include <stdexcept>

#include "stochsep/combinatorics.hpp"

namespace stochsep {

namespace {

std::vector<PointD<Rational>> suffix(const std::vector<PointD<Rational>>& pts, std::size_t first)
{
    std::vector<PointD<Rational>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.emplace_back(p.begin() + static_cast<long>(first - 1), p.end());
    return out;
}

std::vector<std::size_t> level_starts(std::size_t d, PositionLevel level)
{
    std::vector<std::size_t> starts{1};
    if (level == PositionLevel::sgpp) {
        for (std::size_t first = 3; first <= d; first += 2) starts.push_back(first);
    }
    return starts;
}

bool independent_subset(const std::vector<PointD<Rational>>& pts, const std::vector<std::size_t>& idx)
{
    std::vector<PointD<Rational>> sel;
    sel.reserve(idx.size());
    for (auto i : idx) sel.push_back(pts[i]);
    return affinely_independent(sel);
}

}  // namespace

std::string describe_level(std::size_t first_coordinate, std::size_t d)
{
    if (first_coordinate == 1) return "GP";
    std::string s = "J={";
    for (std::size_t i = first_coordinate; i <= d; ++i) {
        if (i > first_coordinate) s += ",";
        s += std::to_string(i);
    }
    return s + "}";
}

PositionReport validate_general_position(const std::vector<PointD<Rational>>& points, PositionLevel level,
                                         std::size_t max_violations)
{
    PositionReport report;
    report.level = level;
    if (points.empty()) return report;
    const std::size_t d = points.front().size();
    for (auto first : level_starts(d, level)) {
        auto pts = suffix(points, first);
        const std::size_t dim = d - first + 1;
        const std::size_t k = std::min(points.size(), dim + 1);
        for_each_combination(points.size(), k, [&](const std::vector<std::size_t>& idx) {
            if (independent_subset(pts, idx)) return true;
            report.ok = false;
            if (report.violations.size() >= max_violations) {
                report.truncated = true;
                return false;
            }
            PositionViolation v;
            for (auto i : idx) v.ids.push_back(i + 1);
            v.first_coordinate = first;
            report.violations.push_back(std::move(v));
            return true;
        });
        if (report.truncated) break;
    }
    return report;
}

void require_general_position(const std::vector<PointD<Rational>>& points, PositionLevel level, const char* who)
{
    auto report = validate_general_position(points, level, 1);
    if (report.ok) return;
    const auto& v = report.violations.front();
    std::string ids;
    for (auto i : v.ids) ids += (ids.empty() ? "" : ",") + std::to_string(i);
    const std::size_t d = points.front().size();
    throw PositionError(std::string(who) + ": " + (level == PositionLevel::sgpp ? "SGPP" : "GP") + " violation {" + ids +
                            "} at " + describe_level(v.first_coordinate, d),
                        std::move(report));
}

std::vector<PointD<Rational>> dataset_locations(const StochasticDataset& ds)
{
    std::vector<PointD<Rational>> out;
    for (const auto& p : ds.points) out.push_back(p.location);
    for (const auto& u : ds.uncertain_points) {
        for (const auto& l : u.locations) out.push_back(l.coords);
    }
    for (const auto& o : ds.objects) {
        if (const auto* poly = std::get_if<PolytopeShape>(&o.shape)) {
            for (const auto& v : poly->vertices) out.push_back(v);
        }
    }
    return out;
}

PositionReport validate_general_position(const StochasticDataset& dataset, PositionLevel level,
                                         std::size_t max_violations)
{
    return validate_general_position(dataset_locations(dataset), level, max_violations);
}

bool extends_general_position(const std::vector<PointD<Rational>>& accepted, const PointD<Rational>& candidate,
                              PositionLevel level)
{
    const std::size_t d = candidate.size();
    std::vector<PointD<Rational>> all = accepted;
    all.push_back(candidate);
    const std::size_t last = accepted.size();
    for (auto first : level_starts(d, level)) {
        auto pts = suffix(all, first);
        const std::size_t dim = d - first + 1;
        const std::size_t k = std::min(all.size(), dim + 1);
        bool ok = true;
        // subsets that contain the candidate
        for_each_combination(last, k - 1, [&](std::vector<std::size_t> idx) {
            idx.push_back(last);
            if (independent_subset(pts, idx)) return true;
            ok = false;
            return false;
        });
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// SGPP transform

namespace {

using DVec = std::vector<double>;

double ddot(const DVec& a, const DVec& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Orthonormal basis of span(vectors), dropping numerically dependent ones.
std::vector<DVec> orthonormal_basis(const std::vector<DVec>& vectors)
{
    std::vector<DVec> basis;
    for (const auto& v : vectors) {
        DVec w = v;
        const double scale = std::sqrt(ddot(v, v));
        if (scale == 0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const double c = ddot(w, b);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * b[i];
            }
        }
        const double norm = std::sqrt(ddot(w, w));
        if (norm <= 1e-12 * scale) continue;
        for (auto& x : w) x /= norm;
        basis.push_back(std::move(w));
    }
    return basis;
}

DVec residual(const DVec& x, const std::vector<DVec>& basis)
{
    DVec r = x;
    for (const auto& b : basis) {
        const double c = ddot(r, b);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * b[i];
    }
    return r;
}

// Shrinks the ball (c, r) so that it avoids every subspace produced by `subspaces`.
template <typename ForEachSubspace>
DVec shrink_ball(std::size_t d, ForEachSubspace&& for_each_subspace)
{
    DVec c(d, 1.0);
    double r = 0.5;
    for_each_subspace([&](const std::vector<DVec>& spanning) {
        auto basis = orthonormal_basis(spanning);
        const double dist = std::sqrt(ddot(residual(c, basis), residual(c, basis)));
        if (dist > 1e-12) {
            r = std::min(r, dist);
            return;
        }
        // center lies on V: move by r/2 along the first basis direction not in V
        for (std::size_t j = 0; j < d; ++j) {
            DVec e(d, 0.0);
            e[j] = 1.0;
            auto res = residual(e, basis);
            if (std::sqrt(ddot(res, res)) <= 1e-9) continue;
            DVec moved = c;
            moved[j] += r / 2;
            const double moved_dist = std::sqrt(ddot(residual(moved, basis), residual(moved, basis)));
            r = std::min(moved_dist, r - r / 2);
            c = std::move(moved);
            return;
        }
        throw std::logic_error("sgpp_transform: subspace spans the whole space");
    });
    return c;
}

DVec to_dvec(const PointD<Rational>& p)
{
    DVec v;
    for (const auto& x : p) v.push_back(x.get_d());
    return v;
}

}  // namespace

double OrthoMatrix::max_orthonormality_error() const
{
    double err = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const double target = i == j ? 1.0 : 0.0;
            err = std::max(err, std::fabs(ddot(rows[i], rows[j]) - target));
        }
    }
    return err;
}

std::vector<double> OrthoMatrix::apply(const std::vector<double>& x) const
{
    std::vector<double> y;
    y.reserve(rows.size());
    for (const auto& r : rows) y.push_back(ddot(r, x));
    return y;
}

OrthoMatrix sgpp_matrix(const std::vector<PointD<Rational>>& points, std::size_t d)
{
    std::vector<DVec> pts;
    for (const auto& p : points) pts.push_back(to_dvec(p));
    std::vector<DVec> rows;
    auto differences = [&](const std::vector<std::size_t>& idx) {
        std::vector<DVec> out;
        for (std::size_t t = 1; t < idx.size(); ++t) {
            DVec diff(d);
            for (std::size_t i = 0; i < d; ++i) diff[i] = pts[idx[t]][i] - pts[idx[0]][i];
            out.push_back(std::move(diff));
        }
        return out;
    };
    for (std::size_t k = 0; 2 * k + 3 <= d; ++k) {
        const std::size_t tuple = std::min(d - 2 * k - 1, pts.size());
        for (int step = 0; step < 2; ++step) {
            auto candidate = shrink_ball(d, [&](auto&& visit) {
                if (!rows.empty()) visit(rows);
                if (tuple < 2) return;
                for_each_combination(pts.size(), tuple, [&](const std::vector<std::size_t>& idx) {
                    std::vector<DVec> spanning = rows;
                    for (auto& v : differences(idx)) spanning.push_back(std::move(v));
                    visit(spanning);
                });
            });
            auto basis = orthonormal_basis(rows);
            auto w = residual(candidate, basis);
            const double norm = std::sqrt(ddot(w, w));
            for (auto& x : w) x /= norm;
            rows.push_back(std::move(w));
        }
    }
    // complete with standard basis vectors
    for (std::size_t j = 0; j < d && rows.size() < d; ++j) {
        DVec e(d, 0.0);
        e[j] = 1.0;
        auto basis = orthonormal_basis(rows);
        auto w = residual(e, basis);
        const double norm = std::sqrt(ddot(w, w));
        if (norm <= 1e-6) continue;
        for (auto& x : w) x /= norm;
        rows.push_back(std::move(w));
    }
    return OrthoMatrix{std::move(rows)};
}

StochasticDataset transform_dataset(const StochasticDataset& dataset, const OrthoMatrix& matrix)
{
    auto map = [&](const PointD<Rational>& p) {
        auto y = matrix.apply(to_dvec(p));
        PointD<Rational> q;
        for (double v : y) q.push_back(rational_from_double(v));
        return q;
    };
    StochasticDataset out = dataset;
    for (auto& p : out.points) p.location = map(p.location);
    for (auto& u : out.uncertain_points) {
        for (auto& l : u.locations) l.coords = map(l.coords);
    }
    for (auto& o : out.objects) {
        if (auto* b = std::get_if<BallShape>(&o.shape)) {
            b->center = map(b->center);
        } else {
            for (auto& v : std::get<PolytopeShape>(o.shape).vertices) v = map(v);
        }
    }
    return out;
}

SgppTransformResult sgpp_transform(const StochasticDataset& dataset)
{
    auto report = validate_general_position(dataset, PositionLevel::gp, 1);
    if (!report.ok) throw DegenerateInput("sgpp_transform: dataset is not in general position");
    const std::size_t d = dataset.dimension;
    if (d <= 2) {
        OrthoMatrix identity;
        for (std::size_t i = 0; i < d; ++i) {
            DVec e(d, 0.0);
            e[i] = 1.0;
            identity.rows.push_back(std::move(e));
        }
        return {identity, dataset};
    }
    auto matrix = sgpp_matrix(dataset_locations(dataset), d);
    return {matrix, transform_dataset(dataset, matrix)};
}

}  // namespace stochsep
