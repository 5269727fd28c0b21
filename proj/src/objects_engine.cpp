#include "stochsep/objects_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochsep/combinatorics.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/min_norm.hpp"
#include "stochsep/parallel.hpp"
#include "stochsep/separation.hpp"
#include "stochsep/sp_engine.hpp"

namespace stochsep {

namespace {

[[noreturn]] void ball_violation(const std::string& what) { throw DegenerateInput("ball general position violation: " + what); }

void require_ball_dimension(std::size_t d, const char* who)
{
    if (d != 2 && d != 3) throw DimensionError(std::string(who) + ": balls are supported for d in {2, 3}");
}

bool bichromatic(const std::vector<Color>& colors, const std::vector<std::size_t>& ids)
{
    bool red = false;
    bool blue = false;
    for (auto i : ids) (colors[i] == Color::red ? red : blue) = true;
    return red && blue;
}

// Solutions y of a y = rhs, whose solution set must be a line, with |m y| = 1.
// Everything is exact except the final square root.
std::vector<Vec<double>> line_sphere(const Mat<Rational>& a, const Vec<Rational>& rhs, const Mat<Rational>& m)
{
    const std::size_t cols = a.front().size();
    Mat<Rational> aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(rhs[i]);
    auto pivots = rref(aug, cols);
    for (std::size_t i = pivots.size(); i < aug.size(); ++i) {
        if (sgn(aug[i][cols]) != 0) return {};
    }
    auto dir = null_space(a, cols);
    if (dir.size() != 1) ball_violation("tangency system is not of rank " + std::to_string(cols - 1));
    Vec<Rational> base(cols, Rational(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) base[pivots[i]] = aug[i][cols];
    auto apply = [&m](const Vec<Rational>& y) {
        Vec<Rational> out;
        for (const auto& row : m) out.push_back(dot(row, y));
        return out;
    };
    const Vec<Rational> p = apply(base);
    const Vec<Rational> q = apply(dir.front());
    const Rational qq = squared_norm(q);
    const Rational pq = dot(p, q);
    const Rational disc = pq * pq - qq * (squared_norm(p) - 1);
    if (sgn(qq) == 0 || sgn(disc) < 0) return {};
    if (sgn(disc) == 0) ball_violation("double root of a tangency system");
    const double root = std::sqrt(disc.get_d());
    std::vector<Vec<double>> out;
    for (double sign : {-1.0, 1.0}) {
        const double t = (-pq.get_d() + sign * root) / qq.get_d();
        Vec<double> y(cols);
        for (std::size_t i = 0; i < cols; ++i) y[i] = base[i].get_d() + t * dir.front()[i].get_d();
        out.push_back(std::move(y));
    }
    return out;
}

Mat<Rational> identity_block(std::size_t d, std::size_t cols)
{
    Mat<Rational> m(d, Vec<Rational>(cols, Rational(0)));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
    return m;
}

// Contact point of ball i with a plane of unit normal n, on the side the ball lies against.
PointD<double> contact(const BallModel& model, std::size_t i, const Vec<double>& n, double towards)
{
    PointD<double> t = model.centers[i];
    for (std::size_t k = 0; k < t.size(); ++k) t[k] += towards * model.radii[i] * n[k];
    return t;
}

double signed_value(const Hyperplane<double>& h, const PointD<double>& x) { return dot(h.normal, x) - h.offset; }

// Orientation indicator of a coinciding contact pair.
PointD<double> indicator(const PointD<double>& r, const PointD<double>& b)
{
    PointD<double> o = r;
    o[0] = r[0] + (b[1] - r[1]);
    o[1] = r[1] + (r[0] - b[0]);
    return o;
}

std::optional<CriticalSeparator> accept(const BallModel& model, Hyperplane<double> h, Vec<double> aux, PointD<double> r,
                                        PointD<double> b)
{
    CriticalSeparator sep{std::move(h), std::move(aux), std::move(r), std::move(b), {}};
    sep.o = indicator(sep.red_hat, sep.blue_hat);
    const double s = signed_value(sep.h, sep.o);
    if (std::fabs(s) <= model.tolerance) return std::nullopt;  // touching contacts: the balls meet
    if (s > 0) return std::nullopt;
    return sep;
}

// Tangent planes n.x = b with reds on the negative side; extra rows constrain n further.
std::vector<Hyperplane<double>> tangent_planes(const BallModel& model, const std::vector<std::size_t>& ids,
                                               const Mat<Rational>& extra_rows, const Vec<Rational>& extra_rhs)
{
    const std::size_t d = model.dimension;
    Mat<Rational> a;
    Vec<Rational> rhs;
    for (auto i : ids) {
        Vec<Rational> row(model.exact_centers[i].begin(), model.exact_centers[i].end());
        row.push_back(Rational(-1));
        a.push_back(std::move(row));
        rhs.push_back(model.colors[i] == Color::red ? Rational(-model.exact_radii[i]) : model.exact_radii[i]);
    }
    a.insert(a.end(), extra_rows.begin(), extra_rows.end());
    rhs.insert(rhs.end(), extra_rhs.begin(), extra_rhs.end());
    std::vector<Hyperplane<double>> out;
    for (auto& y : line_sphere(a, rhs, identity_block(d, d + 1))) {
        Hyperplane<double> h;
        h.offset = y[d];
        y.resize(d);
        h.normal = std::move(y);
        out.push_back(std::move(h));
    }
    return out;
}

std::optional<CriticalSeparator> critical_2d(const BallModel& model, const std::vector<std::size_t>& ids)
{
    for (auto& h : tangent_planes(model, ids, {}, {})) {
        const std::size_t r = model.colors[ids[0]] == Color::red ? ids[0] : ids[1];
        const std::size_t b = r == ids[0] ? ids[1] : ids[0];
        auto tr = contact(model, r, h.normal, 1.0);
        auto tb = contact(model, b, h.normal, -1.0);
        Vec<double> aux = sub(tb, tr);
        if (auto sep = accept(model, h, std::move(aux), std::move(tr), std::move(tb))) return sep;
    }
    return std::nullopt;
}

// d = 3 with one red and one blue ball: the contact chord must be horizontal.
std::optional<CriticalSeparator> critical_3d_pair(const BallModel& model, const std::vector<std::size_t>& ids)
{
    const std::size_t r = model.colors[ids[0]] == Color::red ? ids[0] : ids[1];
    const std::size_t b = r == ids[0] ? ids[1] : ids[0];
    const Rational s = model.exact_radii[r] + model.exact_radii[b];
    if (sgn(s) == 0) return std::nullopt;
    const Rational d3 = model.exact_centers[b][2] - model.exact_centers[r][2];
    Mat<Rational> extra{{Rational(0), Rational(0), s, Rational(0)}};
    for (auto& h : tangent_planes(model, {r, b}, extra, {d3})) {
        auto tr = contact(model, r, h.normal, 1.0);
        auto tb = contact(model, b, h.normal, -1.0);
        Vec<double> aux = sub(tb, tr);
        if (auto sep = accept(model, h, std::move(aux), std::move(tr), std::move(tb))) return sep;
    }
    return std::nullopt;
}

// d = 3 with three balls tangent to one plane.
std::optional<CriticalSeparator> critical_3d_triple(const BallModel& model, const std::vector<std::size_t>& ids)
{
    for (auto& h : tangent_planes(model, ids, {}, {})) {
        const auto& n = h.normal;
        const double horizontal = std::hypot(n[0], n[1]);
        if (horizontal <= model.tolerance) ball_violation("critical plane parallel to the x1x2-plane");
        Vec<double> w{-n[1] / horizontal, n[0] / horizontal, 0.0};
        Vec<double> z{n[1] * w[2] - n[2] * w[1], n[2] * w[0] - n[0] * w[2], n[0] * w[1] - n[1] * w[0]};
        std::vector<std::size_t> lone;
        std::vector<std::size_t> pair;
        for (auto i : ids) {
            const bool minority = std::count_if(ids.begin(), ids.end(), [&](std::size_t j) {
                                      return model.colors[j] == model.colors[i];
                                  }) == 1;
            (minority ? lone : pair).push_back(i);
        }
        auto at = [&](std::size_t i) { return contact(model, i, n, model.colors[i] == Color::red ? 1.0 : -1.0); };
        const auto t_lone = at(lone[0]);
        const auto t0 = at(pair[0]);
        const auto t1 = at(pair[1]);
        const double z_lone = dot(z, t_lone);
        const double z0 = dot(z, t0);
        const double z1 = dot(z, t1);
        if (std::fabs(z1 - z0) <= model.tolerance) ball_violation("projected contact points coincide");
        const double lambda = (z_lone - z0) / (z1 - z0);
        if (lambda <= model.tolerance || lambda >= 1 - model.tolerance) continue;
        PointD<double> hat(3);
        for (std::size_t k = 0; k < 3; ++k) hat[k] = (1 - lambda) * t0[k] + lambda * t1[k];
        const bool lone_red = model.colors[lone[0]] == Color::red;
        if (auto sep = accept(model, h, w, lone_red ? t_lone : hat, lone_red ? hat : t_lone)) return sep;
    }
    return std::nullopt;
}

// Separable probability of the intervals [x_d - r, x_d + r], exactly.
Rational interval_charges(const BallModel& model, const ExistenceModel<Rational>& existence)
{
    const std::size_t last = model.dimension - 1;
    std::vector<Rational> lo;
    std::vector<Rational> hi;
    for (std::size_t i = 0; i < model.size(); ++i) {
        lo.push_back(model.exact_centers[i][last] - model.exact_radii[i]);
        hi.push_back(model.exact_centers[i][last] + model.exact_radii[i]);
    }
    Rational total = 0;
    for (std::size_t p = 0; p < model.size(); ++p) {
        ScenarioAccumulator<Rational> acc(existence);
        acc.add_present(p);
        std::vector<std::size_t> beyond;
        for (std::size_t q = 0; q < model.size(); ++q) {
            if (q == p) continue;
            if (model.colors[q] == model.colors[p]) {
                if (hi[q] > hi[p] || (hi[q] == hi[p] && q > p)) acc.add_absent(q);
            } else if (lo[q] <= hi[p]) {
                acc.add_absent(q);
            } else {
                beyond.push_back(q);
            }
        }
        const Rational with_any = acc.value();
        for (auto q : beyond) acc.add_absent(q);
        total += with_any - acc.value();
    }
    return total;
}

// Support planes of the balls `ids` with normal in the span of their center differences.
void configs_of(const BallModel& model, const std::vector<std::size_t>& ids, bool tuple,
                std::vector<BallSupportConfig>& out)
{
    const std::size_t d = model.dimension;
    const std::size_t k = ids.size();
    std::vector<Vec<Rational>> basis;
    for (std::size_t j = 1; j < k; ++j) basis.push_back(sub(model.exact_centers[ids[j]], model.exact_centers[ids[0]]));
    const std::size_t cols = basis.size() + 2;
    Mat<Rational> a;
    Vec<Rational> rhs;
    for (auto i : ids) {
        Vec<Rational> row;
        for (const auto& v : basis) row.push_back(dot(v, model.exact_centers[i]));
        const bool red = model.colors[i] == Color::red;
        row.push_back(Rational(red ? 1 : 0));
        row.push_back(Rational(red ? 0 : 1));
        a.push_back(std::move(row));
        rhs.push_back(red ? Rational(-model.exact_radii[i]) : model.exact_radii[i]);
    }
    Mat<Rational> m(d, Vec<Rational>(cols, Rational(0)));
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t j = 0; j < basis.size(); ++j) m[r][j] = basis[j][r];
    }
    for (const auto& y : line_sphere(a, rhs, m)) {
        BallSupportConfig base;
        base.omega.assign(d, 0.0);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t j = 0; j < basis.size(); ++j) base.omega[r] += basis[j][r].get_d() * y[j];
        }
        base.b_red = y[cols - 2];
        base.b_blue = y[cols - 1];
        if (base.b_red - base.b_blue <= model.tolerance) continue;
        base.margin = (base.b_red - base.b_blue) / 2;
        for (auto i : ids) (model.colors[i] == Color::red ? base.red_ids : base.blue_ids).push_back(i);

        std::vector<std::size_t> extras;
        if (tuple) {
            for (std::size_t i = ids.back() + 1; i < model.size(); ++i) {
                const bool red = model.colors[i] == Color::red;
                const double v = dot(base.omega, model.centers[i]) + (red ? base.b_red : base.b_blue);
                if (std::fabs(v - (red ? -model.radii[i] : model.radii[i])) <= model.tolerance) extras.push_back(i);
            }
        }
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << extras.size()); ++mask) {
            BallSupportConfig c = base;
            for (std::size_t e = 0; e < extras.size(); ++e) {
                if (mask >> e & 1) (model.colors[extras[e]] == Color::red ? c.red_ids : c.blue_ids).push_back(extras[e]);
            }
            // the contact hulls must meet after projecting out omega
            std::vector<Vec<double>> diffs;
            for (auto r : c.red_ids) {
                const auto tr = contact(model, r, c.omega, 1.0);
                for (auto b : c.blue_ids) {
                    auto diff = sub(tr, contact(model, b, c.omega, -1.0));
                    const double along = dot(diff, c.omega);
                    for (std::size_t q = 0; q < d; ++q) diff[q] -= along * c.omega[q];
                    diffs.push_back(std::move(diff));
                }
            }
            if (std::sqrt(squared_norm(min_norm_point(diffs).point)) <= model.tolerance) out.push_back(std::move(c));
        }
    }
}

PointD<Rational> to_rational_point(const PointD<double>& p)
{
    PointD<Rational> out;
    for (double v : p) out.push_back(rational_from_double(v));
    return out;
}

// min over blues of (n.c - r) minus max over reds of (n.c + r): positive iff n separates the hulls.
double margin_value(const std::vector<Ball>& reds, const std::vector<Ball>& blues, const Vec<double>& n)
{
    double low = std::numeric_limits<double>::infinity();
    double high = -std::numeric_limits<double>::infinity();
    for (const auto& b : blues) low = std::min(low, dot(n, b.center) - b.radius);
    for (const auto& r : reds) high = std::max(high, dot(n, r.center) + r.radius);
    return low - high;
}

// Unit vectors n in span(basis) with rows . n = rhs, when these form a line.
void unit_solutions(const Mat<double>& basis, const Mat<double>& rows, const Vec<double>& rhs,
                    std::vector<Vec<double>>& out)
{
    const std::size_t k = basis.size();
    const std::size_t d = basis.front().size();
    Mat<double> a;
    for (const auto& row : rows) {
        Vec<double> r;
        for (const auto& v : basis) r.push_back(dot(row, v));
        a.push_back(std::move(r));
    }
    auto dir = null_space(a, k);
    if (dir.size() != 1) return;
    Mat<double> aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(rhs[i]);
    auto pivots = rref(aug, k);
    Vec<double> y0(k, 0.0);
    for (std::size_t i = 0; i < pivots.size(); ++i) y0[pivots[i]] = aug[i][k];
    auto lift = [&](const Vec<double>& y) {
        Vec<double> n(d, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t c = 0; c < d; ++c) n[c] += y[j] * basis[j][c];
        }
        return n;
    };
    const auto p = lift(y0);
    const auto q = lift(dir.front());
    const double qq = squared_norm(q);
    const double pq = dot(p, q);
    const double disc = pq * pq - qq * (squared_norm(p) - 1);
    if (qq < 1e-24 || disc < 0) return;
    for (double s : {-1.0, 1.0}) out.push_back(add(p, scale(q, (-pq + s * std::sqrt(disc)) / qq)));
}

// Refines a near-optimal separating direction: the optimum of the concave margin
// function is a KKT point of the balls active there, so the candidate directions
// of the nearly active balls contain it.
std::pair<double, Vec<double>> polish_margin(const std::vector<Ball>& reds, const std::vector<Ball>& blues,
                                             const Vec<double>& guess, double window)
{
    constexpr std::size_t cap = 6;
    auto near = [&](const std::vector<Ball>& set, double sign) {
        std::vector<std::pair<double, std::size_t>> vals;
        for (std::size_t i = 0; i < set.size(); ++i) vals.push_back({sign * dot(guess, set[i].center) + set[i].radius, i});
        std::sort(vals.rbegin(), vals.rend());
        std::vector<const Ball*> out;
        for (const auto& [v, i] : vals) {
            if (out.size() == cap || v < vals.front().first - window) break;
            out.push_back(&set[i]);
        }
        return out;
    };
    const auto rs = near(reds, 1.0);
    const auto bs = near(blues, -1.0);
    const std::size_t d = guess.size();
    struct Tie {
        Vec<double> a;
        double e;
    };
    std::vector<Tie> ties;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = i + 1; j < rs.size(); ++j) {
            ties.push_back({sub(rs[i]->center, rs[j]->center), rs[j]->radius - rs[i]->radius});
        }
    }
    for (std::size_t i = 0; i < bs.size(); ++i) {
        for (std::size_t j = i + 1; j < bs.size(); ++j) {
            ties.push_back({sub(bs[i]->center, bs[j]->center), bs[i]->radius - bs[j]->radius});
        }
    }
    std::vector<Vec<double>> candidates{guess};
    std::vector<Vec<double>> pairs;
    for (const auto* r : rs) {
        for (const auto* b : bs) {
            auto D = sub(b->center, r->center);
            const double len = std::sqrt(squared_norm(D));
            if (len > 0) candidates.push_back(scale(D, 1.0 / len));
            pairs.push_back(std::move(D));
        }
    }
    Mat<double> full(d, Vec<double>(d, 0.0));
    for (std::size_t c = 0; c < d; ++c) full[c][c] = 1;
    for (const auto& t : ties) {
        for (const auto& D : pairs) unit_solutions({D, t.a}, {t.a}, {t.e}, candidates);
        if (d == 2) unit_solutions(full, {t.a}, {t.e}, candidates);
    }
    for (std::size_t i = 0; d >= 3 && i < ties.size(); ++i) {
        for (std::size_t j = i + 1; j < ties.size(); ++j) {
            unit_solutions(full, {ties[i].a, ties[j].a}, {ties[i].e, ties[j].e}, candidates);
        }
    }
    std::pair<double, Vec<double>> best{-std::numeric_limits<double>::infinity(), guess};
    for (auto& n : candidates) {
        const double v = margin_value(reds, blues, n);
        if (v > best.first) best = {v, std::move(n)};
    }
    return best;
}

}  // namespace

StochasticDataset reduce_polytopes(const StochasticDataset& dataset)
{
    StochasticDataset out = dataset;
    out.objects.clear();
    for (const auto& obj : dataset.objects) {
        if (const auto* poly = std::get_if<PolytopeShape>(&obj.shape)) {
            if (poly->vertices.empty()) throw DatasetError(DatasetErrorCode::malformed, "polytope without vertices");
            std::optional<std::size_t> group;
            if (obj.prob != 1 && poly->vertices.size() > 1) {
                group = out.groups.size();
                out.groups.push_back({obj.prob});
            }
            for (const auto& v : poly->vertices) out.points.push_back({v, obj.color, obj.prob, group});
        } else {
            out.objects.push_back(obj);
        }
    }
    return out;
}

bool BallTable::all_points() const
{
    return std::all_of(radii.begin(), radii.end(), [](const Rational& r) { return sgn(r) == 0; });
}

BallTable ball_table(const StochasticDataset& dataset)
{
    StochasticDataset reduced = reduce_polytopes(dataset);
    std::vector<StochasticObject> balls = std::move(reduced.objects);
    reduced.objects.clear();
    BallTable out;
    out.table = locations_of(reduced);
    out.radii.assign(out.table.size(), Rational(0));
    for (const auto& obj : balls) {
        const auto& ball = std::get<BallShape>(obj.shape);
        const std::size_t unit = out.table.units.size();
        out.table.units.push_back({UnitKind::exclusive, 0, {out.table.size()}});
        out.table.locations.push_back({ball.center, obj.color, obj.prob, unit});
        out.radii.push_back(ball.radius);
    }
    return out;
}

BallDistance ball_hull_distance(const std::vector<Ball>& reds, const std::vector<Ball>& blues)
{
    if (reds.empty() || blues.empty()) throw std::invalid_argument("ball_hull_distance: both colors required");
    const std::size_t d = reds.front().center.size();
    double extent = 1.0;
    for (const auto* set : {&reds, &blues}) {
        for (const auto& b : *set) {
            detail::require_dimension(b.center.size(), d, "ball_hull_distance");
            for (double c : b.center) extent = std::max(extent, std::fabs(c));
            extent = std::max(extent, b.radius);
        }
    }
    std::size_t next_id = reds.size() * blues.size();
    // support point of CH(reds) - CH(blues) minimising x . q
    auto support = [&](const Vec<double>& x) {
        const double len = std::sqrt(squared_norm(x));
        std::size_t best_r = 0;
        std::size_t best_b = 0;
        double low = std::numeric_limits<double>::infinity();
        double high = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < reds.size(); ++i) {
            const double v = dot(x, reds[i].center) - reds[i].radius * len;
            if (v < low) low = v, best_r = i;
        }
        for (std::size_t j = 0; j < blues.size(); ++j) {
            const double v = dot(x, blues[j].center) + blues[j].radius * len;
            if (v > high) high = v, best_b = j;
        }
        Vec<double> q = sub(reds[best_r].center, blues[best_b].center);
        const double shrink = (reds[best_r].radius + blues[best_b].radius) / len;
        for (std::size_t k = 0; k < d; ++k) q[k] -= shrink * x[k];
        const bool curved = reds[best_r].radius > 0 || blues[best_b].radius > 0;
        return std::make_pair(std::move(q), curved ? next_id++ : best_r * blues.size() + best_b);
    };
    auto start = sub(reds.front().center, blues.front().center);
    auto mn = wolfe_min_norm<double>(support, start, 0, 1e-14, 20000);
    BallDistance out;
    out.iterations = mn.iterations;
    out.converged = mn.converged;
    const double upper = std::sqrt(squared_norm(mn.point));
    if (upper <= 1e-12 * extent) return out;
    const auto [q, id] = support(mn.point);
    (void)id;
    out.lower = std::min(upper, std::max(0.0, dot(mn.point, q) / upper));
    out.direction = scale(mn.point, -1.0 / upper);
    auto [value, direction] = polish_margin(reds, blues, out.direction, 1e-3 * extent);
    if (value > out.lower) {
        out.lower = std::min(value, upper);
        out.direction = std::move(direction);
    }
    out.distance = out.lower;
    out.separable = out.distance > 1e-10 * extent;
    return out;
}

bool ball_separability_check(const std::vector<Ball>& reds, const std::vector<Ball>& blues)
{
    if (reds.empty() || blues.empty()) return true;
    require_ball_dimension(reds.front().center.size(), "ball_separability_check");
    const bool points = std::all_of(reds.begin(), reds.end(), [](const Ball& b) { return b.radius == 0; }) &&
                        std::all_of(blues.begin(), blues.end(), [](const Ball& b) { return b.radius == 0; });
    if (points) {
        std::vector<PointD<Rational>> r;
        std::vector<PointD<Rational>> b;
        for (const auto& x : reds) r.push_back(to_rational_point(x.center));
        for (const auto& x : blues) b.push_back(to_rational_point(x.center));
        return check_separable(r, b).separable;
    }
    return ball_hull_distance(reds, blues).separable;
}

BallModel BallModel::from(const BallTable& table)
{
    BallModel m;
    m.dimension = table.table.dimension;
    m.exact_centers = table.table.coordinates();
    m.exact_radii = table.radii;
    m.centers = convert_points<double>(m.exact_centers);
    double extent = 1.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        m.radii.push_back(table.radii[i].get_d());
        m.colors.push_back(table.table.locations[i].color);
        for (double c : m.centers[i]) extent = std::max(extent, std::fabs(c));
        extent = std::max(extent, m.radii[i]);
    }
    m.existence = ExistenceModel<double>::from(table.table);
    m.tolerance = 1e-9 * extent;
    return m;
}

std::optional<CriticalSeparator> critical_extreme_separator(const BallModel& model, const std::vector<std::size_t>& ids)
{
    const std::size_t d = model.dimension;
    require_ball_dimension(d, "critical_extreme_separator");
    if (ids.size() > d) throw std::invalid_argument("critical_extreme_separator: at most d balls");
    if (!bichromatic(model.colors, ids)) throw std::invalid_argument("critical_extreme_separator: both colors required");
    const bool points = std::all_of(ids.begin(), ids.end(), [&](std::size_t i) { return sgn(model.exact_radii[i]) == 0; });
    if (points && ids.size() < d) return std::nullopt;
    if (d == 2) return critical_2d(model, ids);
    return ids.size() == 2 ? critical_3d_pair(model, ids) : critical_3d_triple(model, ids);
}

double lambda_critical(const BallModel& model, const std::vector<std::size_t>& ids, const CriticalSeparator& sep)
{
    ScenarioAccumulator<double> acc(model.existence);
    for (auto i : ids) {
        const double s = signed_value(sep.h, model.centers[i]);
        const double want = model.colors[i] == Color::red ? -model.radii[i] : model.radii[i];
        if (std::fabs(s - want) > model.tolerance) return 0.0;
        acc.add_present(i);
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (std::find(ids.begin(), ids.end(), i) != ids.end()) continue;
        const double s = signed_value(sep.h, model.centers[i]);
        // a ball is admissible only strictly on its own color's side of h
        const bool ok = model.colors[i] == Color::red ? s + model.radii[i] < -model.tolerance
                                                      : s - model.radii[i] > model.tolerance;
        if (!ok) acc.add_absent(i);
    }
    return acc.value();
}

BallSPResult ball_separable_probability(const BallTable& table, const BallOptions& options)
{
    const std::size_t d = table.table.dimension;
    require_ball_dimension(d, "ball_separable_probability");
    if (options.validate) validate_ball_position(table, true);
    const BallModel model = BallModel::from(table);
    const auto exact_existence = ExistenceModel<Rational>::from(table.table);
    Rational recursion = trivial_term(PointModel<Rational>::from(table.table));
    if (d == 3) recursion += interval_charges(model, exact_existence);

    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t k = 2; k <= d; ++k) {
        for_each_combination(model.size(), k, [&](const std::vector<std::size_t>& ids) {
            if (bichromatic(model.colors, ids)) subsets.push_back(ids);
        });
    }
    std::vector<double> lambdas(subsets.size(), 0.0);
    std::vector<std::uint64_t> defined(subsets.size(), 0);
    parallel_for(subsets.size(), options.threads, [&](std::size_t i) {
        if (auto sep = critical_extreme_separator(model, subsets[i])) {
            defined[i] = 1;
            lambdas[i] = lambda_critical(model, subsets[i], *sep);
        }
    });
    BallSPResult out;
    out.recursion = recursion.get_d();
    out.lambda_sum = tree_sum(std::move(lambdas));
    out.critical_sets = tree_sum(std::move(defined));
    out.sp = out.recursion + out.lambda_sum;
    return out;
}

std::vector<std::size_t> BallSupportConfig::ids() const
{
    std::vector<std::size_t> out = red_ids;
    out.insert(out.end(), blue_ids.begin(), blue_ids.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<BallSupportConfig> enumerate_ball_support_configs(const BallModel& model, std::size_t threads)
{
    const std::size_t d = model.dimension;
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t k = 2; k <= d + 1; ++k) {
        for_each_combination(model.size(), k, [&](const std::vector<std::size_t>& ids) {
            if (bichromatic(model.colors, ids)) subsets.push_back(ids);
        });
    }
    std::vector<std::vector<BallSupportConfig>> found(subsets.size());
    parallel_for(subsets.size(), threads,
                 [&](std::size_t i) { configs_of(model, subsets[i], subsets[i].size() == d + 1, found[i]); });
    std::vector<BallSupportConfig> out;
    for (auto& f : found) std::move(f.begin(), f.end(), std::back_inserter(out));
    return out;
}

double ball_xi(const BallModel& model, const BallSupportConfig& config)
{
    const auto members = config.ids();
    ScenarioAccumulator<double> acc(model.existence);
    for (auto i : members) acc.add_present(i);
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (std::binary_search(members.begin(), members.end(), i)) continue;
        const double v = dot(config.omega, model.centers[i]);
        // balls reaching their own support plane or beyond it towards the separator
        const bool forbidden = model.colors[i] == Color::red
                                   ? v + config.b_red + model.radii[i] >= -model.tolerance
                                   : v + config.b_blue - model.radii[i] <= model.tolerance;
        if (forbidden) acc.add_absent(i);
    }
    return acc.value();
}

BallESMResult ball_expected_margin(const BallTable& table, const BallOptions& options)
{
    require_ball_dimension(table.table.dimension, "ball_expected_margin");
    if (options.validate) validate_ball_position(table, false);
    const BallModel model = BallModel::from(table);
    auto configs = enumerate_ball_support_configs(model, options.threads);
    std::vector<double> xis(configs.size());
    std::vector<double> terms(configs.size());
    parallel_for(configs.size(), options.threads, [&](std::size_t i) {
        xis[i] = ball_xi(model, configs[i]);
        terms[i] = xis[i] * configs[i].margin;
    });
    BallESMResult out;
    out.config_count = configs.size();
    out.xi_sum = tree_sum(std::move(xis));
    out.emar = tree_sum(std::move(terms));
    return out;
}

void validate_ball_position(const BallTable& table, bool strong)
{
    require_ball_dimension(table.table.dimension, "validate_ball_position");
    for (const auto& r : table.radii) {
        if (sgn(r) < 0) throw DatasetError(DatasetErrorCode::malformed, "negative ball radius");
    }
    const auto centers = table.table.coordinates();
    require_general_position(centers, PositionLevel::gp, "ball centers");
    if (strong) {
        std::vector<PointD<Rational>> points;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            if (sgn(table.radii[i]) == 0) points.push_back(centers[i]);
        }
        require_general_position(points, PositionLevel::sgpp, "zero-radius balls");
    }
}

}  // namespace stochsep
