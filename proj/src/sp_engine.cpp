#include "stochsep/sp_engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "stochsep/combinatorics.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/parallel.hpp"
#include "stochsep/separation.hpp"

namespace stochsep {

namespace {

[[noreturn]] void sgpp_violation(const std::string& what) { throw DegenerateInput("SGPP violation: " + what); }

// Witness for the on-set `pts` with colors `cols`, via the one-dimensional
// null space of [1 ... 1; coordinates 3..D].
template <typename T>
std::optional<Witness<T>> witness_of(const std::vector<PointD<T>>& pts, const std::vector<Color>& cols)
{
    const std::size_t m = pts.size();
    const std::size_t D = pts.front().size();
    Mat<T> rows;
    rows.push_back(Vec<T>(m, T(1)));
    for (std::size_t j = 2; j < D; ++j) {
        Vec<T> row;
        for (const auto& p : pts) row.push_back(p[j]);
        rows.push_back(std::move(row));
    }
    auto ns = null_space(std::move(rows), m);
    if (ns.size() != 1) sgpp_violation("projected on-set is affinely dependent");
    const auto& mu = ns.front();
    int red_sign = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const int s = sign_of(mu[i]);
        if (s == 0) sgpp_violation("projected on-set subset coincides");
        if (cols[i] == Color::red) {
            if (red_sign == 0) red_sign = s;
            if (s != red_sign) return std::nullopt;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (cols[i] == Color::blue && sign_of(mu[i]) == red_sign) return std::nullopt;
    }
    Witness<T> w{Vec<T>(D, T(0)), Vec<T>(D, T(0))};
    T red_total = 0;
    T blue_total = 0;
    for (std::size_t i = 0; i < m; ++i) {
        auto& target = cols[i] == Color::red ? w.red : w.blue;
        (cols[i] == Color::red ? red_total : blue_total) += mu[i];
        for (std::size_t k = 0; k < D; ++k) target[k] += mu[i] * pts[i][k];
    }
    for (std::size_t k = 0; k < D; ++k) {
        w.red[k] /= red_total;
        w.blue[k] /= blue_total;
    }
    return w;
}

template <typename T>
bool bichromatic(const std::vector<Color>& colors, const std::vector<std::size_t>& ids)
{
    bool red = false;
    bool blue = false;
    for (auto i : ids) (colors[i] == Color::red ? red : blue) = true;
    return red && blue;
}

// Fills h, aux, witness and o of a candidate whose on_set is set.
template <typename T>
void resolve(const PointModel<T>& model, CandidateSeparator<T>& c)
{
    std::vector<PointD<T>> pts;
    std::vector<Color> cols;
    for (auto i : c.on_set) {
        pts.push_back(model.coords[i]);
        cols.push_back(model.colors[i]);
    }
    try {
        c.h = span_hyperplane(pts);
    } catch (const DegenerateInput&) {
        sgpp_violation("candidate on-set is affinely dependent");
    }
    c.aux = {-c.h.normal[1], c.h.normal[0]};
    c.witness = witness_of(pts, cols);
    if (c.witness) c.o = orientation_indicator(c.witness->red, c.witness->blue);
}

template <typename T>
int indicator_side(const CandidateSeparator<T>& c)
{
    const int s = side_of(c.h, *c.o);
    if (s == 0) sgpp_violation("candidate hyperplane is parallel to the x1x2-plane");
    return s;
}

// Locations that must be absent for the candidate's charge (condition 3).
template <typename T>
std::vector<std::size_t> forbidden_locations(const PointModel<T>& model, const CandidateSeparator<T>& c)
{
    const int o_side = indicator_side(c);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (std::binary_search(c.on_set.begin(), c.on_set.end(), i)) continue;
        const int s = side_of(c.h, model.coords[i]);
        if (s == 0) sgpp_violation("location on a candidate hyperplane");
        if ((model.colors[i] == Color::red && s != o_side) || (model.colors[i] == Color::blue && s == o_side)) {
            out.push_back(i);
        }
    }
    return out;
}

template <typename T>
T scan_tau(const PointModel<T>& model, CandidateSeparator<T>& c)
{
    resolve(model, c);
    if (!c.witness) return T(0);
    ScenarioAccumulator<T> acc(model.existence);
    for (auto i : c.on_set) acc.add_present(i);
    if (sign_of(acc.value()) == 0 && NumTraits<T>::exact) return T(0);
    const int o_side = indicator_side(c);
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (std::binary_search(c.on_set.begin(), c.on_set.end(), i)) continue;
        const int s = side_of(c.h, model.coords[i]);
        if (s == 0) sgpp_violation("location on a candidate hyperplane");
        if ((model.colors[i] == Color::red && s != o_side) || (model.colors[i] == Color::blue && s == o_side)) {
            acc.add_absent(i);
            // constraints only ever lower the value
            if (NumTraits<T>::exact && acc.value() == 0) return T(0);
        }
    }
    return acc.value();
}

template <typename T>
T cross2(const Vec<T>& a, const Vec<T>& b)
{
    return a[0] * b[1] - a[1] * b[0];
}

template <typename T>
int half_of(const Vec<T>& a)
{
    const int sy = sign_of(a[1]);
    return (sy > 0 || (sy == 0 && sign_of(a[0]) > 0)) ? 0 : 1;
}

// Sum of tau over the candidates E = F + {p} with p > max(F), by the
// radial order about the affine span of F.
template <typename T>
T radial_sum(const PointModel<T>& model, const std::vector<std::size_t>& F)
{
    const std::size_t n = model.size();
    const std::size_t D = model.dimension;
    bool has_red = false;
    bool has_blue = false;
    for (auto i : F) (model.colors[i] == Color::red ? has_red : has_blue) = true;
    std::vector<char> is_candidate(n, 0);
    bool any = false;
    for (std::size_t p = F.back() + 1; p < n; ++p) {
        const bool ok = model.colors[p] == Color::red ? has_blue : has_red;
        is_candidate[p] = ok;
        any = any || ok;
    }
    if (!any) return T(0);

    const auto& f0 = model.coords[F.front()];
    Mat<T> dirs;
    for (std::size_t i = 1; i < F.size(); ++i) dirs.push_back(sub(model.coords[F[i]], f0));
    auto basis = dirs.empty() ? std::vector<Vec<T>>{} : null_space(dirs, D);
    if (dirs.empty()) {
        for (std::size_t k = 0; k < D; ++k) {
            Vec<T> e(D, T(0));
            e[k] = 1;
            basis.push_back(std::move(e));
        }
    }
    if (basis.size() != 2) sgpp_violation("fixed points are affinely dependent");
    auto quotient = [&](const PointD<T>& x) {
        auto rel = sub(x, f0);
        return Vec<T>{dot(basis[0], rel), dot(basis[1], rel)};
    };

    std::vector<std::size_t> order;
    std::vector<Vec<T>> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::find(F.begin(), F.end(), i) != F.end()) continue;
        q[i] = quotient(model.coords[i]);
        if (sign_of(q[i][0]) == 0 && sign_of(q[i][1]) == 0) sgpp_violation("location in the span of fixed points");
        order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int ha = half_of(q[a]);
        const int hb = half_of(q[b]);
        if (ha != hb) return ha < hb;
        return sign_of(cross2(q[a], q[b])) > 0;
    });
    const std::size_t M = order.size();

    // A1 = reds right + blues left, A2 = reds left + blues right
    ScenarioAccumulator<T> a1(model.existence);
    ScenarioAccumulator<T> a2(model.existence);
    for (auto i : F) {
        a1.add_present(i);
        a2.add_present(i);
    }
    enum Status : char { on, left, right };
    std::vector<Status> status(n, on);
    auto target = [&](std::size_t id, Status s) -> ScenarioAccumulator<T>* {
        if (s == on) return nullptr;
        const bool red = model.colors[id] == Color::red;
        return (red == (s == right)) ? &a1 : &a2;
    };
    auto set_status = [&](std::size_t id, Status s) {
        if (auto* acc = target(id, status[id])) acc->remove_absent(id);
        status[id] = s;
        if (auto* acc = target(id, s)) acc->add_absent(id);
    };
    auto side = [&](std::size_t pivot, std::size_t other) {
        const int s = sign_of(cross2(q[pivot], q[other]));
        if (s == 0) sgpp_violation("location on a candidate hyperplane");
        return s;
    };

    for (std::size_t j = 1; j < M; ++j) set_status(order[j], side(order[0], order[j]) > 0 ? left : right);
    std::size_t e = 1;  // window (i, e) of doubled indices holds the left points
    while (e < M && status[order[e]] == left) ++e;

    std::vector<PointD<T>> pts;
    std::vector<Color> cols;
    for (auto i : F) {
        pts.push_back(model.coords[i]);
        cols.push_back(model.colors[i]);
    }
    pts.emplace_back();
    cols.emplace_back();

    T sum = 0;
    for (std::size_t i = 0; i < M; ++i) {
        const std::size_t p = order[i];
        if (is_candidate[p]) {
            pts.back() = model.coords[p];
            cols.back() = model.colors[p];
            if (auto w = witness_of(pts, cols)) {
                auto o = orientation_indicator(w->red, w->blue);
                const int s = sign_of(cross2(q[p], quotient(o)));
                if (s == 0) sgpp_violation("candidate hyperplane is parallel to the x1x2-plane");
                auto& acc = s > 0 ? a1 : a2;
                acc.add_present(p);
                sum += acc.value();
                acc.remove_present(p);
            }
        }
        if (i + 1 == M) break;
        const std::size_t next = order[i + 1];
        set_status(p, right);
        set_status(next, on);
        e = std::max(e, i + 2);
        while (e < i + 1 + M) {
            const std::size_t cand = order[e % M];
            if (side(next, cand) < 0) break;
            set_status(cand, left);
            ++e;
        }
    }
    return sum;
}

template <typename T>
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k)
{
    std::vector<std::vector<std::size_t>> out;
    for_each_combination(n, k, [&](const std::vector<std::size_t>& idx) { out.push_back(idx); });
    return out;
}

template <typename T>
T level_tau_sum(const PointModel<T>& model, const SPOptions& options, std::uint64_t& count)
{
    const std::size_t D = model.dimension;
    count = bichromatic_count(model.ids_of(Color::red).size(), model.ids_of(Color::blue).size(), D);
    if (options.strategy == Strategy::scan) {
        std::vector<std::vector<std::size_t>> cands;
        for_each_combination(model.size(), D, [&](const std::vector<std::size_t>& idx) {
            if (bichromatic<T>(model.colors, idx)) cands.push_back(idx);
        });
        return parallel_sum<T>(cands.size(), options.threads, [&](std::size_t k) {
            CandidateSeparator<T> c;
            c.on_set = cands[k];
            return scan_tau(model, c);
        });
    }
    auto fixed = subsets<T>(model.size(), D - 1);
    return parallel_sum<T>(fixed.size(), options.threads, [&](std::size_t k) { return radial_sum(model, fixed[k]); },
                           8);
}

}  // namespace

template <typename T>
std::optional<Witness<T>> coincidence_witness(const std::vector<PointD<T>>& reds, const std::vector<PointD<T>>& blues)
{
    if (reds.empty() || blues.empty()) throw std::invalid_argument("coincidence_witness: both colors required");
    std::vector<PointD<T>> pts = reds;
    pts.insert(pts.end(), blues.begin(), blues.end());
    std::vector<Color> cols(reds.size(), Color::red);
    cols.resize(pts.size(), Color::blue);
    if (pts.size() != pts.front().size()) throw DimensionError("coincidence_witness: need exactly d points");
    return witness_of(pts, cols);
}

template <typename T>
PointD<T> orientation_indicator(const PointD<T>& red, const PointD<T>& blue)
{
    PointD<T> o = red;
    o[0] = red[0] + (blue[1] - red[1]);
    o[1] = red[1] + (red[0] - blue[0]);
    return o;
}

template <typename T>
T trivial_term(const PointModel<T>& model)
{
    ScenarioAccumulator<T> no_red(model.existence);
    ScenarioAccumulator<T> no_blue(model.existence);
    ScenarioAccumulator<T> none(model.existence);
    for (std::size_t i = 0; i < model.size(); ++i) {
        (model.colors[i] == Color::red ? no_red : no_blue).add_absent(i);
        none.add_absent(i);
    }
    return no_red.value() + no_blue.value() - none.value();
}

template <typename T>
std::vector<CandidateSeparator<T>> enumerate_candidates(const PointModel<T>& model)
{
    if (model.dimension < 2) throw DimensionError("enumerate_candidates: d >= 2 required");
    std::vector<CandidateSeparator<T>> out;
    for_each_combination(model.size(), model.dimension, [&](const std::vector<std::size_t>& idx) {
        if (!bichromatic<T>(model.colors, idx)) return;
        CandidateSeparator<T> c;
        c.on_set = idx;
        std::vector<PointD<T>> pts;
        for (auto i : idx) pts.push_back(model.coords[i]);
        c.h = span_hyperplane(pts);
        c.aux = {-c.h.normal[1], c.h.normal[0]};
        out.push_back(std::move(c));
    });
    return out;
}

template <typename T>
T tau(const PointModel<T>& model, CandidateSeparator<T>& candidate)
{
    candidate.tau = scan_tau(model, candidate);
    return candidate.tau;
}

template <typename T>
T sp_base_1d(const PointModel<T>& model, T* charges_only)
{
    if (model.dimension != 1) throw DimensionError("sp_base_1d: d = 1 required");
    std::vector<std::size_t> order(model.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return model.coords[a][0] < model.coords[b][0]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (sign_of(model.coords[order[k]][0] - model.coords[order[k - 1]][0]) == 0) {
            sgpp_violation("coincident 1-D coordinates");
        }
    }
    // AR = reds > p + blues < p, BR = reds > p + all blues (and symmetrically)
    ScenarioAccumulator<T> ar(model.existence), br(model.existence), ab(model.existence), bb(model.existence);
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (model.colors[i] == Color::red) {
            ar.add_absent(i);
            br.add_absent(i);
            bb.add_absent(i);
        } else {
            ab.add_absent(i);
            bb.add_absent(i);
            br.add_absent(i);
        }
    }
    T charges = 0;
    for (auto p : order) {
        const bool red = model.colors[p] == Color::red;
        auto& a = red ? ar : ab;
        auto& b = red ? br : bb;
        a.remove_absent(p);
        b.remove_absent(p);
        a.add_present(p);
        b.add_present(p);
        charges += a.value() - b.value();
        a.remove_present(p);
        b.remove_present(p);
        // p now lies left of the cursor: it constrains the other color's charges
        (red ? ab : ar).add_absent(p);
    }
    if (charges_only) *charges_only = charges;
    return trivial_term(model) + charges;
}

template <typename T>
SPResult<T> separable_probability(const PointModel<T>& model, const SPOptions& options)
{
    if (model.dimension < 1) throw DimensionError("separable_probability: d >= 1 required");
    SPResult<T> result;
    result.strategy = options.strategy;
    T total = 0;
    for (std::size_t first = 1;; first += 2) {
        const PointModel<T> level = first == 1 ? model : model.projected(first);
        LevelTerm<T> term;
        term.dimension = level.dimension;
        if (level.dimension == 1) {
            T charges = 0;
            T base = sp_base_1d(level, &charges);
            term.trivial = base - charges;
            term.tau_sum = charges;
            term.candidates = level.size();
            total += base;
            result.per_level.push_back(std::move(term));
            break;
        }
        term.tau_sum = level_tau_sum(level, options, term.candidates);
        total += term.tau_sum;
        if (level.dimension == 2) {
            term.trivial = trivial_term(level);
            total += term.trivial;
            result.per_level.push_back(std::move(term));
            break;
        }
        result.per_level.push_back(std::move(term));
    }
    result.sp = total;
    return result;
}

template <typename T>
SPResult<T> separable_probability(const LocationTable& table, const SPOptions& options)
{
    if (table.dimension < 1) throw DimensionError("separable_probability: d >= 1 required");
    if (options.validate) require_general_position(table.coordinates(), PositionLevel::sgpp, "separable_probability");
    return separable_probability(PointModel<T>::from(table), options);
}

#define STOCHSEP_INSTANTIATE(T)                                                                                   \
    template SPResult<T> separable_probability<T>(const LocationTable&, const SPOptions&);                        \
    template SPResult<T> separable_probability<T>(const PointModel<T>&, const SPOptions&);                        \
    template T trivial_term<T>(const PointModel<T>&);                                                             \
    template std::vector<CandidateSeparator<T>> enumerate_candidates<T>(const PointModel<T>&);                    \
    template std::optional<Witness<T>> coincidence_witness<T>(const std::vector<PointD<T>>&,                      \
                                                              const std::vector<PointD<T>>&);                     \
    template PointD<T> orientation_indicator<T>(const PointD<T>&, const PointD<T>&);                              \
    template T tau<T>(const PointModel<T>&, CandidateSeparator<T>&);                                              \
    template T sp_base_1d<T>(const PointModel<T>&, T*);

STOCHSEP_INSTANTIATE(Rational)
STOCHSEP_INSTANTIATE(double)
#undef STOCHSEP_INSTANTIATE

// ---------------------------------------------------------------------------
// Deterministic instances and the charge decomposition

ExtremeSeparatorDescriptor extreme_separator(const std::vector<PointD<Rational>>& points,
                                             const std::vector<Color>& colors)
{
    std::vector<PointD<Rational>> reds;
    std::vector<PointD<Rational>> blues;
    for (std::size_t i = 0; i < points.size(); ++i) (colors[i] == Color::red ? reds : blues).push_back(points[i]);
    if (!check_separable(reds, blues).separable) throw std::invalid_argument("extreme_separator: instance is inseparable");
    ExtremeSeparatorDescriptor out;
    if (reds.empty() || blues.empty()) {
        out.at_infinity = true;
        return out;
    }
    PointModel<Rational> model;
    model.dimension = points.front().size();
    model.coords = points;
    model.colors = colors;
    for (std::size_t first = 1;; first += 2) {
        const auto level = first == 1 ? model : model.projected(first);
        out.level = (first - 1) / 2;
        out.first_coordinate = first;
        if (level.dimension == 1) {
            std::vector<std::size_t> order(level.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return level.coords[a][0] < level.coords[b][0]; });
            const Color left = level.colors[order.front()];
            std::size_t last_left = order.front();
            for (auto i : order) {
                if (level.colors[i] != left) break;
                last_left = i;
            }
            out.on_set = {last_left};
            out.separator = Hyperplane<Rational>{{Rational(1)}, level.coords[last_left][0]};
            return out;
        }
        bool found = false;
        for_each_combination(level.size(), level.dimension, [&](const std::vector<std::size_t>& idx) {
            if (!bichromatic<Rational>(level.colors, idx)) return true;
            CandidateSeparator<Rational> c;
            c.on_set = idx;
            resolve(level, c);
            if (!c.witness) return true;
            if (!forbidden_locations(level, c).empty()) return true;
            out.on_set = idx;
            out.separator = c.h;
            out.aux = c.aux;
            found = true;
            return false;
        });
        if (found) return out;
        if (level.dimension == 2) throw std::logic_error("extreme_separator: no planar extreme separator found");
    }
}

std::vector<Charge> enumerate_charges(const LocationTable& table)
{
    const auto model = PointModel<Rational>::from(table);
    std::vector<Charge> out;
    for (std::size_t first = 1;; first += 2) {
        const auto level = first == 1 ? model : model.projected(first);
        if (level.dimension == 1) {
            std::vector<std::size_t> order(level.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return level.coords[a][0] < level.coords[b][0]; });
            out.push_back({Charge::Kind::trivial, first, {}, {}, {}, trivial_term(level)});
            for (std::size_t k = 0; k < order.size(); ++k) {
                Charge c{Charge::Kind::base_1d, first, {order[k]}, {}, {}, 0};
                const Color own = level.colors[order[k]];
                for (std::size_t j = 0; j < order.size(); ++j) {
                    if (j == k) continue;
                    const bool same = level.colors[order[j]] == own;
                    if ((same && j > k) || (!same && j < k)) c.absent.push_back(order[j]);
                    if (!same && j > k) c.any_of.push_back(order[j]);
                }
                std::sort(c.absent.begin(), c.absent.end());
                auto all_absent = c.absent;
                all_absent.insert(all_absent.end(), c.any_of.begin(), c.any_of.end());
                c.prob = scenario_probability(level.existence, c.present, c.absent) -
                         scenario_probability(level.existence, c.present, all_absent);
                out.push_back(std::move(c));
            }
            break;
        }
        for_each_combination(level.size(), level.dimension, [&](const std::vector<std::size_t>& idx) {
            if (!bichromatic<Rational>(level.colors, idx)) return;
            CandidateSeparator<Rational> c;
            c.on_set = idx;
            resolve(level, c);
            if (!c.witness) return;
            Charge charge{Charge::Kind::tau, first, idx, forbidden_locations(level, c), {}, 0};
            charge.prob = scenario_probability(level.existence, charge.present, charge.absent);
            out.push_back(std::move(charge));
        });
        if (level.dimension == 2) {
            out.push_back({Charge::Kind::trivial, first, {}, {}, {}, trivial_term(level)});
            break;
        }
    }
    return out;
}

bool charge_covers(const Charge& charge, const LocationTable& table, const std::vector<bool>& present)
{
    if (charge.kind == Charge::Kind::trivial) {
        bool red = false;
        bool blue = false;
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (present[i]) (table.locations[i].color == Color::red ? red : blue) = true;
        }
        return !red || !blue;
    }
    for (auto i : charge.present) {
        if (!present[i]) return false;
    }
    for (auto i : charge.absent) {
        if (present[i]) return false;
    }
    if (charge.kind == Charge::Kind::base_1d) {
        return std::any_of(charge.any_of.begin(), charge.any_of.end(), [&](std::size_t i) { return present[i]; });
    }
    return true;
}

}  // namespace stochsep
