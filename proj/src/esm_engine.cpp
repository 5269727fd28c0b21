#include "stochsep/esm_engine.hpp"

#include <algorithm>
#include <cmath>

#include "stochsep/combinatorics.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/min_norm.hpp"
#include "stochsep/parallel.hpp"
#include "stochsep/separation.hpp"

namespace stochsep {

namespace {

[[noreturn]] void gp_violation(const std::string& what) { throw DegenerateInput("GP violation: " + what); }

template <typename T>
bool bichromatic(const std::vector<Color>& colors, const std::vector<std::size_t>& ids)
{
    bool red = false;
    bool blue = false;
    for (auto i : ids) (colors[i] == Color::red ? red : blue) = true;
    return red && blue;
}

template <typename T>
void set_margin(SupportConfig<T>& c)
{
    const T gap = c.c_blue - c.c_red;
    c.squared_margin = gap * gap / (T(4) * squared_norm(c.normal));
    c.margin = std::sqrt(to_double(c.squared_margin));
}

template <typename T>
SupportConfig<T> split(const PointModel<T>& model, const std::vector<std::size_t>& ids)
{
    SupportConfig<T> c;
    for (auto i : ids) (model.colors[i] == Color::red ? c.red_ids : c.blue_ids).push_back(i);
    return c;
}

// Configurations of at most d points: C is a support set iff it supports itself.
template <typename T>
void small_configs(const PointModel<T>& model, std::size_t size, std::vector<SupportConfig<T>>& out)
{
    for_each_combination(model.size(), size, [&](const std::vector<std::size_t>& ids) {
        if (!bichromatic<T>(model.colors, ids)) return;
        auto c = split(model, ids);
        std::vector<PointD<T>> reds;
        std::vector<PointD<T>> blues;
        for (auto i : c.red_ids) reds.push_back(model.coords[i]);
        for (auto i : c.blue_ids) blues.push_back(model.coords[i]);
        auto mm = max_margin_separator(reds, blues);
        if (!mm) gp_violation("at most d points with intersecting hulls");
        if (mm->red_support.size() != reds.size() || mm->blue_support.size() != blues.size()) return;
        c.normal = sub(mm->closest_blue, mm->closest_red);
        c.c_red = dot(c.normal, mm->closest_red);
        c.c_blue = dot(c.normal, mm->closest_blue);
        set_margin(c);
        out.push_back(std::move(c));
    });
}

// The CH(C_R) and CH(C_B) projections onto the plane orthogonal to w intersect.
template <typename T>
bool projections_meet(const PointModel<T>& model, const SupportConfig<T>& c)
{
    const T shift = (c.c_blue - c.c_red) / squared_norm(c.normal);
    std::vector<Vec<T>> diffs;
    for (auto r : c.red_ids) {
        for (auto b : c.blue_ids) diffs.push_back(add(sub(model.coords[r], model.coords[b]), scale(c.normal, shift)));
    }
    return sign_of(squared_norm(min_norm_point(diffs).point)) == 0;
}

// Configurations with more than d points, represented by their d+1 smallest ids.
template <typename T>
void tuple_configs(const PointModel<T>& model, const std::vector<std::size_t>& tuple, std::vector<SupportConfig<T>>& out)
{
    if (!bichromatic<T>(model.colors, tuple)) return;
    const std::size_t d = model.dimension;
    Mat<T> rows;
    for (auto i : tuple) {
        Vec<T> row(model.coords[i].begin(), model.coords[i].end());
        row.push_back(model.colors[i] == Color::red ? T(-1) : T(0));
        row.push_back(model.colors[i] == Color::blue ? T(-1) : T(0));
        rows.push_back(std::move(row));
    }
    auto ns = null_space(std::move(rows), d + 2);
    if (ns.size() != 1) gp_violation("support planes of a (d+1)-subset are not unique");
    auto& v = ns.front();
    SupportConfig<T> base = split(model, tuple);
    base.normal.assign(v.begin(), v.begin() + static_cast<long>(d));
    base.c_red = v[d];
    base.c_blue = v[d + 1];
    const int gap = sign_of(base.c_blue - base.c_red);
    if (gap == 0) gp_violation("d+1 points on a common hyperplane");
    if (gap < 0) {
        for (auto& x : base.normal) x = -x;
        base.c_red = -base.c_red;
        base.c_blue = -base.c_blue;
    }
    set_margin(base);

    std::vector<std::size_t> extras;
    for (std::size_t i = tuple.back() + 1; i < model.size(); ++i) {
        const T level = model.colors[i] == Color::red ? base.c_red : base.c_blue;
        if (sign_of(dot(base.normal, model.coords[i]) - level) == 0) extras.push_back(i);
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << extras.size()); ++mask) {
        SupportConfig<T> c = base;
        for (std::size_t k = 0; k < extras.size(); ++k) {
            if (mask >> k & 1) (model.colors[extras[k]] == Color::red ? c.red_ids : c.blue_ids).push_back(extras[k]);
        }
        if (projections_meet(model, c)) out.push_back(std::move(c));
    }
}

}  // namespace

template <typename T>
std::vector<std::size_t> SupportConfig<T>::ids() const
{
    std::vector<std::size_t> out = red_ids;
    out.insert(out.end(), blue_ids.begin(), blue_ids.end());
    std::sort(out.begin(), out.end());
    return out;
}

template <typename T>
std::vector<SupportConfig<T>> enumerate_support_configs(const PointModel<T>& model, std::size_t threads)
{
    const std::size_t d = model.dimension;
    std::vector<SupportConfig<T>> out;
    for (std::size_t k = 2; k <= d && k <= model.size(); ++k) small_configs(model, k, out);
    if (model.size() < d + 1) return out;
    std::vector<std::vector<std::size_t>> tuples;
    for_each_combination(model.size(), d + 1, [&](const std::vector<std::size_t>& ids) {
        if (bichromatic<T>(model.colors, ids)) tuples.push_back(ids);
    });
    std::vector<std::vector<SupportConfig<T>>> found(tuples.size());
    parallel_for(tuples.size(), threads, [&](std::size_t i) { tuple_configs(model, tuples[i], found[i]); });
    for (auto& f : found) std::move(f.begin(), f.end(), std::back_inserter(out));
    return out;
}

template <typename T>
T xi(const PointModel<T>& model, const SupportConfig<T>& config)
{
    const auto members = config.ids();
    std::vector<std::size_t> forbidden;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (std::binary_search(members.begin(), members.end(), i)) continue;
        const T v = dot(config.normal, model.coords[i]);
        // reds at or beyond h_r towards the blues, blues at or beyond h_b towards the reds
        const int s = model.colors[i] == Color::red ? sign_of(v - config.c_red) : -sign_of(v - config.c_blue);
        if (s >= 0) forbidden.push_back(i);
    }
    return scenario_probability(model.existence, members, forbidden);
}

template <typename T>
ESMResult<T> expected_separation_margin(const PointModel<T>& model, const ESMOptions& options)
{
    if (model.dimension < 1) throw DimensionError("expected_separation_margin: d >= 1 required");
    auto configs = enumerate_support_configs(model, options.threads);
    std::vector<T> xis(configs.size());
    std::vector<double> terms(configs.size());
    parallel_for(configs.size(), options.threads, [&](std::size_t i) {
        xis[i] = xi(model, configs[i]);
        terms[i] = to_double(xis[i]) * configs[i].margin;
    });
    ESMResult<T> out;
    out.config_count = configs.size();
    out.xi_sum = tree_sum(std::move(xis));
    out.emar = tree_sum(std::move(terms));
    return out;
}

template <typename T>
ESMResult<T> expected_separation_margin(const LocationTable& table, const ESMOptions& options)
{
    if (table.dimension < 1) throw DimensionError("expected_separation_margin: d >= 1 required");
    if (options.validate) require_general_position(table.coordinates(), PositionLevel::gp, "expected_separation_margin");
    return expected_separation_margin(PointModel<T>::from(table), options);
}

CensusHint margin_census_hint(const LocationTable& table)
{
    const auto model = PointModel<Rational>::from(table);
    const std::size_t d = table.dimension;
    std::size_t reds = 0;
    for (auto c : model.colors) reds += c == Color::red;
    const std::size_t blues = model.size() - reds;
    CensusHint out;
    out.configs = enumerate_support_configs(model).size();
    for (std::size_t k = 2; k <= d; ++k) out.bound += bichromatic_count(reds, blues, k);
    out.bound += bichromatic_count(reds, blues, d + 1) << (d - 1);
    return out;
}

#define STOCHSEP_INSTANTIATE_ESM(T)                                                                             \
    template struct SupportConfig<T>;                                                                           \
    template std::vector<SupportConfig<T>> enumerate_support_configs<T>(const PointModel<T>&, std::size_t);     \
    template T xi<T>(const PointModel<T>&, const SupportConfig<T>&);                                            \
    template ESMResult<T> expected_separation_margin<T>(const PointModel<T>&, const ESMOptions&);               \
    template ESMResult<T> expected_separation_margin<T>(const LocationTable&, const ESMOptions&);

STOCHSEP_INSTANTIATE_ESM(Rational)
STOCHSEP_INSTANTIATE_ESM(double)

}  // namespace stochsep
