#include "stochsep/oracle.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <set>
#include <unordered_map>

#include "stochsep/min_norm.hpp"
#include "stochsep/separation.hpp"

namespace stochsep {

namespace {

void guard(const LocationTable& table, const OracleOptions& options)
{
    if (table.size() > 63) throw GuardRailError("oracle: at most 63 locations are representable");
    if (!options.force && table.size() > options.max_locations) {
        throw GuardRailError("oracle: " + std::to_string(table.size()) + " locations exceed the guard rail of " +
                             std::to_string(options.max_locations));
    }
}

struct Option {
    std::uint64_t mask;
    Rational prob;
};

std::vector<std::vector<Option>> unit_options(const LocationTable& table)
{
    std::vector<std::vector<Option>> out;
    for (const auto& u : table.units) {
        std::vector<Option> opts;
        if (u.kind == UnitKind::exclusive) {
            Rational rest = 1;
            for (auto id : u.members) {
                opts.push_back({std::uint64_t{1} << id, table.locations[id].prob});
                rest -= table.locations[id].prob;
            }
            opts.push_back({0, rest});
        } else {
            std::uint64_t all = 0;
            for (auto id : u.members) all |= std::uint64_t{1} << id;
            opts.push_back({all, u.prob});
            opts.push_back({0, 1 - u.prob});
        }
        std::erase_if(opts, [](const Option& o) { return sgn(o.prob) == 0; });
        out.push_back(std::move(opts));
    }
    return out;
}

// Separability of arbitrary location subsets, memoised along the chain of
// prefixes obtained by dropping the highest id. A parent's separating
// hyperplane is reused whenever it already separates the added location.
class SeparabilityMemo {
public:
    explicit SeparabilityMemo(const LocationTable& table) : table_(table) {}

    bool separable(std::uint64_t mask) { return lookup(mask).separable; }

private:
    struct Entry {
        bool separable = true;
        std::optional<Hyperplane<Rational>> witness;
    };

    const Entry& lookup(std::uint64_t mask)
    {
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        Entry e = compute(mask);
        return memo_.emplace(mask, std::move(e)).first->second;
    }

    Entry compute(std::uint64_t mask)
    {
        std::vector<PointD<Rational>> reds;
        std::vector<PointD<Rational>> blues;
        for (std::uint64_t m = mask; m; m &= m - 1) {
            const auto& l = table_.locations[static_cast<std::size_t>(std::countr_zero(m))];
            (l.color == Color::red ? reds : blues).push_back(l.coords);
        }
        if (reds.empty() || blues.empty()) return {};
        const std::size_t top = 63 - static_cast<std::size_t>(std::countl_zero(mask));
        const Entry parent = lookup(mask & ~(std::uint64_t{1} << top));
        if (!parent.separable) return {false, std::nullopt};
        if (parent.witness) {
            const auto& l = table_.locations[top];
            const int s = side_of(*parent.witness, l.coords);
            if ((l.color == Color::red && s < 0) || (l.color == Color::blue && s > 0)) return parent;
        }
        auto r = check_separable(reds, blues);
        return {r.separable, r.witness};
    }

    const LocationTable& table_;
    std::unordered_map<std::uint64_t, Entry> memo_;
};

// Maximum-margin data of location subsets, memoised like SeparabilityMemo.
// A parent's optimum is kept when the added location lies outside its slab.
class MarginMemo {
public:
    explicit MarginMemo(const LocationTable& table) : table_(table) {}

    /// Squared margin, or nullopt for inseparable / one-color subsets.
    std::optional<Rational> squared_margin(std::uint64_t mask)
    {
        const auto& e = lookup(mask);
        if (!e.separator) return std::nullopt;
        return e.squared_margin;
    }

private:
    struct Entry {
        bool one_color = false;
        std::optional<Hyperplane<Rational>> separator;
        Rational squared_margin = 0;
        Rational half_norm2 = 0;  // |n|^2 / 2, the slab half-width in evaluation units
    };

    const Entry& lookup(std::uint64_t mask)
    {
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        Entry e = compute(mask);
        return memo_.emplace(mask, std::move(e)).first->second;
    }

    Entry compute(std::uint64_t mask)
    {
        std::vector<PointD<Rational>> reds;
        std::vector<PointD<Rational>> blues;
        for (std::uint64_t m = mask; m; m &= m - 1) {
            const auto& l = table_.locations[static_cast<std::size_t>(std::countr_zero(m))];
            (l.color == Color::red ? reds : blues).push_back(l.coords);
        }
        if (reds.empty() || blues.empty()) return {true, std::nullopt, 0, 0};
        const std::size_t top = 63 - static_cast<std::size_t>(std::countl_zero(mask));
        const Entry parent = lookup(mask & ~(std::uint64_t{1} << top));
        if (!parent.one_color && !parent.separator) return {};
        if (parent.separator) {
            const auto& l = table_.locations[top];
            const Rational v = evaluate(*parent.separator, l.coords);
            if ((l.color == Color::red && -v >= parent.half_norm2) || (l.color == Color::blue && v >= parent.half_norm2)) {
                return parent;
            }
        }
        auto mm = max_margin_separator(reds, blues);
        if (!mm) return {};
        Entry e;
        e.separator = mm->separator;
        e.squared_margin = mm->squared_margin;
        e.half_norm2 = squared_norm(mm->separator.normal) / 2;
        return e;
    }

    const LocationTable& table_;
    std::unordered_map<std::uint64_t, Entry> memo_;
};

std::vector<PointD<Rational>> present_points(const LocationTable& table, std::uint64_t mask)
{
    std::vector<PointD<Rational>> out;
    for (std::uint64_t m = mask; m; m &= m - 1) {
        out.push_back(table.locations[static_cast<std::size_t>(std::countr_zero(m))].coords);
    }
    return out;
}

// Squared distance from q to the hull of pts (nonempty).
Rational hull_squared_distance(const std::vector<PointD<Rational>>& pts, const PointD<Rational>& q)
{
    std::vector<Vec<Rational>> shifted;
    for (const auto& p : pts) shifted.push_back(sub(p, q));
    return squared_norm(min_norm_point(shifted).point);
}

}  // namespace

void for_each_instance(const LocationTable& table, const std::function<void(std::uint64_t, const Rational&)>& fn,
                       const OracleOptions& options)
{
    guard(table, options);
    const auto opts = unit_options(table);
    std::vector<std::size_t> choice(opts.size(), 0);
    for (const auto& o : opts) {
        if (o.empty()) return;
    }
    for (;;) {
        std::uint64_t mask = 0;
        Rational prob = 1;
        for (std::size_t u = 0; u < opts.size(); ++u) {
            mask |= opts[u][choice[u]].mask;
            prob *= opts[u][choice[u]].prob;
        }
        fn(mask, prob);
        std::size_t u = 0;
        while (u < opts.size() && ++choice[u] == opts[u].size()) choice[u++] = 0;
        if (u == opts.size()) break;
    }
}

BruteSP brute_sp_detail(const LocationTable& table, const OracleOptions& options)
{
    BruteSP out;
    SeparabilityMemo memo(table);
    for_each_instance(
        table,
        [&](std::uint64_t mask, const Rational& prob) {
            ++out.instances;
            (memo.separable(mask) ? out.separable : out.inseparable) += prob;
        },
        options);
    return out;
}

Rational brute_sp(const LocationTable& table, const OracleOptions& options)
{
    return brute_sp_detail(table, options).separable;
}

BruteESM brute_esm_detail(const LocationTable& table, const OracleOptions& options)
{
    BruteESM out;
    MarginMemo memo(table);
    long double total = 0;
    for_each_instance(
        table,
        [&](std::uint64_t mask, const Rational& prob) {
            ++out.instances;
            if (auto sq = memo.squared_margin(mask)) {
                total += static_cast<long double>(prob.get_d()) * std::sqrt(static_cast<long double>(sq->get_d()));
                out.bichromatic_separable += prob;
            }
        },
        options);
    out.esm = static_cast<double>(total);
    return out;
}

double brute_esm(const LocationTable& table, const OracleOptions& options)
{
    return brute_esm_detail(table, options).esm;
}

MarginCensus enumerate_margins(const LocationTable& table, const OracleOptions& options)
{
    std::set<Rational> distinct;
    MarginMemo memo(table);
    for_each_instance(
        table,
        [&](std::uint64_t mask, const Rational&) {
            if (auto sq = memo.squared_margin(mask)) distinct.insert(*sq);
        },
        options);
    MarginCensus out;
    for (const auto& sq : distinct) {
        out.squared_margins.push_back(sq);
        out.margins.push_back(std::sqrt(sq.get_d()));
    }
    out.kappa = distinct.size();
    return out;
}

namespace {

std::pair<std::vector<Ball>, std::vector<Ball>> present_balls(const BallTable& table, std::uint64_t mask)
{
    std::pair<std::vector<Ball>, std::vector<Ball>> out;
    for (std::uint64_t m = mask; m; m &= m - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(m));
        const auto& l = table.table.locations[i];
        (l.color == Color::red ? out.first : out.second)
            .push_back({convert_point<double>(l.coords), table.radii[i].get_d()});
    }
    return out;
}

}  // namespace

double brute_ball_sp(const BallTable& table, const OracleOptions& options)
{
    long double total = 0;
    for_each_instance(
        table.table,
        [&](std::uint64_t mask, const Rational& prob) {
            auto [reds, blues] = present_balls(table, mask);
            if (ball_separability_check(reds, blues)) total += static_cast<long double>(prob.get_d());
        },
        options);
    return static_cast<double>(total);
}

double brute_ball_esm(const BallTable& table, const OracleOptions& options)
{
    long double total = 0;
    for_each_instance(
        table.table,
        [&](std::uint64_t mask, const Rational& prob) {
            auto [reds, blues] = present_balls(table, mask);
            if (reds.empty() || blues.empty()) return;
            auto dist = ball_hull_distance(reds, blues);
            if (dist.separable) total += static_cast<long double>(prob.get_d()) * dist.distance / 2;
        },
        options);
    return static_cast<double>(total);
}

Rational brute_hull_membership(const LocationTable& table, const PointD<Rational>& q, const OracleOptions& options)
{
    Rational total = 0;
    for_each_instance(
        table,
        [&](std::uint64_t mask, const Rational& prob) {
            if (mask == 0) return;
            if (sgn(hull_squared_distance(present_points(table, mask), q)) == 0) total += prob;
        },
        options);
    return total;
}

double brute_expected_distance(const LocationTable& table, const PointD<Rational>& q, const OracleOptions& options)
{
    long double total = 0;
    for_each_instance(
        table,
        [&](std::uint64_t mask, const Rational& prob) {
            if (mask == 0) return;
            const double dist = std::sqrt(hull_squared_distance(present_points(table, mask), q).get_d());
            total += static_cast<long double>(prob.get_d()) * dist;
        },
        options);
    return static_cast<double>(total);
}

}  // namespace stochsep
