#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "stochsep/esm_engine.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/min_norm.hpp"
#include "stochsep/objects_engine.hpp"
#include "stochsep/oracle.hpp"
#include "stochsep/sch.hpp"
#include "stochsep/separation.hpp"
#include "stochsep/sp_engine.hpp"
#include "support.hpp"

using namespace stochsep;
using testing::B;
using testing::pt;
using testing::q;
using testing::R;

namespace {

constexpr double float_tol = 1e-9;
constexpr double ball_tol = 1e-7;

struct Tally {
    std::size_t cases = 0;
    std::size_t resampled = 0;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) failures.push_back(what);
    }
};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::vector<PointD<Rational>> present_coords(const LocationTable& t, std::uint64_t mask)
{
    std::vector<PointD<Rational>> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (mask >> i & 1) out.push_back(t.locations[i].coords);
    }
    return out;
}

// Retries fn with fresh seeds while the draw violates the strong ball position.
template <typename Fn>
void with_resample(std::mt19937_64& rng, Tally& tally, Fn&& fn)
{
    for (int attempt = 0;; ++attempt) {
        try {
            fn(rng());
            return;
        } catch (const DegenerateInput&) {
            if (attempt == 20) throw;
            ++tally.resampled;
        }
    }
}

// ---------------------------------------------------------------------------

Tally sp_oracle_equivalence()
{
    Tally t;
    std::mt19937_64 rng(1001);
    for (std::size_t d = 1; d <= 4; ++d) {
        for (int rep = 0; rep < 200; ++rep) {
            auto [nr, nb] = testing::split_sizes(rng, 2, 14);
            auto table = locations_of(gen_random(nr, nb, d, ProbLaw::uniform(), rng(), {50, PositionLevel::sgpp}));
            const Rational truth = brute_sp(table);
            const auto tag = "d=" + std::to_string(d) + " rep=" + std::to_string(rep);
            for (auto s : {Strategy::scan, Strategy::radial}) {
                t.expect(separable_probability<Rational>(table, {s}).sp == truth, tag + " exact " + strategy_name(s));
                t.expect(close(separable_probability<double>(table, {s}).sp, truth.get_d(), float_tol),
                         tag + " float " + strategy_name(s));
            }
            ++t.cases;
        }
    }
    return t;
}

Tally multipoint_equivalence()
{
    Tally t;
    std::mt19937_64 rng(1002);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 1 + rep % 3;
        // at most 2 + 2 uncertain points of at most 3 locations each
        std::uniform_int_distribution<std::size_t> count(1, 2);
        const std::size_t reds = count(rng);
        const std::size_t blues = count(rng);
        auto ds = gen_random_multipoint(reds, blues, d, 3, rng(), {50, PositionLevel::sgpp});
        auto table = locations_of(ds);
        const auto tag = "rep=" + std::to_string(rep);
        t.expect(separable_probability<Rational>(table).sp == brute_sp(table), tag + " sp");
        t.expect(close(expected_separation_margin<Rational>(table).emar, brute_esm(table), float_tol), tag + " esm");

        auto uni = gen_random(reds, blues + 1, d, ProbLaw::uniform(), rng(), {50, PositionLevel::sgpp});
        StochasticDataset single;
        single.dimension = d;
        single.model = UncertaintyModel::multipoint;
        for (const auto& p : uni.points) single.uncertain_points.push_back({{{p.location, p.prob}}, p.color});
        const auto a = locations_of(uni);
        const auto b = locations_of(single);
        t.expect(separable_probability<Rational>(a).sp == separable_probability<Rational>(b).sp, tag + " singleton sp");
        t.expect(expected_separation_margin<Rational>(a).emar == expected_separation_margin<Rational>(b).emar,
                 tag + " singleton esm");
        ++t.cases;
    }
    return t;
}

Tally esm_oracle_equivalence()
{
    Tally t;
    std::mt19937_64 rng(1003);
    for (int rep = 0; rep < 150; ++rep) {
        const std::size_t d = 1 + rep % 3;
        auto [nr, nb] = testing::split_sizes(rng, 2, 14);
        auto table = locations_of(gen_random(nr, nb, d, ProbLaw::uniform(), rng(), {50, PositionLevel::sgpp}));
        auto exact = expected_separation_margin<Rational>(table);
        const auto tag = "d=" + std::to_string(d) + " rep=" + std::to_string(rep);
        const double truth = brute_esm(table);
        t.expect(close(exact.emar, truth, float_tol), tag + " esm " + fmt(exact.emar) + " vs " + fmt(truth));
        t.expect(close(expected_separation_margin<double>(table).emar, truth, float_tol), tag + " float esm");
        auto model = PointModel<Rational>::from(table);
        t.expect(exact.xi_sum + trivial_term(model) == separable_probability<Rational>(table).sp, tag + " identity");
        ++t.cases;
    }
    return t;
}

Tally charging_partition()
{
    Tally t;
    std::mt19937_64 rng(1004);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t d = 2 + rep % 2;
        auto [nr, nb] = testing::split_sizes(rng, 3, 10);
        auto table = locations_of(gen_random(nr, nb, d, ProbLaw::uniform(), rng(), {40, PositionLevel::sgpp}));
        const auto charges = enumerate_charges(table);
        std::size_t doubles = 0;
        std::size_t misses = 0;
        std::size_t strays = 0;
        std::size_t wrong = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << table.size()); ++mask) {
            std::vector<bool> present(table.size());
            std::vector<PointD<Rational>> pts;
            std::vector<Color> cols;
            std::vector<std::size_t> ids;
            std::vector<PointD<Rational>> reds;
            std::vector<PointD<Rational>> blues;
            for (std::size_t i = 0; i < table.size(); ++i) {
                present[i] = mask >> i & 1;
                if (!present[i]) continue;
                const auto& loc = table.locations[i];
                pts.push_back(loc.coords);
                cols.push_back(loc.color);
                ids.push_back(i);
                (loc.color == Color::red ? reds : blues).push_back(loc.coords);
            }
            std::vector<const Charge*> covering;
            for (const auto& c : charges) {
                if (charge_covers(c, table, present)) covering.push_back(&c);
            }
            if (!check_separable(reds, blues).separable) {
                strays += !covering.empty();
                continue;
            }
            if (covering.empty()) {
                ++misses;
                continue;
            }
            if (covering.size() > 1) {
                ++doubles;
                continue;
            }
            const auto e = extreme_separator(pts, cols);
            if (e.at_infinity) {
                wrong += covering[0]->kind != Charge::Kind::trivial;
                continue;
            }
            std::vector<std::size_t> on;
            for (auto k : e.on_set) on.push_back(ids[k]);
            wrong += covering[0]->present != on || covering[0]->first_coordinate != e.first_coordinate;
        }
        const auto tag = "rep=" + std::to_string(rep);
        t.expect(doubles == 0, tag + " double counts " + std::to_string(doubles));
        t.expect(misses == 0, tag + " misses " + std::to_string(misses));
        t.expect(strays == 0, tag + " inseparable instances charged " + std::to_string(strays));
        t.expect(wrong == 0, tag + " charged to a different separator " + std::to_string(wrong));
        ++t.cases;
    }
    return t;
}

// Ball dataset and the same centers with zero radii.
std::pair<BallTable, StochasticDataset> balls_and_points(std::size_t nr, std::size_t nb, std::uint64_t seed)
{
    auto ds = gen_random_balls(nr, nb, 2, ProbLaw::uniform(), seed);
    StochasticDataset points;
    points.dimension = 2;
    for (const auto& o : ds.objects) {
        points.points.push_back({std::get<BallShape>(o.shape).center, o.color, o.prob, std::nullopt});
    }
    return {ball_table(ds), points};
}

BallTable zero_radius(const StochasticDataset& points)
{
    StochasticDataset ds;
    ds.dimension = points.dimension;
    for (const auto& p : points.points) ds.objects.push_back({p.color, p.prob, BallShape{p.location, 0}});
    return ball_table(ds);
}

Tally ball_sp()
{
    Tally t;
    std::mt19937_64 rng(1005);
    for (int rep = 0; rep < 50; ++rep) {
        auto [nr, nb] = testing::split_sizes(rng, 2, 10);
        const auto tag = "rep=" + std::to_string(rep);
        with_resample(rng, t, [&](std::uint64_t seed) {
            auto [balls, points] = balls_and_points(nr, nb, seed);
            const double got = ball_separable_probability(balls).sp;
            const double truth = brute_ball_sp(balls);
            t.expect(close(got, truth, ball_tol), tag + " " + fmt(got) + " vs " + fmt(truth));
            const double zero = ball_separable_probability(zero_radius(points)).sp;
            const Rational exact = separable_probability<Rational>(locations_of(points)).sp;
            t.expect(close(zero, exact.get_d(), float_tol), tag + " zero radius " + fmt(zero));
        });
        ++t.cases;
    }
    return t;
}

Tally ball_esm()
{
    Tally t;
    std::mt19937_64 rng(1006);
    for (int rep = 0; rep < 30; ++rep) {
        auto [nr, nb] = testing::split_sizes(rng, 2, 8);
        const auto tag = "rep=" + std::to_string(rep);
        with_resample(rng, t, [&](std::uint64_t seed) {
            auto [balls, points] = balls_and_points(nr, nb, seed);
            const double got = ball_expected_margin(balls).emar;
            const double truth = brute_ball_esm(balls);
            t.expect(close(got, truth, ball_tol), tag + " " + fmt(got) + " vs " + fmt(truth));
            const double zero = ball_expected_margin(zero_radius(points)).emar;
            const double exact = expected_separation_margin<Rational>(locations_of(points)).emar;
            t.expect(close(zero, exact, float_tol), tag + " zero radius " + fmt(zero) + " vs " + fmt(exact));
        });
        ++t.cases;
    }
    return t;
}

Tally sch_suite()
{
    Tally t;
    auto tri = testing::unipoint(2, {{pt({0, 0}), B, q("1/2")}, {pt({4, 0}), B, q("1/2")}, {pt({1, 3}), B, q("1/2")}});
    t.expect(sch_membership_probability(tri, pt({2, 1})) == q("1/8"), "triangle membership");

    std::mt19937_64 rng(1007);
    auto draw = [&](std::size_t k, std::size_t d) {
        std::uniform_int_distribution<std::size_t> size(2, 9);
        auto ds = gen_random(k, size(rng), d, ProbLaw::uniform(8), rng(), {12, PositionLevel::sgpp});
        std::pair<StochasticDataset, std::vector<PointD<Rational>>> out;
        out.first.dimension = d;
        for (const auto& p : ds.points) {
            if (p.color == Color::red) {
                out.second.push_back(p.location);
            } else {
                out.first.points.push_back(p);
            }
        }
        return out;
    };
    auto squared_distance = [](const std::vector<PointD<Rational>>& hull, const PointD<Rational>& x) {
        std::vector<Vec<Rational>> diffs;
        for (const auto& p : hull) diffs.push_back(sub(p, x));
        return squared_norm(min_norm_point(diffs).point);
    };
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 2 + rep % 2;
        const auto tag = "d=" + std::to_string(d) + " rep=" + std::to_string(rep);
        auto [A, reds] = draw(2, d);
        const auto table = locations_of(A);
        const auto& x = reds.front();

        t.expect(sch_membership_probability(A, x) == brute_hull_membership(table, x), tag + " membership");

        Rational meets = 0;
        for_each_instance(table, [&](std::uint64_t mask, const Rational& p) {
            if (mask != 0 && !check_separable(reds, present_coords(table, mask)).separable) meets += p;
        });
        t.expect(sch_intersection_probability(A, reds) == meets, tag + " segment intersection");

        for (const char* text : {"0", "1/10"}) {
            const Rational eps = q(text);
            Rational far = 0;
            for_each_instance(table, [&](std::uint64_t mask, const Rational& p) {
                if (mask == 0 || squared_distance(present_coords(table, mask), x) > eps * eps) far += p;
            });
            const double got = sch_epsilon_distant_probability(A, x, eps);
            t.expect(close(got, far.get_d(), float_tol), tag + " eps-distant eps=" + text + " " + fmt(got));
        }

        const double expected = sch_expected_distance(A, x);
        const double truth = brute_expected_distance(table, x);
        t.expect(close(expected, truth, float_tol), tag + " expected distance " + fmt(expected) + " vs " + fmt(truth));
        ++t.cases;
    }
    return t;
}

Tally sgpp_transform_suite()
{
    Tally t;
    std::mt19937_64 rng(1008);
    std::size_t changed = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 2 + rep % 3;
        auto [nr, nb] = testing::split_sizes(rng, 2, 12);
        // a small box makes SGPP violations common while GP still holds
        auto ds = gen_random(nr, nb, d, ProbLaw::uniform(), rng(), {4, PositionLevel::gp});
        auto out = sgpp_transform(ds);
        changed += !(out.transformed == ds);
        const auto tag = "d=" + std::to_string(d) + " rep=" + std::to_string(rep);
        t.expect(out.matrix.max_orthonormality_error() <= 1e-12, tag + " orthonormality");
        t.expect(validate_general_position(out.transformed, PositionLevel::sgpp).ok, tag + " sgpp");
        t.expect(separable_probability<Rational>(locations_of(out.transformed)).sp == brute_sp(locations_of(ds)),
                 tag + " sp");
        ++t.cases;
    }
    t.expect(changed > 0, "no dataset needed a transform");
    return t;
}

Tally margin_census()
{
    Tally t;
    for (auto [n, N] : {std::pair<std::size_t, std::size_t>{1, 2}, {2, 4}}) {
        for (std::uint64_t seed : {11, 12, 13}) {
            const auto census = enumerate_margins(locations_of(gen_cluster_stress(n, N, 2, 0.01, seed)));
            const std::size_t bound = n * (N / 2) * (N / 2);
            t.expect(census.kappa >= bound, "(n,N)=(" + std::to_string(n) + "," + std::to_string(N) + ") seed " +
                                                std::to_string(seed) + " kappa " + std::to_string(census.kappa));
            ++t.cases;
        }
    }
    return t;
}

Tally complexity_accounting()
{
    Tally t;
    const std::vector<std::vector<std::string>> ladders{
        {"bench", "-d", "2", "--n", "4", "--sizes", "16,32,64"},
        {"bench", "-d", "3", "--n", "3", "--sizes", "8,10,12"},
        {"bench", "-d", "4", "--n", "2", "--sizes", "6,8"},
    };
    for (const auto& args : ladders) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        const auto report = nlohmann::json::parse(out.str());
        t.expect(code == 0 && report["results"]["counts_match_closed_form"] == true, "bench d=" + args[2]);
        ++t.cases;
    }
    std::mt19937_64 rng(1009);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rep % 4;
        auto [nr, nb] = testing::split_sizes(rng, 2, 14);
        auto table = locations_of(gen_random(nr, nb, d, ProbLaw::uniform(), rng(), {50, PositionLevel::sgpp}));
        auto scan = separable_probability<Rational>(table, {Strategy::scan});
        auto radial = separable_probability<Rational>(table, {Strategy::radial});
        bool same = scan.sp == radial.sp && scan.per_level.size() == radial.per_level.size();
        for (std::size_t i = 0; same && i < scan.per_level.size(); ++i) {
            same = scan.per_level[i].tau_sum == radial.per_level[i].tau_sum &&
                   scan.per_level[i].candidates == radial.per_level[i].candidates;
        }
        t.expect(same, "strategies rep=" + std::to_string(rep));
        ++t.cases;
    }
    return t;
}

// x -> M x with an integer matrix of nonzero determinant.
StochasticDataset linear_map(StochasticDataset ds, const std::vector<std::vector<long>>& M)
{
    for (auto& p : ds.points) {
        PointD<Rational> y(M.size(), Rational(0));
        for (std::size_t i = 0; i < M.size(); ++i) {
            for (std::size_t j = 0; j < M.size(); ++j) y[i] += M[i][j] * p.location[j];
        }
        p.location = std::move(y);
    }
    return ds;
}

std::vector<std::vector<long>> invertible_matrix(std::size_t d, std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> entry(-3, 3);
    for (;;) {
        Mat<Rational> m(d, Vec<Rational>(d));
        std::vector<std::vector<long>> out(d, std::vector<long>(d));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) m[i][j] = out[i][j] = entry(rng);
        }
        if (null_space(m, d).empty()) return out;
    }
}

StochasticDataset rigid_motion(StochasticDataset ds, std::size_t a, std::size_t b, long shift)
{
    const Rational c(3, 5);
    const Rational s(4, 5);
    for (auto& p : ds.points) {
        auto& x = p.location;
        if (b < x.size()) {
            const Rational xa = x[a];
            const Rational xb = x[b];
            x[a] = c * xa - s * xb;
            x[b] = s * xa + c * xb;
        }
        for (auto& v : x) v += shift;
    }
    return ds;
}

Tally invariance_suite()
{
    Tally t;
    std::mt19937_64 rng(1010);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t d = 1 + rep % 4;
        auto [nr, nb] = testing::split_sizes(rng, 2, 10);
        auto ds = gen_random(nr, nb, d, ProbLaw::uniform(), rng(), {50, PositionLevel::sgpp});
        const Rational sp = separable_probability<Rational>(locations_of(ds)).sp;
        const auto tag = "d=" + std::to_string(d) + " rep=" + std::to_string(rep);

        t.expect(separable_probability<Rational>(locations_of(testing::swap_colors(ds))).sp == sp, tag + " color swap");

        auto mapped = linear_map(ds, invertible_matrix(d, rng));
        if (!validate_general_position(mapped, PositionLevel::sgpp, 1).ok) mapped = sgpp_transform(mapped).transformed;
        t.expect(separable_probability<Rational>(locations_of(mapped)).sp == sp, tag + " linear map");

        const double esm = expected_separation_margin<Rational>(locations_of(ds)).emar;
        std::uniform_int_distribution<long> shift(-20, 20);
        const std::size_t a = d >= 2 ? rng() % (d - 1) : 0;
        auto moved = rigid_motion(ds, a, d >= 2 ? a + 1 : d, shift(rng));
        t.expect(close(expected_separation_margin<Rational>(locations_of(moved)).emar, esm, float_tol), tag + " rigid motion");

        for (const Rational& lambda : {Rational(3), Rational(2, 7)}) {
            auto scaled = ds;
            for (auto& p : scaled.points) {
                for (auto& v : p.location) v *= lambda;
            }
            const double got = expected_separation_margin<Rational>(locations_of(scaled)).emar;
            t.expect(close(got, lambda.get_d() * esm, float_tol), tag + " scaling by " + to_fraction_string(lambda));
        }
        ++t.cases;
    }
    return t;
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Tally()>>> criteria{
        {"sp-oracle-equivalence", sp_oracle_equivalence},
        {"multipoint-equivalence", multipoint_equivalence},
        {"esm-oracle-equivalence", esm_oracle_equivalence},
        {"charging-partition", charging_partition},
        {"ball-sp", ball_sp},
        {"ball-esm", ball_esm},
        {"sch-suite", sch_suite},
        {"sgpp-transform", sgpp_transform_suite},
        {"margin-census", margin_census},
        {"complexity-accounting", complexity_accounting},
        {"invariance-suite", invariance_suite},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Tally t;
        try {
            t = fn();
        } catch (const std::exception& e) {
            t.failures.push_back(std::string("exception: ") + e.what());
        }
        const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
        std::ostringstream line;
        line << (t.failures.empty() ? "PASS " : "FAIL ") << name << ": " << t.cases << " cases";
        if (t.resampled > 0) line << ", " << t.resampled << " degenerate draws resampled";
        line << ", " << std::fixed << std::setprecision(1) << secs.count() << "s";
        if (!t.failures.empty()) line << ", " << t.failures.size() << " failures, first: " << t.failures.front();
        std::cout << line.str() << std::endl;
        failed += !t.failures.empty();
    }
    return failed == 0 ? 0 : 1;
}
