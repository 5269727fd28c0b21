#include <doctest.h>

#include <random>

#include "stochsep/combinatorics.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/oracle.hpp"
#include "stochsep/separation.hpp"
#include "stochsep/sp_engine.hpp"
#include "support.hpp"

using namespace stochsep;
using testing::B;
using testing::pt;
using testing::q;
using testing::R;

namespace {

PointModel<Rational> model(std::size_t d, const std::vector<testing::P>& pts)
{
    return PointModel<Rational>::from(testing::table(d, pts));
}

LocationTable triangle()
{
    return testing::table(2, {{pt({0, 0}), R, q("1/2")}, {pt({2, 0}), B, q("1/2")}, {pt({1, 1}), B, q("1/2")}});
}

}  // namespace

TEST_SUITE("sp-engine")
{
    TEST_CASE("separable_probability examples")
    {
        auto line = testing::table(1, {{pt({0}), R, q("1/2")}, {pt({2}), R, q("1/2")}, {pt({1}), B, 1}});
        for (auto strategy : {Strategy::scan, Strategy::radial}) {
            CHECK(separable_probability<Rational>(line, {strategy}).sp == q("3/4"));
            auto tri = separable_probability<Rational>(triangle(), {strategy});
            CHECK(tri.sp == 1);
            REQUIRE(tri.per_level.size() == 1);
            CHECK(tri.per_level[0].trivial == q("5/8"));
            CHECK(tri.per_level[0].tau_sum == q("3/8"));
            CHECK(tri.per_level[0].candidates == 2);
        }
        auto blues_only = testing::table(3, {{pt({0, 1, 2}), B, q("1/3")}, {pt({4, 1, 7}), B, q("2/3")}});
        CHECK(separable_probability<Rational>(blues_only).sp == 1);
    }

    TEST_CASE("separable_probability rejects SGPP violations and bad dimensions")
    {
        auto collinear = testing::table(2, {{pt({0, 0}), R}, {pt({1, 1}), B}, {pt({2, 2}), B}});
        CHECK_THROWS_AS(separable_probability<Rational>(collinear), PositionError);
        auto flat = testing::table(3, {{pt({0, 0, 1}), R}, {pt({1, 5, 1}), B}, {pt({3, 1, 0}), B}});
        CHECK_THROWS_AS(separable_probability<Rational>(flat), PositionError);
        LocationTable empty;
        CHECK_THROWS_AS(separable_probability<Rational>(empty), DimensionError);
    }

    TEST_CASE("trivial_term examples")
    {
        CHECK(trivial_term(model(1, {{pt({0}), R, q("1/2")}, {pt({1}), B, q("1/2")}})) == q("3/4"));
        CHECK(trivial_term(model(1, {{pt({0}), R, 1}, {pt({1}), B, 1}})) == 0);
        CHECK(trivial_term(model(2, {})) == 1);
    }

    TEST_CASE("enumerate_candidates examples")
    {
        CHECK(enumerate_candidates(PointModel<Rational>::from(triangle())).size() == 2);
        auto m3 = model(3, {{pt({0, 0, 1}), R}, {pt({1, 0, 2}), R}, {pt({0, 1, 3}), B}, {pt({2, 3, 5}), B}});
        auto cands = enumerate_candidates(m3);
        CHECK(cands.size() == 4);
        for (const auto& c : cands) {
            CHECK(sign_of(c.aux.a * c.h.normal[0] + c.aux.b * c.h.normal[1]) == 0);
            for (auto i : c.on_set) CHECK(side_of(c.h, m3.coords[i]) == 0);
        }
        CHECK(enumerate_candidates(model(2, {{pt({0, 0}), B}, {pt({1, 0}), B}, {pt({0, 1}), B}})).empty());
    }

    TEST_CASE("coincidence_witness examples")
    {
        auto w2 = coincidence_witness<Rational>({pt({0, 0})}, {pt({2, 0})});
        REQUIRE(w2);
        CHECK(w2->red == pt({0, 0}));
        CHECK(w2->blue == pt({2, 0}));
        CHECK_FALSE(coincidence_witness<Rational>({pt({0, 0, 0})}, {pt({1, 0, 1}), pt({0, 1, 2})}));
        auto w3 = coincidence_witness<Rational>({pt({0, 0, 1})}, {pt({1, 0, 0}), pt({0, 1, 2})});
        REQUIRE(w3);
        CHECK(w3->red == pt({0, 0, 1}));
        CHECK(w3->blue == PointD<Rational>{q("1/2"), q("1/2"), 1});
    }

    TEST_CASE("orientation_indicator examples")
    {
        CHECK(orientation_indicator<Rational>(pt({0, 0}), pt({2, 0})) == pt({0, -2}));
        CHECK(orientation_indicator<Rational>(pt({0, 0}), pt({1, 1})) == pt({1, -1}));
        CHECK(orientation_indicator<Rational>(pt({1, 2, 7}), pt({3, 2, 7})) == pt({1, 0, 7}));
    }

    TEST_CASE("tau examples on the triangle")
    {
        auto m = PointModel<Rational>::from(triangle());
        auto cands = enumerate_candidates(m);
        REQUIRE(cands.size() == 2);
        // on-sets {0,1} = (0,0),(2,0) and {0,2} = (0,0),(1,1)
        CHECK(tau(m, cands[0]) == q("1/4"));
        CHECK(*cands[0].o == pt({0, -2}));
        CHECK(tau(m, cands[1]) == q("1/8"));
        // d=3 candidate without a coincidence witness
        auto m3 = model(3, {{pt({0, 0, 0}), R, q("1/2")}, {pt({1, 0, 1}), B, q("1/2")}, {pt({0, 1, 2}), B, q("1/2")}});
        auto c3 = enumerate_candidates(m3);
        REQUIRE(c3.size() == 1);
        CHECK(tau(m3, c3[0]) == 0);
        CHECK_FALSE(c3[0].witness);
    }

    TEST_CASE("sp_base_1d examples")
    {
        auto m = model(1, {{pt({0}), R, q("1/2")}, {pt({2}), R, q("1/2")}, {pt({1}), B, 1}});
        Rational charges;
        CHECK(sp_base_1d(m, &charges) == q("3/4"));
        CHECK(trivial_term(m) == q("1/4"));
        CHECK(charges == q("1/2"));
        CHECK(sp_base_1d(model(1, {{pt({0}), R}, {pt({1}), B}})) == 1);
        CHECK(sp_base_1d(model(1, {{pt({0}), R}, {pt({2}), R}, {pt({1}), B}})) == 0);
        CHECK_THROWS_AS(sp_base_1d(model(1, {{pt({0}), R}, {pt({0}), B}})), DegenerateInput);
    }

    TEST_CASE("extreme_separator examples")
    {
        auto e = extreme_separator({pt({0, 0}), pt({2, 0}), pt({1, 1})}, {R, B, B});
        CHECK_FALSE(e.at_infinity);
        CHECK(e.level == 0);
        CHECK(e.on_set == std::vector<std::size_t>{0, 1});
        CHECK(e.separator.normal == Vec<Rational>{0, 1});
        CHECK(extreme_separator({pt({2, 0}), pt({1, 1})}, {B, B}).at_infinity);
        auto one = extreme_separator({pt({0}), pt({1}), pt({3})}, {R, B, B});
        CHECK(one.on_set == std::vector<std::size_t>{0});
        CHECK(one.separator.offset == 0);
        CHECK_THROWS(extreme_separator({pt({0}), pt({2}), pt({1})}, {R, R, B}));
    }

    TEST_CASE("oracle equivalence, both strategies, exact and float")
    {
        std::mt19937_64 rng(101);
        for (std::size_t d = 1; d <= 4; ++d) {
            for (int rep = 0; rep < 12; ++rep) {
                auto [nr, nb] = testing::split_sizes(rng, 2, 9);
                auto ds = gen_random(nr, nb, d, ProbLaw::uniform(8), rng(), {40, PositionLevel::sgpp});
                auto t = locations_of(ds);
                const Rational truth = brute_sp(t);
                auto scan = separable_probability<Rational>(t, {Strategy::scan});
                auto radial = separable_probability<Rational>(t, {Strategy::radial});
                CHECK(scan.sp == truth);
                CHECK(radial.sp == truth);
                auto fl = separable_probability<double>(t, {Strategy::radial});
                CHECK(std::fabs(fl.sp - truth.get_d()) <= 1e-9);
            }
        }
    }

    TEST_CASE("per-level terms sum to sp and candidate counts match the binomial count")
    {
        std::mt19937_64 rng(7);
        for (std::size_t d = 2; d <= 5; ++d) {
            auto ds = gen_random(3, 5, d, ProbLaw::uniform(), rng(), {50, PositionLevel::sgpp});
            auto t = locations_of(ds);
            auto r = separable_probability<Rational>(t);
            Rational sum = 0;
            for (const auto& lt : r.per_level) sum += lt.trivial + lt.tau_sum;
            CHECK(sum == r.sp);
            CHECK(r.per_level.front().candidates == bichromatic_count(3, 5, d));
            CHECK(r.per_level.size() == (d + 1) / 2);
        }
    }

    TEST_CASE("parallel evaluation is deterministic")
    {
        auto ds = gen_random(5, 7, 3, ProbLaw::uniform(), 99, {50, PositionLevel::sgpp});
        auto t = locations_of(ds);
        const auto one = separable_probability<double>(t, {Strategy::scan, 1});
        const auto four = separable_probability<double>(t, {Strategy::scan, 4});
        CHECK(one.sp == four.sp);
        CHECK(separable_probability<Rational>(t, {Strategy::radial, 1}).sp ==
              separable_probability<Rational>(t, {Strategy::radial, 3}).sp);
    }

    TEST_CASE("color swap leaves sp unchanged")
    {
        std::mt19937_64 rng(13);
        for (int rep = 0; rep < 10; ++rep) {
            auto ds = gen_random(3, 4, 1 + rep % 4, ProbLaw::uniform(), rng(), {40, PositionLevel::sgpp});
            CHECK(separable_probability<Rational>(locations_of(ds)).sp ==
                  separable_probability<Rational>(locations_of(testing::swap_colors(ds))).sp);
        }
    }

    TEST_CASE("multipoint with singleton uncertain points equals unipoint")
    {
        std::mt19937_64 rng(19);
        for (int rep = 0; rep < 8; ++rep) {
            auto ds = gen_random(3, 4, 2 + rep % 2, ProbLaw::uniform(), rng(), {40, PositionLevel::sgpp});
            StochasticDataset multi;
            multi.dimension = ds.dimension;
            multi.model = UncertaintyModel::multipoint;
            for (const auto& p : ds.points) multi.uncertain_points.push_back({{{p.location, p.prob}}, p.color});
            CHECK(separable_probability<Rational>(locations_of(ds)).sp ==
                  separable_probability<Rational>(locations_of(multi)).sp);
        }
    }

    TEST_CASE("charging partition on small datasets")
    {
        std::mt19937_64 rng(29);
        for (int rep = 0; rep < 6; ++rep) {
            const std::size_t d = 2 + rep % 2;
            auto ds = gen_random(3, 4, d, ProbLaw::uniform(), rng(), {30, PositionLevel::sgpp});
            auto t = locations_of(ds);
            auto charges = enumerate_charges(t);
            Rational total = 0;
            for (const auto& c : charges) total += c.prob;
            CHECK(total == separable_probability<Rational>(t).sp);
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << t.size()); ++mask) {
                std::vector<bool> present(t.size());
                std::vector<PointD<Rational>> pts;
                std::vector<Color> cols;
                std::vector<std::size_t> ids;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    present[i] = (mask >> i) & 1;
                    if (!present[i]) continue;
                    pts.push_back(t.locations[i].coords);
                    cols.push_back(t.locations[i].color);
                    ids.push_back(i);
                }
                std::vector<const Charge*> covering;
                for (const auto& c : charges) {
                    if (charge_covers(c, t, present)) covering.push_back(&c);
                }
                std::vector<PointD<Rational>> reds, blues;
                for (std::size_t k = 0; k < pts.size(); ++k) (cols[k] == Color::red ? reds : blues).push_back(pts[k]);
                if (!check_separable(reds, blues).separable) {
                    CHECK(covering.empty());
                    continue;
                }
                REQUIRE(covering.size() == 1);
                auto e = extreme_separator(pts, cols);
                if (e.at_infinity) {
                    CHECK(covering[0]->kind == Charge::Kind::trivial);
                    continue;
                }
                std::vector<std::size_t> on;
                for (auto k : e.on_set) on.push_back(ids[k]);
                CHECK(covering[0]->kind != Charge::Kind::trivial);
                CHECK(covering[0]->first_coordinate == e.first_coordinate);
                CHECK(covering[0]->present == on);
            }
        }
    }
}
