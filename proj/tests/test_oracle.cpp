#include <doctest.h>

#include <cmath>
#include <random>

#include "stochsep/oracle.hpp"
#include "stochsep/separation.hpp"
#include "support.hpp"

using namespace stochsep;
using testing::B;
using testing::pt;
using testing::q;
using testing::R;

TEST_SUITE("oracle")
{
    TEST_CASE("brute_sp examples")
    {
        CHECK(brute_sp(testing::table(1, {{pt({0}), R, q("1/2")}, {pt({2}), R, q("1/2")}, {pt({1}), B}})) == q("3/4"));
        CHECK(brute_sp(testing::table(2, {{pt({0, 0}), R}, {pt({3, 1}), B}, {pt({4, 5}), B}})) == 1);
        CHECK(brute_sp(testing::table(2, {{pt({0, 0}), R}, {pt({4, 0}), R}, {pt({2, 0}), B}})) == 0);
    }

    TEST_CASE("brute_esm examples")
    {
        CHECK(brute_esm(testing::table(1, {{pt({0}), R}, {pt({1}), B, q("1/2")}, {pt({3}), B}})) ==
              doctest::Approx(1.0).epsilon(1e-15));
        CHECK(brute_esm(testing::table(2, {{pt({0, 0}), R}})) == 0.0);
        CHECK(brute_esm(testing::table(2, {{pt({0, 0}), R}, {pt({3, 4}), B}})) == doctest::Approx(2.5).epsilon(1e-15));
    }

    TEST_CASE("enumerate_margins examples")
    {
        auto census = enumerate_margins(testing::table(1, {{pt({0}), R, q("1/2")}, {pt({1}), B, q("1/2")}, {pt({3}), B, q("1/2")}}));
        CHECK(census.kappa == 2);
        CHECK(census.tier == "exact");
        CHECK(census.squared_margins == std::vector<Rational>{q("1/4"), q("9/4")});
        REQUIRE(census.margins.size() == 2);
        CHECK(census.margins[0] == doctest::Approx(0.5));
        CHECK(census.margins[1] == doctest::Approx(1.5));

        CHECK(enumerate_margins(testing::table(2, {{pt({0, 0}), R}, {pt({3, 1}), B}, {pt({4, 5}), B}})).kappa == 1);
        CHECK(enumerate_margins(testing::table(2, {{pt({0, 0}), B, q("1/2")}, {pt({3, 1}), B}})).kappa == 0);
    }

    TEST_CASE("instances partition the probability space")
    {
        std::mt19937_64 rng(12);
        for (int rep = 0; rep < 20; ++rep) {
            auto t = locations_of(rep % 2 ? gen_random(4, 5, 2, ProbLaw::uniform(), rng())
                                          : gen_random_multipoint(2, 3, 2, 3, rng()));
            Rational total = 0;
            for_each_instance(t, [&](std::uint64_t, const Rational& p) {
                CHECK(p > 0);
                total += p;
            });
            CHECK(total == 1);
            auto detail = brute_sp_detail(t);
            CHECK(detail.separable + detail.inseparable == 1);
            CHECK(detail.separable >= 0);
            CHECK(detail.separable <= 1);
            CHECK(brute_esm(t) >= 0);
        }
    }

    TEST_CASE("multipoint instances place every point at most once")
    {
        StochasticDataset ds;
        ds.dimension = 1;
        ds.model = UncertaintyModel::multipoint;
        ds.uncertain_points.push_back({{{pt({0}), q("1/2")}, {pt({4}), q("1/2")}}, R});
        ds.uncertain_points.push_back({{{pt({2}), q("1/3")}}, B});
        auto t = locations_of(ds);
        std::vector<std::uint64_t> masks;
        for_each_instance(t, [&](std::uint64_t mask, const Rational&) { masks.push_back(mask); });
        CHECK(masks.size() == 4);
        for (auto m : masks) CHECK((m & 3) != 3);
        // the red is at 0 or at 4; either way it separates from the blue at 2
        CHECK(brute_sp(t) == 1);
    }

    TEST_CASE("guard rail")
    {
        auto big = locations_of(gen_random(12, 11, 2, ProbLaw::uniform(), 1));
        CHECK_THROWS_AS(brute_sp(big), GuardRailError);
        OracleOptions small;
        small.max_locations = 4;
        CHECK_THROWS_AS(brute_esm(testing::table(1, {{pt({0}), R}, {pt({1}), B}, {pt({2}), B}, {pt({3}), B}, {pt({5}), B}}), small),
                        GuardRailError);
    }

    TEST_CASE("hull membership and expected distance")
    {
        auto tri = testing::table(2, {{pt({0, 0}), B, q("1/2")}, {pt({4, 0}), B, q("1/2")}, {pt({1, 3}), B, q("1/2")}});
        CHECK(brute_hull_membership(tri, pt({2, 1})) == q("1/8"));
        CHECK(brute_hull_membership(tri, pt({0, 0})) == q("1/2"));
        auto one = testing::table(2, {{pt({3, 4}), B, q("1/2")}});
        CHECK(brute_expected_distance(one, pt({0, 0})) == doctest::Approx(2.5).epsilon(1e-15));
    }

    TEST_CASE("cluster stress datasets have many distinct margins")
    {
        for (auto [n, N] : {std::pair<std::size_t, std::size_t>{1, 2}, {2, 4}, {2, 6}}) {
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                auto census = enumerate_margins(locations_of(gen_cluster_stress(n, N, 2, 0.01, seed)));
                CHECK(census.kappa >= n * (N / 2) * (N / 2));
            }
        }
    }
}
