#include <doctest.h>

#include <cmath>
#include <random>

#include "stochsep/min_norm.hpp"
#include "stochsep/oracle.hpp"
#include "stochsep/sch.hpp"
#include "stochsep/separation.hpp"
#include "support.hpp"

using namespace stochsep;
using testing::B;
using testing::pt;
using testing::q;
using testing::R;

namespace {

StochasticDataset points(std::size_t d, const std::vector<testing::P>& pts) { return testing::unipoint(d, pts); }

struct Query {
    StochasticDataset A;
    std::vector<PointD<Rational>> reds;
};

// `k` red query points and `m` stochastic points of A, jointly in general position.
Query random_query(std::size_t k, std::size_t m, std::size_t d, std::uint64_t seed, long range = 12)
{
    auto ds = gen_random(k, m, d, ProbLaw::uniform(8), seed, {range, PositionLevel::sgpp});
    Query out;
    out.A.dimension = d;
    for (const auto& p : ds.points) {
        if (p.color == Color::red) {
            out.reds.push_back(p.location);
        } else {
            out.A.points.push_back(p);
        }
    }
    return out;
}

std::vector<PointD<Rational>> present(const LocationTable& t, std::uint64_t mask)
{
    std::vector<PointD<Rational>> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (mask >> i & 1) out.push_back(t.locations[i].coords);
    }
    return out;
}

Rational squared_distance(const std::vector<PointD<Rational>>& hull, const PointD<Rational>& x)
{
    std::vector<Vec<Rational>> diffs;
    for (const auto& p : hull) diffs.push_back(sub(p, x));
    return squared_norm(min_norm_point(diffs).point);
}

// Direct oracles over the instances of A.
Rational brute_intersection(const StochasticDataset& A, const std::vector<PointD<Rational>>& Q)
{
    auto t = locations_of(A);
    Rational total = 0;
    for_each_instance(t, [&](std::uint64_t mask, const Rational& p) {
        if (mask != 0 && !check_separable(Q, present(t, mask)).separable) total += p;
    });
    return total;
}

Rational brute_eps_distant(const StochasticDataset& A, const PointD<Rational>& x, const Rational& eps)
{
    auto t = locations_of(A);
    Rational total = 0;
    for_each_instance(t, [&](std::uint64_t mask, const Rational& p) {
        if (mask == 0 || squared_distance(present(t, mask), x) > eps * eps) total += p;
    });
    return total;
}

}  // namespace

TEST_SUITE("sch-apps")
{
    TEST_CASE("sch_membership_probability examples")
    {
        auto tri = [](const char* p) {
            return points(2, {{pt({0, 0}), B, q(p)}, {pt({4, 0}), B, q(p)}, {pt({1, 3}), B, q(p)}});
        };
        CHECK(sch_membership_probability(tri("1"), pt({2, 1})) == 1);
        CHECK(sch_membership_probability(tri("1"), pt({9, 9})) == 0);
        CHECK(sch_membership_probability(tri("1/2"), pt({2, 1})) == q("1/8"));
    }

    TEST_CASE("sch_intersection_probability examples")
    {
        auto tri = points(2, {{pt({0, 0}), B}, {pt({4, 0}), B}, {pt({1, 3}), B}});
        CHECK(sch_intersection_probability(tri, {pt({-1, 1}), pt({5, 2})}) == 1);
        CHECK(sch_intersection_probability(tri, {pt({7, 1}), pt({8, 5})}) == 0);
        auto half = points(2, {{pt({0, 0}), B, q("1/2")}, {pt({4, 0}), B, q("1/2")}, {pt({1, 3}), B, q("1/2")}});
        CHECK(sch_intersection_probability(half, {pt({2, 1})}) == sch_membership_probability(half, pt({2, 1})));
    }

    TEST_CASE("sch_epsilon_distant_probability examples")
    {
        auto one = points(2, {{pt({3, 4}), B}});
        CHECK(sch_epsilon_distant_probability(one, pt({0, 0}), 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sch_epsilon_distant_probability(one, pt({0, 0}), 6) == doctest::Approx(0.0));
        auto tri = points(2, {{pt({0, 0}), B, q("1/2")}, {pt({4, 0}), B, q("1/2")}, {pt({1, 3}), B, q("1/2")}});
        CHECK(sch_epsilon_distant_probability(tri, pt({2, 1}), 0) == doctest::Approx(7.0 / 8).epsilon(1e-15));
        CHECK_THROWS_AS(sch_epsilon_distant_probability(tri, pt({2, 1}), -1), DatasetError);
        auto line = points(1, {{pt({3}), B}});
        CHECK_THROWS_AS(sch_epsilon_distant_probability(line, pt({0}), 1), DimensionError);
    }

    TEST_CASE("sch_expected_distance examples")
    {
        CHECK(sch_expected_distance(points(2, {{pt({1, 0}), B}}), pt({0, 0})) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sch_expected_distance(points(2, {{pt({1, 0}), B, q("1/2")}}), pt({0, 0})) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(sch_expected_distance(points(2, {{pt({3, 4}), B}}), pt({0, 0})) == doctest::Approx(5.0).epsilon(1e-12));
    }

    TEST_CASE("query validation")
    {
        auto tri = points(2, {{pt({0, 0}), B}, {pt({4, 0}), B}, {pt({1, 3}), B}});
        CHECK_THROWS_AS(sch_membership_probability(tri, pt({1, 2, 3})), DatasetError);
        CHECK_THROWS_AS(sch_intersection_probability(tri, {}), DatasetError);
        CHECK_THROWS_AS(sch_membership_probability(tri, pt({2, 0})), DegenerateInput);
    }

    TEST_CASE("all four operations match direct oracles")
    {
        std::mt19937_64 rng(505);
        int tangent = 0;
        for (std::size_t d = 2; d <= 3; ++d) {
            for (int rep = 0; rep < 12; ++rep) {
                std::uniform_int_distribution<std::size_t> size(2, 9);
                auto [A, reds] = random_query(2, size(rng), d, rng());
                const auto t = locations_of(A);
                const auto& x = reds.front();
                const Rational member = sch_membership_probability(A, x);
                CHECK(member == brute_hull_membership(t, x));
                CHECK(sch_intersection_probability(A, reds) == brute_intersection(A, reds));
                CHECK(sch_intersection_probability(A, {x}) == member);
                // a prime denominator keeps eps off every point-to-flat distance of the integer data
                for (const char* eps : {"0", "1/10", "20011/10007", "70001/10007"}) {
                    try {
                        const double got = sch_epsilon_distant_probability(A, x, q(eps));
                        CHECK(std::fabs(got - brute_eps_distant(A, x, q(eps)).get_d()) <= 1e-9);
                    } catch (const DegenerateInput&) {
                        ++tangent;
                    }
                }
                CHECK(std::fabs(sch_epsilon_distant_probability(A, x, 0) + member.get_d() - 1) <= 1e-15);
                CHECK(std::fabs(sch_expected_distance(A, x) - brute_expected_distance(t, x)) <= 1e-9);
            }
        }
        CHECK(tangent <= 2);
    }

    TEST_CASE("membership is monotone in the probabilities when q is inside the full hull")
    {
        std::mt19937_64 rng(77);
        int checked = 0;
        for (int rep = 0; rep < 40 && checked < 8; ++rep) {
            auto [A, reds] = random_query(1, 7, 2, rng());
            auto all = A;
            for (auto& p : all.points) p.prob = 1;
            if (sch_membership_probability(all, reds.front()) != 1) continue;
            ++checked;
            const Rational base = sch_membership_probability(A, reds.front());
            CHECK(base >= 0);
            CHECK(base <= 1);
            for (std::size_t i = 0; i < A.points.size(); ++i) {
                auto raised = A;
                raised.points[i].prob = (raised.points[i].prob + 1) / 2;
                CHECK(sch_membership_probability(raised, reds.front()) >= base);
            }
        }
        CHECK(checked > 0);
    }

    TEST_CASE("d = 3 queries needing a transform agree with the oracle")
    {
        // all points share x3 = 0 pairs, violating SGPP while staying in general position
        auto A = points(3, {{pt({0, 0, 0}), B, q("1/2")},
                            {pt({6, 1, 0}), B, q("3/4")},
                            {pt({1, 7, 2}), B, q("1/2")},
                            {pt({2, 2, 9}), B, q("5/8")},
                            {pt({5, 6, 5}), B, q("1/3")}});
        const auto x = pt({2, 3, 3});
        CHECK(sch_membership_probability(A, x) == brute_hull_membership(locations_of(A), x));
        CHECK(std::fabs(sch_epsilon_distant_probability(A, x, 1) - brute_eps_distant(A, x, 1).get_d()) <= 1e-9);
    }
}
