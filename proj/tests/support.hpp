#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/numeric.hpp"

namespace testing {

using stochsep::Color;
using stochsep::PointD;
using stochsep::Rational;

inline Rational q(const char* text) { return stochsep::parse_rational(text); }

inline PointD<Rational> pt(std::initializer_list<long> coords)
{
    PointD<Rational> p;
    for (long c : coords) p.push_back(Rational(c));
    return p;
}

struct P {
    PointD<Rational> at;
    Color color;
    Rational prob = 1;
};

inline stochsep::StochasticDataset unipoint(std::size_t d, const std::vector<P>& pts)
{
    stochsep::StochasticDataset ds;
    ds.dimension = d;
    for (const auto& p : pts) ds.points.push_back({p.at, p.color, p.prob, std::nullopt});
    return ds;
}

inline stochsep::LocationTable table(std::size_t d, const std::vector<P>& pts)
{
    return stochsep::locations_of(unipoint(d, pts));
}

inline constexpr Color R = Color::red;
inline constexpr Color B = Color::blue;

/// Swaps the colors of every location.
inline stochsep::StochasticDataset swap_colors(stochsep::StochasticDataset ds)
{
    for (auto& p : ds.points) p.color = stochsep::opposite(p.color);
    for (auto& u : ds.uncertain_points) u.color = stochsep::opposite(u.color);
    for (auto& o : ds.objects) o.color = stochsep::opposite(o.color);
    return ds;
}

/// Splits `total` locations into reds and blues with both colors usually present.
inline std::pair<std::size_t, std::size_t> split_sizes(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    std::uniform_int_distribution<std::size_t> total_dist(lo, hi);
    const std::size_t total = total_dist(rng);
    std::uniform_int_distribution<std::size_t> red_dist(0, total);
    const std::size_t reds = red_dist(rng);
    return {reds, total - reds};
}

}  // namespace testing
