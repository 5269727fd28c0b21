#pragma once

#include <cstddef>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/geometry.hpp"

namespace stochsep {

/// Coordinates, colors and existence model of a location table, with scalars in T.
template <typename T>
struct PointModel {
    std::size_t dimension = 0;
    std::vector<PointD<T>> coords;
    std::vector<Color> colors;
    ExistenceModel<T> existence;

    std::size_t size() const { return coords.size(); }

    static PointModel from(const LocationTable& table)
    {
        PointModel m;
        m.dimension = table.dimension;
        m.coords = convert_points<T>(table.coordinates());
        for (const auto& l : table.locations) m.colors.push_back(l.color);
        m.existence = ExistenceModel<T>::from(table);
        return m;
    }

    /// Same model with coordinates restricted to {first..d} (1-based).
    PointModel projected(std::size_t first) const
    {
        PointModel m;
        m.dimension = dimension - first + 1;
        m.colors = colors;
        m.existence = existence;
        for (const auto& p : coords) m.coords.emplace_back(p.begin() + static_cast<long>(first - 1), p.end());
        return m;
    }

    std::vector<std::size_t> ids_of(Color c) const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < colors.size(); ++i) {
            if (colors[i] == c) out.push_back(i);
        }
        return out;
    }
};

}  // namespace stochsep
