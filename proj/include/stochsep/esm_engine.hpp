#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/geometry.hpp"
#include "stochsep/point_model.hpp"

namespace stochsep {

/// Support set C with its parallel support planes h_r = {w.x = c_red}, h_b = {w.x = c_blue}, c_red < c_blue.
template <typename T>
struct SupportConfig {
    std::vector<std::size_t> red_ids;
    std::vector<std::size_t> blue_ids;
    Vec<T> normal;
    T c_red{};
    T c_blue{};
    T squared_margin{};
    double margin = 0.0;
    T xi{};

    Hyperplane<T> red_plane() const { return {normal, c_red}; }
    Hyperplane<T> blue_plane() const { return {normal, c_blue}; }
    Hyperplane<T> separator() const { return {normal, (c_red + c_blue) / T(2)}; }
    std::vector<std::size_t> ids() const;
};

template <typename T>
struct ESMResult {
    double emar = 0.0;
    std::uint64_t config_count = 0;
    T xi_sum{};
};

struct ESMOptions {
    std::size_t threads = 1;
    bool validate = true;  // run the GP check first
};

/// Every possible support set of the dataset, each exactly once (xi unset).
template <typename T>
std::vector<SupportConfig<T>> enumerate_support_configs(const PointModel<T>& model, std::size_t threads = 1);

/// Probability that C is the support set of the existent points.
template <typename T>
T xi(const PointModel<T>& model, const SupportConfig<T>& config);

template <typename T>
ESMResult<T> expected_separation_margin(const PointModel<T>& model, const ESMOptions& options = {});

template <typename T>
ESMResult<T> expected_separation_margin(const LocationTable& table, const ESMOptions& options = {});

struct CensusHint {
    std::uint64_t configs = 0;  // exact number of emitted configs
    std::uint64_t bound = 0;    // enumeration-class bound
};

CensusHint margin_census_hint(const LocationTable& table);

}  // namespace stochsep
