#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/objects_engine.hpp"

namespace stochsep {

class GuardRailError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    std::size_t max_locations = 22;
    bool force = false;
};

/// Calls fn(present, probability) for every consistent full scenario of
/// positive probability; `present` is a bitmask over location ids.
void for_each_instance(const LocationTable& table, const std::function<void(std::uint64_t, const Rational&)>& fn,
                       const OracleOptions& options = {});

struct BruteSP {
    Rational separable;    // sum of Pr(I) over separable instances
    Rational inseparable;  // sum over the rest
    std::uint64_t instances = 0;
};

BruteSP brute_sp_detail(const LocationTable& table, const OracleOptions& options = {});
Rational brute_sp(const LocationTable& table, const OracleOptions& options = {});

struct BruteESM {
    double esm = 0.0;
    Rational bichromatic_separable;  // sum of Pr(I) over separable instances with both colors
    std::uint64_t instances = 0;
};

BruteESM brute_esm_detail(const LocationTable& table, const OracleOptions& options = {});
double brute_esm(const LocationTable& table, const OracleOptions& options = {});

struct MarginCensus {
    std::vector<Rational> squared_margins;  // distinct, increasing
    std::vector<double> margins;
    std::size_t kappa = 0;
    std::string tier = "exact";
};

MarginCensus enumerate_margins(const LocationTable& table, const OracleOptions& options = {});

/// Ball instances: separability and margin from the hull distance of the present balls.
double brute_ball_sp(const BallTable& table, const OracleOptions& options = {});
double brute_ball_esm(const BallTable& table, const OracleOptions& options = {});

/// Probability that q lies in the hull of the present points (direct hull test per instance).
Rational brute_hull_membership(const LocationTable& table, const PointD<Rational>& q, const OracleOptions& options = {});

/// Expected distance from q to the hull of the present points (0 for empty instances).
double brute_expected_distance(const LocationTable& table, const PointD<Rational>& q, const OracleOptions& options = {});

}  // namespace stochsep
