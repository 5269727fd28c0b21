#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/geometry.hpp"

namespace stochsep {

/// Replaces every polytope by its vertices, tied together in an all-or-none
/// group with the polytope's probability; points and balls pass through.
StochasticDataset reduce_polytopes(const StochasticDataset& dataset);

/// Locations of a ball dataset: plain points and reduced polytope vertices
/// first (radius 0), then one location per ball.
struct BallTable {
    LocationTable table;
    std::vector<Rational> radii;  // parallel to table.locations

    std::size_t size() const { return radii.size(); }
    bool all_points() const;
};

/// Flattens a dataset of points, uncertain points, polytopes and balls.
BallTable ball_table(const StochasticDataset& dataset);

struct Ball {
    PointD<double> center;
    double radius = 0.0;
};

struct BallDistance {
    bool separable = false;
    double distance = 0.0;   // distance between the two hulls
    double lower = 0.0;      // certified lower bound
    Vec<double> direction;   // unit vector from the red hull towards the blue hull
    std::size_t iterations = 0;
    bool converged = true;
};

/// Distance between the hulls of two ball sets via a support-function min-norm iteration.
BallDistance ball_hull_distance(const std::vector<Ball>& reds, const std::vector<Ball>& blues);

/// True iff the hulls of the red and blue balls are disjoint (d in {2, 3}).
bool ball_separability_check(const std::vector<Ball>& reds, const std::vector<Ball>& blues);

/// Centers, radii, colors and existence of a ball table.
struct BallModel {
    std::size_t dimension = 0;
    std::vector<PointD<Rational>> exact_centers;
    std::vector<Rational> exact_radii;
    std::vector<PointD<double>> centers;
    std::vector<double> radii;
    std::vector<Color> colors;
    ExistenceModel<double> existence;
    double tolerance = 1e-9;  // absolute, scaled to the data

    static BallModel from(const BallTable& table);
    std::size_t size() const { return centers.size(); }
};

/// Extreme separator of a critical set, with unit normal and reds on the negative side.
struct CriticalSeparator {
    Hyperplane<double> h;
    Vec<double> aux;         // direction inside h orthogonal to the auxiliary subspace
    PointD<double> red_hat;  // coinciding pair of the projected contact hulls
    PointD<double> blue_hat;
    PointD<double> o;        // orientation indicator
};

/// Extreme separator of the balls `ids` when it is directly defined and tangent to all of them.
std::optional<CriticalSeparator> critical_extreme_separator(const BallModel& model, const std::vector<std::size_t>& ids);

/// Probability that `ids` is the critical set of the existent balls, given its separator.
double lambda_critical(const BallModel& model, const std::vector<std::size_t>& ids, const CriticalSeparator& sep);

struct BallOptions {
    std::size_t threads = 1;
    bool validate = true;
};

struct BallSPResult {
    double sp = 0.0;
    double recursion = 0.0;  // probability of the projected (or trivial) case
    double lambda_sum = 0.0;
    std::uint64_t critical_sets = 0;  // subsets with a directly defined separator
};

BallSPResult ball_separable_probability(const BallTable& table, const BallOptions& options = {});

/// Support planes w.x + b_red = 0 and w.x + b_blue = 0 with |w| = 1 and b_red > b_blue.
struct BallSupportConfig {
    std::vector<std::size_t> red_ids;
    std::vector<std::size_t> blue_ids;
    Vec<double> omega;
    double b_red = 0.0;
    double b_blue = 0.0;
    double margin = 0.0;  // (b_red - b_blue) / 2
    double xi = 0.0;

    std::vector<std::size_t> ids() const;
};

std::vector<BallSupportConfig> enumerate_ball_support_configs(const BallModel& model, std::size_t threads = 1);
double ball_xi(const BallModel& model, const BallSupportConfig& config);

struct BallESMResult {
    double emar = 0.0;
    std::uint64_t config_count = 0;
    double xi_sum = 0.0;
};

BallESMResult ball_expected_margin(const BallTable& table, const BallOptions& options = {});

/// Centers in general position (strong: zero-radius balls also in SGPP); d in {2, 3}.
void validate_ball_position(const BallTable& table, bool strong);

}  // namespace stochsep
