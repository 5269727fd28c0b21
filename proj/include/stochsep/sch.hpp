#pragma once

#include <cstddef>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/geometry.hpp"

namespace stochsep {

struct SCHOptions {
    std::size_t threads = 1;
};

/// Probability that q lies in the convex hull of the existent points of A.
Rational sch_membership_probability(const StochasticDataset& A, const PointD<Rational>& q, const SCHOptions& options = {});

/// Probability that the polytope with vertices `Q` meets the convex hull of the existent points of A.
Rational sch_intersection_probability(const StochasticDataset& A, const std::vector<PointD<Rational>>& Q,
                                      const SCHOptions& options = {});

/// Probability that q is farther than eps from the convex hull of the existent points of A
/// (an empty hull counts as infinitely far). eps > 0 requires d in {2, 3}.
double sch_epsilon_distant_probability(const StochasticDataset& A, const PointD<Rational>& q, const Rational& eps,
                                       const SCHOptions& options = {});

/// Expected distance from q to the convex hull of the existent points of A (0 for an empty hull).
double sch_expected_distance(const StochasticDataset& A, const PointD<Rational>& q, const SCHOptions& options = {});

/// A with every location blue and the given points added as red points of probability 1.
StochasticDataset sch_dataset(const StochasticDataset& A, const std::vector<PointD<Rational>>& reds);

}  // namespace stochsep
