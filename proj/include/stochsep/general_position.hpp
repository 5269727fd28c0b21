#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/geometry.hpp"

namespace stochsep {

struct PositionViolation {
    std::vector<std::size_t> ids;  // 1-based location ids
    std::size_t first_coordinate = 1;  // failed level is the projection onto {first_coordinate..d}
};

struct PositionReport {
    bool ok = true;
    PositionLevel level = PositionLevel::gp;
    std::vector<PositionViolation> violations;
    bool truncated = false;  // more violations exist than were recorded
};

/// GP: every subset of min(m, d+1) locations is affinely independent.
/// SGPP: the same at every projection onto {2k+1..d}.
PositionReport validate_general_position(const std::vector<PointD<Rational>>& points, PositionLevel level,
                                         std::size_t max_violations = 64);

/// Locations in file order: points, uncertain-point locations, polytope vertices.
PositionReport validate_general_position(const StochasticDataset& dataset, PositionLevel level,
                                         std::size_t max_violations = 64);

/// True if `accepted` plus `candidate` satisfies `level`, given that `accepted` already does.
bool extends_general_position(const std::vector<PointD<Rational>>& accepted, const PointD<Rational>& candidate,
                              PositionLevel level);

std::string describe_level(std::size_t first_coordinate, std::size_t d);

/// Raised by engines whose position precondition fails; carries the report.
class PositionError : public DegenerateInput {
public:
    PositionError(const std::string& what, PositionReport report) : DegenerateInput(what), report_(std::move(report)) {}
    const PositionReport& report() const { return report_; }

private:
    PositionReport report_;
};

/// Throws PositionError if the points violate `level`.
void require_general_position(const std::vector<PointD<Rational>>& points, PositionLevel level, const char* who);

struct OrthoMatrix {
    std::vector<std::vector<double>> rows;

    double max_orthonormality_error() const;
    std::vector<double> apply(const std::vector<double>& x) const;
};

struct SgppTransformResult {
    OrthoMatrix matrix;
    StochasticDataset transformed;
};

/// Orthogonal matrix making a GP dataset satisfy SGPP. The transformed
/// coordinates are the exact rationals of the double-precision images.
SgppTransformResult sgpp_transform(const StochasticDataset& dataset);

OrthoMatrix sgpp_matrix(const std::vector<PointD<Rational>>& points, std::size_t d);

/// Applies a row matrix to every location of the dataset (points, uncertain points, object geometry).
StochasticDataset transform_dataset(const StochasticDataset& dataset, const OrthoMatrix& matrix);

std::vector<PointD<Rational>> dataset_locations(const StochasticDataset& dataset);

}  // namespace stochsep
