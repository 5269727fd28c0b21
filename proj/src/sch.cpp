#include "stochsep/sch.hpp"

#include "stochsep/esm_engine.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/objects_engine.hpp"
#include "stochsep/sp_engine.hpp"

namespace stochsep {

namespace {

void check_query(const StochasticDataset& A, const std::vector<PointD<Rational>>& query, const char* who)
{
    if (!A.objects.empty()) throw DatasetError(DatasetErrorCode::unsupported, std::string(who) + ": A must consist of points");
    if (query.empty()) throw DatasetError(DatasetErrorCode::malformed, std::string(who) + ": empty query");
    for (const auto& p : query) {
        if (p.size() != A.dimension) {
            throw DatasetError(DatasetErrorCode::dimension_mismatch, std::string(who) + ": query dimension differs from A");
        }
    }
}

// Separable probability of the query points against A, transforming to SGPP when needed.
Rational separable_against(const StochasticDataset& A, const std::vector<PointD<Rational>>& query, const SCHOptions& options,
                           const char* who)
{
    check_query(A, query, who);
    auto S = sch_dataset(A, query);
    if (!validate_general_position(S, PositionLevel::sgpp, 1).ok) S = sgpp_transform(S).transformed;
    SPOptions sp;
    sp.threads = options.threads;
    return separable_probability<Rational>(locations_of(S), sp).sp;
}

}  // namespace

StochasticDataset sch_dataset(const StochasticDataset& A, const std::vector<PointD<Rational>>& reds)
{
    StochasticDataset S = A;
    for (auto& p : S.points) p.color = Color::blue;
    for (auto& u : S.uncertain_points) u.color = Color::blue;
    std::vector<StochasticPoint> points;
    for (const auto& r : reds) points.push_back({r, Color::red, 1, std::nullopt});
    points.insert(points.end(), S.points.begin(), S.points.end());
    S.points = std::move(points);
    return S;
}

Rational sch_membership_probability(const StochasticDataset& A, const PointD<Rational>& q, const SCHOptions& options)
{
    return 1 - separable_against(A, {q}, options, "sch_membership_probability");
}

Rational sch_intersection_probability(const StochasticDataset& A, const std::vector<PointD<Rational>>& Q,
                                      const SCHOptions& options)
{
    return 1 - separable_against(A, Q, options, "sch_intersection_probability");
}

double sch_epsilon_distant_probability(const StochasticDataset& A, const PointD<Rational>& q, const Rational& eps,
                                       const SCHOptions& options)
{
    check_query(A, {q}, "sch_epsilon_distant_probability");
    if (eps < 0) throw DatasetError(DatasetErrorCode::malformed, "sch_epsilon_distant_probability: eps must be >= 0");
    if (eps == 0) return separable_against(A, {q}, options, "sch_epsilon_distant_probability").get_d();
    const std::size_t d = A.dimension;
    if (d != 2 && d != 3) throw DimensionError("sch_epsilon_distant_probability: eps > 0 requires d in {2, 3}");
    StochasticDataset S = sch_dataset(A, {});
    S.objects.push_back({Color::red, 1, BallShape{q, eps}});
    if (!validate_general_position(S, PositionLevel::sgpp, 1).ok) {
        auto points = dataset_locations(S);
        points.push_back(q);
        S = transform_dataset(S, sgpp_matrix(points, d));
    }
    BallOptions ball;
    ball.threads = options.threads;
    return ball_separable_probability(ball_table(S), ball).sp;
}

double sch_expected_distance(const StochasticDataset& A, const PointD<Rational>& q, const SCHOptions& options)
{
    check_query(A, {q}, "sch_expected_distance");
    ESMOptions esm;
    esm.threads = options.threads;
    return 2 * expected_separation_margin<double>(locations_of(sch_dataset(A, {q})), esm).emar;
}

}  // namespace stochsep
