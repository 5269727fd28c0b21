#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stochsep/geometry.hpp"
#include "stochsep/numeric.hpp"

namespace stochsep {

enum class Color { red, blue };

inline Color opposite(Color c) { return c == Color::red ? Color::blue : Color::red; }
inline const char* color_name(Color c) { return c == Color::red ? "red" : "blue"; }

enum class UncertaintyModel { unipoint, multipoint };

struct StochasticPoint {
    PointD<Rational> location;
    Color color = Color::red;
    Rational prob = 1;
    std::optional<std::size_t> group;  // all-or-none dependence group (reduced polytopes)

    bool operator==(const StochasticPoint&) const = default;
};

struct WeightedLocation {
    PointD<Rational> coords;
    Rational prob;

    bool operator==(const WeightedLocation&) const = default;
};

struct UncertainPoint {
    std::vector<WeightedLocation> locations;
    Color color = Color::red;

    bool operator==(const UncertainPoint&) const = default;
};

struct BallShape {
    PointD<Rational> center;
    Rational radius;

    bool operator==(const BallShape&) const = default;
};

struct PolytopeShape {
    std::vector<PointD<Rational>> vertices;

    bool operator==(const PolytopeShape&) const = default;
};

struct StochasticObject {
    Color color = Color::red;
    Rational prob = 1;
    std::variant<BallShape, PolytopeShape> shape;

    bool operator==(const StochasticObject&) const = default;
};

struct AllOrNoneGroup {
    Rational prob;

    bool operator==(const AllOrNoneGroup&) const = default;
};

/// Bichromatic stochastic dataset as read from the JSON schema.
struct StochasticDataset {
    std::size_t dimension = 0;
    UncertaintyModel model = UncertaintyModel::unipoint;
    std::vector<StochasticPoint> points;
    std::vector<UncertainPoint> uncertain_points;
    std::vector<StochasticObject> objects;
    std::vector<AllOrNoneGroup> groups;

    std::size_t red_location_count() const;
    std::size_t blue_location_count() const;
    std::size_t n() const;  // min over colors, counted over locations
    std::size_t N() const;  // max over colors, counted over locations
    bool has_balls() const;
    bool has_polytopes() const;

    bool operator==(const StochasticDataset&) const = default;
};

enum class DatasetErrorCode { malformed, prob_out_of_range, sum_exceeds_one, dimension_mismatch, unknown_id, unsupported };

class DatasetError : public std::runtime_error {
public:
    DatasetError(DatasetErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DatasetErrorCode code() const { return code_; }

private:
    DatasetErrorCode code_;
};

const char* error_code_name(DatasetErrorCode code);

StochasticDataset parse_dataset(std::string_view json_text);
std::string serialize_dataset(const StochasticDataset& dataset);
void validate_dataset(const StochasticDataset& dataset);

// ---------------------------------------------------------------------------
// Flattened location view used by the engines.

enum class UnitKind {
    exclusive,    // at most one member exists (multipoint, or a single unipoint location)
    all_or_none,  // all members exist together (reduced polytope)
};

struct ExistenceUnit {
    UnitKind kind = UnitKind::exclusive;
    Rational prob = 0;  // group probability for all_or_none
    std::vector<std::size_t> members;
};

struct Location {
    PointD<Rational> coords;
    Color color = Color::red;
    Rational prob = 1;  // marginal existence probability
    std::size_t unit = 0;
};

/// Every location of a point dataset with stable ids (file order) and its
/// existence unit. Ids: plain points first, then uncertain-point locations.
struct LocationTable {
    std::size_t dimension = 0;
    std::vector<Location> locations;
    std::vector<ExistenceUnit> units;

    std::size_t size() const { return locations.size(); }
    std::vector<PointD<Rational>> coordinates() const;
    std::size_t count(Color c) const;
};

/// Throws DatasetError(unsupported) if balls are present; polytopes must be reduced first.
LocationTable locations_of(const StochasticDataset& dataset);

struct Scenario {
    std::vector<std::size_t> present;
    std::vector<std::size_t> absent;
};

/// Probability that every location in `present` exists and none in `absent` does.
Rational scenario_probability(const LocationTable& table, const Scenario& s);

// Engine-side copy of the existence model with probabilities in T.
template <typename T>
struct ExistenceModel {
    struct Unit {
        UnitKind kind;
        T prob;
    };
    std::vector<T> location_prob;
    std::vector<std::size_t> unit_of;
    std::vector<Unit> units;

    static ExistenceModel from(const LocationTable& table)
    {
        ExistenceModel m;
        for (const auto& loc : table.locations) {
            m.location_prob.push_back(from_rational<T>(loc.prob));
            m.unit_of.push_back(loc.unit);
        }
        for (const auto& u : table.units) m.units.push_back({u.kind, from_rational<T>(u.prob)});
        return m;
    }
};

/// Incrementally maintained scenario probability: locations can be marked
/// present/absent and unmarked in O(1) each.
template <typename T>
class ScenarioAccumulator {
public:
    explicit ScenarioAccumulator(const ExistenceModel<T>& model)
        : model_(&model), state_(model.units.size()), product_(1)
    {
    }

    void add_present(std::size_t id) { update(id, +1, 0); }
    void remove_present(std::size_t id) { update(id, -1, 0); }
    void add_absent(std::size_t id) { update(id, 0, +1); }
    void remove_absent(std::size_t id) { update(id, 0, -1); }

    T value() const { return zeros_ > 0 ? T(0) : product_; }

private:
    struct UnitState {
        int present = 0;
        int absent = 0;
        T present_prob = 0;
        T absent_prob = 0;
    };

    T factor(std::size_t u) const
    {
        const auto& s = state_[u];
        const auto& unit = model_->units[u];
        if (unit.kind == UnitKind::exclusive) {
            if (s.present >= 2) return T(0);
            if (s.present == 1) return s.present_prob;
            return T(1) - s.absent_prob;
        }
        if (s.present > 0 && s.absent > 0) return T(0);
        if (s.present > 0) return unit.prob;
        if (s.absent > 0) return T(1) - unit.prob;
        return T(1);
    }

    void update(std::size_t id, int dp, int da)
    {
        const std::size_t u = model_->unit_of[id];
        remove_factor(factor(u));
        auto& s = state_[u];
        const T& p = model_->location_prob[id];
        if (dp > 0) s.present_prob += p;
        if (dp < 0) s.present_prob -= p;
        if (da > 0) s.absent_prob += p;
        if (da < 0) s.absent_prob -= p;
        s.present += dp;
        s.absent += da;
        if constexpr (!NumTraits<T>::exact) {
            if (s.present == 0) s.present_prob = 0;
            if (s.absent == 0) s.absent_prob = 0;
        }
        add_factor(factor(u));
    }

    bool is_zero(const T& f) const
    {
        if constexpr (NumTraits<T>::exact) {
            return f == 0;
        } else {
            return f <= 1e-15;
        }
    }

    void add_factor(const T& f)
    {
        if (is_zero(f)) {
            ++zeros_;
        } else {
            product_ *= f;
        }
    }

    void remove_factor(const T& f)
    {
        if (is_zero(f)) {
            --zeros_;
        } else {
            product_ /= f;
        }
    }

    const ExistenceModel<T>* model_;
    std::vector<UnitState> state_;
    T product_;
    int zeros_ = 0;
};

/// Direct (non-incremental) scenario probability over an existence model.
template <typename T>
T scenario_probability(const ExistenceModel<T>& model, const std::vector<std::size_t>& present,
                       const std::vector<std::size_t>& absent)
{
    ScenarioAccumulator<T> acc(model);
    for (auto id : present) acc.add_present(id);
    for (auto id : absent) acc.add_absent(id);
    return acc.value();
}

// ---------------------------------------------------------------------------
// Generators. All randomness derives from the supplied seed.

struct ProbLaw {
    enum class Kind { uniform_grid, constant } kind = Kind::uniform_grid;
    Rational constant = 1;  // for Kind::constant
    unsigned denominator = 16;  // uniform_grid draws k/denominator, k in [1, denominator]

    static ProbLaw uniform(unsigned denominator = 16) { return {Kind::uniform_grid, 1, denominator}; }
    static ProbLaw fixed(Rational p) { return {Kind::constant, std::move(p), 16}; }
};

enum class PositionLevel { gp, sgpp };

struct RandomDatasetOptions {
    long coordinate_range = 1000;  // integer coordinates in [-range, range]
    PositionLevel level = PositionLevel::gp;
};

StochasticDataset gen_random(std::size_t n_red, std::size_t n_blue, std::size_t d, const ProbLaw& law,
                             std::uint64_t seed, const RandomDatasetOptions& options = {});

/// Multipoint dataset: each uncertain point has 1..max_locations locations.
StochasticDataset gen_random_multipoint(std::size_t n_red_points, std::size_t n_blue_points, std::size_t d,
                                        std::size_t max_locations, std::uint64_t seed,
                                        const RandomDatasetOptions& options = {});

struct BallDatasetOptions {
    long coordinate_range = 60;      // integer centers in [-range, range], SGPP
    unsigned radius_steps = 24;      // radii k / 7 with k in [0, radius_steps]
    double zero_radius_share = 0.3;  // probability of a zero radius
};

/// Ball objects with SGPP centers and mixed radii, including zero.
StochasticDataset gen_random_balls(std::size_t n_red, std::size_t n_blue, std::size_t d, const ProbLaw& law,
                                   std::uint64_t seed, const BallDatasetOptions& options = {});

/// Reds drawn from an eps-ball at the origin, blues in d groups at the unit vectors.
StochasticDataset gen_cluster_stress(std::size_t n, std::size_t N, std::size_t d, double eps, std::uint64_t seed);

}  // namespace stochsep
