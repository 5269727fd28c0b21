#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "stochsep/dataset.hpp"
#include "stochsep/geometry.hpp"
#include "stochsep/point_model.hpp"

namespace stochsep {

enum class Strategy { scan, radial };

inline const char* strategy_name(Strategy s) { return s == Strategy::scan ? "scan" : "radial"; }

/// Axis direction (a, b) of the auxiliary subspace {a x1 + b x2 = 0}.
template <typename T>
struct AuxiliaryDirection {
    T a{};
    T b{};
};

template <typename T>
struct Witness {
    PointD<T> red;   // r-hat in CH(E_R)
    PointD<T> blue;  // b-hat in CH(E_B)
};

template <typename T>
struct CandidateSeparator {
    std::vector<std::size_t> on_set;  // location ids of E, increasing
    Hyperplane<T> h;
    AuxiliaryDirection<T> aux;
    std::optional<Witness<T>> witness;
    std::optional<PointD<T>> o;
    T tau{};
};

template <typename T>
struct LevelTerm {
    std::size_t dimension = 0;
    T trivial{};   // nonzero only at the bottom level
    T tau_sum{};   // sum of candidate charges (1-D charges at a 1-D bottom)
    std::uint64_t candidates = 0;
};

template <typename T>
struct SPResult {
    T sp{};
    std::vector<LevelTerm<T>> per_level;
    Strategy strategy = Strategy::radial;
};

struct SPOptions {
    Strategy strategy = Strategy::radial;
    std::size_t threads = 1;
    bool validate = true;  // run the SGPP check first
};

/// Sep(S) by extreme-separator enumeration with the two-dimensions-per-level recursion.
template <typename T>
SPResult<T> separable_probability(const LocationTable& table, const SPOptions& options = {});

template <typename T>
SPResult<T> separable_probability(const PointModel<T>& model, const SPOptions& options = {});

/// P(no red) + P(no blue) - P(nothing).
template <typename T>
T trivial_term(const PointModel<T>& model);

/// Bichromatic d-subsets of the model's locations with spanned hyperplane and aux direction.
template <typename T>
std::vector<CandidateSeparator<T>> enumerate_candidates(const PointModel<T>& model);

/// Convex combinations r-hat of `reds` and b-hat of `blues` agreeing on coordinates 3..d.
template <typename T>
std::optional<Witness<T>> coincidence_witness(const std::vector<PointD<T>>& reds, const std::vector<PointD<T>>& blues);

template <typename T>
PointD<T> orientation_indicator(const PointD<T>& red, const PointD<T>& blue);

/// Resolves witness, indicator and tau of a candidate in place; returns tau.
template <typename T>
T tau(const PointModel<T>& model, CandidateSeparator<T>& candidate);

/// Trivial term plus the charges of every location as the maximum of the left color.
template <typename T>
T sp_base_1d(const PointModel<T>& model, T* charges_only = nullptr);

// ---------------------------------------------------------------------------
// Deterministic instances

struct ExtremeSeparatorDescriptor {
    bool at_infinity = false;
    std::size_t level = 0;             // recursion depth k; separator lives in R^{d-2k}
    std::size_t first_coordinate = 1;  // = 2k + 1
    Hyperplane<Rational> separator;
    std::vector<std::size_t> on_set;   // indices into the instance
    AuxiliaryDirection<Rational> aux;
};

/// Extreme separator of a separable deterministic instance satisfying SGPP.
ExtremeSeparatorDescriptor extreme_separator(const std::vector<PointD<Rational>>& points,
                                             const std::vector<Color>& colors);

/// One summand of the SP decomposition, as a predicate over instances.
struct Charge {
    enum class Kind { trivial, tau, base_1d } kind = Kind::tau;
    std::size_t first_coordinate = 1;
    std::vector<std::size_t> present;  // all must exist
    std::vector<std::size_t> absent;   // none may exist
    std::vector<std::size_t> any_of;   // base_1d: at least one must exist
    Rational prob;
};

std::vector<Charge> enumerate_charges(const LocationTable& table);

/// Whether the instance (present[i] for location i) is counted by the charge.
bool charge_covers(const Charge& charge, const LocationTable& table, const std::vector<bool>& present);

}  // namespace stochsep
