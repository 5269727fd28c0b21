#include "stochsep/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <json.hpp>

#include "stochsep/general_position.hpp"

namespace stochsep {

using nlohmann::json;

const char* error_code_name(DatasetErrorCode code)
{
    switch (code) {
    case DatasetErrorCode::malformed: return "Malformed";
    case DatasetErrorCode::prob_out_of_range: return "ProbOutOfRange";
    case DatasetErrorCode::sum_exceeds_one: return "SumExceedsOne";
    case DatasetErrorCode::dimension_mismatch: return "DimensionMismatch";
    case DatasetErrorCode::unknown_id: return "UnknownId";
    case DatasetErrorCode::unsupported: return "Unsupported";
    }
    return "Unknown";
}

std::size_t StochasticDataset::red_location_count() const
{
    std::size_t k = 0;
    for (const auto& p : points) k += p.color == Color::red;
    for (const auto& u : uncertain_points) {
        if (u.color == Color::red) k += u.locations.size();
    }
    return k;
}

std::size_t StochasticDataset::blue_location_count() const
{
    std::size_t k = 0;
    for (const auto& p : points) k += p.color == Color::blue;
    for (const auto& u : uncertain_points) {
        if (u.color == Color::blue) k += u.locations.size();
    }
    return k;
}

std::size_t StochasticDataset::n() const { return std::min(red_location_count(), blue_location_count()); }
std::size_t StochasticDataset::N() const { return std::max(red_location_count(), blue_location_count()); }

bool StochasticDataset::has_balls() const
{
    return std::any_of(objects.begin(), objects.end(),
                       [](const StochasticObject& o) { return std::holds_alternative<BallShape>(o.shape); });
}

bool StochasticDataset::has_polytopes() const
{
    return std::any_of(objects.begin(), objects.end(),
                       [](const StochasticObject& o) { return std::holds_alternative<PolytopeShape>(o.shape); });
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw DatasetError(DatasetErrorCode::malformed, what); }

Rational number_from_json(const json& v, const char* field)
{
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) {
            if (v.is_number_unsigned()) return Rational(mpz_class(std::to_string(v.get<std::uint64_t>())));
            return Rational(mpz_class(std::to_string(v.get<std::int64_t>())));
        }
        if (v.is_number_float()) {
            // shortest round-trip text, then exact decimal parse
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
            return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
        }
    } catch (const ParseError& e) {
        malformed(std::string(field) + ": " + e.what());
    }
    malformed(std::string(field) + ": expected a number or numeric string");
}

Color color_from_json(const json& v)
{
    if (!v.is_string()) malformed("color must be a string");
    const auto s = v.get<std::string>();
    if (s == "red") return Color::red;
    if (s == "blue") return Color::blue;
    malformed("unknown color '" + s + "'");
}

PointD<Rational> coords_from_json(const json& v, std::size_t d, const char* field)
{
    if (!v.is_array()) malformed(std::string(field) + " must be an array");
    if (v.size() != d) {
        throw DatasetError(DatasetErrorCode::dimension_mismatch, std::string(field) + " has " +
                                                                     std::to_string(v.size()) +
                                                                     " coordinates, dimension is " + std::to_string(d));
    }
    PointD<Rational> p;
    for (const auto& x : v) p.push_back(number_from_json(x, field));
    return p;
}

void require_prob(const Rational& p, const std::string& where)
{
    if (sgn(p) <= 0 || p > 1) {
        throw DatasetError(DatasetErrorCode::prob_out_of_range,
                           where + ": probability " + to_fraction_string(p) + " is outside (0,1]");
    }
}

const json& required(const json& obj, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
    return *it;
}

std::string rational_text(const Rational& q)
{
    if (q.get_den() == 1) return q.get_num().get_str();
    return to_fraction_string(q);
}

json coords_to_json(const PointD<Rational>& p)
{
    json a = json::array();
    for (const auto& v : p) a.push_back(rational_text(v));
    return a;
}

}  // namespace

void validate_dataset(const StochasticDataset& ds)
{
    if (ds.dimension < 1) throw DatasetError(DatasetErrorCode::dimension_mismatch, "dimension must be >= 1");
    auto check_dim = [&](const PointD<Rational>& p, const std::string& where) {
        if (p.size() != ds.dimension) {
            throw DatasetError(DatasetErrorCode::dimension_mismatch, where + ": wrong dimension");
        }
    };
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        const auto where = "points[" + std::to_string(i) + "]";
        check_dim(ds.points[i].location, where);
        require_prob(ds.points[i].prob, where);
        if (ds.points[i].group && *ds.points[i].group >= ds.groups.size()) {
            throw DatasetError(DatasetErrorCode::unknown_id, where + ": unknown group");
        }
    }
    for (std::size_t i = 0; i < ds.uncertain_points.size(); ++i) {
        const auto where = "uncertain_points[" + std::to_string(i) + "]";
        Rational total = 0;
        if (ds.uncertain_points[i].locations.empty()) malformed(where + ": no locations");
        for (const auto& loc : ds.uncertain_points[i].locations) {
            check_dim(loc.coords, where);
            require_prob(loc.prob, where);
            total += loc.prob;
        }
        if (total > 1) {
            throw DatasetError(DatasetErrorCode::sum_exceeds_one,
                               where + ": location probabilities sum to " + to_fraction_string(total));
        }
    }
    for (std::size_t i = 0; i < ds.objects.size(); ++i) {
        const auto where = "objects[" + std::to_string(i) + "]";
        const auto& o = ds.objects[i];
        require_prob(o.prob, where);
        if (const auto* b = std::get_if<BallShape>(&o.shape)) {
            check_dim(b->center, where);
            if (sgn(b->radius) < 0) malformed(where + ": negative radius");
        } else {
            const auto& poly = std::get<PolytopeShape>(o.shape);
            if (poly.vertices.empty()) malformed(where + ": polytope without vertices");
            for (const auto& v : poly.vertices) check_dim(v, where);
        }
    }
    for (const auto& g : ds.groups) require_prob(g.prob, "groups");
}

StochasticDataset parse_dataset(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) malformed("top level must be an object");
    StochasticDataset ds;
    if (auto it = doc.find("version"); it != doc.end() && (!it->is_number_integer() || it->get<int>() != 1)) {
        malformed("unsupported schema version");
    }
    const auto& dim = required(doc, "dimension");
    if (!dim.is_number_integer() || dim.get<long>() < 1) malformed("dimension must be a positive integer");
    ds.dimension = dim.get<std::size_t>();
    if (auto it = doc.find("model"); it != doc.end()) {
        if (*it == "unipoint") {
            ds.model = UncertaintyModel::unipoint;
        } else if (*it == "multipoint") {
            ds.model = UncertaintyModel::multipoint;
        } else {
            malformed("model must be 'unipoint' or 'multipoint'");
        }
    }
    if (auto it = doc.find("groups"); it != doc.end()) {
        for (const auto& g : *it) ds.groups.push_back({number_from_json(g, "groups")});
    }
    if (auto it = doc.find("points"); it != doc.end()) {
        for (const auto& p : *it) {
            StochasticPoint sp;
            sp.color = color_from_json(required(p, "color"));
            sp.location = coords_from_json(required(p, "coords"), ds.dimension, "coords");
            sp.prob = p.contains("prob") ? number_from_json(p["prob"], "prob") : Rational(1);
            if (auto g = p.find("group"); g != p.end()) sp.group = g->get<std::size_t>();
            ds.points.push_back(std::move(sp));
        }
    }
    if (auto it = doc.find("uncertain_points"); it != doc.end()) {
        for (const auto& u : *it) {
            UncertainPoint up;
            up.color = color_from_json(required(u, "color"));
            for (const auto& loc : required(u, "locations")) {
                up.locations.push_back({coords_from_json(required(loc, "coords"), ds.dimension, "coords"),
                                        number_from_json(required(loc, "prob"), "prob")});
            }
            ds.uncertain_points.push_back(std::move(up));
        }
    }
    if (auto it = doc.find("objects"); it != doc.end()) {
        for (const auto& o : *it) {
            StochasticObject obj;
            obj.color = color_from_json(required(o, "color"));
            obj.prob = o.contains("prob") ? number_from_json(o["prob"], "prob") : Rational(1);
            const auto& shape = required(o, "shape");
            const auto& type = required(shape, "type");
            if (type == "ball") {
                obj.shape = BallShape{coords_from_json(required(shape, "center"), ds.dimension, "center"),
                                      number_from_json(required(shape, "radius"), "radius")};
            } else if (type == "polytope") {
                PolytopeShape poly;
                for (const auto& v : required(shape, "vertices")) {
                    poly.vertices.push_back(coords_from_json(v, ds.dimension, "vertices"));
                }
                obj.shape = std::move(poly);
            } else {
                malformed("unknown shape type");
            }
            ds.objects.push_back(std::move(obj));
        }
    }
    validate_dataset(ds);
    return ds;
}

std::string serialize_dataset(const StochasticDataset& ds)
{
    json doc;
    doc["version"] = 1;
    doc["dimension"] = ds.dimension;
    doc["model"] = ds.model == UncertaintyModel::unipoint ? "unipoint" : "multipoint";
    json points = json::array();
    for (const auto& p : ds.points) {
        json jp{{"color", color_name(p.color)}, {"coords", coords_to_json(p.location)}, {"prob", rational_text(p.prob)}};
        if (p.group) jp["group"] = *p.group;
        points.push_back(std::move(jp));
    }
    doc["points"] = std::move(points);
    if (!ds.uncertain_points.empty()) {
        json ups = json::array();
        for (const auto& u : ds.uncertain_points) {
            json locs = json::array();
            for (const auto& l : u.locations) {
                locs.push_back({{"coords", coords_to_json(l.coords)}, {"prob", rational_text(l.prob)}});
            }
            ups.push_back({{"color", color_name(u.color)}, {"locations", std::move(locs)}});
        }
        doc["uncertain_points"] = std::move(ups);
    }
    if (!ds.objects.empty()) {
        json objs = json::array();
        for (const auto& o : ds.objects) {
            json shape;
            if (const auto* b = std::get_if<BallShape>(&o.shape)) {
                shape = {{"type", "ball"}, {"center", coords_to_json(b->center)}, {"radius", rational_text(b->radius)}};
            } else {
                json verts = json::array();
                for (const auto& v : std::get<PolytopeShape>(o.shape).vertices) verts.push_back(coords_to_json(v));
                shape = {{"type", "polytope"}, {"vertices", std::move(verts)}};
            }
            objs.push_back({{"color", color_name(o.color)}, {"prob", rational_text(o.prob)}, {"shape", std::move(shape)}});
        }
        doc["objects"] = std::move(objs);
    }
    if (!ds.groups.empty()) {
        json groups = json::array();
        for (const auto& g : ds.groups) groups.push_back(rational_text(g.prob));
        doc["groups"] = std::move(groups);
    }
    return doc.dump(2) + "\n";
}

std::vector<PointD<Rational>> LocationTable::coordinates() const
{
    std::vector<PointD<Rational>> out;
    out.reserve(locations.size());
    for (const auto& l : locations) out.push_back(l.coords);
    return out;
}

std::size_t LocationTable::count(Color c) const
{
    return static_cast<std::size_t>(
        std::count_if(locations.begin(), locations.end(), [c](const Location& l) { return l.color == c; }));
}

LocationTable locations_of(const StochasticDataset& ds)
{
    if (!ds.objects.empty()) {
        throw DatasetError(DatasetErrorCode::unsupported, "dataset contains objects; reduce polytopes or use the ball engine");
    }
    LocationTable t;
    t.dimension = ds.dimension;
    std::vector<long> group_unit(ds.groups.size(), -1);
    for (const auto& p : ds.points) {
        std::size_t unit;
        if (p.group) {
            auto& gu = group_unit[*p.group];
            if (gu < 0) {
                gu = static_cast<long>(t.units.size());
                t.units.push_back({UnitKind::all_or_none, ds.groups[*p.group].prob, {}});
            }
            unit = static_cast<std::size_t>(gu);
        } else {
            unit = t.units.size();
            t.units.push_back({UnitKind::exclusive, 0, {}});
        }
        t.units[unit].members.push_back(t.locations.size());
        t.locations.push_back({p.location, p.color, p.prob, unit});
    }
    for (const auto& u : ds.uncertain_points) {
        const std::size_t unit = t.units.size();
        t.units.push_back({UnitKind::exclusive, 0, {}});
        for (const auto& l : u.locations) {
            t.units[unit].members.push_back(t.locations.size());
            t.locations.push_back({l.coords, u.color, l.prob, unit});
        }
    }
    return t;
}

Rational scenario_probability(const LocationTable& table, const Scenario& s)
{
    std::vector<char> mark(table.size(), 0);
    for (auto id : s.present) {
        if (id >= table.size()) throw DatasetError(DatasetErrorCode::unknown_id, "unknown location id " + std::to_string(id));
        mark[id] |= 1;
    }
    for (auto id : s.absent) {
        if (id >= table.size()) throw DatasetError(DatasetErrorCode::unknown_id, "unknown location id " + std::to_string(id));
        if (mark[id] & 1) throw std::invalid_argument("scenario: location " + std::to_string(id) + " both present and absent");
    }
    auto model = ExistenceModel<Rational>::from(table);
    return scenario_probability(model, s.present, s.absent);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

Rational draw_prob(const ProbLaw& law, std::mt19937_64& rng)
{
    if (law.kind == ProbLaw::Kind::constant) return law.constant;
    std::uniform_int_distribution<unsigned> k(1, law.denominator);
    Rational p(k(rng), law.denominator);
    p.canonicalize();
    return p;
}

PointD<Rational> draw_integer_point(std::size_t d, long range, std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> coord(-range, range);
    PointD<Rational> p;
    for (std::size_t i = 0; i < d; ++i) p.push_back(Rational(coord(rng)));
    return p;
}

// Appends candidates from `draw` one at a time, rejecting draws that break
// the requested position level against the points accepted so far.
template <typename Draw>
std::vector<PointD<Rational>> draw_in_position(std::size_t count, PositionLevel level, Draw&& draw)
{
    std::vector<PointD<Rational>> pts;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > 100000) throw std::runtime_error("generator: unable to reach general position");
            auto p = draw();
            if (extends_general_position(pts, p, level)) {
                pts.push_back(std::move(p));
                break;
            }
        }
    }
    return pts;
}

}  // namespace

StochasticDataset gen_random(std::size_t n_red, std::size_t n_blue, std::size_t d, const ProbLaw& law,
                             std::uint64_t seed, const RandomDatasetOptions& options)
{
    std::mt19937_64 rng(seed);
    StochasticDataset ds;
    ds.dimension = d;
    auto pts = draw_in_position(n_red + n_blue, options.level,
                                [&] { return draw_integer_point(d, options.coordinate_range, rng); });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        StochasticPoint p;
        p.location = std::move(pts[i]);
        p.color = i < n_red ? Color::red : Color::blue;
        p.prob = draw_prob(law, rng);
        ds.points.push_back(std::move(p));
    }
    return ds;
}

StochasticDataset gen_random_balls(std::size_t n_red, std::size_t n_blue, std::size_t d, const ProbLaw& law,
                                   std::uint64_t seed, const BallDatasetOptions& options)
{
    std::mt19937_64 rng(seed);
    StochasticDataset ds;
    ds.dimension = d;
    auto centers = draw_in_position(n_red + n_blue, PositionLevel::sgpp,
                                    [&] { return draw_integer_point(d, options.coordinate_range, rng); });
    std::bernoulli_distribution zero(options.zero_radius_share);
    std::uniform_int_distribution<long> step(1, std::max<long>(1, static_cast<long>(options.radius_steps)));
    for (std::size_t i = 0; i < centers.size(); ++i) {
        StochasticObject obj;
        obj.color = i < n_red ? Color::red : Color::blue;
        obj.prob = draw_prob(law, rng);
        Rational radius(zero(rng) ? 0 : step(rng), 7);
        radius.canonicalize();
        obj.shape = BallShape{std::move(centers[i]), std::move(radius)};
        ds.objects.push_back(std::move(obj));
    }
    return ds;
}

StochasticDataset gen_random_multipoint(std::size_t n_red_points, std::size_t n_blue_points, std::size_t d,
                                        std::size_t max_locations, std::uint64_t seed,
                                        const RandomDatasetOptions& options)
{
    std::mt19937_64 rng(seed);
    StochasticDataset ds;
    ds.dimension = d;
    ds.model = UncertaintyModel::multipoint;
    std::uniform_int_distribution<std::size_t> size_dist(1, std::max<std::size_t>(1, max_locations));
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    for (std::size_t i = 0; i < n_red_points + n_blue_points; ++i) {
        sizes.push_back(size_dist(rng));
        total += sizes.back();
    }
    auto pts = draw_in_position(total, options.level,
                                [&] { return draw_integer_point(d, options.coordinate_range, rng); });
    std::size_t next = 0;
    constexpr unsigned den = 16;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        UncertainPoint up;
        up.color = i < n_red_points ? Color::red : Color::blue;
        // k_j / den with k_j >= 1 and sum k_j <= den
        std::vector<unsigned> ks;
        for (;;) {
            ks.clear();
            unsigned sum = 0;
            std::uniform_int_distribution<unsigned> k(1, den);
            for (std::size_t j = 0; j < sizes[i]; ++j) {
                ks.push_back(k(rng));
                sum += ks.back();
            }
            if (sum <= den) break;
        }
        for (std::size_t j = 0; j < sizes[i]; ++j) {
            Rational p(ks[j], den);
            p.canonicalize();
            up.locations.push_back({std::move(pts[next++]), p});
        }
        ds.uncertain_points.push_back(std::move(up));
    }
    return ds;
}

StochasticDataset gen_cluster_stress(std::size_t n, std::size_t N, std::size_t d, double eps, std::uint64_t seed)
{
    if (d == 0 || N % d != 0) throw std::invalid_argument("gen_cluster_stress: N must be a multiple of d");
    if (!(eps > 0)) throw std::invalid_argument("gen_cluster_stress: eps must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit;
    constexpr double quantum = 1.0 / (1 << 20);

    auto draw_near = [&](const std::vector<double>& center) {
        std::vector<double> dir(d);
        double norm = 0;
        do {
            norm = 0;
            for (auto& v : dir) {
                v = gauss(rng);
                norm += v * v;
            }
        } while (norm == 0);
        norm = std::sqrt(norm);
        const double radius = eps * std::pow(unit(rng), 1.0 / static_cast<double>(d));
        PointD<Rational> p;
        for (std::size_t i = 0; i < d; ++i) {
            const double x = center[i] + radius * dir[i] / norm;
            p.push_back(rational_from_double(std::round(x / quantum) * quantum));
        }
        return p;
    };

    StochasticDataset ds;
    ds.dimension = d;
    std::vector<PointD<Rational>> accepted;
    auto add = [&](const std::vector<double>& center, Color color) {
        for (;;) {
            auto p = draw_near(center);
            if (!extends_general_position(accepted, p, PositionLevel::gp)) continue;
            accepted.push_back(p);
            ds.points.push_back({std::move(p), color, Rational(1, 2), std::nullopt});
            return;
        }
    };
    for (std::size_t i = 0; i < n; ++i) add(std::vector<double>(d, 0.0), Color::red);
    for (std::size_t g = 0; g < d; ++g) {
        std::vector<double> center(d, 0.0);
        center[g] = 1.0;
        for (std::size_t i = 0; i < N / d; ++i) add(center, Color::blue);
    }
    return ds;
}

}  // namespace stochsep
