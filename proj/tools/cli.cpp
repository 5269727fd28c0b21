#include "cli.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stochsep/combinatorics.hpp"
#include "stochsep/dataset.hpp"
#include "stochsep/esm_engine.hpp"
#include "stochsep/general_position.hpp"
#include "stochsep/objects_engine.hpp"
#include "stochsep/oracle.hpp"
#include "stochsep/sch.hpp"
#include "stochsep/sp_engine.hpp"

namespace stochsep::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t max_dimension = 6;
constexpr std::uint64_t max_candidates = 1'000'000'000;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string input;
    std::string mode;
    std::string format = "json";
    std::string output;
    std::size_t threads = 1;
    bool force = false;
    bool timings = false;
};

struct Report {
    std::string command;
    std::string digest;
    json results = json::object();
    json diagnostics = json::object();
    json warnings = json::array();
};

std::string decimal(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string exact(const Rational& q) { return to_fraction_string(q); }

std::string digest_of(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
}

PointD<Rational> parse_point(const std::string& text)
{
    PointD<Rational> p;
    std::stringstream ss(text);
    std::string item;
    try {
        while (std::getline(ss, item, ',')) p.push_back(parse_rational(item));
    } catch (const ParseError& e) {
        throw UsageError("bad point '" + text + "': " + e.what());
    }
    if (p.empty()) throw UsageError("empty point");
    return p;
}

json point_json(const PointD<Rational>& p)
{
    json a = json::array();
    for (const auto& v : p) a.push_back(v.get_den() == 1 ? v.get_num().get_str() : exact(v));
    return a;
}

json violations_json(const PositionReport& report)
{
    json out = json::array();
    for (const auto& v : report.violations) {
        out.push_back({{"ids", v.ids}, {"first_coordinate", v.first_coordinate}});
    }
    return out;
}

void emit(const Report& r, const Common& c, std::ostream& out)
{
    json doc;
    doc["command"] = r.command;
    doc["report_version"] = 1;
    doc["input_digest"] = r.digest.empty() ? json(nullptr) : json(r.digest);
    doc["results"] = r.results;
    doc["diagnostics"] = r.diagnostics;
    doc["warnings"] = r.warnings;
    if (c.format == "text") {
        for (const auto& [key, value] : r.results.items()) {
            out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
        }
        for (const auto& w : r.warnings) out << "warning: " << w.get<std::string>() << "\n";
        return;
    }
    out << doc.dump(2) << "\n";
}

// Loads the input dataset and records its digest.
StochasticDataset load(const Common& c, Report& r)
{
    if (c.input.empty()) throw UsageError("--input is required");
    const auto text = read_file(c.input);
    r.digest = digest_of(text);
    return parse_dataset(text);
}

template <typename Fn>
auto timed(const Common& c, Report& r, const char* key, Fn&& fn)
{
    const auto start = std::chrono::steady_clock::now();
    auto value = fn();
    if (c.timings) {
        const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
        r.diagnostics["timings_ms"][key] = ms.count();
    }
    return value;
}

void guard(bool exceeded, const std::string& what, const Common& c)
{
    if (exceeded && !c.force) throw GuardRailError(what + " (use --force to override)");
}

void guard_enumeration(const LocationTable& t, std::size_t subset, const Common& c)
{
    guard(t.dimension > max_dimension, "dimension " + std::to_string(t.dimension) + " exceeds " + std::to_string(max_dimension), c);
    const auto budget = bichromatic_count(t.count(Color::red), t.count(Color::blue), subset);
    guard(budget > max_candidates, "enumeration budget " + std::to_string(budget) + " exceeds 10^9 candidates", c);
}

LocationTable point_table(const StochasticDataset& ds)
{
    if (ds.has_balls()) throw DatasetError(DatasetErrorCode::unsupported, "dataset contains balls; use the -objects commands");
    return locations_of(reduce_polytopes(ds));
}

std::string mode_or(const Common& c, const char* fallback) { return c.mode.empty() ? fallback : c.mode; }

// ---------------------------------------------------------------------------
// Commands

void cmd_validate(const Common& c, const std::string& level, Report& r, int& code)
{
    StochasticDataset ds;
    try {
        ds = load(c, r);
    } catch (const DatasetError& e) {
        r.results = {{"valid", false}, {"error", error_code_name(e.code())}, {"message", e.what()}};
        code = invalid;
        return;
    }
    const auto lvl = level == "gp" ? PositionLevel::gp : PositionLevel::sgpp;
    auto report = validate_general_position(ds, lvl);
    r.results["valid"] = report.ok;
    r.results["level"] = level;
    r.results["locations"] = dataset_locations(ds).size();
    r.results["n"] = ds.n();
    r.results["N"] = ds.N();
    r.results["violations"] = violations_json(report);
    r.results["truncated"] = report.truncated;
    if (report.ok && ds.has_balls()) {
        try {
            validate_ball_position(ball_table(ds), lvl == PositionLevel::sgpp);
        } catch (const DegenerateInput& e) {
            r.results["valid"] = false;
            r.warnings.push_back(std::string("ball position: ") + e.what());
        }
    }
    if (!r.results["valid"].get<bool>()) code = invalid;
}

void cmd_transform(const Common& c, Report& r)
{
    auto ds = load(c, r);
    auto t = sgpp_transform(ds);
    r.results["changed"] = !(t.transformed == ds);
    r.results["matrix"] = t.matrix.rows;
    r.results["orthonormality_error"] = t.matrix.max_orthonormality_error();
    r.results["sgpp"] = validate_general_position(t.transformed, PositionLevel::sgpp, 1).ok;
    if (!c.output.empty()) {
        write_file(c.output, serialize_dataset(t.transformed));
        r.results["output"] = c.output;
    } else {
        r.results["dataset"] = json::parse(serialize_dataset(t.transformed));
    }
}

template <typename T>
void sp_results(const SPResult<T>& res, Report& r)
{
    json levels = json::array();
    std::uint64_t candidates = 0;
    for (const auto& l : res.per_level) {
        if constexpr (NumTraits<T>::exact) {
            levels.push_back({{"dimension", l.dimension}, {"trivial", exact(l.trivial)}, {"tau_sum", exact(l.tau_sum)},
                              {"candidates", l.candidates}});
        } else {
            levels.push_back({{"dimension", l.dimension}, {"trivial", decimal(l.trivial)}, {"tau_sum", decimal(l.tau_sum)},
                              {"candidates", l.candidates}});
        }
        candidates += l.candidates;
    }
    if constexpr (NumTraits<T>::exact) {
        r.results["sp"] = exact(res.sp);
        r.results["sp_decimal"] = to_decimal_string(res.sp);
    } else {
        r.results["sp"] = decimal(res.sp);
        r.results["sp_decimal"] = decimal(res.sp);
    }
    r.diagnostics["strategy"] = strategy_name(res.strategy);
    r.diagnostics["candidates"] = candidates;
    r.diagnostics["per_level"] = std::move(levels);
}

void cmd_sp(const Common& c, const std::string& strategy, bool transform, Report& r)
{
    auto ds = load(c, r);
    if (ds.has_polytopes()) r.warnings.push_back("polytopes reduced to all-or-none vertex groups");
    ds = reduce_polytopes(ds);
    if (transform && !validate_general_position(ds, PositionLevel::sgpp, 1).ok) {
        ds = sgpp_transform(ds).transformed;
        r.warnings.push_back("SGPP transform applied; coordinates rounded to binary64");
    }
    auto t = point_table(ds);
    guard_enumeration(t, t.dimension, c);
    SPOptions opts;
    opts.strategy = strategy == "scan" ? Strategy::scan : Strategy::radial;
    opts.threads = c.threads;
    const auto mode = mode_or(c, "exact");
    r.results["mode"] = mode;
    if (mode == "exact") {
        sp_results(timed(c, r, "sp", [&] { return separable_probability<Rational>(t, opts); }), r);
    } else {
        sp_results(timed(c, r, "sp", [&] { return separable_probability<double>(t, opts); }), r);
    }
}

void cmd_esm(const Common& c, Report& r)
{
    auto t = point_table(load(c, r));
    guard_enumeration(t, t.dimension + 1, c);
    ESMOptions opts;
    opts.threads = c.threads;
    const auto mode = mode_or(c, "float");
    r.results["mode"] = mode;
    if (mode == "exact") {
        auto res = timed(c, r, "esm", [&] { return expected_separation_margin<Rational>(t, opts); });
        r.results["esm"] = decimal(res.emar);
        r.diagnostics["configs"] = res.config_count;
        r.diagnostics["xi_sum"] = exact(res.xi_sum);
    } else {
        auto res = timed(c, r, "esm", [&] { return expected_separation_margin<double>(t, opts); });
        r.results["esm"] = decimal(res.emar);
        r.diagnostics["configs"] = res.config_count;
        r.diagnostics["xi_sum"] = decimal(res.xi_sum);
    }
}

BallTable objects_table(const Common& c, Report& r)
{
    auto bt = ball_table(load(c, r));
    if (c.mode == "exact") r.warnings.push_back("ball engines run in float mode only");
    guard(bt.table.dimension > max_dimension, "dimension exceeds " + std::to_string(max_dimension), c);
    const auto budget = bichromatic_count(bt.table.count(Color::red), bt.table.count(Color::blue), bt.table.dimension + 1);
    guard(budget > max_candidates, "enumeration budget " + std::to_string(budget) + " exceeds 10^9 candidates", c);
    return bt;
}

void cmd_sp_objects(const Common& c, Report& r)
{
    auto bt = objects_table(c, r);
    BallOptions opts;
    opts.threads = c.threads;
    auto res = timed(c, r, "sp", [&] { return ball_separable_probability(bt, opts); });
    r.results["mode"] = "float";
    r.results["sp"] = decimal(res.sp);
    r.results["sp_decimal"] = decimal(res.sp);
    r.diagnostics["recursion"] = decimal(res.recursion);
    r.diagnostics["lambda_sum"] = decimal(res.lambda_sum);
    r.diagnostics["critical_sets"] = res.critical_sets;
}

void cmd_esm_objects(const Common& c, Report& r)
{
    auto bt = objects_table(c, r);
    BallOptions opts;
    opts.threads = c.threads;
    auto res = timed(c, r, "esm", [&] { return ball_expected_margin(bt, opts); });
    r.results["mode"] = "float";
    r.results["esm"] = decimal(res.emar);
    r.diagnostics["configs"] = res.config_count;
    r.diagnostics["xi_sum"] = decimal(res.xi_sum);
}

void cmd_sch(const Common& c, const std::string& kind, const std::vector<std::string>& queries, const std::string& eps,
             Report& r)
{
    auto A = load(c, r);
    if (queries.empty()) throw UsageError("--query is required");
    std::vector<PointD<Rational>> Q;
    for (const auto& q : queries) Q.push_back(parse_point(q));
    if (kind != "intersection" && Q.size() != 1) throw UsageError("--kind " + kind + " takes exactly one --query point");
    guard(A.dimension > max_dimension, "dimension exceeds " + std::to_string(max_dimension), c);
    SCHOptions opts;
    opts.threads = c.threads;
    r.results["kind"] = kind;
    json query = json::array();
    for (const auto& q : Q) query.push_back(point_json(q));
    r.results["query"] = std::move(query);
    if (kind == "membership" || kind == "intersection") {
        const Rational v = timed(c, r, "sch", [&] {
            return kind == "membership" ? sch_membership_probability(A, Q.front(), opts) : sch_intersection_probability(A, Q, opts);
        });
        r.results["value"] = exact(v);
        r.results["value_decimal"] = to_decimal_string(v);
        return;
    }
    double v = 0;
    if (kind == "eps-distant") {
        Rational e;
        try {
            e = parse_rational(eps);
        } catch (const ParseError& ex) {
            throw UsageError(std::string("bad --eps: ") + ex.what());
        }
        r.results["eps"] = exact(e);
        v = timed(c, r, "sch", [&] { return sch_epsilon_distant_probability(A, Q.front(), e, opts); });
    } else {
        v = timed(c, r, "sch", [&] { return sch_expected_distance(A, Q.front(), opts); });
    }
    r.results["value"] = decimal(v);
    r.results["value_decimal"] = decimal(v);
}

void cmd_oracle(const Common& c, const std::string& what, Report& r)
{
    auto ds = load(c, r);
    OracleOptions opts;
    opts.force = c.force;
    if (ds.has_balls()) {
        auto bt = ball_table(ds);
        if (what == "census") throw UsageError("census is available for point datasets only");
        if (what == "sp" || what == "all") r.results["sp"] = decimal(timed(c, r, "sp", [&] { return brute_ball_sp(bt, opts); }));
        if (what == "esm" || what == "all") r.results["esm"] = decimal(timed(c, r, "esm", [&] { return brute_ball_esm(bt, opts); }));
        return;
    }
    auto t = point_table(ds);
    if (what == "sp" || what == "all") {
        auto res = timed(c, r, "sp", [&] { return brute_sp_detail(t, opts); });
        r.results["sp"] = exact(res.separable);
        r.results["sp_decimal"] = to_decimal_string(res.separable);
        r.diagnostics["inseparable"] = exact(res.inseparable);
        r.diagnostics["instances"] = res.instances;
    }
    if (what == "esm" || what == "all") {
        auto res = timed(c, r, "esm", [&] { return brute_esm_detail(t, opts); });
        r.results["esm"] = decimal(res.esm);
        r.diagnostics["esm_instances"] = res.instances;
    }
    if (what == "census" || what == "all") {
        auto census = timed(c, r, "census", [&] { return enumerate_margins(t, opts); });
        json margins = json::array();
        for (double m : census.margins) margins.push_back(decimal(m));
        json squared = json::array();
        for (const auto& s : census.squared_margins) squared.push_back(exact(s));
        r.results["kappa"] = census.kappa;
        r.results["margins"] = std::move(margins);
        r.results["squared_margins"] = std::move(squared);
        r.diagnostics["tier"] = census.tier;
    }
}

struct GenParams {
    std::string kind = "random";
    std::size_t red = 3;
    std::size_t blue = 3;
    std::size_t d = 2;
    std::uint64_t seed = 1;
    std::string law = "uniform";
    std::string prob = "1";
    unsigned denominator = 16;
    long range = 1000;
    std::string level = "gp";
    std::size_t max_locations = 3;
    double eps = 0.01;
};

void cmd_gen(const Common& c, const GenParams& g, Report& r)
{
    const ProbLaw law = g.law == "const" ? ProbLaw::fixed(parse_rational(g.prob)) : ProbLaw::uniform(g.denominator);
    const RandomDatasetOptions opts{g.range, g.level == "sgpp" ? PositionLevel::sgpp : PositionLevel::gp};
    StochasticDataset ds;
    if (g.kind == "random") {
        ds = gen_random(g.red, g.blue, g.d, law, g.seed, opts);
    } else if (g.kind == "multipoint") {
        ds = gen_random_multipoint(g.red, g.blue, g.d, g.max_locations, g.seed, opts);
    } else if (g.kind == "balls") {
        BallDatasetOptions bopts;
        if (g.range != 1000) bopts.coordinate_range = g.range;
        ds = gen_random_balls(g.red, g.blue, g.d, law, g.seed, bopts);
    } else {
        ds = gen_cluster_stress(g.red, g.blue, g.d, g.eps, g.seed);
    }
    const auto text = serialize_dataset(ds);
    r.digest = digest_of(text);
    r.results["kind"] = g.kind;
    r.results["seed"] = g.seed;
    r.results["locations"] = dataset_locations(ds).size() + ds.objects.size();
    if (!c.output.empty()) {
        write_file(c.output, text);
        r.results["output"] = c.output;
    } else {
        r.results["dataset"] = json::parse(text);
    }
}

struct BenchParams {
    std::size_t d = 2;
    std::size_t n = 4;
    std::vector<std::size_t> sizes{16, 32, 64};
    std::uint64_t seed = 1;
};

// Candidate counts over a size ladder against the closed form, with scan/radial agreement.
void cmd_bench(const Common& c, const BenchParams& b, Report& r, int& code)
{
    json rows = json::array();
    std::vector<double> counts;
    bool all_match = true;
    for (std::size_t N : b.sizes) {
        auto ds = gen_random(b.n, N, b.d, ProbLaw::uniform(), b.seed + N, {1000, PositionLevel::sgpp});
        auto t = locations_of(ds);
        guard_enumeration(t, b.d, c);
        SPOptions scan{Strategy::scan, c.threads, true};
        SPOptions radial{Strategy::radial, c.threads, true};
        const auto t0 = std::chrono::steady_clock::now();
        auto rs = separable_probability<Rational>(t, scan);
        const auto t1 = std::chrono::steady_clock::now();
        auto rr = separable_probability<Rational>(t, radial);
        const auto t2 = std::chrono::steady_clock::now();
        const std::uint64_t found = rs.per_level.front().candidates;
        const std::uint64_t expected = bichromatic_count(b.n, N, b.d);
        const bool match = found == expected && rr.per_level.front().candidates == expected;
        const bool agree = rs.sp == rr.sp;
        all_match = all_match && match && agree;
        counts.push_back(static_cast<double>(found));
        json row{{"N", N}, {"candidates", found}, {"closed_form", expected}, {"match", match}, {"strategies_agree", agree},
                 {"sp", exact(rr.sp)}};
        if (c.timings) {
            row["scan_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
            row["radial_ms"] = std::chrono::duration<double, std::milli>(t2 - t1).count();
        }
        rows.push_back(std::move(row));
    }
    json exponents = json::array();
    for (std::size_t i = 1; i < counts.size(); ++i) {
        exponents.push_back(std::log(counts[i] / counts[i - 1]) /
                            std::log(static_cast<double>(b.sizes[i]) / static_cast<double>(b.sizes[i - 1])));
    }
    r.results["d"] = b.d;
    r.results["n"] = b.n;
    r.results["rows"] = std::move(rows);
    r.results["growth_exponents"] = std::move(exponents);
    r.results["counts_match_closed_form"] = all_match;
    if (!all_match) code = invalid;
    if (c.format == "text") {
        std::ostringstream csv;
        csv << "N,candidates,closed_form,match,strategies_agree\n";
        for (const auto& row : r.results["rows"]) {
            csv << row["N"] << "," << row["candidates"] << "," << row["closed_form"] << "," << row["match"] << ","
                << row["strategies_agree"] << "\n";
        }
        r.results = {{"table", csv.str()}};
    }
}

void add_common(CLI::App* sub, Common& c, bool input, bool mode)
{
    if (input) sub->add_option("--input,-i", c.input, "dataset JSON file")->required();
    if (mode) sub->add_option("--mode", c.mode, "numeric mode")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--force", c.force, "override guard rails");
    sub->add_flag("--timings", c.timings, "include wall times in the diagnostics");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Separable probability and expected separation margin of stochastic bichromatic datasets", "stochsep"};
    app.require_subcommand(1);
    Common c;

    auto* validate = app.add_subcommand("validate", "check the schema and the position preconditions");
    std::string level = "sgpp";
    add_common(validate, c, true, false);
    validate->add_option("--level", level, "gp or sgpp")->check(CLI::IsMember({"gp", "sgpp"}));

    auto* transform = app.add_subcommand("transform", "rotate a GP dataset into SGPP");
    add_common(transform, c, true, false);
    transform->add_option("--output,-o", c.output, "write the transformed dataset here");

    auto* sp = app.add_subcommand("sp", "separable probability of a point dataset");
    std::string strategy = "radial";
    bool auto_transform = false;
    add_common(sp, c, true, true);
    sp->add_option("--strategy", strategy, "scan or radial")->check(CLI::IsMember({"scan", "radial"}));
    sp->add_flag("--transform", auto_transform, "apply the SGPP transform when needed");

    auto* esm = app.add_subcommand("esm", "expected separation margin of a point dataset");
    add_common(esm, c, true, true);

    auto* sp_objects = app.add_subcommand("sp-objects", "separable probability of balls, polytopes and points");
    add_common(sp_objects, c, true, true);

    auto* esm_objects = app.add_subcommand("esm-objects", "expected separation margin of balls, polytopes and points");
    add_common(esm_objects, c, true, true);

    auto* sch = app.add_subcommand("sch", "stochastic convex hull queries");
    std::string kind = "membership";
    std::vector<std::string> queries;
    std::string eps = "0";
    add_common(sch, c, true, false);
    sch->add_option("--kind", kind, "query kind")
        ->check(CLI::IsMember({"membership", "intersection", "eps-distant", "expected-distance"}));
    sch->add_option("--query,-q", queries, "query point as comma-separated coordinates (repeat for polytope vertices)");
    sch->add_option("--eps", eps, "distance threshold");

    auto* oracle = app.add_subcommand("oracle", "brute-force instance enumeration");
    std::string what = "sp";
    add_common(oracle, c, true, false);
    oracle->add_option("--what", what, "sp, esm, census or all")->check(CLI::IsMember({"sp", "esm", "census", "all"}));

    auto* gen = app.add_subcommand("gen", "seeded dataset generators");
    GenParams g;
    add_common(gen, c, false, false);
    gen->add_option("--kind", g.kind, "random, multipoint, balls or cluster")
        ->check(CLI::IsMember({"random", "multipoint", "balls", "cluster"}));
    gen->add_option("--red", g.red, "red points (cluster: n)");
    gen->add_option("--blue", g.blue, "blue points (cluster: N)");
    gen->add_option("--dimension,-d", g.d, "dimension")->check(CLI::PositiveNumber);
    gen->add_option("--seed", g.seed, "64-bit seed");
    gen->add_option("--law", g.law, "uniform or const")->check(CLI::IsMember({"uniform", "const"}));
    gen->add_option("--prob", g.prob, "probability for --law const");
    gen->add_option("--denominator", g.denominator, "uniform law draws k/denominator")->check(CLI::PositiveNumber);
    gen->add_option("--range", g.range, "integer coordinate range")->check(CLI::PositiveNumber);
    gen->add_option("--level", g.level, "gp or sgpp")->check(CLI::IsMember({"gp", "sgpp"}));
    gen->add_option("--max-locations", g.max_locations, "multipoint locations per point")->check(CLI::PositiveNumber);
    gen->add_option("--eps", g.eps, "cluster radius")->check(CLI::PositiveNumber);
    gen->add_option("--output,-o", c.output, "write the dataset here");

    auto* bench = app.add_subcommand("bench", "candidate counts and strategy agreement over a size ladder");
    BenchParams b;
    add_common(bench, c, false, false);
    bench->add_option("--dimension,-d", b.d, "dimension")->check(CLI::PositiveNumber);
    bench->add_option("--n", b.n, "size of the smaller color");
    bench->add_option("--sizes", b.sizes, "sizes N of the larger color")->delimiter(',');
    bench->add_option("--seed", b.seed, "64-bit seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return usage;
    }

    Report r;
    r.command = app.get_subcommands().front()->get_name();
    int code = ok;
    try {
        if (validate->parsed()) cmd_validate(c, level, r, code);
        if (transform->parsed()) cmd_transform(c, r);
        if (sp->parsed()) cmd_sp(c, strategy, auto_transform, r);
        if (esm->parsed()) cmd_esm(c, r);
        if (sp_objects->parsed()) cmd_sp_objects(c, r);
        if (esm_objects->parsed()) cmd_esm_objects(c, r);
        if (sch->parsed()) cmd_sch(c, kind, queries, eps, r);
        if (oracle->parsed()) cmd_oracle(c, what, r);
        if (gen->parsed()) cmd_gen(c, g, r);
        if (bench->parsed()) cmd_bench(c, b, r, code);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const GuardRailError& e) {
        r.results = {{"error", "GuardRail"}, {"message", e.what()}};
        emit(r, c, out);
        return guard_rail;
    } catch (const PositionError& e) {
        r.results = {{"error", "PositionViolation"}, {"message", e.what()}, {"violations", violations_json(e.report())}};
        emit(r, c, out);
        return invalid;
    } catch (const DatasetError& e) {
        r.results = {{"error", error_code_name(e.code())}, {"message", e.what()}};
        emit(r, c, out);
        return invalid;
    } catch (const DimensionError& e) {
        r.results = {{"error", "Dimension"}, {"message", e.what()}};
        emit(r, c, out);
        return invalid;
    } catch (const DegenerateInput& e) {
        r.results = {{"error", "Degenerate"}, {"message", e.what()}};
        emit(r, c, out);
        return invalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
    emit(r, c, out);
    return code;
}

}  // namespace stochsep::cli
