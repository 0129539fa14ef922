#include "jmlab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "jmlab/cone_geometry.hpp"
#include "jmlab/jm_metric.hpp"
#include "jmlab/path_io.hpp"
#include "jmlab/rng.hpp"
#include "jmlab/sector_optics.hpp"
#include "jmlab/sector_oracle.hpp"
#include "jmlab/variational.hpp"

namespace jmlab {

namespace {

using nlohmann::json;

constexpr double kPi = 3.141592653589793238462643;

enum class VType { Num, Int, Bool, Str, NumArray };

const char* vtype_name(VType t) {
    switch (t) {
        case VType::Num: return "number";
        case VType::Int: return "integer";
        case VType::Bool: return "boolean";
        case VType::Str: return "string";
        case VType::NumArray: return "number array";
    }
    return "?";
}

using RangeFn = std::function<std::string(const json&)>;

struct KeySpec {
    std::string key;
    VType type;
    bool required;
    std::string doc;
    RangeFn range;  // returns "" when fine, else the violation text
};

std::string no_range(const json&) { return ""; }

RangeFn positive(const char* what = "must be positive") {
    return [what](const json& v) { return v.get<double>() > 0.0 ? "" : what; };
}

RangeFn nonnegative() {
    return [](const json& v) { return v.get<double>() >= 0.0 ? "" : "must be nonnegative"; };
}

RangeFn negative() {
    return [](const json& v) { return v.get<double>() < 0.0 ? "" : "must be negative"; };
}

RangeFn alpha_range() {
    return [](const json& v) {
        double a = v.get<double>();
        return (a > 0.0 && a < 2.0)
                   ? ""
                   : "must satisfy 0 < alpha < 2 (the collision pole stops being "
                     "integrable at alpha = 2)";
    };
}

RangeFn open_unit() {
    return [](const json& v) {
        double a = v.get<double>();
        return (a > 0.0 && a < 1.0) ? "" : "must lie strictly between 0 and 1";
    };
}

RangeFn int_at_least(long lo) {
    return [lo](const json& v) {
        return v.get<long>() >= lo ? std::string() : "must be >= " + std::to_string(lo);
    };
}

RangeFn one_of_strings(std::vector<std::string> allowed) {
    return [allowed](const json& v) {
        std::string s = v.get<std::string>();
        for (const auto& a : allowed)
            if (s == a) return std::string();
        std::string msg = "must be one of ";
        for (std::size_t i = 0; i < allowed.size(); ++i)
            msg += (i ? ", " : "") + allowed[i];
        return msg;
    };
}

RangeFn nonempty_string() {
    return [](const json& v) {
        return v.get<std::string>().empty() ? "must be a nonempty string" : "";
    };
}

RangeFn array_positive() {
    return [](const json& v) {
        for (const auto& e : v)
            if (!(e.get<double>() > 0.0)) return "every entry must be positive";
        return "";
    };
}

RangeFn array_nonempty() {
    return [](const json& v) { return v.empty() ? "must not be empty" : ""; };
}

const std::vector<std::string> kKinds = {
    "KeplerCone", "CounterexampleSweep", "SectorTrace", "OracleRun",
    "Minimize",   "BlowupDemo",          "BridgeCheck", "BrakeCheck",
};

std::vector<KeySpec> common_specs() {
    return {
        {"name", VType::Str, true, "scenario label; default output dir is out/<name>",
         nonempty_string()},
        {"kind", VType::Str, true, "one of the scenario kinds below",
         one_of_strings(kKinds)},
        {"seed", VType::Int, false, "rng seed, default 0", int_at_least(0)},
        {"output_dir", VType::Str, false, "artifact directory, default out/<name>",
         nonempty_string()},
        {"tolerance", VType::Num, false,
         "kind-specific numerical gate, defaults documented per kind", positive()},
    };
}

std::vector<KeySpec> band_specs(double default_M) {
    return {
        {"m", VType::Num, false, "outer step value, default 1", positive()},
        {"M", VType::Num, false, "band step value, default " + g17(default_M), positive()},
        {"delta", VType::Num, false, "band half-width parameter, default 0.5", open_unit()},
        {"alpha", VType::Num, false, "homogeneity degree, default 1", alpha_range()},
        {"convention", VType::Str, false,
         "index convention, PaperLiteral (default) or JmConsistent",
         one_of_strings({"PaperLiteral", "JmConsistent"})},
    };
}

std::vector<KeySpec> kind_specs(const std::string& kind) {
    if (kind == "KeplerCone")
        return {
            {"alpha", VType::Num, false, "homogeneity degree, default 1", alpha_range()},
            {"pair_count", VType::Int, false, "random distance pairs, default 200",
             int_at_least(1)},
            {"angle_points", VType::Int, false, "apex sweep points per axis, default 36",
             int_at_least(2)},
            {"cut_points", VType::Int, false, "corner-cut radii, default 20",
             int_at_least(2)},
        };
    if (kind == "CounterexampleSweep") {
        auto specs = band_specs(6.0);
        // M is swept, not fixed
        specs.erase(specs.begin() + 1);
        specs.push_back({"M_min", VType::Num, false, "sweep start, default 1", positive()});
        specs.push_back({"M_max", VType::Num, false, "sweep end, default 6", positive()});
        specs.push_back(
            {"M_steps", VType::Int, false, "sweep points, default 26", int_at_least(1)});
        specs.push_back({"oracle_resolution", VType::Int, false,
                         "grid resolution per point, default 300", int_at_least(100)});
        specs.push_back({"neighbor_order", VType::Int, false,
                         "grid neighbor order, default 6", int_at_least(1)});
        return specs;
    }
    if (kind == "SectorTrace") {
        auto specs = band_specs(2.0);
        specs.push_back({"mode", VType::Str, false,
                         "pole_to_pole (default) or single",
                         one_of_strings({"pole_to_pole", "single"})});
        specs.push_back({"launch_angle", VType::Num, false,
                         "initial direction, single mode only", no_range});
        specs.push_back(
            {"start_rho", VType::Num, false, "launch radius, default 1", positive()});
        specs.push_back(
            {"max_length", VType::Num, false, "trace length cap, default 12", positive()});
        return specs;
    }
    if (kind == "OracleRun") {
        auto specs = band_specs(4.0);
        specs.push_back({"resolution", VType::Int, false,
                         "radial grid resolution, default 1000", int_at_least(100)});
        specs.push_back({"neighbor_order", VType::Int, false,
                         "grid neighbor order, default 8", int_at_least(1)});
        specs.push_back(
            {"rho_max", VType::Num, false, "grid radius, default 1.5", positive()});
        specs.push_back({"ax", VType::Num, false,
                         "start x; endpoints default to the two poles at rho = 1",
                         no_range});
        specs.push_back({"ay", VType::Num, false, "start y", no_range});
        specs.push_back({"bx", VType::Num, false, "end x", no_range});
        specs.push_back({"by", VType::Num, false, "end y", no_range});
        return specs;
    }
    if (kind == "Minimize")
        return {
            {"potential", VType::Str, false, "central (default) or power_law",
             one_of_strings({"central", "power_law"})},
            {"alpha", VType::Num, false, "homogeneity degree, default 1", alpha_range()},
            {"dim", VType::Int, false, "ambient dimension, central only, default 2",
             int_at_least(1)},
            {"strength", VType::Num, false, "central prefactor, default 1", positive()},
            {"masses", VType::NumArray, false, "body masses, power_law only",
             array_positive()},
            {"ambient_dim", VType::Int, false,
             "space dimension per body, power_law only, default 2", int_at_least(1)},
            {"kappa", VType::Num, false, "coupling constant, power_law only, default 1",
             positive()},
            {"q0", VType::NumArray, true, "start configuration", array_nonempty()},
            {"q1", VType::NumArray, true, "end configuration", array_nonempty()},
            {"total_time", VType::Num, true, "transfer time T", positive()},
            {"samples", VType::Int, false, "path samples, default 65", int_at_least(3)},
            {"max_iterations", VType::Int, false, "descent cap, default 5000",
             int_at_least(1)},
            {"starts", VType::Int, false, "multi-start count, default 5", int_at_least(1)},
            {"perturbation", VType::Num, false,
             "start perturbation amplitude, default 0.05", nonnegative()},
        };
    if (kind == "BlowupDemo")
        return {
            {"alpha", VType::Num, false, "homogeneity degree, default 1", alpha_range()},
            {"h_values", VType::NumArray, false, "energies, default [-0.2, 0, 0.3]",
             array_nonempty()},
            {"lambdas", VType::NumArray, false,
             "dilation factors, default [0.5, 2, 4], all positive", array_positive()},
            {"path_count", VType::Int, false, "random test paths, default 20",
             int_at_least(1)},
            {"samples", VType::Int, false, "samples per path, default 48", int_at_least(3)},
        };
    if (kind == "BridgeCheck")
        return {
            {"alpha", VType::Num, false, "homogeneity degree, default 1", alpha_range()},
            {"path_count", VType::Int, false, "random test paths, default 50",
             int_at_least(1)},
            {"samples", VType::Int, false, "samples per path, default 40", int_at_least(3)},
        };
    if (kind == "BrakeCheck")
        return {
            {"alpha", VType::Num, false, "homogeneity degree, default 1", alpha_range()},
            {"h0", VType::Num, false, "energy, default -1, must be negative", negative()},
            {"duration", VType::Num, false, "integration time, default 0.4", positive()},
            {"steps", VType::Int, false, "integrator steps, default 10000",
             int_at_least(2)},
            {"sweep", VType::Bool, false, "also run a step-size sweep, default true",
             no_range},
        };
    return {};
}

bool type_matches(const json& v, VType t) {
    switch (t) {
        case VType::Num: return v.is_number();
        case VType::Int: return v.is_number_integer();
        case VType::Bool: return v.is_boolean();
        case VType::Str: return v.is_string();
        case VType::NumArray:
            if (!v.is_array()) return false;
            for (const auto& e : v)
                if (!e.is_number()) return false;
            return true;
    }
    return false;
}

bool has_valid(const json& cfg, const char* key, VType t) {
    return cfg.contains(key) && type_matches(cfg.at(key), t);
}

double num_or(const json& cfg, const char* key, double dflt) {
    return cfg.contains(key) ? cfg.at(key).get<double>() : dflt;
}

long int_or(const json& cfg, const char* key, long dflt) {
    return cfg.contains(key) ? cfg.at(key).get<long>() : dflt;
}

bool bool_or(const json& cfg, const char* key, bool dflt) {
    return cfg.contains(key) ? cfg.at(key).get<bool>() : dflt;
}

std::string str_or(const json& cfg, const char* key, const std::string& dflt) {
    return cfg.contains(key) ? cfg.at(key).get<std::string>() : dflt;
}

std::vector<double> array_or(const json& cfg, const char* key, std::vector<double> dflt) {
    if (!cfg.contains(key)) return dflt;
    return cfg.at(key).get<std::vector<double>>();
}

// Cross-key constraints that the flat per-key table cannot express.
void cross_checks(const std::string& kind, const json& cfg, std::vector<std::string>& out) {
    if (kind == "CounterexampleSweep") {
        if (has_valid(cfg, "M_min", VType::Num) && has_valid(cfg, "M_max", VType::Num) &&
            cfg.at("M_min").get<double>() > cfg.at("M_max").get<double>())
            out.push_back("key 'M_min': must not exceed M_max");
    }
    if (kind == "SectorTrace") {
        std::string mode = str_or(cfg, "mode", "pole_to_pole");
        if (mode == "single" && !cfg.contains("launch_angle"))
            out.push_back("missing required key 'launch_angle' (number, single mode)");
        if (mode == "pole_to_pole" && cfg.contains("launch_angle"))
            out.push_back("key 'launch_angle': only applies to mode 'single'");
    }
    if (kind == "OracleRun") {
        int given = 0;
        for (const char* k : {"ax", "ay", "bx", "by"})
            if (cfg.contains(k)) ++given;
        if (given != 0 && given != 4) {
            out.push_back("keys 'ax','ay','bx','by': give all four or none");
        } else if (given == 4 && has_valid(cfg, "ax", VType::Num) &&
                   has_valid(cfg, "ay", VType::Num) && has_valid(cfg, "bx", VType::Num) &&
                   has_valid(cfg, "by", VType::Num) &&
                   (!cfg.contains("alpha") || has_valid(cfg, "alpha", VType::Num))) {
            double alpha = num_or(cfg, "alpha", 1.0);
            if (!(alpha > 0.0 && alpha < 2.0)) return;  // already reported
            double c = cone_radius(alpha);
            double opening = c * kPi;
            auto inside = [&](double x, double y) {
                double psi = std::atan2(y, x);
                return std::hypot(x, y) > 0.0 && psi >= -1e-12 && psi <= opening + 1e-12;
            };
            if (!inside(num_or(cfg, "ax", 0), num_or(cfg, "ay", 0)))
                out.push_back("key 'ax': endpoint (ax, ay) lies outside the wedge");
            if (!inside(num_or(cfg, "bx", 0), num_or(cfg, "by", 0)))
                out.push_back("key 'bx': endpoint (bx, by) lies outside the wedge");
        }
    }
    if (kind == "Minimize") {
        std::string pot = str_or(cfg, "potential", "central");
        if (pot == "central") {
            for (const char* k : {"masses", "ambient_dim", "kappa"})
                if (cfg.contains(k))
                    out.push_back(std::string("key '") + k +
                                  "': only applies to potential 'power_law'");
        } else if (pot == "power_law") {
            for (const char* k : {"dim", "strength"})
                if (cfg.contains(k))
                    out.push_back(std::string("key '") + k +
                                  "': only applies to potential 'central'");
            if (!cfg.contains("masses"))
                out.push_back("missing required key 'masses' (number array, power_law)");
        }
        if (has_valid(cfg, "q0", VType::NumArray) && has_valid(cfg, "q1", VType::NumArray) &&
            cfg.at("q0").size() != cfg.at("q1").size())
            out.push_back("key 'q1': must have the same length as q0");
        if (has_valid(cfg, "q0", VType::NumArray)) {
            std::size_t want = 0;
            if (pot == "central") {
                want = static_cast<std::size_t>(int_or(cfg, "dim", 2));
            } else if (has_valid(cfg, "masses", VType::NumArray)) {
                want = static_cast<std::size_t>(int_or(cfg, "ambient_dim", 2)) *
                       cfg.at("masses").size();
            }
            if (want != 0 && cfg.at("q0").size() != want)
                out.push_back("key 'q0': length " + std::to_string(cfg.at("q0").size()) +
                              " does not match the configuration dimension " +
                              std::to_string(want));
        }
    }
}

std::vector<std::string> validate_object(const json& cfg) {
    std::vector<std::string> out;
    if (!cfg.is_object()) {
        out.push_back("config must be a JSON object");
        return out;
    }
    auto commons = common_specs();
    for (const auto& spec : commons) {
        if (!cfg.contains(spec.key)) {
            if (spec.required)
                out.push_back("missing required key '" + spec.key + "' (" +
                              vtype_name(spec.type) + ")");
            continue;
        }
        const json& v = cfg.at(spec.key);
        if (!type_matches(v, spec.type)) {
            out.push_back("key '" + spec.key + "': expected " + vtype_name(spec.type));
            continue;
        }
        std::string r = spec.range(v);
        if (!r.empty()) out.push_back("key '" + spec.key + "': " + r);
    }
    if (!has_valid(cfg, "kind", VType::Str)) return out;
    std::string kind = cfg.at("kind").get<std::string>();
    bool known = false;
    for (const auto& k : kKinds) known = known || k == kind;
    if (!known) return out;  // already reported by the common range check

    auto specs = kind_specs(kind);
    for (const auto& spec : specs) {
        if (!cfg.contains(spec.key)) {
            if (spec.required)
                out.push_back("missing required key '" + spec.key + "' (" +
                              vtype_name(spec.type) + ")");
            continue;
        }
        const json& v = cfg.at(spec.key);
        if (!type_matches(v, spec.type)) {
            out.push_back("key '" + spec.key + "': expected " + vtype_name(spec.type));
            continue;
        }
        std::string r = spec.range(v);
        if (!r.empty()) out.push_back("key '" + spec.key + "': " + r);
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        bool ok = false;
        for (const auto& spec : commons) ok = ok || spec.key == it.key();
        for (const auto& spec : specs) ok = ok || spec.key == it.key();
        if (!ok) out.push_back("unknown key '" + it.key() + "' for kind '" + kind + "'");
    }
    cross_checks(kind, cfg, out);
    return out;
}

// --------------------------------------------------------------------------
// Runner plumbing.

struct RunContext {
    std::filesystem::path outdir;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    int jobs = 1;
    std::ostream* log = nullptr;

    json summary;
    std::vector<std::string> report;
    std::vector<std::string> artifacts;

    void emit(const std::string& fname, const std::string& content) {
        write_file_atomic(outdir / fname, content);
        artifacts.push_back(fname);
    }
};

int finish(RunContext& ctx, const std::string& status) {
    ctx.summary["status"] = status;
    ctx.report.push_back("status: " + status);
    std::string rpt;
    for (const auto& line : ctx.report) rpt += line + "\n";
    ctx.emit("report.txt", rpt);
    ctx.summary["artifacts"] = ctx.artifacts;
    ctx.summary["artifacts"].push_back("summary.json");
    ctx.emit("summary.json", ctx.summary.dump(2) + "\n");
    *ctx.log << "wrote " << ctx.artifacts.size() << " artifacts to " << ctx.outdir.string()
             << "\n";
    if (status != "ok") {
        *ctx.log << "numerical failure: " << status << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

SectorMetric make_band_metric(double m, double M, double delta, double alpha,
                              Convention conv) {
    double c = cone_radius(alpha);
    double phi_star = 2.0 * std::asin(delta);
    double psi1 = c * (kPi - phi_star) / 2.0;
    double psi2 = c * phi_star;
    double n1 = conv == Convention::PaperLiteral ? m : std::sqrt(m);
    double n2 = conv == Convention::PaperLiteral ? M : std::sqrt(M);
    std::optional<StepShapeParams> step;
    if (m < M) step = StepShapeParams(m, M, delta);
    return SectorMetric({{0.0, psi1, n1},
                         {psi1, psi1 + psi2, n2},
                         {psi1 + psi2, 2.0 * psi1 + psi2, n1}},
                        c, conv, step);
}

// Smooth random arc in an annulus bounded away from the origin, so that
// every zero-energy quantity stays finite along it. Time grid on [0, 1].
SampledPath random_annulus_arc(Rng& rng, int samples) {
    double ang = 2.0 * kPi * rng.uniform();
    double rad = 0.55 + 0.25 * rng.uniform();
    double cx = rad * std::cos(ang), cy = rad * std::sin(ang);
    double amp[2][3], phase[2][3];
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 3; ++k) {
            amp[c][k] = 0.055 * (2.0 * rng.uniform() - 1.0);
            phase[c][k] = 2.0 * kPi * rng.uniform();
        }
    std::vector<Vec> pts(static_cast<std::size_t>(samples));
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double u = static_cast<double>(i) / (samples - 1);
        double x = cx, y = cy;
        for (int k = 0; k < 3; ++k) {
            x += amp[0][k] * std::cos(2.0 * kPi * (k + 1) * u + phase[0][k]);
            y += amp[1][k] * std::cos(2.0 * kPi * (k + 1) * u + phase[1][k]);
        }
        pts[static_cast<std::size_t>(i)] = {x, y};
        t[static_cast<std::size_t>(i)] = u;
    }
    return SampledPath(std::move(pts), std::move(t), ParamKind::Time);
}

std::string trace_end_name(TraceEnd t) {
    switch (t) {
        case TraceEnd::MaxLength: return "max_length";
        case TraceEnd::Boundary: return "boundary";
        case TraceEnd::Collision: return "collision";
    }
    return "?";
}

std::string points_csv(const std::vector<std::array<double, 2>>& pts) {
    std::string csv = "x,y\n";
    for (const auto& p : pts) csv += g17(p[0]) + "," + g17(p[1]) + "\n";
    return csv;
}

// --------------------------------------------------------------------------
// KeplerCone: exact cone-geometry tables.

int run_kepler_cone(const json& cfg, RunContext& ctx) {
    double alpha = num_or(cfg, "alpha", 1.0);
    long pair_count = int_or(cfg, "pair_count", 200);
    long angle_points = int_or(cfg, "angle_points", 36);
    long cut_points = int_or(cfg, "cut_points", 20);
    double c = cone_radius(alpha);
    ConeSpec cone(c);

    Rng rng(ctx.seed);
    std::string csv = "rho1,theta1,rho2,theta2,distance,radial_sum\n";
    double min_saving = std::numeric_limits<double>::infinity();
    for (long i = 0; i < pair_count; ++i) {
        CirclePoint a{0.1 + 1.9 * rng.uniform(), 2.0 * kPi * rng.uniform()};
        CirclePoint b{0.1 + 1.9 * rng.uniform(), 2.0 * kPi * rng.uniform()};
        double d = cone_distance(a, b, cone);
        double sum = a.rho + b.rho;
        min_saving = std::min(min_saving, sum - d);
        csv += g17(a.rho) + "," + g17(a.theta) + "," + g17(b.rho) + "," + g17(b.theta) +
               "," + g17(d) + "," + g17(sum) + "\n";
    }
    ctx.emit("cone_distance.csv", csv);

    csv = "theta_in,theta_out,classification,margin,min_flattened_angle\n";
    bool all_inext = true;
    double min_margin = std::numeric_limits<double>::infinity();
    for (long i = 0; i < angle_points; ++i) {
        for (long j = 0; j < angle_points; ++j) {
            double tin = 2.0 * kPi * i / angle_points;
            double tout = 2.0 * kPi * j / angle_points;
            ApexVerdict v = apex_extendibility(cone, tin, tout);
            bool inext = v.classification == ApexClass::Inextendible;
            all_inext = all_inext && inext;
            min_margin = std::min(min_margin, v.margin);
            csv += g17(tin) + "," + g17(tout) + "," +
                   (inext ? "Inextendible" : "Geodesic") + "," + g17(v.margin) + "," +
                   g17(v.min_flattened_angle) + "\n";
        }
    }
    ctx.emit("apex_verdicts.csv", csv);

    csv = "cut_radius,length,apex_length,saving\n";
    for (long j = 1; j <= cut_points; ++j) {
        double t = static_cast<double>(j) / cut_points;
        CornerCutResult cut = corner_cut(cone, 0.0, kPi, t);
        csv += g17(t) + "," + g17(cut.length) + "," + g17(cut.apex_length) + "," +
               g17(cut.saving) + "\n";
    }
    ctx.emit("corner_cut.csv", csv);
    ctx.emit("corner_cut_polyline.csv", points_csv(corner_cut(cone, 0.0, kPi, 0.5).points));

    ctx.summary["alpha"] = alpha;
    ctx.summary["cone_ratio"] = c;
    ctx.summary["pair_count"] = pair_count;
    ctx.summary["min_pair_saving"] = min_saving;
    ctx.summary["all_inextendible"] = all_inext;
    ctx.summary["min_margin"] = min_margin;
    ctx.report.push_back("cone ratio c = " + g17(c));
    ctx.report.push_back("distance pairs: " + std::to_string(pair_count) +
                         ", min saving over the through-apex route = " + g17(min_saving));
    ctx.report.push_back("apex sweep: " + std::to_string(angle_points * angle_points) +
                         " angle pairs, min corner-cut margin = " + g17(min_margin));

    if (!(min_saving > ctx.tolerance))
        return finish(ctx, "a distance pair failed the strict through-apex saving gate");
    if (!all_inext)
        return finish(ctx, "an apex verdict came back Geodesic on a c < 1 cone");
    return finish(ctx, "ok");
}

// --------------------------------------------------------------------------
// CounterexampleSweep: classification flip along a band-strength sweep.

int run_counterexample_sweep(const json& cfg, RunContext& ctx) {
    double m = num_or(cfg, "m", 1.0);
    double delta = num_or(cfg, "delta", 0.5);
    double alpha = num_or(cfg, "alpha", 1.0);
    Convention conv = convention_from_string(str_or(cfg, "convention", "PaperLiteral"));
    double M_min = num_or(cfg, "M_min", 1.0);
    double M_max = num_or(cfg, "M_max", 6.0);
    long steps = int_or(cfg, "M_steps", 26);
    OracleParams op;
    op.resolution = static_cast<int>(int_or(cfg, "oracle_resolution", 300));
    op.neighbor_order = static_cast<int>(int_or(cfg, "neighbor_order", 6));

    double c = cone_radius(alpha);

    struct Row {
        double M, psi1, psi2, Mc, x_star, S_min, oracle_len;
        bool condition, hits_vertex, interior;
    };
    std::vector<Row> rows(static_cast<std::size_t>(steps));

    auto point = [&](std::size_t i) {
        double M = steps == 1
                       ? M_min
                       : M_min + (M_max - M_min) * static_cast<double>(i) / (steps - 1);
        SectorMetric metric = make_band_metric(m, M, delta, alpha, conv);
        const auto& s = metric.sectors();
        double psi1 = s[0].end;
        double psi2 = s[1].end - s[1].begin;
        TestCurveMinimum tc = minimize_test_curve(metric);
        double crit = critical_index(psi1, psi2, s[0].index);
        Row r;
        r.M = M;
        r.psi1 = psi1;
        r.psi2 = psi2;
        r.Mc = conv == Convention::PaperLiteral ? crit : crit * crit;
        r.condition = conv == Convention::PaperLiteral
                          ? M * c * delta >= m
                          : std::sqrt(M) * c * delta >= std::sqrt(m);
        r.x_star = tc.x_star;
        r.S_min = tc.length;
        r.interior = tc.classification == TestCurveClass::InteriorMinimizer;
        std::array<double, 2> a{1.0, 0.0};
        std::array<double, 2> b{std::cos(metric.opening()), std::sin(metric.opening())};
        OracleResult orc = oracle_shortest_path(metric, a, b, op);
        r.oracle_len = orc.length;
        r.hits_vertex = orc.hits_vertex;
        rows[i] = r;
    };

    if (ctx.jobs <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) point(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                point(i);
        };
        std::vector<std::thread> pool;
        int nthreads = std::min<int>(ctx.jobs, static_cast<int>(rows.size()));
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::string csv =
        "m,M,delta,alpha,convention,psi1,psi2,Mc,condition_holds,x_star,S_min,"
        "oracle_len,oracle_hits_vertex\n";
    double worst_gap = 0.0;
    std::optional<double> flip_M;
    for (const Row& r : rows) {
        csv += g17(m) + "," + g17(r.M) + "," + g17(delta) + "," + g17(alpha) + "," +
               to_string(conv) + "," + g17(r.psi1) + "," + g17(r.psi2) + "," + g17(r.Mc) +
               "," + (r.condition ? "1" : "0") + "," + g17(r.x_star) + "," + g17(r.S_min) +
               "," + g17(r.oracle_len) + "," + (r.hits_vertex ? "1" : "0") + "\n";
        worst_gap = std::max(worst_gap, std::abs(r.oracle_len - r.S_min) / r.S_min);
        if (!flip_M && !r.interior) flip_M = r.M;
    }
    ctx.emit("sweep.csv", csv);

    ctx.summary["points"] = steps;
    ctx.summary["critical_M"] = rows.front().Mc;
    ctx.summary["max_oracle_gap"] = worst_gap;
    if (flip_M)
        ctx.summary["first_collision_M"] = *flip_M;
    else
        ctx.summary["first_collision_M"] = nullptr;
    ctx.report.push_back("sweep of " + std::to_string(steps) + " points, M in [" +
                         g17(M_min) + ", " + g17(M_max) + "]");
    ctx.report.push_back("critical band value M_c = " + g17(rows.front().Mc));
    ctx.report.push_back(flip_M ? "first vertex-classified point at M = " + g17(*flip_M)
                                : "no vertex-classified point in range");
    ctx.report.push_back("max oracle vs closed-form gap = " + g17(worst_gap));

    if (worst_gap > ctx.tolerance)
        return finish(ctx, "oracle length drifted from the closed form beyond tolerance");
    return finish(ctx, "ok");
}

// --------------------------------------------------------------------------
// SectorTrace: refraction tracing in the band metric.

int run_sector_trace(const json& cfg, RunContext& ctx) {
    double m = num_or(cfg, "m", 1.0);
    double M = num_or(cfg, "M", 2.0);
    double delta = num_or(cfg, "delta", 0.5);
    double alpha = num_or(cfg, "alpha", 1.0);
    Convention conv = convention_from_string(str_or(cfg, "convention", "PaperLiteral"));
    std::string mode = str_or(cfg, "mode", "pole_to_pole");
    double start_rho = num_or(cfg, "start_rho", 1.0);
    double max_length = num_or(cfg, "max_length", 12.0);

    SectorMetric metric = make_band_metric(m, M, delta, alpha, conv);
    TraceResult trace;
    std::optional<double> launch;
    if (mode == "single") {
        launch = num_or(cfg, "launch_angle", 0.0);
        trace = trace_sector_geodesic(metric, {start_rho, 0.0}, *launch, max_length);
    } else {
        PoleTraceResult pole = trace_between_poles(metric, start_rho);
        if (!pole.found) {
            ctx.summary["found"] = false;
            ctx.report.push_back("no symmetric pole-to-pole trace exists at this band");
            return finish(ctx, "pole-to-pole trace not found (vertex regime)");
        }
        trace = pole.trace;
        launch = pole.launch_angle;
        ctx.summary["found"] = true;
    }

    ctx.emit("trace.csv", points_csv(trace.points));
    std::string csv = "x,y,n_in,n_out,sin_in,sin_out,total_internal_reflection\n";
    double snell_residual = 0.0;
    for (const auto& cr : trace.crossings) {
        csv += g17(cr.point[0]) + "," + g17(cr.point[1]) + "," + g17(cr.n_in) + "," +
               g17(cr.n_out) + "," + g17(cr.sin_in) + "," + g17(cr.sin_out) + "," +
               (cr.total_internal_reflection ? "1" : "0") + "\n";
        if (!cr.total_internal_reflection)
            snell_residual = std::max(
                snell_residual, std::abs(cr.n_in * cr.sin_in - cr.n_out * cr.sin_out));
    }
    ctx.emit("crossings.csv", csv);

    ctx.summary["termination"] = trace_end_name(trace.termination);
    ctx.summary["euclidean_length"] = trace.euclidean_length;
    ctx.summary["weighted_length"] = trace.weighted_length;
    ctx.summary["crossings"] = trace.crossings.size();
    ctx.summary["snell_residual"] = snell_residual;
    if (launch) ctx.summary["launch_angle"] = *launch;
    ctx.report.push_back("termination: " + trace_end_name(trace.termination));
    ctx.report.push_back("weighted length = " + g17(trace.weighted_length));
    ctx.report.push_back("interface crossings: " + std::to_string(trace.crossings.size()) +
                         ", max Snell residual = " + g17(snell_residual));

    if (snell_residual > ctx.tolerance)
        return finish(ctx, "a crossing violated the refraction invariant");
    return finish(ctx, "ok");
}

// --------------------------------------------------------------------------
// OracleRun: one brute-force shortest path.

int run_oracle(const json& cfg, RunContext& ctx) {
    double m = num_or(cfg, "m", 1.0);
    double M = num_or(cfg, "M", 4.0);
    double delta = num_or(cfg, "delta", 0.5);
    double alpha = num_or(cfg, "alpha", 1.0);
    Convention conv = convention_from_string(str_or(cfg, "convention", "PaperLiteral"));
    OracleParams op;
    op.resolution = static_cast<int>(int_or(cfg, "resolution", 1000));
    op.neighbor_order = static_cast<int>(int_or(cfg, "neighbor_order", 8));
    op.rho_max = num_or(cfg, "rho_max", 1.5);

    SectorMetric metric = make_band_metric(m, M, delta, alpha, conv);
    bool default_poles = !cfg.contains("ax");
    std::array<double, 2> a{num_or(cfg, "ax", 1.0), num_or(cfg, "ay", 0.0)};
    std::array<double, 2> b{num_or(cfg, "bx", std::cos(metric.opening())),
                            num_or(cfg, "by", std::sin(metric.opening()))};

    OracleResult res = oracle_shortest_path(metric, a, b, op);
    ctx.emit("oracle_path.csv", points_csv(res.path));

    ctx.summary["length"] = res.length;
    ctx.summary["hits_vertex"] = res.hits_vertex;
    ctx.summary["expanded"] = res.expanded;
    ctx.report.push_back("grid length = " + g17(res.length));
    ctx.report.push_back(res.hits_vertex ? "path passes through the vertex"
                                         : "path avoids the vertex");
    ctx.report.push_back("settled nodes: " + std::to_string(res.expanded));

    if (default_poles) {
        TestCurveMinimum tc = minimize_test_curve(metric);
        double gap = std::abs(res.length - tc.length) / tc.length;
        ctx.summary["closed_form_length"] = tc.length;
        ctx.summary["relative_gap"] = gap;
        ctx.report.push_back("closed-form pole distance = " + g17(tc.length) +
                             ", relative gap = " + g17(gap));
        if (gap > ctx.tolerance)
            return finish(ctx, "grid length drifted from the closed form beyond tolerance");
    }
    return finish(ctx, "ok");
}

// --------------------------------------------------------------------------
// Minimize: fixed-endpoint action descent.

int run_minimize(const json& cfg, RunContext& ctx) {
    std::string which = str_or(cfg, "potential", "central");
    double alpha = num_or(cfg, "alpha", 1.0);
    HomogeneousPotential pot =
        which == "central"
            ? HomogeneousPotential::central(static_cast<int>(int_or(cfg, "dim", 2)), alpha,
                                            num_or(cfg, "strength", 1.0))
            : HomogeneousPotential::power_law(
                  MassSystem(static_cast<int>(int_or(cfg, "ambient_dim", 2)),
                             array_or(cfg, "masses", {}), num_or(cfg, "kappa", 1.0)),
                  alpha);

    Vec q0 = cfg.at("q0").get<std::vector<double>>();
    Vec q1 = cfg.at("q1").get<std::vector<double>>();
    double T = num_or(cfg, "total_time", 1.0);
    MinimizeOptions opts;
    opts.sample_count = static_cast<int>(int_or(cfg, "samples", 65));
    opts.max_iterations = static_cast<int>(int_or(cfg, "max_iterations", 5000));
    opts.tolerance = ctx.tolerance;
    opts.starts = static_cast<int>(int_or(cfg, "starts", 5));
    opts.perturbation = num_or(cfg, "perturbation", 0.05);
    opts.seed = ctx.seed;

    MinimizeResult res;
    std::string status = "ok";
    try {
        res = minimize_fixed_time(q0, q1, T, pot, opts);
    } catch (const MinimizeNotConverged& e) {
        res = e.best();
        status = e.what();
    }

    ctx.emit("path.csv", path_csv(res.path));
    double mean = 0.0, sqsum = 0.0;
    std::size_t cnt = 0;
    for (double h : res.report.energy_profile) {
        if (std::isnan(h)) continue;
        mean += h;
        ++cnt;
    }
    if (cnt) mean /= static_cast<double>(cnt);
    for (double h : res.report.energy_profile) {
        if (std::isnan(h)) continue;
        sqsum += (h - mean) * (h - mean);
    }
    double dev = cnt ? std::sqrt(sqsum / static_cast<double>(cnt)) : 0.0;

    ctx.summary["action"] = res.report.action;
    ctx.summary["kinetic"] = res.report.kinetic_integral;
    ctx.summary["potential"] = res.report.potential_integral;
    ctx.summary["energy_mean"] = mean;
    ctx.summary["energy_std"] = dev;
    ctx.summary["el_residual"] = res.el_residual_max;
    ctx.summary["gradient_norm"] = res.gradient_norm;
    ctx.summary["iterations"] = res.iterations;
    ctx.summary["start_index"] = res.start_index;
    ctx.summary["collision_touch"] = res.collision_touch;
    ctx.summary["converged"] = res.converged;
    ctx.report.push_back("action = " + g17(res.report.action) + " after " +
                         std::to_string(res.iterations) + " iterations (start " +
                         std::to_string(res.start_index) + ")");
    ctx.report.push_back("energy mean = " + g17(mean) + ", spread = " + g17(dev));
    ctx.report.push_back("Newton residual = " + g17(res.el_residual_max) +
                         ", gradient norm = " + g17(res.gradient_norm));
    if (res.collision_touch) ctx.report.push_back("a sample came within 1e-6 of collision");
    return finish(ctx, status);
}

// --------------------------------------------------------------------------
// BlowupDemo: dilation identity and energy scaling.

int run_blowup(const json& cfg, RunContext& ctx) {
    double alpha = num_or(cfg, "alpha", 1.0);
    std::vector<double> hs = array_or(cfg, "h_values", {-0.2, 0.0, 0.3});
    std::vector<double> lambdas = array_or(cfg, "lambdas", {0.5, 2.0, 4.0});
    long path_count = int_or(cfg, "path_count", 20);
    int samples = static_cast<int>(int_or(cfg, "samples", 48));

    HomogeneousPotential pot = HomogeneousPotential::central(2, alpha);
    Rng rng(ctx.seed);
    std::vector<SampledPath> paths;
    paths.reserve(static_cast<std::size_t>(path_count));
    for (long i = 0; i < path_count; ++i) paths.push_back(random_annulus_arc(rng, samples));

    std::string csv = "alpha,h,lambda,path_count,max_rel_deviation\n";
    double worst = 0.0;
    for (double h : hs) {
        for (double lam : lambdas) {
            double dev = metric_dilation_check(pot, h, lam, paths);
            worst = std::max(worst, dev);
            csv += g17(alpha) + "," + g17(h) + "," + g17(lam) + "," +
                   std::to_string(path_count) + "," + g17(dev) + "\n";
        }
    }
    ctx.emit("dilation.csv", csv);

    // Unit circular orbit of the Kepler-like central potential: H = alpha/2 - 1
    // on the unit circle, and blow-up multiplies energies by lambda^(-alpha).
    int n = 64;
    std::vector<Vec> pts(static_cast<std::size_t>(n));
    std::vector<double> t(static_cast<std::size_t>(n));
    double omega = std::sqrt(alpha);  // circular orbit rate at radius 1
    for (int i = 0; i < n; ++i) {
        double ti = 0.5 * kPi * i / (n - 1);
        pts[static_cast<std::size_t>(i)] = {std::cos(omega * ti), std::sin(omega * ti)};
        t[static_cast<std::size_t>(i)] = ti;
    }
    SampledPath orbit(std::move(pts), std::move(t), ParamKind::Time);
    std::vector<double> h_orig = energy_profile(orbit, pot);

    csv = "lambda,h_original,h_rescaled,expected_scale,max_scaling_error\n";
    double worst_scale = 0.0;
    for (double lam : lambdas) {
        SampledPath big = blowup_rescale(orbit, lam, alpha);
        std::vector<double> h_new = energy_profile(big, pot);
        double scale = std::pow(lam, -alpha);
        double err = 0.0;
        for (std::size_t i = 0; i < h_new.size(); ++i)
            err = std::max(err, std::abs(h_new[i] - scale * h_orig[i]));
        worst_scale = std::max(worst_scale, err);
        csv += g17(lam) + "," + g17(h_orig.front()) + "," + g17(h_new.front()) + "," +
               g17(scale) + "," + g17(err) + "\n";
    }
    ctx.emit("blowup_energy.csv", csv);

    ctx.summary["max_dilation_deviation"] = worst;
    ctx.summary["max_energy_scaling_error"] = worst_scale;
    ctx.report.push_back("dilation identity max relative deviation = " + g17(worst));
    ctx.report.push_back("energy scaling max error = " + g17(worst_scale));
    if (worst > ctx.tolerance || worst_scale > ctx.tolerance)
        return finish(ctx, "a rescaling identity drifted beyond tolerance");
    return finish(ctx, "ok");
}

// --------------------------------------------------------------------------
// BridgeCheck: length <= action, equality at zero energy.

int run_bridge(const json& cfg, RunContext& ctx) {
    double alpha = num_or(cfg, "alpha", 1.0);
    long path_count = int_or(cfg, "path_count", 50);
    int samples = static_cast<int>(int_or(cfg, "samples", 40));

    HomogeneousPotential pot = HomogeneousPotential::central(2, alpha);
    JmMetric zero{0.0, pot};
    Rng rng(ctx.seed);

    std::string csv = "index,length,action,slack,reparam_slack\n";
    double min_slack = std::numeric_limits<double>::infinity();
    double max_reparam = 0.0;
    for (long i = 0; i < path_count; ++i) {
        SampledPath path = random_annulus_arc(rng, samples);
        BridgeReport br = action_length_bridge(path, pot);
        min_slack = std::min(min_slack, br.slack);

        // Rebuild the same points on their zero-energy arclength grid; the
        // reparameterized action then matches the length to quadrature noise.
        std::vector<double> s(path.size(), 0.0);
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            SampledPath seg({path.points[k], path.points[k + 1]}, {0.0, 1.0},
                            ParamKind::Abstract);
            s[k + 1] = s[k] + jm_length(zero, seg);
        }
        SampledPath by_arc(path.points, s, ParamKind::Arclength);
        ReparamResult rp = zero_energy_reparameterize(by_arc, pot);
        BridgeReport br2 = action_length_bridge(rp.path, pot);
        max_reparam = std::max(max_reparam, std::abs(br2.slack));

        csv += std::to_string(i) + "," + g17(br.length) + "," + g17(br.action) + "," +
               g17(br.slack) + "," + g17(br2.slack) + "\n";
    }
    ctx.emit("bridge.csv", csv);

    ctx.summary["path_count"] = path_count;
    ctx.summary["min_slack"] = min_slack;
    ctx.summary["max_reparam_slack"] = max_reparam;
    ctx.report.push_back("paths: " + std::to_string(path_count));
    ctx.report.push_back("min slack = " + g17(min_slack) +
                         " (must stay above -tolerance)");
    ctx.report.push_back("max |slack| after zero-energy reparameterization = " +
                         g17(max_reparam));
    if (min_slack < -ctx.tolerance)
        return finish(ctx, "a path had action below its metric length");
    return finish(ctx, "ok");
}

// --------------------------------------------------------------------------
// BrakeCheck: retracing of rest-started solutions.

int run_brake(const json& cfg, RunContext& ctx) {
    double alpha = num_or(cfg, "alpha", 1.0);
    double h0 = num_or(cfg, "h0", -1.0);
    double duration = num_or(cfg, "duration", 0.4);
    long steps = int_or(cfg, "steps", 10000);
    bool sweep = bool_or(cfg, "sweep", true);

    HomogeneousPotential pot = HomogeneousPotential::central(1, alpha);
    double x0 = std::pow(-h0, -1.0 / alpha);  // rest point: h0 + x^-alpha = 0

    std::vector<long> step_list;
    if (sweep) {
        step_list.push_back(std::max<long>(10, steps / 100));
        step_list.push_back(std::max<long>(10, steps / 10));
    }
    step_list.push_back(steps);

    std::string csv = "steps,dt,retrace_deviation,energy_drift\n";
    BrakeReport main_report{};
    for (long n : step_list) {
        BrakeReport rep =
            brake_retrace_check(pot, h0, {x0}, duration, static_cast<int>(n));
        if (n == steps) main_report = rep;
        csv += std::to_string(n) + "," + g17(duration / static_cast<double>(n)) + "," +
               g17(rep.max_retrace_deviation) + "," + g17(rep.max_energy_drift) + "\n";
    }
    ctx.emit("brake.csv", csv);

    ctx.summary["rest_point"] = x0;
    ctx.summary["retrace_deviation"] = main_report.max_retrace_deviation;
    ctx.summary["energy_drift"] = main_report.max_energy_drift;
    ctx.report.push_back("rest point x0 = " + g17(x0) + " at energy " + g17(h0));
    ctx.report.push_back("retrace deviation = " + g17(main_report.max_retrace_deviation) +
                         " over duration " + g17(duration) + " at " +
                         std::to_string(steps) + " steps");
    ctx.report.push_back("energy drift = " + g17(main_report.max_energy_drift));
    if (main_report.max_retrace_deviation > ctx.tolerance)
        return finish(ctx, "retrace deviation exceeded tolerance");
    return finish(ctx, "ok");
}

double default_tolerance(const std::string& kind) {
    if (kind == "KeplerCone") return 1e-9;
    if (kind == "CounterexampleSweep") return 0.05;
    if (kind == "SectorTrace") return 1e-12;
    if (kind == "OracleRun") return 0.05;
    if (kind == "Minimize") return 1e-6;
    if (kind == "BlowupDemo") return 1e-6;
    if (kind == "BridgeCheck") return 1e-9;
    if (kind == "BrakeCheck") return 1e-8;
    return 1e-9;
}

} // namespace

std::vector<std::string> validate_config_text(const std::string& json_text) {
    json cfg = json::parse(json_text, nullptr, false);
    if (cfg.is_discarded()) return {"config is not valid JSON"};
    return validate_object(cfg);
}

int run_scenario_text(const std::string& json_text, const RunOverrides& overrides,
                      std::ostream& log) {
    std::vector<std::string> violations = validate_config_text(json_text);
    if (overrides.tolerance && !(*overrides.tolerance > 0.0))
        violations.push_back("tolerance override must be positive");
    if (!violations.empty()) {
        for (const auto& v : violations) log << "validation: " << v << "\n";
        return kExitValidation;
    }
    json cfg = json::parse(json_text);
    std::string name = cfg.at("name").get<std::string>();
    std::string kind = cfg.at("kind").get<std::string>();

    RunContext ctx;
    ctx.seed = overrides.seed ? *overrides.seed
                              : static_cast<std::uint64_t>(int_or(cfg, "seed", 0));
    const char* env_dir = std::getenv("OUTPUT_DIR");
    if (overrides.output_dir)
        ctx.outdir = *overrides.output_dir;
    else if (env_dir && *env_dir)
        ctx.outdir = env_dir;
    else
        ctx.outdir = str_or(cfg, "output_dir", "out/" + name);
    ctx.tolerance = overrides.tolerance
                        ? *overrides.tolerance
                        : num_or(cfg, "tolerance", default_tolerance(kind));
    ctx.jobs = std::max(1, overrides.jobs);
    ctx.log = &log;
    ctx.summary["name"] = name;
    ctx.summary["kind"] = kind;
    ctx.summary["seed"] = ctx.seed;
    ctx.summary["tolerance"] = ctx.tolerance;
    ctx.report.push_back("scenario: " + name);
    ctx.report.push_back("kind: " + kind);
    ctx.report.push_back("seed: " + std::to_string(ctx.seed));
    ctx.report.push_back("tolerance: " + g17(ctx.tolerance));
    log << "running " << kind << " scenario '" << name << "' (seed " << ctx.seed << ")\n";

    try {
        if (kind == "KeplerCone") return run_kepler_cone(cfg, ctx);
        if (kind == "CounterexampleSweep") return run_counterexample_sweep(cfg, ctx);
        if (kind == "SectorTrace") return run_sector_trace(cfg, ctx);
        if (kind == "OracleRun") return run_oracle(cfg, ctx);
        if (kind == "Minimize") return run_minimize(cfg, ctx);
        if (kind == "BlowupDemo") return run_blowup(cfg, ctx);
        if (kind == "BridgeCheck") return run_bridge(cfg, ctx);
        if (kind == "BrakeCheck") return run_brake(cfg, ctx);
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    log << "validation: key 'kind': unhandled scenario kind\n";
    return kExitValidation;
}

std::string list_scenarios() {
    std::ostringstream os;
    os << "Config files are flat JSON objects. Common keys:\n";
    for (const auto& spec : common_specs())
        os << "  " << spec.key << (spec.required ? "  (required " : "  (")
           << vtype_name(spec.type) << ") " << spec.doc << "\n";
    os << "\nOutput directory precedence: --output-dir flag, then the OUTPUT_DIR\n"
          "environment variable, then the config key, then out/<name>.\n"
          "Exit codes: 0 ok, 2 validation error, 3 numerical failure.\n";
    for (const auto& kind : kKinds) {
        os << "\n" << kind << "\n";
        for (const auto& spec : kind_specs(kind))
            os << "  " << spec.key << (spec.required ? "  (required " : "  (")
               << vtype_name(spec.type) << ") " << spec.doc << "\n";
    }
    return os.str();
}

} // namespace jmlab
