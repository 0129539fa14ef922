#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jmlab/scenario.hpp"

using namespace jmlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("jmlab_scn_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_cfg(const std::string& cfg, const fs::path& outdir,
            std::optional<double> tol = std::nullopt, int jobs = 1) {
    RunOverrides ov;
    ov.output_dir = outdir.string();
    ov.tolerance = tol;
    ov.jobs = jobs;
    std::ostringstream log;
    return run_scenario_text(cfg, ov, log);
}

bool violation_mentions(const std::vector<std::string>& vs, const std::string& needle) {
    for (const auto& v : vs)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

// Numeric-aware file comparison: CSV cells that parse as numbers match to a
// relative tolerance, everything else must match exactly.
void check_files_close(const fs::path& expected, const fs::path& actual) {
    std::istringstream ea(slurp(expected)), aa(slurp(actual));
    std::string el, al;
    int lineno = 0;
    while (true) {
        bool eok = static_cast<bool>(std::getline(ea, el));
        bool aok = static_cast<bool>(std::getline(aa, al));
        ++lineno;
        if (eok != aok) {
            FAIL_CHECK("file length mismatch at ", expected.filename().string(), ":",
                       lineno);
            return;
        }
        if (!eok) return;
        std::istringstream es(el), as(al);
        std::string ec, ac;
        while (true) {
            bool ecok = static_cast<bool>(std::getline(es, ec, ','));
            bool acok = static_cast<bool>(std::getline(as, ac, ','));
            if (ecok != acok) {
                FAIL_CHECK("column count mismatch at ", expected.filename().string(), ":",
                           lineno);
                return;
            }
            if (!ecok) break;
            char* eend = nullptr;
            char* aend = nullptr;
            double ev = std::strtod(ec.c_str(), &eend);
            double av = std::strtod(ac.c_str(), &aend);
            bool enum_ = eend != ec.c_str() && *eend == '\0' && !ec.empty();
            bool anum = aend != ac.c_str() && *aend == '\0' && !ac.empty();
            if (enum_ && anum) {
                double scale = std::max({1.0, std::abs(ev), std::abs(av)});
                CHECK_MESSAGE(std::abs(ev - av) <= 1e-9 * scale,
                              expected.filename().string(), ":", lineno, " expected ", ec,
                              " got ", ac);
            } else {
                CHECK_MESSAGE(ec == ac, expected.filename().string(), ":", lineno,
                              " expected '", ec, "' got '", ac, "'");
            }
        }
    }
}

void check_json_close(const nlohmann::json& e, const nlohmann::json& a,
                      const std::string& where) {
    if (e.is_number() && a.is_number()) {
        double ev = e.get<double>(), av = a.get<double>();
        double scale = std::max({1.0, std::abs(ev), std::abs(av)});
        CHECK_MESSAGE(std::abs(ev - av) <= 1e-9 * scale, where, ": expected ", ev, " got ",
                      av);
        return;
    }
    if (e.is_object() && a.is_object()) {
        for (auto it = e.begin(); it != e.end(); ++it) {
            bool has = a.contains(it.key());
            CHECK_MESSAGE(has, where, ": missing key ", it.key());
            if (has) check_json_close(it.value(), a.at(it.key()), where + "." + it.key());
        }
        CHECK_MESSAGE(e.size() == a.size(), where, ": extra keys present");
        return;
    }
    if (e.is_array() && a.is_array()) {
        REQUIRE_MESSAGE(e.size() == a.size(), where, ": array size mismatch");
        for (std::size_t i = 0; i < e.size(); ++i)
            check_json_close(e[i], a[i], where + "[" + std::to_string(i) + "]");
        return;
    }
    CHECK_MESSAGE(e == a, where, ": expected ", e.dump(), " got ", a.dump());
}

} // namespace

TEST_CASE("empty config reports every missing key") {
    auto vs = validate_config_text("{}");
    CHECK(violation_mentions(vs, "missing required key 'name'"));
    CHECK(violation_mentions(vs, "missing required key 'kind'"));
    CHECK(vs.size() == 2);
}

TEST_CASE("invalid json is a single clear violation") {
    auto vs = validate_config_text("{not json");
    REQUIRE(vs.size() == 1);
    CHECK(violation_mentions(vs, "not valid JSON"));
    auto arr = validate_config_text("[1, 2]");
    CHECK(violation_mentions(arr, "must be a JSON object"));
}

TEST_CASE("alpha outside its range names the key and the bound") {
    auto vs = validate_config_text(
        R"({"name":"x","kind":"BrakeCheck","alpha":2.5})");
    REQUIRE(vs.size() == 1);
    CHECK(violation_mentions(vs, "key 'alpha'"));
    CHECK(violation_mentions(vs, "0 < alpha < 2"));
}

TEST_CASE("negative masses are rejected") {
    auto vs = validate_config_text(
        R"({"name":"x","kind":"Minimize","potential":"power_law","masses":[1.0,-2.0],
            "q0":[0,0,1,0],"q1":[0,1,1,1],"total_time":1.0})");
    CHECK(violation_mentions(vs, "key 'masses'"));
    CHECK(violation_mentions(vs, "positive"));
}

TEST_CASE("unknown keys are rejected with the kind named") {
    auto vs = validate_config_text(
        R"({"name":"x","kind":"BrakeCheck","stepss":100})");
    REQUIRE(vs.size() == 1);
    CHECK(violation_mentions(vs, "unknown key 'stepss'"));
    CHECK(violation_mentions(vs, "BrakeCheck"));
}

TEST_CASE("all violations are reported at once") {
    auto vs = validate_config_text(
        R"({"kind":"BrakeCheck","alpha":2.5,"h0":1.0,"bogus":1})");
    CHECK(vs.size() == 4);  // missing name, alpha range, h0 sign, unknown key
    CHECK(violation_mentions(vs, "missing required key 'name'"));
    CHECK(violation_mentions(vs, "key 'alpha'"));
    CHECK(violation_mentions(vs, "key 'h0'"));
    CHECK(violation_mentions(vs, "unknown key 'bogus'"));
}

TEST_CASE("type mismatches name the expected type") {
    auto vs = validate_config_text(
        R"({"name":"x","kind":"BrakeCheck","steps":"many"})");
    REQUIRE(vs.size() == 1);
    CHECK(violation_mentions(vs, "key 'steps'"));
    CHECK(violation_mentions(vs, "integer"));
}

TEST_CASE("conditional keys: single mode requires a launch angle") {
    auto base = std::string(R"({"name":"x","kind":"SectorTrace","mode":"single"})");
    CHECK(violation_mentions(validate_config_text(base), "launch_angle"));
    auto ptp = validate_config_text(
        R"({"name":"x","kind":"SectorTrace","launch_angle":0.4})");
    CHECK(violation_mentions(ptp, "only applies to mode 'single'"));
}

TEST_CASE("oracle endpoints come in fours and must lie in the wedge") {
    auto vs = validate_config_text(
        R"({"name":"x","kind":"OracleRun","ax":1.0})");
    CHECK(violation_mentions(vs, "all four or none"));
    auto outside = validate_config_text(
        R"({"name":"x","kind":"OracleRun","ax":1.0,"ay":-0.5,"bx":0.1,"by":0.4})");
    CHECK(violation_mentions(outside, "outside the wedge"));
}

TEST_CASE("kind catalogue lists every kind and the common keys") {
    std::string cat = list_scenarios();
    for (const char* kind :
         {"KeplerCone", "CounterexampleSweep", "SectorTrace", "OracleRun", "Minimize",
          "BlowupDemo", "BridgeCheck", "BrakeCheck"}) {
        CAPTURE(kind);
        CHECK(cat.find(kind) != std::string::npos);
    }
    CHECK(cat.find("OUTPUT_DIR") != std::string::npos);
    CHECK(cat.find("tolerance") != std::string::npos);
}

TEST_CASE("every scenario kind runs its small config clean") {
    struct Case {
        const char* name;
        const char* cfg;
        const char* main_artifact;
    };
    const Case cases[] = {
        {"kepler",
         R"({"name":"t_kc","kind":"KeplerCone","pair_count":25,"angle_points":8,
             "cut_points":5,"seed":1})",
         "cone_distance.csv"},
        {"sweep",
         R"({"name":"t_sw","kind":"CounterexampleSweep","M_steps":3,"M_min":2.0,
             "M_max":4.0,"oracle_resolution":100,"neighbor_order":3})",
         "sweep.csv"},
        {"trace",
         R"({"name":"t_tr","kind":"SectorTrace","M":2.0})",
         "trace.csv"},
        {"oracle",
         R"({"name":"t_or","kind":"OracleRun","resolution":120,"neighbor_order":4})",
         "oracle_path.csv"},
        {"minimize",
         R"({"name":"t_mi","kind":"Minimize","q0":[1.0,0.0],"q1":[0.0,1.0],
             "total_time":1.0,"samples":25,"starts":2,"max_iterations":20000,
             "tolerance":1e-7})",
         "path.csv"},
        {"blowup",
         R"({"name":"t_bl","kind":"BlowupDemo","path_count":4,"samples":24})",
         "dilation.csv"},
        {"bridge",
         R"({"name":"t_br","kind":"BridgeCheck","path_count":5,"samples":40})",
         "bridge.csv"},
        {"brake",
         R"({"name":"t_bk","kind":"BrakeCheck","steps":2000})",
         "brake.csv"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.name);
        fs::path dir = fresh_dir(c.name);
        CHECK(run_cfg(c.cfg, dir) == kExitOk);
        CHECK(fs::exists(dir / c.main_artifact));
        CHECK(fs::exists(dir / "report.txt"));
        auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
        CHECK(summary.at("status") == "ok");
        CHECK(summary.contains("kind"));
        fs::remove_all(dir);
    }
}

TEST_CASE("outputs are byte-identical across reruns and job counts") {
    const std::string cfg =
        R"({"name":"t_det","kind":"CounterexampleSweep","M_steps":4,"M_min":1.5,
            "M_max":4.5,"oracle_resolution":100,"neighbor_order":3,"seed":9})";
    fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2"), d3 = fresh_dir("det3");
    CHECK(run_cfg(cfg, d1) == kExitOk);
    CHECK(run_cfg(cfg, d2) == kExitOk);
    CHECK(run_cfg(cfg, d3, std::nullopt, 3) == kExitOk);
    CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
    CHECK(slurp(d1 / "sweep.csv") == slurp(d3 / "sweep.csv"));
    CHECK(slurp(d1 / "summary.json") == slurp(d3 / "summary.json"));
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("the seed changes random draws deterministically") {
    const char* base =
        R"({"name":"t_seed","kind":"KeplerCone","pair_count":10,"angle_points":4,
            "cut_points":3,"seed":%d})";
    char cfg1[256], cfg2[256];
    std::snprintf(cfg1, sizeof cfg1, base, 1);
    std::snprintf(cfg2, sizeof cfg2, base, 2);
    fs::path d1 = fresh_dir("seed1"), d2 = fresh_dir("seed2");
    CHECK(run_cfg(cfg1, d1) == kExitOk);
    CHECK(run_cfg(cfg2, d2) == kExitOk);
    CHECK(slurp(d1 / "cone_distance.csv") != slurp(d2 / "cone_distance.csv"));
    // the seeded sweep is recorded in the summary
    auto s1 = nlohmann::json::parse(slurp(d1 / "summary.json"));
    CHECK(s1.at("seed") == 1);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("output directory precedence") {
    fs::path cfg_dir = fresh_dir("prec_cfg");
    fs::path env_dir = fresh_dir("prec_env");
    fs::path flag_dir = fresh_dir("prec_flag");
    std::string cfg = std::string(R"({"name":"t_prec","kind":"BrakeCheck","steps":200,)") +
                      "\"output_dir\":\"" + cfg_dir.string() + "\"}";

    // config key alone
    std::ostringstream log;
    CHECK(run_scenario_text(cfg, {}, log) == kExitOk);
    CHECK(fs::exists(cfg_dir / "brake.csv"));

    // environment beats the config key
    setenv("OUTPUT_DIR", env_dir.string().c_str(), 1);
    CHECK(run_scenario_text(cfg, {}, log) == kExitOk);
    CHECK(fs::exists(env_dir / "brake.csv"));

    // explicit override beats both
    RunOverrides ov;
    ov.output_dir = flag_dir.string();
    CHECK(run_scenario_text(cfg, ov, log) == kExitOk);
    CHECK(fs::exists(flag_dir / "brake.csv"));
    unsetenv("OUTPUT_DIR");

    fs::remove_all(cfg_dir);
    fs::remove_all(env_dir);
    fs::remove_all(flag_dir);
}

TEST_CASE("a starved minimization exits with the numerical code but keeps artifacts") {
    const std::string cfg =
        R"({"name":"t_starve","kind":"Minimize","q0":[1.0,0.0],"q1":[0.0,1.0],
            "total_time":1.0,"samples":17,"starts":1,"max_iterations":1,
            "tolerance":1e-15})";
    fs::path dir = fresh_dir("starve");
    CHECK(run_cfg(cfg, dir) == kExitNumerical);
    CHECK(fs::exists(dir / "path.csv"));
    auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("status") != "ok");
    CHECK(summary.at("converged") == false);
    fs::remove_all(dir);
}

TEST_CASE("an invalid config never runs") {
    std::ostringstream log;
    CHECK(run_scenario_text("{}", {}, log) == kExitValidation);
    CHECK(log.str().find("validation:") != std::string::npos);
}

TEST_CASE("golden fixtures reproduce") {
    fs::path golden(JMLAB_GOLDEN_DIR);
    REQUIRE(fs::exists(golden));
    int fixtures = 0;
    for (const auto& entry : fs::directory_iterator(golden)) {
        if (entry.path().extension() != ".json") continue;
        ++fixtures;
        std::string name = entry.path().stem().string();
        CAPTURE(name);
        fs::path expect_dir = golden / name;
        REQUIRE_MESSAGE(fs::exists(expect_dir), "no expected outputs for ", name);
        fs::path out = fresh_dir("golden_" + name);
        int rc = run_cfg(slurp(entry.path()), out);
        CHECK(rc == kExitOk);
        for (const auto& want : fs::directory_iterator(expect_dir)) {
            fs::path got = out / want.path().filename();
            REQUIRE_MESSAGE(fs::exists(got), "missing artifact ",
                            want.path().filename().string());
            if (want.path().extension() == ".json")
                check_json_close(nlohmann::json::parse(slurp(want.path())),
                                 nlohmann::json::parse(slurp(got)),
                                 name + "/" + want.path().filename().string());
            else
                check_files_close(want.path(), got);
        }
        fs::remove_all(out);
    }
    CHECK(fixtures == 8);  // one per scenario kind
}
