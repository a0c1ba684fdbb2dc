#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "epidde/report.hpp"
#include "json.hpp"

using namespace epidde;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& what) {
    std::size_t n = 0;
    for (auto pos = text.find(what); pos != std::string::npos;
         pos = text.find(what, pos + what.size()))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("empty config text resolves to the defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.params.mu == 0.062);
    CHECK(cfg.params.epsilon == 0.1961);
    CHECK(cfg.params.gamma == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(cfg.params.p == 0.4);
    CHECK(cfg.params.tau == 4.0);
    CHECK(cfg.params.kappa == 14.0);
    CHECK(cfg.params.rho == doctest::Approx(1.0 / 14.0).epsilon(1e-15));
    CHECK(cfg.params.alpha == 0.0043);
    CHECK(cfg.params.delta == 1.0);
    CHECK_FALSE(cfg.params.omega_override.has_value());
    CHECK(cfg.params.omega() == cfg.params.mu);
    CHECK(cfg.params.beta_model.kind == TempBetaModel::Kind::fixed);
    CHECK(cfg.params.beta_model.fixed_value == 0.84);
    CHECK_FALSE(cfg.params.exploratory);
    CHECK(cfg.temperature == 0.0);
    CHECK(cfg.step == 0.01);
    CHECK(cfg.horizon == 500.0);
    CHECK(cfg.tail_window == 0.25);
    CHECK(cfg.init.s == 0.999);
    CHECK(cfg.init.i == 0.001);
    CHECK_FALSE(cfg.grid.has_value());
    CHECK(cfg.sensitivity.parameter == "beta");
    CHECK_FALSE(cfg.sensitivity.lo.has_value());
    CHECK(cfg.jobs == 0);
    CHECK(cfg.out_dir.empty());
}

TEST_CASE("config parsing handles comments, spacing, and dotted keys") {
    const RunConfig cfg = parse_config(
        "# run setup\n"
        "mu = 0.05   # months are days here\n"
        "tau=3\n"
        "  omega = 0.1\n"
        "beta.kind = quadratic\n"
        "horizon = 800\n"
        "init.i = 0.002\n"
        "grid.start = 0\n"
        "grid.stop = 10\n"
        "grid.step = 0.5\n"
        "sensitivity.parameter = gamma\n"
        "sensitivity.lo = 0\n"
        "sensitivity.hi = 1\n"
        "exploratory = true\n"
        "jobs = 4\n"
        "out = results/run1\n");
    CHECK(cfg.params.mu == 0.05);
    CHECK(cfg.params.tau == 3.0);
    REQUIRE(cfg.params.omega_override.has_value());
    CHECK(cfg.params.omega() == 0.1);
    CHECK(cfg.params.beta_model.kind == TempBetaModel::Kind::quadratic);
    CHECK(cfg.params.beta_model.beta0 == 0.792);
    CHECK(cfg.params.beta_model.beta1 == 0.000345);
    CHECK(cfg.params.beta_model.t_m == 7.73);
    CHECK(cfg.horizon == 800.0);
    CHECK(cfg.init.i == 0.002);
    REQUIRE(cfg.grid.has_value());
    CHECK(cfg.grid->stop == 10.0);
    CHECK(cfg.grid->step == 0.5);
    CHECK(cfg.sensitivity.parameter == "gamma");
    REQUIRE(cfg.sensitivity.lo.has_value());
    REQUIRE(cfg.sensitivity.hi.has_value());
    CHECK(*cfg.sensitivity.hi == 1.0);
    CHECK(cfg.params.exploratory);
    CHECK(cfg.jobs == 4);
    CHECK(cfg.out_dir == "results/run1");
}

TEST_CASE("beta overrides adjust the resolved model") {
    const RunConfig lin = parse_config(
        "beta.kind = linear\nbeta.beta0 = 0.9\nbeta.beta1 = 0.005\n");
    CHECK(lin.params.beta_model.kind == TempBetaModel::Kind::linear);
    CHECK(lin.params.beta_model.beta0 == 0.9);
    CHECK(lin.params.beta_model.beta1 == 0.005);
    const RunConfig fix = parse_config("beta.kind = fixed\nbeta.fixed = 0.42\n");
    CHECK(fix.params.beta_model.fixed_value == 0.42);
    // key order does not matter: value lines may precede the kind line
    const RunConfig reordered =
        parse_config("beta.t_m = 10\nbeta.kind = quadratic\n");
    CHECK(reordered.params.beta_model.t_m == 10.0);
    CHECK_THROWS_WITH_AS(parse_config("beta.t_m = 10\n"),
                         doctest::Contains("beta.t_m requires beta.kind"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("beta.kind = linear\nbeta.fixed = 1\n"),
                         doctest::Contains("beta.fixed requires beta.kind"),
                         ConfigError);
}

TEST_CASE("config problems are reported once, in aggregate") {
    try {
        parse_config("tau = -1\nbogus = 3\np = oops\n");
        FAIL("expected a config error");
    } catch (const ConfigError& err) {
        const std::string what = err.what();
        CHECK(what.rfind("configuration rejected:", 0) == 0);
        CHECK(what.find("line 2: unknown key `bogus`") != std::string::npos);
        CHECK(what.find("line 3: value of `p` is not numeric") !=
              std::string::npos);
        CHECK(what.find("tau") != std::string::npos);
        CHECK(what.find("nonnegativity") != std::string::npos);
    }
    CHECK_THROWS_WITH_AS(parse_config("p = 1.5\n"),
                         doctest::Contains("exploratory"), ConfigError);
    CHECK_NOTHROW(parse_config("p = 1.5\nexploratory = true\n"));
    CHECK_THROWS_WITH_AS(parse_config("step = 0\n"),
                         doctest::Contains("step must be positive"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("horizon = -5\n"),
                         doctest::Contains("horizon"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("init.s = -0.1\n"),
                         doctest::Contains("init"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("just some words\n"),
                         doctest::Contains("expected `key = value`"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("mu =\n"),
                         doctest::Contains("empty key or value"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config("sensitivity.lo = 2\nsensitivity.hi = 1\n"),
        doctest::Contains("sensitivity.hi"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("jobs = -2\n"),
                         doctest::Contains("jobs"), ConfigError);
}

TEST_CASE("echoed configuration reparses to the same echo") {
    const RunConfig cfg = parse_config(
        "mu = 0.05\nomega = 0.3\ntau = 3.5\nbeta.kind = linear\n"
        "grid.start = -10\ngrid.stop = 40\ngrid.step = 5\n"
        "sensitivity.parameter = mu\nsensitivity.lo = 0\nsensitivity.hi = 0.5\n"
        "jobs = 2\nout = somewhere\nexploratory = true\n");
    const std::string echoed = echo_config(cfg);
    CHECK(echoed.rfind("# resolved configuration", 0) == 0);
    const RunConfig reparsed = parse_config(echoed);
    CHECK(echo_config(reparsed) == echoed);
    CHECK(reparsed.params.mu == cfg.params.mu);
    CHECK(reparsed.params.omega() == cfg.params.omega());
    CHECK(reparsed.out_dir == cfg.out_dir);
    // the default echo reparses too
    const std::string plain = echo_config(parse_config(""));
    CHECK(echo_config(parse_config(plain)) == plain);
}

TEST_CASE("config loading from disk") {
    CHECK_NOTHROW(load_config("defaults"));
    CHECK_THROWS_WITH_AS(load_config("/no/such/config.ini"),
                         doctest::Contains("cannot read config file"),
                         ConfigError);
    const auto path =
        std::filesystem::temp_directory_path() / "epidde_cfg_test.ini";
    {
        std::ofstream out(path);
        out << "mu = 0.07\n";
    }
    const RunConfig cfg = load_config(path.string());
    CHECK(cfg.params.mu == 0.07);
    std::filesystem::remove(path);
}

TEST_CASE("csv formatting is exact and locale free") {
    Table t;
    t.columns = {"a", "b"};
    t.rows = {{1.0, 0.5}, {2.0, 1.0 / 3.0}};
    CHECK(format_csv(t) == "a,b\n1,0.5\n2,0.333333333333\n");
    t.rows.push_back({3.0});
    CHECK_THROWS_WITH_AS(format_csv(t),
                         doctest::Contains("row width"), ConfigError);
}

TEST_CASE("csv parsing accepts round trips and flags malformed text") {
    CHECK_THROWS_WITH_AS(parse_csv(""), doctest::Contains("no header row"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1\n"), doctest::Contains("fields"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,x\n"),
                         doctest::Contains("not numeric"), ConfigError);
    const Table crlf = parse_csv("a,b\r\n1,2\r\n");
    REQUIRE(crlf.rows.size() == 1);
    CHECK(crlf.rows[0][1] == 2.0);

    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> mag(-8.0, 8.0);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    Table big;
    big.columns = {"x", "y", "z"};
    for (int r = 0; r < 200; ++r) {
        std::vector<double> row(3);
        for (auto& v : row) v = mant(rng) * std::pow(10.0, mag(rng));
        big.rows.push_back(row);
    }
    big.rows.push_back({0.0, std::nan(""), -1.25e-7});
    const Table back = parse_csv(format_csv(big));
    REQUIRE(back.rows.size() == big.rows.size());
    CHECK(back.columns == big.columns);
    for (std::size_t r = 0; r < big.rows.size(); ++r)
        for (std::size_t c = 0; c < 3; ++c) {
            const double a = big.rows[r][c], b = back.rows[r][c];
            if (std::isnan(a)) {
                CHECK(std::isnan(b));
            } else if (a == 0.0) {
                CHECK(b == 0.0);
            } else {
                CHECK(std::abs(a - b) / std::abs(a) < 5e-12);
            }
        }
}

TEST_CASE("trajectory and sweep tables") {
    ModelParams par;
    const Trajectory traj = simulate(par, 0.0, 1.0, 0.25);
    const Table t = trajectory_table(traj);
    CHECK(t.columns ==
          std::vector<std::string>{"t", "S", "E", "I", "Q", "R", "D"});
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows[0][0] == 0.0);
    CHECK(t.rows[0][1] == 0.999);
    CHECK(t.rows[0][3] == 0.001);
    CHECK(t.rows[4][0] == doctest::Approx(1.0).epsilon(1e-12));

    SweepTable sweep;
    sweep.columns = {"p", "avg_I"};
    sweep.rows.push_back({0.1, true, 0.0, {0.5}});
    sweep.rows.push_back({0.2, false, 33.5, {std::nan("")}});
    const Table flat = sweep_table(sweep);
    REQUIRE(flat.rows.size() == 2);
    CHECK(flat.rows[0][0] == 0.1);
    CHECK(flat.rows[0][1] == 0.5);
    CHECK(std::isnan(flat.rows[1][1]));
    const std::string csv = format_csv(flat);
    CHECK(csv.find("nan") != std::string::npos);
    const Table reread = parse_csv(csv);
    CHECK(std::isnan(reread.rows[1][1]));
}

TEST_CASE("sensitivity tables carry the fan and the summary") {
    SensitivityResult res;
    res.parameter = "p";
    res.values = {0.1, 0.2};
    res.member_ok = {1, 1};
    res.times = {0.0, 0.5};
    res.fan = {{1.0, 2.0}, {3.0, 4.0}};
    res.mean = {2.0, 3.0};
    res.mse = {1.0, 1.0};
    const Table fan = sensitivity_fan_table(res);
    CHECK(fan.columns == std::vector<std::string>{"t", "I@0.1", "I@0.2"});
    REQUIRE(fan.rows.size() == 2);
    CHECK(fan.rows[1][0] == 0.5);
    CHECK(fan.rows[1][1] == 2.0);
    CHECK(fan.rows[1][2] == 4.0);
    const Table summary = sensitivity_summary_table(res);
    CHECK(summary.columns == std::vector<std::string>{"t", "mean_I", "mse"});
    CHECK(summary.rows[0][1] == 2.0);
}

TEST_CASE("svg rendering is deterministic and self contained") {
    Series a{"first", {0.0, 1.0, 2.0}, {0.0, 1.0, 0.5}};
    Series b{"second<&>", {0.0, 1.0, 2.0}, {1.0, 0.0, 0.25}};
    const std::string one = render_svg({a, b}, "time", "level", "demo");
    const std::string two = render_svg({a, b}, "time", "level", "demo");
    CHECK(one == two);
    CHECK(one.rfind("<svg", 0) == 0);
    CHECK(one.substr(one.size() - 7) == "</svg>\n");
    CHECK(count_occurrences(one, "<polyline") == 2);
    CHECK(one.find("second&lt;&amp;&gt;") != std::string::npos);
    CHECK(one.find("time") != std::string::npos);
    CHECK(one.find("level") != std::string::npos);

    // constant series stretch to a drawable band
    const std::string flat =
        render_svg({Series{"c", {0.0, 1.0}, {1.0, 1.0}}}, "x", "y", "t");
    CHECK(flat.find("<polyline") != std::string::npos);

    // non-finite points are dropped, not drawn
    Series holed{"h", {0.0, 1.0, 2.0}, {0.0, std::nan(""), 1.0}};
    const std::string holey = render_svg({holed}, "x", "y", "t");
    CHECK(holey.find("nan") == std::string::npos);

    CHECK_THROWS_AS(render_svg({}, "x", "y", "t"), ConfigError);
    CHECK_THROWS_AS(render_svg({Series{"bad", {0.0, 1.0}, {0.0}}},
                               "x", "y", "t"),
                    ConfigError);
    CHECK_THROWS_AS(render_svg({Series{"empty", {}, {}}}, "x", "y", "t"),
                    ConfigError);
    CHECK_THROWS_AS(
        render_svg({Series{"void", {0.0}, {std::nan("")}}}, "x", "y", "t"),
        ConfigError);
}

TEST_CASE("content hash matches the published test vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("result bundle manifests every artifact with checksums") {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / "epidde_bundle_test";
    fs::remove_all(dir);
    {
        const std::string echo = echo_config(parse_config(""));
        ResultBundle bundle(dir.string(), echo);
        bundle.write_text("readme.txt", "hello bundle\n");
        Table t;
        t.columns = {"t", "v"};
        t.rows = {{0.0, 1.0}, {1.0, 0.5}};
        bundle.write_table("series.csv", t);
        bundle.note("one explanatory line");
        CHECK_THROWS_WITH_AS(bundle.write_text("no_dir/x.txt", "y"),
                             doctest::Contains("unwritable path"), ConfigError);
        const std::string manifest_path = bundle.finalize();
        CHECK(fs::path(manifest_path).filename() == "manifest.json");

        const auto manifest = nlohmann::json::parse(slurp(manifest_path));
        REQUIRE(manifest["files"].size() == 2);
        for (const auto& entry : manifest["files"]) {
            const std::string name = entry["name"];
            const std::string body = slurp(dir / name);
            CHECK(entry["bytes"].get<std::size_t>() == body.size());
            char expect[17];
            std::snprintf(expect, sizeof(expect), "%016llx",
                          static_cast<unsigned long long>(fnv1a64(body)));
            CHECK(entry["checksum_fnv1a64"].get<std::string>() == expect);
        }
        CHECK(manifest["provenance"]["tool"] == "epidde 0.1.0");
        CHECK(manifest["provenance"]["config"].get<std::string>() ==
              echo_config(parse_config("")));
        REQUIRE(manifest["provenance"]["notes"].size() == 1);
        CHECK(manifest["provenance"]["notes"][0] == "one explanatory line");
        const std::string stamp = manifest["provenance"]["timestamp_utc"];
        CHECK(stamp.size() == 20);
        CHECK(stamp.back() == 'Z');
    }
    fs::remove_all(dir);
}

TEST_CASE("stability reports serialize to single json lines") {
    const StabilityReport rep = classify_dfe(ModelParams{}, 1.0);
    const std::string line = stability_report_json(rep);
    CHECK(line.find('\n') == std::string::npos);
    const auto j = nlohmann::json::parse(line);
    CHECK(j["equilibrium"] == "disease_free");
    CHECK(j["r0"].get<double>() > 1.0);
    CHECK(j["verdict"] == "unstable");
    CHECK(j["conditions"]["r0_lt_1"] == false);
    CHECK_FALSE(j.contains("tau_star"));

    ModelParams onset;
    onset.mu = 0.05;
    onset.omega_override = 0.05;
    onset.epsilon = 0.3;
    onset.gamma = 0.05;
    onset.p = 0.8;
    onset.rho = 1.0 / 30.0;
    onset.alpha = 0.02;
    onset.delta = 3.0;
    onset.kappa = 1.0;
    const auto k = nlohmann::json::parse(
        stability_report_json(classify_dfe(onset, 0.42)));
    CHECK(k["verdict"] == "stable_below_tau_star");
    CHECK(k["tau_star"].get<double>() ==
          doctest::Approx(2.971652374419557).epsilon(1e-9));
    CHECK(k["transversality"]["holds"] == false);
}

TEST_CASE("default worker count and output directory resolution") {
    const int jobs = default_jobs();
    CHECK(jobs >= 1);
    CHECK(jobs <= 8);
    CHECK(resolve_out_dir("explicit") == "explicit");
    // environment fallback
    setenv("EPIDDE_OUT", "from_env", 1);
    CHECK(resolve_out_dir("") == "from_env");
    setenv("EPIDDE_OUT", "", 1);
    CHECK(resolve_out_dir("") == ".");
    unsetenv("EPIDDE_OUT");
    CHECK(resolve_out_dir("") == ".");
}
