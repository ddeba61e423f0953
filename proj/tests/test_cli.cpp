// End-to-end checks of the command-line tool.  Each case shells out to the
// built binary (path injected via GRUSHINLAB_BIN) inside a scratch directory
// and inspects the emitted JSON/CSV with the library's own readers.

#include "doctest.h"

#include "grushinlab/io.hpp"
#include "grushinlab/spectral.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace gl = grushinlab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("grushinlab_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Runs the CLI with `args`, cwd = dir.  Returns the process exit status.
int cli(const fs::path& dir, const std::string& args) {
    std::ostringstream cmd;
    cmd << "cd \"" << dir.string() << "\" && \"" << GRUSHINLAB_BIN << "\" " << args
        << " > cli_stdout.txt 2> cli_stderr.txt";
    const int rc = std::system(cmd.str().c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing json file ", path.string());
    return json::parse(in);
}

std::string file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file ", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly and malformed invocations exit with an error") {
    const fs::path dir = scratch_dir("usage");
    CHECK(cli(dir, "--help") == 0);
    CHECK(cli(dir, "classify --help") == 0);
    CHECK(cli(dir, "") == 1);                       // a subcommand is required
    CHECK(cli(dir, "classify") == 1);               // needs --alpha/--c or --k
    CHECK(cli(dir, "classify --alpha 1") == 1);     // --alpha without --c
    CHECK(cli(dir, "classify --alpha 1 --c 0 --bogus 3") == 1);
    CHECK(cli(dir, "frobnicate") == 1);             // unknown subcommand
    CHECK(cli(dir, "evolve --bc sommerfeld --T 0.01") == 1);
    // output paths get their parents created; a path through a regular file fails
    CHECK(cli(dir, "classify --alpha 1 --c 0 --out fresh_dir/v.json") == 0);
    CHECK(fs::exists(dir / "fresh_dir" / "v.json"));
    CHECK(cli(dir, "classify --alpha 1 --c 0 --out cli_stdout.txt/v.json") == 1);
}

TEST_CASE("classify emits the planar verdict as json") {
    const fs::path dir = scratch_dir("classify2d");
    REQUIRE(cli(dir, "classify --alpha 1 --c 0 --out v.json") == 0);
    const json v = load_json(dir / "v.json");
    CHECK(v.at("alpha").get<double>() == 1.0);
    CHECK(v.at("c").get<double>() == 0.0);
    CHECK(v.at("esa").get<bool>() == true);
    CHECK(v.at("k").get<double>() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(v.at("rule").get<std::string>() == "BelowQuarter");

    REQUIRE(cli(dir, "classify --alpha 1 --c 0.2 --out w.json") == 0);
    const json w = load_json(dir / "w.json");
    CHECK(w.at("esa").get<bool>() == false);
    CHECK(w.at("k").get<double>() == doctest::Approx(0.35).epsilon(1e-14));
}

TEST_CASE("classify reports endpoint types and deficiency for half-line potentials") {
    const fs::path dir = scratch_dir("classify1d");
    REQUIRE(cli(dir, "classify --k 0.7 --out d.json") == 0);
    const json d = load_json(dir / "d.json");
    CHECK(d.at("at_zero").get<std::string>() == "LimitCircle");
    CHECK(d.at("at_infinity").get<std::string>() == "LimitPoint");
    CHECK(d.at("n_plus").get<int>() == 1);
    CHECK(d.at("n_minus").get<int>() == 1);
    CHECK(d.at("method").get<std::string>() == "analytic");

    REQUIRE(cli(dir, "classify --k 2 --g1 0.5 --out e.json") == 0);
    const json e = load_json(dir / "e.json");
    CHECK(e.at("at_zero").get<std::string>() == "LimitPoint");
    CHECK(e.at("n_plus").get<int>() == 0);
    CHECK(e.at("n_minus").get<int>() == 0);
}

TEST_CASE("numeric classification inside the boundary band exits undecidable") {
    const fs::path dir = scratch_dir("band");
    CHECK(cli(dir, "classify --k 0.74 --numeric --out u.json") == 2);
    const json u = load_json(dir / "u.json");
    CHECK(u.at("at_zero").get<std::string>() == "BoundaryUndecidable");
    CHECK(u.at("method").get<std::string>() == "numeric");
}

TEST_CASE("region map uses cell centers, carries a rule legend, and reruns bit-identically") {
    const fs::path dir = scratch_dir("regionmap");
    REQUIRE(cli(dir, "region-map --alpha -1:1:8 --c 0:0.5:6 --out map.csv") == 0);
    const gl::CsvTable t = gl::read_csv_file((dir / "map.csv").string());
    REQUIRE(t.columns == std::vector<std::string>{"alpha", "c", "k", "esa", "rule"});
    REQUIRE(t.rows.size() == 48);
    CHECK(t.meta_string("command") == "region-map");
    CHECK(t.meta_string("rule_0") == "BelowQuarter");
    CHECK(t.meta_string("rule_4") == "AboveRight");

    // cell centers of an 8x6 grid, c-major row order
    CHECK(t.rows[0][0] == doctest::Approx(-1.0 + 0.5 * 0.25).epsilon(1e-15));
    CHECK(t.rows[0][1] == doctest::Approx(0.5 / 12.0).epsilon(1e-15));
    CHECK(t.rows[1][0] == doctest::Approx(-1.0 + 1.5 * 0.25).epsilon(1e-15));
    CHECK(t.rows[8][1] == doctest::Approx(3.0 * 0.5 / 12.0).epsilon(1e-15));

    // every row agrees with an in-process classification
    for (const auto& row : t.rows) {
        const gl::RegionVerdict v = gl::classify_alpha_grushin(row[0], row[1]);
        CHECK(row[2] == doctest::Approx(v.k_strength).epsilon(1e-15));
        CHECK(row[3] == (v.essentially_self_adjoint ? 1.0 : 0.0));
        CHECK(row[4] == static_cast<double>(static_cast<int>(v.rule)));
    }

    CHECK(fs::exists(dir / "map.gp"));

    REQUIRE(cli(dir, "region-map --alpha -1:1:8 --c 0:0.5:6 --out map2.csv") == 0);
    CHECK(file_bytes(dir / "map.csv") == file_bytes(dir / "map2.csv"));

    CHECK(cli(dir, "region-map --alpha -1:1:0 --c 0:0.5:6 --out bad.csv") == 1);
    CHECK(cli(dir, "region-map --alpha nonsense --out bad.csv") == 1);
}

TEST_CASE("geodesic command reproduces the analytic return point") {
    const fs::path dir = scratch_dir("geodesic");
    REQUIRE(cli(dir, "geodesics --out geo.csv") == 0);
    const gl::CsvTable t = gl::read_csv_file((dir / "geo.csv").string());
    REQUIRE(t.columns == std::vector<std::string>{"t", "x", "y", "p_x", "p_y", "H"});
    REQUIRE(t.rows.size() == 13001);
    CHECK(t.meta_number("energy_drift") <= 1e-8);
    const auto& last = t.rows.back();
    CHECK(last[0] == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(last[1] == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(last[2] == doctest::Approx(0.0));

    CHECK(cli(dir, "geodesics --dt -1 --out bad.csv") == 1);
}

TEST_CASE("figure command writes a csv per ray plus a gnuplot script") {
    const fs::path dir = scratch_dir("figure");
    REQUIRE(cli(dir, "figure1 --rays 4 --tf 0.3 --out fan") == 0);
    for (int i = 0; i < 4; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "fan_ray%02d.csv", i);
        const gl::CsvTable t = gl::read_csv_file((dir / name).string());
        CHECK(t.columns.size() == 6);
        CHECK(t.meta_number("energy_drift") <= 1e-8);
        CHECK(t.meta_number("ray") == static_cast<double>(i));
    }
    CHECK(!fs::exists(dir / "fan_ray04.csv"));
    const std::string gp = file_bytes(dir / "fan.gp");
    CHECK(gp.find("fan_ray00.csv") != std::string::npos);
    CHECK(gp.find("fan_ray03.csv") != std::string::npos);
}

TEST_CASE("witness and check-witness round trip through csv metadata") {
    const fs::path dir = scratch_dir("witness");
    REQUIRE(cli(dir, "witness --c 0.3 --out w.csv") == 0);
    const gl::CsvTable t = gl::read_csv_file((dir / "w.csv").string());
    REQUIRE(t.columns == std::vector<std::string>{"x", "y", "value"});
    CHECK(t.meta_string("kind") == "frobenius");
    CHECK(t.meta_number("c") == 0.3);
    CHECK(t.meta_number("log_case") == 0.0);
    const double alpha_plus = 0.5 + std::sqrt(1.0 - 2.0 * 0.3);
    CHECK(t.meta_number("alpha_exponent") == doctest::Approx(alpha_plus).epsilon(1e-12));

    REQUIRE(cli(dir, "check-witness w.csv --out chk.json") == 0);
    const json chk = load_json(dir / "chk.json");
    CHECK(chk.at("adjoint_member").get<bool>() == true);
    CHECK(chk.at("closure_member").get<bool>() == false);
    CHECK(chk.at("alpha_fit").get<double>() == doctest::Approx(alpha_plus).epsilon(1e-3));

    CHECK(cli(dir, "witness --sign sideways --out bad.csv") == 1);
    CHECK(cli(dir, "check-witness missing.csv") == 1);
}

TEST_CASE("check-witness follows the probe path from metadata") {
    const fs::path dir = scratch_dir("probe");
    gl::CsvTable probe;
    probe.metadata["kind"] = "probe";
    probe.metadata["c"] = "0.3";
    probe.metadata["beta"] = "0";
    probe.metadata["epsilon"] = "0.1";
    probe.metadata["probe_exponent"] = "2.0";
    probe.columns = {"x", "y", "value"};
    probe.rows = {{0.01, 0.0, 0.0}};  // rows are ignored; the field is rebuilt
    gl::atomic_write_file((dir / "p.csv").string(), gl::render_csv(probe));

    REQUIRE(cli(dir, "check-witness p.csv --out chk.json") == 0);
    const json chk = load_json(dir / "chk.json");
    CHECK(chk.at("closure_member").get<bool>() == true);
    CHECK(chk.at("alpha_fit").get<double>() == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("evolve writes snapshots and a machine-readable summary") {
    const fs::path dir = scratch_dir("evolve");
    REQUIRE(cli(dir, "evolve --mode heat --k 0.75 --bc friedrichs --dt 1e-3 --T 0.2 "
                     "--stride 50 --out run.csv") == 0);

    const gl::CsvTable t = gl::read_csv_file((dir / "run.csv").string());
    REQUIRE(t.columns == std::vector<std::string>{"t", "x", "re(u)", "im(u)"});
    CHECK(t.meta_string("mode") == "heat");
    CHECK(t.meta_number("k") == 0.75);

    const json s = load_json(dir / "run.summary.json");
    const auto& times = s.at("times");
    REQUIRE(times.size() == 5);  // records every 50 steps of 200, plus t = 0
    CHECK(times[0].get<double>() == 0.0);
    CHECK(times[4].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
    REQUIRE(t.rows.size() % times.size() == 0);

    const auto& mass = s.at("mass");
    REQUIRE(mass.size() == 5);
    for (int i = 1; i < 5; ++i)
        CHECK(mass[i].get<double>() <= mass[i - 1].get<double>() + 1e-12);
    CHECK(s.at("u0_l2_sq").get<double>() > 0.0);
    CHECK(s.at("confined").is_boolean());
    CHECK(s.at("leaking").is_boolean());
    CHECK(s.at("norm_drift").get<double>() >= 0.0);
    // the t = 0 snapshot has no support near zero, so its exponent is null
    const auto& exps = s.at("near_zero_exponent");
    REQUIRE(exps.size() == 5);
    CHECK(exps[0].is_null());

    CHECK(cli(dir, "evolve --mode braise --out bad.csv") == 1);
    CHECK(cli(dir, "evolve --dt 2 --T 1 --out bad.csv") == 1);
}

} // TEST_SUITE("cli")
