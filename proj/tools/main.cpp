// grushinlab: command-line front end.
//
// Subcommands: classify, region-map, geodesics, figure1, witness,
// check-witness, evolve. JSON goes to stdout (and optionally to --out);
// fields and trajectories go to CSV files written atomically. Exit codes:
// 0 success, 2 undecidable/inconclusive, 1 error.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "grushinlab/errors.hpp"
#include "grushinlab/evolution.hpp"
#include "grushinlab/frames.hpp"
#include "grushinlab/geodesics.hpp"
#include "grushinlab/io.hpp"
#include "grushinlab/numerics.hpp"
#include "grushinlab/spectral.hpp"
#include "grushinlab/sturm1d.hpp"

namespace gl = grushinlab;

namespace {

// ---------------------------------------------------------------------------
// Tiny JSON emitters: flat objects with stable key order and 17-significant-
// digit numbers (nlohmann would re-render doubles its own way).
// ---------------------------------------------------------------------------

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

std::string jarr(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        // NaN marks an unfit diagnostic (e.g. a snapshot with no support in
        // the fit window); JSON has no NaN literal, so emit null.
        out += std::isfinite(v[i]) ? gl::format_double(v[i]) : std::string("null");
    }
    return out + "]";
}

using JsonFields = std::vector<std::pair<std::string, std::string>>;

std::string jobj(const JsonFields& fields) {
    std::string out = "{";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ", ";
        out += jstr(fields[i].first) + ": " + fields[i].second;
    }
    return out + "}\n";
}

void emit_json(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (!out_path.empty()) gl::atomic_write_file(out_path, text);
}

// "lo:hi:n" range triple.
struct Range {
    double lo;
    double hi;
    std::size_t n;
};

Range parse_range(const std::string& text) {
    Range r{};
    std::istringstream in(text);
    char c1 = 0, c2 = 0;
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' || !in.eof())
        throw gl::ParameterError("range must look like lo:hi:n, got '" + text + "'");
    return r;
}

gl::BoundaryCondition parse_bc(const std::string& text) {
    if (text == "friedrichs") return gl::BoundaryCondition::friedrichs();
    if (text == "farwall") return gl::BoundaryCondition::far_wall();
    if (text.rfind("mix:", 0) == 0) {
        std::size_t used = 0;
        const double theta = std::stod(text.substr(4), &used);
        if (used != text.size() - 4) throw gl::ParameterError("malformed mix ratio in '" + text + "'");
        return gl::BoundaryCondition::mix(theta);
    }
    throw gl::ParameterError("bc must be friedrichs, mix:<theta>, or farwall");
}

std::string stem_of(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    const std::size_t sep = path.find_last_of('/');
    if (dot == std::string::npos || (sep != std::string::npos && dot < sep)) return path;
    return path.substr(0, dot);
}

gl::CurvatureLaplacianSpec witness_spec(double c, double beta) {
    gl::PhiField phi = beta != 0.0 ? gl::PhiField::linear(beta) : gl::PhiField::zero();
    return {gl::FrameProfile::grushin(phi), c};
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int run_classify(const std::optional<double>& alpha, const std::optional<double>& c,
                 const std::optional<double>& k, double g1, bool numeric,
                 const std::string& out_path) {
    if (alpha.has_value()) {
        if (!c.has_value()) throw gl::ParameterError("--alpha requires --c");
        const gl::RegionVerdict v = gl::classify_alpha_grushin(*alpha, *c);
        emit_json(jobj({{"alpha", gl::format_double(v.alpha)},
                        {"c", gl::format_double(v.c)},
                        {"esa", v.essentially_self_adjoint ? "true" : "false"},
                        {"k", gl::format_double(v.k_strength)},
                        {"rule", jstr(gl::to_string(v.rule))}}),
                  out_path);
        return 0;
    }
    if (!k.has_value())
        throw gl::ParameterError("classify needs either --alpha/--c or --k [--g1]");

    gl::Potential1D p(*k, g1);
    const gl::Endpoint at_zero =
        numeric ? gl::classify_zero_numeric(p) : gl::classify_zero_analytic(p);
    const gl::Endpoint at_infinity = gl::classify_infinity_analytic(p);
    const auto [n_plus, n_minus] = gl::deficiency_indices(p);
    emit_json(jobj({{"at_zero", jstr(gl::to_string(at_zero))},
                    {"at_infinity", jstr(gl::to_string(at_infinity))},
                    {"n_plus", std::to_string(n_plus)},
                    {"n_minus", std::to_string(n_minus)},
                    {"method", jstr(numeric ? "numeric" : "analytic")}}),
              out_path);
    return at_zero == gl::Endpoint::BoundaryUndecidable ? 2 : 0;
}

// ---------------------------------------------------------------------------
// region-map
// ---------------------------------------------------------------------------

int run_region_map(const std::string& alpha_range, const std::string& c_range,
                   const std::string& out_path) {
    const Range ar = parse_range(alpha_range);
    const Range cr = parse_range(c_range);
    const gl::RegionGrid grid = gl::region_map(ar.lo, ar.hi, ar.n, cr.lo, cr.hi, cr.n);

    gl::CsvTable table;
    table.metadata["command"] = "region-map";
    table.metadata["alpha_range"] = alpha_range;
    table.metadata["c_range"] = c_range;
    for (int r = 0; r < 5; ++r)
        table.metadata["rule_" + std::to_string(r)] = gl::to_string(static_cast<gl::Rule>(r));
    table.columns = {"alpha", "c", "k", "esa", "rule"};
    table.rows.reserve(grid.cells.size());
    for (std::size_t r = 0; r < grid.c.size(); ++r) {
        for (std::size_t i = 0; i < grid.alpha.size(); ++i) {
            const gl::RegionVerdict& v = grid.cells[r * grid.alpha.size() + i];
            table.rows.push_back({v.alpha, v.c, v.k_strength,
                                  v.essentially_self_adjoint ? 1.0 : 0.0,
                                  static_cast<double>(v.rule)});
        }
    }
    gl::atomic_write_file(out_path, gl::render_csv(table));

    std::ostringstream gp;
    gp << "set datafile separator \",\"\n"
       << "set key autotitle columnhead\n"
       << "set xlabel \"alpha\"\nset ylabel \"c\"\n"
       << "unset key\n"
       << "plot \"" << out_path << "\" using 1:2:4 with points pt 5 ps 0.4 palette\n";
    gl::atomic_write_file(stem_of(out_path) + ".gp", gp.str());
    return 0;
}

// ---------------------------------------------------------------------------
// geodesics / figure1
// ---------------------------------------------------------------------------

gl::CsvTable trajectory_table(const gl::FrameProfile& profile, const gl::Trajectory& traj) {
    gl::CsvTable table;
    table.columns = {"t", "x", "y", "p_x", "p_y", "H"};
    table.rows.reserve(traj.t.size());
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const gl::GeodesicState& s = traj.states[i];
        table.rows.push_back({traj.t[i], s.x, s.y, s.px, s.py, gl::hamiltonian(profile, s)});
    }
    table.metadata["energy_drift"] = gl::format_double(traj.energy_drift);
    return table;
}

int run_geodesics(double alpha, double x0, double y0, double px, double py, double t_final,
                  double dt, const std::string& out_path) {
    const gl::FrameProfile profile = gl::FrameProfile::alpha_grushin(alpha);
    const gl::Trajectory traj =
        gl::integrate_geodesic(profile, {x0, y0, px, py}, t_final, dt);
    gl::CsvTable table = trajectory_table(profile, traj);
    table.metadata["command"] = "geodesics";
    gl::atomic_write_file(out_path, gl::render_csv(table));
    return 0;
}

int run_figure1(int n_rays, double t_final, double dt, const std::string& prefix) {
    const gl::FrameProfile profile = gl::FrameProfile::alpha_grushin(1.0);
    const auto rays = gl::geodesic_fan(profile, n_rays, t_final, dt);

    std::ostringstream gp;
    gp << "set datafile separator \",\"\nset key autotitle columnhead\nunset key\n"
       << "set xlabel \"x\"\nset ylabel \"y\"\nset zeroaxis\nplot ";
    for (std::size_t i = 0; i < rays.size(); ++i) {
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "_ray%02zu.csv", i);
        const std::string path = prefix + suffix;
        gl::CsvTable table = trajectory_table(profile, rays[i]);
        table.metadata["command"] = "figure1";
        table.metadata["ray"] = std::to_string(i);
        gl::atomic_write_file(path, gl::render_csv(table));
        if (i) gp << ", \\\n     ";
        gp << "\"" << path << "\" using 2:3 with lines";
    }
    gp << "\n";
    gl::atomic_write_file(prefix + ".gp", gp.str());
    return 0;
}

// ---------------------------------------------------------------------------
// witness / check-witness
// ---------------------------------------------------------------------------

int run_witness(double c, const std::string& sign_text, double epsilon,
                const std::string& side_text, double beta, const std::string& out_path) {
    if (sign_text != "plus" && sign_text != "minus")
        throw gl::ParameterError("--sign must be plus or minus");
    if (side_text != "plus" && side_text != "minus")
        throw gl::ParameterError("--side must be plus or minus");
    const gl::WitnessSign sign =
        sign_text == "plus" ? gl::WitnessSign::Plus : gl::WitnessSign::Minus;
    const gl::WitnessSide side =
        side_text == "plus" ? gl::WitnessSide::Plus : gl::WitnessSide::Minus;

    const gl::CurvatureLaplacianSpec spec = witness_spec(c, beta);
    const gl::WitnessFunction w = gl::build_witness(spec, sign, epsilon, side);

    gl::CsvTable table;
    table.metadata["command"] = "witness";
    table.metadata["kind"] = "frobenius";
    table.metadata["c"] = gl::format_double(c);
    table.metadata["beta"] = gl::format_double(beta);
    table.metadata["sign"] = sign_text;
    table.metadata["side"] = side_text;
    table.metadata["epsilon"] = gl::format_double(epsilon);
    table.metadata["alpha_exponent"] = gl::format_double(w.alpha_exponent);
    table.metadata["log_case"] = w.log_case ? "1" : "0";
    table.columns = {"x", "y", "value"};
    table.rows.reserve(w.samples.x.size() * w.samples.y.size());
    for (std::size_t i = 0; i < w.samples.x.size(); ++i)
        for (std::size_t j = 0; j < w.samples.y.size(); ++j)
            table.rows.push_back({w.samples.x[i], w.samples.y[j], w.samples.at(i, j)});
    gl::atomic_write_file(out_path, gl::render_csv(table));
    return 0;
}

int run_check_witness(const std::string& csv_path, const std::string& out_path) {
    const gl::CsvTable table = gl::read_csv_file(csv_path);
    const double c = table.meta_number("c");
    const double beta = table.meta_number("beta");
    const double epsilon = table.meta_number("epsilon");
    const gl::CurvatureLaplacianSpec spec = witness_spec(c, beta);

    gl::WitnessFunction w;
    if (table.meta_string("kind") == "probe") {
        w = gl::power_probe(spec, table.meta_number("probe_exponent"), epsilon);
    } else {
        const gl::WitnessSign sign = table.meta_string("sign") == "minus"
                                         ? gl::WitnessSign::Minus
                                         : gl::WitnessSign::Plus;
        const gl::WitnessSide side = table.meta_string("side") == "minus"
                                         ? gl::WitnessSide::Minus
                                         : gl::WitnessSide::Plus;
        w = gl::build_witness(spec, sign, epsilon, side);
    }

    const bool adjoint_member = gl::adjoint_membership_test(w, spec);
    const bool closure_member = gl::closure_membership_test(w);
    const double alpha_fit = gl::witness_alpha_fit(w);
    emit_json(jobj({{"adjoint_member", adjoint_member ? "true" : "false"},
                    {"closure_member", closure_member ? "true" : "false"},
                    {"alpha_fit", gl::format_double(alpha_fit)}}),
              out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

int run_evolve(const std::string& mode, double k, double g1, const std::string& bc_text,
               double dt, double t_final, double x_max, double bump_lo, double bump_hi,
               int stride, const std::string& out_path) {
    if (mode != "heat" && mode != "schrodinger")
        throw gl::ParameterError("--mode must be heat or schrodinger");
    const gl::BoundaryCondition bc = parse_bc(bc_text);
    const gl::Potential1D p(k, g1);
    const gl::ModeOperator1D op = gl::discretize_mode_operator(p, bc, x_max);
    const std::vector<double> u0 = gl::bump_profile(op.x, bump_lo, bump_hi);

    gl::EvolutionRun run;
    if (mode == "heat") {
        run = gl::heat_evolve(op, u0, dt, t_final, stride);
    } else {
        std::vector<std::complex<double>> u0c(u0.begin(), u0.end());
        run = gl::schrodinger_evolve(op, u0c, dt, t_final, stride);
    }

    gl::CsvTable table;
    table.metadata["command"] = "evolve";
    table.metadata["mode"] = mode;
    table.metadata["k"] = gl::format_double(k);
    table.metadata["g1"] = gl::format_double(g1);
    table.metadata["bc"] = bc_text;
    table.metadata["dt"] = gl::format_double(dt);
    table.metadata["T"] = gl::format_double(t_final);
    table.metadata["x_max"] = gl::format_double(x_max);
    table.columns = {"t", "x", "re(u)", "im(u)"};
    table.rows.reserve(run.times.size() * run.x.size());
    for (std::size_t s = 0; s < run.times.size(); ++s)
        for (std::size_t i = 0; i < run.x.size(); ++i)
            table.rows.push_back(
                {run.times[s], run.x[i], run.fields[s][i].real(), run.fields[s][i].imag()});
    gl::atomic_write_file(out_path, gl::render_csv(table));

    const gl::ConfinementReport report = gl::confinement_report(run);
    const std::string summary =
        jobj({{"mode", jstr(mode)},
              {"times", jarr(run.times)},
              {"mass", jarr(run.mass)},
              {"flux_at_zero", jarr(run.flux_at_zero)},
              {"near_zero_exponent", jarr(report.near_zero_exponent)},
              {"max_abs_flux", gl::format_double(report.max_abs_flux)},
              {"u0_l2_sq", gl::format_double(report.u0_l2_sq)},
              {"confined", report.confined ? "true" : "false"},
              {"leaking", report.leaking ? "true" : "false"},
              {"norm_drift", gl::format_double(run.norm_drift)}});
    gl::atomic_write_file(stem_of(out_path) + ".summary.json", summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Almost-Riemannian frame laboratory: classification, geodesics, witnesses, "
                 "and confinement experiments on the Grushin cylinder"};
    app.require_subcommand(1);
    int seed = 0;
    app.add_option("--seed", seed, "Seed recorded for sampled inputs")->capture_default_str();

    // classify
    auto* classify = app.add_subcommand("classify", "Self-adjointness / endpoint classification");
    std::optional<double> cl_alpha, cl_c, cl_k;
    double cl_g1 = 0.0;
    bool cl_numeric = false;
    std::string cl_out;
    classify->add_option("--alpha", cl_alpha, "Power-frame exponent alpha");
    classify->add_option("--c", cl_c, "Curvature coupling c");
    classify->add_option("--k", cl_k, "Inverse-square strength of a half-line potential");
    classify->add_option("--g1", cl_g1, "Inverse-first-power strength")->capture_default_str();
    classify->add_flag("--numeric", cl_numeric, "Use the shooting oracle at x=0");
    classify->add_option("--out", cl_out, "Also write the JSON to this path");

    // region-map
    auto* region = app.add_subcommand("region-map", "Phase diagram over (alpha, c)");
    std::string rm_alpha = "-5:8:1300", rm_c = "0:4.2:420", rm_out = "map.csv";
    region->add_option("--alpha", rm_alpha, "alpha range lo:hi:n")->capture_default_str();
    region->add_option("--c", rm_c, "c range lo:hi:n")->capture_default_str();
    region->add_option("--out", rm_out, "Output CSV path")->capture_default_str();

    // geodesics
    auto* geo = app.add_subcommand("geodesics", "Integrate one geodesic on f = x^alpha");
    double ge_alpha = 1.0, ge_x0 = -0.5, ge_y0 = 0.0, ge_px = 1.0, ge_py = 0.0;
    double ge_tf = 1.3, ge_dt = 1e-4;
    std::string ge_out = "geodesic.csv";
    geo->add_option("--alpha", ge_alpha, "Frame exponent")->capture_default_str();
    geo->add_option("--x0", ge_x0, "Initial x")->capture_default_str();
    geo->add_option("--y0", ge_y0, "Initial y")->capture_default_str();
    geo->add_option("--px", ge_px, "Initial p_x")->capture_default_str();
    geo->add_option("--py", ge_py, "Initial p_y")->capture_default_str();
    geo->add_option("--tf", ge_tf, "Final time")->capture_default_str();
    geo->add_option("--dt", ge_dt, "Time step")->capture_default_str();
    geo->add_option("--out", ge_out, "Output CSV path")->capture_default_str();

    // figure1
    auto* fig = app.add_subcommand("figure1", "16-ray fan through the singular set");
    int f1_rays = 16;
    double f1_tf = 1.3, f1_dt = 1e-4;
    std::string f1_out = "figure1";
    fig->add_option("--rays", f1_rays, "Number of rays")->capture_default_str();
    fig->add_option("--tf", f1_tf, "Final time")->capture_default_str();
    fig->add_option("--dt", f1_dt, "Time step")->capture_default_str();
    fig->add_option("--out", f1_out, "Output prefix (CSV per ray + gnuplot script)")
        ->capture_default_str();

    // witness
    auto* wit = app.add_subcommand("witness", "Build a compactly supported witness field");
    double wi_c = 0.3, wi_eps = 0.1, wi_beta = 0.0;
    std::string wi_sign = "plus", wi_side = "plus", wi_out = "witness.csv";
    wit->add_option("--c", wi_c, "Curvature coupling in (0, 1/2)")->capture_default_str();
    wit->add_option("--sign", wi_sign, "Radial branch: plus or minus")->capture_default_str();
    wit->add_option("--epsilon", wi_eps, "Cutoff support radius")->capture_default_str();
    wit->add_option("--side", wi_side, "Side of the singular set: plus or minus")
        ->capture_default_str();
    wit->add_option("--beta", wi_beta, "Conformal slope: phi = beta x")->capture_default_str();
    wit->add_option("--out", wi_out, "Output CSV path")->capture_default_str();

    // check-witness
    auto* chk = app.add_subcommand("check-witness", "Run membership tests on a witness CSV");
    std::string cw_file, cw_out;
    chk->add_option("file", cw_file, "Witness CSV produced by this tool")->required();
    chk->add_option("--out", cw_out, "Also write the JSON to this path");

    // evolve
    auto* evo = app.add_subcommand("evolve", "Per-mode heat / Schroedinger evolution");
    std::string ev_mode = "heat", ev_bc = "friedrichs", ev_out = "run.csv";
    double ev_k = 0.75, ev_g1 = 0.0, ev_dt = 1e-4, ev_T = 0.5, ev_xmax = 6.0;
    double ev_blo = 0.5, ev_bhi = 1.5;
    int ev_stride = 50;
    evo->add_option("--mode", ev_mode, "heat or schrodinger")->capture_default_str();
    evo->add_option("--k", ev_k, "Inverse-square strength")->capture_default_str();
    evo->add_option("--g1", ev_g1, "Inverse-first-power strength")->capture_default_str();
    evo->add_option("--bc", ev_bc, "friedrichs, mix:<theta>, or farwall")->capture_default_str();
    evo->add_option("--dt", ev_dt, "Time step")->capture_default_str();
    evo->add_option("--T", ev_T, "Final time")->capture_default_str();
    evo->add_option("--x-max", ev_xmax, "Far-wall location")->capture_default_str();
    evo->add_option("--bump-lo", ev_blo, "Initial bump support, left edge")->capture_default_str();
    evo->add_option("--bump-hi", ev_bhi, "Initial bump support, right edge")->capture_default_str();
    evo->add_option("--stride", ev_stride, "Steps between snapshots")->capture_default_str();
    evo->add_option("--out", ev_out, "Snapshot CSV path (summary JSON written beside it)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*classify)
            return run_classify(cl_alpha, cl_c, cl_k, cl_g1, cl_numeric, cl_out);
        if (*region) return run_region_map(rm_alpha, rm_c, rm_out);
        if (*geo)
            return run_geodesics(ge_alpha, ge_x0, ge_y0, ge_px, ge_py, ge_tf, ge_dt, ge_out);
        if (*fig) return run_figure1(f1_rays, f1_tf, f1_dt, f1_out);
        if (*wit) return run_witness(wi_c, wi_sign, wi_eps, wi_side, wi_beta, wi_out);
        if (*chk) return run_check_witness(cw_file, cw_out);
        if (*evo)
            return run_evolve(ev_mode, ev_k, ev_g1, ev_bc, ev_dt, ev_T, ev_xmax, ev_blo, ev_bhi,
                              ev_stride, ev_out);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const gl::InconclusiveError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
