// Command-line surface for the blender laboratory: certificates, exponent
// selection, renormalization reports, chain boosting, and the sink census.
// Exit codes: 0 success, 2 verified-negative (gap / infeasible), 1 error,
// 64 usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "blenderlab/json_io.hpp"

using namespace blenderlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;
constexpr int kExitUsage = 64;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int env_workers(int fallback) {
    if (const char* w = std::getenv("BLENDERLAB_WORKERS")) {
        const int n = std::atoi(w);
        if (n >= 1) return n;
    }
    return fallback;
}

std::string out_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir + "/" + name;
}

PlanarMap henon_family(double b) {
    // (x, y) -> (1 - a x^2 + y, b x), parameter a.
    return PlanarMap(
        Expr::add(Expr::sub(Expr::constant(1.0),
                            Expr::mul(Expr::var_a(), Expr::ipow_of(Expr::var_x(), 2))),
                  Expr::var_y()),
        Expr::mul(Expr::constant(b), Expr::var_x()));
}

PlanarMap henon_inverse(double b) {
    // (X, Y) -> (Y/b, X - 1 + a (Y/b)^2)
    ExprPtr ynb = Expr::mul(Expr::constant(1.0 / b), Expr::var_y());
    return PlanarMap(ynb, Expr::add(Expr::sub(Expr::var_x(), Expr::constant(1.0)),
                                    Expr::mul(Expr::var_a(), Expr::ipow_of(ynb, 2))));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blenderlab: covering and hyperbolicity certificates for chart-model "
                 "heterocycle dynamics"};
    app.require_subcommand(1);

    std::string out_dir;
    app.add_option("--out", out_dir, "output directory (default: current)");

    // blender-check
    auto* sc_blender = app.add_subcommand("blender-check", "1D covering certificate");
    double bc_delta = 1.5, bc_perturb = 0.0, bc_eta = 0.0;
    sc_blender->add_option("--delta-contraction", bc_delta, "expansion Delta > 1");
    sc_blender->add_option("--delta-perturb", bc_perturb, "perturbation budget");
    sc_blender->add_option("--eta", bc_eta, "activation trim");

    // parablender-check
    auto* sc_para = app.add_subcommand("parablender-check", "jet-space covering certificate");
    double pb_delta = 1.5, pb_perturb = 0.0, pb_A = 0.4;
    int pb_order = 1;
    std::vector<double> pb_B;
    sc_para->add_option("--delta-contraction", pb_delta, "Delta > 1");
    sc_para->add_option("--delta-perturb", pb_perturb, "perturbation budget");
    sc_para->add_option("--order", pb_order, "jet order r");
    sc_para->add_option("--box-a", pb_A, "order-0 half-width A");
    sc_para->add_option("--box-b", pb_B, "half-widths B_1..B_r (default: sufficient rule)");

    // exponents
    auto* sc_exp = app.add_subcommand("exponents", "select renormalization exponents");
    std::string exp_config;
    double exp_delta = 1.013637, exp_eps = 0.15;
    int exp_cap = 2000, exp_order = 2;
    sc_exp->add_option("--config", exp_config, "model config JSON")->required();
    sc_exp->add_option("--delta", exp_delta, "target contraction Delta");
    sc_exp->add_option("--eps", exp_eps, "tolerance eps");
    sc_exp->add_option("--cap", exp_cap, "search cap on m");
    sc_exp->add_option("--order", exp_order, "jet order r");

    // renorm
    auto* sc_renorm = app.add_subcommand("renorm", "renormalize and measure Cr distance");
    std::string rn_config;
    double rn_delta = 1.013637, rn_eps = 0.15;
    int rn_cap = 2000, rn_order = 2, rn_grid = 33;
    sc_renorm->add_option("--config", rn_config, "model config JSON")->required();
    sc_renorm->add_option("--delta", rn_delta, "target contraction Delta");
    sc_renorm->add_option("--eps", rn_eps, "tolerance eps");
    sc_renorm->add_option("--cap", rn_cap, "search cap on m");
    sc_renorm->add_option("--order", rn_order, "jet order r");
    sc_renorm->add_option("--grid", rn_grid, "Cr distance grid");

    // cantor
    auto* sc_cantor = app.add_subcommand("cantor", "expanding Cantor pair certificate");
    std::string ct_config;
    int ct_n = 6, ct_N = 8;
    double ct_eta = 0.25;
    sc_cantor->add_option("--config", ct_config, "model config JSON")->required();
    sc_cantor->add_option("--n", ct_n, "saddle excursion length n");
    sc_cantor->add_option("--N", ct_N, "source contraction length N");
    sc_cantor->add_option("--eta", ct_eta, "cone aperture for the certificates");

    // horseshoe
    auto* sc_horse = app.add_subcommand("horseshoe", "Markov crossing certificate");
    std::string hs_config;
    int hs_n = 5, hs_N = 8;
    double hs_eps = 0.1;
    sc_horse->add_option("--config", hs_config, "model config JSON")->required();
    sc_horse->add_option("--n", hs_n, "source contraction length n");
    sc_horse->add_option("--N", hs_N, "saddle excursion length N");
    sc_horse->add_option("--eps", hs_eps, "box half-height eps");

    // chain-boost
    auto* sc_chain = app.add_subcommand("chain-boost", "flatness-boosting cancellation");
    std::string cb_config;
    double cb_tol = 0.02;
    int cb_cap = 40;
    sc_chain->add_option("--config", cb_config, "chain model JSON")->required();
    sc_chain->add_option("--tol", cb_tol, "log-distance tolerance");
    sc_chain->add_option("--cap", cb_cap, "search cap on (n, m)");

    // sink-census
    auto* sc_census = app.add_subcommand("sink-census", "sink census over a parameter sweep");
    double cs_amin = 0.2, cs_amax = 0.2, cs_b = 0.3;
    int cs_asteps = 1, cs_max_period = 2, cs_seed_grid = 5, cs_workers = 1;
    std::uint64_t cs_seed = 1234567;
    sc_census->add_option("--a-min", cs_amin, "sweep start");
    sc_census->add_option("--a-max", cs_amax, "sweep end");
    sc_census->add_option("--a-steps", cs_asteps, "sweep points");
    sc_census->add_option("--b", cs_b, "Henon b");
    sc_census->add_option("--max-period", cs_max_period, "max orbit period");
    sc_census->add_option("--seed-grid", cs_seed_grid, "Newton seed grid per axis");
    sc_census->add_option("--seed", cs_seed, "RNG seed");
    sc_census->add_option("--workers", cs_workers, "worker threads");

    // tangency
    auto* sc_tang = app.add_subcommand("tangency", "homoclinic tangency sweep (Henon family)");
    double tg_amin = 1.0, tg_amax = 1.4, tg_b = 0.3, tg_seedx = -1.0, tg_seedy = -0.3;
    int tg_steps = 20, tg_segments = 6;
    sc_tang->add_option("--a-min", tg_amin, "sweep start");
    sc_tang->add_option("--a-max", tg_amax, "sweep end");
    sc_tang->add_option("--steps", tg_steps, "sweep points");
    sc_tang->add_option("--b", tg_b, "Henon b");
    sc_tang->add_option("--seed-x", tg_seedx, "saddle seed x");
    sc_tang->add_option("--seed-y", tg_seedy, "saddle seed y");
    sc_tang->add_option("--segments", tg_segments, "globalization sweeps");

    // misiurewicz
    auto* sc_mis = app.add_subcommand("misiurewicz", "critical orbit landing check");
    double ms_a = -2.0;
    int ms_max_iter = 1000;
    sc_mis->add_option("--a", ms_a, "quadratic parameter");
    sc_mis->add_option("--max-iter", ms_max_iter, "iteration cap");

    // manifold
    auto* sc_mani = app.add_subcommand("manifold", "invariant manifold parameterization");
    double mf_a = 0.2, mf_b = 0.3, mf_x = 1.0, mf_y = 0.3;
    int mf_period = 1, mf_order = 10;
    std::string mf_flavor = "stable";
    sc_mani->add_option("--a", mf_a, "Henon a");
    sc_mani->add_option("--b", mf_b, "Henon b");
    sc_mani->add_option("--x", mf_x, "seed x");
    sc_mani->add_option("--y", mf_y, "seed y");
    sc_mani->add_option("--period", mf_period, "orbit period");
    sc_mani->add_option("--order", mf_order, "Taylor order");
    sc_mani->add_option("--flavor", mf_flavor, "stable|unstable|strong-unstable|weak-unstable");

    // ifs-cloud
    auto* sc_ifs = app.add_subcommand("ifs-cloud", "chaos-game point cloud");
    std::vector<double> ifs_maps{0.5, 0.5, 0.5, -0.5};
    int ifs_iterations = 100000, ifs_burn = 100;
    std::uint64_t ifs_seed = 42;
    sc_ifs->add_option("--maps", ifs_maps, "flat list slope,offset per map");
    sc_ifs->add_option("--iterations", ifs_iterations, "total iterations");
    sc_ifs->add_option("--burn-in", ifs_burn, "discarded iterations");
    sc_ifs->add_option("--seed", ifs_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return kExitOk;  // --help
        std::cerr << app.help() << "\n" << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*sc_blender) {
            Covering1D cert = verify_blender_1d(bc_delta, bc_perturb, bc_eta);
            write_file_atomic(out_path(out_dir, "covering.json"), serialize_covering(cert));
            write_file_atomic(out_path(out_dir, "boxes.csv"), covering_pieces_csv(cert));
            std::cout << (cert.covered ? "covered" : "gap") << ", margin " << cert.margin
                      << "\n";
            return cert.covered ? kExitOk : kExitNegative;
        }
        if (*sc_para) {
            JetBox box;
            box.A = pb_A;
            if (pb_B.empty()) {
                double prev = pb_A;
                for (int k = 1; k <= pb_order; ++k) {
                    prev = prev * k / (pb_delta - 1.0);
                    box.B.push_back(prev);
                }
            } else {
                box.B = pb_B;
            }
            JetCoveringCertificate cert =
                verify_parablender_jets(pb_delta, pb_order, pb_perturb, box);
            write_file_atomic(out_path(out_dir, "jet_covering.json"),
                              serialize_jet_covering(cert));
            std::cout << (cert.covered ? "covered" : "gap") << ", margin " << cert.margin
                      << "\n";
            return cert.covered ? kExitOk : kExitNegative;
        }
        if (*sc_exp) {
            HeteroModel model = build_model(parse_model_config(read_file(exp_config)));
            try {
                RenormPlan plan = select_exponents(model, exp_delta, exp_eps, exp_cap, exp_order);
                tune_unfolding(plan, model);
                write_file_atomic(out_path(out_dir, "plan.json"), serialize_plan(plan));
                std::cout << "plan: n(-,+) = (" << plan.n_minus << ", " << plan.n_plus
                          << "), m(-,+) = (" << plan.m_minus << ", " << plan.m_plus
                          << "), Delta = " << plan.Delta << "\n";
                return kExitOk;
            } catch (const SearchExhaustedError& e) {
                std::cout << "infeasible: " << e.what() << "\n";
                return kExitNegative;
            } catch (const InfeasiblePlanError& e) {
                std::cout << "infeasible: " << e.what() << "\n";
                return kExitNegative;
            }
        }
        if (*sc_renorm) {
            HeteroModel model = build_model(parse_model_config(read_file(rn_config)));
            RenormPlan plan = select_exponents(model, rn_delta, rn_eps, rn_cap, rn_order);
            HeteroModel tuned = tune_unfolding(plan, model);
            RenormalizedPair pair = renormalize(tuned, plan);
            const AffineTarget tp = AffineTarget::tuned(tuned.config.s_x, plan.Delta_plus,
                                                        plan.Delta, +1);
            const AffineTarget tm = AffineTarget::tuned(tuned.config.s_x, plan.Delta,
                                                        plan.Delta, -1);
            CrDistanceReport rp = cr_distance(*pair.plus, tp, rn_order, rn_grid);
            CrDistanceReport rm = cr_distance(*pair.minus, tm, rn_order, rn_grid);
            write_file_atomic(out_path(out_dir, "plan.json"), serialize_plan(plan));
            write_file_atomic(out_path(out_dir, "cr_plus.json"), serialize_cr_report(rp));
            write_file_atomic(out_path(out_dir, "cr_minus.json"), serialize_cr_report(rm));
            std::cout << "Cr sup: plus " << rp.overall << ", minus " << rm.overall << "\n";
            return kExitOk;
        }
        if (*sc_cantor) {
            HeteroModel model = build_model(parse_model_config(read_file(ct_config)));
            CantorPair pair = build_cantor_pair(model, ct_n, ct_N);
            WordMap w1(&pair.model.system, pair.word1);
            WordMap w2(&pair.model.system, pair.word2);
            ConeCertificate c1 = certify_cone(w1, pair.W, ct_eta);
            ConeCertificate c2 = certify_cone(w2, pair.W, ct_eta);
            write_file_atomic(out_path(out_dir, "cantor.json"), serialize_cantor(pair));
            write_file_atomic(out_path(out_dir, "cone1.json"), serialize_cone(c1));
            write_file_atomic(out_path(out_dir, "cone2.json"), serialize_cone(c2));
            std::cout << "disjointness margin " << pair.disjointness_margin << ", cones "
                      << (c1.certified && c2.certified ? "certified" : "FAILED") << "\n";
            return (c1.certified && c2.certified) ? kExitOk : kExitNegative;
        }
        if (*sc_horse) {
            HeteroModel model = build_model(parse_model_config(read_file(hs_config)));
            try {
                HorseshoeReport rep = build_horseshoe(model, hs_n, hs_N, hs_eps);
                write_file_atomic(out_path(out_dir, "horseshoe.json"),
                                  serialize_horseshoe(rep));
                write_file_atomic(out_path(out_dir, "horseshoe_boxes.csv"),
                                  box_corners_csv(rep.B, rep.image));
                std::cout << "crossing verified, saddle multiplier "
                          << rep.vertical_multiplier << "\n";
                return kExitOk;
            } catch (const PreconditionError& e) {
                std::cout << "precondition: " << e.what() << "\n";
                return kExitNegative;
            }
        }
        if (*sc_chain) {
            ChainModel chain = parse_chain_model(read_file(cb_config));
            try {
                FlatnessReport rep = boost_flatness(chain, cb_tol, cb_cap);
                write_file_atomic(out_path(out_dir, "flatness.json"),
                                  serialize_flatness(rep));
                std::cout << "(n, m) = (" << rep.n << ", " << rep.m << "), achieved order "
                          << rep.achieved_order << "\n";
                return kExitOk;
            } catch (const SearchExhaustedError& e) {
                std::cout << "search exhausted: " << e.what() << "\n";
                return kExitNegative;
            }
        }
        if (*sc_census) {
            std::vector<double> grid;
            for (int i = 0; i < cs_asteps; ++i)
                grid.push_back(cs_asteps == 1
                                   ? cs_amin
                                   : cs_amin + (cs_amax - cs_amin) * i / (cs_asteps - 1));
            CensusOptions opts;
            opts.max_period = cs_max_period;
            opts.seed_grid = cs_seed_grid;
            opts.seed = cs_seed;
            opts.workers = env_workers(cs_workers);
            CensusResult res = sink_census(henon_family(cs_b), grid, opts);
            write_file_atomic(out_path(out_dir, "census.csv"), census_csv(res));
            std::cout << res.records.size() << " sinks over " << grid.size()
                      << " parameters\n";
            return kExitOk;
        }
        if (*sc_tang) {
            PlanarMap fam = henon_family(tg_b);
            PlanarMap fam_inv = henon_inverse(tg_b);
            CurvePairProvider provider = manifold_curve_provider(
                fam, {tg_seedx, tg_seedy}, 1, tg_segments, 10, 0.0, &fam_inv);
            TangencyScan scan = detect_tangency(provider, tg_amin, tg_amax, tg_steps, 1e-6,
                                                "unstable vs stable");
            write_file_atomic(out_path(out_dir, "tangencies.json"),
                              serialize_tangencies(scan));
            std::cout << scan.records.size() << " tangency records, "
                      << scan.skipped_parameters.size() << " skipped parameters\n";
            return kExitOk;
        }
        if (*sc_mis) {
            MisiurewiczReport rep = misiurewicz_check(ms_a, ms_max_iter);
            write_file_atomic(out_path(out_dir, "misiurewicz.json"),
                              serialize_misiurewicz(rep));
            if (rep.misiurewicz)
                std::cout << "landing time " << rep.landing_time << ", period " << rep.period
                          << ", multiplier " << rep.multiplier << "\n";
            else
                std::cout << (rep.landed ? "landed on a non-repelling point" : "inconclusive")
                          << "\n";
            return rep.misiurewicz ? kExitOk : kExitNegative;
        }
        if (*sc_mani) {
            BoundMap f(henon_family(mf_b), mf_a);
            PeriodicOrbit orbit = find_periodic_orbit(f, mf_period, {mf_x, mf_y});
            ManifoldFlavor flavor = ManifoldFlavor::Stable;
            if (mf_flavor == "unstable") flavor = ManifoldFlavor::Unstable;
            else if (mf_flavor == "strong-unstable") flavor = ManifoldFlavor::StrongUnstable;
            else if (mf_flavor == "weak-unstable") flavor = ManifoldFlavor::WeakUnstable;
            else if (mf_flavor != "stable") throw ConfigError("unknown flavor " + mf_flavor);
            ManifoldCurve curve = local_manifold(f, orbit, flavor, mf_order);
            std::string csv = "t,x,y\n";
            char buf[128];
            for (int i = 0; i <= 200; ++i) {
                const double t = -curve.validity_radius +
                                 2.0 * curve.validity_radius * i / 200.0;
                const Vec2 p = curve.eval(t);
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, p.x, p.y);
                csv += buf;
            }
            write_file_atomic(out_path(out_dir, "manifold.csv"), csv);
            std::cout << "validity radius " << curve.validity_radius << ", multiplier "
                      << curve.mu << "\n";
            return kExitOk;
        }
        if (*sc_ifs) {
            if (ifs_maps.size() % 2 != 0) throw ConfigError("--maps expects slope,offset pairs");
            Ifs1D ifs;
            for (size_t i = 0; i + 1 < ifs_maps.size(); i += 2)
                ifs.maps.emplace_back(ifs_maps[i], ifs_maps[i + 1]);
            std::vector<double> cloud = ifs_attract_1d(ifs, ifs_iterations, ifs_burn, ifs_seed);
            std::string csv = "y\n";
            char buf[64];
            for (double y : cloud) {
                std::snprintf(buf, sizeof(buf), "%.17g\n", y);
                csv += buf;
            }
            write_file_atomic(out_path(out_dir, "points.csv"), csv);
            std::cout << cloud.size() << " points\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
