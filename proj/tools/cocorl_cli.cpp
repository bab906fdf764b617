#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cocorl/bounds.hpp"
#include "cocorl/errors.hpp"
#include "cocorl/experiment.hpp"
#include "cocorl/geometry.hpp"

using namespace cocorl;

namespace {

Vec parse_point(const std::string& s) {
    std::vector<double> xs;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            xs.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InvalidArgument("bad coordinate '" + item + "'");
        }
    }
    return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::vector<Vec> read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<Vec> pts;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::vector<double> xs;
        double x;
        while (ss >> x) xs.push_back(x);
        if (xs.empty()) continue;
        pts.push_back(Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size())));
        if (pts.back().size() != pts.front().size()) throw InvalidArgument("points file: ragged rows");
    }
    return pts;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint inference from demonstrations: experiments, bounds and polytope tools"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run an experiment sweep and write the results CSV plus a summary");
    std::string config_path, output;
    std::vector<std::string> overrides;
    run->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Override a config entry, key=value (repeatable)");
    run->add_option("--output", output, "Results CSV path (overrides the config's output)");

    // bound
    auto* bound = app.add_subcommand("bound", "Sample-complexity calculators");
    bound->require_subcommand(1);
    double delta = 0, beta = 0, gamma = 0, eps = 0, fv = 0;
    int d = 0, n = 0;
    std::uint64_t k = 0;
    std::string mode = "exact";

    auto* b_exact = bound->add_subcommand("exact", "Demos needed with exact-optimal experts");
    b_exact->add_option("--delta", delta, "Failure probability")->required();
    auto* ex_d = b_exact->add_option("--d", d, "Feature dimension");
    auto* ex_n = b_exact->add_option("--n", n, "Number of constraints");
    auto* ex_fv = b_exact->add_option("--fv", fv, "Vertex count used instead of the McMullen bound");
    ex_d->needs(ex_n);
    ex_n->needs(ex_d);
    ex_fv->excludes(ex_d)->excludes(ex_n);

    auto* b_boltz = bound->add_subcommand("boltzmann", "Demos needed with Boltzmann-rational experts");
    b_boltz->add_option("--delta", delta, "Failure probability")->required();
    b_boltz->add_option("--d", d, "Feature dimension")->required();
    auto* bz_n = b_boltz->add_option("--n", n, "Number of constraints");
    auto* bz_fv = b_boltz->add_option("--fv", fv, "Vertex count used instead of the McMullen bound");
    bz_fv->excludes(bz_n);
    b_boltz->add_option("--beta", beta, "Rationality")->required();
    b_boltz->add_option("--gamma", gamma, "Discount")->required();

    auto* b_traj = bound->add_subcommand("traj", "Trajectories per demo for epsilon-safety");
    b_traj->add_option("--d", d, "Feature dimension")->required();
    b_traj->add_option("--n", n, "Number of constraints")->required();
    b_traj->add_option("--k", k, "Number of demos")->required();
    b_traj->add_option("--delta", delta, "Failure probability")->required();
    b_traj->add_option("--eps", eps, "Allowed constraint excess")->required();
    b_traj->add_option("--gamma", gamma, "Discount")->required();

    auto* b_est = bound->add_subcommand("estimated", "Demos and trajectories with estimated feature expectations");
    b_est->add_option("--delta", delta, "Failure probability")->required();
    b_est->add_option("--d", d, "Feature dimension")->required();
    auto* es_n = b_est->add_option("--n", n, "Number of constraints");
    auto* es_fv = b_est->add_option("--fv", fv, "Vertex count used instead of the McMullen bound");
    es_fv->excludes(es_n);
    b_est->add_option("--eps", eps, "Allowed constraint excess")->required();
    b_est->add_option("--gamma", gamma, "Discount")->required();
    b_est->add_option("--mode", mode, "Demo model")->check(CLI::IsMember({"exact", "boltzmann"}));
    b_est->add_option("--beta", beta, "Rationality (boltzmann mode)");

    // inspect-polytope
    auto* inspect = app.add_subcommand("inspect-polytope", "Print a polytope and optionally test membership");
    std::string poly_file, points_file, point;
    auto* o_file = inspect->add_option("--file", poly_file, "Polytope in the text export format")->check(CLI::ExistingFile);
    auto* o_points = inspect->add_option("--points", points_file, "Whitespace-separated points, one per line; their hull is built")
                         ->check(CLI::ExistingFile);
    o_file->excludes(o_points);
    inspect->add_option("--point", point, "Comma-separated point to test for membership");

    // cem-vs-lp
    auto* cemcmd = app.add_subcommand("cem-vs-lp", "Constrained CEM against the LP optimum on single-state problems");
    int cem_d = 3, cem_n = 4, seeds = 5;
    CemConfig cem;
    double init_std = 1.0;
    cemcmd->add_option("--d", cem_d, "Dimension");
    cemcmd->add_option("--n", cem_n, "Number of constraints");
    cemcmd->add_option("--seeds", seeds, "Seeds 0..seeds-1");
    cemcmd->add_option("--iters", cem.n_iter, "CEM iterations");
    cemcmd->add_option("--samples", cem.n_samp, "Candidates per iteration");
    cemcmd->add_option("--elite", cem.n_elite, "Elite count");
    cemcmd->add_option("--init-std", init_std, "Initial standard deviation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            std::ifstream in(config_path);
            auto cfg = parse_config(in);
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
                apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (!output.empty()) cfg.output = output;
            if (cfg.output.empty()) throw InvalidArgument("no output path: set 'output' or pass --output");
            cfg.validate();
            const auto rows = run_experiment(cfg);
            emit_results(rows, cfg.output);
            int failed = 0;
            for (const auto& r : rows) failed += !r.error.empty();
            std::cout << rows.size() << " rows written to " << cfg.output << " (" << failed << " failed)\n";
            std::cout << "summary: " << summary_path(cfg.output) << "\n";
        } else if (*b_exact) {
            if (ex_fv->count() == 0 && ex_d->count() == 0) throw CLI::RequiredError("--d/--n or --fv");
            const auto r = ex_fv->count() ? sample_bound_exact_fv(delta, fv) : sample_bound_exact(delta, d, n);
            if (ex_fv->count()) std::cout << "exact delta=" << fmt(delta) << " fv=" << fmt(fv);
            else std::cout << "exact delta=" << fmt(delta) << " d=" << d << " n=" << n;
            std::cout << "\nk " << r << "\n";
        } else if (*b_boltz) {
            if (bz_fv->count() == 0 && bz_n->count() == 0) throw CLI::RequiredError("--n or --fv");
            const auto r = bz_fv->count() ? sample_bound_boltzmann_fv(delta, d, fv, beta, gamma)
                                          : sample_bound_boltzmann(delta, d, n, beta, gamma);
            std::cout << "boltzmann delta=" << fmt(delta) << " d=" << d;
            if (bz_fv->count()) std::cout << " fv=" << fmt(fv);
            else std::cout << " n=" << n;
            std::cout << " beta=" << fmt(beta) << " gamma=" << fmt(gamma) << "\nk " << r << "\n";
        } else if (*b_traj) {
            const auto r = traj_bound_eps_safety(d, n, k, delta, eps, gamma);
            std::cout << "traj d=" << d << " n=" << n << " k=" << k << " delta=" << fmt(delta) << " eps=" << fmt(eps)
                      << " gamma=" << fmt(gamma) << "\nn_traj " << r << "\n";
        } else if (*b_est) {
            if (es_fv->count() == 0 && es_n->count() == 0) throw CLI::RequiredError("--n or --fv");
            const DemoModel dm = mode == "boltzmann" ? DemoModel::Boltzmann : DemoModel::ExactDemos;
            const auto r = es_fv->count() ? bounds_estimated_fv(delta, d, fv, eps, gamma, dm, beta)
                                          : bounds_estimated(delta, d, n, eps, gamma, dm, beta);
            std::cout << "estimated delta=" << fmt(delta) << " d=" << d;
            if (es_fv->count()) std::cout << " fv=" << fmt(fv);
            else std::cout << " n=" << n;
            std::cout << " eps=" << fmt(eps) << " gamma=" << fmt(gamma) << " mode=" << mode;
            if (dm == DemoModel::Boltzmann) std::cout << " beta=" << fmt(beta);
            std::cout << "\nk " << r.k << "\nn_traj " << r.n_traj << "\n";
        } else if (*inspect) {
            Polytope p;
            if (o_file->count()) {
                std::ifstream in(poly_file);
                p = read_polytope(in);
            } else if (o_points->count()) {
                p = convex_hull(read_points(points_file));
            } else {
                throw CLI::RequiredError("--file or --points");
            }
            write_polytope(std::cout, p);
            std::cout << "dim " << p.dim() << " halfspaces " << p.num_halfspaces() << " effective_dim "
                      << p.effective_dim << (p.empty ? " empty" : "") << "\n";
            if (!point.empty()) {
                const Vec x = parse_point(point);
                if (x.size() != p.dim()) throw InvalidArgument("point dimension does not match the polytope");
                std::cout << "contains " << (contains(p, x) ? "yes" : "no") << "\n";
            }
        } else if (*cemcmd) {
            cem.init_std = Vec::Constant(cem_d, init_std);
            std::cout << "seed,lp_value,cem_value,ratio,max_violation\n";
            for (int s = 0; s < seeds; ++s) {
                const auto c = compare_cem_lp(cem_d, cem_n, static_cast<std::uint64_t>(s), cem);
                std::cout << s << "," << fmt(c.lp_value) << "," << fmt(c.cem_value) << "," << fmt(c.ratio) << ","
                          << fmt(c.max_violation) << "\n";
            }
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
