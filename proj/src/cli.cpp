#include "lapi/cli.hpp"

#include "lapi/bounds.hpp"
#include "lapi/errors.hpp"
#include "lapi/experiment.hpp"
#include "lapi/generators.hpp"
#include "lapi/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace lapi {

namespace {

/// "kind" or "kind:arg" as used by the --features / --anchors / --mode flags.
std::pair<std::string, std::string> split_spec(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) return {s, {}};
    return {s.substr(0, colon), s.substr(colon + 1)};
}

struct FeatureArgs {
    std::string features = "identity";
    std::string anchors = "all";
};

FeatureProjector projector_from_args(const FeatureArgs& args, std::size_t num_states) {
    ExperimentSpec spec;
    auto [fkind, farg] = split_spec(args.features);
    spec.features = fkind;
    if (fkind == "aggregation") {
        if (farg.empty()) throw InvalidInput("--features aggregation needs a group count, e.g. aggregation:3");
        spec.feature_groups = static_cast<std::size_t>(parse_int(farg, 0));
    } else if (fkind == "file") {
        spec.feature_path = farg;
    } else if (fkind != "identity") {
        throw InvalidInput("unknown --features '" + args.features + "'");
    }
    auto [akind, aarg] = split_spec(args.anchors);
    spec.anchors = akind;
    if (akind == "groups") {
        if (!aarg.empty()) spec.anchors_per_group = static_cast<std::size_t>(parse_int(aarg, 0));
    } else if (akind == "list") {
        set_field(spec, "anchor_list", aarg);
    } else if (akind != "all") {
        throw InvalidInput("unknown --anchors '" + args.anchors + "'");
    }
    return FeatureProjector(resolve_features(spec, num_states), resolve_anchors(spec, num_states));
}

Delta2Mode mode_from_arg(const std::string& mode, std::uint64_t seed) {
    auto [kind, arg] = split_spec(mode);
    if (kind == "enumerate") return Delta2Mode::enumerate_all();
    if (kind == "sample") {
        const long long n = arg.empty() ? 1000 : parse_int(arg, 0);
        if (n < 0) throw InvalidInput("sample count must be >= 0");
        return Delta2Mode::sample(static_cast<std::size_t>(n), seed);
    }
    throw InvalidInput("unknown --mode '" + mode + "' (enumerate | sample:N)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Approximate policy iteration with lookahead: experiments and bound checks", "lapi"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string config_path;
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--config", config_path, "Experiment config file (key = value)");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an MDP file (garnet | chain)");
    std::string gen_kind;
    std::size_t gen_states = 10, gen_actions = 2, gen_branching = 3;
    double gen_discount = 0.9, gen_rho = 0.0;
    std::string gen_file;
    gen->add_option("kind", gen_kind, "garnet or chain")->required()->check(CLI::IsMember({"garnet", "chain"}));
    gen->add_option("--states", gen_states, "Number of states");
    gen->add_option("--actions", gen_actions, "Number of actions (garnet)");
    gen->add_option("--branching", gen_branching, "Successors per (state, action) (garnet)");
    gen->add_option("--discount", gen_discount, "Discount factor");
    gen->add_option("--rho", gen_rho, "Cost noise half-width (garnet)");
    gen->add_option("--file", gen_file, "Write here instead of stdout");

    // solve
    auto* solve = app.add_subcommand("solve", "Exact optimal values and policy as CSV");
    std::string solve_mdp;
    double solve_tol = 1e-12;
    solve->add_option("--mdp", solve_mdp, "MDP file")->required();
    solve->add_option("--tol", solve_tol, "Sup-norm accuracy of J*");

    // run
    auto* run = app.add_subcommand("run", "Run an experiment described by --config");
    int run_jobs = 0;
    run->add_option("--jobs", run_jobs, "Parallel repetitions (overrides the config)");

    // bound
    auto* bound = app.add_subcommand("bound", "Print the asymptotic error bounds");
    std::optional<double> bound_delta2;
    std::optional<double> bound_alpha;
    int bound_h = 2;
    bound->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    std::string bound_mdp, bound_mode = "enumerate";
    FeatureArgs bound_feat;
    bound->add_option("--delta2", bound_delta2, "Function-approximation constant");
    bound->add_option("--alpha", bound_alpha, "Discount factor (defaults to the MDP's)");
    bound->add_option("--h", bound_h, "Lookahead depth H >= 2")->required();
    bound->add_option("--mdp", bound_mdp, "Compute delta2 from this MDP instead of --delta2");
    bound->add_option("--features", bound_feat.features, "identity | aggregation:G | file:PATH");
    bound->add_option("--anchors", bound_feat.anchors, "all | groups[:R] | list:i,j,...");
    bound->add_option("--mode", bound_mode, "enumerate | sample:N");

    // delta2
    auto* d2 = app.add_subcommand("delta2", "Report delta2 for an MDP and feature set");
    std::string d2_mdp, d2_mode = "enumerate";
    FeatureArgs d2_feat;
    d2->add_option("--mdp", d2_mdp, "MDP file")->required();
    d2->add_option("--features", d2_feat.features, "identity | aggregation:G | file:PATH");
    d2->add_option("--anchors", d2_feat.anchors, "all | groups[:R] | list:i,j,...");
    d2->add_option("--mode", d2_mode, "enumerate | sample:N");

    for (auto* sub : {gen, solve, run, bound, d2}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*gen) {
            const std::uint64_t s = seed.value_or(0);
            const Mdp mdp = gen_kind == "garnet"
                                ? generate_garnet(gen_states, gen_actions, gen_branching, s, gen_discount, gen_rho)
                                : generate_chain(gen_states, gen_discount);
            std::filesystem::path target = gen_file;
            if (target.empty() && !out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                target = std::filesystem::path(out_dir) / "mdp.txt";
            }
            if (target.empty())
                write_mdp(out, mdp);
            else
                save_mdp(mdp, target);
            return 0;
        }

        if (*solve) {
            const Mdp mdp = load_mdp(solve_mdp);
            const OptimalSolution sol = optimal_value(mdp, solve_tol);
            std::ostringstream csv;
            csv << "state,value,action\n";
            for (std::size_t i = 0; i < mdp.num_states(); ++i)
                csv << i << ',' << format_real(sol.value(static_cast<Eigen::Index>(i))) << ',' << sol.policy[i] << '\n';
            out << csv.str();
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                std::ofstream f(std::filesystem::path(out_dir) / "solution.csv");
                f << csv.str();
                if (!f) throw std::runtime_error("cannot write solution.csv");
            }
            return 0;
        }

        if (*run) {
            if (config_path.empty()) {
                err << "error: run requires --config <path>\n\n" << run->help();
                return 1;
            }
            ExperimentSpec spec = load_config(config_path);
            if (seed) spec.seed = *seed;
            if (!out_dir.empty()) spec.output_dir = out_dir;
            if (run_jobs > 0) spec.jobs = run_jobs;
            const ExperimentResult res = run_experiment(spec);
            (res.exit_code == 0 ? out : err) << res.message << '\n';
            return res.exit_code;
        }

        if (*bound) {
            double delta2 = 0.0;
            double alpha = 0.0;
            bool exact = true;
            if (!bound_mdp.empty()) {
                const Mdp mdp = load_mdp(bound_mdp);
                const FeatureProjector fp = projector_from_args(bound_feat, mdp.num_states());
                const Delta2Result r = delta2_estimate(mdp, fp, mode_from_arg(bound_mode, seed.value_or(0)));
                delta2 = r.delta2;
                exact = r.is_exact;
                alpha = bound_alpha.value_or(mdp.discount());
            } else {
                if (!bound_delta2 || !bound_alpha) {
                    err << "error: bound needs --delta2 and --alpha, or --mdp\n\n" << bound->help();
                    return 1;
                }
                delta2 = *bound_delta2;
                alpha = *bound_alpha;
            }
            out << "theorem1 " << format_real(theorem1_bound(delta2, alpha, bound_h)) << '\n';
            out << "theorem2 " << format_real(theorem2_bound(delta2, alpha, bound_h)) << '\n';
            if (!exact) out << "note: delta2 is a sampled lower bound; the bounds may be understated\n";
            return 0;
        }

        if (*d2) {
            const Mdp mdp = load_mdp(d2_mdp);
            const FeatureProjector fp = projector_from_args(d2_feat, mdp.num_states());
            const Delta2Result r = delta2_estimate(mdp, fp, mode_from_arg(d2_mode, seed.value_or(0)));
            out << "delta2 " << format_real(r.delta2) << '\n';
            out << "exact " << (r.is_exact ? "true" : "false") << '\n';
            out << "policies " << r.policies_checked << '\n';
            return 0;
        }
    } catch (const AssumptionViolation& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace lapi
