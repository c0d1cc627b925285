#include "lapi/experiment.hpp"

#include "lapi/errors.hpp"
#include "lapi/generators.hpp"
#include "lapi/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

namespace lapi {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& v, std::size_t line) {
    std::uint64_t x = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size())
        throw ParseError(line, "expected a non-negative integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, std::size_t line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError(line, "expected true or false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v, std::size_t line) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream ss(s);
    std::vector<int> out;
    for (std::string tok; ss >> tok;) out.push_back(static_cast<int>(parse_int(tok, line)));
    return out;
}

std::string join(const std::vector<int>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
    return s;
}

struct Field {
    const char* name;
    std::function<void(ExperimentSpec&, const std::string&, std::size_t)> set;
    std::function<std::string(const ExperimentSpec&)> get;
};

template <typename T>
Field real_field(const char* name, T ExperimentSpec::*m) {
    return {name, [m](ExperimentSpec& s, const std::string& v, std::size_t l) { s.*m = parse_real(v, l); },
            [m](const ExperimentSpec& s) { return format_real(s.*m); }};
}

template <typename T>
Field int_field(const char* name, T ExperimentSpec::*m) {
    return {name,
            [m](ExperimentSpec& s, const std::string& v, std::size_t l) {
                if constexpr (std::is_unsigned_v<T>)
                    s.*m = static_cast<T>(parse_u64(v, l));
                else
                    s.*m = static_cast<T>(parse_int(v, l));
            },
            [m](const ExperimentSpec& s) { return std::to_string(s.*m); }};
}

Field string_field(const char* name, std::string ExperimentSpec::*m, std::vector<std::string> allowed = {}) {
    return {name,
            [m, allowed, name](ExperimentSpec& s, const std::string& v, std::size_t l) {
                if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
                    std::string opts;
                    for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
                    throw ParseError(l, std::string(name) + " must be one of " + opts + ", got '" + v + "'");
                }
                s.*m = v;
            },
            [m](const ExperimentSpec& s) { return s.*m; }};
}

Field bool_field(const char* name, bool ExperimentSpec::*m) {
    return {name, [m](ExperimentSpec& s, const std::string& v, std::size_t l) { s.*m = parse_bool(v, l); },
            [m](const ExperimentSpec& s) { return std::string(s.*m ? "true" : "false"); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        string_field("mdp_source", &ExperimentSpec::mdp_source, {"file", "garnet", "chain"}),
        string_field("mdp_path", &ExperimentSpec::mdp_path),
        int_field("num_states", &ExperimentSpec::num_states),
        int_field("num_actions", &ExperimentSpec::num_actions),
        int_field("branching", &ExperimentSpec::branching),
        int_field("mdp_seed", &ExperimentSpec::mdp_seed),
        real_field("discount", &ExperimentSpec::discount),
        real_field("cost_noise", &ExperimentSpec::cost_noise),
        string_field("features", &ExperimentSpec::features, {"identity", "aggregation", "file"}),
        int_field("feature_groups", &ExperimentSpec::feature_groups),
        string_field("feature_path", &ExperimentSpec::feature_path),
        string_field("anchors", &ExperimentSpec::anchors, {"all", "groups", "list"}),
        {"anchor_list",
         [](ExperimentSpec& s, const std::string& v, std::size_t l) { s.anchor_list = parse_int_list(v, l); },
         [](const ExperimentSpec& s) { return join(s.anchor_list); }},
        int_field("anchors_per_group", &ExperimentSpec::anchors_per_group),
        string_field("algorithm", &ExperimentSpec::algorithm, {"least_squares", "gradient_descent"}),
        int_field("lookahead_h", &ExperimentSpec::lookahead_h),
        int_field("iterations", &ExperimentSpec::iterations),
        string_field("gamma_schedule", &ExperimentSpec::gamma_schedule, {"harmonic", "constant"}),
        real_field("gamma_c", &ExperimentSpec::gamma_c),
        real_field("gamma_k0", &ExperimentSpec::gamma_k0),
        real_field("gamma_value", &ExperimentSpec::gamma_value),
        real_field("beta", &ExperimentSpec::beta),
        string_field("eta_schedule", &ExperimentSpec::eta_schedule, {"linear", "log", "constant"}),
        int_field("eta_a", &ExperimentSpec::eta_a),
        int_field("eta_b", &ExperimentSpec::eta_b),
        int_field("truncation_len", &ExperimentSpec::truncation_len),
        real_field("tail_tol", &ExperimentSpec::tail_tol),
        int_field("trajectories_per_state", &ExperimentSpec::trajectories_per_state),
        int_field("seed", &ExperimentSpec::seed),
        bool_field("allow_diagnostic_schedules", &ExperimentSpec::allow_diagnostic_schedules),
        bool_field("diagnostics", &ExperimentSpec::diagnostics),
        string_field("delta2_mode", &ExperimentSpec::delta2_mode, {"enumerate", "sample", "none"}),
        int_field("delta2_samples", &ExperimentSpec::delta2_samples),
        int_field("delta2_seed", &ExperimentSpec::delta2_seed),
        string_field("output_dir", &ExperimentSpec::output_dir),
        int_field("repetitions", &ExperimentSpec::repetitions),
        int_field("jobs", &ExperimentSpec::jobs),
    };
    return table;
}

}  // namespace

void set_field(ExperimentSpec& spec, const std::string& key, const std::string& value, std::size_t line) {
    for (const auto& f : fields())
        if (key == f.name) {
            f.set(spec, value, line);
            return;
        }
    throw ParseError(line, "unknown config key '" + key + "'");
}

ExperimentSpec parse_config(std::istream& in) {
    ExperimentSpec spec;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "missing key before '='");
        set_field(spec, key, value, lineno);
    }
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
    try {
        return parse_config(in);
    } catch (const ParseError& e) {
        throw e.in_file(path.string());
    }
}

void write_config(std::ostream& out, const ExperimentSpec& spec) {
    for (const auto& f : fields()) out << f.name << " = " << f.get(spec) << '\n';
}

Eigen::MatrixXd resolve_features(const ExperimentSpec& spec, std::size_t num_states) {
    if (spec.features == "identity") return identity_features(num_states);
    if (spec.features == "aggregation") return aggregation_features(num_states, spec.feature_groups);
    if (spec.features == "file") {
        Eigen::MatrixXd phi = load_features(spec.feature_path);
        if (static_cast<std::size_t>(phi.rows()) != num_states)
            throw InvalidInput("feature file '" + spec.feature_path + "' has " + std::to_string(phi.rows()) +
                               " rows but the MDP has " + std::to_string(num_states) + " states");
        return phi;
    }
    throw InvalidInput("unknown feature spec '" + spec.features + "'");
}

std::vector<int> resolve_anchors(const ExperimentSpec& spec, std::size_t num_states) {
    if (spec.anchors == "all") return all_states(num_states);
    if (spec.anchors == "groups") {
        const std::size_t groups = spec.features == "aggregation" ? spec.feature_groups : num_states;
        return group_representatives(num_states, groups, spec.anchors_per_group);
    }
    if (spec.anchors == "list") return spec.anchor_list;
    throw InvalidInput("unknown anchor spec '" + spec.anchors + "'");
}

namespace {

Mdp resolve_mdp(const ExperimentSpec& spec) {
    if (spec.mdp_source == "file") return load_mdp(spec.mdp_path);
    if (spec.mdp_source == "garnet")
        return generate_garnet(spec.num_states, spec.num_actions, spec.branching, spec.mdp_seed, spec.discount,
                               spec.cost_noise);
    if (spec.mdp_source == "chain") return generate_chain(spec.num_states, spec.discount);
    throw InvalidInput("unknown mdp_source '" + spec.mdp_source + "'");
}

RunConfig resolve_run(const ExperimentSpec& spec, const Mdp& mdp, const std::vector<int>& anchors) {
    RunConfig cfg;
    cfg.algorithm = spec.algorithm == "gradient_descent" ? Algorithm::gradient_descent : Algorithm::least_squares;
    cfg.lookahead_h = spec.lookahead_h;
    cfg.iterations = spec.iterations;
    cfg.gamma = spec.gamma_schedule == "constant" ? Schedule::constant(spec.gamma_value)
                                                  : Schedule::harmonic(spec.gamma_c, spec.gamma_k0);
    cfg.gd.beta = spec.beta;
    if (cfg.algorithm == Algorithm::gradient_descent) {
        if (spec.eta_schedule == "linear")
            cfg.gd.eta = EtaSchedule::linear(spec.eta_a, spec.eta_b);
        else if (spec.eta_schedule == "log")
            cfg.gd.eta = EtaSchedule::log(spec.eta_a);
        else
            cfg.gd.eta = EtaSchedule::constant(spec.eta_a);
    }
    cfg.rollout.truncation_len =
        spec.truncation_len > 0 ? spec.truncation_len : default_truncation(mdp.discount(), spec.tail_tol);
    cfg.rollout.trajectories_per_state = spec.trajectories_per_state;
    cfg.rollout.seed = spec.seed;
    cfg.anchors = anchors;
    cfg.seed = spec.seed;
    cfg.allow_diagnostic_schedules = spec.allow_diagnostic_schedules;
    cfg.diagnostics = spec.diagnostics;
    return cfg;
}

}  // namespace

ResolvedExperiment resolve(const ExperimentSpec& spec) {
    if (spec.repetitions < 1) throw InvalidInput("repetitions must be >= 1");
    if (spec.jobs < 1) throw InvalidInput("jobs must be >= 1");
    Mdp mdp = resolve_mdp(spec);
    std::vector<int> anchors = resolve_anchors(spec, mdp.num_states());
    FeatureProjector fp(resolve_features(spec, mdp.num_states()), anchors);
    RunConfig run = resolve_run(spec, mdp, anchors);
    return {std::move(mdp), std::move(fp), std::move(run)};
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
    out << "k,gamma_k,sup_error,bellman_residual,noise_sup,policy_hash\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& it : record.iterations) {
        out << it.k << ',' << format_real(it.gamma) << ',' << format_real(it.sup_error) << ','
            << format_real(it.bellman_residual) << ',' << format_real(it.noise ? it.noise->sup_norm : nan) << ','
            << policy_hash(it.policy) << '\n';
    }
}

std::vector<RunCsvRow> read_run_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || trim(line) != "k,gamma_k,sup_error,bellman_residual,noise_sup,policy_hash")
        throw ParseError(1, "unexpected run CSV header");
    std::vector<RunCsvRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(trim(c));
        if (cells.size() != 6) throw ParseError(lineno, "expected 6 columns");
        auto real = [&](const std::string& c) {
            return c == "nan" || c == "-nan" ? std::numeric_limits<double>::quiet_NaN() : parse_real(c, lineno);
        };
        RunCsvRow r;
        r.k = static_cast<std::size_t>(parse_u64(cells[0], lineno));
        r.gamma_k = real(cells[1]);
        r.sup_error = real(cells[2]);
        r.bellman_residual = real(cells[3]);
        r.noise_sup = real(cells[4]);
        r.policy_hash = parse_u64(cells[5], lineno);
        rows.push_back(r);
    }
    return rows;
}

void write_policy_csv(std::ostream& out, const RunRecord& record) {
    out << "k,actions\n";
    const std::size_t n = record.iterations.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (k % kPolicyStride != 0 && k + 1 != n) continue;
        out << k << ',' << join(record.iterations[k].policy.actions) << '\n';
    }
}

namespace {

std::string flag(const std::optional<BoundReport>& b, bool BoundReport::*m) {
    if (!b) return "na";
    return (*b).*m ? "true" : "false";
}

void write_summary(std::ostream& out, const ExperimentResult& res) {
    out << "seed,algorithm,lookahead_h,iterations,tail_error,tail_min_gap,final_error,delta2,delta2_exact,"
           "thm1_bound,thm2_bound,thm1_satisfied,thm2_satisfied,liminf_satisfied\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& run : res.runs) {
        const auto& r = run.record;
        const auto& b = run.bounds;
        out << r.seed << ',' << to_string(r.algorithm) << ',' << r.lookahead_h << ',' << r.iterations.size() << ','
            << format_real(r.summary.tail_max_error) << ',' << format_real(r.summary.tail_min_gap) << ','
            << format_real(r.summary.final_sup_error) << ','
            << format_real(res.delta2 ? res.delta2->delta2 : nan) << ','
            << (res.delta2 ? (res.delta2->is_exact ? "true" : "false") : "na") << ','
            << format_real(b ? b->thm1_bound : nan) << ',' << format_real(b ? b->thm2_bound : nan) << ','
            << flag(b, &BoundReport::thm1_satisfied) << ',' << flag(b, &BoundReport::thm2_satisfied) << ','
            << flag(b, &BoundReport::liminf_satisfied) << '\n';
    }
}

template <typename F>
void write_file(const std::filesystem::path& path, F&& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    body(out);
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    ExperimentResult res;
    try {
        const ResolvedExperiment ex = resolve(spec);
        const ValueVector jstar = optimal_value(ex.mdp, 1e-12).value;

        if (spec.delta2_mode == "enumerate")
            res.delta2 = delta2_estimate(ex.mdp, ex.projector, Delta2Mode::enumerate_all());
        else if (spec.delta2_mode == "sample")
            res.delta2 = delta2_estimate(ex.mdp, ex.projector, Delta2Mode::sample(spec.delta2_samples, spec.delta2_seed));

        const std::filesystem::path dir(spec.output_dir);
        std::filesystem::create_directories(dir);

        const auto reps = static_cast<std::size_t>(spec.repetitions);
        res.runs.resize(reps);
        auto one = [&](std::size_t r) {
            RunConfig cfg = ex.run;
            cfg.seed = spec.seed + r;
            cfg.rollout.seed = cfg.seed;
            RunOutcome out;
            out.record = run_algorithm(ex.mdp, ex.projector, cfg, &jstar);
            if (res.delta2 && cfg.lookahead_h >= 2)
                out.bounds = check_run(out.record, res.delta2->delta2, res.delta2->is_exact, ex.mdp.discount(),
                                       cfg.lookahead_h);
            const std::string tag = std::to_string(cfg.seed);
            write_file(dir / ("run_" + tag + ".csv"), [&](std::ostream& o) { write_run_csv(o, out.record); });
            write_file(dir / ("policies_" + tag + ".csv"), [&](std::ostream& o) { write_policy_csv(o, out.record); });
            res.runs[r] = std::move(out);
        };

        // Work-stealing over repetition indices; each run writes only its own slot and files.
        const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), reps);
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> workers;
        for (std::size_t w = 0; w < jobs; ++w)
            workers.push_back(std::async(std::launch::async, [&] {
                for (std::size_t r; (r = next.fetch_add(1)) < reps;) one(r);
            }));
        for (auto& w : workers) w.get();

        write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary(o, res); });
        res.exit_code = 0;
        res.message = "wrote " + std::to_string(reps) + " run(s) to " + dir.string();
    } catch (const AssumptionViolation& e) {
        res.exit_code = 2;
        res.message = e.what();
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.message = e.what();
    }
    return res;
}

}  // namespace lapi
