// suptail command-line front end: reproducible, config-driven runs emitting
// RFC-4180 CSV plus a JSON run record (<out>.run.json) that embeds the fully
// resolved configuration.  Exit codes: 0 success, 2 configuration error,
// 3 hypothesis/threshold violation, 4 numerical failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "suptail/bounds.hpp"
#include "suptail/config.hpp"
#include "suptail/csv.hpp"
#include "suptail/distribution.hpp"
#include "suptail/errors.hpp"
#include "suptail/lundberg.hpp"
#include "suptail/moments.hpp"
#include "suptail/montecarlo.hpp"
#include "suptail/reinsure.hpp"
#include "suptail/taylor.hpp"

using nlohmann::json;
using namespace suptail;

namespace {

constexpr int kFormatVersion = 1;
const double kLn10 = std::log(10.0);

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    int workers = 1;
    std::string taylor_bounds;  // CLI override of the config key
};

struct ErrorClass {
    std::string name;
    int exit_code;
    std::string clause;
};

ErrorClass classify(const std::exception& e) {
    if (auto* h = dynamic_cast<const HypothesisViolation*>(&e))
        return {"hypothesis_violation", 3, h->clause};
    if (dynamic_cast<const ThresholdViolation*>(&e)) return {"threshold_violation", 3, ""};
    if (dynamic_cast<const InfiniteMoment*>(&e)) return {"infinite_moment", 3, ""};
    if (dynamic_cast<const NoPositiveRoot*>(&e)) return {"no_positive_root", 3, ""};
    if (dynamic_cast<const DegenerateRetention*>(&e)) return {"degenerate_retention", 3, ""};
    if (dynamic_cast<const ConfigError*>(&e)) return {"config_error", 2, ""};
    if (dynamic_cast<const DomainError*>(&e)) return {"domain_error", 2, ""};
    if (dynamic_cast<const QuadratureFailure*>(&e)) return {"quadrature_failure", 4, ""};
    if (dynamic_cast<const SolverFailure*>(&e)) return {"solver_failure", 4, ""};
    if (dynamic_cast<const BudgetExceeded*>(&e)) return {"budget_exceeded", 4, ""};
    if (dynamic_cast<const InsufficientSignal*>(&e)) return {"insufficient_signal", 4, ""};
    return {"error", 4, ""};
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // "\n" endings on every platform
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

void write_run_record(const std::string& base_path, const std::string& command,
                      const Config& resolved, const std::vector<std::string>& outputs,
                      int workers, double wall_s, const json& details) {
    json rec;
    rec["format_version"] = kFormatVersion;
    rec["command"] = command;
    rec["workers"] = workers;
    rec["wall_time_s"] = wall_s;
    rec["outputs"] = outputs;
    json cfg = json::object();
    for (const auto& [k, v] : resolved.entries()) cfg[k] = v;
    rec["config"] = cfg;
    if (!details.is_null()) rec["details"] = details;
    auto out = open_output(base_path + ".run.json");
    out << rec.dump(2) << "\n";
}

// Explicit list `<prefix>_grid` or geometric triple `<prefix>_{min,max,points}`.
std::vector<double> resolve_grid(const Config& cfg, const std::string& prefix) {
    const std::string list_key = prefix + "_grid";
    if (cfg.has(list_key)) return cfg.get_real_list(list_key);
    return geometric_grid(cfg.get_real(prefix + "_min"), cfg.get_real(prefix + "_max"),
                          cfg.get_uint(prefix + "_points"));
}

TaylorMode resolve_taylor_mode(const CommonArgs& args, Config& resolved) {
    const std::string name = !args.taylor_bounds.empty()
                                 ? args.taylor_bounds
                                 : resolved.get_string("taylor_bounds", "exact");
    resolved.set("taylor_bounds", name);
    if (name == "exact") return TaylorMode::exact;
    if (name == "closed") return TaylorMode::closed;
    if (name == "simple") return TaylorMode::simple;
    throw ConfigError("taylor_bounds must be exact, closed, or simple");
}

// Certificates requested by a config: theorem 1 via `beta` (+ optional
// variant), theorem 2 via `eta`/`kappa`/`y_kappa`.
struct BoundSet {
    std::optional<Theorem1Certificate> cert1;
    std::string variant = "threshold";
    std::optional<Theorem2Certificate> cert2;
    bool certified = true;  // false only for the uncertified sharper variant

    bool any() const { return cert1.has_value() || cert2.has_value(); }

    std::optional<double> t1_log(double x, double y) const {
        if (!cert1) return std::nullopt;
        if (variant == "all_y") return theorem1_log_bound_all_y(*cert1, x, y);
        if (variant == "sharper") return theorem1_log_bound_sharper(*cert1, x, y);
        return theorem1_log_bound(*cert1, x, y);
    }
    std::optional<double> t2_log(double x, double y) const {
        if (!cert2) return std::nullopt;
        return theorem2_log_bound(*cert2, x, y);
    }
};

BoundSet build_bound_set(const Config& cfg, const DistributionSpec& spec, TaylorMode mode) {
    BoundSet bs;
    if (cfg.has("beta")) {
        bs.variant = cfg.get_string("variant", "threshold");
        std::optional<double> xi, y_min;
        if (bs.variant == "sharper") {
            xi = cfg.get_real("sharper_xi");
            y_min = cfg.get_real("sharper_y_min");
            bs.certified = false;
        } else if (bs.variant != "threshold" && bs.variant != "all_y") {
            throw ConfigError("variant must be threshold, all_y, or sharper");
        }
        const MomentSet m = compute_moments(spec, cfg.get_real("beta"));
        bs.cert1 = theorem1_certificate(m, mode, xi, y_min);
    }
    if (cfg.has("eta") || cfg.has("kappa") || cfg.has("y_kappa")) {
        const MomentSet m2 = compute_moments(spec, cfg.get_real("beta", 2.0), true);
        bs.cert2 = theorem2_certificate(spec, m2, cfg.get_real("eta"), cfg.get_real("kappa"),
                                        cfg.get_real("y_kappa"));
    }
    return bs;
}

json certificates_json(const BoundSet& bs) {
    json j = json::object();
    if (bs.cert1) {
        j["theorem1"] = json::parse(bs.cert1->to_json());
        j["theorem1_variant"] = bs.variant;
    }
    if (bs.cert2) j["theorem2"] = json::parse(bs.cert2->to_json());
    return j;
}

std::set<std::string> with_distribution_keys(std::set<std::string> extra) {
    const auto& base = distribution_config_keys();
    extra.insert(base.begin(), base.end());
    return extra;
}

std::string table_path(const std::string& out, const std::string& suffix) {
    const std::string ext = ".csv";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
        return out.substr(0, out.size() - ext.size()) + suffix + ext;
    return out + suffix + ext;
}

// ---------------------------------------------------------------------------

void cmd_constants(const CommonArgs& args, const std::string& command) {
    const auto started = std::chrono::steady_clock::now();
    Config resolved = args.config_path.empty() ? Config() : Config::load(args.config_path);
    resolved.restrict_keys({"delta_points"});
    const std::uint64_t n = resolved.get_uint("delta_points", 201);
    if (n > 2000000) throw ConfigError("delta_points is implausibly large");
    resolved.set("delta_points", std::to_string(n));

    const std::string me_path = table_path(args.out_path, "_me");
    const std::string mg_path = table_path(args.out_path, "_mg");
    {
        auto out = open_output(me_path);
        taylor::write_me_table(out, static_cast<int>(n));
    }
    {
        auto out = open_output(mg_path);
        taylor::write_mg_table(out, static_cast<int>(n));
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_run_record(args.out_path, command, resolved, {me_path, mg_path}, args.workers,
                     wall, json());
}

void cmd_gamma(const CommonArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    Config resolved = Config::load(args.config_path);
    resolved.restrict_keys(with_distribution_keys({"y_grid", "y_min", "y_max", "y_points",
                                                   "beta", "variant", "sharper_xi",
                                                   "sharper_y_min", "eta", "kappa", "y_kappa",
                                                   "taylor_bounds"}));
    const DistributionSpec spec = spec_from_config(resolved);
    const TaylorMode mode = resolve_taylor_mode(args, resolved);
    const std::vector<double> ys = resolve_grid(resolved, "y");
    const BoundSet bs = build_bound_set(resolved, spec, mode);

    auto out = open_output(args.out_path);
    CsvWriter csv(out);
    csv.row({"y", "gamma", "mgf_residual", "s1", "s2", "y_beta", "y_eta_star"});
    for (double y : ys) {
        const TruncatedWalkModel model(spec, y);
        const double g = model.gamma();
        std::vector<std::string> row = {csv.num(y), csv.num(g), csv.num(model.gamma_residual()),
                                        "", "", "", ""};
        if (bs.cert1) {
            row[5] = csv.num(bs.cert1->y_beta);
            if (y > bs.cert1->y_beta) row[3] = csv.num(bs.cert1->rate_s1(y));
        }
        if (bs.cert2) {
            row[6] = csv.num(bs.cert2->y_eta_star);
            if (y > bs.cert2->y_eta_star) row[4] = csv.num(bs.cert2->rate_s2(y));
        }
        csv.row(row);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_run_record(args.out_path, "gamma", resolved, {args.out_path}, args.workers, wall,
                     bs.any() ? json{{"certificates", certificates_json(bs)}} : json());
}

void append_bound_cells(std::vector<std::string>& row, const CsvWriter& csv,
                        const BoundSet& bs, double gamma, double x, double y) {
    const double lcl = -gamma * x;
    row.push_back(csv.num(std::exp(lcl)));
    row.push_back(csv.num(lcl / kLn10));
    if (const auto lt1 = bs.t1_log(x, y)) {
        row.push_back(csv.num(std::exp(*lt1)));
        row.push_back(csv.num(*lt1 / kLn10));
    } else {
        row.push_back("");
        row.push_back("");
    }
    if (const auto lt2 = bs.t2_log(x, y)) {
        row.push_back(csv.num(std::exp(*lt2)));
        row.push_back(csv.num(*lt2 / kLn10));
    } else {
        row.push_back("");
        row.push_back("");
    }
    row.push_back(bs.certified ? "true" : "false");
}

void cmd_bound(const CommonArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    Config resolved = Config::load(args.config_path);
    resolved.restrict_keys(with_distribution_keys({"y", "x_grid", "x_min", "x_max", "x_points",
                                                   "beta", "variant", "sharper_xi",
                                                   "sharper_y_min", "eta", "kappa", "y_kappa",
                                                   "taylor_bounds"}));
    const DistributionSpec spec = spec_from_config(resolved);
    const TaylorMode mode = resolve_taylor_mode(args, resolved);
    const double y = resolved.get_real("y");
    const std::vector<double> xs = resolve_grid(resolved, "x");
    const BoundSet bs = build_bound_set(resolved, spec, mode);
    const TruncatedWalkModel model(spec, y);
    const double gamma = model.gamma();

    auto out = open_output(args.out_path);
    CsvWriter csv(out);
    csv.row({"x", "y", "cl_bound", "log10_cl_bound", "t1_bound", "log10_t1_bound", "t2_bound",
             "log10_t2_bound", "certified"});
    for (double x : xs) {
        if (!(x >= 0.0)) throw ConfigError("bound levels x must be nonnegative");
        std::vector<std::string> row = {csv.num(x), csv.num(y)};
        append_bound_cells(row, csv, bs, gamma, x, y);
        csv.row(row);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json details = {{"gamma", gamma}};
    if (bs.any()) details["certificates"] = certificates_json(bs);
    write_run_record(args.out_path, "bound", resolved, {args.out_path}, args.workers, wall,
                     details);
}

void cmd_simulate(const CommonArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    Config resolved = Config::load(args.config_path);
    resolved.restrict_keys(with_distribution_keys(
        {"y", "x_grid", "x_min", "x_max", "x_points", "n_paths", "seed", "eps", "step_cap",
         "beta", "variant", "sharper_xi", "sharper_y_min", "eta", "kappa", "y_kappa",
         "taylor_bounds"}));
    const DistributionSpec spec = spec_from_config(resolved);
    const TaylorMode mode = resolve_taylor_mode(args, resolved);
    const double y = resolved.get_real("y");
    const std::vector<double> xs = resolve_grid(resolved, "x");
    const std::uint64_t n_paths = resolved.get_uint("n_paths");
    const std::uint64_t seed = resolved.get_uint("seed");  // mandatory: reproducibility
    const std::uint64_t step_cap = resolved.get_uint("step_cap", 1000000000ull);
    const BoundSet bs = build_bound_set(resolved, spec, mode);
    const TruncatedWalkModel model(spec, y);
    const double gamma = model.gamma();

    // Truncation budget: explicit, else 1e-4 times the certified bound at the
    // deepest level, else 1e-8 absolute.
    double eps;
    if (resolved.has("eps")) {
        eps = resolved.get_real("eps");
    } else if (bs.any()) {
        const double x_deep = *std::max_element(xs.begin(), xs.end());
        double best_log = 0.0;
        if (const auto lt1 = bs.t1_log(x_deep, y)) best_log = std::min(best_log, *lt1);
        if (const auto lt2 = bs.t2_log(x_deep, y)) best_log = std::min(best_log, *lt2);
        // 1e-4 of the certified bound at the deepest level, never looser than
        // the 1e-8 absolute default, floored so eps stays a normal double.
        const double rule = std::exp(std::max(std::log(1e-4) + best_log, -650.0));
        eps = std::min(rule, 1e-8);
    } else {
        eps = 1e-8;
    }
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0,1)");
    resolved.set("eps", format_sig(eps, 15));

    const std::vector<MCEstimate> ests =
        estimate_sup_tail_grid(model, xs, n_paths, eps, seed, args.workers, step_cap);

    auto out = open_output(args.out_path);
    CsvWriter csv(out);
    std::vector<std::string> header = {"x",         "y",        "p_hat", "std_err", "n_paths",
                                       "barrier_B", "trunc_eps", "seed",  "log10_p_hat"};
    if (bs.any())
        header.insert(header.end(), {"cl_bound", "log10_cl_bound", "t1_bound",
                                     "log10_t1_bound", "t2_bound", "log10_t2_bound",
                                     "certified"});
    csv.row(header);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const MCEstimate& est = ests[i];
        std::vector<std::string> row = {
            csv.num(xs[i]),          csv.num(y),
            csv.num(est.p_hat),      csv.num(est.std_err),
            CsvWriter::num(est.n_paths), csv.num(est.barrier_B),
            csv.num(eps),            CsvWriter::num(est.seed),
            est.p_hat > 0.0 ? csv.num(std::log10(est.p_hat)) : ""};
        if (bs.any()) append_bound_cells(row, csv, bs, gamma, xs[i], y);
        csv.row(row);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json details = {{"gamma", gamma},
                    {"barrier_B", ests.front().barrier_B},
                    {"truncation_error_bound", ests.front().truncation_error_bound},
                    {"mc_wall_time_s", ests.front().wall_time_s}};
    if (bs.any()) details["certificates"] = certificates_json(bs);
    write_run_record(args.out_path, "simulate", resolved, {args.out_path}, args.workers, wall,
                     details);
}

void cmd_ruin(const CommonArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    Config resolved = Config::load(args.config_path);
    resolved.restrict_keys({"alpha", "claim_scale", "a", "t", "premium_rate", "x_grid",
                            "x_min", "x_max", "x_points", "n_paths", "seed", "eps",
                            "step_cap", "beta", "slope_check", "slope_n_paths"});
    std::optional<double> horizon;
    if (resolved.has("t")) horizon = resolved.get_real("t");
    const RuinModel model(resolved.get_real("alpha"), resolved.get_real("claim_scale"),
                          resolved.get_real("a"), horizon,
                          resolved.get_real("premium_rate", 1.0));
    resolved.set("t", format_sig(model.horizon_T(), 15));
    const std::vector<double> xs = resolve_grid(resolved, "x");
    const std::uint64_t n_paths = resolved.get_uint("n_paths");
    const std::uint64_t seed = resolved.get_uint("seed");  // mandatory: reproducibility
    const double eps = resolved.get_real("eps", 1e-8);
    resolved.set("eps", format_sig(eps, 15));
    const std::uint64_t step_cap = resolved.get_uint("step_cap", 1000000000ull);
    std::optional<double> beta;
    if (resolved.has("beta")) beta = resolved.get_real("beta");

    // Slope delegation: on by default whenever the grid qualifies (geometric,
    // >= 4 levels); slope_check = true insists, false disables.
    bool grid_geometric = xs.size() >= 4;
    for (std::size_t i = 0; i + 1 < xs.size() && grid_geometric; ++i) {
        if (!(xs[i] > 0.0) || std::abs(xs[i + 1] / xs[i] - xs[1] / xs[0]) > 1e-9 * (xs[1] / xs[0]))
            grid_geometric = false;
    }
    bool want_slope = resolved.get_bool("slope_check", grid_geometric);
    if (want_slope && !grid_geometric)
        throw ConfigError("slope_check requires a geometric x grid with >= 4 levels");
    const std::uint64_t slope_n = resolved.get_uint("slope_n_paths", n_paths);

    std::optional<double> slope;
    if (want_slope) slope = asymptotic_slope_check(model, xs, slope_n, seed, args.workers);
    const double slope_target = -(model.alpha() - 1.0) * model.k();

    auto out = open_output(args.out_path);
    CsvWriter csv(out);
    csv.row({"x", "a", "T", "p_hat", "std_err", "log10_p_hat", "bound_rhs",
             "log10_bound_rhs", "slope", "slope_target"});
    json per_x = json::array();
    for (double x : xs) {
        const MCEstimate full = ruin_prob_mc(model, x, n_paths, eps, seed, args.workers,
                                             step_cap);
        std::optional<UpperBoundDecomposition> dec;
        try {
            dec = upper_bound_decomposition(model, x, n_paths, seed, args.workers, beta);
        } catch (const ThresholdViolation&) {
            // retention a*x below the certificate threshold: no certified rhs here
        }
        std::vector<std::string> row = {
            csv.num(x),
            csv.num(model.a()),
            csv.num(model.horizon_T()),
            csv.num(full.p_hat),
            csv.num(full.std_err),
            full.p_hat > 0.0 ? csv.num(std::log10(full.p_hat)) : "",
            dec ? csv.num(dec->rhs()) : "",
            dec && dec->rhs() > 0.0 ? csv.num(std::log10(dec->rhs())) : "",
            slope ? csv.num(*slope) : "",
            csv.num(slope_target)};
        csv.row(row);
        json jx = {{"x", x},
                   {"p_hat", full.p_hat},
                   {"barrier_B", full.barrier_B},
                   {"truncation_error_bound", full.truncation_error_bound}};
        if (dec) {
            jx["finite_horizon_p_hat"] = dec->finite_horizon.p_hat;
            jx["correction"] = dec->correction;
            jx["tail_term"] = dec->tail_term;
            jx["bound_rhs"] = dec->rhs();
        }
        per_x.push_back(jx);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json details = {{"k", model.k()},
                    {"x_min_component", model.x_min_component()},
                    {"slope_target", slope_target},
                    {"levels", per_x}};
    if (slope) details["slope"] = *slope;
    write_run_record(args.out_path, "ruin", resolved, {args.out_path}, args.workers, wall,
                     details);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"suptail: certified tail bounds for truncated heavy-tailed random walks"};
    app.require_subcommand(1);

    CommonArgs args;
    std::map<std::string, CLI::App*> subs;
    auto add = [&](const std::string& name, const std::string& desc, bool config_required) {
        CLI::App* s = app.add_subcommand(name, desc);
        auto* copt = s->add_option("--config,-c", args.config_path, "run configuration file");
        if (config_required) copt->required();
        s->add_option("--out,-o", args.out_path, "output CSV path")->required();
        s->add_option("--workers,-w", args.workers,
                      "worker threads (outputs are invariant in this)")
            ->check(CLI::Range(1, 4096));
        s->add_option("--taylor-bounds", args.taylor_bounds,
                      "Taylor-constant mode: exact|closed|simple")
            ->check(CLI::IsMember({"exact", "closed", "simple"}));
        subs[name] = s;
    };
    add("constants", "emit the Taylor-constant figure tables (ME and MG)", false);
    add("figures", "alias of constants", false);
    add("gamma", "Lundberg exponent gamma(y) over a truncation grid", true);
    add("bound", "certified tail bounds over a level grid", true);
    add("simulate", "Monte Carlo estimate of the supremum tail", true);
    add("ruin", "re-insurance ruin estimates, certified bound, slope check", true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << json{{"error", "config_error"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }

    try {
        if (subs["constants"]->parsed()) cmd_constants(args, "constants");
        else if (subs["figures"]->parsed()) cmd_constants(args, "figures");
        else if (subs["gamma"]->parsed()) cmd_gamma(args);
        else if (subs["bound"]->parsed()) cmd_bound(args);
        else if (subs["simulate"]->parsed()) cmd_simulate(args);
        else if (subs["ruin"]->parsed()) cmd_ruin(args);
        return 0;
    } catch (const std::exception& e) {
        const ErrorClass c = classify(e);
        json err = {{"error", c.name}, {"message", e.what()}};
        if (!c.clause.empty()) err["clause"] = c.clause;
        std::cerr << err.dump() << "\n";
        return c.exit_code;
    }
}
