// Command-line surface: perturbation, parameter derivation, analysis sweeps,
// feasibility scans and mean-estimation experiments. Figure data is emitted
// as CSV (header x,y,series) or JSON for external plotting; nothing is
// rendered here. Every stochastic subcommand takes an explicit --seed
// (default 0) and re-running with the same flags and inputs reproduces the
// output byte for byte.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptt/ptt.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

// ---------------------------------------------------------------------------
// Shared flag bundles.
// ---------------------------------------------------------------------------

struct PttSource {
    double epsilon = 1.0;
    double eta = 2.0;
    std::string family = "type-i";
    std::string preset;
    double q = 0.5;
    std::string params_file;
    CLI::Option* epsilon_opt = nullptr;
    CLI::Option* eta_opt = nullptr;
    CLI::Option* preset_opt = nullptr;
    CLI::Option* q_opt = nullptr;
    CLI::Option* file_opt = nullptr;

    void attach(CLI::App* cmd) {
        epsilon_opt = cmd->add_option("--epsilon", epsilon, "privacy budget epsilon");
        eta_opt = cmd->add_option("--eta", eta, "band shape ratio eta = B/a");
        cmd->add_option("--family", family, "ptt family")
            ->check(CLI::IsMember({"type-i", "type-ii"}));
        preset_opt = cmd->add_option("--preset", preset, "named parameter bundle")
                         ->check(CLI::IsMember({"pm", "theorem9", "optimal"}));
        q_opt = cmd->add_option("--q", q, "band mass for --preset optimal");
        file_opt = cmd->add_option("--params-file", params_file,
                                   "load a parameter bundle from JSON");
    }

    bool from_file() const { return file_opt && file_opt->count() > 0; }

    ptt::PrivacyBudget budget() const {
        if (!epsilon_opt || epsilon_opt->count() == 0)
            throw ptt::argument_error("--epsilon is required here");
        return ptt::PrivacyBudget(epsilon);
    }

    // relaxed_ok lets density-only consumers (the audit) work with bundles
    // past the q >= 1/2 validity interval
    ptt::PttParams resolve(bool relaxed_ok = false) const {
        if (from_file()) return ptt::load_params_file(params_file);
        if (preset_opt->count() > 0) {
            const auto preset_kind = ptt::preset_from_name(preset);
            std::optional<double> q_arg;
            if (q_opt->count() > 0) q_arg = q;
            return ptt::preset_params(preset_kind, budget(), q_arg);
        }
        if (eta_opt->count() == 0)
            throw ptt::argument_error(
                "ptt parameters need --eta, --preset or --params-file");
        const auto fam = ptt::family_from_name(family);
        return relaxed_ok ? ptt::derive_ptt_params_relaxed(budget(), eta, fam)
                          : ptt::derive_ptt_params(budget(), eta, fam);
    }

    ordered_json echo() const {
        ordered_json j;
        if (from_file()) {
            j["params_file"] = params_file;
            return j;
        }
        if (epsilon_opt->count() > 0) j["epsilon"] = epsilon;
        if (preset_opt->count() > 0) {
            j["preset"] = preset;
            if (q_opt->count() > 0) j["q"] = q;
        } else if (eta_opt->count() > 0) {
            j["eta"] = eta;
            j["family"] = family;
        }
        return j;
    }
};

ptt::MechanismKind resolve_mechanism(const std::string& name, const PttSource& src) {
    if (name == "laplace") return ptt::make_laplace(src.budget());
    if (name == "duchi") return ptt::make_duchi(src.budget());
    if (name == "ptt") return ptt::make_ptt(src.resolve());
    throw ptt::argument_error("unknown mechanism '" + name + "'");
}

// ---------------------------------------------------------------------------
// Emission helpers.
// ---------------------------------------------------------------------------

struct RunReport {
    ordered_json config;
    std::vector<std::string> outputs;
};

void emit(const std::string& path, const std::string& content, RunReport& report) {
    if (path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
    } else {
        ptt::write_file_atomic(path, content);
        report.outputs.push_back(path);
    }
}

void print_run_report(const std::string& command, const RunReport& report) {
    ordered_json j;
    j["command"] = command;
    j["config"] = report.config;
    j["outputs"] = report.outputs;
    std::cerr << j.dump() << '\n';
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count < 2 || !(lo < hi))
        throw ptt::argument_error("grid needs lo < hi and at least 2 points");
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return xs;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || count < 2 || !(lo < hi))
        throw ptt::argument_error("log grid needs 0 < lo < hi and at least 2 points");
    std::vector<double> xs(count);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        xs[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
    return xs;
}

std::vector<double> grid_or(const std::vector<double>& grid_flag,
                            std::vector<double> fallback, bool log_scale) {
    if (grid_flag.empty()) return fallback;
    const auto count = static_cast<std::size_t>(grid_flag[2]);
    return log_scale ? logspace(grid_flag[0], grid_flag[1], count)
                     : linspace(grid_flag[0], grid_flag[1], count);
}

std::istream& open_input(const std::string& path, std::ifstream& file) {
    if (path.empty()) return std::cin;
    file.open(path);
    if (!file) throw ptt::io_error("cannot open input file " + path);
    return file;
}

// ---------------------------------------------------------------------------
// Subcommand handlers.
// ---------------------------------------------------------------------------

int run_params(const PttSource& src, const std::string& output) {
    const ptt::PttParams prm = src.resolve();
    RunReport report;
    report.config = src.echo();
    emit(output, ptt::params_to_json(prm), report);
    print_run_report("params", report);
    return 0;
}

struct PerturbOptions {
    std::string mechanism;
    std::uint64_t seed = 0;
    std::vector<double> bounds;
    bool rescale_output = false;
    std::size_t dimension = 1;
    std::string column;
    std::string input;
    std::string output;
};

int run_perturb(const PttSource& src, const PerturbOptions& opt) {
    // build (and validate) the mechanism before touching any input
    const ptt::MechanismKind mech = resolve_mechanism(opt.mechanism, src);
    std::optional<ptt::DomainBounds> bounds;
    if (!opt.bounds.empty()) bounds.emplace(opt.bounds[0], opt.bounds[1]);
    if (opt.rescale_output && !bounds)
        throw ptt::argument_error("--rescale-output requires --bounds");
    if (opt.rescale_output && opt.dimension > 1)
        throw ptt::argument_error("--rescale-output only applies to one-dimensional input");

    std::ifstream file;
    std::istream& in = open_input(opt.input, file);
    ptt::RandomSource rng(opt.seed);
    const std::string label = ptt::mechanism_label(mech);
    std::string csv;

    auto to_unit = [&bounds](double v) {
        return bounds ? ptt::rescale_to_unit(v, *bounds) : ptt::UnitValue(v);
    };

    if (opt.dimension == 1) {
        const std::vector<double> values = ptt::read_values(in, opt.column);
        csv = "input,output,mechanism,seed\n";
        for (double v : values) {
            double y = ptt::perturb(to_unit(v), mech, rng);
            if (opt.rescale_output) y = ptt::rescale_from_unit(y, *bounds);
            csv += ptt::format_real(v);
            csv += ',';
            csv += ptt::format_real(y);
            csv += ',';
            csv += label;
            csv += ',';
            csv += std::to_string(opt.seed);
            csv += '\n';
        }
    } else {
        const auto tuples = ptt::read_tuples(in, opt.dimension);
        for (std::size_t j = 1; j <= opt.dimension; ++j) {
            csv += "out_" + std::to_string(j) + ",";
        }
        csv += "chosen_index\n";
        std::vector<double> unit(opt.dimension);
        for (const auto& tuple : tuples) {
            for (std::size_t j = 0; j < opt.dimension; ++j)
                unit[j] = to_unit(tuple[j]).value();
            const ptt::NoisyTuple noisy = ptt::multidim_perturb(unit, mech, rng);
            for (double v : noisy.values) {
                csv += ptt::format_real(v);
                csv += ',';
            }
            csv += std::to_string(noisy.chosen_index);
            csv += '\n';
        }
    }

    RunReport report;
    report.config = src.echo();
    report.config["mechanism"] = opt.mechanism;
    report.config["seed"] = opt.seed;
    report.config["d"] = opt.dimension;
    if (bounds) report.config["bounds"] = {bounds->lo, bounds->hi};
    report.config["rescale_output"] = opt.rescale_output;
    if (!opt.column.empty()) report.config["column"] = opt.column;
    if (!opt.input.empty()) report.config["input"] = opt.input;
    emit(opt.output, csv, report);
    print_run_report("perturb", report);
    return 0;
}

struct VarianceOptions {
    std::string mechanism = "ptt";
    double attr = 0.0;
    std::string sweep;  // eta | epsilon | attr
    std::vector<double> grid;
    std::string output;
};

int run_variance(const PttSource& src, const VarianceOptions& opt) {
    RunReport report;
    report.config = src.echo();
    report.config["mechanism"] = opt.mechanism;
    report.config["attr"] = opt.attr;
    const ptt::UnitValue attr(opt.attr);

    if (opt.sweep.empty()) {
        const ptt::MechanismKind mech = resolve_mechanism(opt.mechanism, src);
        ordered_json j;
        j["mechanism"] = ptt::mechanism_label(mech);
        j["epsilon"] = ptt::mechanism_epsilon(mech);
        j["attr"] = opt.attr;
        j["variance"] = ptt::variance_analytic(mech, attr);
        emit(opt.output, j.dump(), report);
        print_run_report("variance", report);
        return 0;
    }
    report.config["sweep"] = opt.sweep;

    std::vector<ptt::CurvePoint> points;
    if (opt.sweep == "eta") {
        if (opt.mechanism != "ptt")
            throw ptt::argument_error("--sweep eta applies to the ptt mechanism only");
        const double eps = src.budget().value();
        const auto fam = ptt::family_from_name(src.family);
        const bool fixed_q = src.q_opt->count() > 0;
        std::vector<double> etas = grid_or(
            opt.grid,
            fixed_q ? linspace(1.095, 20.0, 200)
                    : linspace(1.0 + 1e-3, ptt::eta_upper_bound(eps, fam), 200),
            false);
        std::string series;
        if (fixed_q)
            series = "var(" + std::string(ptt::family_name(fam)) + ",fixed-q=" +
                     ptt::format_real(src.q) + ")";
        else
            series = "var(" + std::string(ptt::family_name(fam)) + ")";
        for (double eta : etas) {
            double y;
            if (fixed_q) {
                y = ptt::ptt_variance_fixed_q(ptt::PrivacyBudget(eps), src.q, eta, attr);
            } else {
                if (!(eta > 1.0 && eta <= ptt::eta_upper_bound(eps, fam))) continue;
                y = ptt::ptt_variance_analytic(
                    ptt::derive_ptt_params(ptt::PrivacyBudget(eps), eta, fam), attr);
            }
            points.push_back({eta, y, series});
        }
    } else if (opt.sweep == "epsilon") {
        const auto eps_grid = grid_or(opt.grid, logspace(0.01, 10.0, 50), true);
        for (double eps : eps_grid) {
            const ptt::PrivacyBudget budget(eps);
            if (opt.mechanism == "laplace") {
                points.push_back({eps, ptt::laplace_variance(eps), "laplace"});
            } else if (opt.mechanism == "duchi") {
                points.push_back({eps, ptt::duchi_variance(eps, opt.attr), "duchi"});
            } else {
                const auto fam = ptt::family_from_name(src.family);
                double eta = src.eta;
                if (src.preset_opt->count() > 0) {
                    std::optional<double> q_arg;
                    if (src.q_opt->count() > 0) q_arg = src.q;
                    const auto prm = ptt::preset_params(ptt::preset_from_name(src.preset),
                                                        budget, q_arg);
                    points.push_back({eps, ptt::ptt_variance_analytic(prm, attr),
                                      "ptt-" + src.preset});
                    continue;
                }
                if (!(eta > 1.0 && eta <= ptt::eta_upper_bound(eps, fam))) continue;
                const auto prm = ptt::derive_ptt_params(budget, eta, fam);
                points.push_back({eps, ptt::ptt_variance_analytic(prm, attr),
                                  "ptt-" + std::string(ptt::family_name(fam))});
            }
        }
    } else if (opt.sweep == "attr") {
        const ptt::MechanismKind mech = resolve_mechanism(opt.mechanism, src);
        const auto attr_grid = grid_or(opt.grid, linspace(-1.0, 1.0, 201), false);
        const std::string series = ptt::mechanism_label(mech);
        for (double a : attr_grid)
            points.push_back(
                {a, ptt::variance_analytic(mech, ptt::UnitValue(a)), series});
    } else {
        throw ptt::argument_error("--sweep must be eta, epsilon or attr");
    }
    emit(opt.output, ptt::curve_csv(points), report);
    print_run_report("variance", report);
    return 0;
}

struct CrossoverOptions {
    double attr = 0.0;
    bool attr_set = false;
    std::vector<double> bracket{0.01, 10.0};
    std::vector<double> grid;
    std::string output;
};

int run_crossover(const CrossoverOptions& opt) {
    RunReport report;
    report.config["bracket"] = {opt.bracket[0], opt.bracket[1]};
    std::vector<ptt::CurvePoint> points;
    if (opt.attr_set) {
        report.config["attr"] = opt.attr;
        const ptt::UnitValue attr(opt.attr);
        const std::string series = "F1(A=" + ptt::format_real(opt.attr) + ")";
        for (double eps : logspace(opt.bracket[0], opt.bracket[1], 200))
            points.push_back({eps, ptt::crossover_function(eps, attr), series});
        if (const auto root = ptt::crossover_root(attr, opt.bracket[0], opt.bracket[1]))
            points.push_back({opt.attr, *root, "root"});
    } else {
        const auto attrs = grid_or(opt.grid, linspace(0.0, 1.0, 101), false);
        for (double a : attrs) {
            const auto root =
                ptt::crossover_root(ptt::UnitValue(a), opt.bracket[0], opt.bracket[1]);
            if (root) points.push_back({a, *root, "root"});
        }
    }
    emit(opt.output, ptt::curve_csv(points), report);
    print_run_report("crossover", report);
    return 0;
}

struct OptimizeOptions {
    double attr = 1.0;
    std::string output;
};

int run_optimize(const PttSource& src, const OptimizeOptions& opt) {
    const ptt::PrivacyBudget budget = src.budget();
    const auto closed = ptt::optimal_eta_closed_form(budget);
    const auto fam = ptt::family_from_name(src.family);
    const auto numeric = ptt::min_variance_numeric(budget, ptt::UnitValue(opt.attr), fam);
    ordered_json j;
    j["epsilon"] = budget.value();
    j["family"] = std::string(ptt::family_name(fam));
    j["attr"] = opt.attr;
    j["eta0"] = closed.eta0;
    j["f_residual"] = closed.f_residual;
    if (src.q_opt->count() > 0)
        j["a_fixed_q"] = ptt::optimal_eta_fixed_q_a(budget, src.q);
    j["eta_star"] = numeric.eta_star;
    j["var_star"] = numeric.var_star;
    RunReport report;
    report.config = src.echo();
    report.config["attr"] = opt.attr;
    emit(opt.output, j.dump(), report);
    print_run_report("optimize", report);
    return 0;
}

int run_feasibility(const std::vector<double>& grid_flag, const std::string& output) {
    std::vector<double> etas;
    if (grid_flag.empty()) {
        etas.resize(200);
        for (std::size_t i = 0; i < etas.size(); ++i)
            etas[i] = 1.0 + 19.0 * static_cast<double>(i + 1) / 200.0;
    } else {
        etas = linspace(grid_flag[0], grid_flag[1], static_cast<std::size_t>(grid_flag[2]));
    }
    const auto reports = ptt::scan_eta_feasibility(etas);
    RunReport report;
    report.config["grid_points"] = etas.size();
    emit(output, ptt::feasibility_csv(reports), report);
    print_run_report("feasibility", report);
    return 0;
}

struct LowerBoundOptions {
    double eta = 2.0;
    std::vector<double> grid;
    bool constants = false;
    std::string output;
};

int run_lower_bound(const LowerBoundOptions& opt) {
    RunReport report;
    if (opt.constants) {
        const auto constants = ptt::lower_bound_constants();
        ordered_json j;
        j["theta1"] = constants.theta1;
        j["theta2"] = constants.theta2;
        emit(opt.output, j.dump(), report);
        print_run_report("lower-bound", report);
        return 0;
    }
    report.config["eta"] = opt.eta;
    std::vector<ptt::CurvePoint> points;
    for (double eps : grid_or(opt.grid, logspace(0.01, 10.0, 50), true)) {
        const auto curves = ptt::lower_bound_curves(ptt::PrivacyBudget(eps), opt.eta);
        points.push_back({eps, curves.g1, "g1"});
        points.push_back({eps, curves.h1, "h1"});
        points.push_back({eps, curves.h2, "h2"});
    }
    for (std::size_t i = 1; i <= 200; ++i) {
        const double eta = 1.0 + 19.0 * static_cast<double>(i) / 200.0;
        points.push_back({eta, ptt::psi1(eta), "psi1"});
        points.push_back({eta, ptt::psi2(eta), "psi2"});
    }
    emit(opt.output, ptt::curve_csv(points), report);
    print_run_report("lower-bound", report);
    return 0;
}

struct CompareOptions {
    std::vector<std::string> mechanisms;
    double attr = 0.0;
    bool attr_set = false;
    std::vector<double> grid;
    std::string output;
};

int run_compare(const PttSource& src, const CompareOptions& opt) {
    if (opt.mechanisms.empty() || opt.mechanisms.size() > 2)
        throw ptt::argument_error(
            "compare takes --mechanism once (ptt vs named) or twice (named pair)");
    const std::string name_a = opt.mechanisms.size() == 2 ? opt.mechanisms[0] : "ptt";
    const std::string name_b = opt.mechanisms.back();

    // a params file pins epsilon, so the sweep collapses to a single point
    std::vector<double> eps_grid;
    if (src.from_file())
        eps_grid = {ptt::load_params_file(src.params_file).epsilon};
    else
        eps_grid = grid_or(opt.grid, logspace(0.01, 10.0, 50), true);

    auto build = [&src](const std::string& name, double eps) -> std::optional<ptt::MechanismKind> {
        const ptt::PrivacyBudget budget(eps);
        if (name == "laplace") return ptt::make_laplace(budget);
        if (name == "duchi") return ptt::make_duchi(budget);
        if (name != "ptt") throw ptt::argument_error("unknown mechanism '" + name + "'");
        if (src.from_file()) return ptt::make_ptt(ptt::load_params_file(src.params_file));
        if (src.preset_opt->count() > 0) {
            std::optional<double> q_arg;
            if (src.q_opt->count() > 0) q_arg = src.q;
            return ptt::make_ptt(
                ptt::preset_params(ptt::preset_from_name(src.preset), budget, q_arg));
        }
        const auto fam = ptt::family_from_name(src.family);
        if (!(src.eta > 1.0 && src.eta <= ptt::eta_upper_bound(eps, fam)))
            return std::nullopt;  // eta invalid at this epsilon; skip the point
        return ptt::make_ptt(ptt::derive_ptt_params(budget, src.eta, fam));
    };

    std::string series;
    if (opt.attr_set)
        series = "r(" + name_a + "-" + name_b + ",A=" + ptt::format_real(opt.attr) + ")";
    else
        series = "s(" + name_a + "-" + name_b + ")";

    std::vector<ptt::CurvePoint> points;
    for (double eps : eps_grid) {
        const auto mech_a = build(name_a, eps);
        const auto mech_b = build(name_b, eps);
        if (!mech_a || !mech_b) continue;
        const double y = opt.attr_set
                             ? ptt::noisy_variance_gap_r(*mech_a, *mech_b,
                                                         ptt::UnitValue(opt.attr))
                             : ptt::noisy_variance_gap_s(*mech_a, *mech_b);
        points.push_back({eps, y, series});
    }
    RunReport report;
    report.config = src.echo();
    report.config["mechanisms"] = opt.mechanisms;
    if (opt.attr_set) report.config["attr"] = opt.attr;
    emit(opt.output, ptt::curve_csv(points), report);
    print_run_report("compare", report);
    return 0;
}

struct SimulateOptions {
    std::string mechanism;
    std::vector<std::size_t> sample_sizes;
    std::size_t dimension = 1;
    std::size_t trials = 50;
    double beta = 0.05;
    std::uint64_t seed = 0;
    std::string dist = "uniform";
    double value = 0.5;
    std::string output;
    std::string fit_output;
};

int run_simulate(const PttSource& src, const SimulateOptions& opt) {
    ptt::ExperimentConfig config{.sample_sizes = opt.sample_sizes,
                                 .dimension = opt.dimension,
                                 .mechanism = resolve_mechanism(opt.mechanism, src),
                                 .trials = opt.trials,
                                 .beta = opt.beta,
                                 .distribution_value = opt.value,
                                 .master_seed = opt.seed};
    if (opt.dist == "constant")
        config.distribution = ptt::ValueDistribution::Constant;
    else if (opt.dist == "uniform")
        config.distribution = ptt::ValueDistribution::Uniform;
    else if (opt.dist == "two-point")
        config.distribution = ptt::ValueDistribution::TwoPoint;
    else
        throw ptt::argument_error("unknown distribution '" + opt.dist + "'");

    const ptt::ErrorTable table = ptt::run_scaling_experiment(config);
    RunReport report;
    report.config = src.echo();
    report.config["mechanism"] = opt.mechanism;
    report.config["n"] = opt.sample_sizes;
    report.config["d"] = opt.dimension;
    report.config["trials"] = opt.trials;
    report.config["beta"] = opt.beta;
    report.config["seed"] = opt.seed;
    report.config["dist"] = opt.dist;
    report.config["value"] = opt.value;
    emit(opt.output, ptt::error_table_csv(table), report);
    if (!opt.fit_output.empty())
        emit(opt.fit_output, ptt::slope_fit_json(ptt::fit_error_slope(table)), report);
    print_run_report("simulate", report);
    return 0;
}

struct AuditOptions {
    std::string mechanism;
    std::vector<double> grid;
    std::string output;
};

int run_audit(const PttSource& src, const AuditOptions& opt) {
    std::vector<double> inputs;
    for (int i = 0; i <= 20; ++i) inputs.push_back(-1.0 + 0.1 * i);

    ptt::AuditReport audit;
    std::string label;
    double epsilon = 0.0;
    if (opt.mechanism == "ptt") {
        // density route: analysis-only bundles are auditable too
        const ptt::PttParams prm = src.resolve(/*relaxed_ok=*/true);
        const auto outputs =
            grid_or(opt.grid, linspace(-prm.B, prm.B, 801), false);
        audit = ptt::ldp_ratio_audit(prm, inputs, outputs);
        label = "ptt-" + std::string(ptt::family_name(prm.family));
        epsilon = prm.epsilon;
    } else {
        const ptt::MechanismKind mech = resolve_mechanism(opt.mechanism, src);
        const auto outputs = grid_or(opt.grid, linspace(-10.0, 10.0, 2001), false);
        audit = ptt::ldp_ratio_audit(mech, inputs, outputs);
        label = ptt::mechanism_label(mech);
        epsilon = ptt::mechanism_epsilon(mech);
    }

    ordered_json j;
    j["mechanism"] = label;
    j["epsilon"] = epsilon;
    j["max_ratio"] = audit.max_ratio;
    j["e_epsilon"] = audit.bound;
    j["ratio_minus_bound"] = audit.max_ratio - audit.bound;
    j["witness"] = {{"input_i", audit.witness.input_i},
                    {"input_j", audit.witness.input_j},
                    {"output", audit.witness.output}};
    RunReport report;
    report.config = src.echo();
    report.config["mechanism"] = opt.mechanism;
    emit(opt.output, j.dump(), report);
    print_run_report("audit", report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise transformation technique mechanisms for local differential privacy"};
    app.require_subcommand(1);

    // params
    auto* params_cmd = app.add_subcommand("params", "derive and print a parameter bundle");
    PttSource params_src;
    params_src.attach(params_cmd);
    std::string params_output;
    params_cmd->add_option("--output", params_output, "write to file instead of stdout");

    // perturb
    auto* perturb_cmd = app.add_subcommand("perturb", "perturb values read from stdin or a file");
    PttSource perturb_src;
    perturb_src.attach(perturb_cmd);
    PerturbOptions perturb_opt;
    perturb_cmd->add_option("--mechanism", perturb_opt.mechanism, "laplace, duchi or ptt")
        ->required()
        ->check(CLI::IsMember({"laplace", "duchi", "ptt"}));
    perturb_cmd->add_option("--seed", perturb_opt.seed, "random seed (default 0)");
    perturb_cmd->add_option("--bounds", perturb_opt.bounds, "raw domain [lo hi]; rescaled on ingest")
        ->expected(2);
    perturb_cmd->add_flag("--rescale-output", perturb_opt.rescale_output,
                          "map noisy outputs back through the bounds");
    perturb_cmd->add_option("--d", perturb_opt.dimension, "tuple dimension (CSV rows of d columns)");
    perturb_cmd->add_option("--column", perturb_opt.column, "CSV column (name or 0-based index)");
    perturb_cmd->add_option("--input", perturb_opt.input, "input file (default stdin)");
    perturb_cmd->add_option("--output", perturb_opt.output, "output file (default stdout)");

    // variance
    auto* variance_cmd = app.add_subcommand("variance", "analytic variance, point or sweep");
    PttSource variance_src;
    variance_src.attach(variance_cmd);
    VarianceOptions variance_opt;
    variance_cmd->add_option("--mechanism", variance_opt.mechanism, "laplace, duchi or ptt")
        ->check(CLI::IsMember({"laplace", "duchi", "ptt"}));
    variance_cmd->add_option("--attr", variance_opt.attr, "attribute value in [-1,1]");
    variance_cmd->add_option("--sweep", variance_opt.sweep, "eta, epsilon or attr");
    variance_cmd->add_option("--grid", variance_opt.grid, "sweep grid: lo hi count")->expected(3);
    variance_cmd->add_option("--output", variance_opt.output, "output file (default stdout)");

    // crossover
    auto* crossover_cmd =
        app.add_subcommand("crossover", "Duchi/Laplace variance crossover roots");
    CrossoverOptions crossover_opt;
    auto* crossover_attr =
        crossover_cmd->add_option("--attr", crossover_opt.attr, "attribute value in [-1,1]");
    crossover_cmd->add_option("--bracket", crossover_opt.bracket, "epsilon bracket: lo hi")
        ->expected(2);
    crossover_cmd->add_option("--grid", crossover_opt.grid, "attribute grid: lo hi count")
        ->expected(3);
    crossover_cmd->add_option("--output", crossover_opt.output, "output file (default stdout)");

    // optimize
    auto* optimize_cmd = app.add_subcommand("optimize", "optimal eta, closed form and numeric");
    PttSource optimize_src;
    optimize_src.attach(optimize_cmd);
    OptimizeOptions optimize_opt;
    optimize_cmd->add_option("--attr", optimize_opt.attr, "attribute for the numeric minimum");
    optimize_cmd->add_option("--output", optimize_opt.output, "output file (default stdout)");

    // feasibility
    auto* feasibility_cmd =
        app.add_subcommand("feasibility", "scan eta for the worst-case comparison systems");
    std::vector<double> feasibility_grid;
    std::string feasibility_output;
    feasibility_cmd->add_option("--grid", feasibility_grid, "eta grid: lo hi count")->expected(3);
    feasibility_cmd->add_option("--output", feasibility_output, "output file (default stdout)");

    // lower-bound
    auto* lower_cmd = app.add_subcommand("lower-bound", "worst-case variance lower-bound curves");
    LowerBoundOptions lower_opt;
    lower_cmd->add_option("--eta", lower_opt.eta, "eta for the h curves");
    lower_cmd->add_option("--grid", lower_opt.grid, "epsilon grid: lo hi count")->expected(3);
    lower_cmd->add_flag("--constants", lower_opt.constants, "emit theta1/theta2 as JSON");
    lower_cmd->add_option("--output", lower_opt.output, "output file (default stdout)");

    // compare
    auto* compare_cmd =
        app.add_subcommand("compare", "pointwise or worst-case variance gap between mechanisms");
    PttSource compare_src;
    compare_src.attach(compare_cmd);
    CompareOptions compare_opt;
    compare_cmd
        ->add_option("--mechanism", compare_opt.mechanisms,
                     "baseline (once: ptt vs it; twice: named pair)")
        ->required();
    auto* compare_attr =
        compare_cmd->add_option("--attr", compare_opt.attr, "attribute for the pointwise gap");
    compare_cmd->add_option("--grid", compare_opt.grid, "epsilon grid: lo hi count")->expected(3);
    compare_cmd->add_option("--output", compare_opt.output, "output file (default stdout)");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "mean-estimation error scaling experiment");
    PttSource simulate_src;
    simulate_src.attach(simulate_cmd);
    SimulateOptions simulate_opt;
    simulate_cmd->add_option("--mechanism", simulate_opt.mechanism, "laplace, duchi or ptt")
        ->required()
        ->check(CLI::IsMember({"laplace", "duchi", "ptt"}));
    simulate_cmd->add_option("--n", simulate_opt.sample_sizes, "sample sizes (comma separated)")
        ->required()
        ->delimiter(',');
    simulate_cmd->add_option("--d", simulate_opt.dimension, "tuple dimension");
    simulate_cmd->add_option("--trials", simulate_opt.trials, "trials per sample size");
    simulate_cmd->add_option("--beta", simulate_opt.beta, "error quantile level (1-beta)");
    simulate_cmd->add_option("--seed", simulate_opt.seed, "master seed (default 0)");
    simulate_cmd->add_option("--dist", simulate_opt.dist, "constant, uniform or two-point")
        ->check(CLI::IsMember({"constant", "uniform", "two-point"}));
    simulate_cmd->add_option("--value", simulate_opt.value, "c of constant(c) / two-point(+-c)");
    simulate_cmd->add_option("--output", simulate_opt.output, "table file (default stdout)");
    simulate_cmd->add_option("--fit-output", simulate_opt.fit_output,
                             "write the log-log slope fit JSON here");

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "maximum density ratio against e^epsilon");
    PttSource audit_src;
    audit_src.attach(audit_cmd);
    AuditOptions audit_opt;
    audit_cmd->add_option("--mechanism", audit_opt.mechanism, "laplace, duchi or ptt")
        ->required()
        ->check(CLI::IsMember({"laplace", "duchi", "ptt"}));
    audit_cmd->add_option("--grid", audit_opt.grid, "output grid: lo hi count")->expected(3);
    audit_cmd->add_option("--output", audit_opt.output, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (params_cmd->parsed()) return run_params(params_src, params_output);
        if (perturb_cmd->parsed()) return run_perturb(perturb_src, perturb_opt);
        if (variance_cmd->parsed()) return run_variance(variance_src, variance_opt);
        if (crossover_cmd->parsed()) {
            crossover_opt.attr_set = crossover_attr->count() > 0;
            return run_crossover(crossover_opt);
        }
        if (optimize_cmd->parsed()) return run_optimize(optimize_src, optimize_opt);
        if (feasibility_cmd->parsed())
            return run_feasibility(feasibility_grid, feasibility_output);
        if (lower_cmd->parsed()) return run_lower_bound(lower_opt);
        if (compare_cmd->parsed()) {
            compare_opt.attr_set = compare_attr->count() > 0;
            return run_compare(compare_src, compare_opt);
        }
        if (simulate_cmd->parsed()) return run_simulate(simulate_src, simulate_opt);
        if (audit_cmd->parsed()) return run_audit(audit_src, audit_opt);
        std::cerr << "error: no subcommand\n";
        return kExitValidation;
    } catch (const ptt::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
