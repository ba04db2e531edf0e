#include "robust_nv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace robust_nv::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& msg) { throw CliError(kSchema, "schema error: " + msg); }

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) schema_error(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) schema_error(where + ": unknown key \"" + key + "\"");
    }
}

double number(const Json& obj, const std::string& key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(where + ": missing \"" + key + "\"");
    if (!it->is_number()) schema_error(where + ": \"" + key + "\" must be a number");
    return it->get<double>();
}

std::optional<double> optional_number(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, key, where);
}

std::vector<double> number_array(const Json& value, const std::string& where) {
    if (!value.is_array()) schema_error(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number()) schema_error(where + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::uint64_t unsigned_integer(const Json& value, const std::string& where) {
    if (!value.is_number_unsigned()) schema_error(where + " must be a nonnegative integer");
    return value.get<std::uint64_t>();
}

GroundTruthSpec parse_ground_truth(const Json& obj, const std::string& where) {
    check_keys(obj, {"family", "params", "points", "probs"}, where);
    GroundTruthSpec gt;
    const auto fam = obj.find("family");
    if (fam == obj.end() || !fam->is_string()) schema_error(where + ": \"family\" must be a string");
    gt.family = fam->get<std::string>();
    if (obj.contains("params")) gt.params = number_array(obj["params"], where + ".params");
    if (obj.contains("points")) gt.points = number_array(obj["points"], where + ".points");
    if (obj.contains("probs")) gt.probs = number_array(obj["probs"], where + ".probs");
    try {
        gt.build();
    } catch (const std::invalid_argument& e) {
        schema_error(where + ": " + e.what());
    }
    return gt;
}

MomentSpec parse_moments(const Json& obj, const std::string& where) {
    MomentSpec s;
    s.a = number(obj, "a", where);
    s.mu = number(obj, "mu", where);
    s.b = number(obj, "b", where);
    s.delta = number(obj, "mad", where);
    return s;
}

Json moments_json(const MomentSpec& s) {
    Json j;
    j["a"] = s.a;
    j["mu"] = s.mu;
    j["b"] = s.b;
    j["mad"] = s.delta;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(kParse, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt10(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

Json num(double x) { return Json(round10(x)); }

Json num_array(std::span<const double> xs) {
    Json j = Json::array();
    for (double x : xs) j.push_back(num(x));
    return j;
}

Instance to_instance(const InstanceFile& file, double budget) {
    Instance inst;
    inst.items = file.items;
    inst.budget = budget;
    return inst;
}

std::vector<GroundTruthDistribution> ground_truths(const InstanceFile& file, const std::string& command) {
    std::vector<GroundTruthDistribution> dists;
    for (std::size_t i = 0; i < file.items.size(); ++i) {
        if (!file.ground_truth[i]) {
            throw CliError(kSchema, "item " + std::to_string(i) + ": ground_truth required for " + command);
        }
        dists.push_back(file.ground_truth[i]->build());
    }
    return dists;
}

SweepInput sweep_input(const InstanceFile& file, const std::string& command) {
    SweepInput input;
    input.dists = ground_truths(file, command);
    for (std::size_t i = 0; i < file.items.size(); ++i) {
        input.econ.push_back(file.items[i].econ);
        MomentSpec spec = file.items[i].spec;
        if (!spec.beta) spec.beta = input.dists[i].beta_skew();
        if (!spec.sigma) spec.sigma = input.dists[i].sigma();
        input.specs.push_back(spec);
    }
    if (file.grid_points) input.grid_points = *file.grid_points;
    if (file.seed) input.seed = *file.seed;
    return input;
}

Json policy_json(const std::string& model, double budget, const OrderingPolicy& pol) {
    Json j;
    j["model"] = model;
    j["budget"] = num(budget);
    j["objective"] = num(pol.objective);
    j["spent"] = num(pol.spent);
    Json items = Json::array();
    for (std::size_t i = 0; i < pol.q.size(); ++i) {
        Json it;
        it["item"] = i;
        it["q"] = num(pol.q[i]);
        if (!pol.piece_reached.empty()) it["piece"] = pol.piece_reached[i];
        items.push_back(std::move(it));
    }
    j["items"] = std::move(items);
    return j;
}

struct Options {
    std::optional<std::uint64_t> seed;
    std::string file;
    std::optional<double> budget;
    std::optional<double> gamma;
    std::optional<std::size_t> grid;
    std::optional<int> case_id;
    std::optional<std::string> margin;
    std::string out;
    bool echo = false;
    bool lower = false;
};

std::vector<double> budgets_of(const InstanceFile& file, const Options& opt, const std::string& command) {
    if (opt.budget) return {*opt.budget};
    if (file.budget) return {*file.budget};
    if (!file.budget_grid.empty()) return file.budget_grid;
    throw CliError(kSchema, command + " needs a budget (--budget, \"budget\" or \"budget_grid\")");
}

double single_budget(const InstanceFile& file, const Options& opt, const std::string& command) {
    if (opt.budget) return *opt.budget;
    if (file.budget) return *file.budget;
    throw CliError(kSchema, command + " needs a budget (--budget or \"budget\")");
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

int cmd_validate(const Options& opt, std::ostream& out) {
    const auto file = load_instance(opt.file);
    if (opt.echo) {
        out << to_json(file);
        return kOk;
    }
    Json j;
    j["valid"] = true;
    j["items"] = file.items.size();
    Json notes = Json::array();
    for (std::size_t i = 0; i < file.items.size(); ++i) {
        for (const auto& n : validate_moment_spec(file.items[i].spec).notes) {
            notes.push_back("item " + std::to_string(i) + ": " + n);
        }
    }
    j["notes"] = std::move(notes);
    emit(out, j);
    return kOk;
}

int cmd_solve(const Options& opt, std::ostream& out) {
    const auto file = load_instance(opt.file);
    const auto budgets = budgets_of(file, opt, "solve");
    Instance inst = to_instance(file, budgets.front());
    if (opt.lower && !inst.has_betas()) throw CliError(kSchema, "beta required for lower bound");
    const auto list = opt.lower ? build_lower_ranked_list(inst) : build_ranked_list(inst);
    Json results = Json::array();
    for (double b : budgets) {
        if (!(b >= 0.0)) throw CliError(kSchema, "budget must be nonnegative");
        const auto pol = opt.lower ? lower_bound_policy(inst, list, b) : knapsack_allocate(inst, list, b);
        results.push_back(policy_json(opt.lower ? "robust-lower" : "robust-upper", b, pol));
    }
    emit(out, results.size() == 1 ? results[0] : results);
    return kOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
    SweepInput input;
    if (!opt.file.empty()) {
        if (opt.case_id || opt.margin) throw CliError(kUsage, "--case and --margin apply only without an instance file");
        input = sweep_input(load_instance(opt.file), "sweep");
    } else {
        ExperimentConfig cfg;
        if (opt.case_id) cfg.case_id = *opt.case_id;
        if (opt.margin) cfg.margin = parse_margin_regime(*opt.margin);
        input = make_experiment(cfg);
    }
    if (opt.grid) input.grid_points = *opt.grid;
    if (opt.seed) input.seed = *opt.seed;
    const auto csv = sweep_csv(budget_sweep(input));
    if (opt.out.empty()) {
        out << csv;
    } else {
        write_atomically(opt.out, csv);
    }
    return kOk;
}

int cmd_evaluate(const Options& opt, std::ostream& out) {
    const auto file = load_instance(opt.file);
    const auto input = sweep_input(file, "evaluate");
    std::vector<double> budgets;
    if (opt.budget || file.budget || !file.budget_grid.empty()) {
        budgets = budgets_of(file, opt, "evaluate");
    } else {
        budgets = {optimal_budget(input)};
    }
    Json results = Json::array();
    for (double b : budgets) {
        Json j;
        j["budget"] = num(b);
        Json policies = Json::array();
        for (const auto& row : evaluate_policies(input, b)) {
            Json p;
            p["model"] = to_string(row.policy);
            p["q"] = num_array(row.q);
            p["cost_upper"] = num(row.cost_upper);
            p["cost_lower"] = num(row.cost_lower);
            p["cost_true"] = num(row.cost_true);
            p["evai"] = num(row.evai);
            policies.push_back(std::move(p));
        }
        j["policies"] = std::move(policies);
        results.push_back(std::move(j));
    }
    emit(out, results.size() == 1 ? results[0] : results);
    return kOk;
}

int cmd_ext_multi(const Options& opt, std::ostream& out) {
    const auto file = load_instance(opt.file);
    std::vector<BudgetRow> rows;
    const auto budget = opt.budget ? opt.budget : file.budget;
    if (budget) {
        BudgetRow row;
        for (const auto& it : file.items) row.coeffs.push_back(it.econ.c);
        row.budget = *budget;
        rows.push_back(std::move(row));
    }
    rows.insert(rows.end(), file.extra_constraints.begin(), file.extra_constraints.end());
    if (rows.empty()) throw CliError(kSchema, "ext-multi needs a budget or \"extra_constraints\"");
    const auto res = multi_constraint_policy(file.items, rows);
    Json j;
    j["model"] = "multi-constraint";
    j["status"] = to_string(res.status);
    if (res.status == LpStatus::Optimal) {
        j["objective"] = num(res.policy.objective);
        j["spent"] = num(res.policy.spent);
        j["q"] = num_array(res.policy.q);
        j["shadow_prices"] = num_array(res.shadow_prices);
    }
    emit(out, j);
    return res.status == LpStatus::Optimal ? kOk : kSolver;
}

int cmd_ext_yield(const Options& opt, std::ostream& out) {
    const auto file = load_instance(opt.file);
    if (file.yields.empty()) throw CliError(kSchema, "ext-yield needs \"options.yields\"");
    const double budget = single_budget(file, opt, "ext-yield");
    const auto pol = yield_robust_policy(file.items, file.yields, budget);
    Json j;
    j["model"] = "yield";
    j["budget"] = num(budget);
    j["objective"] = num(pol.objective);
    j["spent"] = num(pol.spent);
    j["q"] = num_array(pol.q);
    emit(out, j);
    return kOk;
}

int cmd_ext_cvar(const Options& opt, std::ostream& out) {
    const auto file = load_instance(opt.file);
    const double budget = single_budget(file, opt, "ext-cvar");
    const double gamma = opt.gamma ? *opt.gamma : file.gamma.value_or(0.0);
    const auto res = cvar_robust_policy(file.items, budget, gamma);
    Json j;
    j["model"] = "cvar";
    j["budget"] = num(budget);
    j["gamma"] = num(gamma);
    j["objective"] = num(res.policy.objective);
    j["var"] = num(res.theta);
    j["spent"] = num(res.policy.spent);
    j["q"] = num_array(res.policy.q);
    emit(out, j);
    return kOk;
}

}  // namespace

GroundTruthDistribution GroundTruthSpec::build() const {
    auto need = [&](std::size_t n) {
        if (params.size() != n) {
            throw std::invalid_argument(family + " needs " + std::to_string(n) + " params");
        }
        if (!points.empty() || !probs.empty()) throw std::invalid_argument(family + " takes no points/probs");
    };
    if (family == "uniform") {
        need(2);
        return GroundTruthDistribution::uniform(params[0], params[1]);
    }
    if (family == "beta") {
        need(4);
        return GroundTruthDistribution::beta(params[0], params[1], params[2], params[3]);
    }
    if (family == "triangular") {
        need(3);
        return GroundTruthDistribution::triangular(params[0], params[1], params[2]);
    }
    if (family == "discrete") {
        if (!params.empty()) throw std::invalid_argument("discrete takes points and probs, not params");
        return GroundTruthDistribution::discrete(points, probs);
    }
    throw std::invalid_argument("unknown family \"" + family + "\"");
}

InstanceFile parse_instance(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw CliError(kParse, std::string("parse error: ") + e.what());
    }
    check_keys(root, {"version", "items", "budget", "budget_grid", "options"}, "instance");

    InstanceFile file;
    if (root.contains("version")) {
        if (!root["version"].is_number_integer() || root["version"].get<int>() != 1) {
            schema_error("unsupported version (expected 1)");
        }
    }
    if (!root.contains("items") || !root["items"].is_array() || root["items"].empty()) {
        schema_error("\"items\" must be a non-empty array");
    }

    std::vector<std::string> moment_errors;
    const auto& items = root["items"];
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string where = "item " + std::to_string(i);
        const auto& it = items[i];
        check_keys(it, {"c", "m", "d", "a", "mu", "b", "mad", "beta", "sigma", "ground_truth"}, where);
        Item item;
        item.econ = {number(it, "c", where), number(it, "m", where), number(it, "d", where)};
        item.spec = parse_moments(it, where);
        item.spec.beta = optional_number(it, "beta", where);
        item.spec.sigma = optional_number(it, "sigma", where);
        try {
            require_valid(item.econ);
        } catch (const std::invalid_argument& e) {
            schema_error(where + ": " + e.what());
        }
        for (const auto& v : validate_moment_spec(item.spec).violations) moment_errors.push_back(where + ": " + v);
        file.items.push_back(item);
        if (it.contains("ground_truth")) {
            file.ground_truth.push_back(parse_ground_truth(it["ground_truth"], where + ".ground_truth"));
        } else {
            file.ground_truth.emplace_back();
        }
    }
    const std::size_t n = file.items.size();

    if (root.contains("budget") && root.contains("budget_grid")) schema_error("give either budget or budget_grid");
    file.budget = optional_number(root, "budget", "instance");
    if (file.budget && !(*file.budget >= 0.0)) schema_error("budget must be nonnegative");
    if (root.contains("budget_grid")) {
        file.budget_grid = number_array(root["budget_grid"], "budget_grid");
        for (double b : file.budget_grid) {
            if (!(b >= 0.0)) schema_error("budget_grid entries must be nonnegative");
        }
    }

    if (root.contains("options")) {
        const auto& o = root["options"];
        check_keys(o, {"seed", "grid_points", "gamma", "yields", "extra_constraints"}, "options");
        if (o.contains("seed")) file.seed = unsigned_integer(o["seed"], "options.seed");
        if (o.contains("grid_points")) {
            file.grid_points = unsigned_integer(o["grid_points"], "options.grid_points");
            if (*file.grid_points < 2) schema_error("options.grid_points must be at least 2");
        }
        file.gamma = optional_number(o, "gamma", "options");
        if (file.gamma && !(*file.gamma >= 0.0 && *file.gamma < 1.0)) schema_error("options.gamma must lie in [0, 1)");
        if (o.contains("yields")) {
            const auto& ys = o["yields"];
            if (!ys.is_array() || ys.size() != n) schema_error("options.yields needs one entry per item");
            for (std::size_t i = 0; i < n; ++i) {
                const std::string where = "yield " + std::to_string(i);
                check_keys(ys[i], {"a", "mu", "b", "mad"}, where);
                const auto y = parse_moments(ys[i], where);
                for (const auto& v : validate_moment_spec(y).violations) moment_errors.push_back(where + ": " + v);
                if (y.b > 1.0) moment_errors.push_back(where + ": support must lie in [0, 1]");
                file.yields.push_back(y);
            }
        }
        if (o.contains("extra_constraints")) {
            const auto& rows = o["extra_constraints"];
            if (!rows.is_array()) schema_error("options.extra_constraints must be an array");
            for (std::size_t j = 0; j < rows.size(); ++j) {
                const std::string where = "constraint " + std::to_string(j);
                check_keys(rows[j], {"coeffs", "budget"}, where);
                BudgetRow row;
                if (!rows[j].contains("coeffs")) schema_error(where + ": missing \"coeffs\"");
                row.coeffs = number_array(rows[j]["coeffs"], where + ".coeffs");
                if (row.coeffs.size() != n) schema_error(where + ": needs one coefficient per item");
                for (double v : row.coeffs) {
                    if (!(v >= 0.0)) schema_error(where + ": coefficients must be nonnegative");
                }
                row.budget = number(rows[j], "budget", where);
                file.extra_constraints.push_back(std::move(row));
            }
        }
    }

    if (!moment_errors.empty()) {
        std::string msg = "infeasible moments:";
        for (const auto& e : moment_errors) msg += "\n  " + e;
        throw CliError(kMoments, msg);
    }
    return file;
}

InstanceFile load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string to_json(const InstanceFile& file) {
    Json root;
    root["version"] = file.version;
    Json items = Json::array();
    for (std::size_t i = 0; i < file.items.size(); ++i) {
        const auto& it = file.items[i];
        Json j;
        j["c"] = it.econ.c;
        j["m"] = it.econ.m;
        j["d"] = it.econ.d;
        j.update(moments_json(it.spec));
        if (it.spec.beta) j["beta"] = *it.spec.beta;
        if (it.spec.sigma) j["sigma"] = *it.spec.sigma;
        if (i < file.ground_truth.size() && file.ground_truth[i]) {
            const auto& gt = *file.ground_truth[i];
            Json g;
            g["family"] = gt.family;
            if (!gt.params.empty()) g["params"] = gt.params;
            if (!gt.points.empty()) g["points"] = gt.points;
            if (!gt.probs.empty()) g["probs"] = gt.probs;
            j["ground_truth"] = std::move(g);
        }
        items.push_back(std::move(j));
    }
    root["items"] = std::move(items);
    if (file.budget) root["budget"] = *file.budget;
    if (!file.budget_grid.empty()) root["budget_grid"] = file.budget_grid;

    Json o = Json::object();
    if (file.seed) o["seed"] = *file.seed;
    if (file.grid_points) o["grid_points"] = *file.grid_points;
    if (file.gamma) o["gamma"] = *file.gamma;
    if (!file.yields.empty()) {
        Json ys = Json::array();
        for (const auto& y : file.yields) ys.push_back(moments_json(y));
        o["yields"] = std::move(ys);
    }
    if (!file.extra_constraints.empty()) {
        Json rows = Json::array();
        for (const auto& r : file.extra_constraints) rows.push_back({{"coeffs", r.coeffs}, {"budget", r.budget}});
        o["extra_constraints"] = std::move(rows);
    }
    if (!o.empty()) root["options"] = std::move(o);
    return root.dump(2) + "\n";
}

double round10(double x) {
    if (!std::isfinite(x)) return x;
    const double r = std::strtod(fmt10(x).c_str(), nullptr);
    return r == 0.0 ? 0.0 : r;
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename to " + path + ": " + ec.message());
    }
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "B,policy,item,q,cost_upper,cost_lower,cost_true,evai\n";
    for (const auto& r : rows) {
        const std::string tail = "," + fmt10(r.cost_upper) + "," + fmt10(r.cost_lower) + "," + fmt10(r.cost_true) +
                                 "," + fmt10(r.evai) + "\n";
        const std::string head = fmt10(r.budget) + "," + to_string(r.policy) + ",";
        for (std::size_t i = 0; i < r.q.size(); ++i) s += head + std::to_string(i) + "," + fmt10(r.q[i]) + tail;
    }
    return s;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust multi-item newsvendor under mean, MAD and range information", "robust_nv"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Options opt;
    app.add_option("--seed", opt.seed, "Seed recorded with stochastic runs");

    auto file_arg = [&](CLI::App* sub) { sub->add_option("file", opt.file, "Instance JSON")->required(); };
    auto budget_arg = [&](CLI::App* sub) { sub->add_option("--budget", opt.budget, "Budget (overrides the file)"); };

    auto* validate = app.add_subcommand("validate", "Check an instance file");
    file_arg(validate);
    validate->add_flag("--echo", opt.echo, "Print the instance in canonical form");

    auto* solve = app.add_subcommand("solve", "Robust ordering policy");
    file_arg(solve);
    budget_arg(solve);
    solve->add_flag("--lower", opt.lower, "Best-case (lower-bound) model; needs beta for every item");

    auto* sweep = app.add_subcommand("sweep", "Budget sweep of every policy, as CSV");
    sweep->add_option("file", opt.file, "Instance JSON with ground truths (default: benchmark experiment)");
    sweep->add_option("--grid", opt.grid, "Number of budget grid points")->check(CLI::Range(2, 1000000));
    sweep->add_option("--case", opt.case_id, "Benchmark demand case")->check(CLI::Range(1, 9));
    sweep->add_option("--margin", opt.margin, "Benchmark margin regime")
        ->check(CLI::IsMember({"low", "average", "high"}));
    sweep->add_option("--out", opt.out, "Output path (default: stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "EVAI of every policy against the ground truths");
    file_arg(evaluate);
    budget_arg(evaluate);

    auto* multi = app.add_subcommand("ext-multi", "Robust policy under several budget rows");
    file_arg(multi);
    budget_arg(multi);

    auto* yield = app.add_subcommand("ext-yield", "Robust policy with random yield");
    file_arg(yield);
    budget_arg(yield);

    auto* cvar = app.add_subcommand("ext-cvar", "Robust CVaR policy");
    file_arg(cvar);
    budget_arg(cvar);
    cvar->add_option("--gamma", opt.gamma, "CVaR level in [0, 1)")->check(CLI::Range(0.0, 1.0));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    try {
        if (*validate) return cmd_validate(opt, out);
        if (*solve) return cmd_solve(opt, out);
        if (*sweep) return cmd_sweep(opt, out);
        if (*evaluate) return cmd_evaluate(opt, out);
        if (*multi) return cmd_ext_multi(opt, out);
        if (*yield) return cmd_ext_yield(opt, out);
        if (*cvar) return cmd_ext_cvar(opt, out);
    } catch (const CliError& e) {
        err << e.what() << "\n";
        if (e.code() == kUsage) err << app.help();
        return e.code();
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kSchema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kSolver;
    }
    err << app.help();
    return kUsage;
}

}  // namespace robust_nv::cli
