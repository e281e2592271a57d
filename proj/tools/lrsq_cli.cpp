// Command-line front end: price swaptions (European, Bermudan, American),
// export exercise-boundary data, and calibrate the model curves from quote
// files. Outputs are deterministic machine-readable records.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrsq/bermudan.hpp"
#include "lrsq/calibration.hpp"
#include "lrsq/errors.hpp"
#include "lrsq/volterra.hpp"

using json = nlohmann::ordered_json;
using namespace lrsq;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};

void require_keys(const json& obj, const std::string& path,
                  const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError("unknown key '" + path + key + "' in config");
    }
}

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(const std::string& text) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

PiecewiseConstantCurve parse_curve(const json& j, const std::string& path) {
    require_keys(j, path, {"breakpoints", "values"});
    std::vector<double> edges = j.at("breakpoints").get<std::vector<double>>();
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    return PiecewiseConstantCurve(std::move(edges), std::move(values));
}

struct RunConfig {
    ModelParams params;
    SwapSpec spec;
    int time_steps = 128;
    int n_x = 1200;
    double x_max = 0.0;
    double root_tol = 1e-8;
    std::string bermudan_exercise = "payments";
    std::optional<std::string> alpha_curve_file;
    std::optional<std::string> sigma_quote_file;
    std::string config_text;
    std::filesystem::path config_dir;
};

RunConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open config file: " + file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j, "", {"model", "trade", "solver", "output"});
    const json& model = j.at("model");
    require_keys(model, "model.",
                 {"kappa", "theta", "x0", "alpha", "sigma", "alpha_curve_file",
                  "sigma_quote_file"});
    const json& trade = j.at("trade");
    require_keys(trade, "trade.", {"t0", "delta", "n", "strike", "notional", "side"});

    const std::string side_str = trade.value("side", "payer");
    if (side_str != "payer" && side_str != "receiver")
        throw ValidationError("trade.side must be 'payer' or 'receiver'");

    PiecewiseConstantCurve alpha = model.contains("alpha")
                                       ? parse_curve(model.at("alpha"), "model.alpha.")
                                       : PiecewiseConstantCurve::flat(0.0);
    PiecewiseConstantCurve sigma = model.contains("sigma")
                                       ? parse_curve(model.at("sigma"), "model.sigma.")
                                       : PiecewiseConstantCurve::flat(0.0);

    RunConfig cfg{
        ModelParams(model.at("kappa").get<double>(), model.at("theta").get<double>(),
                    std::move(alpha), std::move(sigma), model.at("x0").get<double>()),
        SwapSpec(trade.at("t0").get<double>(), trade.at("delta").get<double>(),
                 trade.at("n").get<int>(), trade.at("strike").get<double>(),
                 trade.value("notional", 1.0),
                 side_str == "payer" ? Side::payer : Side::receiver)};
    if (j.contains("solver")) {
        const json& solver = j.at("solver");
        require_keys(solver, "solver.",
                     {"time_steps", "n_x", "x_max", "root_tol", "bermudan_exercise"});
        cfg.time_steps = solver.value("time_steps", cfg.time_steps);
        cfg.n_x = solver.value("n_x", cfg.n_x);
        cfg.x_max = solver.value("x_max", cfg.x_max);
        cfg.root_tol = solver.value("root_tol", cfg.root_tol);
        cfg.bermudan_exercise = solver.value("bermudan_exercise", cfg.bermudan_exercise);
    }
    if (j.contains("output")) require_keys(j.at("output"), "output.", {"directory"});
    if (model.contains("alpha_curve_file"))
        cfg.alpha_curve_file = model.at("alpha_curve_file").get<std::string>();
    if (model.contains("sigma_quote_file"))
        cfg.sigma_quote_file = model.at("sigma_quote_file").get<std::string>();
    cfg.config_text = text;
    cfg.config_dir = std::filesystem::absolute(file).parent_path();
    return cfg;
}

void validate_trade(const RunConfig& cfg) {
    if (!strike_admissible(cfg.params, cfg.spec.strike, cfg.spec.side))
        throw ValidationError("trade.strike outside the admissible range for this side");
    if (cfg.time_steps < 2 * cfg.spec.n)
        throw ValidationError("solver.time_steps must be at least twice the payment count");
    if (cfg.n_x < 8) throw ValidationError("solver.n_x too small");
}

std::vector<double> exercise_dates(const RunConfig& cfg) {
    if (cfg.bermudan_exercise == "payments") return LatticeSpec::payment_dates(cfg.spec);
    if (cfg.bermudan_exercise == "weekly")
        return LatticeSpec::periodic_dates(cfg.spec, 1.0 / 52.0);
    if (cfg.bermudan_exercise == "quarterly")
        return LatticeSpec::periodic_dates(cfg.spec, 0.25);
    throw ValidationError("solver.bermudan_exercise must be payments, quarterly or weekly");
}

int cmd_price(const RunConfig& cfg, const std::string& style, double t,
              std::optional<double> x_opt, std::optional<double> rate_opt,
              const std::filesystem::path& out_dir, std::uint64_t seed) {
    validate_trade(cfg);
    if (!x_opt && !rate_opt) throw ValidationError("price needs --x or --swaprate");

    double x;
    if (x_opt) {
        x = *x_opt;
        if (!(x > 0.0)) throw ValidationError("--x must be positive");
    } else {
        x = invert_swap_rate(cfg.params, cfg.spec, t, *rate_opt);
    }

    json diag;
    double price = 0.0;
    if (style == "european") {
        price = european_price(cfg.params, cfg.spec, t, x);
    } else if (style == "american") {
        SolverConfig sc;
        sc.n_steps = cfg.time_steps;
        sc.root_tol = cfg.root_tol;
        PayoffTable table = PayoffTable::build(cfg.params, cfg.spec);
        BoundarySolution bnd = solve_boundary(sc, table, cfg.params, cfg.spec, cfg.spec.side);
        price = american_price(sc, table, cfg.params, cfg.spec, bnd, t, x);
        diag["time_steps"] = static_cast<int>(bnd.grid.size()) - 1;
        diag["root_evaluations"] = bnd.root_iterations;
        diag["max_value_match_residual"] = bnd.max_match_residual;
    } else if (style == "bermudan") {
        LatticeSpec lattice =
            LatticeSpec::make(cfg.params, cfg.spec, exercise_dates(cfg), cfg.n_x, cfg.x_max);
        TransitionSet set = transition_matrices(cfg.params, lattice);
        BermudanGrid grid = bermudan_value(cfg.params, cfg.spec, lattice, set);
        price = bermudan_price(cfg.params, cfg.spec, lattice, set, grid, t, x);
        diag["exercise_dates"] = lattice.exercise_dates.size();
        diag["n_x"] = lattice.n_x;
        diag["x_max"] = lattice.x_max;
        double worst = 0.0, worst_low = 0.0;
        for (const auto& tm : set.unique) {
            worst = std::max(worst, tm.max_row_defect);
            worst_low = std::max(worst_low, tm.max_low_row_defect);
        }
        diag["max_row_mass_defect"] = worst;
        diag["max_near_origin_row_defect"] = worst_low;
    } else {
        throw ValidationError("--style must be european, bermudan or american");
    }

    json out;
    out["command"] = "price";
    out["style"] = style;
    out["side"] = cfg.spec.side == Side::payer ? "payer" : "receiver";
    out["t"] = t;
    out["x"] = x;
    if (rate_opt) out["swap_rate_input"] = *rate_opt;
    out["swap_rate_at_x"] =
        t < cfg.spec.maturity() ? swap_rate(cfg.params, cfg.spec, t, x) : cfg.spec.strike;
    out["price"] = price;
    out["notional"] = cfg.spec.notional;
    out["diagnostics"] = diag;
    out["config_hash"] = hash_hex(cfg.config_text);
    out["seed"] = seed;
    write_atomic(out_dir / "price.json", out.dump(2) + "\n");
    std::cout << "price " << format_sig(price) << "\n";
    return 0;
}

int cmd_boundary(const RunConfig& cfg, const std::string& side_str,
                 const std::filesystem::path& out_dir, std::uint64_t seed) {
    validate_trade(cfg);
    const Side side = side_str == "receiver" ? Side::receiver : Side::payer;
    if (side_str != "payer" && side_str != "receiver")
        throw ValidationError("--side must be payer or receiver");

    SolverConfig sc;
    sc.n_steps = cfg.time_steps;
    sc.root_tol = cfg.root_tol;
    PayoffTable table = PayoffTable::build(cfg.params, cfg.spec);
    BoundarySolution bnd = solve_boundary(sc, table, cfg.params, cfg.spec, side);

    std::ostringstream csv;
    csv << "t,g,h,boundary,swaprate_boundary\n";
    for (std::size_t k = 0; k < bnd.grid.size(); ++k) {
        const double t = bnd.grid[k];
        const double tq = std::min(t, cfg.spec.maturity() - 1e-12);
        csv << format_sig(t) << ',' << format_sig(table.zero_g(tq)) << ','
            << format_sig(table.zero_h(tq)) << ',' << format_sig(bnd.values[k]) << ','
            << format_sig(bnd.rate_curve[k]) << "\n";
    }
    write_atomic(out_dir / ("boundary_" + side_str + ".csv"), csv.str());

    json meta;
    meta["command"] = "boundary";
    meta["side"] = side_str;
    meta["time_steps"] = static_cast<int>(bnd.grid.size()) - 1;
    meta["root_evaluations"] = bnd.root_iterations;
    meta["max_value_match_residual"] = bnd.max_match_residual;
    meta["terminal_boundary"] = bnd.values.back();
    meta["terminal_rate"] = bnd.rate_curve.back();
    meta["config_hash"] = hash_hex(cfg.config_text);
    meta["seed"] = seed;
    write_atomic(out_dir / ("boundary_" + side_str + ".json"), meta.dump(2) + "\n");
    std::cout << "boundary rows " << bnd.grid.size() << "\n";
    return 0;
}

int cmd_calibrate(RunConfig cfg, const std::filesystem::path& out_dir, std::uint64_t seed) {
    json out;
    out["command"] = "calibrate";

    ModelParams params = cfg.params;
    if (cfg.alpha_curve_file) {
        const auto rows = read_csv(cfg.config_dir / *cfg.alpha_curve_file);
        std::vector<CurveQuote> quotes;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == 0 && rows[i].size() >= 2 && rows[i][0] == "maturity") continue;
            if (rows[i].size() != 2)
                throw ValidationError("curve file rows need maturity,discount_factor");
            quotes.push_back({std::stod(rows[i][0]), std::stod(rows[i][1])});
            if (!(quotes.back().discount_factor > 0.0))
                throw ValidationError("curve quote discount factor must be positive");
        }
        PiecewiseConstantCurve alpha = fit_alpha(params.kappa, params.theta, params.x0, quotes);
        double worst = 0.0;
        ModelParams fitted(params.kappa, params.theta, alpha, params.sigma, params.x0);
        for (const auto& q : quotes)
            worst = std::max(worst, std::abs(zcb_price(fitted, 0.0, q.maturity, params.x0) -
                                             q.discount_factor));
        params = fitted;
        out["alpha"] = {{"breakpoints", alpha.edges()}, {"values", alpha.values()},
                        {"max_residual", worst}};
    }
    if (cfg.sigma_quote_file) {
        const auto rows = read_csv(cfg.config_dir / *cfg.sigma_quote_file);
        std::vector<SwaptionQuote> quotes;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == 0 && rows[i].size() >= 2 && rows[i][0] == "expiry") continue;
            if (rows[i].size() != 5)
                throw ValidationError("quote file rows need expiry,tenor,strike,side,price");
            SwaptionQuote q;
            q.expiry = std::stod(rows[i][0]);
            q.tenor = std::stod(rows[i][1]);
            q.strike = std::stod(rows[i][2]);
            if (rows[i][3] != "payer" && rows[i][3] != "receiver")
                throw ValidationError("quote side must be payer or receiver");
            q.side = rows[i][3] == "receiver" ? Side::receiver : Side::payer;
            q.price = std::stod(rows[i][4]);
            if (q.price < 0.0) throw ValidationError("quote price must be nonnegative");
            quotes.push_back(q);
        }
        PiecewiseConstantCurve sigma = fit_sigma(params, quotes, cfg.spec.delta);
        ModelParams fitted(params.kappa, params.theta, params.alpha, sigma, params.x0);
        double worst = 0.0;
        for (const auto& q : quotes) {
            const int n_pay = static_cast<int>(std::lround(q.tenor / cfg.spec.delta));
            SwapSpec s(q.expiry, cfg.spec.delta, n_pay, q.strike, 1.0, q.side);
            worst = std::max(worst, std::abs(european_price(fitted, s, 0.0, params.x0) - q.price));
        }
        params = fitted;
        out["sigma"] = {{"breakpoints", sigma.edges()}, {"values", sigma.values()},
                        {"max_residual", worst}};
    }
    if (!cfg.alpha_curve_file && !cfg.sigma_quote_file)
        throw ValidationError("calibrate needs model.alpha_curve_file or model.sigma_quote_file");

    out["kappa"] = params.kappa;
    out["theta"] = params.theta;
    out["x0"] = params.x0;
    out["config_hash"] = hash_hex(cfg.config_text);
    out["seed"] = seed;
    write_atomic(out_dir / "calibrated_model.json", out.dump(2) + "\n");
    std::cout << "calibrated\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swaption pricing under a linear-rational square-root term-structure model"};
    app.require_subcommand(1);

    std::string config_file, out_dir = "out";
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "configuration file (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed recorded in outputs");
    };

    auto* price = app.add_subcommand("price", "price a swaption");
    std::string style = "american";
    double t = 0.0;
    std::optional<double> x_opt, rate_opt;
    add_common(price);
    price->add_option("--style", style, "european | bermudan | american");
    price->add_option("--t", t, "valuation time (years)");
    double x_val = 0.0, rate_val = 0.0;
    auto* xo = price->add_option("--x", x_val, "factor level");
    auto* ro = price->add_option("--swaprate", rate_val, "forward swap rate to invert");

    auto* boundary = app.add_subcommand("boundary", "export the exercise boundary");
    std::string side = "payer";
    add_common(boundary);
    boundary->add_option("--side", side, "payer | receiver");

    auto* calibrate = app.add_subcommand("calibrate", "fit alpha and sigma from quote files");
    add_common(calibrate);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_file);
        if (price->parsed()) {
            if (xo->count()) x_opt = x_val;
            if (ro->count()) rate_opt = rate_val;
            return cmd_price(cfg, style, t, x_opt, rate_opt, out_dir, seed);
        }
        if (boundary->parsed()) return cmd_boundary(cfg, side, out_dir, seed);
        if (calibrate->parsed()) return cmd_calibrate(cfg, out_dir, seed);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    return 0;
}
