#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fraccalc/linode.hpp"
#include "fraccalc/operators.hpp"
#include "fraccalc/roughheston.hpp"
#include "fraccalc/solver.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/stability.hpp"
#include "fraccalc/tautochrone.hpp"

namespace fraccalc::cli {

bool Args::has(const std::string& name) const {
    const auto it = values_.find(name);
    return it != values_.end() && !it->second.empty();
}

const std::string& Args::text(const std::string& name) const {
    if (!has(name)) throw UsageError("--" + name + " is required");
    return values_.at(name);
}

double Args::number(const std::string& name) const { return parse_number(text(name), "--" + name); }

std::size_t Args::count(const std::string& name) const { return parse_count(text(name), "--" + name); }

std::uint64_t Args::seed(const std::string& name) const { return parse_seed(text(name), "--" + name); }

bool Args::flag(const std::string& name) const { return has(name) && values_.at(name) == "true"; }

namespace {

DerivativeKind parse_kind(const std::string& s) {
    if (s == "caputo") return DerivativeKind::Caputo;
    if (s == "rl") return DerivativeKind::RiemannLiouville;
    throw UsageError("--kind must be caputo or rl, got '" + s + "'");
}

Method parse_method(const std::string& s) {
    if (s == "explicit") return Method::Explicit;
    if (s == "implicit") return Method::Implicit;
    if (s == "adams") return Method::Adams;
    throw UsageError("--method must be explicit, implicit or adams, got '" + s + "'");
}

void add_path_meta(Output& out, const SolutionPath& p) {
    const PathMeta& m = p.meta();
    out.meta["method"] = m.method;
    out.meta["kind"] = to_string(m.kind);
    out.meta["alpha"] = m.alpha;
    out.meta["singular_origin"] = m.singular_origin;
    out.meta["overflow"] = m.overflow;
    if (m.overflow_step) out.meta["overflow_step"] = *m.overflow_step;
}

Table path_table(const SolutionPath& p, bool scalar_value_column) {
    Table t;
    t.columns.push_back("t");
    if (scalar_value_column) {
        t.columns.push_back("value");
    } else {
        for (std::size_t i = 0; i < p.dim(); ++i) t.columns.push_back("u_" + std::to_string(i + 1));
    }
    for (std::size_t n = 0; n < p.size(); ++n) {
        std::vector<Cell> row{p.grid().node(n)};
        for (std::size_t i = 0; i < p.dim(); ++i) row.emplace_back(p.value(n, i));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- ml

Output cmd_ml(const Args& a) {
    const MLParams params(a.number("alpha"), a.number("beta"));
    Output out;
    out.table.columns = {"z", "re", "im"};
    for (const std::string& token : split(a.text("z"), ',')) {
        const complex z = parse_complex(token, "--z");
        const complex v = mittag_leffler(params, z);
        out.table.rows.push_back({token, v.real(), v.imag()});
    }
    return out;
}

// ---- differint

SampledFunction read_grid_function(const std::string& path) {
    const CsvData csv = read_csv(path);
    if (csv.header.size() < 2) throw UsageError(path + ": need columns t and f");
    if (csv.rows.size() < 2) throw UsageError(path + ": need at least two rows");
    const double tau = csv.rows[1][0] - csv.rows[0][0];
    if (csv.rows[0][0] != 0.0 || !(tau > 0.0)) throw DomainError(path + ": the grid must start at t = 0 and increase");
    std::vector<double> f;
    for (std::size_t k = 0; k < csv.rows.size(); ++k) {
        const double t = static_cast<double>(k) * tau;
        if (std::abs(csv.rows[k][0] - t) > 1e-9 * std::max(1.0, t)) {
            throw DomainError(path + ": the grid is not uniform at row " + std::to_string(k + 1));
        }
        f.push_back(csv.rows[k][1]);
    }
    const UniformGrid grid(tau, csv.rows.size() - 1);
    return SampledFunction(grid, std::move(f));
}

Output cmd_differint(const Args& a) {
    const SampledFunction f = read_grid_function(a.text("input"));
    const FracOrder alpha(a.number("alpha"));
    const std::string op = a.text("op");
    const std::string rule = a.text("quadrature");
    if (rule != "left" && rule != "trapezoid") throw UsageError("--quadrature must be left or trapezoid");
    SampledFunction r = [&] {
        if (op == "I") {
            return frac_integral_num(f, alpha, rule == "left" ? Quadrature::LeftEndpoint : Quadrature::ProductTrapezoid);
        }
        if (op == "dC") return caputo_derivative_num(f, alpha);
        if (op == "dRL") return rl_derivative_num(f, alpha);
        if (op == "dGL") return gl_derivative_num(f, alpha);
        throw UsageError("--op must be one of I, dC, dRL, dGL, got '" + op + "'");
    }();
    Output out;
    out.meta["op"] = op;
    out.meta["alpha"] = alpha.value();
    out.meta["singular_origin"] = r.singular_origin();
    out.table.columns = {"t", "value"};
    for (std::size_t n = 0; n < r.size(); ++n) out.table.rows.push_back({r.grid().node(n), r[n]});
    return out;
}

// ---- solve

struct RhsChoice {
    std::string name;
    std::map<std::string, double> params;
    std::vector<double> coefficients;
};

RhsChoice parse_rhs(const std::string& text) {
    RhsChoice c;
    const auto colon = text.find(':');
    c.name = trim(text.substr(0, colon));
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    std::map<std::string, double> defaults;
    if (c.name == "linear") {
        defaults = {{"lambda", -1.0}};
    } else if (c.name == "logistic") {
        defaults = {{"r", 1.0}, {"K", 1.0}};
    } else if (c.name == "mlnonlin") {
        defaults = {{"lambda", -1.0}, {"c", 1.0}};
    } else if (c.name == "poly") {
        c.coefficients = parse_numbers(rest, ',', "--rhs poly");
        if (c.coefficients.empty()) throw UsageError("--rhs poly needs coefficients, e.g. poly:1,0,-1");
        return c;
    } else {
        throw UsageError("unknown --rhs '" + c.name + "' (linear, logistic, mlnonlin, poly)");
    }
    c.params = defaults;
    if (!trim(rest).empty()) {
        for (const std::string& kv : split(rest, ',')) {
            const auto eq = kv.find('=');
            const std::string key = trim(kv.substr(0, eq));
            if (eq == std::string::npos || !defaults.count(key)) {
                throw UsageError("--rhs " + c.name + ": unexpected parameter '" + kv + "'");
            }
            c.params[key] = parse_number(kv.substr(eq + 1), "--rhs " + key);
        }
    }
    return c;
}

Rhs make_rhs(const RhsChoice& c, double alpha, const State& datum) {
    if (c.name == "linear") {
        const double lambda = c.params.at("lambda");
        return [lambda](double, const State& u) {
            State f(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) f[i] = lambda * u[i];
            return f;
        };
    }
    if (c.name == "logistic") {
        const double r = c.params.at("r");
        const double k = c.params.at("K");
        if (k == 0.0) throw DomainError("--rhs logistic: K must be non-zero");
        return [r, k](double, const State& u) {
            State f(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) f[i] = r * u[i] * (1.0 - u[i] / k);
            return f;
        };
    }
    if (c.name == "mlnonlin") {
        // lambda u + c (u - u*)^2 with u* = u0 E_alpha(lambda t^alpha) as exact solution
        const double lambda = c.params.at("lambda");
        const double cc = c.params.at("c");
        const FracOrder order(alpha);
        return [lambda, cc, order, datum](double t, const State& u) {
            State f(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double d = u[i] - caputo_linear_value(order, lambda, datum[i], t);
                f[i] = lambda * u[i] + cc * d * d;
            }
            return f;
        };
    }
    const std::vector<double> coef = c.coefficients;
    return [coef](double, const State& u) {
        State f(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            double acc = 0.0;
            for (std::size_t k = coef.size(); k-- > 0;) acc = acc * u[i] + coef[k];
            f[i] = acc;
        }
        return f;
    };
}

Output cmd_solve(const Args& a) {
    const DerivativeKind kind = parse_kind(a.text("kind"));
    const double alpha = a.number("alpha");
    const RhsChoice rhs = parse_rhs(a.text("rhs"));
    const State datum = parse_numbers(a.text("datum"), ',', "--datum");
    const double horizon = a.number("T");
    const UniformGrid grid = UniformGrid::from_horizon(horizon, a.number("tau"));
    Output out;
    if (a.flag("analytic")) {
        if (a.has("method")) throw UsageError("--analytic and --method are exclusive");
        if (rhs.name != "linear") throw UsageError("--analytic needs a linear right-hand side (linear:lambda=...)");
        if (datum.size() != 1) throw UsageError("--analytic solves scalar problems; give one --datum value");
        const LinearProblem p{kind, FracOrder(alpha), rhs.params.at("lambda"), datum[0], {}};
        const SolutionPath path = solve_linear(p, grid);
        add_path_meta(out, path);
        out.table = path_table(path, true);
        return out;
    }
    if (!a.has("method")) throw UsageError("give --method explicit|implicit|adams or --analytic");
    const Method method = parse_method(a.text("method"));
    const FracIVP ivp{kind, FracOrder(alpha), make_rhs(rhs, alpha, datum), datum, horizon};
    SolverOptions opt;
    opt.corrector_iterations = static_cast<int>(a.count("corrector-iterations"));
    const SolutionPath path = solve(ivp, grid, method, opt);
    add_path_meta(out, path);
    out.table = path_table(path, false);
    return out;
}

// ---- convergence

Output cmd_convergence(const Args& a) {
    const std::string preset = a.text("preset");
    DerivativeKind kind;
    if (preset == "decay") {
        kind = DerivativeKind::Caputo;
    } else if (preset == "rl-decay") {
        kind = DerivativeKind::RiemannLiouville;
    } else {
        throw UsageError("--preset must be decay or rl-decay, got '" + preset + "'");
    }
    const Method method = parse_method(a.text("method"));
    const std::vector<double> taus = parse_numbers(a.has("taus") ? a.text("taus") : "", ',', "--taus");
    if (taus.empty()) throw UsageError("--taus needs at least one step size");
    const FracOrder alpha(a.number("alpha"));
    const double lambda = a.number("lambda");
    const double datum = a.number("datum");
    const double horizon = a.number("T");

    const FracIVP ivp = FracIVP::scalar(kind, alpha, [lambda](double, double u) { return lambda * u; }, datum, horizon);
    std::vector<double> errors;
    for (double tau : taus) {
        const UniformGrid grid = UniformGrid::from_horizon(horizon, tau);
        const SolutionPath p = solve(ivp, grid, method);
        const std::size_t first = kind == DerivativeKind::Caputo ? 0 : std::max<std::size_t>(1, grid.n_steps() / 10);
        double e = 0.0;
        for (std::size_t n = first; n < p.size(); ++n) {
            const double t = grid.node(n);
            const double exact = kind == DerivativeKind::Caputo ? caputo_linear_value(alpha, lambda, datum, t)
                                                                : rl_linear_value(alpha, lambda, datum, t);
            e = std::max(e, std::abs(p.value(n) - exact));
        }
        errors.push_back(e);
    }
    Output out;
    out.meta["preset"] = preset;
    out.meta["method"] = a.text("method");
    out.meta["error_window"] = kind == DerivativeKind::Caputo ? "n >= 0" : "n >= max(1, N/10)";
    out.table.columns = {"tau", "sup_error", "observed_order"};
    for (std::size_t i = 0; i < taus.size(); ++i) {
        double order = std::nan("");
        for (std::size_t j = 0; j < taus.size(); ++j) {
            if (std::abs(taus[j] - 2.0 * taus[i]) <= 1e-12 * taus[j]) order = std::log2(errors[j] / errors[i]);
        }
        out.table.rows.push_back({taus[i], errors[i], order});
    }
    return out;
}

// ---- stability

Eigen::MatrixXd read_matrix(const std::string& spec) {
    std::vector<std::vector<double>> rows;
    std::ifstream in(spec);
    if (spec.find(';') == std::string::npos && in) {
        std::string line;
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            rows.push_back(parse_numbers(t, ',', spec));
        }
    } else {
        for (const std::string& r : split(spec, ';')) rows.push_back(parse_numbers(r, ',', "--matrix"));
    }
    const auto d = static_cast<Eigen::Index>(rows.size());
    if (d == 0) throw UsageError("--matrix is empty");
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != d) throw DomainError("--matrix must be square");
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

AxisRange parse_axis(const std::string& s) {
    const std::vector<std::string> p = split(s, ':');
    if (p.size() != 3) throw UsageError("--region axis must look like lo:hi:n, got '" + s + "'");
    return {parse_number(p[0], "--region"), parse_number(p[1], "--region"), parse_count(p[2], "--region")};
}

Output cmd_stability(const Args& a) {
    const FracOrder alpha(a.number("alpha"));
    const int given = a.has("matrix") + a.has("eig") + a.has("region");
    if (given != 1) throw UsageError("give exactly one of --matrix, --eig, --region");
    Output out;
    if (a.has("region")) {
        const std::vector<std::string> axes = split(a.text("region"), ',');
        if (axes.size() != 2) throw UsageError("--region must look like re0:re1:n,im0:im1:n");
        out.table.columns = {"re", "im", "stable"};
        for (const RegionSample& s : stability_region_sample(alpha, parse_axis(axes[0]), parse_axis(axes[1]))) {
            out.table.rows.push_back({s.re, s.im, s.stable ? 1.0 : 0.0});
        }
        return out;
    }
    SpectrumReport r;
    if (a.has("matrix")) {
        r = classify_system(alpha, read_matrix(a.text("matrix")), parse_kind(a.text("kind")));
    } else {
        if (parse_kind(a.text("kind")) != DerivativeKind::Caputo) {
            throw ModelRestriction("stability: only the Caputo (Matignon) criterion is implemented");
        }
        std::vector<complex> eig;
        for (const std::string& e : split(a.text("eig"), ';')) {
            const std::vector<double> v = parse_numbers(e, ',', "--eig");
            if (v.empty() || v.size() > 2) throw UsageError("--eig entries are re or re,im");
            eig.emplace_back(v[0], v.size() == 2 ? v[1] : 0.0);
        }
        r = classify_spectrum(alpha, eig);
    }
    out.default_format = "json";
    out.meta["system"] = to_string(r.system);
    out.report["system"] = to_string(r.system);
    out.report["eigenvalues"] = json::array();
    out.table.columns = {"re", "im", "verdict"};
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        const complex l = r.eigenvalues[i];
        out.report["eigenvalues"].push_back({{"re", l.real()}, {"im", l.imag()}, {"verdict", to_string(r.verdicts[i])}});
        out.table.rows.push_back({l.real(), l.imag(), std::string(to_string(r.verdicts[i]))});
    }
    return out;
}

// ---- tautochrone

std::function<double(double)> fall_time(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("--T must be const:k, sqrt:c or table:<csv>");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "const") {
        const double k = parse_number(arg, "--T const");
        return [k](double) { return k; };
    }
    if (kind == "sqrt") {
        const double c = parse_number(arg, "--T sqrt");
        return [c](double y) { return c * std::sqrt(y); };
    }
    if (kind == "table") {
        const CsvData csv = read_csv(arg);
        if (csv.header.size() < 2 || csv.rows.size() < 2) throw UsageError(arg + ": need columns y,T and two rows");
        std::vector<double> ys, ts;
        for (const auto& row : csv.rows) {
            if (!ys.empty() && !(row[0] > ys.back())) throw DomainError(arg + ": y must increase");
            ys.push_back(row[0]);
            ts.push_back(row[1]);
        }
        return [ys, ts](double y) {
            if (y < ys.front() || y > ys.back()) {
                if (y == 0.0) return std::nan("");  // extrapolated by the sampler
                throw DomainError("fall-time table does not cover y = " + std::to_string(y));
            }
            const auto it = std::upper_bound(ys.begin(), ys.end(), y);
            const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - ys.begin()), ys.size() - 1);
            const double w = (y - ys[k - 1]) / (ys[k] - ys[k - 1]);
            return ts[k - 1] + w * (ts[k] - ts[k - 1]);
        };
    }
    throw UsageError("--T must be const:k, sqrt:c or table:<csv>");
}

Output cmd_tautochrone(const Args& a) {
    const AbelProblem p{fall_time(a.text("T")), a.number("g"), a.number("ymax"), a.count("n")};
    const SampledFunction s = solve_abel(p);
    const SampledFunction psi = curve_from_arclength(s);
    Output out;
    out.table.columns = {"y", "s", "psi"};
    for (std::size_t n = 0; n < s.size(); ++n) out.table.rows.push_back({s.grid().node(n), s[n], psi[n]});
    return out;
}

// ---- heston

Output cmd_heston(const Args& a) {
    RoughHestonParams p;
    p.alpha = a.number("alpha");
    p.kappa = a.number("kappa");
    p.theta = a.number("theta");
    if (a.has("xi")) p.xi = a.number("xi");
    p.rho = a.number("rho");
    p.v0 = a.number("v0");
    p.s0 = a.number("s0");
    p.mu = a.number("mu");
    const std::string trunc = a.text("truncation");
    if (trunc == "partial") {
        p.truncation = Truncation::Partial;
    } else if (trunc == "full") {
        p.truncation = Truncation::Full;
    } else {
        throw UsageError("--truncation must be partial or full");
    }
    McRun run{p, UniformGrid::from_horizon(a.number("T"), a.number("tau")), a.count("paths"), a.seed("seed"),
              a.has("dump-paths")};
    const std::string model = a.text("model");
    McStatistics st = [&] {
        if (model == "rough") return simulate_rough_heston(run);
        if (model == "classical") return simulate_classical_heston(run);
        if (model == "gbm") return simulate_gbm(run);
        throw UsageError("--model must be rough, classical or gbm");
    }();

    if (run.keep_paths) {
        std::ofstream dump(a.text("dump-paths"));
        if (!dump) throw UsageError("cannot write '" + a.text("dump-paths") + "'");
        const std::size_t nodes = st.grid.size();
        dump << "path,t,V,S\n";
        for (std::size_t i = 0; i < st.n_paths; ++i) {
            for (std::size_t n = 0; n < nodes; ++n) {
                dump << i << ',' << format_number(st.grid.node(n)) << ',' << format_number(st.paths_v[i * nodes + n])
                     << ',' << format_number(st.paths_s[i * nodes + n]) << '\n';
            }
        }
    }
    Output out;
    out.meta["model"] = model;
    out.meta["truncation"] = to_string(p.truncation);
    out.meta["xi"] = p.vol_of_vol();
    out.meta["n_paths"] = st.n_paths;
    out.meta["seed"] = run.seed;
    out.table.columns = {"t", "mean_V", "sd_V", "mean_S", "sd_S"};
    for (std::size_t n = 0; n < st.grid.size(); ++n) {
        out.table.rows.push_back({st.grid.node(n), st.mean_v[n], st.sd_v[n], st.mean_s[n], st.sd_s[n]});
    }
    return out;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs = {
        {"ml",
         "Mittag-Leffler function E_{alpha,beta}(z)",
         {{"alpha", "", "alpha > 0"},
          {"beta", "1", "beta"},
          {"z", "", "comma-separated arguments, e.g. 1,-2.5,0.5+2i"}},
         cmd_ml},
        {"differint",
         "Fractional integral or derivative of a sampled function",
         {{"input", "", "CSV with header; columns t (uniform from 0) and f"},
          {"op", "", "I, dC, dRL or dGL"},
          {"alpha", "", "order"},
          {"quadrature", "left", "rule for I: left or trapezoid"}},
         cmd_differint},
        {"solve",
         "Solve a fractional initial-value problem",
         {{"kind", "caputo", "caputo or rl"},
          {"alpha", "", "order in (0, 1]"},
          {"rhs", "", "linear:lambda=L | logistic:r=R,K=K | mlnonlin:lambda=L,c=C | poly:c0,c1,..."},
          {"datum", "", "initial datum, comma-separated for systems"},
          {"tau", "", "step size (2^-k accepted)"},
          {"T", "", "horizon"},
          {"method", "", "explicit, implicit or adams"},
          {"analytic", "", "closed-form solution of a linear scalar problem", true},
          {"corrector-iterations", "1", "Adams corrector passes"}},
         cmd_solve},
        {"convergence",
         "Error table of a solver against the closed-form linear solution",
         {{"preset", "decay", "decay (Caputo) or rl-decay"},
          {"method", "", "explicit, implicit or adams"},
          {"taus", "", "comma-separated step sizes"},
          {"alpha", "0.5", "order"},
          {"lambda", "-1", "decay rate"},
          {"datum", "1", "initial datum"},
          {"T", "1", "horizon"}},
         cmd_convergence},
        {"stability",
         "Matignon stability of a spectrum, a matrix, or a sampled region",
         {{"alpha", "", "order in (0, 2)"},
          {"matrix", "", "CSV file of rows, or inline rows 'a,b;c,d'"},
          {"eig", "", "eigenvalues 're,im;re,im'"},
          {"region", "", "re0:re1:n,im0:im1:n"},
          {"kind", "caputo", "caputo or rl"}},
         cmd_stability},
        {"tautochrone",
         "Curve with prescribed fall time (Abel's problem)",
         {{"T", "", "const:k, sqrt:c or table:<csv with y,T>"},
          {"g", "9.81", "gravitational acceleration"},
          {"ymax", "1", "largest height"},
          {"n", "4096", "number of grid steps"}},
         cmd_tautochrone},
        {"heston",
         "Monte-Carlo moments of the rough or classical Heston model, or GBM",
         {{"model", "rough", "rough, classical or gbm"},
          {"alpha", "1", "order in (0.5, 1]"},
          {"kappa", "2", "mean-reversion rate"},
          {"theta", "0.04", "long-run variance"},
          {"xi", "", "vol-of-vol (defaults to kappa)"},
          {"rho", "0", "correlation of the asset and variance shocks"},
          {"v0", "0.04", "initial variance"},
          {"s0", "100", "initial price"},
          {"mu", "0", "drift"},
          {"tau", "2^-10", "step size"},
          {"T", "1", "horizon"},
          {"paths", "1000", "number of paths"},
          {"seed", "0", "64-bit seed"},
          {"truncation", "partial", "negative-variance handling: partial or full"},
          {"dump-paths", "", "write every path to this CSV file"}},
         cmd_heston},
    };
    return specs;
}

}  // namespace fraccalc::cli
