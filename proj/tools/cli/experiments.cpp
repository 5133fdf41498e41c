#include "experiments.hpp"

#include <hyperlab/hyperlab.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>

namespace hyperlab::cli {

namespace {

namespace fs = std::filesystem;

// ---- config decoding --------------------------------------------------------

WeightSpec weight_from(const json& j)
{
    return j.at("kind") == "one" ? WeightSpec::one() : WeightSpec::bracket(j.at("kappa").get<double>());
}

TimeProfile profile_from(const json& j)
{
    const auto name = j.at("profile").get<std::string>();
    if (name == "constant")
        return TimeProfile::constant(1.0);
    if (name == "log_blowup")
        return TimeProfile::log_blowup();
    if (name == "log_squared")
        return TimeProfile::log_squared();
    if (name == "power")
        return TimeProfile::power(j.at("power").get<double>());
    return TimeProfile::oscillating_log();
}

CoefficientField coefficient_from(const json& j)
{
    if (j.at("type") == "example")
        return example_coefficient(j.at("kappa1").get<double>(), j.at("kappa2").get<double>());
    const WeightPair pair{weight_from(j.at("omega")), weight_from(j.at("phi"))};
    validate_weight(pair.omega, "omega");
    validate_weight(pair.phi, "phi");
    return separable_coefficient(pair, profile_from(j), j.at("scale").get<double>(), j.at("T").get<double>());
}

GridFunction grid_data_from(const json& j, double L, std::size_t M)
{
    const auto type = j.at("type").get<std::string>();
    const double c = j.at("center").get<double>(), w = j.at("width").get<double>();
    const double freq = j.at("frequency").get<double>(), amp = j.at("amplitude").get<double>();
    if (type == "zero")
        return GridFunction(L, M);
    return GridFunction::sample(L, M, [&](double x) {
        if (type == "sine")
            return amp * std::sin(freq * x);
        const double r = (x - c) / w;
        if (type == "gaussian")
            return amp * std::exp(-r * r);
        return std::fabs(r) < 1.0 ? amp * std::exp(-1.0 / (1.0 - r * r)) : 0.0;
    });
}

SchemeConfig scheme_from(const json& j, const RunOptions& opt)
{
    SchemeConfig s;
    s.cfl = opt.cfl.value_or(j.at("cfl").get<double>());
    s.grading = opt.grading.value_or(j.at("grading").get<double>());
    s.time_steps = j.at("time_steps").get<std::size_t>();
    return s;
}

SpeedClass class_from(const json& j, double T)
{
    SpeedClass c;
    c.mu1 = j.at("mu1").get<double>();
    c.mu2 = j.at("mu2").get<double>();
    c.theta = Theta::from_id(j.at("theta").get<std::string>());
    c.T = T;
    return c;
}

// ---- output -----------------------------------------------------------------

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path)
    {
        if (!out_)
            throw std::runtime_error("cannot write " + path.string());
        row(header);
    }

    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string cell(double v) { return format_double(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

class Writer {
public:
    Writer(const ExperimentContext& ctx, ExperimentResult& res) : ctx_(ctx), res_(res) {}

    void json_file(const std::string& name, const json& j)
    {
        std::ofstream out(ctx_.out_dir / name);
        if (!out)
            throw std::runtime_error("cannot write " + (ctx_.out_dir / name).string());
        out << j.dump(2) << '\n';
        res_.outputs.push_back(name);
    }

    Csv csv(const std::string& name, const std::vector<std::string>& header)
    {
        res_.outputs.push_back(name);
        return Csv(ctx_.out_dir / name, header);
    }

    void grid(const std::string& stem, const GridFunction& g, const std::string& provenance)
    {
        fs::create_directories((ctx_.out_dir / stem).parent_path());
        save_grid_function(g, ctx_.out_dir / stem, provenance, ctx_.timestamp);
        res_.outputs.push_back(stem + ".bin");
        res_.outputs.push_back(stem + ".json");
    }

private:
    const ExperimentContext& ctx_;
    ExperimentResult& res_;
};

// ---- kinds ------------------------------------------------------------------

ExperimentResult weights_axioms(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const WeightPair pair{weight_from(cfg["omega"]), weight_from(cfg["phi"])};
    AxiomSampling s;
    s.radius = cfg["radius"].get<double>();
    s.grid_points = cfg["grid_points"].get<std::size_t>();
    s.random_pairs = cfg["random_pairs"].get<std::size_t>();
    s.seed = cfg["seed"].get<std::uint64_t>();
    const auto reports = check_weight_axioms(pair, s);

    auto csv = w.csv("axioms.csv", {"axiom", "pass", "samples", "violations", "r", "s", "C"});
    std::size_t failed = 0;
    for (const auto& r : reports) {
        failed += r.pass ? 0 : 1;
        csv.row({r.axiom, cell(r.pass), cell(r.samples), cell(r.violations), cell(r.constants.r), cell(r.constants.s),
                 cell(r.constants.C)});
    }
    w.json_file("axioms.json", {{"omega", pair.omega}, {"phi", pair.phi}, {"sampling", s}, {"reports", reports}});
    res.summary = {{"axioms", reports.size()}, {"failed", failed}};
    res.verdict = failed == 0 ? Verdict::ok : Verdict::failure;
    res.message = std::to_string(reports.size() - failed) + "/" + std::to_string(reports.size()) + " axiom checks hold";
    return res;
}

ExperimentResult symbol_fit(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const auto field = coefficient_from(cfg["coefficient"]);
    CoefficientGrid g;
    g.t_min = cfg["t_min"].get<double>();
    g.T = cfg["T"].get<double>();
    g.nt = cfg["nt"].get<std::size_t>();
    g.radius = cfg["radius"].get<double>();
    g.nx = cfg["nx"].get<std::size_t>();
    require(g.T >= 0.0, "symbol-fit: T must be >= 0");
    const double horizon = g.T > 0 ? g.T : field.T;
    require(g.t_min < std::fmin(horizon, 1.0), "symbol-fit: need t_min < min(T, 1)");

    const auto ell = estimate_ellipticity(field, g);
    const auto sing = fit_singularity_orders(field, g);
    const auto blow = check_log_blowup(field, g);
    const double lower = check_lower_order(field, g);
    w.json_file("symbol_fit.json", {{"field", field.name},
                                    {"ellipticity", {{"C0", ell.C0}, {"t", ell.t}, {"x", ell.x}, {"pass", ell.pass}}},
                                    {"singularity", sing},
                                    {"log_blowup", blow},
                                    {"lower_order_constant", lower}});
    res.summary = {{"C0", ell.C0}, {"delta1", sing.delta1}, {"delta2", sing.delta2}, {"log_blowup_sup", blow.sup},
                   {"diverging", blow.diverging}};
    const bool ok = ell.pass && blow.pass;
    res.verdict = ok ? Verdict::ok : Verdict::failure;
    res.message = ok ? "coefficient satisfies ellipticity and the logarithmic blow-up bound"
                     : (blow.diverging ? "a / (omega^2 log(1+1/t)) diverges toward t = 0" : "ellipticity fails");
    return res;
}

ExperimentResult excision_bounds(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const auto field = coefficient_from(cfg["coefficient"]);
    PhaseParams p;
    p.k = cfg["k"].get<double>();
    p.N = cfg["N"].get<double>();
    PhaseGrid g;
    g.t_min = cfg["t_min"].get<double>();
    g.T = cfg["T"].get<double>();
    g.nt = cfg["nt"].get<std::size_t>();
    g.x_radius = cfg["x_radius"].get<double>();
    g.xi_radius = cfg["xi_radius"].get<double>();
    g.n = cfg["n"].get<std::size_t>();
    require(g.t_min < g.T, "excision-bounds: need t_min < T");
    MajorantOptions mo;
    mo.symmetric_tilde = cfg["symmetric_tilde"].get<bool>();
    mo.compute_kappas = cfg["compute_kappas"].get<bool>();
    mo.kappa_points = cfg["kappa_points"].get<std::size_t>();
    const auto m = build_majorants(field, p, g, mo);

    const auto n = cfg["bound_points"].get<std::size_t>();
    const auto xs = nonnegative_log_grid(1e-2, g.x_radius, n);
    const auto xis = nonnegative_log_grid(1e-2, g.xi_radius, n);
    const auto table = parallel_map<std::vector<IntegralBound>>(xs.size(), [&](std::size_t i) {
        std::vector<IntegralBound> row;
        for (double xi : xis)
            row.push_back(integral_log_bound(m, xs[i], xi, g.T));
        return row;
    });
    auto csv = w.csv("integral_bounds.csv", {"x", "xi", "integral", "ratio", "error", "converged"});
    double sup = -1.0;
    bool converged = true;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xis.size(); ++j) {
            const auto& b = table[i][j];
            sup = std::fmax(sup, b.ratio);
            converged = converged && b.converged;
            csv.row({cell(xs[i]), cell(xis[j]), cell(b.integral), cell(b.ratio), cell(b.error), cell(b.converged)});
        }
    const auto fine = integral_log_bound_sup(m, nonnegative_log_grid(1e-2, g.x_radius, 2 * n),
                                             nonnegative_log_grid(1e-2, g.xi_radius, 2 * n), g.T);
    const double rel = std::fabs(fine.value - sup) / sup;
    const double tol = cfg["refinement_tolerance"].get<double>();
    const bool stable = std::isfinite(fine.value) && rel <= tol;
    converged = converged && fine.converged;

    w.json_file("majorants.json", {{"majorants", m},
                                   {"integral_bound", {{"sup", sup},
                                                       {"sup_refined", fine.value},
                                                       {"relative_change", rel},
                                                       {"argmax", {{"x", fine.x}, {"xi", fine.xi}}},
                                                       {"converged", converged},
                                                       {"stable", stable}}}});
    res.summary = {{"C1", m.C1}, {"C2", m.C2}, {"sup", sup}, {"sup_refined", fine.value}, {"bounded", m.bounded},
                   {"converged", converged}};
    res.verdict = m.bounded && converged && stable ? Verdict::ok : Verdict::failure;
    res.message = res.verdict == Verdict::ok ? "majorant integrals bounded by log(1 + Phi <xi>_k)"
                                             : "majorant constants or integral bound not stable";
    return res;
}

ExperimentResult sobolev_selftest(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const double L = cfg["L"].get<double>(), k = cfg["k"].get<double>(), xi0 = cfg["xi0"].get<double>();
    const auto M = cfg["M"].get<std::size_t>();
    const auto g = GridFunction::sample(L, M, [](double x) { return std::exp(-0.5 * x * x); });
    const double gauss_err = std::fabs(l2_norm(g) - std::pow(M_PI, 0.25));

    GridFunction packet(L, M);
    for (std::size_t j = 0; j < packet.size(); ++j) {
        const double x = packet.x(j);
        packet[j] = std::exp(-0.5 * x * x) * std::polar(1.0, xi0 * x);
    }
    const double tol = cfg["tolerance"].get<double>();
    double worst = 0.0;
    auto csv = w.csv("bessel.csv", {"s1", "ratio", "expected", "relative_error"});
    for (double s1 : cfg["s1"].get<std::vector<double>>()) {
        const double r = l2_norm(bessel_potential(packet, s1, k)) / l2_norm(packet);
        const double expect = std::pow(xi_bracket(xi0, k), s1);
        const double e = std::fabs(r - expect) / expect;
        worst = std::fmax(worst, e);
        csv.row({cell(s1), cell(r), cell(expect), cell(e)});
    }

    std::mt19937_64 rng(cfg["seed"].get<std::uint64_t>());
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::uniform_real_distribution<double> s(-2.0, 2.0), ds(0.0, 1.5), kk(1.0, 5.0), wd(0.5, 3.0);
    const auto phi = weight_from(cfg["phi"]);
    validate_weight(phi, "phi");
    std::size_t violations = 0;
    const auto checks = cfg["random_checks"].get<std::size_t>();
    for (std::size_t i = 0; i < checks; ++i) {
        const double c = nrm(rng), width = wd(rng), xi = 5.0 * nrm(rng);
        GridFunction v(10.0, 256);
        for (std::size_t j = 0; j < v.size(); ++j) {
            const double x = v.x(j);
            v[j] = std::exp(-(x - c) * (x - c) / (width * width)) * std::polar(1.0, xi * x) + 1e-3 * cplx(nrm(rng), nrm(rng));
        }
        const SobolevIndex a{s(rng), s(rng)};
        const SobolevIndex b{a.s1 + ds(rng), a.s2 + ds(rng)};
        const double kr = kk(rng);
        if (sobolev_norm(v, b, kr, phi) < sobolev_norm(v, a, kr, phi) * (1.0 - 1e-13))
            ++violations;
    }
    const bool ok = gauss_err <= 1e-6 && worst <= tol && violations == 0;
    res.summary = {{"gaussian_norm_error", gauss_err}, {"bessel_worst_relative_error", worst},
                   {"monotonicity_checks", checks}, {"monotonicity_violations", violations}};
    w.json_file("sobolev.json", res.summary);
    res.verdict = ok ? Verdict::ok : Verdict::failure;
    res.message = ok ? "Sobolev norm self-test passed" : "Sobolev norm self-test failed";
    return res;
}

ExperimentResult solve_kind(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const double L = cfg["L"].get<double>();
    const auto M = cfg["M"].get<std::size_t>();
    CauchyProblem p;
    p.field = coefficient_from(cfg["coefficient"]);
    p.f1 = grid_data_from(cfg["f1"], L, M);
    p.f2 = grid_data_from(cfg["f2"], L, M);
    p.T = cfg["T"].get<double>();
    auto times = cfg["sample_times"].get<std::vector<double>>();
    if (times.empty())
        times = {p.T};
    const auto scheme = scheme_from(cfg["scheme"], ctx.options);
    const auto sol = solve(p, scheme, times);

    auto csv = w.csv("solve.csv", {"t", "l2_norm", "energy", "max_abs"});
    for (std::size_t i = 0; i < sol.snapshots.size(); ++i) {
        const auto& s = sol.snapshots[i];
        double mx = 0.0;
        for (const auto& z : s.u.values())
            mx = std::fmax(mx, std::abs(z));
        csv.row({cell(s.t), cell(l2_norm(s.u)), cell(discrete_energy(p.field, std::fmax(s.t, 1e-300), s.u, s.v)),
                 cell(mx)});
        if (ctx.options.snapshots) {
            const std::string prov = "solve t=" + format_double(s.t);
            w.grid("snapshots/u_" + std::to_string(i), s.u, prov);
            w.grid("snapshots/ut_" + std::to_string(i), s.v, prov);
        }
    }
    res.summary = {{"steps", sol.steps}, {"mesh_nodes", sol.mesh.size()}, {"cfl", scheme.cfl},
                   {"grading", scheme.grading}, {"support_bound_ok", sol.support_bound_ok}};
    w.json_file("solve.json", res.summary);
    res.verdict = sol.support_bound_ok ? Verdict::ok : Verdict::failure;
    res.message = "solved to T=" + format_double(p.T) + " in " + std::to_string(sol.steps) + " steps";
    return res;
}

ExperimentResult cone_kind(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const double L = cfg["L"].get<double>();
    const auto M = cfg["M"].get<std::size_t>();
    CauchyProblem p;
    p.field = coefficient_from(cfg["coefficient"]);
    p.T = cfg["T"].get<double>();
    json bump = {{"type", "bump"}, {"center", cfg["data_center"]}, {"width", cfg["R0"]}, {"frequency", 0.0},
                 {"amplitude", 1.0}};
    p.f1 = grid_data_from(bump, L, M);
    p.f2 = GridFunction(L, M);

    json gamma_json;
    double gamma = 0.0;
    if (cfg.contains("gamma")) {
        gamma = cfg["gamma"].get<double>();
        gamma_json = {{"gamma", gamma}, {"source", "config"}};
    } else {
        const auto& gg = cfg["gamma_grid"];
        GammaGrid grid;
        grid.t_min = gg["t_min"].get<double>();
        grid.T = gg["T"].get<double>();
        grid.nt = gg["nt"].get<std::size_t>();
        grid.radius = gg["radius"].get<double>();
        grid.nx = gg["nx"].get<std::size_t>();
        const auto g = compute_gamma(p.field, grid);
        gamma = g.gamma;
        gamma_json = g;
        gamma_json["source"] = "computed";
        if (!g.stable)
            throw NumericalError("gamma sup not stable under grid refinement: " + format_double(g.gamma) + " -> "
                                 + format_double(g.gamma_refined));
    }
    const double t0 = cfg["t0"].get<double>() > 0.0 ? cfg["t0"].get<double>() : p.T;
    ConeOptions opt;
    opt.R0 = cfg["R0"].get<double>();
    opt.mode = cfg["mode"] == "vanishing" ? ConeMode::vanishing : ConeMode::support_growth;
    opt.snapshots = cfg["snapshots"].get<std::size_t>();
    const auto rep = cone_check(p, scheme_from(cfg["scheme"], ctx.options), {cfg["x0"].get<double>(), t0, gamma}, opt);

    auto csv = w.csv("cone.csv", {"t", "radius", "ratio", "norm"});
    for (const auto& r : rep.rows)
        csv.row({cell(r.t), cell(r.radius), cell(r.ratio), cell(r.norm)});
    const double threshold = cfg["threshold"].get<double>();
    json report = rep;
    report["gamma"] = gamma_json;
    report["threshold"] = threshold;
    w.json_file("cone.json", report);
    res.summary = {{"gamma", gamma}, {"max_ratio", rep.max_ratio}, {"max_slope", rep.max_slope},
                   {"support_bound_ok", rep.support_bound_ok}, {"inconclusive", rep.inconclusive}};
    if (rep.inconclusive) {
        res.verdict = Verdict::inconclusive;
        res.message = "cone check inconclusive: " + rep.note;
    } else if (rep.max_ratio <= threshold && rep.support_bound_ok) {
        res.message = "mass ratio " + format_double(rep.max_ratio) + " within threshold";
    } else {
        res.verdict = Verdict::failure;
        res.message = "mass ratio " + format_double(rep.max_ratio) + " exceeds threshold or support bound violated";
    }
    return res;
}

ExperimentResult activator_sweep_kind(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    SweepConfig sc;
    sc.gamma = cfg["gamma"].get<double>();
    sc.T1 = cfg["T1"].get<double>();
    sc.cls = class_from(cfg, cfg["T"].get<double>());
    sc.lambdas = cfg["lambdas"].get<std::vector<double>>();
    for (double l : sc.lambdas)
        require(l > 0.0, "activator-sweep: lambdas must be positive");
    sc.delta = cfg["delta"].get<double>();
    sc.growth_fraction = cfg["growth_fraction"].get<double>();
    sc.activate = cfg["activate"].get<bool>();
    sc.mode.tolerance = cfg["tolerance"].get<double>();
    sc.n_focus = cfg["n_focus"].get<std::size_t>();
    require(sc.cls.mu1 < sc.gamma * sc.gamma && sc.gamma * sc.gamma < sc.cls.mu2,
            "activator-sweep: need mu1 < gamma^2 < mu2");
    require(sc.T1 > 0.0 && sc.T1 < sc.cls.T, "activator-sweep: need 0 < T1 < T");
    const auto rep = activator_sweep(sc);

    auto csv = w.csv("sweep.csv", {"lambda", "phi", "a_lambda", "b_lambda", "theta_lambda", "dC", "infE", "logE_T",
                                   "logE_over_loglambda", "verdict"});
    std::map<std::string, std::size_t> tally;
    for (const auto& r : rep.rows) {
        ++tally[to_string(r.status)];
        csv.row({cell(r.lambda), cell(r.phi), cell(r.a), cell(r.b), cell(r.theta_lambda), cell(r.dC), cell(r.infE),
                 cell(r.logE_T), cell(r.ratio), to_string(r.status)});
    }
    w.json_file("sweep.json", rep);
    res.summary = {{"rows", rep.rows.size()}, {"status_counts", tally}, {"trend", to_string(rep.trend)},
                   {"run", {{"gamma", sc.gamma}, {"T1", sc.T1}, {"mu1", sc.cls.mu1}, {"mu2", sc.cls.mu2},
                            {"theta", sc.cls.theta.id}, {"tolerance", sc.mode.tolerance}, {"delta", sc.delta},
                            {"seed", cfg["seed"]}}}};
    if (rep.all_skipped) {
        res.verdict = Verdict::inconclusive;
        res.message = "every lambda is below the admissibility threshold";
    } else {
        res.message = "growth trend " + to_string(rep.trend);
    }
    return res;
}

ExperimentResult cascade_kind(const json& cfg, const ExperimentContext& ctx)
{
    ExperimentResult res;
    Writer w(ctx, res);
    const double T = cfg["T"].get<double>();
    auto lambdas = cfg["lambdas"].get<std::vector<double>>();
    if (lambdas.empty())
        for (std::size_t i = 1; i <= cfg["count"].get<std::size_t>(); ++i)
            lambdas.push_back(static_cast<double>(i));
    for (double l : lambdas)
        require(l > 0.0, "cascade-scan: lambdas must be positive");

    const auto& sp = cfg["speed"];
    const auto type = sp["type"].get<std::string>();
    std::function<Speed(std::size_t, double)> speed;
    if (type == "constant") {
        speed = [c = sp["c"].get<double>()](std::size_t, double) { return Speed::constant(c); };
    } else if (type == "oscillating_log") {
        speed = [s = sp["scale"].get<double>()](std::size_t, double) { return Speed::oscillating_log(s); };
    } else {
        const SpeedClass cls = class_from(sp, T);
        const double gamma = sp["gamma"].get<double>(), T1 = sp["T1"].get<double>();
        require(cls.mu1 < gamma * gamma && gamma * gamma < cls.mu2, "cascade-scan: need mu1 < gamma^2 < mu2");
        require(T1 > 0.0 && T1 < T, "cascade-scan: need 0 < T1 < T");
        // Modes below the admissibility threshold see the plateau gamma^2.
        speed = [=](std::size_t, double lambda) {
            if (!admissible(lambda, gamma, T1)) {
                Speed s = Speed::constant(gamma * gamma);
                s.name = "plateau";
                return s;
            }
            return make_activator_speed(make_activator_params(gamma, T1, lambda, cls));
        };
    }
    std::function<double(double)> weight;
    const auto wk = cfg["weight"].get<std::string>();
    if (wk == "exp_sqrt")
        weight = [](double l) { return std::exp(-std::sqrt(l)); };
    else if (wk == "power")
        weight = [p = cfg["weight_power"].get<double>()](double l) { return std::pow(l, p); };
    else
        weight = [](double) { return 1.0; };

    ModeOptions mo;
    mo.tolerance = cfg["tolerance"].get<double>();
    const auto rep = cascade_loss_scan(speed, lambdas, weight, T, cfg["ms"].get<std::vector<double>>(), mo,
                                       cfg["tail_tolerance"].get<double>());

    auto modes = w.csv("modes.csv", {"index", "lambda", "f", "E_unit", "E_T", "activated"});
    for (const auto& m : rep.modes)
        modes.row({cell(m.index), cell(m.lambda), cell(m.f), cell(m.E_unit), cell(m.E_T), cell(m.activated)});
    std::vector<std::string> header = {"m"};
    for (auto n : rep.truncations)
        header.push_back("S_" + std::to_string(n));
    for (const char* h : {"tail_fraction", "last_term", "max_term", "verdict"})
        header.push_back(h);
    auto series = w.csv("cascade.csv", header);
    json rows = json::array();
    bool inconclusive = false;
    for (const auto& r : rep.rows) {
        std::vector<std::string> cells = {cell(r.m)};
        for (double s : r.partial_sums)
            cells.push_back(cell(s));
        for (double v : {r.tail_fraction, r.last_term, r.max_term})
            cells.push_back(cell(v));
        cells.push_back(to_string(r.verdict));
        series.row(cells);
        inconclusive = inconclusive || r.verdict == SeriesVerdict::inconclusive;
        rows.push_back({{"m", r.m}, {"verdict", to_string(r.verdict)}, {"tail_fraction", r.tail_fraction}});
    }
    res.summary = {{"modes", rep.modes.size()}, {"speed", type}, {"rows", rows}};
    w.json_file("cascade.json", res.summary);
    res.verdict = inconclusive ? Verdict::inconclusive : Verdict::ok;
    res.message = inconclusive ? "at least one series is inconclusive at this truncation" : "every series classified";
    return res;
}

} // namespace

ExperimentResult run_experiment(const json& config, const ExperimentContext& ctx)
{
    using Runner = ExperimentResult (*)(const json&, const ExperimentContext&);
    static const std::map<std::string, Runner> runners = {
        {"weights-axioms", weights_axioms}, {"symbol-fit", symbol_fit},
        {"excision-bounds", excision_bounds}, {"sobolev-selftest", sobolev_selftest},
        {"solve", solve_kind},               {"cone", cone_kind},
        {"activator-sweep", activator_sweep_kind}, {"cascade-scan", cascade_kind}};
    return runners.at(config.at("kind").get<std::string>())(config, ctx);
}

} // namespace hyperlab::cli
