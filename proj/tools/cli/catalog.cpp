#include "cli.hpp"

namespace hyperlab::cli {

namespace {

json number(double dflt, std::string description)
{
    return {{"type", "number"}, {"default", dflt}, {"description", std::move(description)}};
}

json positive(double dflt, std::string description)
{
    json j = number(dflt, std::move(description));
    j["exclusiveMinimum"] = 0;
    return j;
}

json count(long long dflt, long long minimum, std::string description)
{
    return {{"type", "integer"}, {"minimum", minimum}, {"default", dflt}, {"description", std::move(description)}};
}

json flag(bool dflt, std::string description)
{
    return {{"type", "boolean"}, {"default", dflt}, {"description", std::move(description)}};
}

json choice(std::vector<std::string> options, std::string dflt, std::string description)
{
    return {{"type", "string"}, {"enum", options}, {"default", std::move(dflt)}, {"description", std::move(description)}};
}

json number_list(json dflt, std::string description, std::size_t min_items = 0)
{
    json j = {{"type", "array"}, {"items", {{"type", "number"}}}, {"description", std::move(description)}};
    if (!dflt.is_null())
        j["default"] = std::move(dflt);
    if (min_items > 0)
        j["minItems"] = min_items;
    return j;
}

json object(json properties, std::vector<std::string> required = {}, json dflt = nullptr)
{
    json j = {{"type", "object"}, {"properties", std::move(properties)}, {"additionalProperties", false}};
    if (!required.empty())
        j["required"] = required;
    if (!dflt.is_null())
        j["default"] = std::move(dflt);
    return j;
}

json weight(double kappa, std::string description)
{
    json j = object({{"kind", choice({"bracket", "one"}, "bracket", "<x>^kappa or the constant 1")},
                     {"kappa", {{"type", "number"},
                                {"minimum", 0},
                                {"maximum", 1},
                                {"default", kappa},
                                {"description", "growth exponent, ignored for kind one"}}}},
                    {}, json::object());
    j["description"] = std::move(description);
    return j;
}

json coefficient(std::string dflt_type = "example", std::string dflt_profile = "log_blowup", double omega_kappa = 0.25,
                 double phi_kappa = 0.5)
{
    json j = object(
        {{"type", choice({"example", "separable"}, std::move(dflt_type),
                         "example: the oscillating log-singular model field; separable: scale omega^2 g(t)")},
         {"kappa1", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}, {"default", 0.5},
                     {"description", "example: omega = <x>^kappa1"}}},
         {"kappa2", {{"type", "number"}, {"exclusiveMinimum", 0}, {"maximum", 1}, {"default", 1.0},
                     {"description", "example: Phi = <x>^kappa2, kappa1 <= kappa2"}}},
         {"omega", weight(omega_kappa, "separable: coefficient growth weight")},
         {"phi", weight(phi_kappa, "separable: metric weight")},
         {"profile", choice({"constant", "log_blowup", "log_squared", "power", "oscillating_log"},
                            std::move(dflt_profile), "separable: time factor g(t)")},
         {"power", number(-0.5, "separable, profile power: g(t) = t^power")},
         {"scale", positive(1.0, "separable: overall factor")},
         {"T", positive(1.0, "separable: time horizon of the field")}},
        {}, json::object());
    j["description"] = "coefficient a(t, x)";
    return j;
}

json grid_data(std::string dflt_type, std::string description)
{
    json j = object({{"type", choice({"bump", "gaussian", "sine", "zero"}, std::move(dflt_type),
                                     "bump: exp(-1/(1-r^2)) on |x-center| < width; gaussian: exp(-((x-center)/width)^2); "
                                     "sine: sin(frequency x)")},
                     {"center", number(0.0, "centre of bump or gaussian")},
                     {"width", positive(0.1, "support radius of the bump, scale of the gaussian")},
                     {"frequency", number(1.0, "angular frequency of the sine")},
                     {"amplitude", number(1.0, "overall factor")}},
                    {}, json::object());
    j["description"] = std::move(description);
    return j;
}

json scheme()
{
    json j = object({{"cfl", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}, {"default", 0.5},
                              {"description", "Courant number"}}},
                     {"grading", {{"type", "number"}, {"minimum", 1}, {"default", 2.0},
                                  {"description", "mesh t_j = T (j/N)^grading"}}},
                     {"time_steps", count(0, 0, "N; 0 picks the smallest CFL-admissible N")}},
                    {}, json::object());
    j["description"] = "leapfrog scheme settings; --cfl and --grading override";
    return j;
}

json speed_class_fields(json props, bool with_horizon = true)
{
    props["mu1"] = positive(0.5, "lower speed bound");
    props["mu2"] = positive(2.0, "upper speed bound");
    props["theta"] = choice({"log_inv", "log1p_inv"}, "log_inv", "class modulus: log(1/t) or log(1 + 1/t)");
    if (with_horizon)
        props["T"] = positive(1.0, "time horizon");
    return props;
}

json kind_schema(const std::string& kind, json props, std::vector<std::string> required = {})
{
    props["kind"] = {{"const", kind}, {"description", "experiment kind"}};
    props["seed"] = count(1, 0, "random seed");
    props["output_dir"] = {{"type", "string"}, {"default", ""}, {"description", "output directory; empty picks hyperlab-out/<kind>"}};
    required.insert(required.begin(), "kind");
    json j = object(std::move(props), std::move(required));
    j["$schema"] = "https://json-schema.org/draft/2020-12/schema";
    j["title"] = kind;
    return j;
}

std::vector<ExperimentKind> build_catalog()
{
    std::vector<ExperimentKind> c;

    c.push_back({"weights-axioms", "Check the structure-function axioms of a weight pair (omega, Phi) on grids and random pairs.",
                 kind_schema("weights-axioms",
                             {{"omega", weight(1.0, "coefficient growth weight")},
                              {"phi", weight(1.0, "metric weight")},
                              {"radius", positive(1e3, "sampling radius")},
                              {"grid_points", count(4001, 2, "deterministic grid size")},
                              {"random_pairs", count(10000, 0, "random (x, y) pairs")}})});

    c.push_back({"symbol-fit", "Fit ellipticity, singularity orders and the logarithmic blow-up constant of a coefficient.",
                 kind_schema("symbol-fit",
                             {{"coefficient", coefficient()},
                              {"t_min", positive(1e-6, "smallest sampled time")},
                              {"T", number(0.0, "largest sampled time; 0 uses the field's T")},
                              {"nt", count(60, 4, "log-spaced times")},
                              {"radius", positive(50.0, "x range [-radius, radius]")},
                              {"nx", count(201, 3, "uniform x points")}})});

    c.push_back({"excision-bounds",
                 "Fit the excision majorants and check that their time integrals stay bounded by log(1 + Phi <xi>_k).",
                 kind_schema("excision-bounds",
                             {{"coefficient", coefficient()},
                              {"k", {{"type", "number"}, {"minimum", 1}, {"default", 1.0}, {"description", "spectral parameter"}}},
                              {"N", positive(2.0, "zone constant")},
                              {"t_min", positive(1e-8, "smallest fitted time")},
                              {"T", positive(1.0, "time horizon")},
                              {"nt", count(80, 4, "log-spaced fit times")},
                              {"x_radius", positive(1e3, "largest |x|")},
                              {"xi_radius", positive(1e3, "largest |xi|")},
                              {"n", count(16, 2, "log-spaced points per phase axis")},
                              {"symmetric_tilde", flag(false, "use phi(t Phi <xi>_k / 3) in both tilde factors")},
                              {"compute_kappas", flag(false, "fit the kappa constants of the tilde family (slow)")},
                              {"kappa_points", count(12, 2, "points per axis for the kappa sups")},
                              {"bound_points", count(16, 2, "points per axis for the integral bound sup; doubled for the refinement check")},
                              {"refinement_tolerance", positive(0.05, "allowed relative change of the sup under doubling")}})});

    c.push_back({"sobolev-selftest",
                 "Self-test of the weighted Sobolev norms: Gaussian L2 norm, Bessel potential ratio, monotonicity in (s1, s2).",
                 kind_schema("sobolev-selftest",
                             {{"L", positive(20.0, "half-width of the periodic grid")},
                              {"M", count(2048, 8, "grid points, a power of two")},
                              {"k", {{"type", "number"}, {"minimum", 1}, {"default", 1.0}, {"description", "spectral parameter"}}},
                              {"xi0", number(50.0, "carrier frequency of the wave packet")},
                              {"s1", number_list({1.0, 2.0}, "Bessel orders for the packet ratio", 1)},
                              {"random_checks", count(100, 0, "random monotonicity checks")},
                              {"phi", weight(0.5, "weight of the decay index")},
                              {"tolerance", positive(0.05, "allowed relative error of the packet ratio")}})});

    c.push_back({"solve", "Leapfrog solve of u_tt - a u_xx = 0 on a graded mesh; norms, energies, optional snapshots.",
                 kind_schema("solve",
                             {{"coefficient", coefficient("separable", "constant", 0.0, 0.0)},
                              {"L", positive(8.0, "half-width of the periodic grid")},
                              {"M", count(1024, 8, "grid points, a power of two")},
                              {"T", positive(1.0, "final time")},
                              {"f1", grid_data("gaussian", "u(0, x)")},
                              {"f2", grid_data("zero", "u_t(0, x)")},
                              {"sample_times", number_list(json::array(), "output times in [0, T]; empty means [T]")},
                              {"scheme", scheme()}})});

    c.push_back({"cone", "Compute the speed constant gamma and measure mass escaping the anisotropic cone of dependence.",
                 kind_schema("cone",
                             {{"coefficient", coefficient("separable", "oscillating_log")},
                              {"L", positive(4.0, "half-width of the periodic grid")},
                              {"M", count(2048, 8, "grid points, a power of two")},
                              {"T", positive(0.5, "final time")},
                              {"x0", number(0.0, "cone vertex position")},
                              {"t0", number(0.0, "cone vertex time in (0, T]; 0 means T")},
                              {"R0", positive(0.1, "radius of the bump data")},
                              {"data_center", number(0.0, "centre of the bump data")},
                              {"gamma", {{"type", "number"}, {"exclusiveMinimum", 0},
                                         {"description", "speed constant; computed from the field when absent"}}},
                              {"gamma_grid", object({{"t_min", positive(1e-8, "smallest time")},
                                                     {"T", positive(1.0, "largest time")},
                                                     {"nt", count(200, 4, "log-spaced times")},
                                                     {"radius", positive(50.0, "x range")},
                                                     {"nx", count(401, 3, "uniform x points")}},
                                                    {}, json::object())},
                              {"mode", choice({"support_growth", "vanishing"}, "support_growth",
                                              "support_growth: mass outside the grown support; vanishing: mass inside the cone")},
                              {"snapshots", count(20, 1, "sample times in (0, t0]")},
                              {"threshold", positive(1e-6, "largest admissible mass ratio")},
                              {"scheme", scheme()}})});

    c.push_back({"activator-sweep",
                 "Activator speeds c_lambda: class membership, d_C distance to the plateau, mode energy growth per lambda.",
                 kind_schema("activator-sweep",
                             speed_class_fields({{"gamma", {{"type", "number"}, {"exclusiveMinimum", 0},
                                                            {"description", "plateau level sqrt, mu1 < gamma^2 < mu2"}}},
                                                 {"T1", positive(0.5, "end of the activation window, T1 < T")},
                                                 {"lambdas", number_list(nullptr, "frequencies", 1)},
                                                 {"delta", positive(0.6, "inf of E is taken over [delta, T]")},
                                                 {"growth_fraction", positive(0.5, "row passes when inf E >= exp(2 phi fraction)")},
                                                 {"activate", flag(true, "false runs the constant plateau as a control")},
                                                 {"tolerance", positive(1e-10, "oscillator tolerance")},
                                                 {"n_focus", count(20000, 10, "grid points per transition layer")}}),
                             {"gamma", "lambdas"})});

    c.push_back({"cascade-scan",
                 "Sum lambda_i^{2m} f_i^2 E_i(T) over a mode cascade and classify each series as convergent or divergent.",
                 kind_schema("cascade-scan",
                             {{"T", positive(1.0, "final time")},
                              {"count", count(400, 8, "modes with lambda_i = i when lambdas is empty")},
                              {"lambdas", number_list(json::array(), "explicit nondecreasing eigenvalues")},
                              {"weight", choice({"exp_sqrt", "power", "one"}, "exp_sqrt",
                                                "f_i = exp(-sqrt lambda_i), lambda_i^weight_power or 1")},
                              {"weight_power", number(-2.0, "exponent for weight power")},
                              {"ms", number_list({-1.0, 0.0, 1.0, 2.0}, "Sobolev orders m", 1)},
                              {"speed", object(speed_class_fields({{"type", choice({"constant", "oscillating_log", "activator"},
                                                                                   "constant", "speed applied to every mode")},
                                                                   {"c", positive(1.0, "constant speed")},
                                                                   {"scale", positive(1.0, "oscillating_log factor")},
                                                                   {"gamma", positive(1.0, "activator plateau sqrt")},
                                                                   {"T1", positive(0.5, "activator window end")}},
                                                                  false),
                                               {}, json::object())},
                              {"tolerance", positive(1e-10, "oscillator tolerance")},
                              {"tail_tolerance", positive(1e-3, "convergent when the second half holds less than this fraction")}})});
    return c;
}

} // namespace

const std::vector<ExperimentKind>& catalog()
{
    static const std::vector<ExperimentKind> c = build_catalog();
    return c;
}

const ExperimentKind* find_kind(std::string_view name)
{
    for (const auto& k : catalog())
        if (k.name == name)
            return &k;
    return nullptr;
}

json catalog_json()
{
    json out = json::array();
    for (const auto& k : catalog())
        out.push_back({{"kind", k.name}, {"summary", k.summary}, {"schema", k.schema}});
    return out;
}

} // namespace hyperlab::cli
