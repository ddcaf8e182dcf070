#include "vforge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/scans.hpp"

namespace vforge::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------------------
// config helpers

double json_number(const json& v) {
    if (v.is_null()) return kInfinity;  // JSON has no infinity; null marks an unbounded end
    if (!v.is_number()) throw ConfigError("expected a number, got " + v.dump());
    return v.get<double>();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<Piece> pieces_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw ConfigError(std::string(what) + " must be a list of pieces");
    std::vector<Piece> out;
    for (const json& p : arr) out.push_back(piece_from_json(p));
    return out;
}

json pieces_to_json(const std::vector<Piece>& pieces) {
    json arr = json::array();
    for (const Piece& p : pieces) arr.push_back(piece_to_json(p));
    return arr;
}

template <typename T>
void read_if(const json& doc, const char* key, T& field) {
    if (doc.contains(key) && !doc.at(key).is_null()) field = doc.at(key).get<T>();
}

template <typename T>
void read_if(const json& doc, const char* key, std::optional<T>& field) {
    if (doc.contains(key) && !doc.at(key).is_null()) field = doc.at(key).get<T>();
}

std::string format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::Human: return "human";
        case OutputFormat::Kv: return "kv";
        default: return "csv";
    }
}

unsigned parse_targets(const std::string& text) {
    unsigned mask = 0;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "spatial") mask |= kSmoothSpatial;
        else if (item == "momentum") mask |= kSmoothMomentum;
        else if (item == "angular") mask |= kSmoothAngular;
        else if (item == "all") mask |= kSmoothAll;
        else throw ConfigError("unknown mollify target '" + item + "'");
    }
    if (mask == 0) throw ConfigError("mollify target list is empty");
    return mask;
}

// ---------------------------------------------------------------------------------------
// output helpers

KeyValues family_values(const Family& family) {
    KeyValues kv{{"family", std::string(family_name(family))}};
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, UniformBall>) {
                kv.emplace_back("r", format_number(f.R));
                kv.emplace_back("p", format_number(f.P));
                kv.emplace_back("alpha", format_number(std::nan("")));
            } else if constexpr (std::is_same_v<T, CoreHalo>) {
                kv.emplace_back("r1", format_number(f.R1));
                kv.emplace_back("r2", format_number(f.R2));
                kv.emplace_back("r3", format_number(f.R3));
                kv.emplace_back("p", format_number(f.P));
                kv.emplace_back("alpha", format_number(f.alpha));
            } else {
                kv.emplace_back("r1", format_number(f.R1));
                kv.emplace_back("r2", format_number(f.R2));
                kv.emplace_back("r3", format_number(f.R3));
                kv.emplace_back("n", format_number(f.n));
                kv.emplace_back("p", format_number(f.P));
                kv.emplace_back("alpha", format_number(std::nan("")));
            }
            kv.emplace_back("a", format_number(f.a));
        },
        family);
    return kv;
}

KeyValues report_values(const FunctionalReport& r, const std::string& prefix) {
    return {
        {prefix + "method", std::string(to_string(r.method))},
        {prefix + "norm_constant", format_number(r.norm_constant)},
        {prefix + "mass", format_number(r.mass)},
        {prefix + "kinetic", format_number(r.kinetic)},
        {prefix + "potential", format_number(r.potential)},
        {prefix + "total_energy", format_number(r.total_energy)},
        {prefix + "virial", format_number(r.virial)},
        {prefix + "l32_norm", format_number(r.l32_norm)},
    };
}

void append(KeyValues& to, const KeyValues& from) { to.insert(to.end(), from.begin(), from.end()); }

KeyValues threshold_values(const SeparableAnsatz& ansatz) {
    try {
        return {{"a_star", format_number(solve_threshold_a(virial_spatial_momentum_factor(ansatz)))}};
    } catch (const UnreachableThreshold&) {
        return {{"a_star", "unreachable"}};
    }
}

// Where documents go: --out file if given, else stdout.
class Sink {
public:
    explicit Sink(const RunConfig& config, std::ostream& fallback) : stream_(&fallback) {
        if (!config.out.empty()) {
            file_.open(config.out, std::ios::binary);
            if (!file_) throw ConfigError("cannot open output file " + config.out);
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }
    bool to_file() const { return file_.is_open(); }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

// ---------------------------------------------------------------------------------------
// subcommands

struct ResolvedFamily {
    std::optional<Family> family;
    SeparableAnsatz ansatz;
};

ResolvedFamily resolve(const RunConfig& config) {
    if (config.family == FamilyKind::Custom) return {std::nullopt, custom_ansatz(*config.custom)};
    Family family = family_from_config(config);
    const bool fixed_alpha = config.family == FamilyKind::CoreHalo && config.alpha.has_value();
    if (!fixed_alpha) family = solve_zero_energy(family);
    return {family, build_ansatz(family)};
}

int cmd_certify(const RunConfig& config, std::ostream& out) {
    const ResolvedFamily r = resolve(config);
    const Certificate cert = check_criteria(r.ansatz, config.tol_energy);
    KeyValues kv = config_echo(config);
    if (r.family) append(kv, family_values(*r.family));
    else kv.emplace_back("family", "custom");
    append(kv, certificate_values(cert));
    append(kv, threshold_values(r.ansatz));
    Sink sink(config, out);
    write_document(sink.stream(), kv, config.format);
    return cert.pass ? kExitPass : kExitFail;
}

int cmd_report(const RunConfig& config, std::ostream& out) {
    const ResolvedFamily r = resolve(config);
    const FunctionalReport closed = evaluate(r.ansatz, Method::ClosedForm);
    const FunctionalReport quad = evaluate(r.ansatz, Method::Quadrature);
    KeyValues kv = config_echo(config);
    if (r.family) append(kv, family_values(*r.family));
    else kv.emplace_back("family", "custom");
    append(kv, report_values(closed, "closed_form."));
    append(kv, report_values(quad, "quadrature."));
    const double pairs[][2] = {{closed.mass, quad.mass},           {closed.kinetic, quad.kinetic},
                               {closed.potential, quad.potential}, {closed.virial, quad.virial},
                               {closed.l32_norm, quad.l32_norm}};
    double worst = 0.0;
    for (const auto& p : pairs) {
        const double s = std::max(std::abs(p[0]), std::abs(p[1]));
        if (s > 0.0) worst = std::max(worst, std::abs(p[0] - p[1]) / s);
    }
    kv.emplace_back("max_rel_discrepancy", format_number(worst));
    append(kv, threshold_values(r.ansatz));
    Sink sink(config, out);
    write_document(sink.stream(), kv, config.format);
    return kExitPass;
}

int cmd_mollify(const RunConfig& config, std::ostream& out) {
    const MollifySpec spec = mollify_spec(config);
    KeyValues kv = config_echo(config);
    FunctionalReport step{};
    Certificate cert{};
    if (config.family == FamilyKind::Custom) {
        const SeparableAnsatz base = custom_ansatz(*config.custom);
        step = evaluate(base, Method::Quadrature);
        const SeparableAnsatz smooth = mollify(base, spec);
        cert = certify(evaluate(smooth, Method::Quadrature), config.tol_energy);
        kv.emplace_back("family", "custom");
    } else {
        const Family family = family_from_config(config);
        const Family solved = solve_zero_energy(family);
        step = evaluate(build_ansatz(solved), Method::ClosedForm);
        const Rebalanced rb = rebalance(family, spec, config.tol_energy);
        cert = rb.certificate;
        append(kv, family_values(rb.family));
        const SeparableAnsatz step_ansatz = build_ansatz(solved);
        kv.emplace_back("delta.spatial", format_number(resolved_delta(step_ansatz.eta(), spec)));
        kv.emplace_back("delta.momentum", format_number(resolved_delta(step_ansatz.phi(), spec)));
        kv.emplace_back("delta.angular", format_number(resolved_delta(step_ansatz.angular(), spec)));
    }
    for (const Drift& d : drift_table(step, cert.report)) {
        kv.emplace_back("drift." + d.name + ".step", format_number(d.step));
        kv.emplace_back("drift." + d.name + ".smooth", format_number(d.smooth));
        kv.emplace_back("drift." + d.name + ".abs_change", format_number(d.abs_change()));
    }
    append(kv, certificate_values(cert));
    Sink sink(config, out);
    write_document(sink.stream(), kv, config.format);
    return cert.pass ? kExitPass : kExitFail;
}

void write_csv_with_echo(std::ostream& out, const RunConfig& config,
                         std::span<const scans::ScanRow> rows) {
    for (const auto& [k, v] : config_echo(config)) out << "# " << k << '=' << v << '\n';
    scans::write_csv(out, rows);
}

int cmd_scan(RunConfig config, std::ostream& out, std::ostream& err) {
    const scans::ScanGrid grid{scans::log_grid(*config.p_min, *config.p_max, *config.p_count),
                               scans::linear_grid(config.a_min, config.a_max, config.a_count)};
    const scans::FloorResult floor = scans::uniform_ball_floor(grid);
    const bool ok = floor.min_virial > -0.45;
    KeyValues summary{{"min_virial", format_number(floor.min_virial)},
                      {"argmin_P", format_number(floor.argmin_P)},
                      {"argmin_a", format_number(floor.argmin_a)},
                      {"crosscheck_discrepancy", format_number(floor.crosscheck_discrepancy)}};
    const std::string verdict = std::string("min_virial > -0.45: ") + (ok ? "OK" : "FAIL");
    Sink sink(config, out);
    if (config.format == OutputFormat::Csv) {
        write_csv_with_echo(sink.stream(), config, floor.rows);
        std::ostream& s = sink.to_file() ? out : err;
        write_document(s, summary, OutputFormat::Kv);
        s << verdict << '\n';
    } else {
        KeyValues kv = config_echo(config);
        append(kv, summary);
        write_document(sink.stream(), kv, config.format);
        sink.stream() << verdict << '\n';
    }
    return ok ? kExitPass : kExitFail;
}

int cmd_asymptotics(RunConfig config, std::ostream& out, std::ostream& err) {
    const auto grid = scans::log_grid(*config.p_min, *config.p_max, *config.p_count);
    const scans::ScalingResult res = scans::asymptotic_scaling(grid, config.a);
    std::vector<scans::ScanRow> rows;
    for (const auto& pt : res.points)
        if (pt.solved) rows.push_back(pt.row);
    KeyValues summary{{"alpha_slope", format_number(res.alpha_fit.slope)},
                      {"alpha_intercept", format_number(res.alpha_fit.intercept)},
                      {"alpha_max_residual", format_number(res.alpha_fit.max_residual)},
                      {"virial_slope", format_number(res.virial_fit.slope)},
                      {"virial_intercept", format_number(res.virial_fit.intercept)},
                      {"virial_max_residual", format_number(res.virial_fit.max_residual)},
                      {"points_solved", std::to_string(res.alpha_fit.points)}};
    if (config.threshold)
        summary.emplace_back("witness_P",
                             format_number(scans::virial_unbounded_below(
                                 *config.threshold, scans::log_grid(1.0, *config.p_max, 401),
                                 config.a)));
    Sink sink(config, out);
    if (config.format == OutputFormat::Csv) {
        write_csv_with_echo(sink.stream(), config, rows);
        write_document(sink.to_file() ? out : err, summary, OutputFormat::Kv);
    } else {
        KeyValues kv = config_echo(config);
        append(kv, summary);
        write_document(sink.stream(), kv, config.format);
    }
    return kExitPass;
}

// ---------------------------------------------------------------------------------------
// command line

struct Flags {
    std::optional<std::string> family, target, format, out, config_file;
    std::optional<double> r1, r2, r3, p, n, a, alpha, delta, delta_rel, tol_energy;
    std::optional<double> p_min, p_max, a_min, a_max, threshold;
    std::optional<std::size_t> p_count, a_count;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "JSON run configuration (flags override it)");
    cmd->add_option("--family", f.family, "uniform | core-halo | monotonic | custom");
    cmd->add_option("--r1", f.r1, "core radius");
    cmd->add_option("--r2", f.r2, "inner halo / atmosphere radius");
    cmd->add_option("--r3", f.r3, "outer radius");
    cmd->add_option("--p", f.p, "momentum radius P");
    cmd->add_option("--n", f.n, "power-law exponent of the monotonic atmosphere");
    cmd->add_option("--a", f.a, "angular cutoff a in (-1, 1]");
    cmd->add_option("--alpha", f.alpha, "halo weight (skips the zero-energy solve)");
    cmd->add_option("--delta", f.delta, "absolute ramp half-width");
    cmd->add_option("--delta-rel", f.delta_rel, "ramp half-width relative to the narrowest piece");
    cmd->add_option("--target", f.target, "spatial,momentum,angular or all");
    cmd->add_option("--tol-energy", f.tol_energy, "tolerance on |E|");
    cmd->add_option("--format", f.format, "human | kv | csv");
    cmd->add_option("--out", f.out, "output file (default stdout)");
    cmd->add_option("--p-min", f.p_min, "smallest P of the sweep");
    cmd->add_option("--p-max", f.p_max, "largest P of the sweep");
    cmd->add_option("--p-count", f.p_count, "number of log-spaced P values");
    cmd->add_option("--a-min", f.a_min, "smallest cutoff of the sweep");
    cmd->add_option("--a-max", f.a_max, "largest cutoff of the sweep");
    cmd->add_option("--a-count", f.a_count, "number of cutoff values");
    cmd->add_option("--threshold", f.threshold, "report the smallest P with V below this");
}

RunConfig resolve_config(const Flags& f, const std::string& command) {
    RunConfig c;
    if (f.config_file) {
        std::ifstream in(*f.config_file);
        if (!in) throw ConfigError("cannot read config file " + *f.config_file);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (f.family) doc["family"] = *f.family;
        c = from_json(doc);
    } else {
        const FamilyKind fallback = command == "scan" ? FamilyKind::Uniform : FamilyKind::CoreHalo;
        c = defaults_for(f.family ? parse_family(*f.family) : fallback);
    }
    auto set = [](auto& field, const auto& flag) {
        if (flag) field = *flag;
    };
    set(c.r1, f.r1);
    set(c.r2, f.r2);
    set(c.r3, f.r3);
    set(c.p, f.p);
    set(c.n, f.n);
    set(c.a, f.a);
    if (f.alpha) c.alpha = f.alpha;
    if (f.delta) c.delta = f.delta;
    set(c.delta_rel, f.delta_rel);
    set(c.target, f.target);
    set(c.tol_energy, f.tol_energy);
    if (f.format) c.format = parse_format(*f.format);
    set(c.out, f.out);
    if (f.p_min) c.p_min = f.p_min;
    if (f.p_max) c.p_max = f.p_max;
    if (f.p_count) c.p_count = f.p_count;
    set(c.a_min, f.a_min);
    set(c.a_max, f.a_max);
    set(c.a_count, f.a_count);
    if (f.threshold) c.threshold = f.threshold;

    if (command == "scan") {
        if (!c.p_min) c.p_min = 1e-2;
        if (!c.p_max) c.p_max = 1e4;
        if (!c.p_count) c.p_count = 200;
        if (!f.format && !(f.config_file)) c.format = OutputFormat::Csv;
    } else if (command == "asymptotics") {
        if (!c.p_min) c.p_min = 1e2;
        if (!c.p_max) c.p_max = 1e4;
        if (!c.p_count) c.p_count = 9;
        if (!f.format && !(f.config_file)) c.format = OutputFormat::Csv;
    }
    return c;
}

void validate_for(const RunConfig& c, const std::string& command) {
    validate(c);
    if (command == "scan") {
        if (c.family != FamilyKind::Uniform) throw ConfigError("scan sweeps the uniform family only");
        if (*c.p_count == 0 || c.a_count == 0) throw ConfigError("scan grid is empty");
        if (!(*c.p_min > 0.0 && *c.p_max >= *c.p_min))
            throw ConfigError("scan needs 0 < p-min <= p-max");
        if (!(c.a_min > -1.0 && c.a_max <= 1.0 && c.a_min <= c.a_max))
            throw ConfigError("scan cutoffs must satisfy -1 < a-min <= a-max <= 1");
    } else if (command == "asymptotics") {
        if (c.family != FamilyKind::CoreHalo) throw ConfigError("asymptotics follows the core-halo family only");
        if (*c.p_count < 8) throw ConfigError("asymptotics needs --p-count >= 8");
        if (!(*c.p_min > 0.0 && *c.p_max > *c.p_min))
            throw ConfigError("asymptotics needs 0 < p-min < p-max");
        if (c.threshold && !(*c.threshold < 0.0))
            throw ConfigError("--threshold must be negative");
    } else if (command != "mollify" && c.format == OutputFormat::Csv) {
        throw ConfigError("csv output is only available for scan and asymptotics");
    }
}

}  // namespace

// ---------------------------------------------------------------------------------------
// public helpers

RunConfig defaults_for(FamilyKind family) {
    RunConfig c;
    c.family = family;
    switch (family) {
        case FamilyKind::Uniform:
            c.p = 1.0;
            c.a = -0.99;
            break;
        case FamilyKind::Monotonic:
            c.r1 = 0.01;
            c.r2 = 1.0 / 11.0;
            c.r3 = 0.1;
            c.n = 3.0;
            c.a = -0.95;
            break;
        default:
            break;
    }
    return c;
}

std::string to_string(FamilyKind family) {
    switch (family) {
        case FamilyKind::Uniform: return "uniform";
        case FamilyKind::CoreHalo: return "core-halo";
        case FamilyKind::Monotonic: return "monotonic";
        default: return "custom";
    }
}

FamilyKind parse_family(const std::string& name) {
    if (name == "uniform") return FamilyKind::Uniform;
    if (name == "core-halo") return FamilyKind::CoreHalo;
    if (name == "monotonic") return FamilyKind::Monotonic;
    if (name == "custom") return FamilyKind::Custom;
    throw ConfigError("unknown family '" + name + "' (uniform, core-halo, monotonic, custom)");
}

OutputFormat parse_format(const std::string& name) {
    if (name == "human") return OutputFormat::Human;
    if (name == "kv") return OutputFormat::Kv;
    if (name == "csv") return OutputFormat::Csv;
    throw ConfigError("unknown format '" + name + "' (human, kv, csv)");
}

Piece piece_from_json(const json& doc) {
    try {
        const std::string kind = doc.at("kind").get<std::string>();
        const double lo = json_number(doc.at("lo"));
        const double hi = doc.contains("hi") ? json_number(doc.at("hi")) : kInfinity;
        if (kind == "constant") return Piece::constant(lo, hi, json_number(doc.at("value")));
        if (kind == "power_law")
            return Piece::power_law(lo, hi, json_number(doc.at("scale")),
                                    json_number(doc.at("exponent")));
        if (kind == "ramp")
            return Piece::ramp(lo, hi, json_number(doc.at("left")), json_number(doc.at("right")),
                               doc.value("left_slope", 0.0), doc.value("right_slope", 0.0));
        throw ConfigError("unknown piece kind '" + kind + "' (constant, power_law, ramp)");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed piece literal: ") + e.what());
    } catch (const InvalidProfile& e) {
        throw ConfigError(std::string("invalid piece literal: ") + e.what());
    }
}

json piece_to_json(const Piece& piece) {
    json doc{{"lo", piece.lo()}, {"hi", number_or_null(piece.hi())}};
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                doc["kind"] = "constant";
                doc["value"] = s.value;
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                doc["kind"] = "power_law";
                doc["scale"] = s.scale;
                doc["exponent"] = s.exponent;
            } else {
                doc["kind"] = "ramp";
                doc["left"] = s.left;
                doc["right"] = s.right;
                doc["left_slope"] = s.left_slope;
                doc["right_slope"] = s.right_slope;
            }
        },
        piece.shape());
    return doc;
}

json to_json(const RunConfig& c) {
    json doc{{"family", to_string(c.family)},
             {"r1", c.r1},
             {"r2", c.r2},
             {"r3", c.r3},
             {"p", c.p},
             {"n", c.n},
             {"a", c.a},
             {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
             {"delta", c.delta ? json(*c.delta) : json(nullptr)},
             {"delta_rel", c.delta_rel},
             {"target", c.target},
             {"tol_energy", c.tol_energy},
             {"format", format_name(c.format)},
             {"out", c.out},
             {"p_min", c.p_min ? json(*c.p_min) : json(nullptr)},
             {"p_max", c.p_max ? json(*c.p_max) : json(nullptr)},
             {"p_count", c.p_count ? json(*c.p_count) : json(nullptr)},
             {"a_min", c.a_min},
             {"a_max", c.a_max},
             {"a_count", c.a_count},
             {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)}};
    if (c.custom)
        doc["custom"] = {{"eta", pieces_to_json(c.custom->eta)},
                         {"phi", pieces_to_json(c.custom->phi)},
                         {"angular", pieces_to_json(c.custom->angular)}};
    return doc;
}

RunConfig from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("run configuration must be a JSON object");
    try {
        RunConfig c = defaults_for(parse_family(doc.value("family", std::string("core-halo"))));
        read_if(doc, "r1", c.r1);
        read_if(doc, "r2", c.r2);
        read_if(doc, "r3", c.r3);
        read_if(doc, "p", c.p);
        read_if(doc, "n", c.n);
        read_if(doc, "a", c.a);
        read_if(doc, "alpha", c.alpha);
        read_if(doc, "delta", c.delta);
        read_if(doc, "delta_rel", c.delta_rel);
        read_if(doc, "target", c.target);
        read_if(doc, "tol_energy", c.tol_energy);
        if (doc.contains("format")) c.format = parse_format(doc.at("format").get<std::string>());
        read_if(doc, "out", c.out);
        read_if(doc, "p_min", c.p_min);
        read_if(doc, "p_max", c.p_max);
        read_if(doc, "p_count", c.p_count);
        read_if(doc, "a_min", c.a_min);
        read_if(doc, "a_max", c.a_max);
        read_if(doc, "a_count", c.a_count);
        read_if(doc, "threshold", c.threshold);
        if (doc.contains("custom")) {
            const json& cu = doc.at("custom");
            c.custom = CustomProfiles{pieces_from_json(cu.at("eta"), "custom.eta"),
                                      pieces_from_json(cu.at("phi"), "custom.phi"),
                                      pieces_from_json(cu.at("angular"), "custom.angular")};
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed run configuration: ") + e.what());
    }
}

void validate(const RunConfig& c) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(c.tol_energy > 0.0, "tol-energy must be positive");
    require(c.delta_rel >= 0.0 && std::isfinite(c.delta_rel), "delta-rel must be >= 0");
    require(!c.delta || (*c.delta >= 0.0 && std::isfinite(*c.delta)), "delta must be >= 0");
    parse_targets(c.target);
    const bool angle_ok = c.a > -1.0 && c.a <= 1.0;
    switch (c.family) {
        case FamilyKind::Uniform:
            require(c.p > 0.0 && std::isfinite(c.p), "uniform family needs P > 0");
            require(angle_ok, "cutoff a must lie in (-1, 1]");
            break;
        case FamilyKind::CoreHalo:
        case FamilyKind::Monotonic:
            require(c.r1 > 0.0 && c.r1 <= c.r2 && c.r2 <= c.r3 && std::isfinite(c.r3),
                    "radii must satisfy 0 < r1 <= r2 <= r3");
            require(angle_ok, "cutoff a must lie in (-1, 1]");
            if (c.family == FamilyKind::CoreHalo) {
                require(c.p > 0.0 && std::isfinite(c.p), "core-halo family needs P > 0");
                require(!c.alpha || *c.alpha > 0.0, "alpha must be positive");
            } else {
                require(c.n > 0.0 && std::isfinite(c.n), "monotonic family needs n > 0");
            }
            break;
        case FamilyKind::Custom:
            require(c.custom.has_value(), "custom family needs a 'custom' profile block");
            try {
                custom_ansatz(*c.custom);
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError(std::string("custom profiles rejected: ") + e.what());
            }
            break;
    }
}

Family family_from_config(const RunConfig& c) {
    switch (c.family) {
        case FamilyKind::Uniform: return UniformBall{0.0, c.p, c.a};
        case FamilyKind::CoreHalo: return CoreHalo{c.r1, c.r2, c.r3, c.p, c.alpha.value_or(0.0), c.a};
        case FamilyKind::Monotonic: return MonotonicCoreHalo{c.r1, c.r2, c.r3, c.n, 0.0, c.a};
        default: throw ConfigError("custom family has no parameter set");
    }
}

SeparableAnsatz custom_ansatz(const CustomProfiles& profiles) {
    return SeparableAnsatz(PiecewiseProfile::from_support(profiles.eta),
                           PiecewiseProfile::from_support(profiles.phi, Domain::RadialMomentum),
                           AngularProfile(profiles.angular));
}

MollifySpec mollify_spec(const RunConfig& c) {
    MollifySpec spec;
    spec.targets = parse_targets(c.target);
    if (c.delta) {
        spec.delta = *c.delta;
        spec.scale = DeltaScale::Absolute;
    } else {
        spec.delta = c.delta_rel;
        spec.scale = DeltaScale::RelativeToSmallestPiece;
    }
    return spec;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

void write_document(std::ostream& out, const KeyValues& kv, OutputFormat format) {
    if (format == OutputFormat::Human) {
        std::size_t width = 0;
        for (const auto& [k, v] : kv) width = std::max(width, k.size());
        for (const auto& [k, v] : kv)
            out << std::left << std::setw(static_cast<int>(width)) << k << " : " << v << '\n';
        return;
    }
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

KeyValues config_echo(const RunConfig& config) {
    KeyValues kv;
    const json doc = to_json(config);
    for (const auto& [key, value] : doc.items())
        kv.emplace_back("config." + key, value.is_string() ? value.get<std::string>() : value.dump());
    return kv;
}

KeyValues certificate_values(const Certificate& c) {
    KeyValues kv = report_values(c.report, "");
    const KeyValues rest{
        {"energy_tolerance", format_number(c.energy_tolerance)},
        {"energy_residual", format_number(c.energy_residual)},
        {"virial_margin", format_number(c.virial_margin)},
        {"critical_norm", format_number(critical_norm())},
        {"norm_margin", format_number(c.norm_margin)},
        {"energy_ok", c.energy_ok ? "true" : "false"},
        {"virial_ok", c.virial_ok ? "true" : "false"},
        {"norm_ok", c.norm_ok ? "true" : "false"},
        {"verdict", c.pass ? "pass" : "fail"},
    };
    append(kv, rest);
    return kv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Construct and certify zero-energy initial data with virial <= -1/2 for the "
                 "attractive relativistic Vlasov-Poisson system",
                 "virial_forge"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"certify", "solve the family's free parameter and certify the blow-up hypotheses"},
        {"report", "evaluate every functional by closed forms and by quadrature"},
        {"scan", "uniform-ball virial floor sweep (CSV)"},
        {"asymptotics", "core-halo scaling fits with R1 = P^-2, R2 = P, R3 = P^2 (CSV)"},
        {"mollify", "smooth the step profiles, re-solve zero energy and certify"},
    };
    for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitInvalidConfig;
    }
    std::string command;
    for (const auto& [name, help] : commands)
        if (app.got_subcommand(name)) command = name;

    try {
        RunConfig config = resolve_config(flags, command);
        validate_for(config, command);
        if (command == "certify") return cmd_certify(config, out);
        if (command == "report") return cmd_report(config, out);
        if (command == "scan") return cmd_scan(config, out, err);
        if (command == "asymptotics") return cmd_asymptotics(config, out, err);
        return cmd_mollify(config, out);
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolverError;
    } catch (const RampOverlap& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolverError;
    } catch (const BudgetExceeded& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolverError;
    } catch (const Error& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
}

}  // namespace vforge::cli
