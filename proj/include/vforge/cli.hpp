#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vforge/functionals.hpp"
#include "vforge/mollifier.hpp"
#include "vforge/profiles.hpp"
#include "vforge/solvers.hpp"

namespace vforge::cli {

enum class FamilyKind { Uniform, CoreHalo, Monotonic, Custom };
enum class OutputFormat { Human, Kv, Csv };

/// Exit codes shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitSolverError = 2;
inline constexpr int kExitInvalidConfig = 3;

/// Piece lists for the custom family; gaps are zero.
struct CustomProfiles {
    std::vector<Piece> eta;
    std::vector<Piece> phi;
    std::vector<Piece> angular;  // must tile [-1, 1]
};

struct RunConfig {
    FamilyKind family = FamilyKind::CoreHalo;
    double r1 = 0.2;
    double r2 = 1.0;
    double r3 = 2.0;
    double p = 1.0;
    double n = 3.0;
    double a = -0.8;
    std::optional<double> alpha;  // skips the zero-energy solve for core-halo
    std::optional<double> delta;  // absolute ramp half-width; overrides delta_rel
    double delta_rel = kDefaultRelativeDelta;
    std::string target = "all";  // spatial, momentum, angular or all
    double tol_energy = kDefaultEnergyTolerance;
    OutputFormat format = OutputFormat::Kv;
    std::string out;
    // sweep grids; unset P-range entries take the defaults of the subcommand
    std::optional<double> p_min;
    std::optional<double> p_max;
    std::optional<std::size_t> p_count;
    double a_min = -1.0 + 1e-6;
    double a_max = 0.9;
    std::size_t a_count = 100;
    std::optional<double> threshold;  // asymptotics: also report the virial witness
    std::optional<CustomProfiles> custom;
};

/// Parameter defaults of the named family (the published constructions).
RunConfig defaults_for(FamilyKind family);

std::string to_string(FamilyKind family);
FamilyKind parse_family(const std::string& name);
OutputFormat parse_format(const std::string& name);

nlohmann::json to_json(const RunConfig& config);
/// Missing keys take the defaults of the named family. Throws ConfigError.
RunConfig from_json(const nlohmann::json& doc);
Piece piece_from_json(const nlohmann::json& doc);
nlohmann::json piece_to_json(const Piece& piece);

/// Throws ConfigError naming the first violated precondition.
void validate(const RunConfig& config);

/// Family parameters from the config; the free parameter is filled in by the caller.
Family family_from_config(const RunConfig& config);
SeparableAnsatz custom_ansatz(const CustomProfiles& profiles);
MollifySpec mollify_spec(const RunConfig& config);

/// Flat key/value document with stable key order.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string format_number(double x);
void write_document(std::ostream& out, const KeyValues& kv, OutputFormat format);
/// config.<key>=<value> lines for every resolved config entry.
KeyValues config_echo(const RunConfig& config);
KeyValues certificate_values(const Certificate& certificate);

/// Runs the command line (args excludes the program name); returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vforge::cli
