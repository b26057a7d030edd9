#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffspec/gaussian_core.hpp"
#include "ffspec/model.hpp"
#include "ffspec/rh.hpp"
#include "ffspec/symbol.hpp"

namespace ffspec::cli {

inline constexpr const char* kVersion = "1.0.0";

struct VerifyToggles {
    bool identities = true;
    bool special_functions = true;
    bool szego = true;
    bool matching = true;
    bool headline = true;
    bool phase_switch = true;
};

struct ScenarioConfig {
    nlohmann::json symbol;  // {"type": "step" | "constant" | "reservoir" | "sampled" | "sampled_file", ...}
    std::vector<Geometry> geometries;
    Kind kind = Kind::Plain;
    Growth growth = Growth::GrowL;
    std::vector<cplx> lambdas{cplx(0.0, 2.0)};
    std::string out_dir = "out";
    int jobs = 0;  // 0: all cores
    PhaseVariant variant = PhaseVariant::PrintedR11;
    VerifyToggles verify;
    int p_grid = 257;
    nlohmann::json canonical;  // the document after flag overrides; hashed into provenance
};

// Throws ConfigError on any malformed or inconsistent field.
ScenarioConfig parse_config(const nlohmann::json& j);

std::vector<Geometry> parse_geometry_list(const std::string& s);  // "k,l,n[:k,l,n...]"
cplx parse_lambda(const std::string& s);                          // "RE,IM"

OccupationSymbol make_symbol(const ScenarioConfig& cfg);
std::optional<ReservoirSpec> reservoir_of(const ScenarioConfig& cfg);
ReservoirSpec default_reservoir();

std::uint64_t fnv1a(const std::string& s);
std::string provenance_line(const ScenarioConfig& cfg, const std::string& subcommand);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool at_least = false;  // pass if value >= threshold, else value <= threshold
    bool applicable = true;
    bool pass() const;
};

std::vector<CheckResult> verify_suite(const ScenarioConfig& cfg, const OccupationSymbol& sym);

int cmd_spectrum(const ScenarioConfig& cfg, std::ostream& log);
int cmd_compare(const ScenarioConfig& cfg, std::ostream& log);
int cmd_verify(const ScenarioConfig& cfg, std::ostream& log);
int cmd_model_occupation(const ScenarioConfig& cfg, std::ostream& log);

// Full command line: parses flags, dispatches, maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ffspec::cli
