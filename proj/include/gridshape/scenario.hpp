#ifndef GRIDSHAPE_SCENARIO_HPP
#define GRIDSHAPE_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "gridshape/controllers.hpp"
#include "gridshape/plant.hpp"
#include "gridshape/sim.hpp"

namespace gridshape {

enum class SystemKind { SingleArea, MultiMachine, TwoArea };

enum class ControllerRequestKind { None, VirtualInertia, IDroop, FrequencyShaping, PerMachine };

/// What the scenario asks the synthesizer for: a kind plus optional scalar
/// overrides. Missing scalars are tuned from the targets.
struct ControllerRequest {
    ControllerRequestKind kind = ControllerRequestKind::None;
    double f_c_hz = kDefaultFilterHz;
    std::optional<double> m_v_pu_s;
    std::optional<double> alpha_b_pu;
    std::optional<double> a_pu_s;
    std::optional<double> b_pu;
    AllocationPolicy policy = AllocationPolicy::ProportionalToRating;
    DeficitThresholds thresholds;
    int reduction_order = 0;
};

/// A complete experiment description: one system, one disturbance, targets,
/// a controller request and solver settings.
struct Scenario {
    int schema_version = 1;
    std::string title;
    SystemKind system = SystemKind::SingleArea;
    std::optional<AreaParameters> area;
    std::vector<MachineParameters> machines;
    double fleet_f0_hz = 50.0;  // nominal frequency for multi-machine systems
    std::optional<TwoAreaModel> two_area;
    DisturbanceSpec disturbance;
    std::optional<TuningTargets> targets;
    ControllerRequest controller;
    SolverSettings solver;
    std::string out_dir = "out";

    double f0_hz() const;
    /// Throws ConfigError when any referenced invariant fails.
    void validate() const;
};

/// Loads a scenario from TOML (default) or JSON (by .json extension). All
/// schema problems surface as ConfigError with field and line diagnostics.
Scenario load_scenario(const std::string& path);

/// Parses scenario text directly; `as_json` selects the encoding.
Scenario parse_scenario(const std::string& text, bool as_json = false);

/// Serializes back to TOML. load(serialize(s)) is semantically equal to s.
std::string scenario_to_toml(const Scenario& s);

/// Field-by-field equality with a 1e-12 numeric tolerance.
bool semantically_equal(const Scenario& a, const Scenario& b);

} // namespace gridshape

#endif
