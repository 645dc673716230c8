#ifndef GRIDSHAPE_REPORT_HPP
#define GRIDSHAPE_REPORT_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridshape/metrics.hpp"
#include "gridshape/scenario.hpp"
#include "gridshape/trajectory.hpp"

namespace gridshape {

/// Locale-independent shortest round-trip formatting (std::to_chars).
std::string format_number(double v);

/// In-memory numeric table backing CSV files and charts.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const;  // -1 when absent
};

/// RFC-4180 text: comma separated, LF line endings, header first.
std::string csv_to_string(const CsvTable& table);
CsvTable csv_from_string(const std::string& text);
CsvTable csv_from_file(const std::string& path);

/// Trajectory as a table: t, every signal, plus <omega*>_mhz companions.
CsvTable trajectory_table(const Trajectory& traj, double f0_hz);

/// Deterministic single-chart SVG. Throws MissingSignalError naming the
/// available columns when x or any y column is absent.
std::string render_line_chart(const CsvTable& table, const std::string& x_column,
                              std::span<const std::string> y_columns);

/// The controllers a scenario asks for (one per machine for fleet control,
/// exactly one otherwise) plus the algebraic closed loop used for
/// predictions, when one exists.
struct SynthesisResult {
    std::vector<ControllerSpec> specs;
    std::optional<RationalTransfer> predicted_loop;  // unfiltered, after cancellation
    std::optional<FsTuning> fs;
    std::optional<ViTuning> vi;
};

SynthesisResult synthesize(const Scenario& scenario);

/// Full scenario execution: synthesis, simulation, metrics.
struct ScenarioRun {
    SynthesisResult synthesis;
    Trajectory trajectory;
    nlohmann::json metrics;  // flat for single area, per-area for two-area
    std::string summary;     // one-line digest for the console
};

ScenarioRun run_scenario(const Scenario& scenario);

/// Writes metrics.json, trajectory.csv, frequency.svg and storage_power.svg
/// into out_dir (created if missing). Returns the metrics.json path.
std::string write_outputs(const Scenario& scenario, const ScenarioRun& run,
                          const std::string& out_dir);

/// One simulated row per grid value of the swept parameter (m_v, alpha_b, a
/// or b). Rows always appear in grid order; `threads` caps the worker count
/// (0 reads GRIDSHAPE_THREADS, then hardware concurrency).
CsvTable sweep(const Scenario& scenario, const std::string& parameter,
               std::span<const double> grid, int threads = 0);

/// Worker cap resolution used by sweep.
int resolve_thread_count(int requested, std::size_t jobs);

} // namespace gridshape

#endif
