#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridshape/errors.hpp"
#include "gridshape/report.hpp"
#include "gridshape/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitDivergence = 4;

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size())
            throw gridshape::ConfigError("grid entries must be numbers", "--grid");
        grid.push_back(v);
    }
    return grid;
}

gridshape::Scenario load_with_overrides(const std::string& config,
                                        const std::optional<double>& dt,
                                        const std::optional<double>& horizon,
                                        const std::string& out_dir) {
    gridshape::Scenario s = gridshape::load_scenario(config);
    if (dt) s.solver.dt_s = *dt;
    if (horizon) s.solver.horizon_s = *horizon;
    if (!out_dir.empty()) s.out_dir = out_dir;
    s.solver.validate();
    return s;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Storage-based frequency control synthesis and simulation"};
    app.require_subcommand(1);

    std::string config, out_dir, param, grid_text, csv_path, x_col, y_cols, out_path;
    std::optional<double> dt, horizon;

    CLI::App* synth = app.add_subcommand("synth", "Synthesize a storage controller");
    synth->add_option("--config", config, "Scenario file (.toml or .json)")->required();
    synth->add_option("--out-dir", out_dir, "Output directory override");

    CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario and write reports");
    simulate->add_option("--config", config, "Scenario file (.toml or .json)")->required();
    simulate->add_option("--out-dir", out_dir, "Output directory override");
    simulate->add_option("--dt", dt, "Solver step override, seconds");
    simulate->add_option("--horizon", horizon, "Horizon override, seconds");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one controller parameter");
    sweep_cmd->add_option("--config", config, "Scenario file (.toml or .json)")->required();
    sweep_cmd->add_option("--param", param, "One of m_v, alpha_b, a, b")->required();
    sweep_cmd->add_option("--grid", grid_text, "Comma-separated values")->required();
    sweep_cmd->add_option("--out-dir", out_dir, "Output directory override");
    sweep_cmd->add_option("--dt", dt, "Solver step override, seconds");
    sweep_cmd->add_option("--horizon", horizon, "Horizon override, seconds");

    CLI::App* plot = app.add_subcommand("plot", "Render a line chart from a CSV file");
    plot->add_option("--csv", csv_path, "Input CSV")->required();
    plot->add_option("--x", x_col, "X column name")->required();
    plot->add_option("--y", y_cols, "Comma-separated Y column names")->required();
    plot->add_option("--out", out_path, "Output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        const gridshape::Scenario s = load_with_overrides(config, dt, horizon, out_dir);
        const gridshape::SynthesisResult result = gridshape::synthesize(s);
        nlohmann::json doc;
        doc["controllers"] = nlohmann::json::array();
        for (const auto& spec : result.specs) {
            nlohmann::json j{{"m_v_pu_s", spec.m_v_pu_s},
                             {"alpha_b_pu", spec.alpha_b_pu},
                             {"tf_num", spec.tf.num()},
                             {"tf_den", spec.tf.den()},
                             {"tf_filtered_num", spec.tf_filtered.num()},
                             {"tf_filtered_den", spec.tf_filtered.den()}};
            if (spec.case_id > 0) {
                j["a_pu_s"] = spec.a_pu_s;
                j["b_pu"] = spec.b_pu;
                j["case_id"] = spec.case_id;
            }
            doc["controllers"].push_back(j);
        }
        if (result.predicted_loop) {
            const gridshape::PredictedMetrics pred = gridshape::predict_metrics(
                *result.predicted_loop, s.disturbance.magnitude_pu, s.f0_hz());
            doc["predicted"] = {{"steady_state_mhz", pred.steady_state_mhz},
                                {"rocof_hz_s", pred.rocof_hz_s}};
        }
        std::filesystem::create_directories(s.out_dir);
        const auto path = std::filesystem::path(s.out_dir) / "controller.json";
        std::ofstream out(path, std::ios::binary);
        out << doc.dump(2) << "\n";
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    if (simulate->parsed()) {
        const gridshape::Scenario s = load_with_overrides(config, dt, horizon, out_dir);
        const gridshape::ScenarioRun run = gridshape::run_scenario(s);
        gridshape::write_outputs(s, run, s.out_dir);
        std::cout << run.summary << "\n";
        return 0;
    }
    if (sweep_cmd->parsed()) {
        const gridshape::Scenario s = load_with_overrides(config, dt, horizon, out_dir);
        const std::vector<double> grid = parse_grid(grid_text);
        const gridshape::CsvTable table = gridshape::sweep(s, param, grid);
        std::filesystem::create_directories(s.out_dir);
        const auto path = std::filesystem::path(s.out_dir) / ("sweep_" + param + ".csv");
        std::ofstream out(path, std::ios::binary);
        out << gridshape::csv_to_string(table);
        std::cout << path.string() << "\n";
        return 0;
    }
    // plot
    const gridshape::CsvTable table = gridshape::csv_from_file(csv_path);
    std::vector<std::string> ys;
    std::stringstream ss(y_cols);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) ys.push_back(item);
    const std::string svg = gridshape::render_line_chart(table, x_col, ys);
    std::ofstream out(out_path, std::ios::binary);
    out << svg;
    std::cout << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const gridshape::ConfigError& e) {
        std::cerr << "config error";
        if (!e.field.empty()) std::cerr << " [" << e.field << "]";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const gridshape::InfeasiblePolicyError& e) {
        std::cerr << "synthesis error: " << e.what() << "\n";
        return kExitSynthesis;
    } catch (const gridshape::InvariantError& e) {
        std::cerr << "synthesis error: " << e.what() << "\n";
        return kExitSynthesis;
    } catch (const gridshape::DivergenceError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const gridshape::AngleSeparationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const gridshape::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
