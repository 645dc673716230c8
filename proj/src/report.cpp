#include "gridshape/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gridshape/errors.hpp"
#include "gridshape/sim.hpp"
#include "gridshape/step_response.hpp"

namespace gridshape {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::string csv_to_string(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable csv_from_string(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            if (header) {
                table.columns.push_back(cell);
            } else {
                char* end = nullptr;
                row.push_back(std::strtod(cell.c_str(), &end));
            }
        }
        if (!header) table.rows.push_back(std::move(row));
        header = false;
    }
    return table;
}

CsvTable csv_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open CSV file: " + path, path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return csv_from_string(buf.str());
}

CsvTable trajectory_table(const Trajectory& traj, double f0_hz) {
    CsvTable table;
    const std::size_t n = traj.samples();
    table.columns.push_back("t");
    for (const auto& [name, _] : traj.signals()) table.columns.push_back(name);
    std::vector<std::size_t> mhz_sources;
    for (std::size_t c = 0; c < traj.signals().size(); ++c) {
        const std::string& name = traj.signals()[c].first;
        if (name.rfind("omega", 0) == 0 && name.find("dot") == std::string::npos) {
            table.columns.push_back(name + "_mhz");
            mhz_sources.push_back(c);
        }
    }
    table.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        row.reserve(table.columns.size());
        row.push_back(traj.time_at(i));
        for (const auto& [_, series] : traj.signals()) row.push_back(series[i]);
        for (std::size_t c : mhz_sources)
            row.push_back(traj.signals()[c].second[i] * f0_hz * 1000.0);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// SVG chart
// ---------------------------------------------------------------------------

namespace {

struct Ticks {
    double lo = 0.0, hi = 1.0, step = 0.2;
};

Ticks nice_ticks(double lo, double hi) {
    if (!(hi > lo)) {
        hi = lo + 1.0;
        lo -= 1.0;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    Ticks t;
    t.step = step;
    t.lo = std::floor(lo / step) * step;
    t.hi = std::ceil(hi / step) * step;
    return t;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace

std::string render_line_chart(const CsvTable& table, const std::string& x_column,
                              std::span<const std::string> y_columns) {
    auto column_or_throw = [&](const std::string& name) {
        const int idx = table.column_index(name);
        if (idx < 0) {
            std::string available;
            for (const auto& c : table.columns) {
                if (!available.empty()) available += ", ";
                available += c;
            }
            throw MissingSignalError("column '" + name + "' not found; available: " + available);
        }
        return static_cast<std::size_t>(idx);
    };
    const std::size_t xi = column_or_throw(x_column);
    std::vector<std::size_t> yi;
    for (const auto& name : y_columns) yi.push_back(column_or_throw(name));
    if (yi.empty()) throw MissingSignalError("chart needs at least one y column");

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& row : table.rows) {
        if (first) {
            xmin = xmax = row[xi];
            ymin = ymax = row[yi[0]];
            first = false;
        }
        xmin = std::min(xmin, row[xi]);
        xmax = std::max(xmax, row[xi]);
        for (std::size_t c : yi) {
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    const Ticks xt = nice_ticks(xmin, xmax);
    const Ticks yt = nice_ticks(ymin, ymax);

    const double width = 800, height = 480;
    const double ml = 80, mr = 24, mt = 24, mb = 56;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto sx = [&](double x) { return ml + (x - xt.lo) / (xt.hi - xt.lo) * pw; };
    auto sy = [&](double y) { return mt + (yt.hi - y) / (yt.hi - yt.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(width) +
           "\" height=\"" + format_number(height) + "\" viewBox=\"0 0 " + format_number(width) +
           " " + format_number(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // grid and tick labels
    for (double v = xt.lo; v <= xt.hi + 0.5 * xt.step; v += xt.step) {
        const double px = sx(v);
        svg += "<line x1=\"" + format_number(px) + "\" y1=\"" + format_number(mt) + "\" x2=\"" +
               format_number(px) + "\" y2=\"" + format_number(mt + ph) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + format_number(px) + "\" y=\"" + format_number(mt + ph + 18) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
               format_number(v) + "</text>\n";
    }
    for (double v = yt.lo; v <= yt.hi + 0.5 * yt.step; v += yt.step) {
        const double py = sy(v);
        svg += "<line x1=\"" + format_number(ml) + "\" y1=\"" + format_number(py) + "\" x2=\"" +
               format_number(ml + pw) + "\" y2=\"" + format_number(py) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + format_number(ml - 6) + "\" y=\"" + format_number(py + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
               format_number(v) + "</text>\n";
    }
    svg += "<rect x=\"" + format_number(ml) + "\" y=\"" + format_number(mt) + "\" width=\"" +
           format_number(pw) + "\" height=\"" + format_number(ph) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (std::size_t s = 0; s < yi.size(); ++s) {
        std::string points;
        for (const auto& row : table.rows) {
            points += format_number(sx(row[xi]));
            points += ',';
            points += format_number(sy(row[yi[s]]));
            points += ' ';
        }
        if (!points.empty()) points.pop_back();
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    }

    // axis labels; column names carry their units as suffixes
    svg += "<text x=\"" + format_number(ml + pw / 2) + "\" y=\"" + format_number(height - 12) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" + x_column +
           "</text>\n";
    std::string ylabel;
    for (const auto& name : y_columns) {
        if (!ylabel.empty()) ylabel += ", ";
        ylabel += name;
    }
    svg += "<text x=\"16\" y=\"" + format_number(mt + ph / 2) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           format_number(mt + ph / 2) + ")\">" + ylabel + "</text>\n";
    if (yi.size() > 1) {
        for (std::size_t s = 0; s < yi.size(); ++s) {
            const double ly = mt + 16 + 16 * static_cast<double>(s);
            svg += "<line x1=\"" + format_number(ml + pw - 140) + "\" y1=\"" + format_number(ly) +
                   "\" x2=\"" + format_number(ml + pw - 116) + "\" y2=\"" + format_number(ly) +
                   "\" stroke=\"";
            svg += kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
            svg += "\" stroke-width=\"2\"/>\n";
            svg += "<text x=\"" + format_number(ml + pw - 110) + "\" y=\"" +
                   format_number(ly + 4) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + y_columns[s] + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// Synthesis and scenario execution
// ---------------------------------------------------------------------------

namespace {

AreaParameters synthesis_area(const AreaParameters& area) {
    // Control laws are designed against the undamped primary-only plant.
    AreaParameters a = area;
    a.alpha_l_pu = 0.0;
    a.k_i_pu_s = 0.0;
    return a;
}

ControllerSpec synthesize_for_area(const Scenario& s, const AreaParameters& area,
                                   SynthesisResult& result) {
    const AreaParameters design = synthesis_area(area);
    const auto& req = s.controller;
    switch (req.kind) {
    case ControllerRequestKind::None:
        return ControllerSpec{};  // zero law
    case ControllerRequestKind::VirtualInertia: {
        ViTuning t;
        if (req.m_v_pu_s && req.alpha_b_pu) {
            t.m_v_pu_s = *req.m_v_pu_s;
            t.alpha_b_pu = *req.alpha_b_pu;
            t.predicted_rocof_pu_s =
                s.disturbance.magnitude_pu > 0.0
                    ? s.disturbance.magnitude_pu / t.m_tilde(design)
                    : 0.0;
        } else {
            t = vi_tune(*s.targets, design);
            if (req.m_v_pu_s) t.m_v_pu_s = *req.m_v_pu_s;
            if (req.alpha_b_pu) t.alpha_b_pu = *req.alpha_b_pu;
        }
        result.vi = t;
        return vi_controller(t.m_v_pu_s, t.alpha_b_pu, req.f_c_hz);
    }
    case ControllerRequestKind::IDroop: {
        double alpha_b = 0.0;
        if (req.alpha_b_pu) {
            alpha_b = *req.alpha_b_pu;
        } else {
            alpha_b = std::max(std::abs(s.targets->dp_pu / s.targets->domega_d_pu) -
                                   design.alpha_g_pu,
                               0.0);
        }
        return idroop_controller(design, alpha_b, req.f_c_hz);
    }
    case ControllerRequestKind::FrequencyShaping: {
        FsTuning t;
        if (req.a_pu_s && req.b_pu) {
            t.a_pu_s = *req.a_pu_s;
            t.b_pu = *req.b_pu;
            t.case_id = 1 + (t.b_pu > design.alpha_g_pu ? 1 : 0) +
                        (t.a_pu_s > 2.0 * design.h_s ? 2 : 0);
        } else {
            t = fs_tune(*s.targets, design);
            if (req.a_pu_s) t.a_pu_s = std::max(*req.a_pu_s, 2.0 * design.h_s);
            if (req.b_pu) t.b_pu = std::max(*req.b_pu, design.alpha_g_pu);
        }
        result.fs = t;
        return fs_controller(t, design, req.f_c_hz);
    }
    case ControllerRequestKind::PerMachine:
        throw InvariantError("per-machine synthesis needs a machine fleet");
    }
    return ControllerSpec{};
}

std::string metric_summary(const nlohmann::json& measured) {
    std::ostringstream os;
    os << "nadir=" << format_number(measured["nadir_mhz"].get<double>()) << " mHz"
       << " rocof=" << format_number(measured["rocof_hz_s"].get<double>()) << " Hz/s"
       << " ss=" << format_number(measured["steady_state_mhz"].get<double>()) << " mHz"
       << " p_b_max=" << format_number(measured["p_b_max_pu"].get<double>()) << " pu"
       << " nadir_free=" << (measured["nadir_free"].get<bool>() ? "true" : "false");
    return os.str();
}

nlohmann::json metrics_json(const MetricsReport& r) {
    return nlohmann::json{{"nadir_mhz", r.nadir_mhz},
                          {"t_nadir_s", r.t_nadir_s},
                          {"rocof_hz_s", r.rocof_hz_s},
                          {"steady_state_mhz", r.steady_state_mhz},
                          {"p_b_max_pu", r.p_b_max_pu},
                          {"p_b_max_per_dp", r.p_b_max_per_dp},
                          {"e_b_max_pu_s", r.e_b_max_pu_s},
                          {"e_b_max_pu_h", r.e_b_max_pu_h},
                          {"nadir_free", r.nadir_free},
                          {"nadir_tol", r.nadir_tol}};
}

nlohmann::json spec_json(const ControllerSpec& spec) {
    const char* kind = "vi";
    switch (spec.kind) {
    case ControllerKind::VirtualInertia: kind = "vi"; break;
    case ControllerKind::FrequencyShaping: kind = "fs"; break;
    case ControllerKind::IDroop: kind = "idroop"; break;
    case ControllerKind::PerMachineShaping: kind = "mm"; break;
    }
    nlohmann::json j{{"kind", kind},
                     {"m_v_pu_s", spec.m_v_pu_s},
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
    return j;
}

} // namespace

SynthesisResult synthesize(const Scenario& s) {
    s.validate();
    SynthesisResult result;
    switch (s.system) {
    case SystemKind::SingleArea: {
        ControllerSpec spec = synthesize_for_area(s, *s.area, result);
        const RationalTransfer g = open_loop_plant(synthesis_area(*s.area), false, false);
        if (spec.tf.is_zero()) {
            result.predicted_loop = g;
        } else {
            std::optional<Poly> cancel;
            if (spec.kind == ControllerKind::FrequencyShaping)
                cancel = Poly{1.0, s.area->tau_t_s};
            result.predicted_loop = closed_loop(g, spec.tf, cancel);
        }
        result.specs.push_back(std::move(spec));
        break;
    }
    case SystemKind::MultiMachine: {
        if (s.controller.kind == ControllerRequestKind::None) {
            result.specs.assign(s.machines.size(), ControllerSpec{});
            result.predicted_loop = aggregate_multi_machine(s.machines);
            break;
        }
        if (s.controller.kind != ControllerRequestKind::PerMachine)
            throw InvariantError("machine fleets use per-machine (mm) or no control");
        const auto shares =
            mm_allocate(*s.targets, s.machines, s.controller.policy, s.controller.thresholds);
        double sum_2h = 0.0, sum_ag = 0.0, sum_m = 0.0, sum_ab = 0.0;
        for (std::size_t i = 0; i < s.machines.size(); ++i) {
            result.specs.push_back(mm_controller(s.machines[i], shares[i].m_pu_s,
                                                 shares[i].alpha_b_pu,
                                                 s.controller.reduction_order,
                                                 s.controller.f_c_hz));
            sum_2h += 2.0 * s.machines[i].h_s;
            sum_ag += s.machines[i].alpha_g_pu;
            sum_m += shares[i].m_pu_s;
            sum_ab += shares[i].alpha_b_pu;
        }
        // Fleet target: the first-order loop the per-machine laws add up to.
        result.predicted_loop =
            RationalTransfer({1.0}, {sum_ag + sum_ab, sum_2h + sum_m});
        break;
    }
    case SystemKind::TwoArea: {
        ControllerSpec c1 = synthesize_for_area(s, s.two_area->area1, result);
        ControllerSpec c2 = synthesize_for_area(s, s.two_area->area2, result);
        result.specs.push_back(std::move(c1));
        result.specs.push_back(std::move(c2));
        break;
    }
    }
    return result;
}

ScenarioRun run_scenario(const Scenario& s) {
    SynthesisResult synth = synthesize(s);
    const double f0 = s.f0_hz();

    nlohmann::json doc;
    doc["schema_version"] = s.schema_version;
    doc["title"] = s.title;
    doc["disturbance"] = {{"dp_pu", s.disturbance.magnitude_pu},
                          {"area_index", s.disturbance.area_index},
                          {"start_time_s", s.disturbance.start_time_s}};
    doc["solver"] = {{"dt_s", s.solver.dt_s}, {"horizon_s", s.solver.horizon_s}};
    doc["f0_hz"] = f0;

    AnalyzeOptions opts;
    opts.dp_pu = std::abs(s.disturbance.magnitude_pu);

    switch (s.system) {
    case SystemKind::SingleArea: {
        Trajectory traj =
            simulate_area(*s.area, synth.specs[0], s.disturbance, s.solver.dt_s,
                          s.solver.horizon_s);
        const MetricsReport measured = analyze_trajectory(traj, f0, opts);
        doc["controller"] = spec_json(synth.specs[0]);
        doc["measured"] = metrics_json(measured);
        if (synth.predicted_loop) {
            const PredictedMetrics pred =
                predict_metrics(*synth.predicted_loop, s.disturbance.magnitude_pu, f0);
            doc["predicted"] = {{"steady_state_mhz", pred.steady_state_mhz},
                                {"rocof_hz_s", pred.rocof_hz_s}};
        }
        std::string summary = metric_summary(doc["measured"]);
        if (synth.fs) summary += " case=" + std::to_string(synth.fs->case_id);
        return ScenarioRun{std::move(synth), std::move(traj), std::move(doc),
                           std::move(summary)};
    }
    case SystemKind::MultiMachine: {
        Trajectory traj = simulate_multi_machine(s.machines, synth.specs, s.disturbance,
                                                 s.solver.dt_s, s.solver.horizon_s);
        const MetricsReport measured = analyze_trajectory(traj, f0, opts);
        doc["controller"] = nlohmann::json::array();
        for (const auto& spec : synth.specs) doc["controller"].push_back(spec_json(spec));
        doc["measured"] = metrics_json(measured);
        if (synth.predicted_loop) {
            const PredictedMetrics pred =
                predict_metrics(*synth.predicted_loop, s.disturbance.magnitude_pu, f0);
            doc["predicted"] = {{"steady_state_mhz", pred.steady_state_mhz},
                                {"rocof_hz_s", pred.rocof_hz_s}};
        }
        std::string summary = metric_summary(doc["measured"]);
        return ScenarioRun{std::move(synth), std::move(traj), std::move(doc),
                           std::move(summary)};
    }
    case SystemKind::TwoArea: {
        Trajectory traj =
            simulate_two_area(*s.two_area, synth.specs[0], synth.specs[1], s.disturbance,
                              s.solver.dt_s, s.solver.horizon_s);
        doc["controller"] = {{"area1", spec_json(synth.specs[0])},
                             {"area2", spec_json(synth.specs[1])}};
        nlohmann::json measured;
        for (const auto& [label, suffix] :
             std::initializer_list<std::pair<const char*, const char*>>{
                 {"area1", "1"}, {"area2", "2"}, {"coi", "_coi"}}) {
            AnalyzeOptions per = opts;
            per.signals.omega = std::string("omega") + suffix;
            per.signals.omega_dot = std::string("omega_dot") + suffix;
            per.signals.p_b = std::string("p_b") + suffix;
            per.signals.e_b = std::string("e_b") + suffix;
            measured[label] = metrics_json(analyze_trajectory(traj, f0, per));
        }
        doc["measured"] = measured;
        std::string summary = metric_summary(measured["coi"]) + " (coi)";
        return ScenarioRun{std::move(synth), std::move(traj), std::move(doc),
                           std::move(summary)};
    }
    }
    throw Error("unreachable system kind");
}

std::string write_outputs(const Scenario& s, const ScenarioRun& run,
                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const double f0 = s.f0_hz();

    const CsvTable table = trajectory_table(run.trajectory, f0);
    {
        std::ofstream csv(fs::path(out_dir) / "trajectory.csv", std::ios::binary);
        csv << csv_to_string(table);
    }
    {
        std::ofstream json_file(fs::path(out_dir) / "metrics.json", std::ios::binary);
        json_file << run.metrics.dump(2) << "\n";
    }
    std::vector<std::string> freq_cols, power_cols;
    if (s.system == SystemKind::TwoArea) {
        freq_cols = {"omega1_mhz", "omega2_mhz", "omega_coi_mhz"};
        power_cols = {"p_b1", "p_b2"};
    } else {
        freq_cols = {"omega_mhz"};
        power_cols = {"p_b"};
    }
    {
        std::ofstream svg(fs::path(out_dir) / "frequency.svg", std::ios::binary);
        svg << render_line_chart(table, "t", freq_cols);
    }
    {
        std::ofstream svg(fs::path(out_dir) / "storage_power.svg", std::ios::binary);
        svg << render_line_chart(table, "t", power_cols);
    }
    return (fs::path(out_dir) / "metrics.json").string();
}

// ---------------------------------------------------------------------------
// Parameter sweep
// ---------------------------------------------------------------------------

int resolve_thread_count(int requested, std::size_t jobs) {
    int threads = requested;
    if (threads <= 0) {
        if (const char* env = std::getenv("GRIDSHAPE_THREADS")) {
            threads = std::atoi(env);
        }
    }
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                  std::max<std::size_t>(jobs, 1)));
}

CsvTable sweep(const Scenario& scenario, const std::string& parameter,
               std::span<const double> grid, int threads) {
    const bool is_vi_param = parameter == "m_v" || parameter == "alpha_b";
    const bool is_fs_param = parameter == "a" || parameter == "b";
    if (!is_vi_param && !is_fs_param)
        throw ConfigError("sweep parameter must be one of m_v, alpha_b, a, b", parameter);

    CsvTable table;
    table.columns = {parameter,          "nadir_mhz",        "t_nadir_s",
                     "rocof_hz_s",       "steady_state_mhz", "p_b_max_pu",
                     "p_b_max_per_dp",   "e_b_max_pu_s",     "e_b_max_pu_h",
                     "nadir_free",       "nadir_tol",        "rocof_pred_hz_s",
                     "steady_state_pred_mhz"};
    table.rows.resize(grid.size());
    if (grid.empty()) return table;

    auto run_row = [&](std::size_t idx) {
        Scenario s = scenario;
        s.controller.kind = is_vi_param ? ControllerRequestKind::VirtualInertia
                                        : ControllerRequestKind::FrequencyShaping;
        if (parameter == "m_v") {
            s.controller.m_v_pu_s = grid[idx];
            if (!s.controller.alpha_b_pu) s.controller.alpha_b_pu = 0.0;
        } else if (parameter == "alpha_b") {
            s.controller.alpha_b_pu = grid[idx];
            if (!s.controller.m_v_pu_s) s.controller.m_v_pu_s = 0.0;
        } else if (parameter == "a") {
            s.controller.a_pu_s = grid[idx];
            if (!s.controller.b_pu && s.area) s.controller.b_pu = s.area->alpha_g_pu;
        } else {
            s.controller.b_pu = grid[idx];
            if (!s.controller.a_pu_s && s.area) s.controller.a_pu_s = 2.0 * s.area->h_s;
        }
        const ScenarioRun run = run_scenario(s);
        const auto& m = run.metrics["measured"];
        const bool two_area = s.system == SystemKind::TwoArea;
        const auto& flat = two_area ? m["coi"] : m;
        double rocof_pred = 0.0, ss_pred = 0.0;
        if (run.metrics.contains("predicted")) {
            rocof_pred = run.metrics["predicted"]["rocof_hz_s"].get<double>();
            ss_pred = run.metrics["predicted"]["steady_state_mhz"].get<double>();
        }
        table.rows[idx] = {grid[idx],
                           flat["nadir_mhz"].get<double>(),
                           flat["t_nadir_s"].get<double>(),
                           flat["rocof_hz_s"].get<double>(),
                           flat["steady_state_mhz"].get<double>(),
                           flat["p_b_max_pu"].get<double>(),
                           flat["p_b_max_per_dp"].get<double>(),
                           flat["e_b_max_pu_s"].get<double>(),
                           flat["e_b_max_pu_h"].get<double>(),
                           flat["nadir_free"].get<bool>() ? 1.0 : 0.0,
                           flat["nadir_tol"].get<double>(),
                           rocof_pred,
                           ss_pred};
    };

    const int workers = resolve_thread_count(threads, grid.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_row(i);
        return table;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= grid.size()) break;
                    run_row(idx);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return table;
}

} // namespace gridshape
