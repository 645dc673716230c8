#include "gridshape/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gridshape/errors.hpp"

namespace gridshape {

namespace {

// ---------------------------------------------------------------------------
// Generic parsed-config document shared by the TOML and JSON front ends.
// ---------------------------------------------------------------------------

struct ConfigValue {
    enum class Kind { String, Number, Boolean, NumberList };
    Kind kind = Kind::Number;
    std::string str;
    double number = 0.0;
    bool boolean = false;
    std::vector<double> list;
    int line = 0;
};

struct ConfigTable {
    std::map<std::string, ConfigValue> values;
    int line = 0;

    const ConfigValue* find(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

struct ConfigDoc {
    ConfigTable root;
    std::map<std::string, ConfigTable> sections;
    std::vector<ConfigTable> machines;

    bool has_section(const std::string& name) const { return sections.count(name) > 0; }
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

ConfigValue parse_value(const std::string& raw, int line, const std::string& key) {
    ConfigValue v;
    v.line = line;
    const std::string t = trim(raw);
    if (t.empty()) throw ConfigError("missing value", key, line);
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw ConfigError("unterminated string value", key, line);
        v.kind = ConfigValue::Kind::String;
        v.str = t.substr(1, t.size() - 2);
        return v;
    }
    if (t == "true" || t == "false") {
        v.kind = ConfigValue::Kind::Boolean;
        v.boolean = (t == "true");
        return v;
    }
    if (t.front() == '[') {
        if (t.back() != ']') throw ConfigError("unterminated array value", key, line);
        v.kind = ConfigValue::Kind::NumberList;
        std::string body = t.substr(1, t.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            double num = 0.0;
            if (!parse_number(item, num))
                throw ConfigError("array elements must be numbers", key, line);
            v.list.push_back(num);
        }
        return v;
    }
    double num = 0.0;
    if (!parse_number(t, num))
        throw ConfigError("value is not a number, string, boolean or array", key, line);
    v.kind = ConfigValue::Kind::Number;
    v.number = num;
    return v;
}

// Minimal TOML subset: [section], [section.sub], [[machine]] array tables,
// key = value with strings, numbers, booleans and numeric arrays.
ConfigDoc parse_toml(const std::string& text) {
    ConfigDoc doc;
    ConfigTable* current = &doc.root;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // strip comments outside of strings
        std::string line;
        bool in_string = false;
        for (char c : raw) {
            if (c == '"') in_string = !in_string;
            if (c == '#' && !in_string) break;
            line.push_back(c);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            const bool array_table = line.size() > 1 && line[1] == '[';
            const std::string close = array_table ? "]]" : "]";
            const std::size_t end = line.find(close);
            if (end == std::string::npos)
                throw ConfigError("malformed section header", line, line_no);
            const std::string name =
                trim(line.substr(array_table ? 2 : 1, end - (array_table ? 2 : 1)));
            if (name.empty()) throw ConfigError("empty section name", line, line_no);
            if (array_table) {
                if (name != "machine")
                    throw ConfigError("only [[machine]] array tables are supported", name,
                                      line_no);
                doc.machines.emplace_back();
                doc.machines.back().line = line_no;
                current = &doc.machines.back();
            } else {
                ConfigTable& table = doc.sections[name];
                table.line = line_no;
                current = &table;
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line, line_no);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key", line, line_no);
        current->values[key] = parse_value(line.substr(eq + 1), line_no, key);
    }
    return doc;
}

void json_into_table(const nlohmann::json& obj, ConfigTable& table, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const auto& val = it.value();
        ConfigValue v;
        if (val.is_string()) {
            v.kind = ConfigValue::Kind::String;
            v.str = val.get<std::string>();
        } else if (val.is_boolean()) {
            v.kind = ConfigValue::Kind::Boolean;
            v.boolean = val.get<bool>();
        } else if (val.is_number()) {
            v.kind = ConfigValue::Kind::Number;
            v.number = val.get<double>();
        } else if (val.is_array()) {
            v.kind = ConfigValue::Kind::NumberList;
            for (const auto& e : val) {
                if (!e.is_number())
                    throw ConfigError("array elements must be numbers", where + it.key());
                v.list.push_back(e.get<double>());
            }
        } else {
            throw ConfigError("unsupported value type", where + it.key());
        }
        table.values[it.key()] = v;
    }
}

ConfigDoc parse_json_doc(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what(), "", 0);
    }
    if (!j.is_object()) throw ConfigError("top level must be an object", "");
    ConfigDoc doc;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& val = it.value();
        if (it.key() == "machine" && val.is_array()) {
            for (const auto& m : val) {
                if (!m.is_object()) throw ConfigError("machine entries must be objects", "machine");
                doc.machines.emplace_back();
                json_into_table(m, doc.machines.back(), "machine.");
            }
        } else if (val.is_object()) {
            ConfigTable& table = doc.sections[it.key()];
            for (auto sub = val.begin(); sub != val.end(); ++sub) {
                if (sub.value().is_object()) {
                    ConfigTable& nested = doc.sections[it.key() + "." + sub.key()];
                    json_into_table(sub.value(), nested, it.key() + "." + sub.key() + ".");
                } else {
                    nlohmann::json tmp;
                    tmp[sub.key()] = sub.value();
                    json_into_table(tmp, table, it.key() + ".");
                }
            }
        } else {
            nlohmann::json tmp;
            tmp[it.key()] = val;
            json_into_table(tmp, doc.root, "");
        }
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Schema resolution
// ---------------------------------------------------------------------------

class FieldReader {
public:
    FieldReader(const ConfigTable& table, std::string prefix)
        : table_(table), prefix_(std::move(prefix)) {}

    std::optional<double> number(const std::string& key) const {
        const ConfigValue* v = table_.find(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::Number)
            throw ConfigError("expected a number", prefix_ + key, v->line);
        return v->number;
    }
    double number_or(const std::string& key, double fallback) const {
        return number(key).value_or(fallback);
    }
    double require_number(const std::string& key) const {
        auto v = number(key);
        if (!v) throw ConfigError("missing required field", prefix_ + key, table_.line);
        return *v;
    }
    std::optional<std::string> string(const std::string& key) const {
        const ConfigValue* v = table_.find(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::String)
            throw ConfigError("expected a string", prefix_ + key, v->line);
        return v->str;
    }
    bool boolean_or(const std::string& key, bool fallback) const {
        const ConfigValue* v = table_.find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::Boolean)
            throw ConfigError("expected true or false", prefix_ + key, v->line);
        return v->boolean;
    }
    int line() const { return table_.line; }
    const std::string& prefix() const { return prefix_; }

private:
    const ConfigTable& table_;
    std::string prefix_;
};

AreaParameters read_area(const FieldReader& r) {
    AreaParameters a;
    a.h_s = r.require_number("h_s");
    a.tau_t_s = r.require_number("tau_t_s");
    a.alpha_g_pu = r.require_number("alpha_g_pu");
    a.alpha_l_pu = r.number_or("alpha_l_pu", 0.0);
    a.k_i_pu_s = r.number_or("k_i_pu_s", 0.0);
    a.f0_hz = r.number_or("f0_hz", 50.0);
    try {
        a.validate();
    } catch (const InvariantError& e) {
        throw ConfigError(e.what(), r.prefix() + "…", r.line());
    }
    return a;
}

MachineParameters read_machine(const ConfigTable& table, std::size_t index) {
    const std::string prefix = "machine[" + std::to_string(index) + "].";
    FieldReader r(table, prefix);
    MachineParameters m;
    m.h_s = r.require_number("h_s");
    m.alpha_g_pu = r.require_number("alpha_g_pu");
    m.rating_pu = r.number_or("rating_pu", 1.0);
    const std::string kind = r.string("governor").value_or("first_order");
    if (kind == "first_order") {
        m.governor.variant = FirstOrderGovernor{r.number_or("tau_t_s", 1.0)};
    } else if (kind == "ieeeg1") {
        Ieeeg1Governor g;
        g.k1 = r.number_or("k1", 0.5);
        g.k3 = r.number_or("k3", 0.5);
        g.t1_s = r.number_or("t1_s", 0.25);
        g.t3_s = r.number_or("t3_s", 0.1);
        g.t4_s = r.number_or("t4_s", 0.3);
        g.t5_s = r.number_or("t5_s", 5.0);
        m.governor.variant = g;
    } else if (kind == "hydro") {
        m.governor.variant = HydroGovernor{r.number_or("tw_s", 1.0)};
    } else {
        throw ConfigError("governor must be first_order, ieeeg1 or hydro", prefix + "governor",
                          r.line());
    }
    try {
        m.validate();
    } catch (const InvariantError& e) {
        throw ConfigError(e.what(), prefix + "…", r.line());
    }
    return m;
}

ControllerRequestKind controller_kind_from(const std::string& name, const std::string& field,
                                           int line) {
    if (name == "none") return ControllerRequestKind::None;
    if (name == "vi") return ControllerRequestKind::VirtualInertia;
    if (name == "idroop") return ControllerRequestKind::IDroop;
    if (name == "fs") return ControllerRequestKind::FrequencyShaping;
    if (name == "mm") return ControllerRequestKind::PerMachine;
    throw ConfigError("controller kind must be none, vi, idroop, fs or mm", field, line);
}

const char* controller_kind_name(ControllerRequestKind k) {
    switch (k) {
    case ControllerRequestKind::None: return "none";
    case ControllerRequestKind::VirtualInertia: return "vi";
    case ControllerRequestKind::IDroop: return "idroop";
    case ControllerRequestKind::FrequencyShaping: return "fs";
    case ControllerRequestKind::PerMachine: return "mm";
    }
    return "none";
}

const char* policy_name(AllocationPolicy p) {
    switch (p) {
    case AllocationPolicy::ProportionalToRating: return "rating";
    case AllocationPolicy::Uniform: return "uniform";
    case AllocationPolicy::DeficitOnly: return "deficit";
    }
    return "rating";
}

Scenario scenario_from_doc(const ConfigDoc& doc) {
    Scenario s;
    FieldReader root(doc.root, "");
    const double version = root.number_or("schema_version", 1.0);
    if (version != 1.0)
        throw ConfigError("unsupported schema_version", "schema_version", doc.root.line);
    s.schema_version = 1;
    s.title = root.string("title").value_or("");

    const bool has_area = doc.has_section("area");
    const bool has_machines = !doc.machines.empty();
    const bool has_two_area = doc.has_section("two_area");
    if (static_cast<int>(has_area) + static_cast<int>(has_machines) +
            static_cast<int>(has_two_area) !=
        1)
        throw ConfigError("exactly one of [area], [[machine]] or [two_area] must be present",
                          "system", doc.root.line);

    if (has_area) {
        s.system = SystemKind::SingleArea;
        s.area = read_area(FieldReader(doc.sections.at("area"), "area."));
    } else if (has_machines) {
        s.system = SystemKind::MultiMachine;
        for (std::size_t i = 0; i < doc.machines.size(); ++i)
            s.machines.push_back(read_machine(doc.machines[i], i));
        s.fleet_f0_hz = root.number_or("f0_hz", 50.0);
    } else {
        s.system = SystemKind::TwoArea;
        if (!doc.has_section("two_area.area1") || !doc.has_section("two_area.area2"))
            throw ConfigError("two_area requires [two_area.area1] and [two_area.area2]",
                              "two_area", doc.sections.at("two_area").line);
        TwoAreaModel m;
        FieldReader r(doc.sections.at("two_area"), "two_area.");
        m.area1 = read_area(FieldReader(doc.sections.at("two_area.area1"), "two_area.area1."));
        m.area2 = read_area(FieldReader(doc.sections.at("two_area.area2"), "two_area.area2."));
        m.tie_max_pu = r.require_number("tie_max_pu");
        m.p0_m1_pu = r.number_or("p0_m1_pu", 0.0);
        m.p0_m2_pu = r.number_or("p0_m2_pu", 0.0);
        m.p0_l1_pu = r.number_or("p0_l1_pu", 0.0);
        m.p0_l2_pu = r.number_or("p0_l2_pu", 0.0);
        m.agc_enabled = r.boolean_or("agc_enabled", false);
        m.set_default_bias();
        try {
            m.validate();
        } catch (const InvariantError& e) {
            throw ConfigError(e.what(), "two_area.…", r.line());
        }
        s.two_area = m;
    }

    const double f0 = s.f0_hz();

    if (doc.has_section("disturbance")) {
        FieldReader r(doc.sections.at("disturbance"), "disturbance.");
        const auto dp_pu = r.number("dp_pu");
        const auto dp_gw = r.number("dp_gw");
        if (dp_pu && dp_gw)
            throw ConfigError("give either dp_pu or dp_gw, not both", "disturbance.dp_pu",
                              r.line());
        if (dp_gw) {
            const double base = r.require_number("base_gva");
            if (!(base > 0.0))
                throw ConfigError("base_gva must be positive", "disturbance.base_gva", r.line());
            s.disturbance.magnitude_pu = *dp_gw / base;
        } else if (dp_pu) {
            s.disturbance.magnitude_pu = *dp_pu;
        } else {
            throw ConfigError("disturbance needs dp_pu or dp_gw + base_gva", "disturbance.dp_pu",
                              r.line());
        }
        s.disturbance.area_index = static_cast<int>(r.number_or("area_index", 1.0));
        s.disturbance.start_time_s = r.number_or("start_time_s", 1.0);
        try {
            s.disturbance.validate();
        } catch (const InvariantError& e) {
            throw ConfigError(e.what(), "disturbance.…", r.line());
        }
    }

    if (doc.has_section("targets")) {
        FieldReader r(doc.sections.at("targets"), "targets.");
        TuningTargets t;
        t.dp_pu = s.disturbance.magnitude_pu;
        if (const auto pu = r.number("domega_d_pu"); pu) {
            t.domega_d_pu = *pu;
        } else if (const auto mhz = r.number("domega_d_mhz"); mhz) {
            t.domega_d_pu = *mhz / (f0 * 1000.0);
        } else {
            throw ConfigError("targets need domega_d_pu or domega_d_mhz", "targets.domega_d_pu",
                              r.line());
        }
        if (const auto pu = r.number("rocof_d_pu_s"); pu) {
            t.rocof_d_pu_s = *pu;
        } else if (const auto hz = r.number("rocof_d_hz_s"); hz) {
            t.rocof_d_pu_s = *hz / f0;
        } else {
            throw ConfigError("targets need rocof_d_pu_s or rocof_d_hz_s", "targets.rocof_d_pu_s",
                              r.line());
        }
        try {
            t.validate();
        } catch (const InvariantError& e) {
            throw ConfigError(e.what(), "targets.…", r.line());
        }
        s.targets = t;
    }

    if (doc.has_section("controller")) {
        FieldReader r(doc.sections.at("controller"), "controller.");
        ControllerRequest c;
        const std::string kind = r.string("kind").value_or("none");
        c.kind = controller_kind_from(kind, "controller.kind", r.line());
        c.f_c_hz = r.number_or("f_c_hz", kDefaultFilterHz);
        if (!(c.f_c_hz > 0.0))
            throw ConfigError("f_c_hz must be positive", "controller.f_c_hz", r.line());
        c.m_v_pu_s = r.number("m_v_pu_s");
        c.alpha_b_pu = r.number("alpha_b_pu");
        c.a_pu_s = r.number("a_pu_s");
        c.b_pu = r.number("b_pu");
        if (const auto p = r.string("policy"); p) {
            if (*p == "rating")
                c.policy = AllocationPolicy::ProportionalToRating;
            else if (*p == "uniform")
                c.policy = AllocationPolicy::Uniform;
            else if (*p == "deficit")
                c.policy = AllocationPolicy::DeficitOnly;
            else
                throw ConfigError("policy must be rating, uniform or deficit",
                                  "controller.policy", r.line());
        }
        c.thresholds.min_2h_pu_s = r.number_or("min_2h_pu_s", 0.0);
        c.thresholds.min_alpha_g_pu = r.number_or("min_alpha_g_pu", 0.0);
        c.reduction_order = static_cast<int>(r.number_or("reduction_order", 0.0));
        if (c.reduction_order < 0)
            throw ConfigError("reduction_order must be >= 0", "controller.reduction_order",
                              r.line());
        s.controller = c;
    }

    if (doc.has_section("solver")) {
        FieldReader r(doc.sections.at("solver"), "solver.");
        s.solver.dt_s = r.number_or("dt_s", 1e-3);
        s.solver.horizon_s = r.number_or("horizon_s", 60.0);
        try {
            s.solver.validate();
        } catch (const InvariantError& e) {
            throw ConfigError(e.what(), "solver.…", r.line());
        }
    }

    if (doc.has_section("output")) {
        FieldReader r(doc.sections.at("output"), "output.");
        s.out_dir = r.string("dir").value_or("out");
    }

    s.validate();
    return s;
}

void append_kv(std::ostream& os, const char* key, double v) {
    os << key << " = " << v << "\n";
}

} // namespace

double Scenario::f0_hz() const {
    switch (system) {
    case SystemKind::SingleArea: return area ? area->f0_hz : 50.0;
    case SystemKind::MultiMachine: return fleet_f0_hz;
    case SystemKind::TwoArea: return two_area ? two_area->area1.f0_hz : 50.0;
    }
    return 50.0;
}

void Scenario::validate() const {
    const int systems = static_cast<int>(area.has_value()) +
                        static_cast<int>(!machines.empty()) +
                        static_cast<int>(two_area.has_value());
    if (systems != 1)
        throw ConfigError("scenario must describe exactly one system", "system");
    const bool needs_targets =
        (controller.kind == ControllerRequestKind::FrequencyShaping &&
         !(controller.a_pu_s && controller.b_pu)) ||
        (controller.kind == ControllerRequestKind::VirtualInertia &&
         !(controller.m_v_pu_s && controller.alpha_b_pu)) ||
        (controller.kind == ControllerRequestKind::IDroop && !controller.alpha_b_pu) ||
        controller.kind == ControllerRequestKind::PerMachine;
    if (needs_targets && !targets)
        throw ConfigError("controller synthesis requires a [targets] section", "targets");
    if (controller.kind == ControllerRequestKind::PerMachine &&
        system != SystemKind::MultiMachine)
        throw ConfigError("per-machine control requires a [[machine]] fleet", "controller.kind");
}

Scenario parse_scenario(const std::string& text, bool as_json) {
    const ConfigDoc doc = as_json ? parse_json_doc(text) : parse_toml(text);
    return scenario_from_doc(doc);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file: " + path, path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const bool as_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
    return parse_scenario(buf.str(), as_json);
}

std::string scenario_to_toml(const Scenario& s) {
    std::ostringstream os;
    os.precision(17);
    os << "schema_version = " << s.schema_version << "\n";
    if (!s.title.empty()) os << "title = \"" << s.title << "\"\n";

    auto write_area = [&os](const char* section, const AreaParameters& a) {
        os << "\n[" << section << "]\n";
        append_kv(os, "h_s", a.h_s);
        append_kv(os, "tau_t_s", a.tau_t_s);
        append_kv(os, "alpha_g_pu", a.alpha_g_pu);
        append_kv(os, "alpha_l_pu", a.alpha_l_pu);
        append_kv(os, "k_i_pu_s", a.k_i_pu_s);
        append_kv(os, "f0_hz", a.f0_hz);
    };

    if (s.area) write_area("area", *s.area);
    if (!s.machines.empty()) os << "f0_hz = " << s.fleet_f0_hz << "\n";
    for (const auto& m : s.machines) {
        os << "\n[[machine]]\n";
        append_kv(os, "h_s", m.h_s);
        append_kv(os, "alpha_g_pu", m.alpha_g_pu);
        append_kv(os, "rating_pu", m.rating_pu);
        if (const auto* fo = std::get_if<FirstOrderGovernor>(&m.governor.variant)) {
            os << "governor = \"first_order\"\n";
            append_kv(os, "tau_t_s", fo->tau_t_s);
        } else if (const auto* g1 = std::get_if<Ieeeg1Governor>(&m.governor.variant)) {
            os << "governor = \"ieeeg1\"\n";
            append_kv(os, "k1", g1->k1);
            append_kv(os, "k3", g1->k3);
            append_kv(os, "t1_s", g1->t1_s);
            append_kv(os, "t3_s", g1->t3_s);
            append_kv(os, "t4_s", g1->t4_s);
            append_kv(os, "t5_s", g1->t5_s);
        } else if (const auto* hy = std::get_if<HydroGovernor>(&m.governor.variant)) {
            os << "governor = \"hydro\"\n";
            append_kv(os, "tw_s", hy->tw_s);
        }
    }
    if (s.two_area) {
        const auto& m = *s.two_area;
        os << "\n[two_area]\n";
        append_kv(os, "tie_max_pu", m.tie_max_pu);
        append_kv(os, "p0_m1_pu", m.p0_m1_pu);
        append_kv(os, "p0_m2_pu", m.p0_m2_pu);
        append_kv(os, "p0_l1_pu", m.p0_l1_pu);
        append_kv(os, "p0_l2_pu", m.p0_l2_pu);
        os << "agc_enabled = " << (m.agc_enabled ? "true" : "false") << "\n";
        write_area("two_area.area1", m.area1);
        write_area("two_area.area2", m.area2);
    }

    os << "\n[disturbance]\n";
    append_kv(os, "dp_pu", s.disturbance.magnitude_pu);
    os << "area_index = " << s.disturbance.area_index << "\n";
    append_kv(os, "start_time_s", s.disturbance.start_time_s);

    if (s.targets) {
        os << "\n[targets]\n";
        append_kv(os, "domega_d_pu", s.targets->domega_d_pu);
        append_kv(os, "rocof_d_pu_s", s.targets->rocof_d_pu_s);
    }

    os << "\n[controller]\n";
    os << "kind = \"" << controller_kind_name(s.controller.kind) << "\"\n";
    append_kv(os, "f_c_hz", s.controller.f_c_hz);
    if (s.controller.m_v_pu_s) append_kv(os, "m_v_pu_s", *s.controller.m_v_pu_s);
    if (s.controller.alpha_b_pu) append_kv(os, "alpha_b_pu", *s.controller.alpha_b_pu);
    if (s.controller.a_pu_s) append_kv(os, "a_pu_s", *s.controller.a_pu_s);
    if (s.controller.b_pu) append_kv(os, "b_pu", *s.controller.b_pu);
    if (s.controller.kind == ControllerRequestKind::PerMachine) {
        os << "policy = \"" << policy_name(s.controller.policy) << "\"\n";
        append_kv(os, "min_2h_pu_s", s.controller.thresholds.min_2h_pu_s);
        append_kv(os, "min_alpha_g_pu", s.controller.thresholds.min_alpha_g_pu);
        os << "reduction_order = " << s.controller.reduction_order << "\n";
    }

    os << "\n[solver]\n";
    append_kv(os, "dt_s", s.solver.dt_s);
    append_kv(os, "horizon_s", s.solver.horizon_s);

    os << "\n[output]\n";
    os << "dir = \"" << s.out_dir << "\"\n";
    return os.str();
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool area_equal(const AreaParameters& a, const AreaParameters& b) {
    return close(a.h_s, b.h_s) && close(a.tau_t_s, b.tau_t_s) &&
           close(a.alpha_g_pu, b.alpha_g_pu) && close(a.alpha_l_pu, b.alpha_l_pu) &&
           close(a.k_i_pu_s, b.k_i_pu_s) && close(a.f0_hz, b.f0_hz);
}

bool opt_equal(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || close(*a, *b);
}

} // namespace

bool semantically_equal(const Scenario& a, const Scenario& b) {
    if (a.schema_version != b.schema_version || a.title != b.title || a.system != b.system)
        return false;
    if (a.area.has_value() != b.area.has_value()) return false;
    if (a.area && !area_equal(*a.area, *b.area)) return false;
    if (a.machines.size() != b.machines.size()) return false;
    for (std::size_t i = 0; i < a.machines.size(); ++i) {
        const auto& ma = a.machines[i];
        const auto& mb = b.machines[i];
        if (!close(ma.h_s, mb.h_s) || !close(ma.alpha_g_pu, mb.alpha_g_pu) ||
            !close(ma.rating_pu, mb.rating_pu))
            return false;
        if (ma.governor.variant.index() != mb.governor.variant.index()) return false;
        if (const auto* fa = std::get_if<FirstOrderGovernor>(&ma.governor.variant)) {
            if (!close(fa->tau_t_s, std::get<FirstOrderGovernor>(mb.governor.variant).tau_t_s))
                return false;
        } else if (const auto* ga = std::get_if<Ieeeg1Governor>(&ma.governor.variant)) {
            const auto& gb2 = std::get<Ieeeg1Governor>(mb.governor.variant);
            if (!close(ga->k1, gb2.k1) || !close(ga->k3, gb2.k3) || !close(ga->t1_s, gb2.t1_s) ||
                !close(ga->t3_s, gb2.t3_s) || !close(ga->t4_s, gb2.t4_s) ||
                !close(ga->t5_s, gb2.t5_s))
                return false;
        } else if (const auto* ha = std::get_if<HydroGovernor>(&ma.governor.variant)) {
            if (!close(ha->tw_s, std::get<HydroGovernor>(mb.governor.variant).tw_s)) return false;
        }
    }
    if (!a.machines.empty() && !close(a.fleet_f0_hz, b.fleet_f0_hz)) return false;
    if (a.two_area.has_value() != b.two_area.has_value()) return false;
    if (a.two_area) {
        const auto& ta = *a.two_area;
        const auto& tb = *b.two_area;
        if (!area_equal(ta.area1, tb.area1) || !area_equal(ta.area2, tb.area2) ||
            !close(ta.tie_max_pu, tb.tie_max_pu) || !close(ta.p0_m1_pu, tb.p0_m1_pu) ||
            !close(ta.p0_m2_pu, tb.p0_m2_pu) || !close(ta.p0_l1_pu, tb.p0_l1_pu) ||
            !close(ta.p0_l2_pu, tb.p0_l2_pu) || ta.agc_enabled != tb.agc_enabled)
            return false;
    }
    if (!close(a.disturbance.magnitude_pu, b.disturbance.magnitude_pu) ||
        a.disturbance.area_index != b.disturbance.area_index ||
        !close(a.disturbance.start_time_s, b.disturbance.start_time_s))
        return false;
    if (a.targets.has_value() != b.targets.has_value()) return false;
    if (a.targets &&
        (!close(a.targets->dp_pu, b.targets->dp_pu) ||
         !close(a.targets->domega_d_pu, b.targets->domega_d_pu) ||
         !close(a.targets->rocof_d_pu_s, b.targets->rocof_d_pu_s)))
        return false;
    if (a.controller.kind != b.controller.kind || !close(a.controller.f_c_hz, b.controller.f_c_hz))
        return false;
    if (!opt_equal(a.controller.m_v_pu_s, b.controller.m_v_pu_s) ||
        !opt_equal(a.controller.alpha_b_pu, b.controller.alpha_b_pu) ||
        !opt_equal(a.controller.a_pu_s, b.controller.a_pu_s) ||
        !opt_equal(a.controller.b_pu, b.controller.b_pu))
        return false;
    if (a.controller.kind == ControllerRequestKind::PerMachine &&
        (a.controller.policy != b.controller.policy ||
         !close(a.controller.thresholds.min_2h_pu_s, b.controller.thresholds.min_2h_pu_s) ||
         !close(a.controller.thresholds.min_alpha_g_pu, b.controller.thresholds.min_alpha_g_pu) ||
         a.controller.reduction_order != b.controller.reduction_order))
        return false;
    if (!close(a.solver.dt_s, b.solver.dt_s) || !close(a.solver.horizon_s, b.solver.horizon_s))
        return false;
    return a.out_dir == b.out_dir;
}

} // namespace gridshape
