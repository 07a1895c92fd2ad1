#include "dfano/config.hpp"

#include "dfano/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfano
{
std::string to_string(RunMode m)
{
    switch (m) {
    case RunMode::Analytic:
        return "analytic";
    case RunMode::Oracle:
        return "oracle";
    case RunMode::Both:
        return "both";
    case RunMode::Sweep:
        break;
    }
    return "sweep";
}

std::string to_string(OutputFormat f)
{
    return f == OutputFormat::Csv ? "csv" : "json-lines";
}

RunMode parse_run_mode(const std::string& s)
{
    for (RunMode m : {RunMode::Analytic, RunMode::Oracle, RunMode::Both, RunMode::Sweep})
        if (to_string(m) == s)
            return m;
    throw ConfigError("unknown mode '" + s + "' (expected analytic|oracle|both|sweep)");
}

OutputFormat parse_output_format(const std::string& s)
{
    if (s == "csv")
        return OutputFormat::Csv;
    if (s == "json-lines")
        return OutputFormat::JsonLines;
    throw ConfigError("unknown format '" + s + "' (expected csv|json-lines)");
}

bool RunConfig::operator==(const RunConfig& o) const
{
    return name == o.name && atom == o.atom && field == o.field && grid == o.grid &&
           oracle == o.oracle && closed_form == o.closed_form && mode == o.mode &&
           sweep == o.sweep && output == o.output && assumed == o.assumed;
}

namespace
{
[[noreturn]] void fail(const std::string& path, const YAML::Node& node, const std::string& what)
{
    std::ostringstream msg;
    msg << path << ": " << what;
    if (node && node.Mark().line >= 0)
        msg << " (line " << node.Mark().line + 1 << ")";
    throw ConfigError(msg.str());
}

std::string join(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path)
{
    if (!node.IsMap())
        fail(path, node, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed)
{
    require_map(node, path);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::ranges::none_of(allowed, [&](const char* a) { return key == a; }))
            fail(join(path, key), kv.first, "unknown key");
    }
}

double get_double(const YAML::Node& node, const std::string& path)
{
    if (!node.IsScalar())
        fail(path, node, "expected a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v))
        fail(path, node, "expected a number, got '" + node.Scalar() + "'");
    if (!std::isfinite(v))
        fail(path, node, "must be finite");
    return v;
}

std::size_t get_count(const YAML::Node& node, const std::string& path)
{
    if (!node.IsScalar())
        fail(path, node, "expected an integer");
    long long v = 0;
    if (!YAML::convert<long long>::decode(node, v))
        fail(path, node, "expected an integer, got '" + node.Scalar() + "'");
    if (v < 0)
        fail(path, node, "must be nonnegative");
    return static_cast<std::size_t>(v);
}

bool get_bool(const YAML::Node& node, const std::string& path)
{
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v))
        fail(path, node, "expected true or false");
    return v;
}

std::string get_string(const YAML::Node& node, const std::string& path)
{
    if (!node.IsScalar())
        fail(path, node, "expected a string");
    return node.Scalar();
}

YAML::Node required(const YAML::Node& parent, const char* key, const std::string& path)
{
    YAML::Node n = parent[key];
    if (!n)
        fail(join(path, key), parent, "missing required key");
    return n;
}

AtomParams parse_atom(const YAML::Node& node)
{
    const std::string path = "atom";
    check_keys(node, path, {"omega1", "omega2", "gamma1", "gamma2", "q1", "q2", "q_infinite"});
    AtomParams atom;
    atom.omega1 = get_double(required(node, "omega1", path), "atom.omega1");
    atom.omega2 = get_double(required(node, "omega2", path), "atom.omega2");
    atom.gamma1 = get_double(required(node, "gamma1", path), "atom.gamma1");
    atom.gamma2 = get_double(required(node, "gamma2", path), "atom.gamma2");

    const bool infinite = node["q_infinite"] && get_bool(node["q_infinite"], "atom.q_infinite");
    const bool has_q1 = static_cast<bool>(node["q1"]);
    const bool has_q2 = static_cast<bool>(node["q2"]);
    if (infinite && (has_q1 || has_q2))
        fail(path, node, "q1/q2 cannot be combined with q_infinite: true");
    if (!infinite) {
        if (!has_q1 || !has_q2)
            fail(path, node, "give both q1 and q2, or q_infinite: true");
        atom.q = AsymmetryParams{get_double(node["q1"], "atom.q1"), get_double(node["q2"], "atom.q2")};
    }

    try {
        validate(atom);
        (void)derive_params(atom);
    } catch (const ParameterError& e) {
        fail(path, node, e.what());
    }
    return atom;
}

FieldParams parse_field(const YAML::Node& node)
{
    const std::string path = "field";
    check_keys(node, path, {"omega_laser", "b", "a0"});
    FieldParams field;
    field.omega_laser = get_double(required(node, "omega_laser", path), "field.omega_laser");
    field.b = get_double(required(node, "b", path), "field.b");
    field.a0 = get_double(required(node, "a0", path), "field.a0");
    if (field.b < 0.0)
        fail("field.b", node["b"], "coherent amplitude b must be nonnegative");
    if (field.a0 < 0.0)
        fail("field.a0", node["a0"], "chaotic strength a0 must be nonnegative");
    return field;
}

GridSpec parse_grid(const YAML::Node& node)
{
    const std::string path = "grid";
    check_keys(node, path, {"omega_min", "omega_max", "n_points"});
    GridSpec g;
    g.omega_min = get_double(required(node, "omega_min", path), "grid.omega_min");
    g.omega_max = get_double(required(node, "omega_max", path), "grid.omega_max");
    g.n_points = get_count(required(node, "n_points", path), "grid.n_points");
    if (!(g.omega_max > g.omega_min))
        fail(path, node, "omega_max must exceed omega_min");
    if (g.n_points < 2)
        fail("grid.n_points", node["n_points"], "must be at least 2");
    return g;
}

std::optional<double> optional_positive(const YAML::Node& parent, const char* key, const std::string& path)
{
    if (!parent[key])
        return std::nullopt;
    const double v = get_double(parent[key], join(path, key));
    if (!(v > 0.0))
        fail(join(path, key), parent[key], "must be positive");
    return v;
}

OracleSettings parse_oracle(const YAML::Node& node)
{
    const std::string path = "oracle";
    check_keys(node, path, {"window", "n_points", "dt", "t_final", "checkpoint_interval"});
    OracleSettings s;
    if (const auto w = node["window"]) {
        if (!w.IsSequence() || w.size() != 2)
            fail("oracle.window", w, "expected [omega_min, omega_max]");
        Window win{get_double(w[0], "oracle.window[0]"), get_double(w[1], "oracle.window[1]")};
        if (!(win.hi > win.lo))
            fail("oracle.window", w, "upper edge must exceed lower edge");
        s.window = win;
    }
    if (node["n_points"]) {
        s.n_points = get_count(node["n_points"], "oracle.n_points");
        if (s.n_points < 3)
            fail("oracle.n_points", node["n_points"], "must be at least 3");
    }
    s.dt = optional_positive(node, "dt", path);
    s.t_final = optional_positive(node, "t_final", path);
    s.checkpoint_interval = optional_positive(node, "checkpoint_interval", path);
    return s;
}

ClosedFormOptions parse_closed_form(const YAML::Node& node)
{
    const std::string path = "closed_form";
    check_keys(node, path, {"d_minus_variant", "h_minus_argument", "noise_factor", "z_star",
                            "pole_threshold", "condition_cap", "pole_snap"});
    ClosedFormOptions o;
    try {
        if (node["d_minus_variant"])
            o.d_minus_variant = parse_d_minus_variant(get_string(node["d_minus_variant"], "closed_form.d_minus_variant"));
        if (node["h_minus_argument"])
            o.h_minus_argument = parse_h_minus_argument(get_string(node["h_minus_argument"], "closed_form.h_minus_argument"));
    } catch (const std::invalid_argument& e) {
        fail(path, node, e.what());
    }
    if (node["noise_factor"])
        o.noise_factor = get_double(node["noise_factor"], "closed_form.noise_factor");
    if (auto v = optional_positive(node, "z_star", path))
        o.z_star = *v;
    if (auto v = optional_positive(node, "pole_threshold", path))
        o.pole_threshold = *v;
    if (auto v = optional_positive(node, "condition_cap", path))
        o.condition_cap = *v;
    if (auto v = optional_positive(node, "pole_snap", path))
        o.pole_snap = *v;
    return o;
}

Method parse_method(const YAML::Node& node, const std::string& path)
{
    const auto s = get_string(node, path);
    if (s == "analytic")
        return Method::Analytic;
    if (s == "oracle")
        return Method::Oracle;
    fail(path, node, "unknown method '" + s + "' (expected analytic|oracle)");
}

SweepSection parse_sweep(const YAML::Node& node, std::vector<std::string>& assumed)
{
    const std::string path = "run.sweep";
    check_keys(node, path, {"parameter", "values", "range", "methods"});
    SweepSection s;
    const auto p = get_string(required(node, "parameter", path), "run.sweep.parameter");
    if (p == "b")
        s.parameter = SweptParameter::B;
    else if (p == "a0")
        s.parameter = SweptParameter::A0;
    else
        fail("run.sweep.parameter", node["parameter"], "expected b or a0, got '" + p + "'");

    if (node["values"] && node["range"])
        fail(path, node, "give values or range, not both");
    if (const auto v = node["values"]) {
        if (!v.IsSequence() || v.size() == 0)
            fail("run.sweep.values", v, "expected a nonempty list of numbers");
        for (std::size_t i = 0; i < v.size(); ++i)
            s.values.push_back(get_double(v[i], "run.sweep.values[" + std::to_string(i) + "]"));
    } else {
        double from = 0.0;
        double to = 1.0;
        std::size_t count = 11;
        if (const auto r = node["range"]) {
            check_keys(r, "run.sweep.range", {"from", "to", "count"});
            from = get_double(required(r, "from", "run.sweep.range"), "run.sweep.range.from");
            to = get_double(required(r, "to", "run.sweep.range"), "run.sweep.range.to");
            count = get_count(required(r, "count", "run.sweep.range"), "run.sweep.range.count");
            if (count < 1)
                fail("run.sweep.range.count", r["count"], "must be at least 1");
            if (count > 1 && !(to > from))
                fail("run.sweep.range", r, "to must exceed from");
        } else if (std::ranges::find(assumed, "run.sweep.values") == assumed.end()) {
            assumed.push_back("run.sweep.values");
        }
        s.values = count == 1 ? std::vector<double>{from} : uniform_grid(from, to, count);
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] < 0.0)
            fail("run.sweep.values", node, "values must be nonnegative");
        if (i > 0 && !(s.values[i] > s.values[i - 1]))
            fail("run.sweep.values", node, "values must be strictly ascending");
    }

    if (const auto m = node["methods"]) {
        if (!m.IsSequence() || m.size() == 0)
            fail("run.sweep.methods", m, "expected a nonempty list");
        s.methods.clear();
        for (std::size_t i = 0; i < m.size(); ++i) {
            const Method method = parse_method(m[i], "run.sweep.methods[" + std::to_string(i) + "]");
            if (std::ranges::find(s.methods, method) != s.methods.end())
                fail("run.sweep.methods", m, "duplicate method");
            s.methods.push_back(method);
        }
    }
    return s;
}

OutputSection parse_output(const YAML::Node& node)
{
    check_keys(node, "output", {"path", "format"});
    OutputSection o;
    if (node["path"])
        o.path = get_string(node["path"], "output.path");
    if (node["format"]) {
        try {
            o.format = parse_output_format(get_string(node["format"], "output.format"));
        } catch (const ConfigError& e) {
            fail("output.format", node["format"], e.what());
        }
    }
    return o;
}
} // namespace

RunConfig parse_config(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream msg;
        msg << "syntax error at line " << e.mark.line + 1 << ", column " << e.mark.column + 1 << ": "
            << e.msg;
        throw ConfigError(msg.str());
    }
    if (!root || root.IsNull())
        throw ConfigError("config is empty");

    try {
        check_keys(root, "config", {"name", "assumed", "atom", "field", "grid", "oracle",
                                    "closed_form", "run", "output"});
        RunConfig c;
        if (root["name"])
            c.name = get_string(root["name"], "name");
        if (const auto a = root["assumed"]) {
            if (!a.IsSequence())
                fail("assumed", a, "expected a list of field paths");
            for (std::size_t i = 0; i < a.size(); ++i)
                c.assumed.push_back(get_string(a[i], "assumed[" + std::to_string(i) + "]"));
        }
        c.atom = parse_atom(required(root, "atom", ""));
        c.field = parse_field(required(root, "field", ""));
        c.grid = parse_grid(required(root, "grid", ""));
        if (root["oracle"])
            c.oracle = parse_oracle(root["oracle"]);
        if (root["closed_form"])
            c.closed_form = parse_closed_form(root["closed_form"]);
        if (const auto run = root["run"]) {
            check_keys(run, "run", {"mode", "sweep"});
            if (run["mode"]) {
                try {
                    c.mode = parse_run_mode(get_string(run["mode"], "run.mode"));
                } catch (const ConfigError& e) {
                    fail("run.mode", run["mode"], e.what());
                }
            }
            if (run["sweep"]) {
                if (c.mode != RunMode::Sweep)
                    fail("run.sweep", run["sweep"], "only valid with mode: sweep");
                c.sweep = parse_sweep(run["sweep"], c.assumed);
            }
        }
        if (c.mode == RunMode::Sweep && !c.sweep)
            fail("run.sweep", root["run"], "mode: sweep needs a sweep section");
        if (root["output"])
            c.output = parse_output(root["output"]);
        return c;
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

namespace
{
std::string num(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}
} // namespace

std::string serialize_config(const RunConfig& c)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    if (!c.name.empty())
        out << YAML::Key << "name" << YAML::Value << c.name;
    if (!c.assumed.empty()) {
        out << YAML::Key << "assumed" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& a : c.assumed)
            out << a;
        out << YAML::EndSeq;
    }

    out << YAML::Key << "atom" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "omega1" << YAML::Value << num(c.atom.omega1);
    out << YAML::Key << "omega2" << YAML::Value << num(c.atom.omega2);
    out << YAML::Key << "gamma1" << YAML::Value << num(c.atom.gamma1);
    out << YAML::Key << "gamma2" << YAML::Value << num(c.atom.gamma2);
    if (c.atom.q) {
        out << YAML::Key << "q1" << YAML::Value << num(c.atom.q->q1);
        out << YAML::Key << "q2" << YAML::Value << num(c.atom.q->q2);
    } else {
        out << YAML::Key << "q_infinite" << YAML::Value << true;
    }
    out << YAML::EndMap;

    out << YAML::Key << "field" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "omega_laser" << YAML::Value << num(c.field.omega_laser);
    out << YAML::Key << "b" << YAML::Value << num(c.field.b);
    out << YAML::Key << "a0" << YAML::Value << num(c.field.a0);
    out << YAML::EndMap;

    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "omega_min" << YAML::Value << num(c.grid.omega_min);
    out << YAML::Key << "omega_max" << YAML::Value << num(c.grid.omega_max);
    out << YAML::Key << "n_points" << YAML::Value << c.grid.n_points;
    out << YAML::EndMap;

    out << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
    if (c.oracle.window)
        out << YAML::Key << "window" << YAML::Value << YAML::Flow << YAML::BeginSeq
            << num(c.oracle.window->lo) << num(c.oracle.window->hi) << YAML::EndSeq;
    out << YAML::Key << "n_points" << YAML::Value << c.oracle.n_points;
    if (c.oracle.dt)
        out << YAML::Key << "dt" << YAML::Value << num(*c.oracle.dt);
    if (c.oracle.t_final)
        out << YAML::Key << "t_final" << YAML::Value << num(*c.oracle.t_final);
    if (c.oracle.checkpoint_interval)
        out << YAML::Key << "checkpoint_interval" << YAML::Value << num(*c.oracle.checkpoint_interval);
    out << YAML::EndMap;

    const auto& cf = c.closed_form;
    out << YAML::Key << "closed_form" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "d_minus_variant" << YAML::Value << to_string(cf.d_minus_variant);
    out << YAML::Key << "h_minus_argument" << YAML::Value << to_string(cf.h_minus_argument);
    out << YAML::Key << "noise_factor" << YAML::Value << num(cf.noise_factor);
    out << YAML::Key << "z_star" << YAML::Value << num(cf.z_star);
    out << YAML::Key << "pole_threshold" << YAML::Value << num(cf.pole_threshold);
    out << YAML::Key << "condition_cap" << YAML::Value << num(cf.condition_cap);
    out << YAML::Key << "pole_snap" << YAML::Value << num(cf.pole_snap);
    out << YAML::EndMap;

    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "mode" << YAML::Value << to_string(c.mode);
    if (c.sweep) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "parameter" << YAML::Value << to_string(c.sweep->parameter);
        out << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : c.sweep->values)
            out << num(v);
        out << YAML::EndSeq;
        out << YAML::Key << "methods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (Method m : c.sweep->methods)
            out << to_string(m);
        out << YAML::EndSeq;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "path" << YAML::Value << YAML::DoubleQuoted << c.output.path;
    out << YAML::Key << "format" << YAML::Value << to_string(c.output.format);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

SweepSpec make_sweep_spec(const RunConfig& config)
{
    if (!config.sweep)
        throw ConfigError("run.sweep: config has no sweep section");
    SweepSpec spec;
    spec.base_atom = config.atom;
    spec.base_field = config.field;
    spec.swept = config.sweep->parameter;
    spec.values = config.sweep->values;
    spec.grid = config.grid;
    spec.methods = config.sweep->methods;
    spec.closed_form = config.closed_form;
    spec.oracle = config.oracle;
    return spec;
}

} // namespace dfano
