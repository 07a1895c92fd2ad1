#ifndef DFANO_CONFIG_HPP
#define DFANO_CONFIG_HPP

#include "dfano/continuum_oracle.hpp"
#include "dfano/dressed_continuum.hpp"
#include "dfano/experiments.hpp"
#include "dfano/spectral_engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dfano
{
enum class RunMode
{
    Analytic,
    Oracle,
    Both,
    Sweep
};

enum class OutputFormat
{
    Csv,
    JsonLines
};

std::string to_string(RunMode m);
std::string to_string(OutputFormat f);
RunMode parse_run_mode(const std::string& s);
OutputFormat parse_output_format(const std::string& s);

struct SweepSection
{
    SweptParameter parameter = SweptParameter::B;
    std::vector<double> values;
    std::vector<Method> methods{Method::Analytic};

    bool operator==(const SweepSection&) const = default;
};

struct OutputSection
{
    std::string path; // empty: standard output
    OutputFormat format = OutputFormat::Csv;

    bool operator==(const OutputSection&) const = default;
};

// Everything a run needs. Oracle settings that depend on the physics (window,
// dt, t_final, checkpoint interval) stay empty unless given; the runner
// resolves them per run and records the resolved values in the output header.
struct RunConfig
{
    std::string name;               // preset name or free label, metadata only
    AtomParams atom;
    FieldParams field;
    GridSpec grid;
    OracleSettings oracle;
    ClosedFormOptions closed_form;
    RunMode mode = RunMode::Analytic;
    std::optional<SweepSection> sweep;
    OutputSection output;
    std::vector<std::string> assumed; // dotted paths of values chosen here rather than fixed by the figure

    bool operator==(const RunConfig&) const;
};

// Parses and validates the YAML config. Throws ConfigError with the field
// path (and line, for syntax problems) on any defect, including unknown keys.
RunConfig parse_config(const std::string& text);

// Canonical YAML with every field written out; doubles keep 17 significant
// digits so that parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

SweepSpec make_sweep_spec(const RunConfig& config);

} // namespace dfano

#endif
