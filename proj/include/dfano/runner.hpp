#ifndef DFANO_RUNNER_HPP
#define DFANO_RUNNER_HPP

#include "dfano/config.hpp"
#include "dfano/output.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace dfano
{
enum ExitStatus : int
{
    kExitOk = 0,
    kExitConfig = 1,
    kExitNumerical = 2
};

struct RunOptions
{
    std::optional<RunMode> mode;          // overrides config.mode
    std::optional<std::string> out_path;  // overrides config.output.path
    std::optional<OutputFormat> format;   // overrides config.output.format
    bool timestamp = true;
    unsigned max_workers = 0;
    std::string checkpoint_dir;           // oracle snapshots, one CSV per checkpoint
};

// Builds the output table and header for one run without touching the file
// system. Numerical failures propagate as NumericalError; sweep cells fail
// individually and show up as NaN columns plus a note.
struct RunProduct
{
    OutputMetadata meta;
    OutputTable table;
    std::size_t failed_cells = 0;
};
RunProduct execute(const RunConfig& config, const RunOptions& options = {});

// execute + write to the configured destination (standard output when the
// path is empty). Errors are reported on err; the return value is the exit
// status.
int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

} // namespace dfano

#endif
