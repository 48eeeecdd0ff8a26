#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ckn/experiments.hpp"
#include "ckn/params.hpp"
#include "ckn/quadrature.hpp"

namespace ckn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names = {"verify-identities", "vector-scan", "estimate-constant",
                                                   "counterexample", "poincare", "corpus-dump"};
    return names;
}

struct RunConfig {
    std::string command;
    std::string preset;
    std::vector<CknParams> params_sets;
    QuadratureScheme scheme;
    std::string output_path; // empty: report goes to stdout
    std::string format = "csv";
    std::uint64_t seed = 42;
    int jobs = 0;
    bool timestamp = true;

    // vector-scan
    std::vector<double> vector_p = {1.1, 1.5, 1.9, 2.0, 2.5, 3.0, 4.0};
    std::int64_t samples = 100000;
    std::vector<double> gammas = {0.25, 0.5, 1.0};
    // estimate-constant
    std::optional<TheoremId> theorem;
    // counterexample
    double c1 = 1.0;
    double c2 = 0.0;
    // poincare
    int poincare_N = 3;
    std::vector<PoincareConfig> poincare;

    Exec exec() const { return jobs == 1 ? Exec::serial() : Exec::threads(jobs); }
};

/// One `key = value` line of a config file.
struct IniEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

/// Sections in brackets, `key = value` lines, `#` or `;` comments. Throws
/// ConfigError with "source:line: ..." on malformed lines.
std::vector<IniEntry> parse_ini(const std::string& text, const std::string& source);

/// Names of the built-in parameter presets.
std::vector<std::string> preset_names();

/// Fills params (and theorem, poincare settings where relevant) from a
/// preset. Throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

/// Applies config entries on top of cfg; unknown sections or keys and
/// unparsable values throw ConfigError naming the line and field.
void apply_entries(RunConfig& cfg, const std::vector<IniEntry>& entries, const std::string& source);

/// Throws ConfigError when a command-specific field is missing.
void validate(const RunConfig& cfg);

/// Executes the campaign. Report to the output path (or `out`), human
/// summary to `log`. Returns 0 on all-pass and 1 on any violation.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Full command-line entry point (flags, config file, presets, exit codes).
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace ckn::cli
