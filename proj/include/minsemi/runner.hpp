#pragma once

// Command layer behind the CLI: a flat key=value configuration, four
// commands (verify / evolve / study / counterexample) that write CSV and
// JSON files into an output directory, and a JSON manifest that makes every
// run reproducible byte-for-byte.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "minsemi/model.hpp"

namespace minsemi {

// Raised for malformed configuration: unknown key, unparsable value,
// out-of-range parameter, bad state specification, unknown axis or command.
// The message names the offending key or token. Commands map it to exit
// code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fully resolved run configuration. The first block mirrors the
// configuration file exactly: flat "key = value" lines with these seventeen
// keys and no others. The second block holds command-specific selectors
// that only exist as CLI flags (and inside manifests).
struct RunConfig {
    int dim = 40;
    int buffer = 4;
    double energy = 1.0;
    double sigma_minus = 1.0;
    double sigma_plus = 0.25;
    // Generator selector: full | h | number_cutoff | compress_first |
    // kato_scaling ("h" evolves under the no-jump part alone).
    std::string family = "full";
    // Sweep values / projector cutoffs, comma separated in the file. Empty
    // means "choose a sensible grid for the command at hand"; commands
    // resolve it before writing the manifest.
    std::vector<double> index;
    double kato_r = 0.5;
    double time_start = 0.0;
    double time_stop = 1.0;
    int time_steps = 20;
    std::vector<long> euler_steps = {8, 16, 32, 64, 128, 256, 512, 1024};
    int samples = 200;
    std::uint64_t seed = 12345;
    std::string out_dir = ".";
    bool strict_iii = false;
    bool require_markov = false;

    // Flag-only selectors.
    std::string axis = "cutoff";   // study: cutoff | kato | euler | truncation
    std::string state = "basis:1"; // evolve: basis:N | seeded | file:PATH

    // Throws ConfigError on any out-of-range or inconsistent value.
    void validate() const;
    // Model parameters implied by the first block (validated).
    ModelParams model_params() const;
};

// Applies "key = value" lines ('#' starts a comment, blank lines ignored).
// Only the seventeen file keys are accepted; anything else raises
// ConfigError naming the key.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

// Sets one key from its string form. Accepts the seventeen file keys plus
// the flag-only "axis" and "state".
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Reads back the current value of any settable key as a string.
std::string read_key(const RunConfig& cfg, const std::string& key);

// Restores command + configuration from a manifest written by a previous
// run. Returns the recorded command name.
std::string load_manifest(RunConfig& cfg, const std::string& path);

// Commands. Each validates, computes, then writes its outputs atomically
// into cfg.out_dir (created if missing) together with manifest.json.
// Return value is the process exit code: 0 success, 1 a required check or
// scan goal failed. Configuration problems raise ConfigError (exit 2).
//
// verify        -> reports.json; exit 0 iff every non-informational check
//                  passes (strict_iii promotes informational findings;
//                  require_markov fails a run whose trace-preservation
//                  check was skipped).
// evolve        -> trajectory.csv, header
//                  t,trace,trace_norm,min_eig,purity,mean_occupation.
// study         -> study.csv; per-axis columns documented in the README;
//                  the euler axis also records the fitted error slope in
//                  the manifest.
// counterexample-> counterexample.csv, header
//                  k,lambda,closed_form_value,matrix_value,negative;
//                  exit 0 iff closed form and matrix agree to 1e-9 on every
//                  row and at least one negative value appears.
int cmd_verify(const RunConfig& cfg);
int cmd_evolve(const RunConfig& cfg);
int cmd_study(const RunConfig& cfg);
int cmd_counterexample(const RunConfig& cfg);

// Dispatches by command name (used for manifest replay).
int run_command(const std::string& command, const RunConfig& cfg);

}  // namespace minsemi
