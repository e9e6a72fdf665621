/* C interface to the minimal-semigroup laboratory.
 *
 * A run handle holds one configuration; load it from a flat key=value file
 * or a manifest.json of a previous run, adjust single keys, then execute a
 * command. Commands write their outputs (CSV/JSON plus manifest.json) into
 * the configured output directory.
 *
 * All functions are safe to call with NULL handles/arguments; failures
 * return MS_ERROR (or exit code 2 from ms_run_command) and leave a message
 * in ms_last_error().
 */

#ifndef MINSEMI_H
#define MINSEMI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MS_OK 0
#define MS_ERROR (-1)

typedef struct ms_run ms_run;

/* Library version string, e.g. "1.0.0". */
const char* ms_version(void);

/* Message for the most recent failure on this thread; "" if none. */
const char* ms_last_error(void);

/* Fresh handle with default configuration; NULL on allocation failure.
 * Destroy with ms_run_destroy (NULL is ignored). */
ms_run* ms_run_create(void);
void ms_run_destroy(ms_run* run);

/* Applies a flat "key = value" configuration file. Exactly these keys are
 * accepted: dim, buffer, energy, sigma_minus, sigma_plus, family, index,
 * kato_r, time_start, time_stop, time_steps, euler_steps, samples, seed,
 * out_dir, strict_iii, require_markov. */
int ms_run_load_file(ms_run* run, const char* path);

/* Restores configuration and command from a manifest.json written by a
 * previous run; ms_run_command(run, NULL) then replays that command. */
int ms_run_load_manifest(ms_run* run, const char* path);

/* Sets one key from its string form. Accepts the file keys plus the
 * command selectors "axis" (study) and "state" (evolve). Lists are comma
 * separated, booleans accept true/false/1/0/yes/no/on/off. */
int ms_run_set(ms_run* run, const char* key, const char* value);

/* Reads the current value of a key into buf (NUL terminated). Fails if the
 * key is unknown or cap is too small for the value. */
int ms_run_get(const ms_run* run, const char* key, char* buf, size_t cap);

/* Runs "verify", "evolve", "study", or "counterexample"; NULL or "" replays
 * the command recorded by ms_run_load_manifest. Returns the process exit
 * code: 0 success, 1 a check or scan goal failed, 2 configuration error
 * (message in ms_last_error). */
int ms_run_command(ms_run* run, const char* command);

#ifdef __cplusplus
}
#endif

#endif /* MINSEMI_H */
