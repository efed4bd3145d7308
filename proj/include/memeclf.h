#ifndef MEMECLF_H
#define MEMECLF_H

/* C interface to the meme-classification pipeline. All functionality is
 * reachable through a configuration handle plus named batch commands; the
 * CLI is a thin client of this header.
 *
 * Status codes double as process exit codes:
 *   0 success, 1 internal error, 2 configuration error, 3 data error,
 *   4 alignment error.
 */

#ifdef __cplusplus
extern "C" {
#endif

#define MEMECLF_OK 0
#define MEMECLF_E_INTERNAL 1
#define MEMECLF_E_CONFIG 2
#define MEMECLF_E_DATA 3
#define MEMECLF_E_ALIGNMENT 4

typedef struct memeclf_config memeclf_config;

/* Library version, static storage. */
const char* memeclf_version(void);

/* Message for the most recent failing call on this thread; empty string if
 * none. Valid until the next failing call on the same thread. */
const char* memeclf_last_error(void);

/* Configuration handles. NULL on allocation failure. */
memeclf_config* memeclf_config_create(void);
void memeclf_config_destroy(memeclf_config* cfg);

/* Merges a key=value file (or a manifest.json) into the handle; later loads
 * and sets override earlier values. */
int memeclf_config_load_file(memeclf_config* cfg, const char* path);
int memeclf_config_set(memeclf_config* cfg, const char* key, const char* value);

/* Thread-safe read of one key; returns NULL when absent. The returned string
 * lives until the next call that mutates or reads this handle. */
const char* memeclf_config_get(memeclf_config* cfg, const char* key);

/* Runs one batch command: "split", "train", "predict", "ensemble",
 * "postprocess", "evaluate", "synthesize-corpus". out_dir may be NULL to use
 * the config/run-root default. The handle itself is not modified. */
int memeclf_run(const char* command, const memeclf_config* cfg, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
