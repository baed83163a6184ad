/*
 * uavpipe: multi-sensor UAV tracking and localization pipeline.
 *
 * C interface of the shared library. All functions return uvt_status;
 * UVT_OK means success. On failure, uvt_last_error() returns a one-line
 * description valid until the next call on the same thread. Objects are
 * opaque handles created and released through their create/free pairs.
 * Strings returned through char** out-parameters are released with
 * uvt_string_free().
 */

#ifndef UAVPIPE_H
#define UAVPIPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UVT_API __declspec(dllexport)
#else
#define UVT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uvt_status {
  UVT_OK = 0,
  UVT_ERR_RUNTIME = 1,             /* unclassified failure */
  UVT_ERR_INVALID_SPEC = 2,        /* scenario spec rejected */
  UVT_ERR_MISSING_CALIBRATION = 3, /* no calibration (or input) for an active mode */
  UVT_ERR_NO_OVERLAP = 4,          /* estimate and ground-truth ranges disjoint */
  UVT_ERR_NO_COOCCURRENCE = 5,     /* no lidar/track co-occurrence window */
  UVT_ERR_IO = 6,                  /* missing file or unreadable/unwritable path */
  UVT_ERR_PARSE = 7,               /* malformed record or config */
  UVT_ERR_INVALID_ARGUMENT = 8     /* bad argument or precondition */
} uvt_status;

/* Library version, e.g. "1.0.0". */
UVT_API const char* uvt_version(void);

/* Stable name of a status code, e.g. "UVT_ERR_NO_OVERLAP". */
UVT_API const char* uvt_status_name(uvt_status status);

/* Message of the most recent failure on this thread; empty string if none. */
UVT_API const char* uvt_last_error(void);

UVT_API void uvt_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Pipeline configuration                                              */
/* ------------------------------------------------------------------ */

typedef struct uvt_config uvt_config;

UVT_API uvt_status uvt_config_create_default(uvt_config** out);
UVT_API uvt_status uvt_config_load(const char* json_path, uvt_config** out);
UVT_API uvt_status uvt_config_parse(const char* json_text, uvt_config** out);
/* Serializes the full configuration (defaults included) as pretty JSON. */
UVT_API uvt_status uvt_config_dump(const uvt_config* config, char** json_out);
UVT_API uvt_status uvt_config_set_angle_convention(uvt_config* config,
                                                   const char* convention);
UVT_API uvt_status uvt_config_set_calibration_path(uvt_config* config, const char* path);
UVT_API void uvt_config_free(uvt_config* config);

/* ------------------------------------------------------------------ */
/* Session introspection                                               */
/* ------------------------------------------------------------------ */

typedef struct uvt_session uvt_session;

UVT_API uvt_status uvt_session_open(const char* manifest_path, uvt_session** out);
UVT_API void uvt_session_free(uvt_session* session);
UVT_API size_t uvt_session_detection_count(const uvt_session* session);
UVT_API size_t uvt_session_thermal_count(const uvt_session* session);
UVT_API size_t uvt_session_lidar_count(const uvt_session* session);
UVT_API size_t uvt_session_groundtruth_count(const uvt_session* session);

/* ------------------------------------------------------------------ */
/* Commands                                                            */
/* ------------------------------------------------------------------ */

typedef struct uvt_synth_options {
  int has_seed;                  /* nonzero: seed overrides the spec's seed */
  unsigned long long seed;
  const char* angle_convention; /* NULL keeps the spec's convention */
} uvt_synth_options;

/* Generates a synthetic session (manifest, streams, ground truth,
 * calibration) under out_dir from a scenario spec JSON file. */
UVT_API uvt_status uvt_synth(const char* spec_json_path, const char* out_dir,
                             const uvt_synth_options* options);

typedef struct uvt_track_stats {
  unsigned long long frames_processed;
  unsigned long long mono_frames;
  unsigned long long thermal_frames;
  unsigned long long rows_emitted;
  unsigned long long recalibrations;
} uvt_track_stats;

/* Runs the tracking pipeline over a recorded session and writes the
 * trajectory CSV (timestamp,x,y,z,vx,vy,vz,mode). The calibration file is
 * taken from the config, falling back to calibration.json beside the
 * manifest. stats_out may be NULL. */
UVT_API uvt_status uvt_track(const char* manifest_path, const uvt_config* config,
                             const char* out_csv, int bypass_kalman,
                             uvt_track_stats* stats_out);

/* Compares a trajectory CSV against ground truth and writes the evaluation
 * report JSON. When plot_dir is non-NULL, per-axis SVG curves are written
 * there as plot_x.svg / plot_y.svg / plot_z.svg. When table_out is
 * non-NULL, it receives the aligned plain-text report table (free with
 * uvt_string_free). */
UVT_API uvt_status uvt_evaluate(const char* trajectory_csv, const char* groundtruth_csv,
                                const char* out_json, const char* plot_dir,
                                char** table_out);

/* Finds the first window where a lidar target segment co-occurs with a
 * tracked box and writes the captured calibration record JSON. */
UVT_API uvt_status uvt_calibrate(const char* manifest_path, const uvt_config* config,
                                 const char* out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* UAVPIPE_H */
