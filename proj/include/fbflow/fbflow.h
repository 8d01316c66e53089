/* C interface to the fixed-domain free-boundary engine. */
#ifndef FBFLOW_H
#define FBFLOW_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FBF_BUILDING_LIBRARY)
#define FBF_API __attribute__((visibility("default")))
#else
#define FBF_API
#endif

typedef enum fbf_status {
  FBF_OK = 0,
  FBF_ERR_INVALID_ARGUMENT = 1,
  FBF_ERR_INVALID_CONFIG = 2,
  FBF_ERR_INVALID_STATE = 3,
  FBF_ERR_TRANSVERSALITY = 4,
  FBF_ERR_DIFFEOMORPHISM = 5,
  FBF_ERR_ROOT_BRACKET = 6,
  FBF_ERR_MULTIPLE_ROOTS = 7,
  FBF_ERR_FRAME_PRECONDITION = 8,
  FBF_ERR_CFL = 9,
  FBF_ERR_NON_FINITE = 10,
  FBF_ERR_CONVEXITY = 11,
  FBF_ERR_IO = 12,
  FBF_ERR_UNKNOWN_SUBCOMMAND = 50,
  FBF_ERR_INTERNAL = 99
} fbf_status;

typedef enum fbf_flow { FBF_FLOW_PLAPLACIAN = 0, FBF_FLOW_GCF = 1, FBF_FLOW_HEAT = 2 } fbf_flow;

typedef struct fbf_config fbf_config;
typedef struct fbf_result fbf_result;
typedef struct fbf_operator fbf_operator;

FBF_API const char* fbf_version(void);
FBF_API const char* fbf_status_string(fbf_status s);
/* Message of the last failed call on this thread ("" if none). */
FBF_API const char* fbf_last_error(void);

FBF_API fbf_status fbf_config_parse(const char* text, fbf_config** out);
FBF_API fbf_status fbf_config_load(const char* path, fbf_config** out);
FBF_API fbf_status fbf_config_set_grid(fbf_config* cfg, double grid_spacing);
FBF_API void fbf_config_destroy(fbf_config* cfg);

/* Runs check-conditions, evolve, oracle-test or taylor-seed. out_dir may be
 * NULL (use the configured directory); order < 0 keeps the configured Taylor
 * order. A result is produced for audit failures and runtime aborts too; the
 * status is non-OK only when no run took place. */
FBF_API fbf_status fbf_run(const fbf_config* cfg, const char* subcommand, const char* out_dir,
                           unsigned long long seed, int order, fbf_result** out);
/* 0 pass, 1 audit failure, 2 runtime abort. */
FBF_API int fbf_result_exit_code(const fbf_result* r);
FBF_API const char* fbf_result_summary(const fbf_result* r);
FBF_API const char* fbf_result_report(const fbf_result* r);
FBF_API void fbf_result_destroy(fbf_result* r);

/* Pointwise operator F(A, p, u). A is row-major dim x dim. */
FBF_API fbf_status fbf_operator_create(fbf_flow flow, int dim, double parameter, fbf_operator** out);
FBF_API fbf_status fbf_operator_eval(const fbf_operator* op, const double* A, const double* p, double u,
                                     double* value);
FBF_API fbf_status fbf_operator_partials(const fbf_operator* op, const double* A, const double* p, double u,
                                         double* value, double* dA, double* dp, double* du);
FBF_API void fbf_operator_destroy(fbf_operator* op);

#ifdef __cplusplus
}
#endif

#endif
