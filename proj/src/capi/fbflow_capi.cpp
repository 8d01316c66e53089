#include "fbflow/fbflow.h"

#include "fbflow/config.hpp"
#include "fbflow/operators.hpp"
#include "fbflow/pipeline.hpp"

#include <exception>
#include <new>
#include <string>

struct fbf_config {
  fbflow::RunConfig cfg;
  double grid = 0.0;
};

struct fbf_result {
  fbflow::RunResult r;
};

struct fbf_operator {
  fbflow::OperatorSpec spec;
};

namespace {

thread_local std::string g_last_error;

fbf_status set_error(fbf_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
fbf_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const fbflow::Error& e) {
    return set_error(static_cast<fbf_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FBF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FBF_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FBF_ERR_INTERNAL, "unknown exception");
  }
}

}  // namespace

extern "C" {

const char* fbf_version(void) { return "1.0.0"; }

const char* fbf_status_string(fbf_status s) {
  switch (s) {
    case FBF_OK: return "ok";
    case FBF_ERR_UNKNOWN_SUBCOMMAND: return "unknown subcommand";
    case FBF_ERR_INTERNAL: return "internal error";
    default: break;
  }
  const int c = static_cast<int>(s);
  if (c >= 1 && c <= static_cast<int>(fbflow::ErrorCode::Io))
    return fbflow::to_string(static_cast<fbflow::ErrorCode>(c));
  return "unknown status";
}

const char* fbf_last_error(void) { return g_last_error.c_str(); }

fbf_status fbf_config_parse(const char* text, fbf_config** out) {
  return guarded([&] {
    if (!text || !out) return set_error(FBF_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    auto* c = new fbf_config{fbflow::parse_config(text), 0.0};
    *out = c;
    return FBF_OK;
  });
}

fbf_status fbf_config_load(const char* path, fbf_config** out) {
  return guarded([&] {
    if (!path || !out) return set_error(FBF_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    auto* c = new fbf_config{fbflow::load_config(path), 0.0};
    *out = c;
    return FBF_OK;
  });
}

fbf_status fbf_config_set_grid(fbf_config* cfg, double grid_spacing) {
  if (!cfg) return set_error(FBF_ERR_INVALID_ARGUMENT, "null config");
  if (!(grid_spacing > 0.0)) return set_error(FBF_ERR_INVALID_CONFIG, "grid spacing must be positive");
  cfg->grid = grid_spacing;
  return FBF_OK;
}

void fbf_config_destroy(fbf_config* cfg) { delete cfg; }

fbf_status fbf_run(const fbf_config* cfg, const char* subcommand, const char* out_dir, unsigned long long seed,
                   int order, fbf_result** out) {
  return guarded([&] {
    if (!cfg || !subcommand || !out) return set_error(FBF_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    const std::string sub = subcommand;
    if (sub != "check-conditions" && sub != "evolve" && sub != "oracle-test" && sub != "taylor-seed")
      return set_error(FBF_ERR_UNKNOWN_SUBCOMMAND, "unknown subcommand '" + sub + "'");
    fbflow::RunRequest req;
    req.subcommand = sub;
    req.out_dir = out_dir ? out_dir : "";
    req.seed = seed;
    req.order = order;
    req.grid = cfg->grid;
    *out = new fbf_result{fbflow::dispatch(cfg->cfg, req)};
    if ((*out)->r.exit_code == 2) g_last_error = (*out)->r.summary;
    return FBF_OK;
  });
}

int fbf_result_exit_code(const fbf_result* r) { return r ? r->r.exit_code : 2; }
const char* fbf_result_summary(const fbf_result* r) { return r ? r->r.summary.c_str() : ""; }
const char* fbf_result_report(const fbf_result* r) { return r ? r->r.report.c_str() : ""; }
void fbf_result_destroy(fbf_result* r) { delete r; }

fbf_status fbf_operator_create(fbf_flow flow, int dim, double parameter, fbf_operator** out) {
  return guarded([&] {
    if (!out) return set_error(FBF_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    switch (flow) {
      case FBF_FLOW_PLAPLACIAN: *out = new fbf_operator{fbflow::OperatorSpec::plaplacian(dim, parameter)}; break;
      case FBF_FLOW_GCF: *out = new fbf_operator{fbflow::OperatorSpec::gauss_flow(dim, parameter)}; break;
      case FBF_FLOW_HEAT: *out = new fbf_operator{fbflow::OperatorSpec::heat(dim)}; break;
      default: return set_error(FBF_ERR_INVALID_ARGUMENT, "unknown flow");
    }
    return FBF_OK;
  });
}

namespace {

void unpack(const fbf_operator* op, const double* A, const double* p, fbflow::Mat& Am, fbflow::Vec& pv) {
  const int n = op->spec.dim();
  Am.resize(n, n);
  pv.resize(n);
  for (int i = 0; i < n; ++i) {
    pv(i) = p[i];
    for (int j = 0; j < n; ++j) Am(i, j) = A[i * n + j];
  }
}

}  // namespace

fbf_status fbf_operator_eval(const fbf_operator* op, const double* A, const double* p, double u, double* value) {
  return guarded([&] {
    if (!op || !A || !p || !value) return set_error(FBF_ERR_INVALID_ARGUMENT, "null argument");
    fbflow::Mat Am;
    fbflow::Vec pv;
    unpack(op, A, p, Am, pv);
    *value = op->spec.eval(Am, pv, u);
    return FBF_OK;
  });
}

fbf_status fbf_operator_partials(const fbf_operator* op, const double* A, const double* p, double u, double* value,
                                 double* dA, double* dp, double* du) {
  return guarded([&] {
    if (!op || !A || !p) return set_error(FBF_ERR_INVALID_ARGUMENT, "null argument");
    fbflow::Mat Am;
    fbflow::Vec pv;
    unpack(op, A, p, Am, pv);
    const auto P = op->spec.partials(Am, pv, u);
    const int n = op->spec.dim();
    if (value) *value = P.value;
    if (du) *du = P.du;
    for (int i = 0; i < n; ++i) {
      if (dp) dp[i] = P.dp(i);
      if (dA)
        for (int j = 0; j < n; ++j) dA[i * n + j] = P.dA(i, j);
    }
    return FBF_OK;
  });
}

void fbf_operator_destroy(fbf_operator* op) { delete op; }

}  // extern "C"
