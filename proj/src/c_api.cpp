// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/qfnred.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "qfnred/commands.hpp"

struct qfnred_spec {
  qfnred::NetworkSpec spec;
};

struct qfnred_report {
  qfnred::CommandResult result;
};

namespace {

thread_local std::string g_last_error;

qfnred_status fail(qfnred_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

qfnred_status status_of(qfnred::ReportStatus s) { return static_cast<qfnred_status>(s); }

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs `body`, mapping exceptions to status codes and the thread's last error.
template <class F>
qfnred_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const qfnred::Error& e) {
    if (e.code() == qfnred::ErrorCode::invalid_argument) return fail(QFNRED_INVALID_ARGUMENT, e.what());
    return fail(status_of(qfnred::status_for(e)), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QFNRED_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(QFNRED_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(QFNRED_INTERNAL_ERROR, "unknown error");
  }
}

qfnred::CommandOptions convert(const qfnred_options* o) {
  qfnred::CommandOptions out;
  if (!o) return out;
  if (!(o->tol > 0.0)) throw qfnred::Error(qfnred::ErrorCode::invalid_argument, "tol must be > 0");
  out.tol = o->tol;
  if (o->internal) out.internal = std::vector<qfnred::Index>(o->internal, o->internal + o->internal_count);
  if (o->has_k) out.k = o->k;
  if (o->k_values) out.k_values.assign(o->k_values, o->k_values + o->k_count);
  out.t = o->t;
  if (o->rho0) out.rho0 = o->rho0;
  return out;
}

using Runner = qfnred::CommandResult (*)(const qfnred::NetworkSpec&, const qfnred::CommandOptions&);

qfnred_status run(Runner runner, const qfnred_spec* spec, const qfnred_options* opts,
                  qfnred_report** out) {
  if (!out) return fail(QFNRED_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  if (!spec) return fail(QFNRED_INVALID_ARGUMENT, "null spec");
  return guarded([&] {
    auto* rep = new qfnred_report{runner(spec->spec, convert(opts))};
    *out = rep;
    const qfnred_status s = status_of(rep->result.report.status);
    if (s != QFNRED_OK && rep->result.report.error) g_last_error = *rep->result.report.error;
    return s;
  });
}

}  // namespace

extern "C" {

const char* qfnred_version(void) { return QFNRED_VERSION_STRING; }

const char* qfnred_last_error(void) { return g_last_error.c_str(); }

void qfnred_options_init(qfnred_options* opts) {
  if (!opts) return;
  *opts = qfnred_options{};
  opts->tol = qfnred::kDefaultTol;
  opts->t = 1.0;
}

qfnred_status qfnred_spec_load(const char* path, qfnred_spec** out) {
  if (!out || !path) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new qfnred_spec{qfnred::load_spec(path)};
    return QFNRED_OK;
  });
}

qfnred_status qfnred_spec_parse(const char* text, size_t length, qfnred_spec** out) {
  if (!out || !text) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new qfnred_spec{qfnred::parse_spec(std::string_view(text, length))};
    return QFNRED_OK;
  });
}

qfnred_status qfnred_spec_save(const qfnred_spec* spec, const char* path) {
  if (!spec || !path) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qfnred::save_spec(spec->spec, path);
    return QFNRED_OK;
  });
}

qfnred_status qfnred_spec_to_json(const qfnred_spec* spec, char** out) {
  if (!spec || !out) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = duplicate(qfnred::emit_spec(spec->spec));
    return *out ? QFNRED_OK : fail(QFNRED_INTERNAL_ERROR, "out of memory");
  });
}

const char* qfnred_spec_kind(const qfnred_spec* spec) {
  return spec ? qfnred::to_string(spec->spec.kind()) : "";
}

void qfnred_spec_free(qfnred_spec* spec) { delete spec; }

void qfnred_string_free(char* s) { std::free(s); }

qfnred_status qfnred_validate(const qfnred_spec* spec, const qfnred_options* opts,
                              qfnred_report** out) {
  return run(&qfnred::run_validate, spec, opts, out);
}

qfnred_status qfnred_feedback(const qfnred_spec* spec, const qfnred_options* opts,
                              qfnred_report** out) {
  return run(&qfnred::run_feedback, spec, opts, out);
}

qfnred_status qfnred_adiabatic(const qfnred_spec* spec, const qfnred_options* opts,
                               qfnred_report** out) {
  return run(&qfnred::run_adiabatic, spec, opts, out);
}

qfnred_status qfnred_commute(const qfnred_spec* spec, const qfnred_options* opts,
                             qfnred_report** out) {
  return run(&qfnred::run_commute, spec, opts, out);
}

qfnred_status qfnred_converge(const qfnred_spec* spec, const qfnred_options* opts,
                              qfnred_report** out) {
  return run(&qfnred::run_converge, spec, opts, out);
}

qfnred_status qfnred_report_status(const qfnred_report* report) {
  if (!report) return fail(QFNRED_INVALID_ARGUMENT, "null report");
  return status_of(report->result.report.status);
}

qfnred_status qfnred_report_json(const qfnred_report* report, int timestamp, char** out) {
  if (!report || !out) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = duplicate(qfnred::render_report(report->result.report, {timestamp != 0}));
    return *out ? QFNRED_OK : fail(QFNRED_INTERNAL_ERROR, "out of memory");
  });
}

qfnred_status qfnred_report_summary(const qfnred_report* report, char** out) {
  if (!report || !out) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = duplicate(qfnred::summarize_report(report->result.report));
    return *out ? QFNRED_OK : fail(QFNRED_INTERNAL_ERROR, "out of memory");
  });
}

qfnred_status qfnred_report_save(const qfnred_report* report, const char* path, int timestamp) {
  if (!report || !path) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qfnred::write_file_atomic(path, qfnred::render_report(report->result.report, {timestamp != 0}));
    return QFNRED_OK;
  });
}

qfnred_status qfnred_report_output(const qfnred_report* report, qfnred_spec** out) {
  if (!report || !out) return fail(QFNRED_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    if (report->result.output) *out = new qfnred_spec{*report->result.output};
    return QFNRED_OK;
  });
}

void qfnred_report_free(qfnred_report* report) { delete report; }

}  // extern "C"
