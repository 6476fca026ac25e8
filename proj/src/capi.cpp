#include "logmon/logmon.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "report.hpp"

struct lm_config {
  logmon::report::Config cfg;
};
struct lm_monoid {
  logmon::FineMonoid m;
};
struct lm_connection {
  logmon::LogNablaModule e;
};

namespace {

thread_local std::string g_last_error;

lm_status status_of(logmon::ErrorKind k) {
  switch (k) {
    case logmon::ErrorKind::ParseError: return LM_PARSE_ERROR;
    case logmon::ErrorKind::BudgetExceeded: return LM_BUDGET_EXCEEDED;
    default: return LM_HYPOTHESIS_VIOLATED;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lm_status invalid(const char* msg) {
  g_last_error = msg;
  return LM_INVALID_ARGUMENT;
}

template <class F>
lm_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const logmon::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "BudgetExceeded: out of memory";
    return LM_BUDGET_EXCEEDED;
  } catch (const std::exception& e) {
    g_last_error = std::string("ParseError: ") + e.what();
    return LM_PARSE_ERROR;
  }
}

const logmon::report::Config& config_or_default(const lm_config* cfg) {
  static const logmon::report::Config defaults;
  return cfg ? cfg->cfg : defaults;
}

}  // namespace

extern "C" {

const char* lm_version(void) { return "1.0.0"; }
const char* lm_last_error(void) { return g_last_error.c_str(); }
void lm_string_free(char* s) { std::free(s); }

lm_config* lm_config_create(void) { return new (std::nothrow) lm_config(); }
void lm_config_destroy(lm_config* cfg) { delete cfg; }

lm_status lm_config_set_prime(lm_config* cfg, long prime) {
  if (!cfg) return invalid("null config");
  if (!logmon::is_prime(prime)) return invalid("prime must be a prime number");
  cfg->cfg.prime = static_cast<unsigned long>(prime);
  return LM_OK;
}
lm_status lm_config_set_truncation(lm_config* cfg, long truncation) {
  if (!cfg) return invalid("null config");
  if (truncation <= 0) return invalid("truncation must be positive");
  cfg->cfg.truncation = truncation;
  return LM_OK;
}
lm_status lm_config_set_weight_bound(lm_config* cfg, long bound) {
  if (!cfg) return invalid("null config");
  if (bound <= 0) return invalid("weight bound must be positive");
  cfg->cfg.weight_bound = bound;
  return LM_OK;
}
lm_status lm_config_set_format(lm_config* cfg, lm_format format) {
  if (!cfg) return invalid("null config");
  if (format != LM_FORMAT_JSON && format != LM_FORMAT_TEXT) return invalid("unknown format");
  cfg->cfg.json = format == LM_FORMAT_JSON;
  return LM_OK;
}
lm_status lm_config_set_parallel(lm_config* cfg, int parallel) {
  if (!cfg) return invalid("null config");
  cfg->cfg.parallel = parallel != 0;
  return LM_OK;
}

lm_status lm_monoid_parse(const char* json, lm_monoid** out) {
  if (!json || !out) return invalid("null argument");
  return guarded([&] {
    *out = new lm_monoid{logmon::parse_monoid(logmon::parse_json_text(json))};
    return LM_OK;
  });
}
lm_status lm_monoid_load(const char* path, lm_monoid** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] {
    *out = new lm_monoid{logmon::parse_monoid(logmon::load_json_file(path))};
    return LM_OK;
  });
}
lm_status lm_monoid_analyze(const lm_monoid* m, const lm_config* cfg, char** report) {
  if (!m || !report) return invalid("null argument");
  return guarded([&] {
    const auto& c = config_or_default(cfg);
    *report = dup(logmon::report::render(logmon::report::monoid_report(m->m, c), c.json));
    return LM_OK;
  });
}
void lm_monoid_destroy(lm_monoid* m) { delete m; }

lm_status lm_connection_parse(const char* json, const lm_config* cfg, lm_connection** out) {
  if (!json || !out) return invalid("null argument");
  return guarded([&] {
    *out = new lm_connection{
        logmon::parse_connection(logmon::parse_json_text(json), config_or_default(cfg).truncation)};
    return LM_OK;
  });
}
lm_status lm_connection_load(const char* path, const lm_config* cfg, lm_connection** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] {
    *out = new lm_connection{
        logmon::parse_connection(logmon::load_json_file(path), config_or_default(cfg).truncation)};
    return LM_OK;
  });
}
lm_status lm_connection_run(const lm_connection* c, const lm_config* cfg, const char* command, const char* options,
                            char** report) {
  if (!c || !command || !report) return invalid("null argument");
  static const char* known[] = {"exponents", "shear", "unipotent", "dl", "homotopy", "logconv"};
  bool ok = false;
  for (const char* k : known) ok = ok || std::strcmp(k, command) == 0;
  if (!ok) return invalid("unknown connection command");
  return guarded([&] {
    const auto& conf = config_or_default(cfg);
    logmon::Json opts = options ? logmon::parse_json_text(options) : logmon::Json::object();
    if (!opts.is_object()) logmon::fail(logmon::ErrorKind::ParseError, "options must be a JSON object");
    *report = dup(logmon::report::render(logmon::report::connection_report(c->e, conf, command, opts), conf.json));
    return LM_OK;
  });
}
void lm_connection_destroy(lm_connection* c) { delete c; }

lm_status lm_selftest(const lm_config* cfg, int inject_fault, char** report) {
  return guarded([&] {
    const auto& conf = config_or_default(cfg);
    bool passed = false;
    auto doc = logmon::report::selftest_report(conf, inject_fault != 0, passed);
    if (report) *report = dup(logmon::report::render(doc, conf.json));
    if (!passed) g_last_error = "self-test failed";
    return passed ? LM_OK : LM_SELFTEST_FAILED;
  });
}

}  // extern "C"
