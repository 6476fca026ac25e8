// Command-line front end over the C interface.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logmon/logmon.h"

namespace {

constexpr int kExitParse = 2;

int exit_code(lm_status s) {
  switch (s) {
    case LM_OK: return 0;
    case LM_SELFTEST_FAILED: return 1;
    case LM_PARSE_ERROR: return 2;
    case LM_BUDGET_EXCEEDED: return 3;
    case LM_HYPOTHESIS_VIOLATED: return 4;
    case LM_INVALID_ARGUMENT: return kExitParse;
  }
  return kExitParse;
}

int report_failure(lm_status s) {
  std::cerr << "error: " << lm_last_error() << "\n";
  return exit_code(s);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

struct ConfigHandle {
  lm_config* cfg = lm_config_create();
  ~ConfigHandle() { lm_config_destroy(cfg); }
};

void emit(char* report) {
  if (!report) return;
  std::cout << report;
  lm_string_free(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fine monoids, weighted series and log connections with exact arithmetic"};
  app.require_subcommand(1);
  app.fallthrough();

  long prime = 5, truncation = 12, weight_bound = 10;
  std::string format = "json";
  bool parallel = false;
  app.add_option("--prime", prime, "Prime for valuations")->capture_default_str();
  app.add_option("--truncation", truncation, "Default truncation order in the weighting")->capture_default_str();
  app.add_option("--weight-bound", weight_bound, "Search bound for bounded decisions")->capture_default_str();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  app.add_flag("--parallel", parallel, "Solve each weight level of the shear concurrently");

  auto* analyze = app.add_subcommand("monoid-analyze", "Faces, units, groups and saturation of a monoid");
  std::string monoid_path;
  analyze->add_option("input", monoid_path, "Monoid document")->required();

  auto* conn = app.add_subcommand("connection", "Operations on a log connection document");
  std::string action, conn_path, sigma_path, xi, xi_prime, qa, q_eta;
  std::vector<int> face;
  bool all_faces = false;
  long l = -1, target = 0, depth = 8;
  conn->add_option("action", action, "exponents | shear | unipotent | dl | homotopy | logconv")
      ->required()
      ->check(CLI::IsMember({"exponents", "shear", "unipotent", "dl", "homotopy", "logconv"}));
  conn->add_option("input", conn_path, "Connection document")->required();
  conn->add_option("--sigma", sigma_path, "Exponent-set document (default {0})");
  conn->add_option("--face", face, "Generator indices of the face, comma separated")->delimiter(',');
  conn->add_flag("--all-faces", all_faces, "Report every face");
  conn->add_option("--l", l, "Order of the difference operator (default: truncation)");
  conn->add_option("--target", target, "Exponent block projected onto")->capture_default_str();
  conn->add_option("--xi", xi, "Exponent as a JSON array of rationals");
  conn->add_option("--xi-prime", xi_prime, "Second exponent as a JSON array of rationals");
  conn->add_option("--qa", qa, "Radius exponent a' = p^-qa");
  conn->add_option("--q-eta", q_eta, "eta = p^-q_eta");
  conn->add_option("--depth", depth, "Largest |k| for log-convergence")->capture_default_str();

  auto* self = app.add_subcommand("selftest", "Oracle equivalence and invariant suite");
  bool inject = false;
  self->add_flag("--inject-fault", inject, "Corrupt one fixture coefficient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  ConfigHandle h;
  lm_status s = LM_OK;
  if ((s = lm_config_set_prime(h.cfg, prime)) != LM_OK || (s = lm_config_set_truncation(h.cfg, truncation)) != LM_OK ||
      (s = lm_config_set_weight_bound(h.cfg, weight_bound)) != LM_OK ||
      (s = lm_config_set_format(h.cfg, format == "text" ? LM_FORMAT_TEXT : LM_FORMAT_JSON)) != LM_OK ||
      (s = lm_config_set_parallel(h.cfg, parallel ? 1 : 0)) != LM_OK)
    return report_failure(s);

  if (*analyze) {
    lm_monoid* m = nullptr;
    if ((s = lm_monoid_load(monoid_path.c_str(), &m)) != LM_OK) return report_failure(s);
    char* report = nullptr;
    s = lm_monoid_analyze(m, h.cfg, &report);
    lm_monoid_destroy(m);
    if (s != LM_OK) return report_failure(s);
    emit(report);
    return 0;
  }

  if (*conn) {
    nlohmann::json opts = nlohmann::json::object();
    try {
      if (!sigma_path.empty()) {
        std::string text;
        if (!read_file(sigma_path, text)) {
          std::cerr << "error: cannot open " << sigma_path << "\n";
          return kExitParse;
        }
        opts["sigma"] = nlohmann::json::parse(text);
      }
      if (conn->count("--face")) opts["face"] = face;
      if (all_faces) opts["all_faces"] = true;
      if (l >= 0) opts["l"] = l;
      opts["target"] = target;
      opts["depth"] = depth;
      if (!xi.empty()) opts["xi"] = nlohmann::json::parse(xi);
      if (!xi_prime.empty()) opts["xi_prime"] = nlohmann::json::parse(xi_prime);
      if (!qa.empty()) opts["qa"] = qa;
      if (!q_eta.empty()) opts["q_eta"] = q_eta;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitParse;
    }
    lm_connection* c = nullptr;
    if ((s = lm_connection_load(conn_path.c_str(), h.cfg, &c)) != LM_OK) return report_failure(s);
    char* report = nullptr;
    s = lm_connection_run(c, h.cfg, action.c_str(), opts.dump().c_str(), &report);
    lm_connection_destroy(c);
    if (s != LM_OK) return report_failure(s);
    emit(report);
    return 0;
  }

  char* report = nullptr;
  s = lm_selftest(h.cfg, inject ? 1 : 0, &report);
  emit(report);
  if (s != LM_OK) return report_failure(s);
  return 0;
}
