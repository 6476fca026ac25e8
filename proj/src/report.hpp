// Report builders behind the C interface.
#pragma once

#include <cstdint>
#include <string>

#include "logmon/io.hpp"

namespace logmon::report {

struct Config {
  unsigned long prime = 5;
  std::int64_t truncation = 12;
  std::int64_t weight_bound = 10;
  bool json = true;
  bool parallel = false;
};

OrderedJson monoid_report(const FineMonoid& m, const Config& cfg);
OrderedJson connection_report(const LogNablaModule& e, const Config& cfg, const std::string& command,
                              const Json& options);
// Runs the self-test suite; `passed` reports the overall outcome.
OrderedJson selftest_report(const Config& cfg, bool inject_fault, bool& passed);

std::string render(const OrderedJson& doc, bool json);

OrderedJson to_json(const Q& x);
OrderedJson to_json(const ExtQ& x);
OrderedJson to_json(const Element& x);
OrderedJson to_json(const QVector& v);
OrderedJson to_json(const QMatrix& m);

}  // namespace logmon::report
