// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/fl_core.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace vrvfl::fl {

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void expect_header(std::istream& is, const char* magic) {
  std::string m, version;
  if (!(is >> m >> version) || m != magic || version != "v1") {
    throw RuntimeError(std::string("expected '") + magic + " v1' header");
  }
}

} // namespace

void write_weights(std::ostream& os, const ModelWeights& w) {
  os << "vrvfl-weights v1 " << w.size() << '\n';
  for (double v : w.values) {
    put(os, v);
    os << '\n';
  }
}

ModelWeights read_weights(std::istream& is) {
  expect_header(is, "vrvfl-weights");
  std::size_t n = 0;
  if (!(is >> n)) throw RuntimeError("weights: missing count");
  ModelWeights w;
  w.values.resize(n);
  for (double& v : w.values) {
    if (!(is >> v)) throw RuntimeError("weights: truncated file");
  }
  return w;
}

void write_partition(std::ostream& os, const Partition& p) {
  os << "vrvfl-partition v1 " << p.size() << ' ' << p.dims << '\n';
  for (std::size_t r = 0; r < p.size(); ++r) {
    os << p.labels[r];
    for (double v : p.row(r)) {
      os << ' ';
      put(os, v);
    }
    os << '\n';
  }
}

Partition read_partition(std::istream& is) {
  expect_header(is, "vrvfl-partition");
  std::size_t rows = 0;
  Partition p;
  if (!(is >> rows >> p.dims)) throw RuntimeError("partition: missing shape");
  p.labels.resize(rows);
  p.features.resize(rows * p.dims);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!(is >> p.labels[r])) throw RuntimeError("partition: truncated file");
    for (std::size_t j = 0; j < p.dims; ++j) {
      if (!(is >> p.features[r * p.dims + j])) throw RuntimeError("partition: truncated file");
    }
  }
  return p;
}

} // namespace vrvfl::fl
