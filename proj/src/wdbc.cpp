#include "nnagg/wdbc.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nnagg/errors.hpp"

namespace nnagg {

Dataset load_wdbc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);

  std::vector<double> features;
  std::vector<double> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != kWdbcFeatureCount + 2) {
      throw ParseError(path + ": row " + std::to_string(lineno) + ": expected 32 columns, got " +
                       std::to_string(cells.size()));
    }

    const std::string& diag = cells[1];
    if (diag == "M") {
      labels.push_back(1.0);
    } else if (diag == "B") {
      labels.push_back(0.0);
    } else {
      throw ParseError(path + ": row " + std::to_string(lineno) +
                       ": unknown diagnosis code '" + diag + "'");
    }

    for (std::size_t j = 0; j < kWdbcFeatureCount; ++j) {
      const std::string& c = cells[j + 2];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw ParseError(path + ": row " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
      features.push_back(v);
    }
  }

  if (labels.empty()) throw ParseError(path + ": empty file, zero rows");

  Dataset ds;
  ds.task = Task::Classification;
  ds.name = "wdbc";
  ds.features = Matrix(labels.size(), kWdbcFeatureCount);
  ds.features.data = std::move(features);
  ds.targets = Matrix(labels.size(), 1);
  ds.targets.data = std::move(labels);
  return ds;
}

}  // namespace nnagg
