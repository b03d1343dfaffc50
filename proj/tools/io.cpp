#include "io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "beltrami/errors.hpp"

namespace beltrami::cli {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& command, const json& config) {
  return json{{"command", command}, {"config", config}, {"version", kVersion}, {"timestamp", utc_timestamp()}};
}

json to_json(const Eigen::Vector3d& v) { return json::array({v(0), v(1), v(2)}); }

json to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

json to_json(const zeros::ZeroSet& zs) {
  json pts = json::array();
  for (std::size_t i = 0; i < zs.size(); ++i)
    pts.push_back({{"position", to_json(zs.points[i])},
                   {"residual", zs.residuals[i]},
                   {"jacobian_det", zs.jacobian_dets[i]}});
  const auto& d = zs.diagnostics;
  return json{{"count", zs.size()},
              {"zeros", pts},
              {"provenance", {{"kind", zs.provenance.kind}, {"truncation", zs.provenance.truncation},
                              {"seed", zs.provenance.seed}}},
              {"tolerances", {{"residual", zs.tolerances.residual}, {"dedup_radius", zs.tolerances.dedup_radius}}},
              {"diagnostics", {{"seeds", d.seeds}, {"converged", d.converged}, {"diverged", d.diverged},
                               {"singular", d.singular}, {"outside", d.outside}, {"duplicates", d.duplicates}}}};
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot open output file " + path);
  f << content;
}

}  // namespace beltrami::cli
