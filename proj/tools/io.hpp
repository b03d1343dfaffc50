// Output helpers for the command-line front end: manifests, JSON
// conversions and CSV tables.
#pragma once

#include <Eigen/Core>
#include <json.hpp>
#include <string>
#include <vector>

#include "beltrami/zero_census.hpp"

namespace beltrami::cli {

using json = nlohmann::json;

std::string utc_timestamp();

/// {command, config, version, timestamp}; the result is added by the caller.
json manifest(const std::string& command, const json& config);

json to_json(const Eigen::Vector3d& v);
json to_json(const Eigen::Matrix3d& m);
json to_json(const zeros::ZeroSet& zs);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const;
};

/// Writes to the file, or to stdout when path is "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace beltrami::cli
