// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/scaling_law.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace corpuskit::scaling {

using nlohmann::json;

std::vector<Observation<double>> read_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open observations: " + path.string());
  std::vector<Observation<double>> obs;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == ';') c = ' ';
    const auto trimmed = line.find_first_not_of(" \r");
    if (trimmed == std::string::npos || line[trimmed] == '#') continue;
    std::istringstream ss(line);
    Observation<double> o;
    std::string extra;
    if (!(ss >> o.N >> o.D >> o.loss)) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected three numbers");
    }
    if (ss >> extra) throw Error(path.string() + ":" + std::to_string(lineno) + ": more than three columns");
    header_allowed = false;
    obs.push_back(o);
  }
  return obs;
}

std::string fit_to_json(const FitResult<double>& r, const std::vector<Observation<double>>& obs,
                        const std::vector<std::pair<double, double>>& curve, double curve_N) {
  json j;
  const auto v = r.params.vec();
  for (int i = 0; i < kNumParams; ++i) {
    j["params"][kParamNames[i]] = v[i];
    j["at_bound"][kParamNames[i]] = r.at_bound[i];
  }
  j["rmse"] = r.rmse;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["converged"] = r.converged;
  j["message"] = r.message;
  j["warnings"] = r.warnings;
  j["observations"] = json::array();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double pred = predict(r.params, obs[i].N, obs[i].D);
    j["observations"].push_back(
        {{"N", obs[i].N}, {"D", obs[i].D}, {"loss", obs[i].loss}, {"predicted", pred}, {"residual", obs[i].loss - pred}});
  }
  if (!curve.empty()) {
    j["curve"]["N"] = curve_N;
    j["curve"]["points"] = json::array();
    for (const auto& [D, loss] : curve) j["curve"]["points"].push_back({D, loss});
  }
  return j.dump(2);
}

}  // namespace corpuskit::scaling
