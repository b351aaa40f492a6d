#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "statdist/common.hpp"
#include "statdist/hilbert.hpp"
#include "statdist/simulate.hpp"

namespace statdist::io {

using json = nlohmann::ordered_json;

inline json state_to_json(const hilbert::PureState& state) {
  json out = json::array();
  for (const auto& c : state.amplitudes()) {
    out.push_back(json::array({c.real(), c.imag()}));
  }
  return out;
}

/// States are arrays of [re, im] pairs.
inline hilbert::PureState state_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("state must be a non-empty array of [re, im] pairs");
  }
  std::vector<hilbert::Complex> amplitudes;
  amplitudes.reserve(j.size());
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      throw ValidationError("state amplitude must be an [re, im] pair");
    }
    amplitudes.emplace_back(entry[0].get<double>(), entry[1].get<double>());
  }
  return hilbert::PureState(std::move(amplitudes));
}

inline json basis_to_json(const hilbert::MeasurementBasis& basis) {
  json out = json::array();
  for (const auto& s : basis.states()) out.push_back(state_to_json(s));
  return out;
}

inline hilbert::MeasurementBasis basis_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("basis must be a non-empty array of states");
  }
  std::vector<hilbert::PureState> states;
  states.reserve(j.size());
  for (const auto& entry : j) states.push_back(state_from_json(entry));
  return hilbert::MeasurementBasis(std::move(states));
}

/// Sheets carry `columns: [{id, theta}]`; the law is supplied separately.
inline std::vector<sim::Column> columns_from_json(const json& j) {
  if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array()) {
    throw ValidationError("sheet must be an object with a 'columns' array");
  }
  std::vector<sim::Column> columns;
  for (const auto& entry : j["columns"]) {
    if (!entry.is_object() || !entry.contains("id") ||
        !entry.contains("theta") || !entry["id"].is_string() ||
        !entry["theta"].is_number()) {
      throw ValidationError(
          "sheet column must be an object {id: string, theta: number}");
    }
    columns.push_back(
        {entry["id"].get<std::string>(), entry["theta"].get<double>()});
  }
  return columns;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace statdist::io
