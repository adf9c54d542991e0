#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pareto_tas/datasets.hpp"
#include "pareto_tas/model.hpp"

namespace pareto_tas {

// {"means": [[...], ...], "variances": [...], "labels": [...]}; labels optional.
inline nlohmann::json to_json(const BanditInstance& inst) {
  nlohmann::json j;
  j["means"] = inst.means.to_rows();
  j["variances"] = inst.variances;
  j["labels"] = inst.labels;
  return j;
}

inline BanditInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("means") || !j.contains("variances")) {
    throw std::invalid_argument("instance JSON needs \"means\" and \"variances\"");
  }
  BanditInstance inst;
  const auto rows = j.at("means").get<std::vector<std::vector<double>>>();
  inst.means = Matrix::from_rows(rows);
  inst.variances = j.at("variances").get<std::vector<double>>();
  if (j.contains("labels")) inst.labels = j.at("labels").get<std::vector<std::string>>();
  inst.validate();
  return inst;
}

inline std::string dump_instance(const BanditInstance& inst) { return to_json(inst).dump(2) + "\n"; }

inline BanditInstance parse_instance(const std::string& text) {
  return instance_from_json(nlohmann::json::parse(text));
}

inline BanditInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// An embedded name when one matches, otherwise a path.
inline BanditInstance load_instance(const std::string& name_or_path) {
  if (name_or_path == "covid") return datasets::covid();
  return read_instance_file(name_or_path);
}

}  // namespace pareto_tas
