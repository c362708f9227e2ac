#pragma once

// JSON (de)serialization of trained selector models.

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mlp.hpp"

namespace owcsim {

inline nlohmann::json mlp_to_json(const MlpModel& m) {
  nlohmann::json j;
  j["format"] = "owcsim-mlp-v1";
  j["n_in"] = m.n_in;
  j["n_hidden"] = m.n_hidden;
  j["n_out"] = m.n_out;
  j["output"] = m.output == MlpOutput::softmax ? "softmax" : "sigmoid";
  j["w1"] = m.w1;
  j["b1"] = m.b1;
  j["w2"] = m.w2;
  j["b2"] = m.b2;
  j["scaler"] = {{"log_input", m.scaler.log_input},
                 {"mean", m.scaler.mean},
                 {"stddev", m.scaler.stddev}};
  return j;
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "owcsim-mlp-v1")
    throw std::runtime_error("mlp_from_json: unknown model format");
  MlpModel m;
  m.n_in = j.at("n_in").get<int>();
  m.n_hidden = j.at("n_hidden").get<int>();
  m.n_out = j.at("n_out").get<int>();
  std::string out = j.at("output").get<std::string>();
  if (out == "softmax")
    m.output = MlpOutput::softmax;
  else if (out == "sigmoid")
    m.output = MlpOutput::sigmoid;
  else
    throw std::runtime_error("mlp_from_json: unknown output kind");
  m.w1 = j.at("w1").get<std::vector<double>>();
  m.b1 = j.at("b1").get<std::vector<double>>();
  m.w2 = j.at("w2").get<std::vector<double>>();
  m.b2 = j.at("b2").get<std::vector<double>>();
  const auto& sc = j.at("scaler");
  m.scaler.log_input = sc.at("log_input").get<bool>();
  m.scaler.mean = sc.at("mean").get<std::vector<double>>();
  m.scaler.stddev = sc.at("stddev").get<std::vector<double>>();
  auto expect = [](bool ok, const char* what) {
    if (!ok) throw std::runtime_error(std::string("mlp_from_json: inconsistent ") + what);
  };
  expect(m.w1.size() == static_cast<std::size_t>(m.n_hidden) * m.n_in, "w1");
  expect(m.b1.size() == static_cast<std::size_t>(m.n_hidden), "b1");
  expect(m.w2.size() == static_cast<std::size_t>(m.n_out) * m.n_hidden, "w2");
  expect(m.b2.size() == static_cast<std::size_t>(m.n_out), "b2");
  expect(m.scaler.mean.size() == static_cast<std::size_t>(m.n_in), "scaler");
  expect(m.scaler.stddev.size() == static_cast<std::size_t>(m.n_in), "scaler");
  return m;
}

inline void save_mlp(const MlpModel& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_mlp: cannot open " + path);
  f << mlp_to_json(m).dump(2) << "\n";
}

inline MlpModel load_mlp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_mlp: cannot open " + path);
  nlohmann::json j;
  f >> j;
  return mlp_from_json(j);
}

}  // namespace owcsim
