#include "gedfem/weights_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace gedfem {

using nlohmann::json;

namespace {

json matrix_to_json(const double* data, int rows, int cols) {
  json m = json::array();
  for (int i = 0; i < rows; ++i) {
    json row = json::array();
    for (int j = 0; j < cols; ++j) row.push_back(data[i * cols + j]);
    m.push_back(row);
  }
  return m;
}

void matrix_from_json(const json& j, const std::string& where, double* data, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ParseError(where + ": expected " + std::to_string(rows) + " rows");
  for (int i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ParseError(where + " row " + std::to_string(i) + ": expected " + std::to_string(cols) +
                       " entries");
    for (int j2 = 0; j2 < cols; ++j2) {
      if (!row[j2].is_number()) throw ParseError(where + ": non-numeric entry");
      data[i * cols + j2] = row[j2].get<double>();
    }
  }
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw ParseError(ctx + ": missing field '" + key + "'");
  if (!j[key].is_number()) throw ParseError(ctx + ": field '" + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

std::string weights_to_json(const DataDrivenParams& p) {
  json root;
  root["model_version"] = 1;

  json psi_layers = json::array();
  {
    json l0;
    l0["w_x"] = matrix_to_json(&p.psi_iso_net.wx1[0][0], kNetHiddenWidth, 2);
    l0["b"] = matrix_to_json(p.psi_iso_net.b1.data(), 1, kNetHiddenWidth)[0];
    psi_layers.push_back(l0);
    json l1;
    l1["w_z"] = matrix_to_json(&p.psi_iso_net.wz1[0][0], kNetHiddenWidth, kNetHiddenWidth);
    l1["w_x"] = matrix_to_json(&p.psi_iso_net.wx2[0][0], kNetHiddenWidth, 2);
    l1["b"] = matrix_to_json(p.psi_iso_net.b2.data(), 1, kNetHiddenWidth)[0];
    psi_layers.push_back(l1);
    json l2;
    l2["w_z"] = matrix_to_json(p.psi_iso_net.wz2.data(), 1, kNetHiddenWidth);
    l2["w_x"] = matrix_to_json(p.psi_iso_net.wx3.data(), 1, 2);
    l2["b"] = json::array({p.psi_iso_net.b3});
    psi_layers.push_back(l2);
  }
  root["psi_iso"] = {{"layers", psi_layers}};

  json yield_layers = json::array();
  {
    json l0;
    l0["w"] = matrix_to_json(p.yield_net.w1.data(), kNetHiddenWidth, 1);
    l0["b"] = matrix_to_json(p.yield_net.b1.data(), 1, kNetHiddenWidth)[0];
    yield_layers.push_back(l0);
    json l1;
    l1["w"] = matrix_to_json(&p.yield_net.w2[0][0], kNetHiddenWidth, kNetHiddenWidth);
    l1["b"] = matrix_to_json(p.yield_net.b2.data(), 1, kNetHiddenWidth)[0];
    yield_layers.push_back(l1);
    json l2;
    l2["w"] = matrix_to_json(p.yield_net.w3.data(), 1, kNetHiddenWidth);
    l2["b"] = json::array();
    yield_layers.push_back(l2);
  }
  root["yield"] = {{"layers", yield_layers}, {"a0", p.yield_net.a0}, {"b0", p.yield_net.b0}};

  root["mu_e"] = p.mu_e;
  root["lambda_e"] = p.lambda_e;
  root["eta_d"] = p.eta_d;
  root["kappa_d"] = p.kappa_d;
  root["c_d"] = p.c_d;
  root["beta_d"] = p.beta_d;
  root["gamma_d"] = p.gamma_d;
  return root.dump(2);
}

DataDrivenParams weights_from_json(const std::string& text, const std::string& ctx) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  if (!root.contains("model_version") || root["model_version"].get<int>() != 1)
    throw ParseError(ctx + ": missing or unsupported model_version");

  DataDrivenParams p;
  p.mu_e = require_number(root, "mu_e", ctx);
  p.lambda_e = require_number(root, "lambda_e", ctx);
  p.eta_d = require_number(root, "eta_d", ctx);
  p.kappa_d = require_number(root, "kappa_d", ctx);
  p.c_d = root.value("c_d", 0.0);
  p.beta_d = root.value("beta_d", 0.0);
  p.gamma_d = root.value("gamma_d", 1.0);

  if (!root.contains("psi_iso") || !root["psi_iso"].contains("layers"))
    throw ParseError(ctx + ": missing psi_iso.layers");
  const json& pl = root["psi_iso"]["layers"];
  if (pl.size() != 3)
    throw ParseError(ctx + ": psi_iso.layers must have 3 entries, got " +
                     std::to_string(pl.size()));
  matrix_from_json(pl[0].at("w_x"), ctx + ": psi_iso layer 0 w_x", &p.psi_iso_net.wx1[0][0],
                   kNetHiddenWidth, 2);
  matrix_from_json(json::array({pl[0].at("b")}), ctx + ": psi_iso layer 0 b",
                   p.psi_iso_net.b1.data(), 1, kNetHiddenWidth);
  matrix_from_json(pl[1].at("w_z"), ctx + ": psi_iso layer 1 w_z", &p.psi_iso_net.wz1[0][0],
                   kNetHiddenWidth, kNetHiddenWidth);
  matrix_from_json(pl[1].at("w_x"), ctx + ": psi_iso layer 1 w_x", &p.psi_iso_net.wx2[0][0],
                   kNetHiddenWidth, 2);
  matrix_from_json(json::array({pl[1].at("b")}), ctx + ": psi_iso layer 1 b",
                   p.psi_iso_net.b2.data(), 1, kNetHiddenWidth);
  matrix_from_json(pl[2].at("w_z"), ctx + ": psi_iso layer 2 w_z", p.psi_iso_net.wz2.data(), 1,
                   kNetHiddenWidth);
  matrix_from_json(pl[2].at("w_x"), ctx + ": psi_iso layer 2 w_x", p.psi_iso_net.wx3.data(), 1, 2);
  if (!pl[2].contains("b") || !pl[2]["b"].is_array() || pl[2]["b"].size() != 1)
    throw ParseError(ctx + ": psi_iso layer 2 b must be a 1-element array");
  p.psi_iso_net.b3 = pl[2]["b"][0].get<double>();

  if (!root.contains("yield") || !root["yield"].contains("layers"))
    throw ParseError(ctx + ": missing yield.layers");
  const json& yl = root["yield"]["layers"];
  if (yl.size() != 3)
    throw ParseError(ctx + ": yield.layers must have 3 entries, got " + std::to_string(yl.size()));
  matrix_from_json(yl[0].at("w"), ctx + ": yield layer 0 w", p.yield_net.w1.data(),
                   kNetHiddenWidth, 1);
  matrix_from_json(json::array({yl[0].at("b")}), ctx + ": yield layer 0 b", p.yield_net.b1.data(),
                   1, kNetHiddenWidth);
  matrix_from_json(yl[1].at("w"), ctx + ": yield layer 1 w", &p.yield_net.w2[0][0],
                   kNetHiddenWidth, kNetHiddenWidth);
  matrix_from_json(json::array({yl[1].at("b")}), ctx + ": yield layer 1 b", p.yield_net.b2.data(),
                   1, kNetHiddenWidth);
  matrix_from_json(yl[2].at("w"), ctx + ": yield layer 2 w", p.yield_net.w3.data(), 1,
                   kNetHiddenWidth);
  p.yield_net.a0 = require_number(root["yield"], "a0", ctx + ": yield");
  p.yield_net.b0 = require_number(root["yield"], "b0", ctx + ": yield");

  p.psi_iso_net.validate();
  p.yield_net.validate();
  return p;
}

void save_weights(const DataDrivenParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open weights file for writing: " + path);
  out << weights_to_json(p) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

DataDrivenParams load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weights file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return weights_from_json(text, path);
}

}  // namespace gedfem
