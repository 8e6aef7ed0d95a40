// Copyright 2026 The Manna Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON forms of instances, certificates and verification reports.
// Rationals are strings ("p" or "p/q"); item and agent ids are 1-based and
// the auxiliary item is written as "aux".

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "manna/certificate.hpp"
#include "manna/errors.hpp"
#include "manna/model.hpp"
#include "manna/oracles.hpp"
#include "manna/rational.hpp"

namespace manna::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCertificateFormat = "manna-certificate/1";

inline Json rat_json(const Rat& r) { return to_string(r); }

inline Rat rat_from(const Json& j) {
  if (j.is_number_integer()) return Rat(mpz_class(j.dump()));
  if (j.is_string()) return parse_rat(j.get<std::string>());
  throw InputError("expected an integer or a \"p/q\" string, got " + j.dump());
}

inline Json rats_json(const std::vector<Rat>& v) {
  Json out = Json::array();
  for (const Rat& r : v) out.push_back(rat_json(r));
  return out;
}

inline std::vector<Rat> rats_from(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals");
  std::vector<Rat> out;
  for (const auto& x : j) out.push_back(rat_from(x));
  return out;
}

/// Integers that fit in 64 bits are written as numbers, everything else as
/// strings.
inline Json value_json(const Rat& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
  return to_string(r);
}

inline Json matrix_json(const Instance& inst, bool numbers) {
  Json rows = Json::array();
  for (Agent i = 0; i < inst.agents(); ++i) {
    Json row = Json::array();
    for (Item j = 0; j < inst.items(); ++j) row.push_back(numbers ? value_json(inst.value(i, j)) : rat_json(inst.value(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Instance matrix_from(const Json& j) {
  if (!j.is_array()) throw InputError("values must be an array of rows");
  std::vector<std::vector<Rat>> rows;
  for (const auto& row : j) rows.push_back(rats_from(row));
  return Instance::from_rows(rows);
}

inline Json instance_json(const Instance& inst) {
  Json j;
  j["agents"] = inst.agents();
  j["items"] = inst.items();
  j["values"] = matrix_json(inst, true);
  return j;
}

inline Instance instance_from(const Json& j) {
  if (!j.is_object() || !j.contains("agents") || !j.contains("items") || !j.contains("values"))
    throw InputError("instance needs agents, items and values");
  if (!j["agents"].is_number_integer() || !j["items"].is_number_integer())
    throw InputError("agents and items must be integers");
  Instance inst = matrix_from(j["values"]);
  if (inst.agents() != j["agents"].get<int>() || inst.items() != j["items"].get<int>())
    throw InputError("value matrix does not match the declared dimensions");
  return inst;
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError("cannot parse " + what + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Instance load_instance(const std::string& path) { return instance_from(parse_json(read_file(path), path)); }

inline Json bundle_json(const Bundle& b, Item aux = -1) {
  Json out = Json::array();
  for (Item t : b) {
    if (t == aux)
      out.push_back("aux");
    else
      out.push_back(t + 1);
  }
  return out;
}

inline Bundle bundle_from(const Json& j, Item aux = -1) {
  if (!j.is_array()) throw InputError("bundle must be an array");
  Bundle b;
  for (const auto& x : j) {
    if (x.is_string() && x.get<std::string>() == "aux" && aux >= 0)
      b.insert(aux);
    else if (x.is_number_integer())
      b.insert(x.get<int>() - 1);
    else
      throw InputError("bad item id " + x.dump());
  }
  return b;
}

inline Json allocation_json(const Allocation& a, Item aux = -1) {
  Json out = Json::array();
  for (const Bundle& b : a.bundles) out.push_back(bundle_json(b, aux));
  return out;
}

inline Allocation allocation_from(const Json& j, Item aux = -1) {
  if (!j.is_array()) throw InputError("allocation must be an array of bundles");
  Allocation a;
  for (const auto& b : j) a.bundles.push_back(bundle_from(b, aux));
  return a;
}

template <typename T, typename Fn>
Json optional_json(const std::optional<T>& v, Fn&& fn) {
  return v ? fn(*v) : Json(nullptr);
}

inline Json witnesses_json(const std::vector<std::optional<SwapWitness>>& ws, Item aux = -1) {
  Json out = Json::array();
  for (const auto& w : ws) out.push_back(optional_json(w, [&](const SwapWitness& s) { return bundle_json(s.swap, aux); }));
  return out;
}

inline Json report_json(const VerificationReport& r, Item aux = -1) {
  Json j;
  j["overall"] = r.overall() ? "pass" : "fail";
  j["po_verified"] = r.po_verified;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json x;
    x["name"] = c.name;
    x["pass"] = c.pass;
    if (!c.detail.empty()) x["detail"] = c.detail;
    checks.push_back(std::move(x));
  }
  j["checks"] = std::move(checks);
  j["ief1_swaps_original"] = witnesses_json(r.ief1_original_witnesses);
  j["ief1_swaps_perturbed"] = witnesses_json(r.ief1_perturbed_witnesses, aux);
  j["boundary_checks"] = r.boundary_checks;
  return j;
}

inline Json certificate_json(const Certificate& c, const VerificationReport* report = nullptr) {
  Json j;
  j["format"] = kCertificateFormat;
  j["instance_digest"] = c.instance_digest;
  j["seed"] = c.seed;
  j["mode"] = c.mode;
  j["strategy"] = c.strategy;
  j["trivial"] = c.trivial;
  const Item aux = c.trivial ? -1 : c.perturbed.items() - 1;
  if (!c.trivial) {
    j["lambda"] = optional_json(c.lambda, rat_json);
    j["omega"] = optional_json(c.omega, rat_json);
    j["epsilon"] = rat_json(c.epsilon);
    j["eta"] = rat_json(c.eta);
    j["resolution"] = c.resolution;
    j["attempts"] = c.attempts;
    Json active = Json::array();
    for (Item t : c.active) active.push_back(t + 1);
    j["active_items"] = std::move(active);
    j["perturbed_values"] = matrix_json(c.perturbed, false);
    j["w_star"] = rats_json(c.w_star.coords());
    j["prices"] = rats_json(c.prices.prices);
    j["tau"] = rat_json(c.tau);
    j["allocation_perturbed"] = allocation_json(c.allocation_perturbed, aux);
    Json swaps = Json::array();
    for (const auto& s : c.price_swaps) swaps.push_back(optional_json(s, [&](const Bundle& b) { return bundle_json(b, aux); }));
    j["price_swaps"] = std::move(swaps);
  }
  j["allocation"] = allocation_json(c.allocation);
  if (report) j["verification"] = report_json(*report, aux);
  return j;
}

inline Certificate certificate_from(const Json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != kCertificateFormat) throw InputError("not a certificate file");
    Certificate c;
    c.instance_digest = j.at("instance_digest").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.mode = j.at("mode").get<std::string>();
    c.strategy = j.at("strategy").get<std::string>();
    c.trivial = j.at("trivial").get<bool>();
    c.allocation = allocation_from(j.at("allocation"));
    if (c.trivial) return c;
    if (!j.at("lambda").is_null()) c.lambda = rat_from(j.at("lambda"));
    if (!j.at("omega").is_null()) c.omega = rat_from(j.at("omega"));
    c.epsilon = rat_from(j.at("epsilon"));
    c.eta = rat_from(j.at("eta"));
    c.resolution = j.at("resolution").get<std::uint64_t>();
    c.attempts = j.at("attempts").get<int>();
    for (const auto& t : j.at("active_items")) c.active.push_back(t.get<int>() - 1);
    c.perturbed = matrix_from(j.at("perturbed_values"));
    const Item aux = c.perturbed.items() - 1;
    c.w_star = Weight(rats_from(j.at("w_star")));
    c.prices.prices = rats_from(j.at("prices"));
    c.tau = rat_from(j.at("tau"));
    c.allocation_perturbed = allocation_from(j.at("allocation_perturbed"), aux);
    for (const auto& s : j.at("price_swaps"))
      c.price_swaps.push_back(s.is_null() ? std::nullopt : std::optional<Bundle>(bundle_from(s, aux)));
    return c;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed certificate: ") + e.what());
  }
}

inline Certificate load_certificate(const std::string& path) {
  return certificate_from(parse_json(read_file(path), path));
}

}  // namespace manna::io
