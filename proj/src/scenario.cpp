/*
 * Copyright 2026 The carbonsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "carbonsim/scenario.hpp"

#include "carbonsim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace carbonsim {

using nlohmann::json;

namespace {

// Strict view over one JSON object: rejects keys outside \p allowed and
// reports type errors with their JSON path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ParseError(where() + ": expected an object");
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ParseError(child(key) + ": unknown key");
      }
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  [[nodiscard]] const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ParseError(child(key) + ": missing required key");
    return j_.at(key);
  }

  [[nodiscard]] double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ParseError(child(key) + ": expected a number");
    return v.get<double>();
  }
  [[nodiscard]] double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  [[nodiscard]] std::int64_t integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ParseError(child(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }
  [[nodiscard]] std::int64_t integer_or(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  [[nodiscard]] std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ParseError(child(key) + ": expected a string");
    return v.get<std::string>();
  }
  [[nodiscard]] std::string string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  [[nodiscard]] bool boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ParseError(child(key) + ": expected a boolean");
    return v.get<bool>();
  }

  [[nodiscard]] const json& array(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array()) throw ParseError(child(key) + ": expected an array");
    return v;
  }

  [[nodiscard]] std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[nodiscard]] std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& j_;
  std::string path_;
};

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::pair<double, double> number_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(path + ": expected a [number, number] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::int64_t whole(double v, const std::string& path) {
  if (std::floor(v) != v) throw ParseError(path + ": expected an integer slot/round");
  return static_cast<std::int64_t>(v);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : std::filesystem::absolute(base / p).lexically_normal();
}

HarvestParams parse_harvest(const json& j, const std::string& path, const std::filesystem::path& base,
                            const std::string& server_id) {
  ObjectReader r(j, path, {"process", "mean_kwh", "stddev_kwh", "trace_path"});
  HarvestParams h;
  try {
    h.process = harvest_process_from_string(r.string_or("process", "truncated_normal"));
  } catch (const ParseError& e) {
    throw ParseError(r.child("process") + ": " + e.what());
  }
  h.mean = r.number_or("mean_kwh", 0.0);
  h.stddev = r.number_or("stddev_kwh", 0.0);
  if (r.has("trace_path")) {
    h.trace_path = resolve(base, r.string("trace_path"));
    h.trace = load_harvest_trace(*h.trace_path, server_id);
  }
  return h;
}

EdgeServer parse_server(const json& j, const std::string& path, const std::filesystem::path& base) {
  ObjectReader r(j, path,
                 {"id", "region_id", "static_power_w", "compute_kwh_per_unit", "comm_kwh_per_byte", "battery", "harvest"});
  EdgeServer s;
  s.id = r.string("id");
  s.region_id = r.string_or("region_id", "");
  s.static_power_w = r.number("static_power_w");
  s.compute_kwh_per_unit = r.number("compute_kwh_per_unit");
  s.comm_kwh_per_byte = r.number_or("comm_kwh_per_byte", 0.0);
  if (r.has("battery")) {
    ObjectReader b(r.at("battery"), r.child("battery"), {"capacity_kwh", "level_kwh", "charge_efficiency"});
    s.battery.capacity = b.number_or("capacity_kwh", 0.0);
    s.battery.level = b.number_or("level_kwh", 0.0);
    s.battery.charge_efficiency = b.number_or("charge_efficiency", 1.0);
  }
  if (r.has("harvest")) s.harvest = parse_harvest(r.at("harvest"), r.child("harvest"), base, s.id);
  return s;
}

WorkloadSpec parse_workload(const json& j, const std::string& path) {
  ObjectReader r(j, path,
                 {"model_kind", "local_epochs", "batch_size", "total_samples", "model_bytes", "sample_bytes",
                  "target_accuracy", "accuracy_curve"});
  WorkloadSpec w;
  try {
    w.model_kind = model_kind_from_string(r.string_or("model_kind", "MLP"));
  } catch (const ParseError& e) {
    throw ParseError(r.child("model_kind") + ": " + e.what());
  }
  w.local_epochs = static_cast<int>(r.integer("local_epochs"));
  w.batch_size = static_cast<int>(r.integer("batch_size"));
  w.total_samples = r.integer("total_samples");
  w.model_bytes = r.integer("model_bytes");
  w.sample_bytes = r.number_or("sample_bytes", 0.0);
  w.target_accuracy = r.number("target_accuracy");
  const auto& curve = r.array("accuracy_curve");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto p = indexed(r.child("accuracy_curve"), i);
    const auto [round, acc] = number_pair(curve[i], p);
    w.accuracy_curve.push_back({static_cast<int>(whole(round, p)), acc});
  }
  return w;
}

}  // namespace

double WorkloadSpec::accuracy_at(int round) const {
  if (accuracy_curve.empty() || round < accuracy_curve.front().round) return 0.0;
  for (std::size_t i = 1; i < accuracy_curve.size(); ++i) {
    const auto& hi = accuracy_curve[i];
    if (round < hi.round) {
      const auto& lo = accuracy_curve[i - 1];
      const double t = static_cast<double>(round - lo.round) / static_cast<double>(hi.round - lo.round);
      return lo.accuracy + t * (hi.accuracy - lo.accuracy);
    }
  }
  return accuracy_curve.back().accuracy;
}

std::optional<int> WorkloadSpec::rounds_to(double target) const {
  if (accuracy_curve.empty() || accuracy_curve.back().accuracy < target) return std::nullopt;
  for (int r = 1;; ++r) {
    if (accuracy_at(r) >= target) return r;
  }
}

const Region& Scenario::region(const std::string& id) const {
  for (const auto& r : regions) {
    if (r.id == id) return r;
  }
  throw LookupError("unknown region '" + id + "'");
}

double Scenario::effective_backbone_intensity() const {
  if (backbone_intensity) return *backbone_intensity;
  if (regions.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : regions) sum += series_mean(r.intensity);
  return sum / static_cast<double>(regions.size());
}

std::map<std::string, IntensitySeries> load_intensity_csv(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"region_id", "slot", "intensity_gco2_per_kwh"}, path.string());
  std::map<std::string, IntensitySeries> out;
  for (const auto& row : table.rows) {
    out[row[0]].push_back({csv::to_int(row[1], path.string()), csv::to_double(row[2], path.string())});
  }
  return out;
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  ObjectReader r(doc, "",
                 {"schema_version", "name", "intensity_csv", "regions", "servers", "workload", "policy", "alpha_energy",
                  "alpha_task", "trading_loss", "backbone_kwh_per_byte", "backbone_intensity", "slot_duration_s", "seed",
                  "max_rounds", "placement", "lifecycle", "deep_sleep"});
  Scenario s;
  s.schema_version = static_cast<int>(r.integer("schema_version"));
  s.name = r.string_or("name", "");

  std::map<std::string, IntensitySeries> csv_series;
  if (r.has("intensity_csv")) csv_series = load_intensity_csv(resolve(base_dir, r.string("intensity_csv")));

  const auto& regions = r.array("regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto path = indexed("regions", i);
    ObjectReader rr(regions[i], path, {"id", "label", "intensity"});
    Region region;
    region.id = rr.string("id");
    region.label = rr.string_or("label", region.id);
    if (rr.has("intensity")) {
      const auto& pts = rr.array("intensity");
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto p = indexed(rr.child("intensity"), k);
        const auto [slot, value] = number_pair(pts[k], p);
        region.intensity.push_back({whole(slot, p), value});
      }
    } else if (auto it = csv_series.find(region.id); it != csv_series.end()) {
      region.intensity = it->second;
    }
    s.regions.push_back(std::move(region));
  }

  const auto& servers = r.array("servers");
  for (std::size_t i = 0; i < servers.size(); ++i) s.servers.push_back(parse_server(servers[i], indexed("servers", i), base_dir));

  s.workload = parse_workload(r.at("workload"), "workload");
  try {
    s.policy = policy_from_string(r.string_or("policy", "Baseline"));
  } catch (const ParseError& e) {
    throw ParseError(std::string("policy: ") + e.what());
  }
  s.alpha_energy = r.number_or("alpha_energy", 0.5);
  s.alpha_task = r.number_or("alpha_task", 0.5);
  s.trading_loss = r.number_or("trading_loss", 0.05);
  s.backbone_kwh_per_byte = r.number_or("backbone_kwh_per_byte", 0.0);
  if (r.has("backbone_intensity")) s.backbone_intensity = r.number("backbone_intensity");
  s.slot_duration_s = r.number_or("slot_duration_s", 60.0);
  const auto seed = r.integer_or("seed", 0);
  if (seed < 0) throw ParseError("seed: must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.max_rounds = static_cast<int>(r.integer_or("max_rounds", 100));

  if (r.has("placement")) {
    ObjectReader p(r.at("placement"), "placement", {"mode", "anchor_lowest"});
    const auto mode = p.string_or("mode", "explicit");
    if (mode == "explicit") {
      s.placement.mode = Placement::Mode::Explicit;
    } else if (mode == "random") {
      s.placement.mode = Placement::Mode::Random;
    } else {
      throw ParseError("placement.mode: expected 'explicit' or 'random'");
    }
    s.placement.anchor_lowest = p.boolean_or("anchor_lowest", false);
  }
  if (r.has("lifecycle")) {
    ObjectReader l(r.at("lifecycle"), "lifecycle",
                   {"device_kwh_per_sample", "ran_kwh_per_sample", "inferences", "kwh_per_inference", "serving_slots"});
    s.lifecycle.device_kwh_per_sample = l.number_or("device_kwh_per_sample", 0.0);
    s.lifecycle.ran_kwh_per_sample = l.number_or("ran_kwh_per_sample", 0.0);
    s.lifecycle.inferences = l.integer_or("inferences", 0);
    s.lifecycle.kwh_per_inference = l.number_or("kwh_per_inference", 0.0);
    s.lifecycle.serving_slots = static_cast<int>(l.integer_or("serving_slots", 1));
  }
  s.deep_sleep = r.boolean_or("deep_sleep", false);

  if (auto violations = validate_scenario(s); !violations.empty()) throw ScenarioInvalid(std::move(violations));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc, std::filesystem::absolute(path).parent_path());
}

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  auto add = [&](ViolationCode code, std::string path, std::string message) {
    out.push_back({code, std::move(path), std::move(message)});
  };
  auto nonneg = [&](double v, const std::string& path) {
    if (!(v >= 0.0) || !std::isfinite(v)) add(ViolationCode::NegativeValue, path, "must be a finite value >= 0");
  };

  if (s.schema_version != kSchemaVersion) {
    add(ViolationCode::SchemaVersion, "schema_version", "unsupported version " + std::to_string(s.schema_version));
  }

  if (s.regions.empty()) add(ViolationCode::NoRegions, "regions", "at least one region is required");
  std::set<std::string> region_ids;
  for (std::size_t i = 0; i < s.regions.size(); ++i) {
    const auto& region = s.regions[i];
    const auto path = indexed("regions", i);
    if (!region_ids.insert(region.id).second) add(ViolationCode::DuplicateId, path + ".id", "duplicate region id '" + region.id + "'");
    if (region.intensity.empty()) {
      add(ViolationCode::EmptySeries, path + ".intensity", "region '" + region.id + "' has no intensity data");
    }
    for (std::size_t k = 0; k < region.intensity.size(); ++k) {
      if (region.intensity[k].gco2_per_kwh < 0.0 || !std::isfinite(region.intensity[k].gco2_per_kwh)) {
        add(ViolationCode::NegativeIntensity, indexed(path + ".intensity", k), "intensity must be >= 0");
      }
      if (k > 0 && region.intensity[k].slot <= region.intensity[k - 1].slot) {
        add(ViolationCode::NonIncreasingSlots, indexed(path + ".intensity", k), "slot indices must strictly increase");
      }
    }
  }

  if (s.servers.empty()) add(ViolationCode::NoServers, "servers", "at least one server is required");
  std::set<std::string> server_ids;
  for (std::size_t i = 0; i < s.servers.size(); ++i) {
    const auto& sv = s.servers[i];
    const auto path = indexed("servers", i);
    if (!server_ids.insert(sv.id).second) add(ViolationCode::DuplicateId, path + ".id", "duplicate server id '" + sv.id + "'");
    if (sv.region_id.empty()) {
      if (s.placement.mode == Placement::Mode::Explicit) {
        add(ViolationCode::MissingRegion, path + ".region_id", "explicit placement needs a region_id");
      }
    } else if (!region_ids.contains(sv.region_id)) {
      add(ViolationCode::UnknownRegion, path + ".region_id", "undeclared region '" + sv.region_id + "'");
    }
    nonneg(sv.static_power_w, path + ".static_power_w");
    nonneg(sv.compute_kwh_per_unit, path + ".compute_kwh_per_unit");
    nonneg(sv.comm_kwh_per_byte, path + ".comm_kwh_per_byte");
    nonneg(sv.battery.capacity, path + ".battery.capacity_kwh");
    nonneg(sv.battery.level, path + ".battery.level_kwh");
    if (sv.battery.level > sv.battery.capacity) {
      add(ViolationCode::BatteryOverfull, path + ".battery.level_kwh", "battery level exceeds capacity");
    }
    if (!(sv.battery.charge_efficiency > 0.0 && sv.battery.charge_efficiency <= 1.0)) {
      add(ViolationCode::BadEfficiency, path + ".battery.charge_efficiency", "must lie in (0, 1]");
    }
    const auto& h = sv.harvest;
    if (!(h.mean >= 0.0) || !(h.stddev >= 0.0)) {
      add(ViolationCode::BadHarvest, path + ".harvest", "mean and stddev must be >= 0");
    }
    if (h.process == HarvestProcess::Trace && !h.trace_path) {
      add(ViolationCode::BadHarvest, path + ".harvest.trace_path", "trace process needs a trace_path");
    }
  }

  const auto& w = s.workload;
  if (w.local_epochs <= 0) add(ViolationCode::NonPositiveEpochs, "workload.local_epochs", "E must be > 0");
  if (w.batch_size <= 0) add(ViolationCode::NonPositiveBatch, "workload.batch_size", "B must be > 0");
  if (w.total_samples < 0) add(ViolationCode::NegativeValue, "workload.total_samples", "must be >= 0");
  if (w.model_bytes < 0) add(ViolationCode::NegativeValue, "workload.model_bytes", "must be >= 0");
  nonneg(w.sample_bytes, "workload.sample_bytes");
  if (!(w.target_accuracy > 0.0 && w.target_accuracy <= 1.0)) {
    add(ViolationCode::BadTargetAccuracy, "workload.target_accuracy", "must lie in (0, 1]");
  }
  if (w.accuracy_curve.empty()) add(ViolationCode::EmptyAccuracyCurve, "workload.accuracy_curve", "curve is empty");
  for (std::size_t k = 0; k < w.accuracy_curve.size(); ++k) {
    const auto& p = w.accuracy_curve[k];
    const auto path = indexed("workload.accuracy_curve", k);
    if (p.round < 1 || p.accuracy < 0.0 || p.accuracy > 1.0) {
      add(ViolationCode::NonMonotoneAccuracy, path, "rounds must be >= 1 and accuracies in [0, 1]");
    }
    if (k > 0 && (p.round <= w.accuracy_curve[k - 1].round || p.accuracy < w.accuracy_curve[k - 1].accuracy)) {
      add(ViolationCode::NonMonotoneAccuracy, path, "curve must have increasing rounds and nondecreasing accuracy");
    }
  }

  if (!(s.alpha_energy >= 0.0 && s.alpha_energy <= 1.0)) add(ViolationCode::CapOutOfRange, "alpha_energy", "must lie in [0, 1]");
  if (!(s.alpha_task >= 0.0 && s.alpha_task <= 1.0)) add(ViolationCode::CapOutOfRange, "alpha_task", "must lie in [0, 1]");
  if (!(s.trading_loss >= 0.0 && s.trading_loss < 1.0)) {
    add(ViolationCode::TradingLossOutOfRange, "trading_loss", "must lie in [0, 1)");
  }
  nonneg(s.backbone_kwh_per_byte, "backbone_kwh_per_byte");
  if (s.backbone_intensity) nonneg(*s.backbone_intensity, "backbone_intensity");
  if (!(s.slot_duration_s > 0.0)) add(ViolationCode::NonPositiveSlotDuration, "slot_duration_s", "must be > 0");
  if (s.max_rounds < 1) add(ViolationCode::NonPositiveMaxRounds, "max_rounds", "must be >= 1");

  const auto& l = s.lifecycle;
  nonneg(l.device_kwh_per_sample, "lifecycle.device_kwh_per_sample");
  nonneg(l.ran_kwh_per_sample, "lifecycle.ran_kwh_per_sample");
  nonneg(l.kwh_per_inference, "lifecycle.kwh_per_inference");
  if (l.inferences < 0) add(ViolationCode::BadLifecycle, "lifecycle.inferences", "must be >= 0");
  if (l.serving_slots < 1) add(ViolationCode::BadLifecycle, "lifecycle.serving_slots", "must be >= 1");
  return out;
}

ScenarioInvalid::ScenarioInvalid(std::vector<Violation> violations)
    : ValidationError(violations.empty() ? std::string("invalid scenario")
                                         : violations.front().path + ": " + to_string(violations.front().code) + ": " +
                                               violations.front().message),
      violations_(std::move(violations)) {}

nlohmann::ordered_json to_json(const Scenario& s) {
  using oj = nlohmann::ordered_json;
  oj doc;
  doc["schema_version"] = s.schema_version;
  doc["name"] = s.name;
  oj regions = oj::array();
  for (const auto& r : s.regions) {
    oj pts = oj::array();
    for (const auto& p : r.intensity) pts.push_back(oj::array({p.slot, p.gco2_per_kwh}));
    regions.push_back({{"id", r.id}, {"label", r.label}, {"intensity", pts}});
  }
  doc["regions"] = regions;
  oj servers = oj::array();
  for (const auto& sv : s.servers) {
    oj harvest = {{"process", to_string(sv.harvest.process)}, {"mean_kwh", sv.harvest.mean}, {"stddev_kwh", sv.harvest.stddev}};
    if (sv.harvest.trace_path) harvest["trace_path"] = sv.harvest.trace_path->string();
    oj server = {{"id", sv.id}};
    if (!sv.region_id.empty()) server["region_id"] = sv.region_id;
    server["static_power_w"] = sv.static_power_w;
    server["compute_kwh_per_unit"] = sv.compute_kwh_per_unit;
    server["comm_kwh_per_byte"] = sv.comm_kwh_per_byte;
    server["battery"] = {{"capacity_kwh", sv.battery.capacity},
                         {"level_kwh", sv.battery.level},
                         {"charge_efficiency", sv.battery.charge_efficiency}};
    server["harvest"] = harvest;
    servers.push_back(server);
  }
  doc["servers"] = servers;
  const auto& w = s.workload;
  oj curve = oj::array();
  for (const auto& p : w.accuracy_curve) curve.push_back(oj::array({p.round, p.accuracy}));
  doc["workload"] = {{"model_kind", to_string(w.model_kind)}, {"local_epochs", w.local_epochs},
                     {"batch_size", w.batch_size},            {"total_samples", w.total_samples},
                     {"model_bytes", w.model_bytes},          {"sample_bytes", w.sample_bytes},
                     {"target_accuracy", w.target_accuracy},  {"accuracy_curve", curve}};
  doc["policy"] = to_string(s.policy);
  doc["alpha_energy"] = s.alpha_energy;
  doc["alpha_task"] = s.alpha_task;
  doc["trading_loss"] = s.trading_loss;
  doc["backbone_kwh_per_byte"] = s.backbone_kwh_per_byte;
  doc["backbone_intensity"] = s.backbone_intensity ? oj(*s.backbone_intensity) : oj(nullptr);
  doc["slot_duration_s"] = s.slot_duration_s;
  doc["seed"] = s.seed;
  doc["max_rounds"] = s.max_rounds;
  doc["placement"] = {{"mode", s.placement.mode == Placement::Mode::Explicit ? "explicit" : "random"},
                      {"anchor_lowest", s.placement.anchor_lowest}};
  doc["lifecycle"] = {{"device_kwh_per_sample", s.lifecycle.device_kwh_per_sample},
                      {"ran_kwh_per_sample", s.lifecycle.ran_kwh_per_sample},
                      {"inferences", s.lifecycle.inferences},
                      {"kwh_per_inference", s.lifecycle.kwh_per_inference},
                      {"serving_slots", s.lifecycle.serving_slots}};
  doc["deep_sleep"] = s.deep_sleep;
  return doc;
}

std::string to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::SchemaVersion: return "SchemaVersion";
    case ViolationCode::NoRegions: return "NoRegions";
    case ViolationCode::DuplicateId: return "DuplicateId";
    case ViolationCode::EmptySeries: return "EmptySeries";
    case ViolationCode::NonIncreasingSlots: return "NonIncreasingSlots";
    case ViolationCode::NegativeIntensity: return "NegativeIntensity";
    case ViolationCode::NoServers: return "NoServers";
    case ViolationCode::UnknownRegion: return "UnknownRegion";
    case ViolationCode::MissingRegion: return "MissingRegion";
    case ViolationCode::NegativeValue: return "NegativeValue";
    case ViolationCode::BatteryOverfull: return "BatteryOverfull";
    case ViolationCode::BadEfficiency: return "BadEfficiency";
    case ViolationCode::BadHarvest: return "BadHarvest";
    case ViolationCode::NonPositiveEpochs: return "NonPositiveEpochs";
    case ViolationCode::NonPositiveBatch: return "NonPositiveBatch";
    case ViolationCode::BadTargetAccuracy: return "BadTargetAccuracy";
    case ViolationCode::EmptyAccuracyCurve: return "EmptyAccuracyCurve";
    case ViolationCode::NonMonotoneAccuracy: return "NonMonotoneAccuracy";
    case ViolationCode::CapOutOfRange: return "CapOutOfRange";
    case ViolationCode::TradingLossOutOfRange: return "TradingLossOutOfRange";
    case ViolationCode::NonPositiveSlotDuration: return "NonPositiveSlotDuration";
    case ViolationCode::NonPositiveMaxRounds: return "NonPositiveMaxRounds";
    case ViolationCode::BadLifecycle: return "BadLifecycle";
  }
  return "Unknown";
}

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::Baseline: return "Baseline";
    case Policy::DET: return "DET";
    case Policy::DAT: return "DAT";
    case Policy::DETA: return "DETA";
  }
  return "unknown";
}

Policy policy_from_string(const std::string& name) {
  for (auto p : kAllPolicies) {
    if (to_string(p) == name) return p;
  }
  throw ParseError("unknown policy '" + name + "' (expected Baseline, DET, DAT or DETA)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::MLP: return "MLP";
    case ModelKind::CNN: return "CNN";
    case ModelKind::LSTM: return "LSTM";
    case ModelKind::Custom: return "custom";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "MLP") return ModelKind::MLP;
  if (name == "CNN") return ModelKind::CNN;
  if (name == "LSTM") return ModelKind::LSTM;
  if (name == "custom") return ModelKind::Custom;
  throw ParseError("unknown model kind '" + name + "'");
}

}  // namespace carbonsim
