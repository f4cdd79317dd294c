#include "hmplace/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "hmplace/error.hpp"

namespace hmplace::io {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& rule) {
  throw ValidationError(field + ": " + rule);
}

void check_object(const json& j, std::initializer_list<std::string_view> allowed,
                  const std::string& where) {
  if (!j.is_object()) fail(where, "must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail(where + "." + item.key(), "unknown field");
    }
  }
}

void check_version(const json& j, const std::string& where) {
  const auto it = j.find("schema_version");
  if (it == j.end()) fail(where + ".schema_version", "missing");
  if (!it->is_string() || it->get<std::string>() != kSchemaVersion) {
    fail(where + ".schema_version", "must be \"" + std::string(kSchemaVersion) + "\"");
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "must be an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "must be true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "must be a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "must be an array");
  return v;
}

IdSet id_set(const json& v, const std::string& field) {
  IdSet out;
  for (const auto& e : array(v, field)) {
    if (!out.insert(text(e, field)).second) fail(field, "duplicate id '" + e.get<std::string>() + "'");
  }
  return out;
}

json id_array(const IdSet& ids) { return json(std::vector<std::string>(ids.begin(), ids.end())); }

struct Unit {
  std::string_view suffix;
  double scale;
};

double with_unit(const json& v, const std::string& field, std::initializer_list<Unit> units) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) fail(field, "must be a number or a string with a unit");
  const std::string s = v.get<std::string>();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(field, "cannot parse '" + s + "'");
  }
  std::string suffix = s.substr(used);
  suffix.erase(0, suffix.find_first_not_of(' '));
  suffix.erase(suffix.find_last_not_of(' ') + 1);
  for (const auto& u : units) {
    if (u.suffix == suffix) return value * u.scale;
  }
  fail(field, "unit '" + suffix + "' cannot be normalized");
}

std::string phase_kind_name(PhaseKind k) { return std::string(to_string(k)); }

PhaseKind parse_phase_kind(const json& v, const std::string& field) {
  const auto s = text(v, field);
  if (s == "compute") return PhaseKind::Compute;
  if (s == "comm") return PhaseKind::Comm;
  fail(field, "must be \"compute\" or \"comm\"");
}

std::vector<AccessRecord> accesses_from_json(const json& v, const std::string& where) {
  std::vector<AccessRecord> out;
  for (std::size_t i = 0; i < array(v, where).size(); ++i) {
    const auto& a = v[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    check_object(a, {"object_id", "data_access", "samples_with_access"}, w);
    out.push_back({text(need(a, "object_id", w), w + ".object_id"),
                   number(need(a, "data_access", w), w + ".data_access"),
                   number(need(a, "samples_with_access", w), w + ".samples_with_access")});
  }
  return out;
}

json to_json(const std::vector<AccessRecord>& accesses) {
  json out = json::array();
  for (const auto& a : accesses) {
    out.push_back({{"object_id", a.object_id},
                   {"data_access", a.data_access},
                   {"samples_with_access", a.samples_with_access}});
  }
  return out;
}

std::vector<Migration> migrations_from_json(const json& v, const std::string& where) {
  std::vector<Migration> out;
  for (std::size_t i = 0; i < array(v, where).size(); ++i) {
    const auto& m = v[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    check_object(m, {"object", "direction", "trigger", "target", "wraps"}, w);
    Migration mig;
    mig.object = text(need(m, "object", w), w + ".object");
    const auto dir = text(need(m, "direction", w), w + ".direction");
    if (dir == to_string(Direction::ToDram)) mig.direction = Direction::ToDram;
    else if (dir == to_string(Direction::ToNvm)) mig.direction = Direction::ToNvm;
    else fail(w + ".direction", "must be \"nvm_to_dram\" or \"dram_to_nvm\"");
    mig.trigger = integer(need(m, "trigger", w), w + ".trigger");
    mig.target = integer(need(m, "target", w), w + ".target");
    if (m.contains("wraps")) mig.wraps = boolean(m["wraps"], w + ".wraps");
    out.push_back(std::move(mig));
  }
  return out;
}

json to_json(const std::vector<Migration>& list) {
  json out = json::array();
  for (const auto& m : list) {
    out.push_back({{"object", m.object},
                   {"direction", std::string(to_string(m.direction))},
                   {"trigger", m.trigger},
                   {"target", m.target},
                   {"wraps", m.wraps}});
  }
  return out;
}

}  // namespace

double parse_bandwidth(const json& v, const std::string& field) {
  return with_unit(v, field,
                   {{"B/s", 1.0},
                    {"KB/s", 1e3},
                    {"MB/s", 1e6},
                    {"GB/s", 1e9},
                    {"TB/s", 1e12},
                    {"KiB/s", 1024.0},
                    {"MiB/s", 1024.0 * 1024},
                    {"GiB/s", 1024.0 * 1024 * 1024},
                    {"TiB/s", 1024.0 * 1024 * 1024 * 1024}});
}

double parse_seconds(const json& v, const std::string& field) {
  return with_unit(v, field, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}});
}

Bytes parse_bytes(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<Bytes>();
  const double b = with_unit(v, field,
                             {{"B", 1.0},
                              {"KB", 1e3},
                              {"MB", 1e6},
                              {"GB", 1e9},
                              {"TB", 1e12},
                              {"KiB", 1024.0},
                              {"MiB", 1024.0 * 1024},
                              {"GiB", 1024.0 * 1024 * 1024},
                              {"TiB", 1024.0 * 1024 * 1024 * 1024}});
  if (!std::isfinite(b) || b < 0 || b != std::floor(b) || b > 1.8e19) {
    fail(field, "must be a whole, non-negative number of bytes");
  }
  return static_cast<Bytes>(b);
}

MachineConfig machine_from_json(const json& j, std::vector<std::string>* warnings) {
  const std::string w = "machine";
  check_object(j,
               {"schema_version", "dram_bw", "nvm_bw", "dram_lat", "nvm_lat", "mem_copy_bw",
                "dram_capacity", "cacheline_size", "bw_peak_nvm", "t1_pct", "t2_pct", "cf_bw",
                "cf_lat", "capacity_granule", "reprofile_threshold", "chunk_size",
                "phase_time_floor", "overhead_fraction"},
               w);
  check_version(j, w);
  MachineConfig c;
  c.dram_bw = parse_bandwidth(need(j, "dram_bw", w), "machine.dram_bw");
  c.nvm_bw = parse_bandwidth(need(j, "nvm_bw", w), "machine.nvm_bw");
  c.dram_lat = parse_seconds(need(j, "dram_lat", w), "machine.dram_lat");
  c.nvm_lat = parse_seconds(need(j, "nvm_lat", w), "machine.nvm_lat");
  c.mem_copy_bw = parse_bandwidth(need(j, "mem_copy_bw", w), "machine.mem_copy_bw");
  c.dram_capacity = parse_bytes(need(j, "dram_capacity", w), "machine.dram_capacity");
  c.bw_peak_nvm = parse_bandwidth(need(j, "bw_peak_nvm", w), "machine.bw_peak_nvm");
  if (j.contains("cacheline_size")) c.cacheline_size = parse_bytes(j["cacheline_size"], "machine.cacheline_size");
  if (j.contains("t1_pct")) c.t1_pct = number(j["t1_pct"], "machine.t1_pct");
  if (j.contains("t2_pct")) c.t2_pct = number(j["t2_pct"], "machine.t2_pct");
  if (j.contains("cf_bw")) c.cf_bw = number(j["cf_bw"], "machine.cf_bw");
  if (j.contains("cf_lat")) c.cf_lat = number(j["cf_lat"], "machine.cf_lat");
  if (j.contains("capacity_granule")) {
    c.capacity_granule = parse_bytes(j["capacity_granule"], "machine.capacity_granule");
  }
  if (j.contains("reprofile_threshold")) {
    c.reprofile_threshold = number(j["reprofile_threshold"], "machine.reprofile_threshold");
  }
  if (j.contains("chunk_size")) c.chunk_size = parse_bytes(j["chunk_size"], "machine.chunk_size");
  if (j.contains("phase_time_floor")) {
    c.phase_time_floor = number(j["phase_time_floor"], "machine.phase_time_floor");
  }
  if (j.contains("overhead_fraction")) {
    c.overhead_fraction = number(j["overhead_fraction"], "machine.overhead_fraction");
  }
  if (c.capacity_granule > 0) {
    const Bytes before = c.dram_capacity;
    if (c.round_capacity() && warnings != nullptr) {
      warnings->push_back("dram_capacity " + std::to_string(before) + " rounded down to " +
                          std::to_string(c.dram_capacity) + " bytes");
    }
  }
  c.validate();
  return c;
}

json to_json(const MachineConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"dram_bw", c.dram_bw},
          {"nvm_bw", c.nvm_bw},
          {"dram_lat", c.dram_lat},
          {"nvm_lat", c.nvm_lat},
          {"mem_copy_bw", c.mem_copy_bw},
          {"dram_capacity", c.dram_capacity},
          {"cacheline_size", c.cacheline_size},
          {"bw_peak_nvm", c.bw_peak_nvm},
          {"t1_pct", c.t1_pct},
          {"t2_pct", c.t2_pct},
          {"cf_bw", c.cf_bw},
          {"cf_lat", c.cf_lat},
          {"capacity_granule", c.capacity_granule},
          {"reprofile_threshold", c.reprofile_threshold},
          {"chunk_size", c.chunk_size},
          {"phase_time_floor", c.phase_time_floor},
          {"overhead_fraction", c.overhead_fraction}};
}

Trace trace_from_json(const json& j) {
  const std::string w = "trace";
  check_object(j,
               {"schema_version", "iterations", "objects", "phases", "per_iteration_noise",
                "per_iteration_overrides", "chunk_histograms"},
               w);
  check_version(j, w);
  Trace t;
  t.iterations = integer(need(j, "iterations", w), "trace.iterations");

  const auto& objects = array(need(j, "objects", w), "trace.objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string ow = "trace.objects[" + std::to_string(i) + "]";
    check_object(o, {"id", "size", "partitionable", "static_ref_estimate"}, ow);
    DataObject obj;
    obj.id = text(need(o, "id", ow), ow + ".id");
    obj.size = parse_bytes(need(o, "size", ow), ow + ".size");
    if (o.contains("partitionable")) obj.partitionable = boolean(o["partitionable"], ow + ".partitionable");
    if (o.contains("static_ref_estimate")) {
      obj.static_ref_estimate = number(o["static_ref_estimate"], ow + ".static_ref_estimate");
    }
    t.objects.push_back(std::move(obj));
  }

  const auto& phases = array(need(j, "phases", w), "trace.phases");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    const std::string pw = "trace.phases[" + std::to_string(i) + "]";
    check_object(p, {"id", "kind", "baseline_time", "samples_total", "accesses", "referenced"}, pw);
    PhaseProfile ph;
    ph.id = integer(need(p, "id", pw), pw + ".id");
    if (p.contains("kind")) ph.kind = parse_phase_kind(p["kind"], pw + ".kind");
    ph.baseline_time = parse_seconds(need(p, "baseline_time", pw), pw + ".baseline_time");
    ph.samples_total = number(need(p, "samples_total", pw), pw + ".samples_total");
    if (p.contains("accesses")) ph.accesses = accesses_from_json(p["accesses"], pw + ".accesses");
    ph.referenced = id_set(need(p, "referenced", pw), pw + ".referenced");
    t.phases.push_back(std::move(ph));
  }

  if (j.contains("per_iteration_noise")) {
    const auto& noise = array(j["per_iteration_noise"], "trace.per_iteration_noise");
    for (std::size_t k = 0; k < noise.size(); ++k) {
      const std::string nw = "trace.per_iteration_noise[" + std::to_string(k) + "]";
      std::vector<double> row;
      if (noise[k].is_array()) {
        for (const auto& f : noise[k]) row.push_back(number(f, nw));
      } else {
        row.push_back(number(noise[k], nw));
      }
      t.per_iteration_noise.push_back(std::move(row));
    }
  }

  if (j.contains("per_iteration_overrides")) {
    const auto& ovs = array(j["per_iteration_overrides"], "trace.per_iteration_overrides");
    for (std::size_t i = 0; i < ovs.size(); ++i) {
      const auto& o = ovs[i];
      const std::string ow = "trace.per_iteration_overrides[" + std::to_string(i) + "]";
      check_object(o, {"iteration", "phase", "baseline_time", "samples_total", "accesses"}, ow);
      PhaseOverride ov;
      ov.iteration = integer(need(o, "iteration", ow), ow + ".iteration");
      ov.phase = integer(need(o, "phase", ow), ow + ".phase");
      if (o.contains("baseline_time")) ov.baseline_time = parse_seconds(o["baseline_time"], ow + ".baseline_time");
      if (o.contains("samples_total")) ov.samples_total = number(o["samples_total"], ow + ".samples_total");
      ov.accesses = accesses_from_json(need(o, "accesses", ow), ow + ".accesses");
      t.per_iteration_overrides.push_back(std::move(ov));
    }
  }

  if (j.contains("chunk_histograms")) {
    const auto& h = j["chunk_histograms"];
    if (!h.is_object()) fail("trace.chunk_histograms", "must be an object");
    for (const auto& item : h.items()) {
      const std::string hw = "trace.chunk_histograms[" + item.key() + "]";
      std::vector<std::vector<double>> per_phase;
      for (const auto& row : array(item.value(), hw)) {
        std::vector<double> fractions;
        for (const auto& f : array(row, hw)) fractions.push_back(number(f, hw));
        per_phase.push_back(std::move(fractions));
      }
      t.chunk_histograms[item.key()] = std::move(per_phase);
    }
  }

  t.validate();
  return t;
}

json to_json(const Trace& t) {
  json j = {{"schema_version", kSchemaVersion}, {"iterations", t.iterations}};
  json objects = json::array();
  for (const auto& o : t.objects) {
    json e = {{"id", o.id}, {"size", o.size}, {"partitionable", o.partitionable}};
    if (o.static_ref_estimate) e["static_ref_estimate"] = *o.static_ref_estimate;
    objects.push_back(std::move(e));
  }
  j["objects"] = std::move(objects);

  json phases = json::array();
  for (const auto& p : t.phases) {
    phases.push_back({{"id", p.id},
                      {"kind", phase_kind_name(p.kind)},
                      {"baseline_time", p.baseline_time},
                      {"samples_total", p.samples_total},
                      {"accesses", to_json(p.accesses)},
                      {"referenced", id_array(p.referenced)}});
  }
  j["phases"] = std::move(phases);

  if (!t.per_iteration_noise.empty()) {
    json noise = json::array();
    for (const auto& row : t.per_iteration_noise) {
      if (row.size() == 1) noise.push_back(row.front());
      else noise.push_back(row);
    }
    j["per_iteration_noise"] = std::move(noise);
  }
  if (!t.per_iteration_overrides.empty()) {
    json ovs = json::array();
    for (const auto& ov : t.per_iteration_overrides) {
      json e = {{"iteration", ov.iteration}, {"phase", ov.phase}};
      if (ov.baseline_time) e["baseline_time"] = *ov.baseline_time;
      if (ov.samples_total) e["samples_total"] = *ov.samples_total;
      e["accesses"] = to_json(ov.accesses);
      ovs.push_back(std::move(e));
    }
    j["per_iteration_overrides"] = std::move(ovs);
  }
  if (!t.chunk_histograms.empty()) {
    json h = json::object();
    for (const auto& [id, rows] : t.chunk_histograms) h[id] = rows;
    j["chunk_histograms"] = std::move(h);
  }
  return j;
}

PlacementPlan plan_from_json(const json& j) {
  const std::string w = "plan";
  check_object(j,
               {"schema_version", "mode", "partitioned", "initial_dram", "per_phase_residency",
                "migrations", "steady_migrations", "predicted_total"},
               w);
  check_version(j, w);
  PlacementPlan plan;
  const auto mode = text(need(j, "mode", w), "plan.mode");
  if (mode == to_string(PlanMode::PhaseLocal)) plan.mode = PlanMode::PhaseLocal;
  else if (mode == to_string(PlanMode::CrossGlobal)) plan.mode = PlanMode::CrossGlobal;
  else if (mode == to_string(PlanMode::Hold)) plan.mode = PlanMode::Hold;
  else fail("plan.mode", "must be \"local\", \"global\" or \"hold\"");

  if (j.contains("partitioned")) {
    const auto& recs = array(j["partitioned"], "plan.partitioned");
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const std::string rw = "plan.partitioned[" + std::to_string(i) + "]";
      check_object(recs[i], {"object", "chunk_size"}, rw);
      plan.partitioned.push_back({text(need(recs[i], "object", rw), rw + ".object"),
                                  parse_bytes(need(recs[i], "chunk_size", rw), rw + ".chunk_size")});
    }
  }
  plan.initial_dram = id_set(need(j, "initial_dram", w), "plan.initial_dram");
  const auto& res = array(need(j, "per_phase_residency", w), "plan.per_phase_residency");
  for (std::size_t p = 0; p < res.size(); ++p) {
    plan.per_phase_residency.push_back(
        id_set(res[p], "plan.per_phase_residency[" + std::to_string(p) + "]"));
  }
  plan.migrations = migrations_from_json(need(j, "migrations", w), "plan.migrations");
  if (j.contains("steady_migrations")) {
    plan.steady_migrations = migrations_from_json(j["steady_migrations"], "plan.steady_migrations");
  }
  if (j.contains("predicted_total") && !j["predicted_total"].is_null()) {
    plan.predicted_total = number(j["predicted_total"], "plan.predicted_total");
  }
  return plan;
}

json to_json(const PlacementPlan& plan) {
  json recs = json::array();
  for (const auto& r : plan.partitioned) recs.push_back({{"object", r.object}, {"chunk_size", r.chunk_size}});
  json res = json::array();
  for (const auto& s : plan.per_phase_residency) res.push_back(id_array(s));
  json j = {{"schema_version", kSchemaVersion},
            {"mode", std::string(to_string(plan.mode))},
            {"partitioned", std::move(recs)},
            {"initial_dram", id_array(plan.initial_dram)},
            {"per_phase_residency", std::move(res)},
            {"migrations", to_json(plan.migrations)},
            {"steady_migrations", to_json(plan.steady_migrations)}};
  if (plan.predicted_total) j["predicted_total"] = *plan.predicted_total;
  return j;
}

SimulationReport report_from_json(const json& j) {
  const std::string w = "report";
  check_object(j,
               {"schema_version", "policy", "total_time", "per_phase_times", "migrations_count",
                "migrated_bytes", "engine_busy_time", "pct_overlap", "stalls", "replans",
                "clamp_hits", "overhead_time", "warnings"},
               w);
  check_version(j, w);
  SimulationReport r;
  r.policy = text(need(j, "policy", w), "report.policy");
  r.total_time = number(need(j, "total_time", w), "report.total_time");
  for (const auto& row : array(need(j, "per_phase_times", w), "report.per_phase_times")) {
    std::vector<Seconds> times;
    for (const auto& v : array(row, "report.per_phase_times")) times.push_back(number(v, "report.per_phase_times"));
    r.per_phase_times.push_back(std::move(times));
  }
  r.migrations_count = integer(need(j, "migrations_count", w), "report.migrations_count");
  r.migrated_bytes = parse_bytes(need(j, "migrated_bytes", w), "report.migrated_bytes");
  r.engine_busy_time = number(need(j, "engine_busy_time", w), "report.engine_busy_time");
  r.pct_overlap = number(need(j, "pct_overlap", w), "report.pct_overlap");
  const auto& stalls = array(need(j, "stalls", w), "report.stalls");
  for (std::size_t i = 0; i < stalls.size(); ++i) {
    const std::string sw = "report.stalls[" + std::to_string(i) + "]";
    check_object(stalls[i], {"iteration", "phase", "wait"}, sw);
    r.stalls.push_back({integer(need(stalls[i], "iteration", sw), sw + ".iteration"),
                        integer(need(stalls[i], "phase", sw), sw + ".phase"),
                        number(need(stalls[i], "wait", sw), sw + ".wait")});
  }
  r.replans = integer(need(j, "replans", w), "report.replans");
  if (j.contains("clamp_hits")) r.clamp_hits = integer(j["clamp_hits"], "report.clamp_hits");
  if (j.contains("overhead_time")) r.overhead_time = number(j["overhead_time"], "report.overhead_time");
  if (j.contains("warnings")) {
    for (const auto& s : array(j["warnings"], "report.warnings")) r.warnings.push_back(text(s, "report.warnings"));
  }
  return r;
}

json to_json(const SimulationReport& r) {
  json stalls = json::array();
  for (const auto& s : r.stalls) stalls.push_back({{"iteration", s.iteration}, {"phase", s.phase}, {"wait", s.wait}});
  return {{"schema_version", kSchemaVersion},
          {"policy", r.policy},
          {"total_time", r.total_time},
          {"per_phase_times", r.per_phase_times},
          {"migrations_count", r.migrations_count},
          {"migrated_bytes", r.migrated_bytes},
          {"engine_busy_time", r.engine_busy_time},
          {"pct_overlap", r.pct_overlap},
          {"stalls", std::move(stalls)},
          {"replans", r.replans},
          {"clamp_hits", r.clamp_hits},
          {"overhead_time", r.overhead_time},
          {"warnings", r.warnings}};
}

std::vector<SimulationReport> reports_from_json(const json& j) {
  check_object(j, {"schema_version", "reports"}, "reports");
  check_version(j, "reports");
  std::vector<SimulationReport> out;
  for (const auto& r : array(need(j, "reports", "reports"), "reports.reports")) {
    out.push_back(report_from_json(r));
  }
  return out;
}

json to_json(std::span<const SimulationReport> reports) {
  json list = json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  return {{"schema_version", kSchemaVersion}, {"reports", std::move(list)}};
}

std::vector<CalibrationPair> calibration_from_json(const json& j) {
  check_object(j, {"schema_version", "pairs"}, "calibration");
  check_version(j, "calibration");
  std::vector<CalibrationPair> out;
  const auto& pairs = array(need(j, "pairs", "calibration"), "calibration.pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string pw = "calibration.pairs[" + std::to_string(i) + "]";
    check_object(pairs[i], {"predicted", "measured"}, pw);
    out.push_back({parse_seconds(need(pairs[i], "predicted", pw), pw + ".predicted"),
                   parse_seconds(need(pairs[i], "measured", pw), pw + ".measured")});
  }
  return out;
}

json to_json(std::span<const CalibrationPair> pairs) {
  json list = json::array();
  for (const auto& p : pairs) list.push_back({{"predicted", p.predicted}, {"measured", p.measured}});
  return {{"schema_version", kSchemaVersion}, {"pairs", std::move(list)}};
}

GeneratorSpec generator_from_json(const json& j) {
  const std::string w = "generator";
  check_object(j,
               {"schema_version", "objects", "phases", "iterations", "min_size", "max_size",
                "min_phase_time", "max_phase_time", "streaming_share", "chasing_share",
                "reference_probability", "partitionable_share", "static_estimates", "noise_sigma",
                "samples_per_second"},
               w);
  check_version(j, w);
  GeneratorSpec s;
  if (j.contains("objects")) s.objects = integer(j["objects"], "generator.objects");
  if (j.contains("phases")) s.phases = integer(j["phases"], "generator.phases");
  if (j.contains("iterations")) s.iterations = integer(j["iterations"], "generator.iterations");
  if (j.contains("min_size")) s.min_size = parse_bytes(j["min_size"], "generator.min_size");
  if (j.contains("max_size")) s.max_size = parse_bytes(j["max_size"], "generator.max_size");
  if (j.contains("min_phase_time")) s.min_phase_time = parse_seconds(j["min_phase_time"], "generator.min_phase_time");
  if (j.contains("max_phase_time")) s.max_phase_time = parse_seconds(j["max_phase_time"], "generator.max_phase_time");
  if (j.contains("streaming_share")) s.streaming_share = number(j["streaming_share"], "generator.streaming_share");
  if (j.contains("chasing_share")) s.chasing_share = number(j["chasing_share"], "generator.chasing_share");
  if (j.contains("reference_probability")) {
    s.reference_probability = number(j["reference_probability"], "generator.reference_probability");
  }
  if (j.contains("partitionable_share")) {
    s.partitionable_share = number(j["partitionable_share"], "generator.partitionable_share");
  }
  if (j.contains("static_estimates")) s.static_estimates = boolean(j["static_estimates"], "generator.static_estimates");
  if (j.contains("noise_sigma")) s.noise_sigma = number(j["noise_sigma"], "generator.noise_sigma");
  if (j.contains("samples_per_second")) {
    s.samples_per_second = number(j["samples_per_second"], "generator.samples_per_second");
  }
  s.validate();
  return s;
}

json to_json(const GeneratorSpec& s) {
  return {{"schema_version", kSchemaVersion},
          {"objects", s.objects},
          {"phases", s.phases},
          {"iterations", s.iterations},
          {"min_size", s.min_size},
          {"max_size", s.max_size},
          {"min_phase_time", s.min_phase_time},
          {"max_phase_time", s.max_phase_time},
          {"streaming_share", s.streaming_share},
          {"chasing_share", s.chasing_share},
          {"reference_probability", s.reference_probability},
          {"partitionable_share", s.partitionable_share},
          {"static_estimates", s.static_estimates},
          {"noise_sigma", s.noise_sigma},
          {"samples_per_second", s.samples_per_second}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot write file");
  out << dump(j);
}

MachineConfig load_machine(const std::string& path, std::vector<std::string>* warnings) {
  return machine_from_json(read_json(path), warnings);
}
Trace load_trace(const std::string& path) { return trace_from_json(read_json(path)); }
PlacementPlan load_plan(const std::string& path) { return plan_from_json(read_json(path)); }
SimulationReport load_report(const std::string& path) { return report_from_json(read_json(path)); }
std::vector<CalibrationPair> load_calibration(const std::string& path) {
  return calibration_from_json(read_json(path));
}
GeneratorSpec load_generator(const std::string& path) { return generator_from_json(read_json(path)); }

void write_csv(std::ostream& out, std::span<const SimulationReport> reports) {
  out << "policy,iteration,phase,time_s,stall_s\n";
  char buf[160];
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.per_phase_times.size(); ++k) {
      for (std::size_t p = 0; p < r.per_phase_times[k].size(); ++p) {
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%.9f,%.9f\n", k, p, r.per_phase_times[k][p],
                      r.stall_at(static_cast<int>(k), static_cast<int>(p)));
        out << r.policy << buf;
      }
    }
  }
}

void print_table(std::ostream& out, std::span<const SimulationReport> reports) {
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.policy.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %12s %10s %12s %9s %10s %7s\n", static_cast<int>(width),
                "policy", "total_s", "migrations", "moved_MiB", "overlap%", "stall_s", "replans");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s %12.6f %10d %12.1f %9.2f %10.6f %7d\n",
                  static_cast<int>(width), r.policy.c_str(), r.total_time, r.migrations_count,
                  static_cast<double>(r.migrated_bytes) / static_cast<double>(kMiB),
                  r.pct_overlap, r.stall_time(), r.replans);
    out << buf;
  }
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) out << "warning (" << r.policy << "): " << w << "\n";
  }
}

}  // namespace hmplace::io
