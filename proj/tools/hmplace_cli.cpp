#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmplace/error.hpp"
#include "hmplace/io.hpp"
#include "hmplace/planner.hpp"
#include "hmplace/synthetic.hpp"

using namespace hmplace;

namespace {

struct Inputs {
  std::string trace;
  std::string machine;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("-t,--trace", in.trace, "trace JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("-m,--machine", in.machine, "machine JSON")->required()->check(CLI::ExistingFile);
}

// Writes to the named file, or stdout for "-".
void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot write file");
  out << text;
}

std::size_t max_resident(const PlacementPlan& plan) {
  std::size_t n = plan.initial_dram.size();
  for (const auto& s : plan.per_phase_residency) n = std::max(n, s.size());
  return n;
}

NoiseTable seeded_noise(const Trace& t, std::uint64_t seed, double sigma) {
  if (sigma < 0 || sigma >= 1) throw ValidationError("--noise-sigma: must be within [0, 1)");
  std::mt19937_64 gen(seed);
  NoiseTable table;
  for (int k = 0; k < t.iterations; ++k) {
    std::vector<double> row;
    for (std::size_t p = 0; p < t.phases.size(); ++p) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      row.push_back(1.0 - sigma + 2.0 * sigma * u);
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct SweepPoint {
  double value = 0.0;
  MachineConfig cfg;
};

// bw=r sets nvm_bw = r * dram_bw with DRAM latency; lat=f sets
// nvm_lat = f * dram_lat with DRAM bandwidth. bw_peak_nvm follows nvm_bw.
std::pair<std::string, std::vector<SweepPoint>> parse_sweep(const std::string& spec,
                                                             const MachineConfig& base) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ValidationError("--sweep: expected bw=... or lat=...");
  const std::string kind = spec.substr(0, eq);
  if (kind != "bw" && kind != "lat") throw ValidationError("--sweep: kind must be bw or lat");
  std::vector<SweepPoint> points;
  for (const auto& v : split(spec.substr(eq + 1), ',')) {
    double x = 0.0;
    try {
      x = std::stod(v);
    } catch (const std::exception&) {
      throw ValidationError("--sweep: cannot parse '" + v + "'");
    }
    MachineConfig c = base;
    const double peak_ratio = base.bw_peak_nvm / base.nvm_bw;
    if (kind == "bw") {
      c.nvm_bw = x * base.dram_bw;
      c.nvm_lat = base.dram_lat;
    } else {
      c.nvm_bw = base.dram_bw;
      c.nvm_lat = x * base.dram_lat;
    }
    c.bw_peak_nvm = peak_ratio * c.nvm_bw;
    try {
      c.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("--sweep " + kind + "=" + v + ": " + e.what());
    }
    points.push_back({x, c});
  }
  if (points.empty()) throw ValidationError("--sweep: no values");
  return {kind, points};
}

int cmd_plan(const Inputs& in, const std::string& search, const std::string& partition,
             const std::string& out_path) {
  std::vector<std::string> warnings;
  const auto cfg = io::load_machine(in.machine, &warnings);
  const auto trace = io::load_trace(in.trace);
  for (const auto& w : warnings) std::cerr << "hmplace: warning: " << w << "\n";

  PlanOptions opt;
  opt.search = parse_search_mode(search);
  opt.partition = parse_partition_mode(partition);
  const auto r = plan_placement(trace, cfg, opt);

  std::cout << "mode: " << to_string(r.plan.mode) << "\n"
            << "objects in dram: " << max_resident(r.plan) << "\n"
            << "migrations: " << r.plan.migrations.size() << " (local " << r.local.migrations.size()
            << ", global " << r.global.migrations.size() << ")\n"
            << "predicted local: " << r.predicted_local << " s\n"
            << "predicted global: " << r.predicted_global << " s\n"
            << "predicted hold: " << r.predicted_hold << " s\n";
  if (!r.plan.partitioned.empty()) {
    std::cout << "partitioned:";
    for (const auto& p : r.plan.partitioned) std::cout << " " << p.object;
    std::cout << "\n";
  }
  if (!out_path.empty()) emit(out_path, io::dump(io::to_json(r.plan)));
  return 0;
}

struct SimulateArgs {
  std::string plan;
  std::vector<std::string> policies;
  std::string csv;
  std::string json;
  std::string partition = "auto";
  std::int64_t seed = -1;
  double sigma = 0.05;
  bool no_adapt = false;
};

int cmd_simulate(const Inputs& in, const SimulateArgs& a) {
  std::vector<std::string> warnings;
  const auto cfg = io::load_machine(in.machine, &warnings);
  const auto trace = io::load_trace(in.trace);

  RunOptions opt;
  opt.partition = parse_partition_mode(a.partition);
  opt.adapt = !a.no_adapt;
  if (a.seed >= 0) opt.noise = seeded_noise(trace, static_cast<std::uint64_t>(a.seed), a.sigma);

  std::vector<std::string> names = a.policies;
  if (!a.plan.empty()) {
    opt.plan = io::load_plan(a.plan);
    if (names.empty()) names.push_back("static");
  }
  if (names.empty()) names = {"nvm-only", "dram-only", "managed"};

  std::vector<SimulationReport> reports;
  for (const auto& n : names) {
    auto rep = run_policy(trace, cfg, parse_policy(n), opt);
    rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
    reports.push_back(std::move(rep));
  }

  if (a.csv != "-" && a.json != "-") io::print_table(std::cout, reports);
  if (!a.csv.empty()) {
    std::ostringstream csv;
    io::write_csv(csv, reports);
    emit(a.csv, csv.str());
  }
  if (!a.json.empty()) emit(a.json, io::dump(io::to_json(std::span<const SimulationReport>(reports))));
  return 0;
}

int cmd_compare(const Inputs& in, const std::string& sweep, const std::string& csv_path) {
  const auto base = io::load_machine(in.machine);
  const auto trace = io::load_trace(in.trace);
  const auto [kind, points] = parse_sweep(sweep, base);
  const std::vector<Policy> policies = {Policy::NvmOnly, Policy::DramOnly, Policy::Managed};

  std::vector<std::future<std::vector<SimulationReport>>> jobs;
  for (const auto& pt : points) {
    jobs.push_back(std::async(std::launch::async, [&trace, &policies, cfg = pt.cfg] {
      std::vector<SimulationReport> out;
      for (Policy p : policies) out.push_back(run_policy(trace, cfg, p));
      return out;
    }));
  }

  std::ostringstream csv;
  csv << "sweep,value,policy,total_s,normalized\n";
  char buf[128];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto reports = jobs[i].get();
    const double dram = reports[1].total_time;
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof buf, ",%g,%s,%.9f,%.6f\n", points[i].value, r.policy.c_str(),
                    r.total_time, r.total_time / dram);
      csv << kind << buf;
    }
  }
  emit(csv_path, csv.str());
  return 0;
}

int cmd_calibrate(const std::string& pairs_path) {
  const auto pairs = io::load_calibration(pairs_path);
  std::cout << calibrate_cf(pairs) << "\n";
  return 0;
}

int cmd_gen(const std::string& spec_path, const std::string& machine_path, std::uint64_t seed,
            const std::string& out_path) {
  const GeneratorSpec spec = spec_path.empty() ? GeneratorSpec{} : io::load_generator(spec_path);
  const MachineConfig cfg = machine_path.empty() ? MachineConfig{} : io::load_machine(machine_path);
  emit(out_path, io::dump(io::to_json(gen_synthetic(spec, cfg, seed))));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan and simulate DRAM/NVM data placement from phase traces"};
  app.require_subcommand(1);

  Inputs plan_in;
  std::string plan_search = "auto", plan_partition = "auto", plan_out;
  auto* plan = app.add_subcommand("plan", "compute a placement plan");
  add_inputs(plan, plan_in);
  plan->add_option("-p,--policy", plan_search, "local, global or auto")
      ->check(CLI::IsMember({"local", "global", "auto"}));
  plan->add_option("--partition", plan_partition, "on, off or auto")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  plan->add_option("-o,--out", plan_out, "plan JSON output (- for stdout)");

  Inputs sim_in;
  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "simulate one or more policies");
  add_inputs(sim, sim_in);
  sim->add_option("--plan", sim_args.plan, "plan JSON to replay")->check(CLI::ExistingFile);
  sim->add_option("-p,--policy", sim_args.policies,
                  "nvm-only, dram-only, managed, local-only, global-only, static")
      ->delimiter(',');
  sim->add_option("--csv", sim_args.csv, "per-phase CSV output (- for stdout)");
  sim->add_option("--json", sim_args.json, "report JSON output (- for stdout)");
  sim->add_option("--partition", sim_args.partition, "on, off or auto")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  sim->add_option("--seed-noise", sim_args.seed, "seed for per-phase noise factors")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--noise-sigma", sim_args.sigma, "noise half-width (default 0.05)");
  sim->add_flag("--no-adapt", sim_args.no_adapt, "disable re-profiling");

  Inputs cmp_in;
  std::string sweep, cmp_csv = "-";
  auto* cmp = app.add_subcommand("compare", "sweep NVM bandwidth or latency");
  add_inputs(cmp, cmp_in);
  cmp->add_option("--sweep", sweep, "bw=1.0,0.5,... or lat=1,2,...")->required();
  cmp->add_option("--csv", cmp_csv, "CSV output (default stdout)");

  std::string pairs_path;
  auto* cal = app.add_subcommand("calibrate", "fit a CF factor from predicted/measured pairs");
  cal->add_option("pairs", pairs_path, "calibration JSON")->required()->check(CLI::ExistingFile);

  std::string gen_spec, gen_machine, gen_out = "-";
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate a synthetic trace");
  gen->add_option("-s,--spec", gen_spec, "generator JSON")->check(CLI::ExistingFile);
  gen->add_option("-m,--machine", gen_machine, "machine JSON")->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("-o,--out", gen_out, "trace JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hmplace: error[usage]: " << e.what() << "\n";
    return 1;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_in, plan_search, plan_partition, plan_out);
    if (sim->parsed()) return cmd_simulate(sim_in, sim_args);
    if (cmp->parsed()) return cmd_compare(cmp_in, sweep, cmp_csv);
    if (cal->parsed()) return cmd_calibrate(pairs_path);
    if (gen->parsed()) return cmd_gen(gen_spec, gen_machine, gen_seed, gen_out);
  } catch (const Error& e) {
    std::cerr << "hmplace: error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "hmplace: error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
