#include "psched/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "psched/compact.hpp"
#include "psched/json_io.hpp"

namespace psched {

namespace fs = std::filesystem;

namespace {

bool resolved(const BenchRecord& r) {
  return r.status == SolveStatus::Optimal || r.status == SolveStatus::Infeasible;
}

std::string layout_name(Layout l) {
  switch (l) {
    case Layout::OneGroup20:
      return "one-group-20";
    case Layout::TwoGroups10:
      return "two-groups-10";
    case Layout::Custom:
      return "custom";
  }
  return "?";
}

}  // namespace

BenchClass bench_classify(const BenchRecord& compact, const BenchRecord& dw) {
  bool rc = resolved(compact), rd = resolved(dw);
  if (rc && rd && compact.time_s < 5.0 && dw.time_s < 5.0) return BenchClass::ExcludedFast;
  if ((rc && compact.time_s < 10.0) || (rd && dw.time_s < 10.0)) return BenchClass::Easy;
  if (rc || rd) return BenchClass::Medium;
  if (compact.has_incumbent || dw.has_incumbent) return BenchClass::Hard;
  return BenchClass::ExcludedNoIncumbent;
}

const char* to_string(BenchClass c) {
  switch (c) {
    case BenchClass::ExcludedFast:
      return "excluded-fast";
    case BenchClass::ExcludedNoIncumbent:
      return "excluded-no-incumbent";
    case BenchClass::Easy:
      return "easy";
    case BenchClass::Medium:
      return "medium";
    case BenchClass::Hard:
      return "hard";
  }
  return "?";
}

BenchRecord record_from_report(const std::string& instance, const SolveReport& r) {
  BenchRecord rec;
  rec.instance = instance;
  rec.method = r.method;
  rec.status = r.status;
  rec.time_s = r.wall_time;
  rec.gap = r.gap;
  rec.has_incumbent = std::isfinite(r.primal);
  rec.nodes = r.nodes;
  rec.pricing_rounds = r.pricing_rounds;
  rec.breakdown = r.time_breakdown;
  return rec;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "instance,method,status,time_s,gap,nodes,pricing_rounds,"
        "breakdown_exact_pricing,breakdown_integer_rmp,breakdown_branching,"
        "breakdown_rmp_resolve,breakdown_other\n";
  auto bd = [](const BenchRecord& r, const char* key) {
    auto it = r.breakdown.find(key);
    return it == r.breakdown.end() ? 0.0 : it->second;
  };
  for (const auto& r : records) {
    os << r.instance << "," << r.method << "," << to_string(r.status) << "," << r.time_s
       << "," << (std::isfinite(r.gap) ? std::to_string(r.gap) : "") << "," << r.nodes
       << "," << r.pricing_rounds;
    for (const char* key :
         {"exact-pricing", "integer-rmp", "branching", "rmp-resolve", "other"})
      os << "," << bd(r, key);
    os << "\n";
  }
  return os.str();
}

std::string bench_table(const std::vector<std::pair<BenchRecord, BenchRecord>>& pairs) {
  struct Agg {
    int instances = 0, feasible = 0;
    int solved_c = 0, solved_c_feas = 0, solved_d = 0, solved_d_feas = 0;
    double time_c = 0, time_d = 0;
    double gap_c = 0, gap_d = 0;
    long nodes_c = 0, nodes_d = 0;
  };
  std::map<BenchClass, Agg> agg;
  int excluded_fast = 0, excluded_none = 0;
  std::map<std::string, double> breakdown;
  int breakdown_n = 0;

  for (const auto& [c, d] : pairs) {
    BenchClass cls = bench_classify(c, d);
    if (cls == BenchClass::ExcludedFast) {
      ++excluded_fast;
      continue;
    }
    if (cls == BenchClass::ExcludedNoIncumbent) {
      ++excluded_none;
      continue;
    }
    Agg& a = agg[cls];
    ++a.instances;
    bool feasible = c.has_incumbent || d.has_incumbent;
    if (feasible) ++a.feasible;
    if (resolved(c)) {
      ++a.solved_c;
      if (c.status == SolveStatus::Optimal) ++a.solved_c_feas;
    }
    if (resolved(d)) {
      ++a.solved_d;
      if (d.status == SolveStatus::Optimal) ++a.solved_d_feas;
    }
    a.time_c += c.time_s;
    a.time_d += d.time_s;
    a.nodes_c += c.nodes;
    a.nodes_d += d.nodes;
    if (feasible) {
      a.gap_c += std::isfinite(c.gap) ? c.gap : 1.0;
      a.gap_d += std::isfinite(d.gap) ? d.gap : 1.0;
    }
    for (const auto& [k, v] : d.breakdown) breakdown[k] += v;
    ++breakdown_n;
  }

  std::ostringstream os;
  os << "subset      instances  | compact: solved  time(s)   gap(%)  nodes"
        "  | dw: solved  time(s)   gap(%)  nodes\n";
  for (auto cls : {BenchClass::Easy, BenchClass::Medium, BenchClass::Hard}) {
    auto it = agg.find(cls);
    if (it == agg.end()) continue;
    const Agg& a = it->second;
    auto mean = [&](double v, int n) { return n ? v / n : 0.0; };
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%-10s %4d(%d)   |        %3d(%d)  %7.1f  %7.1f  %5ld  |"
                  "     %3d(%d)  %7.1f  %7.1f  %5ld\n",
                  to_string(cls), a.instances, a.feasible, a.solved_c, a.solved_c_feas,
                  mean(a.time_c, a.instances), 100 * mean(a.gap_c, a.feasible),
                  long(mean(double(a.nodes_c), a.instances)), a.solved_d, a.solved_d_feas,
                  mean(a.time_d, a.instances), 100 * mean(a.gap_d, a.feasible),
                  long(mean(double(a.nodes_d), a.instances)));
    os << buf;
  }
  os << "excluded: " << excluded_fast << " solved by both under 5s, " << excluded_none
     << " without any incumbent\n";
  if (breakdown_n) {
    os << "dw time breakdown:";
    for (const auto& [k, v] : breakdown)
      os << " " << k << "=" << std::round(100.0 * v / breakdown_n) << "%";
    os << "\n";
  }
  return os.str();
}

int cmd_generate(const GenCommand& cmd) {
  try {
    check_config(cmd.config);
    fs::create_directories(cmd.out_dir);
    nlohmann::json manifest;
    manifest["config"] = {{"periods", cmd.config.periods},
                          {"layout", layout_name(cmd.config.layout)},
                          {"complexity",
                           cmd.config.complexity == Complexity::Low ? "low" : "high"},
                          {"rho", cmd.config.rho},
                          {"count", cmd.count},
                          {"base_seed", cmd.config.seed}};
    nlohmann::json files = nlohmann::json::array();
    for (int i = 0; i < cmd.count; ++i) {
      GenConfig c = cmd.config;
      c.seed = cmd.config.seed + static_cast<std::uint64_t>(i);
      Instance inst = generate(c);
      std::string name = "instance_" + std::to_string(c.seed) + ".json";
      write_file((fs::path(cmd.out_dir) / name).string(), instance_to_json(inst));
      files.push_back({{"file", name}, {"seed", c.seed}});
    }
    manifest["instances"] = files;
    write_file((fs::path(cmd.out_dir) / "manifest.json").string(), manifest.dump(2));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return 2;
  }
}

int cmd_solve(const SolveCommand& cmd) {
  Instance inst;
  try {
    inst = instance_from_json(read_file(cmd.instance_path));
  } catch (const std::exception& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 2;
  }
  try {
    fs::create_directories(cmd.out_dir);
    Schedule schedule;
    SolveReport rep;
    if (cmd.method == "compact") {
      rep = solve_compact(inst, cmd.limits, &schedule);
    } else if (cmd.method == "dw") {
      rep = solve_bp(inst, cmd.limits, cmd.bp, &schedule);
    } else {
      std::cerr << "solve: unknown method '" << cmd.method << "'\n";
      return 2;
    }
    write_file((fs::path(cmd.out_dir) / "report.json").string(), report_to_json(rep));
    if (std::isfinite(rep.primal))
      write_file((fs::path(cmd.out_dir) / "schedule.json").string(),
                 schedule_to_json(schedule));
    std::cout << report_to_json(rep) << "\n";
    switch (rep.status) {
      case SolveStatus::Optimal:
        return 0;
      case SolveStatus::Infeasible:
        return 3;
      case SolveStatus::Limit:
        return 4;
    }
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::string& instance_path, const std::string& schedule_path) {
  Instance inst;
  Schedule sched;
  try {
    inst = instance_from_json(read_file(instance_path));
    sched = schedule_from_json(read_file(schedule_path));
  } catch (const std::exception& e) {
    std::cerr << "validate: " << e.what() << "\n";
    return 2;
  }
  auto violations = validate_schedule(inst, sched);
  for (const auto& v : violations) std::cout << v.describe() << "\n";
  if (violations.empty()) {
    std::cout << "clean\n";
    return 0;
  }
  return 1;
}

int cmd_bench(const BenchCommand& cmd) {
  std::vector<fs::path> files;
  try {
    for (const auto& e : fs::directory_iterator(cmd.instance_dir)) {
      if (e.path().extension() == ".json" && e.path().filename() != "manifest.json")
        files.push_back(e.path());
    }
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 2;
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "bench: no instances in " << cmd.instance_dir << "\n";
    return 2;
  }

  auto run_one = [&](const fs::path& f) {
    Instance inst = instance_from_json(read_file(f.string()));
    SolveReport rc = solve_compact(inst, cmd.limits);
    SolveReport rd = solve_bp(inst, cmd.limits, cmd.bp);
    return std::make_pair(record_from_report(f.filename().string(), rc),
                          record_from_report(f.filename().string(), rd));
  };

  std::vector<std::pair<BenchRecord, BenchRecord>> pairs(files.size());
  if (cmd.parallel > 1) {
    std::vector<std::future<std::pair<BenchRecord, BenchRecord>>> futs;
    for (const auto& f : files)
      futs.push_back(std::async(std::launch::async, run_one, f));
    for (std::size_t i = 0; i < files.size(); ++i) pairs[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < files.size(); ++i) pairs[i] = run_one(files[i]);
  }

  std::vector<BenchRecord> flat;
  for (const auto& [c, d] : pairs) {
    flat.push_back(c);
    flat.push_back(d);
  }
  try {
    fs::create_directories(cmd.out_dir);
    write_file((fs::path(cmd.out_dir) / "bench.csv").string(), bench_csv(flat));
    std::string table = bench_table(pairs);
    write_file((fs::path(cmd.out_dir) / "bench.txt").string(), table);
    std::cout << table;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace psched
