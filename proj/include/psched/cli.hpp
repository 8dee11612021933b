#pragma once

#include <string>
#include <vector>

#include "psched/branch_price.hpp"
#include "psched/instgen.hpp"
#include "psched/report.hpp"

namespace psched {

struct GenCommand {
  GenConfig config;
  int count = 1;
  std::string out_dir = ".";
};

struct SolveCommand {
  std::string instance_path;
  std::string method = "dw";  // compact | dw
  SolveLimits limits;
  BpConfig bp;
  std::string out_dir = ".";
};

struct BenchCommand {
  std::string instance_dir;
  SolveLimits limits;
  BpConfig bp;
  std::string out_dir = ".";
  int parallel = 1;
};

struct BenchRecord {
  std::string instance;
  std::string method;
  SolveStatus status = SolveStatus::Limit;
  double time_s = 0.0;
  double gap = 0.0;
  bool has_incumbent = false;
  long nodes = 0;
  long pricing_rounds = 0;
  std::map<std::string, double> breakdown;
};

enum class BenchClass { ExcludedFast, ExcludedNoIncumbent, Easy, Medium, Hard };

// Classification per the benchmark protocol: instances resolved by both
// methods in under 5s are dropped; "easy" means some method proved
// optimality or infeasibility in under 10s, "medium" within the time limit,
// "hard" means the limit was hit but an incumbent exists.
BenchClass bench_classify(const BenchRecord& compact, const BenchRecord& dw);
const char* to_string(BenchClass c);

BenchRecord record_from_report(const std::string& instance, const SolveReport& r);

// CSV with a fixed, versioned column order.
std::string bench_csv(const std::vector<BenchRecord>& records);
// Table text: per class and method, mean time/nodes over instances and mean
// gap over feasible instances, plus the pricing time breakdown.
std::string bench_table(const std::vector<std::pair<BenchRecord, BenchRecord>>& pairs);

int cmd_generate(const GenCommand& cmd);
int cmd_solve(const SolveCommand& cmd);
int cmd_validate(const std::string& instance_path, const std::string& schedule_path);
int cmd_bench(const BenchCommand& cmd);

}  // namespace psched
