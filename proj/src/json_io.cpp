#include "psched/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace psched {

using nlohmann::json;

namespace {

void require_fields(const json& j, std::initializer_list<const char*> allowed,
                    const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) throw ValidationError(std::string(what) + ": unknown field '" + it.key() + "'");
  }
  for (const char* a : allowed)
    if (!j.contains(a)) throw ValidationError(std::string(what) + ": missing field '" + a + "'");
}

json func_to_json(const FuncSpec& f) {
  json terms = json::array();
  for (const auto& t : f.terms) {
    json jt;
    switch (t.slot) {
      case Slot::PrevCondition:
        jt["slot"] = "prev_condition";
        break;
      case Slot::Production:
        jt["slot"] = "production";
        break;
      case Slot::PeerCondition:
        jt["slot"] = "peer_condition";
        jt["peer"] = t.peer;
        break;
    }
    jt["coeffs"] = t.coeffs;
    terms.push_back(jt);
  }
  return json{{"kind", to_string(f.kind)},
              {"constant", f.constant},
              {"terms", terms},
              {"domain",
               {{"prev_max", f.domain.prev_max},
                {"production_max", f.domain.production_max},
                {"peer_max", f.domain.peer_max}}}};
}

FuncSpec func_from_json(const json& j) {
  require_fields(j, {"kind", "constant", "terms", "domain"}, "function");
  FuncSpec f;
  f.kind = func_kind_from_string(j.at("kind").get<std::string>());
  f.constant = j.at("constant").get<double>();
  const json& dom = j.at("domain");
  require_fields(dom, {"prev_max", "production_max", "peer_max"}, "function domain");
  f.domain.prev_max = dom.at("prev_max").get<double>();
  f.domain.production_max = dom.at("production_max").get<double>();
  f.domain.peer_max = dom.at("peer_max").get<std::vector<double>>();
  for (const json& jt : j.at("terms")) {
    FuncTerm t;
    std::string slot = jt.at("slot").get<std::string>();
    if (slot == "prev_condition") {
      require_fields(jt, {"slot", "coeffs"}, "term");
      t.slot = Slot::PrevCondition;
    } else if (slot == "production") {
      require_fields(jt, {"slot", "coeffs"}, "term");
      t.slot = Slot::Production;
    } else if (slot == "peer_condition") {
      require_fields(jt, {"slot", "peer", "coeffs"}, "term");
      t.slot = Slot::PeerCondition;
      t.peer = jt.at("peer").get<int>();
    } else {
      throw ValidationError("term: unknown slot '" + slot + "'");
    }
    t.coeffs = jt.at("coeffs").get<std::vector<double>>();
    f.terms.push_back(std::move(t));
  }
  check_funcspec(f);
  return f;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json groups = json::array();
  for (const auto& g : inst.groups) {
    json comps = json::array();
    for (const auto& c : g.components)
      comps.push_back(json{{"cost", c.cost},
                           {"duration", c.duration},
                           {"max_condition", c.max_condition},
                           {"max_production", c.max_production},
                           {"f", func_to_json(c.degradation)},
                           {"g", func_to_json(c.limit)}});
    json impls = json::array();
    for (auto [k, kp] : g.implications) impls.push_back(json::array({k, kp}));
    groups.push_back(json{{"multiplicity", g.multiplicity},
                          {"components", comps},
                          {"implications", impls}});
  }
  json j{{"format_version", kFormatVersion},
         {"periods", inst.periods},
         {"demand", inst.demand},
         {"groups", groups}};
  return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("instance: bad JSON: ") + e.what());
  }
  require_fields(j, {"format_version", "periods", "demand", "groups"}, "instance");
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw ValidationError("instance: unsupported format_version");
  Instance inst;
  inst.periods = j.at("periods").get<int>();
  inst.demand = j.at("demand").get<std::vector<double>>();
  for (const json& jg : j.at("groups")) {
    require_fields(jg, {"multiplicity", "components", "implications"}, "group");
    MachineGroupSpec g;
    g.multiplicity = jg.at("multiplicity").get<int>();
    for (const json& jc : jg.at("components")) {
      require_fields(jc, {"cost", "duration", "max_condition", "max_production", "f", "g"},
                     "component");
      ComponentSpec c;
      c.cost = jc.at("cost").get<double>();
      c.duration = jc.at("duration").get<int>();
      c.max_condition = jc.at("max_condition").get<double>();
      c.max_production = jc.at("max_production").get<double>();
      c.degradation = func_from_json(jc.at("f"));
      c.limit = func_from_json(jc.at("g"));
      g.components.push_back(std::move(c));
    }
    for (const json& ji : jg.at("implications")) {
      if (!ji.is_array() || ji.size() != 2)
        throw ValidationError("group: implication must be a [k, k'] pair");
      g.implications.emplace_back(ji[0].get<int>(), ji[1].get<int>());
    }
    inst.groups.push_back(std::move(g));
  }
  check_instance(inst);
  return inst;
}

std::string schedule_to_json(const Schedule& s) {
  json machines = json::array();
  for (const auto& p : s.machines) {
    json xs = json::array();
    for (const auto& row : p.x) {
      json jr = json::array();
      for (char v : row) jr.push_back(static_cast<int>(v));
      xs.push_back(jr);
    }
    machines.push_back(json{{"x", xs}, {"y", p.y}, {"r", p.r}});
  }
  json j{{"format_version", kFormatVersion}, {"machines", machines}};
  return j.dump(2);
}

Schedule schedule_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("schedule: bad JSON: ") + e.what());
  }
  require_fields(j, {"format_version", "machines"}, "schedule");
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw ValidationError("schedule: unsupported format_version");
  Schedule s;
  for (const json& jm : j.at("machines")) {
    require_fields(jm, {"x", "y", "r"}, "machine plan");
    MachinePlan p;
    for (const json& row : jm.at("x")) {
      std::vector<char> xr;
      for (const json& v : row) {
        int b = v.get<int>();
        if (b != 0 && b != 1) throw ValidationError("schedule: x entries must be 0/1");
        xr.push_back(static_cast<char>(b));
      }
      p.x.push_back(std::move(xr));
    }
    p.y = jm.at("y").get<std::vector<double>>();
    p.r = jm.at("r").get<std::vector<std::vector<double>>>();
    s.machines.push_back(std::move(p));
  }
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace psched
