/*
 * Copyright 2026 The FogForge Authors. All Rights Reserved.
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

#ifndef FOGFORGE_TESTS_ORACLE_HPP_
#define FOGFORGE_TESTS_ORACLE_HPP_

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fogforge/enumerate.hpp"
#include "fogforge/model.hpp"

/*
 * Brute-force reference for the simulator. Works from the raw documents:
 * routes by enumerating every simple path, sums everything from scratch.
 */
namespace oracle {

using fogforge::Json;

struct Instance {
  Json infra;
  Json software;
};

struct Metrics {
  double processingCost = 0.0;
  double transmissionCost = 0.0;
  bool feasible = true;
  std::set<std::string> violations;  // "kind:subject"
  std::map<std::string, double> endToEnd;
};

inline double Uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int Pick(std::mt19937_64 &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/* <= 6 nodes, <= 8 links, <= 4 services, one path over all components. */
inline Instance RandomInstance(std::mt19937_64 &rng, bool coarsePrices) {
  const int k = Pick(rng, 2, 6);
  auto nodeId = [](int i) { return "n" + std::to_string(i); };
  std::vector<std::vector<std::string>> pinned(k);

  const int sources = Pick(rng, 1, 2);
  const int services = Pick(rng, 1, 4);
  Json components = Json::array();
  Json connections = Json::array();
  Json members = Json::array();
  std::vector<std::string> producers;
  std::map<std::string, int> consumers;
  for (int s = 0; s < sources; ++s) {
    std::string id = "src" + std::to_string(s);
    int node = Pick(rng, 0, k - 1);
    pinned[node].push_back(id);
    components.push_back({{"id", id}, {"kind", "source"}, {"outputRateBytesPerSec", Uniform(rng, 1, 1000)},
                          {"pinnedNode", nodeId(node)}});
    producers.push_back(id);
    members.push_back(id);
  }
  for (int s = 0; s < services; ++s) {
    std::string id = "s" + std::to_string(s);
    components.push_back({{"id", id},
                          {"kind", "service"},
                          {"outputRatio", Uniform(rng, 0, 2)},
                          {"refDelayMs", Uniform(rng, 0, 50)},
                          {"requiredMemoryBytes", Uniform(rng, 0, 600)}});
    std::set<std::string> from;
    int count = Pick(rng, 1, std::min<int>(2, static_cast<int>(producers.size())));
    while (static_cast<int>(from.size()) < count) from.insert(producers[Pick(rng, 0, static_cast<int>(producers.size()) - 1)]);
    for (const auto &p : from) {
      connections.push_back({{"producer", p}, {"consumer", id}});
      ++consumers[p];
    }
    producers.push_back(id);
    members.push_back(id);
  }
  for (int s = 0; s < sources; ++s) {
    std::string id = "src" + std::to_string(s);
    if (!consumers[id]) {
      std::string svc = "s" + std::to_string(Pick(rng, 0, services - 1));
      connections.push_back({{"producer", id}, {"consumer", svc}});
      ++consumers[id];
    }
  }
  int sinkNode = Pick(rng, 0, k - 1);
  pinned[sinkNode].push_back("sink");
  components.push_back({{"id", "sink"}, {"kind", "sink"}, {"pinnedNode", nodeId(sinkNode)}});
  members.push_back("sink");
  for (int s = 0; s < services; ++s) {
    std::string id = "s" + std::to_string(s);
    if (!consumers[id]) connections.push_back({{"producer", id}, {"consumer", "sink"}});
  }

  Json nodes = Json::array();
  for (int i = 0; i < k; ++i) {
    Json hw = Json::array();
    int options = Pick(rng, 1, 3);
    for (int o = 0; o < options; ++o) {
      hw.push_back({{"id", nodeId(i) + "h" + std::to_string(o)},
                    {"rpi", Uniform(rng, 0.1, 4)},
                    {"memoryBytes", Uniform(rng, 50, 1000)},
                    {"priceMonth", Uniform(rng, 0, 20)}});
    }
    nodes.push_back({{"id", nodeId(i)},
                     {"name", nodeId(i)},
                     {"tier", "t" + std::to_string(Pick(rng, 0, 2))},
                     {"pinned", pinned[i]},
                     {"hardwareOptions", hw}});
  }
  std::set<std::pair<int, int>> pairs;
  for (int i = 1; i < k; ++i) pairs.insert({Pick(rng, 0, i - 1), i});
  int extra = Pick(rng, 0, std::min(8, k * (k - 1) / 2) - static_cast<int>(pairs.size()));
  for (int tries = 0; extra > 0 && tries < 100; ++tries) {
    int a = Pick(rng, 0, k - 1), b = Pick(rng, 0, k - 1);
    if (a == b) continue;
    if (pairs.insert({std::min(a, b), std::max(a, b)}).second) --extra;
  }
  Json links = Json::array();
  for (const auto &[a, b] : pairs) {
    double price = coarsePrices ? 0.5 * Pick(rng, 0, 6) : Uniform(rng, 0, 3);
    links.push_back({{"id", "l" + std::to_string(a) + std::to_string(b)},
                     {"a", nodeId(a)},
                     {"b", nodeId(b)},
                     {"latencyMs", Uniform(rng, 0, 20)},
                     {"bandwidthBytesPerSec", Uniform(rng, 20, 3000)},
                     {"bandwidthPriceMonthPerBytePerSec", price}});
  }
  Json infra = {{"tierOrder", {"t0", "t1", "t2"}}, {"nodes", nodes}, {"links", links}};
  Json software = {
      {"components", components},
      {"connections", connections},
      {"paths", {{{"id", "P"}, {"class", "event-processing"}, {"members", members}, {"sloLatencyMs", 100}}}}};
  return {infra, software};
}

inline fogforge::DesignOption RandomOption(std::mt19937_64 &rng, const fogforge::InfrastructureModel &infra,
                                           const fogforge::SoftwareModel &software) {
  fogforge::DesignOption d;
  for (int s : software.ServiceIndices()) {
    d.placement[software.components[s].id] = infra.nodes[Pick(rng, 0, static_cast<int>(infra.nodes.size()) - 1)].id;
  }
  for (const auto &n : infra.nodes) {
    d.hardware[n.id] = n.hardwareOptions[Pick(rng, 0, static_cast<int>(n.hardwareOptions.size()) - 1)].id;
  }
  return d;
}

struct Path {
  std::vector<std::string> nodes;
  std::vector<const Json *> links;
  double price = 0.0;
};

/* Every simple path between a and b. */
inline std::vector<Path> SimplePaths(const Json &infra, const std::string &a, const std::string &b) {
  std::vector<Path> out;
  Path cur;
  cur.nodes.push_back(a);
  std::function<void()> dfs = [&] {
    const std::string at = cur.nodes.back();
    if (at == b) {
      out.push_back(cur);
      return;
    }
    for (const auto &l : infra["links"]) {
      std::string next;
      if (l["a"] == at) next = l["b"];
      else if (l["b"] == at) next = l["a"];
      else continue;
      if (std::find(cur.nodes.begin(), cur.nodes.end(), next) != cur.nodes.end()) continue;
      cur.nodes.push_back(next);
      cur.links.push_back(&l);
      cur.price += l["bandwidthPriceMonthPerBytePerSec"].get<double>();
      dfs();
      cur.price -= l["bandwidthPriceMonthPerBytePerSec"].get<double>();
      cur.links.pop_back();
      cur.nodes.pop_back();
    }
  };
  dfs();
  return out;
}

inline Path BestPath(const Json &infra, const std::string &a, const std::string &b) {
  auto paths = SimplePaths(infra, a, b);
  return *std::min_element(paths.begin(), paths.end(), [](const Path &x, const Path &y) {
    if (x.price != y.price) return x.price < y.price;
    if (x.nodes.size() != y.nodes.size()) return x.nodes.size() < y.nodes.size();
    return x.nodes < y.nodes;
  });
}

inline double CheapestSimplePath(const fogforge::InfrastructureModel &infra, const std::string &a, const std::string &b) {
  Json doc = fogforge::ToJson(infra);
  double best = std::numeric_limits<double>::infinity();
  for (const auto &p : SimplePaths(doc, a, b)) best = std::min(best, p.price);
  return best;
}

inline Metrics Evaluate(const Instance &inst, const fogforge::InfrastructureModel &, const fogforge::SoftwareModel &,
                        const fogforge::DesignOption &option) {
  const Json &infra = inst.infra;
  const Json &sw = inst.software;
  std::map<std::string, const Json *> comp;
  for (const auto &c : sw["components"]) comp[c["id"]] = &c;
  auto host = [&](const std::string &id) -> std::string {
    const Json &c = *comp.at(id);
    if (c.contains("pinnedNode")) return c["pinnedNode"];
    return option.placement.at(id);
  };
  auto hardware = [&](const std::string &node) -> const Json & {
    for (const auto &n : infra["nodes"]) {
      if (n["id"] != node) continue;
      for (const auto &h : n["hardwareOptions"]) {
        if (h["id"] == option.hardware.at(node)) return h;
      }
    }
    throw std::runtime_error("no hardware");
  };
  std::map<std::string, double> outRate;
  std::function<double(const std::string &)> rate = [&](const std::string &id) {
    auto it = outRate.find(id);
    if (it != outRate.end()) return it->second;
    const Json &c = *comp.at(id);
    double r;
    if (c["kind"] == "source") {
      r = c["outputRateBytesPerSec"].get<double>();
    } else {
      double in = 0;
      for (const auto &cn : sw["connections"]) {
        if (cn["consumer"] == id) in += rate(cn["producer"]);
      }
      r = c.value("outputRatio", 0.0) * in;
    }
    outRate[id] = r;
    return r;
  };

  Metrics m;
  std::map<std::string, double> load;
  std::map<std::pair<std::string, std::string>, double> connLatency;
  for (const auto &cn : sw["connections"]) {
    std::string p = cn["producer"], c = cn["consumer"];
    Path route = BestPath(infra, host(p), host(c));
    double latency = 0;
    for (const Json *l : route.links) {
      load[(*l)["id"]] += rate(p);
      latency += (*l)["latencyMs"].get<double>();
    }
    connLatency[{p, c}] = latency;
  }
  std::map<std::string, double> memory;
  for (const auto &c : sw["components"]) {
    if (c["kind"] == "service") memory[host(c["id"])] += c.value("requiredMemoryBytes", 0.0);
  }
  for (const auto &[node, mem] : memory) {
    const Json &h = hardware(node);
    m.processingCost += h["priceMonth"].get<double>();
    if (mem > h["memoryBytes"].get<double>()) m.violations.insert("memory:" + node);
  }
  for (const auto &l : infra["links"]) {
    double used = load.count(l["id"]) ? load[l["id"]] : 0.0;
    m.transmissionCost += used * l["bandwidthPriceMonthPerBytePerSec"].get<double>();
    if (used > l["bandwidthBytesPerSec"].get<double>()) m.violations.insert("bandwidth:" + l["id"].get<std::string>());
  }
  m.feasible = m.violations.empty();

  for (const auto &path : sw["paths"]) {
    std::set<std::string> mem;
    for (const auto &x : path["members"]) mem.insert(x);
    double worst = 0;
    std::function<void(const std::string &, double)> walk = [&](const std::string &at, double acc) {
      const Json &c = *comp.at(at);
      if (c["kind"] == "service") {
        acc += c.value("refDelayMs", 0.0) / hardware(host(at))["rpi"].get<double>();
      }
      if (c["kind"] == "sink") {
        worst = std::max(worst, acc);
        return;
      }
      for (const auto &cn : sw["connections"]) {
        if (cn["producer"] == at && mem.count(cn["consumer"])) walk(cn["consumer"], acc + connLatency[{at, cn["consumer"]}]);
      }
    };
    for (const auto &x : path["members"]) {
      if (comp.at(x)->at("kind") == "source") walk(x, 0.0);
    }
    m.endToEnd[path["id"]] = worst;
  }
  return m;
}

}  // namespace oracle

#endif  // FOGFORGE_TESTS_ORACLE_HPP_
