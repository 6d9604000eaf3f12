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

#include "fogforge/model.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <tuple>

#include "fogforge/error.hpp"

namespace fogforge {

namespace {

[[noreturn]] void SchemaFail(const std::string &where, const std::string &what) {
  throw Error(ErrorCode::kSchema, where + ": " + what);
}

[[noreturn]] void Invalid(const std::string &invariant, const std::string &detail) {
  throw Error(ErrorCode::kValidation, "invariant '" + invariant + "' violated: " + detail);
}

/* Rejects fields outside the schema so misspelled optional fields are not silently defaulted. */
void Known(const Json &obj, std::initializer_list<const char *> keys, const std::string &where) {
  if (!obj.is_object()) SchemaFail(where, "expected an object");
  for (const auto &[key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char *k) { return key == k; })) {
      SchemaFail(where, "unknown field '" + key + "'");
    }
  }
}

const Json &Field(const Json &obj, const char *key, const std::string &where) {
  if (!obj.is_object()) SchemaFail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) SchemaFail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string StringField(const Json &obj, const char *key, const std::string &where) {
  const Json &v = Field(obj, key, where);
  if (!v.is_string()) SchemaFail(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double NumberField(const Json &obj, const char *key, const std::string &where) {
  const Json &v = Field(obj, key, where);
  if (!v.is_number()) SchemaFail(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> OptNumber(const Json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) SchemaFail(where, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::optional<std::string> OptString(const Json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) SchemaFail(where, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

const Json &ArrayField(const Json &obj, const char *key, const std::string &where) {
  const Json &v = Field(obj, key, where);
  if (!v.is_array()) SchemaFail(where, std::string("field '") + key + "' must be an array");
  return v;
}

std::vector<std::string> StringArray(const Json &obj, const char *key, const std::string &where,
                                     bool optional) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (optional) return out;
    SchemaFail(where, std::string("missing field '") + key + "'");
  }
  if (!it->is_array()) SchemaFail(where, std::string("field '") + key + "' must be an array");
  for (const auto &e : *it) {
    if (!e.is_string()) SchemaFail(where, std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

LatencyClass ParseLatencyClass(const std::string &s, const std::string &where) {
  if (s == "low") return LatencyClass::kLow;
  if (s == "medium") return LatencyClass::kMedium;
  if (s == "high") return LatencyClass::kHigh;
  SchemaFail(where, "unknown latencyClass '" + s + "'");
}

ComponentKind ParseKind(const std::string &s, const std::string &where) {
  if (s == "source") return ComponentKind::kSource;
  if (s == "service") return ComponentKind::kService;
  if (s == "sink") return ComponentKind::kSink;
  SchemaFail(where, "unknown kind '" + s + "'");
}

ServiceRole ParseRole(const std::string &s, const std::string &where) {
  if (s == "event-processor") return ServiceRole::kEventProcessor;
  if (s == "preprocessor") return ServiceRole::kPreprocessor;
  if (s == "heavy-analytics") return ServiceRole::kHeavyAnalytics;
  SchemaFail(where, "unknown role '" + s + "'");
}

PathClass ParsePathClass(const std::string &s, const std::string &where) {
  if (s == "event-processing") return PathClass::kEventProcessing;
  if (s == "data-analytics") return PathClass::kDataAnalytics;
  throw Error(ErrorCode::kUnknownPathClass, where + ": '" + s + "'");
}

template <typename T>
void SortById(std::vector<T> &v) {
  std::sort(v.begin(), v.end(), [](const T &x, const T &y) { return x.id < y.id; });
}

template <typename T>
void RequireUniqueIds(const std::vector<T> &sorted, const std::string &what) {
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].id == sorted[i - 1].id) Invalid(what + " ids unique", "duplicate id '" + sorted[i].id + "'");
  }
}

}  // namespace

const char *ToString(LatencyClass c) {
  switch (c) {
    case LatencyClass::kLow:
      return "low";
    case LatencyClass::kMedium:
      return "medium";
    case LatencyClass::kHigh:
      return "high";
  }
  return "low";
}

const char *ToString(ComponentKind k) {
  switch (k) {
    case ComponentKind::kSource:
      return "source";
    case ComponentKind::kService:
      return "service";
    case ComponentKind::kSink:
      return "sink";
  }
  return "service";
}

const char *ToString(ServiceRole r) {
  switch (r) {
    case ServiceRole::kNone:
      return "none";
    case ServiceRole::kEventProcessor:
      return "event-processor";
    case ServiceRole::kPreprocessor:
      return "preprocessor";
    case ServiceRole::kHeavyAnalytics:
      return "heavy-analytics";
  }
  return "none";
}

const char *ToString(PathClass c) {
  return c == PathClass::kEventProcessing ? "event-processing" : "data-analytics";
}

LatencyClass LatencyThresholds::Classify(double latencyMs) const {
  if (latencyMs >= highFromMs) return LatencyClass::kHigh;
  if (latencyMs >= mediumFromMs) return LatencyClass::kMedium;
  return LatencyClass::kLow;
}

int InfrastructureModel::NodeIndex(std::string_view id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const InfraNode &n, std::string_view v) { return n.id < v; });
  if (it == nodes.end() || it->id != id) return -1;
  return static_cast<int>(it - nodes.begin());
}

int InfrastructureModel::LinkIndex(std::string_view id) const {
  auto it = std::lower_bound(links.begin(), links.end(), id,
                             [](const NetworkLink &l, std::string_view v) { return l.id < v; });
  if (it == links.end() || it->id != id) return -1;
  return static_cast<int>(it - links.begin());
}

int InfrastructureModel::TierRank(std::string_view tier) const {
  for (size_t i = 0; i < tierOrder.size(); ++i) {
    if (tierOrder[i] == tier) return static_cast<int>(i);
  }
  return -1;
}

int InfrastructureModel::NodeTierRank(int node) const { return TierRank(nodes[node].tier); }

std::vector<std::vector<std::pair<int, int>>> InfrastructureModel::Adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(nodes.size());
  for (size_t l = 0; l < links.size(); ++l) {
    int a = NodeIndex(links[l].a);
    int b = NodeIndex(links[l].b);
    if (a < 0 || b < 0) continue;
    adj[a].emplace_back(b, static_cast<int>(l));
    adj[b].emplace_back(a, static_cast<int>(l));
  }
  for (auto &row : adj) std::sort(row.begin(), row.end());
  return adj;
}

int SoftwareModel::ComponentIndex(std::string_view id) const {
  auto it = std::lower_bound(components.begin(), components.end(), id,
                             [](const SoftwareComponent &c, std::string_view v) { return c.id < v; });
  if (it == components.end() || it->id != id) return -1;
  return static_cast<int>(it - components.begin());
}

int SoftwareModel::PathIndex(std::string_view id) const {
  for (size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> SoftwareModel::ServiceIndices() const {
  std::vector<int> out;
  for (size_t i = 0; i < components.size(); ++i) {
    if (components[i].kind == ComponentKind::kService) out.push_back(static_cast<int>(i));
  }
  return out;
}

int SoftwareModel::PathSink(int path) const {
  for (const auto &m : paths[path].members) {
    int c = ComponentIndex(m);
    if (c >= 0 && components[c].kind == ComponentKind::kSink) return c;
  }
  return -1;
}

std::vector<int> SoftwareModel::PathSources(int path) const {
  std::vector<int> out;
  for (const auto &m : paths[path].members) {
    int c = ComponentIndex(m);
    if (c >= 0 && components[c].kind == ComponentKind::kSource) out.push_back(c);
  }
  return out;
}

std::vector<std::vector<int>> SoftwareModel::PathChains(int path) const {
  const auto &members = paths[path].members;
  auto is_member = [&](const std::string &id) {
    return std::binary_search(members.begin(), members.end(), id);
  };
  std::vector<std::vector<int>> next(components.size());
  for (const auto &c : connections) {
    if (!is_member(c.producer) || !is_member(c.consumer)) continue;
    int p = ComponentIndex(c.producer);
    int q = ComponentIndex(c.consumer);
    if (p >= 0 && q >= 0) next[p].push_back(q);
  }
  int sink = PathSink(path);
  std::vector<std::vector<int>> chains;
  std::vector<int> stack;
  std::function<void(int)> walk = [&](int at) {
    stack.push_back(at);
    if (at == sink) {
      chains.push_back(stack);
    } else {
      for (int n : next[at]) walk(n);
    }
    stack.pop_back();
  };
  for (int s : PathSources(path)) walk(s);
  return chains;
}

InfrastructureModel ParseInfrastructure(const Json &doc, const LatencyThresholds &thresholds) {
  InfrastructureModel m;
  if (!doc.is_object()) SchemaFail("infrastructure", "document must be an object");
  Known(doc, {"tierOrder", "nodes", "links"}, "infrastructure");
  for (const auto &t : ArrayField(doc, "tierOrder", "infrastructure")) {
    if (!t.is_string()) SchemaFail("infrastructure.tierOrder", "tiers must be strings");
    m.tierOrder.push_back(t.get<std::string>());
  }
  const Json &nodes = ArrayField(doc, "nodes", "infrastructure");
  for (size_t i = 0; i < nodes.size(); ++i) {
    std::string where = "infrastructure.nodes[" + std::to_string(i) + "]";
    InfraNode n;
    Known(nodes[i], {"id", "name", "tier", "pinned", "hardwareOptions"}, where);
    n.id = StringField(nodes[i], "id", where);
    n.name = OptString(nodes[i], "name", where).value_or(n.id);
    n.tier = StringField(nodes[i], "tier", where);
    n.pinned = StringArray(nodes[i], "pinned", where, true);
    const Json &hw = ArrayField(nodes[i], "hardwareOptions", where);
    for (size_t j = 0; j < hw.size(); ++j) {
      std::string hwhere = where + ".hardwareOptions[" + std::to_string(j) + "]";
      HardwareOption o;
      Known(hw[j], {"id", "rpi", "memoryBytes", "priceMonth"}, hwhere);
      o.id = StringField(hw[j], "id", hwhere);
      o.rpi = NumberField(hw[j], "rpi", hwhere);
      o.memoryBytes = NumberField(hw[j], "memoryBytes", hwhere);
      o.priceMonth = NumberField(hw[j], "priceMonth", hwhere);
      n.hardwareOptions.push_back(o);
    }
    SortById(n.hardwareOptions);
    std::sort(n.pinned.begin(), n.pinned.end());
    m.nodes.push_back(std::move(n));
  }
  const Json &links = ArrayField(doc, "links", "infrastructure");
  for (size_t i = 0; i < links.size(); ++i) {
    std::string where = "infrastructure.links[" + std::to_string(i) + "]";
    NetworkLink l;
    Known(links[i], {"id", "a", "b", "latencyMs", "bandwidthBytesPerSec", "bandwidthPriceMonthPerBytePerSec", "latencyClass"},
          where);
    l.id = StringField(links[i], "id", where);
    l.a = StringField(links[i], "a", where);
    l.b = StringField(links[i], "b", where);
    l.latencyMs = NumberField(links[i], "latencyMs", where);
    l.bandwidthBytesPerSec = NumberField(links[i], "bandwidthBytesPerSec", where);
    l.bandwidthPrice = NumberField(links[i], "bandwidthPriceMonthPerBytePerSec", where);
    if (auto cls = OptString(links[i], "latencyClass", where)) {
      l.latencyClass = ParseLatencyClass(*cls, where);
      l.latencyClassDeclared = true;
    } else {
      l.latencyClass = thresholds.Classify(l.latencyMs);
    }
    m.links.push_back(std::move(l));
  }
  SortById(m.nodes);
  SortById(m.links);
  return m;
}

SoftwareModel ParseSoftware(const Json &doc) {
  SoftwareModel m;
  if (!doc.is_object()) SchemaFail("software", "document must be an object");
  Known(doc, {"components", "connections", "paths"}, "software");
  const Json &comps = ArrayField(doc, "components", "software");
  for (size_t i = 0; i < comps.size(); ++i) {
    std::string where = "software.components[" + std::to_string(i) + "]";
    SoftwareComponent c;
    Known(comps[i],
          {"id", "kind", "outputRateBytesPerSec", "outputRatio", "refDelayMs", "requiredMemoryBytes", "role", "pinnedNode"},
          where);
    c.id = StringField(comps[i], "id", where);
    c.kind = ParseKind(StringField(comps[i], "kind", where), where);
    c.outputRate = OptNumber(comps[i], "outputRateBytesPerSec", where);
    c.outputRatio = OptNumber(comps[i], "outputRatio", where).value_or(0.0);
    c.refDelayMs = OptNumber(comps[i], "refDelayMs", where).value_or(0.0);
    c.requiredMemoryBytes = OptNumber(comps[i], "requiredMemoryBytes", where).value_or(0.0);
    if (auto role = OptString(comps[i], "role", where)) c.role = ParseRole(*role, where);
    c.pinnedNode = OptString(comps[i], "pinnedNode", where).value_or("");
    if (c.kind == ComponentKind::kService && !comps[i].contains("outputRatio")) {
      SchemaFail(where, "service requires 'outputRatio'");
    }
    m.components.push_back(std::move(c));
  }
  const Json &conns = ArrayField(doc, "connections", "software");
  for (size_t i = 0; i < conns.size(); ++i) {
    std::string where = "software.connections[" + std::to_string(i) + "]";
    Connection c;
    Known(conns[i], {"producer", "consumer"}, where);
    c.producer = StringField(conns[i], "producer", where);
    c.consumer = StringField(conns[i], "consumer", where);
    m.connections.push_back(std::move(c));
  }
  const Json &paths = ArrayField(doc, "paths", "software");
  for (size_t i = 0; i < paths.size(); ++i) {
    std::string where = "software.paths[" + std::to_string(i) + "]";
    ApplicationPath p;
    Known(paths[i], {"id", "class", "members", "sloLatencyMs"}, where);
    p.id = StringField(paths[i], "id", where);
    p.cls = ParsePathClass(StringField(paths[i], "class", where), where);
    p.members = StringArray(paths[i], "members", where, false);
    p.sloLatencyMs = NumberField(paths[i], "sloLatencyMs", where);
    std::sort(p.members.begin(), p.members.end());
    m.paths.push_back(std::move(p));
  }
  SortById(m.components);
  std::sort(m.connections.begin(), m.connections.end(), [](const Connection &x, const Connection &y) {
    return std::tie(x.producer, x.consumer) < std::tie(y.producer, y.consumer);
  });
  SortById(m.paths);
  return m;
}

Json ToJson(const InfrastructureModel &infra) {
  Json doc;
  doc["tierOrder"] = infra.tierOrder;
  Json nodes = Json::array();
  for (const auto &n : infra.nodes) {
    Json hw = Json::array();
    for (const auto &o : n.hardwareOptions) {
      hw.push_back({{"id", o.id}, {"rpi", o.rpi}, {"memoryBytes", o.memoryBytes}, {"priceMonth", o.priceMonth}});
    }
    nodes.push_back({{"id", n.id}, {"name", n.name}, {"tier", n.tier}, {"pinned", n.pinned}, {"hardwareOptions", hw}});
  }
  doc["nodes"] = nodes;
  Json links = Json::array();
  for (const auto &l : infra.links) {
    Json j = {{"id", l.id},
              {"a", l.a},
              {"b", l.b},
              {"latencyMs", l.latencyMs},
              {"bandwidthBytesPerSec", l.bandwidthBytesPerSec},
              {"bandwidthPriceMonthPerBytePerSec", l.bandwidthPrice}};
    if (l.latencyClassDeclared) j["latencyClass"] = ToString(l.latencyClass);
    links.push_back(j);
  }
  doc["links"] = links;
  return doc;
}

Json ToJson(const SoftwareModel &software) {
  Json doc;
  Json comps = Json::array();
  for (const auto &c : software.components) {
    Json j = {{"id", c.id}, {"kind", ToString(c.kind)}};
    if (c.outputRate) j["outputRateBytesPerSec"] = *c.outputRate;
    if (c.kind == ComponentKind::kService) {
      j["outputRatio"] = c.outputRatio;
      j["refDelayMs"] = c.refDelayMs;
      j["requiredMemoryBytes"] = c.requiredMemoryBytes;
    }
    if (c.role != ServiceRole::kNone) j["role"] = ToString(c.role);
    if (!c.pinnedNode.empty()) j["pinnedNode"] = c.pinnedNode;
    comps.push_back(j);
  }
  doc["components"] = comps;
  Json conns = Json::array();
  for (const auto &c : software.connections) conns.push_back({{"producer", c.producer}, {"consumer", c.consumer}});
  doc["connections"] = conns;
  Json paths = Json::array();
  for (const auto &p : software.paths) {
    paths.push_back({{"id", p.id}, {"class", ToString(p.cls)}, {"members", p.members}, {"sloLatencyMs", p.sloLatencyMs}});
  }
  doc["paths"] = paths;
  return doc;
}

void Validate(const InfrastructureModel &infra) {
  if (infra.nodes.empty()) Invalid("at least one node", "infrastructure has no nodes");
  std::set<std::string> tiers;
  for (const auto &t : infra.tierOrder) {
    if (!tiers.insert(t).second) Invalid("tier labels unique", "duplicate tier '" + t + "'");
  }
  RequireUniqueIds(infra.nodes, "node");
  RequireUniqueIds(infra.links, "link");
  for (const auto &n : infra.nodes) {
    if (infra.TierRank(n.tier) < 0) Invalid("tier appears in tierOrder", "node '" + n.id + "' tier '" + n.tier + "'");
    if (n.hardwareOptions.empty()) Invalid("hardwareOptions non-empty", "node '" + n.id + "'");
    RequireUniqueIds(n.hardwareOptions, "hardware option (node '" + n.id + "')");
    for (const auto &o : n.hardwareOptions) {
      std::string subject = "node '" + n.id + "' option '" + o.id + "'";
      if (!(o.rpi > 0)) Invalid("relativePerformanceIndicator > 0", subject);
      if (!(o.memoryBytes >= 0)) Invalid("availableMemory >= 0", subject);
      if (!(o.priceMonth >= 0)) Invalid("pricePerMonth >= 0", subject);
    }
  }
  for (const auto &l : infra.links) {
    std::string subject = "link '" + l.id + "'";
    if (infra.NodeIndex(l.a) < 0 || infra.NodeIndex(l.b) < 0) Invalid("link endpoints exist", subject);
    if (l.a == l.b) Invalid("link endpoints distinct", subject);
    if (!(l.latencyMs >= 0)) Invalid("latency >= 0", subject);
    if (!(l.bandwidthBytesPerSec > 0)) Invalid("availableBandwidth > 0", subject);
    if (!(l.bandwidthPrice >= 0)) Invalid("bandwidthPrice >= 0", subject);
  }
  auto adj = infra.Adjacency();
  std::vector<char> seen(infra.nodes.size(), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    int at = queue.front();
    queue.pop_front();
    for (auto [n, l] : adj[at]) {
      if (!seen[n]) {
        seen[n] = 1;
        queue.push_back(n);
      }
    }
  }
  for (size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kDisconnectedGraph,
                  "node '" + infra.nodes[i].id + "' unreachable from '" + infra.nodes[0].id + "'");
    }
  }
}

void Validate(const SoftwareModel &software) {
  RequireUniqueIds(software.components, "component");
  RequireUniqueIds(software.paths, "path");
  for (const auto &c : software.components) {
    std::string subject = "component '" + c.id + "'";
    if (c.kind == ComponentKind::kService) {
      if (!c.pinnedNode.empty()) Invalid("services are not pinned", subject);
      if (!(c.outputRatio >= 0)) Invalid("outputRatio >= 0", subject);
      if (!(c.refDelayMs >= 0)) Invalid("referenceProcessingDelay >= 0", subject);
      if (!(c.requiredMemoryBytes >= 0)) Invalid("requiredMemory >= 0", subject);
    } else {
      if (c.pinnedNode.empty()) Invalid("sources and sinks have pinnedNode", subject);
    }
    if (c.kind == ComponentKind::kSource && c.outputRate && !(*c.outputRate > 0)) {
      Invalid("outputRate > 0 for sources", subject);
    }
  }
  for (size_t i = 0; i < software.connections.size(); ++i) {
    const auto &c = software.connections[i];
    std::string subject = "connection " + c.producer + " -> " + c.consumer;
    int p = software.ComponentIndex(c.producer);
    int q = software.ComponentIndex(c.consumer);
    if (p < 0 || q < 0) Invalid("connection endpoints exist", subject);
    if (p == q) Invalid("producer != consumer", subject);
    if (software.components[p].kind == ComponentKind::kSink) Invalid("producer is not a sink", subject);
    if (software.components[q].kind == ComponentKind::kSource) Invalid("consumer is not a source", subject);
    if (i > 0 && software.connections[i - 1].producer == c.producer &&
        software.connections[i - 1].consumer == c.consumer) {
      Invalid("connections unique", subject);
    }
  }
  // Global acyclicity (Kahn).
  std::vector<int> indeg(software.components.size(), 0);
  std::vector<std::vector<int>> next(software.components.size());
  for (const auto &c : software.connections) {
    int p = software.ComponentIndex(c.producer);
    int q = software.ComponentIndex(c.consumer);
    next[p].push_back(q);
    ++indeg[q];
  }
  std::deque<int> ready;
  for (size_t i = 0; i < indeg.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  size_t visited = 0;
  while (!ready.empty()) {
    int at = ready.front();
    ready.pop_front();
    ++visited;
    for (int n : next[at]) {
      if (--indeg[n] == 0) ready.push_back(n);
    }
  }
  if (visited != software.components.size()) {
    std::string cyc;
    for (size_t i = 0; i < indeg.size(); ++i) {
      if (indeg[i] > 0) cyc += (cyc.empty() ? "" : ", ") + software.components[i].id;
    }
    throw Error(ErrorCode::kCyclicSoftwareGraph, "components on a cycle: " + cyc);
  }
  std::vector<int> membership(software.components.size(), 0);
  for (size_t pi = 0; pi < software.paths.size(); ++pi) {
    const auto &p = software.paths[pi];
    std::string subject = "path '" + p.id + "'";
    if (!(p.sloLatencyMs >= 0)) Invalid("sloLatency >= 0", subject);
    int sinks = 0, sources = 0;
    for (size_t k = 0; k < p.members.size(); ++k) {
      if (k > 0 && p.members[k] == p.members[k - 1]) Invalid("path members unique", subject);
      int c = software.ComponentIndex(p.members[k]);
      if (c < 0) Invalid("path members exist", subject + " member '" + p.members[k] + "'");
      ++membership[c];
      if (software.components[c].kind == ComponentKind::kSink) ++sinks;
      if (software.components[c].kind == ComponentKind::kSource) ++sources;
    }
    if (sinks != 1) Invalid("exactly one sink per path", subject + " has " + std::to_string(sinks));
    if (sources < 1) Invalid("at least one source per path", subject);
    auto chains = software.PathChains(static_cast<int>(pi));
    std::set<int> covered;
    for (const auto &ch : chains) covered.insert(ch.begin(), ch.end());
    for (const auto &m : p.members) {
      if (!covered.count(software.ComponentIndex(m))) {
        Invalid("path members lie on a source-to-sink chain", subject + " member '" + m + "'");
      }
    }
  }
  for (size_t i = 0; i < membership.size(); ++i) {
    if (membership[i] == 0) {
      Invalid("every component belongs to a path", "component '" + software.components[i].id + "'");
    }
  }
}

void ValidatePair(const InfrastructureModel &infra, const SoftwareModel &software) {
  for (const auto &c : software.components) {
    if (c.pinnedNode.empty()) continue;
    int n = infra.NodeIndex(c.pinnedNode);
    if (n < 0) Invalid("pinnedNode exists", "component '" + c.id + "' -> '" + c.pinnedNode + "'");
    const auto &pinned = infra.nodes[n].pinned;
    if (!std::binary_search(pinned.begin(), pinned.end(), c.id)) {
      Invalid("node pinned list matches components", "node '" + c.pinnedNode + "' does not list '" + c.id + "'");
    }
  }
  for (const auto &n : infra.nodes) {
    for (const auto &id : n.pinned) {
      int c = software.ComponentIndex(id);
      if (c < 0 || software.components[c].pinnedNode != n.id) {
        Invalid("node pinned list matches components", "node '" + n.id + "' lists '" + id + "'");
      }
    }
  }
}

std::pair<InfrastructureModel, SoftwareModel> LoadModels(std::string_view infraDocument,
                                                         std::string_view softwareDocument,
                                                         const LatencyThresholds &thresholds) {
  Json infraDoc, swDoc;
  try {
    infraDoc = Json::parse(infraDocument);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kSchema, std::string("infrastructure: ") + e.what());
  }
  try {
    swDoc = Json::parse(softwareDocument);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kSchema, std::string("software: ") + e.what());
  }
  auto infra = ParseInfrastructure(infraDoc, thresholds);
  auto software = ParseSoftware(swDoc);
  Validate(infra);
  Validate(software);
  ValidatePair(infra, software);
  return {std::move(infra), std::move(software)};
}

SoftwareModel DeriveRates(SoftwareModel software) {
  size_t n = software.components.size();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<size_t>> outgoing(n);
  for (size_t i = 0; i < software.connections.size(); ++i) {
    int p = software.ComponentIndex(software.connections[i].producer);
    int q = software.ComponentIndex(software.connections[i].consumer);
    if (p < 0 || q < 0) {
      throw Error(ErrorCode::kValidation, "connection references an unknown component");
    }
    outgoing[p].push_back(i);
    ++indeg[q];
  }
  std::vector<double> inflow(n, 0.0);
  std::deque<int> ready;
  for (size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  size_t visited = 0;
  while (!ready.empty()) {
    int at = ready.front();
    ready.pop_front();
    ++visited;
    const auto &c = software.components[at];
    double out = 0.0;
    if (c.kind == ComponentKind::kSource) {
      if (!c.outputRate) throw Error(ErrorCode::kMissingRate, "source '" + c.id + "' lacks outputRate");
      out = *c.outputRate;
    } else if (c.kind == ComponentKind::kService) {
      out = c.outputRatio * inflow[at];
    }
    for (size_t ci : outgoing[at]) {
      auto &conn = software.connections[ci];
      conn.dataRate = out;
      int q = software.ComponentIndex(conn.consumer);
      inflow[q] += out;
      if (--indeg[q] == 0) ready.push_back(q);
    }
  }
  if (visited != n) throw Error(ErrorCode::kCyclicSoftwareGraph, "cannot derive rates on a cyclic graph");
  return software;
}

std::string FormatBytes(double bytes) {
  static const char *kUnits[] = {"B", "kB", "MB", "GB", "TB"};
  int unit = 0;
  double v = bytes;
  while (unit < 4 && v >= 1000.0) {
    v /= 1000.0;
    ++unit;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g %s", v, kUnits[unit]);
  return buf;
}

}  // namespace fogforge
