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

#include "fogforge/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "fogforge/error.hpp"

namespace fogforge {

namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

const char *ToString(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kMemory:
      return "memory";
    case ViolationKind::kBandwidth:
      return "bandwidth";
    case ViolationKind::kSlo:
      return "slo";
    case ViolationKind::kLinkReuse:
      return "link-reuse";
  }
  return "memory";
}

Simulator::Simulator(const InfrastructureModel &infra, const SoftwareModel &software, LinkReuseRule linkReuse)
    : infra_(infra), software_(DeriveRates(software)), linkReuse_(linkReuse), routing_(infra_) {
  services_ = software_.ServiceIndices();
  serviceSlot_.assign(software_.components.size(), -1);
  for (size_t i = 0; i < services_.size(); ++i) serviceSlot_[services_[i]] = static_cast<int>(i);
  for (const auto &c : software_.connections) {
    connProducer_.push_back(software_.ComponentIndex(c.producer));
    connConsumer_.push_back(software_.ComponentIndex(c.consumer));
  }
  for (size_t p = 0; p < software_.paths.size(); ++p) {
    std::vector<Chain> chains;
    for (const auto &members : software_.PathChains(static_cast<int>(p))) {
      Chain ch;
      for (int c : members) {
        if (software_.components[c].kind == ComponentKind::kService) ch.serviceComponents.push_back(c);
      }
      for (size_t k = 0; k + 1 < members.size(); ++k) {
        for (size_t ci = 0; ci < connProducer_.size(); ++ci) {
          if (connProducer_[ci] == members[k] && connConsumer_[ci] == members[k + 1]) {
            ch.connections.push_back(static_cast<int>(ci));
            break;
          }
        }
      }
      chains.push_back(std::move(ch));
    }
    chains_.push_back(std::move(chains));
  }
}

std::vector<int> Simulator::Hosts(const CompactOption &option) const {
  std::vector<int> host(software_.components.size(), -1);
  for (size_t c = 0; c < software_.components.size(); ++c) {
    if (serviceSlot_[c] >= 0) {
      host[c] = option.nodeOf.at(serviceSlot_[c]);
    } else {
      host[c] = infra_.NodeIndex(software_.components[c].pinnedNode);
    }
  }
  return host;
}

CompactMetrics Simulator::Evaluate(const CompactOption &option) const {
  if (option.nodeOf.size() != services_.size() || option.hwOf.size() != infra_.nodes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "option shape does not match the models");
  }
  CompactMetrics m;
  std::vector<int> host = Hosts(option);

  std::vector<double> load(infra_.links.size(), 0.0);
  std::vector<int> traversals;
  std::map<std::pair<int, int>, int> directed;
  if (linkReuse_.enabled) traversals.assign(infra_.links.size(), 0);
  std::vector<double> connLatency(connProducer_.size(), 0.0);
  for (size_t ci = 0; ci < connProducer_.size(); ++ci) {
    const Route &r = routing_.Get(host[connProducer_[ci]], host[connConsumer_[ci]]);
    double rate = software_.connections[ci].dataRate;
    for (size_t k = 0; k < r.links.size(); ++k) {
      load[r.links[k]] += rate;
      if (linkReuse_.enabled) {
        if (linkReuse_.directed) {
          ++directed[{r.links[k], r.nodes[k]}];
        } else {
          ++traversals[r.links[k]];
        }
      }
    }
    connLatency[ci] = r.latencyMs;
  }

  std::vector<double> memory(infra_.nodes.size(), 0.0);
  std::vector<char> used(infra_.nodes.size(), 0);
  for (size_t i = 0; i < services_.size(); ++i) {
    int n = option.nodeOf[i];
    used[n] = 1;
    memory[n] += software_.components[services_[i]].requiredMemoryBytes;
  }
  for (size_t n = 0; n < infra_.nodes.size(); ++n) {
    if (!used[n]) continue;
    int hw = option.hwOf[n];
    if (hw < 0) {
      throw Error(ErrorCode::kInvalidArgument, "no hardware option for used node '" + infra_.nodes[n].id + "'");
    }
    const HardwareOption &o = infra_.nodes[n].hardwareOptions[hw];
    m.processingCostMonth += o.priceMonth;
    if (memory[n] > o.memoryBytes) {
      m.violations.push_back({ViolationKind::kMemory, static_cast<int>(n), memory[n], o.memoryBytes});
    }
  }
  for (size_t l = 0; l < infra_.links.size(); ++l) {
    m.transmissionCostMonth += load[l] * infra_.links[l].bandwidthPrice;
    if (load[l] > infra_.links[l].bandwidthBytesPerSec) {
      m.violations.push_back({ViolationKind::kBandwidth, static_cast<int>(l), load[l],
                              infra_.links[l].bandwidthBytesPerSec});
    }
  }
  if (linkReuse_.enabled) {
    double cap = linkReuse_.threshold;
    if (linkReuse_.directed) {
      for (const auto &[key, count] : directed) {
        if (count > linkReuse_.threshold) {
          m.violations.push_back({ViolationKind::kLinkReuse, key.first, static_cast<double>(count), cap});
        }
      }
    } else {
      for (size_t l = 0; l < traversals.size(); ++l) {
        if (traversals[l] > linkReuse_.threshold) {
          m.violations.push_back({ViolationKind::kLinkReuse, static_cast<int>(l),
                                  static_cast<double>(traversals[l]), cap});
        }
      }
    }
  }
  m.totalCostMonth = m.processingCostMonth + m.transmissionCostMonth;
  m.feasible = m.violations.empty();

  m.perPath.resize(software_.paths.size());
  m.sloOk = m.feasible;
  for (size_t p = 0; p < software_.paths.size(); ++p) {
    PathMetrics worst;
    bool first = true;
    for (const Chain &ch : chains_[p]) {
      PathMetrics pm;
      for (int c : ch.serviceComponents) {
        int n = host[c];
        pm.processingTimeMs += software_.components[c].refDelayMs / infra_.nodes[n].hardwareOptions[option.hwOf[n]].rpi;
      }
      for (int ci : ch.connections) pm.transmissionTimeMs += connLatency[ci];
      pm.endToEndMs = pm.processingTimeMs + pm.transmissionTimeMs;
      if (first || pm.endToEndMs > worst.endToEndMs) worst = pm;
      first = false;
    }
    m.perPath[p] = worst;
    double slo = software_.paths[p].sloLatencyMs;
    if (worst.endToEndMs > slo) {
      m.sloOk = false;
      m.violations.push_back({ViolationKind::kSlo, static_cast<int>(p), worst.endToEndMs, slo});
    }
  }
  return m;
}

std::string Simulator::DescribeViolation(const CompactOption &option, const CompactViolation &v) const {
  switch (v.kind) {
    case ViolationKind::kMemory: {
      const auto &node = infra_.nodes[v.subject];
      std::string names;
      for (size_t i = 0; i < services_.size(); ++i) {
        if (option.nodeOf[i] == v.subject) names += (names.empty() ? "" : ", ") + software_.components[services_[i]].id;
      }
      return "services (" + names + ") require " + FormatBytes(v.demand) + " vs " + FormatBytes(v.capacity) +
             " available on option '" + node.hardwareOptions[option.hwOf[v.subject]].id + "'";
    }
    case ViolationKind::kBandwidth:
      return "load " + Num(v.demand) + " B/s exceeds available " + Num(v.capacity) + " B/s";
    case ViolationKind::kLinkReuse:
      return "traversed " + Num(v.demand) + " times, more than the threshold of " + Num(v.capacity);
    case ViolationKind::kSlo:
      return "end-to-end " + Num(v.demand) + " ms exceeds SLO " + Num(v.capacity) + " ms by " +
             Num(v.demand - v.capacity) + " ms";
  }
  return "";
}

SimulationMetrics Simulator::Expand(const CompactOption &option, const CompactMetrics &metrics) const {
  SimulationMetrics out;
  for (size_t p = 0; p < software_.paths.size(); ++p) out.perPath[software_.paths[p].id] = metrics.perPath[p];
  out.processingCostMonth = metrics.processingCostMonth;
  out.transmissionCostMonth = metrics.transmissionCostMonth;
  out.totalCostMonth = metrics.totalCostMonth;
  out.feasible = metrics.feasible;
  for (const auto &v : metrics.violations) {
    std::string subject;
    switch (v.kind) {
      case ViolationKind::kMemory:
        subject = infra_.nodes[v.subject].id;
        break;
      case ViolationKind::kBandwidth:
      case ViolationKind::kLinkReuse:
        subject = infra_.links[v.subject].id;
        break;
      case ViolationKind::kSlo:
        subject = software_.paths[v.subject].id;
        break;
    }
    out.violations.push_back({ToString(v.kind), subject, DescribeViolation(option, v)});
  }
  return out;
}

std::vector<RoutedFlow> Simulator::Flows(const CompactOption &option) const {
  std::vector<int> host = Hosts(option);
  std::vector<RoutedFlow> flows;
  for (size_t ci = 0; ci < connProducer_.size(); ++ci) {
    const Route &r = routing_.Get(host[connProducer_[ci]], host[connConsumer_[ci]]);
    RoutedFlow f;
    f.producer = software_.connections[ci].producer;
    f.consumer = software_.connections[ci].consumer;
    for (int n : r.nodes) f.nodePath.push_back(infra_.nodes[n].id);
    for (int l : r.links) f.links.push_back(infra_.links[l].id);
    f.dataRate = software_.connections[ci].dataRate;
    flows.push_back(std::move(f));
  }
  return flows;
}

CompactOption ToCompact(const DesignOption &option, const InfrastructureModel &infra, const SoftwareModel &software) {
  OptionSpace space(infra, software, Unrestricted(infra, software));
  return space.FromDesignOption(option);
}

RoutedFlow RouteConnection(const Connection &connection, const DesignOption &option,
                           const InfrastructureModel &infra, const SoftwareModel &software) {
  Simulator sim(infra, software);
  for (const auto &f : sim.Flows(ToCompact(option, infra, software))) {
    if (f.producer == connection.producer && f.consumer == connection.consumer) return f;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown connection " + connection.producer + " -> " + connection.consumer);
}

std::vector<Violation> CheckResources(const DesignOption &option, const InfrastructureModel &infra,
                                      const SoftwareModel &software) {
  Simulator sim(infra, software);
  CompactOption c = ToCompact(option, infra, software);
  SimulationMetrics m = sim.Expand(c, sim.Evaluate(c));
  std::vector<Violation> out;
  for (auto &v : m.violations) {
    if (v.kind == "memory" || v.kind == "bandwidth") out.push_back(std::move(v));
  }
  return out;
}

PathMetrics PathLatency(const std::string &path, const DesignOption &option, const InfrastructureModel &infra,
                        const SoftwareModel &software) {
  SimulationMetrics m = Simulate(option, infra, software);
  auto it = m.perPath.find(path);
  if (it == m.perPath.end()) throw Error(ErrorCode::kInvalidArgument, "unknown path '" + path + "'");
  return it->second;
}

CostBreakdown Costs(const DesignOption &option, const InfrastructureModel &infra, const SoftwareModel &software) {
  SimulationMetrics m = Simulate(option, infra, software);
  return {m.processingCostMonth, m.transmissionCostMonth, m.totalCostMonth};
}

SimulationMetrics Simulate(const DesignOption &option, const InfrastructureModel &infra,
                           const SoftwareModel &software) {
  Simulator sim(infra, software);
  CompactOption c = ToCompact(option, infra, software);
  return sim.Expand(c, sim.Evaluate(c));
}

bool MeetsSlos(const SimulationMetrics &metrics, const SoftwareModel &software) {
  if (!metrics.feasible) return false;
  for (const auto &p : software.paths) {
    auto it = metrics.perPath.find(p.id);
    if (it == metrics.perPath.end() || it->second.endToEndMs > p.sloLatencyMs) return false;
  }
  return true;
}

std::vector<ResultRecord> FilterSlo(const std::vector<ResultRecord> &records) {
  std::vector<ResultRecord> out;
  for (const auto &r : records) {
    if (r.metrics.sloOk) out.push_back(r);
  }
  return out;
}

std::size_t PercentileCount(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "percentile fraction must lie in (0, 1]");
  }
  // The epsilon keeps exact products such as 60 * 0.05 from flooring to 2.
  auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
  return std::max<std::size_t>(1, std::min(k, n));
}

std::vector<ResultRecord> SelectPercentile(const std::vector<ResultRecord> &records, double fraction,
                                           const OptionSpace *dedupe) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records to select from");
  std::vector<const ResultRecord *> order;
  order.reserve(records.size());
  for (const auto &r : records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ResultRecord *a, const ResultRecord *b) {
    if (a->metrics.totalCostMonth != b->metrics.totalCostMonth) {
      return a->metrics.totalCostMonth < b->metrics.totalCostMonth;
    }
    return a->index < b->index;
  });
  if (dedupe) {
    std::unordered_set<std::string> seen;
    std::vector<const ResultRecord *> unique;
    for (const ResultRecord *r : order) {
      if (seen.insert(dedupe->EffectiveKey(r->option)).second) unique.push_back(r);
    }
    order.swap(unique);
  }
  std::size_t k = PercentileCount(order.size(), fraction);
  std::vector<ResultRecord> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(*order[i]);
  return out;
}

Json ToJson(const SimulationMetrics &metrics) {
  Json perPath = Json::object();
  for (const auto &[id, pm] : metrics.perPath) {
    perPath[id] = {{"processingTimeMs", pm.processingTimeMs},
                   {"transmissionTimeMs", pm.transmissionTimeMs},
                   {"endToEndMs", pm.endToEndMs}};
  }
  Json violations = Json::array();
  for (const auto &v : metrics.violations) {
    violations.push_back({{"kind", v.kind}, {"subject", v.subject}, {"detail", v.detail}});
  }
  return {{"perPath", perPath},
          {"processingCostMonth", metrics.processingCostMonth},
          {"transmissionCostMonth", metrics.transmissionCostMonth},
          {"totalCostMonth", metrics.totalCostMonth},
          {"feasible", metrics.feasible},
          {"violations", violations}};
}

Json ToJson(const DesignOption &option) {
  return {{"placement", option.placement}, {"hardware", option.hardware}};
}

DesignOption DesignOptionFromJson(const Json &doc) {
  DesignOption out;
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidArgument, "mapping must be an object");
  auto read = [&](const char *key, std::map<std::string, std::string> &into) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    if (!it->is_object()) throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "' must be an object");
    for (const auto &[k, v] : it->items()) {
      if (!v.is_string()) throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "' values must be strings");
      into[k] = v.get<std::string>();
    }
  };
  read("placement", out.placement);
  read("hardware", out.hardware);
  return out;
}

}  // namespace fogforge
