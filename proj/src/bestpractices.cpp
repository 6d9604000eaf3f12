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

#include "fogforge/bestpractices.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "fogforge/error.hpp"
#include "fogforge/simulator.hpp"

namespace fogforge {

namespace {

[[noreturn]] void SchemaFail(const std::string &what) { throw Error(ErrorCode::kSchema, "rules: " + what); }

std::vector<std::string> Strings(const Json &v, const std::string &where) {
  if (!v.is_array()) SchemaFail(where + " must be an array of node ids");
  std::vector<std::string> out;
  for (const auto &s : v) {
    if (!s.is_string()) SchemaFail(where + " must be an array of node ids");
    out.push_back(s.get<std::string>());
  }
  return out;
}

/* BFS hop distances; -1 for unreachable. High-latency links are skipped when asked. */
std::vector<int> Hops(const InfrastructureModel &infra, const std::vector<std::vector<std::pair<int, int>>> &adj,
                      int from, bool avoidHigh) {
  std::vector<int> dist(infra.nodes.size(), -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    int at = queue.front();
    queue.pop_front();
    for (auto [next, link] : adj[at]) {
      if (avoidHigh && infra.links[link].latencyClass == LatencyClass::kHigh) continue;
      if (dist[next] >= 0) continue;
      dist[next] = dist[at] + 1;
      queue.push_back(next);
    }
  }
  return dist;
}

struct Verdict {
  bool kept = true;
  std::string rule;
  std::string detail;
};

void Exclude(Verdict &v, const char *rule, std::string detail) {
  if (!v.kept) return;
  v.kept = false;
  v.rule = rule;
  v.detail = std::move(detail);
}

/* Per-node verdict for one service on one path, before overrides. */
std::vector<Verdict> PathVerdicts(int service, int path, const InfrastructureModel &infra,
                                  const SoftwareModel &software, const RuleSet &rules) {
  const size_t n = infra.nodes.size();
  const auto &p = software.paths[path];
  const auto adj = infra.Adjacency();
  std::vector<Verdict> out(n);

  // Sources whose chains pass through the service.
  std::vector<int> sourceNodes;
  std::vector<int> downstreamHeavy;
  for (const auto &chain : software.PathChains(path)) {
    auto pos = std::find(chain.begin(), chain.end(), service);
    if (pos == chain.end()) continue;
    int src = infra.NodeIndex(software.components[chain.front()].pinnedNode);
    if (std::find(sourceNodes.begin(), sourceNodes.end(), src) == sourceNodes.end()) sourceNodes.push_back(src);
    for (auto it = pos + 1; it != chain.end(); ++it) {
      if (software.components[*it].role == ServiceRole::kHeavyAnalytics &&
          std::find(downstreamHeavy.begin(), downstreamHeavy.end(), *it) == downstreamHeavy.end()) {
        downstreamHeavy.push_back(*it);
      }
    }
  }
  int sink = infra.NodeIndex(software.components[software.PathSink(path)].pinnedNode);

  if (p.cls == PathClass::kEventProcessing) {
    if (rules.shortestPath) {
      std::vector<char> onPath(n, 0);
      auto toSink = Hops(infra, adj, sink, false);
      for (int s : sourceNodes) {
        auto fromSource = Hops(infra, adj, s, false);
        if (fromSource[sink] < 0) continue;
        for (size_t v = 0; v < n; ++v) {
          if (fromSource[v] >= 0 && toSink[v] >= 0 && fromSource[v] + toSink[v] == fromSource[sink]) onPath[v] = 1;
        }
      }
      // Extend by strictly cloud-ward walks.
      std::vector<char> reach = onPath;
      std::deque<int> queue;
      for (size_t v = 0; v < n; ++v) {
        if (onPath[v]) queue.push_back(static_cast<int>(v));
      }
      while (!queue.empty()) {
        int at = queue.front();
        queue.pop_front();
        for (auto [next, link] : adj[at]) {
          (void)link;
          if (reach[next] || infra.NodeTierRank(next) <= infra.NodeTierRank(at)) continue;
          reach[next] = 1;
          queue.push_back(next);
        }
      }
      for (size_t v = 0; v < n; ++v) {
        if (!reach[v]) {
          Exclude(out[v], "shortest-path",
                  "not on a minimum-hop route from source to sink of path '" + p.id +
                      "' nor cloud-ward of one");
        }
      }
    }
  } else if (rules.orderingConstraints) {
    // Boundary: highest tier reachable from the sources without a high-latency link.
    int boundary = -1;
    for (int s : sourceNodes) {
      auto d = Hops(infra, adj, s, true);
      for (size_t v = 0; v < n; ++v) {
        if (d[v] >= 0) boundary = std::max(boundary, infra.NodeTierRank(static_cast<int>(v)));
      }
    }
    const auto &tierName = [&](int rank) { return rank >= 0 ? infra.tierOrder[rank] : std::string("?"); };
    ServiceRole role = software.components[service].role;
    if (role == ServiceRole::kHeavyAnalytics) {
      for (size_t v = 0; v < n; ++v) {
        if (infra.NodeTierRank(static_cast<int>(v)) < boundary) {
          Exclude(out[v], "cloud-ward-analytics",
                  "heavy analytics on path '" + p.id + "' must sit at tier " + tierName(boundary) + " or above");
        }
      }
    } else if (role == ServiceRole::kPreprocessor) {
      int limit = boundary;
      if (!downstreamHeavy.empty()) {
        limit = static_cast<int>(infra.tierOrder.size());
        for (size_t v = 0; v < n; ++v) {
          if (infra.NodeTierRank(static_cast<int>(v)) >= boundary) {
            limit = std::min(limit, infra.NodeTierRank(static_cast<int>(v)));
          }
        }
      }
      for (size_t v = 0; v < n; ++v) {
        if (infra.NodeTierRank(static_cast<int>(v)) > limit) {
          Exclude(out[v], "edge-preprocessing",
                  "preprocessing on path '" + p.id + "' must sit at tier " + tierName(limit) + " or below");
        }
      }
    }
  }

  auto forbid = rules.forbidHighLatencyLinks.find(p.id);
  if (forbid != rules.forbidHighLatencyLinks.end() && forbid->second) {
    auto toSink = Hops(infra, adj, sink, true);
    for (int s : sourceNodes) {
      auto fromSource = Hops(infra, adj, s, true);
      for (size_t v = 0; v < n; ++v) {
        if (fromSource[v] < 0 || toSink[v] < 0) {
          Exclude(out[v], "high-latency-link",
                  "every route from '" + infra.nodes[s].id + "' through it to '" + infra.nodes[sink].id +
                      "' crosses a high-latency link");
        }
      }
    }
  }

  auto ceiling = rules.zoneCeiling.find(p.id);
  if (ceiling != rules.zoneCeiling.end()) {
    int limit = infra.TierRank(ceiling->second);
    for (size_t v = 0; v < n; ++v) {
      if (infra.NodeTierRank(static_cast<int>(v)) > limit) {
        Exclude(out[v], "zone-ceiling", "above the " + ceiling->second + " ceiling of path '" + p.id + "'");
      }
    }
  }
  return out;
}

/* Verdicts over all paths of the service, then overrides. */
std::vector<Verdict> ServiceVerdicts(int service, const std::vector<int> &paths, const InfrastructureModel &infra,
                                     const SoftwareModel &software, const RuleSet &rules) {
  std::vector<Verdict> out(infra.nodes.size());
  for (int p : paths) {
    auto v = PathVerdicts(service, p, infra, software, rules);
    for (size_t i = 0; i < out.size(); ++i) {
      if (out[i].kept && !v[i].kept) out[i] = v[i];
    }
  }
  auto ov = rules.overrides.find(software.components[service].id);
  if (ov != rules.overrides.end()) {
    if (ov->second.allow) {
      const auto &allow = *ov->second.allow;
      for (size_t i = 0; i < out.size(); ++i) {
        if (std::find(allow.begin(), allow.end(), infra.nodes[i].id) != allow.end()) {
          out[i] = Verdict{};
        } else {
          out[i] = Verdict{false, "override-allow", "not in the allow list"};
        }
      }
    }
    for (const auto &d : ov->second.deny) {
      int i = infra.NodeIndex(d);
      if (i >= 0) out[i] = Verdict{false, "override-deny", "denied by designer override"};
    }
  }
  return out;
}

std::vector<int> PathsOf(int service, const SoftwareModel &software) {
  std::vector<int> out;
  for (size_t p = 0; p < software.paths.size(); ++p) {
    const auto &m = software.paths[p].members;
    if (std::binary_search(m.begin(), m.end(), software.components[service].id)) out.push_back(static_cast<int>(p));
  }
  return out;
}

}  // namespace

RuleSet ParseRules(const Json &doc) {
  RuleSet r;
  if (doc.is_null()) return r;
  if (!doc.is_object()) SchemaFail("document must be an object");
  for (const auto &[key, v] : doc.items()) {
    if (key == "shortestPath" || key == "orderingConstraints") {
      if (!v.is_boolean()) SchemaFail("'" + key + "' must be a boolean");
      (key == "shortestPath" ? r.shortestPath : r.orderingConstraints) = v.get<bool>();
    } else if (key == "zoneCeiling") {
      if (!v.is_object()) SchemaFail("'zoneCeiling' must map path ids to tiers");
      for (const auto &[path, tier] : v.items()) {
        if (!tier.is_string()) SchemaFail("zoneCeiling." + path + " must be a tier label");
        r.zoneCeiling[path] = tier.get<std::string>();
      }
    } else if (key == "forbidHighLatencyLinks") {
      if (!v.is_object()) SchemaFail("'forbidHighLatencyLinks' must map path ids to booleans");
      for (const auto &[path, flag] : v.items()) {
        if (!flag.is_boolean()) SchemaFail("forbidHighLatencyLinks." + path + " must be a boolean");
        r.forbidHighLatencyLinks[path] = flag.get<bool>();
      }
    } else if (key == "linkReuse") {
      if (!v.is_object()) SchemaFail("'linkReuse' must be an object");
      for (const auto &[k, x] : v.items()) {
        if (k == "enabled" && x.is_boolean()) {
          r.linkReuse.enabled = x.get<bool>();
        } else if (k == "directed" && x.is_boolean()) {
          r.linkReuse.directed = x.get<bool>();
        } else if (k == "threshold" && x.is_number_integer()) {
          r.linkReuse.threshold = x.get<int>();
        } else {
          SchemaFail("unexpected or mistyped field linkReuse." + k);
        }
      }
    } else if (key == "linkReuseThreshold") {
      if (!v.is_number_integer()) SchemaFail("'linkReuseThreshold' must be an integer");
      r.linkReuse.threshold = v.get<int>();
    } else if (key == "overrides") {
      if (!v.is_object()) SchemaFail("'overrides' must map service ids to {allow, deny}");
      for (const auto &[svc, o] : v.items()) {
        if (!o.is_object()) SchemaFail("overrides." + svc + " must be an object");
        Override ov;
        for (const auto &[k, x] : o.items()) {
          if (k == "allow") {
            ov.allow = Strings(x, "overrides." + svc + ".allow");
          } else if (k == "deny") {
            ov.deny = Strings(x, "overrides." + svc + ".deny");
          } else {
            SchemaFail("unexpected field overrides." + svc + "." + k);
          }
        }
        r.overrides[svc] = std::move(ov);
      }
    } else {
      SchemaFail("unexpected field '" + key + "'");
    }
  }
  return r;
}

Json ToJson(const RuleSet &rules) {
  Json overrides = Json::object();
  for (const auto &[svc, o] : rules.overrides) {
    Json j = {{"deny", o.deny}};
    if (o.allow) j["allow"] = *o.allow;
    overrides[svc] = j;
  }
  return {{"shortestPath", rules.shortestPath},
          {"orderingConstraints", rules.orderingConstraints},
          {"zoneCeiling", rules.zoneCeiling},
          {"forbidHighLatencyLinks", rules.forbidHighLatencyLinks},
          {"linkReuse",
           {{"enabled", rules.linkReuse.enabled},
            {"threshold", rules.linkReuse.threshold},
            {"directed", rules.linkReuse.directed}}},
          {"overrides", overrides}};
}

void ValidateRules(const RuleSet &rules, const InfrastructureModel &infra, const SoftwareModel &software) {
  auto invalid = [](const std::string &invariant, const std::string &detail) {
    throw Error(ErrorCode::kValidation, "invariant '" + invariant + "' violated: " + detail);
  };
  if (rules.linkReuse.threshold < 1) {
    invalid("linkReuseThreshold >= 1", "got " + std::to_string(rules.linkReuse.threshold));
  }
  for (const auto &[path, tier] : rules.zoneCeiling) {
    if (software.PathIndex(path) < 0) invalid("rules reference existing paths", "zoneCeiling path '" + path + "'");
    if (infra.TierRank(tier) < 0) invalid("zoneCeiling tiers appear in the tier order", "tier '" + tier + "'");
  }
  for (const auto &[path, flag] : rules.forbidHighLatencyLinks) {
    (void)flag;
    if (software.PathIndex(path) < 0) {
      invalid("rules reference existing paths", "forbidHighLatencyLinks path '" + path + "'");
    }
  }
  for (const auto &[svc, o] : rules.overrides) {
    int c = software.ComponentIndex(svc);
    if (c < 0 || software.components[c].kind != ComponentKind::kService) {
      invalid("overrides reference existing services", "service '" + svc + "'");
    }
    std::vector<std::string> nodes = o.deny;
    if (o.allow) nodes.insert(nodes.end(), o.allow->begin(), o.allow->end());
    for (const auto &n : nodes) {
      if (infra.NodeIndex(n) < 0) invalid("overrides reference existing nodes", "node '" + n + "' in " + svc);
    }
  }
}

std::vector<std::string> CandidateNodes(const std::string &service, const std::string &path,
                                        const InfrastructureModel &infra, const SoftwareModel &software,
                                        const RuleSet &rules) {
  int c = software.ComponentIndex(service);
  int p = software.PathIndex(path);
  if (c < 0 || software.components[c].kind != ComponentKind::kService) {
    throw Error(ErrorCode::kInvalidArgument, "unknown service '" + service + "'");
  }
  if (p < 0) throw Error(ErrorCode::kInvalidArgument, "unknown path '" + path + "'");
  const auto &m = software.paths[p].members;
  if (!std::binary_search(m.begin(), m.end(), service)) {
    throw Error(ErrorCode::kInvalidArgument, "service '" + service + "' is not on path '" + path + "'");
  }
  auto verdicts = ServiceVerdicts(c, {p}, infra, software, rules);
  std::vector<std::string> out;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i].kept) out.push_back(infra.nodes[i].id);
  }
  return out;
}

PruneResult ApplyBestPractices(const InfrastructureModel &infra, const SoftwareModel &software,
                               const RuleSet &rules) {
  ValidateRules(rules, infra, software);
  PruneResult result;
  std::vector<std::string> empty;
  for (int s : software.ServiceIndices()) {
    const std::string &id = software.components[s].id;
    auto verdicts = ServiceVerdicts(s, PathsOf(s, software), infra, software, rules);
    auto &set = result.candidates[id];
    for (size_t i = 0; i < verdicts.size(); ++i) {
      if (verdicts[i].kept) {
        set.push_back(infra.nodes[i].id);
      } else {
        result.trace.push_back({id, infra.nodes[i].id, verdicts[i].rule, verdicts[i].detail});
      }
    }
    if (set.empty()) empty.push_back(id);
  }
  if (!empty.empty()) {
    std::string list;
    for (const auto &e : empty) list += (list.empty() ? "" : ", ") + e;
    throw Error(ErrorCode::kEmptyCandidates, "no candidate nodes left for: " + list);
  }
  return result;
}

std::string FormatTrace(const PruneResult &result) {
  std::string out;
  for (const auto &[svc, nodes] : result.candidates) {
    out += svc + ": {";
    for (size_t i = 0; i < nodes.size(); ++i) out += (i ? ", " : "") + nodes[i];
    out += "}\n";
  }
  for (const auto &e : result.trace) {
    out += "exclude " + e.service + " @ " + e.node + " [" + e.rule + "] " + e.detail + "\n";
  }
  return out;
}

bool LinkReuseOk(const DesignOption &option, const InfrastructureModel &infra, const SoftwareModel &software,
                 const LinkReuseRule &rule) {
  LinkReuseRule on = rule;
  on.enabled = true;
  Simulator sim(infra, software, on);
  CompactMetrics m = sim.Evaluate(ToCompact(option, infra, software));
  return std::none_of(m.violations.begin(), m.violations.end(),
                      [](const CompactViolation &v) { return v.kind == ViolationKind::kLinkReuse; });
}

}  // namespace fogforge
