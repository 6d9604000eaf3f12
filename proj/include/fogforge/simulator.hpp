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

#ifndef FOGFORGE_SIMULATOR_HPP_
#define FOGFORGE_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogforge/bestpractices.hpp"
#include "fogforge/enumerate.hpp"
#include "fogforge/model.hpp"

namespace fogforge {

struct Route {
  std::vector<int> nodes;
  std::vector<int> links;
  double price = 0.0;
  double latencyMs = 0.0;
};

/*
 * All-pairs cheapest routes by summed bandwidth price, ties broken by fewer
 * hops and then by the lexicographic sequence of node ids.
 */
class RoutingTable {
 public:
  explicit RoutingTable(const InfrastructureModel &infra);

  /* Throws kUnreachable. */
  const Route &Get(int from, int to) const;
  bool Reachable(int from, int to) const;

 private:
  const InfrastructureModel *infra_;
  size_t n_;
  std::vector<std::optional<Route>> routes_;
};

/* Price comparison shared by routing and its tests. */
bool PriceLess(double a, double b);
bool PriceEqual(double a, double b);

struct RoutedFlow {
  std::string producer;
  std::string consumer;
  std::vector<std::string> nodePath;
  std::vector<std::string> links;
  double dataRate = 0.0;
};

struct PathMetrics {
  double processingTimeMs = 0.0;
  double transmissionTimeMs = 0.0;
  double endToEndMs = 0.0;
};

enum class ViolationKind : std::uint8_t { kMemory, kBandwidth, kSlo, kLinkReuse };

const char *ToString(ViolationKind kind);

struct Violation {
  std::string kind;
  std::string subject;
  std::string detail;
};

struct SimulationMetrics {
  std::map<std::string, PathMetrics> perPath;
  double processingCostMonth = 0.0;
  double transmissionCostMonth = 0.0;
  double totalCostMonth = 0.0;
  bool feasible = true;
  std::vector<Violation> violations;
};

struct CostBreakdown {
  double processingCostMonth = 0.0;
  double transmissionCostMonth = 0.0;
  double totalCostMonth = 0.0;
};

/* Index-based violation; subject is a node, link or path index. */
struct CompactViolation {
  ViolationKind kind;
  int subject;
  double demand;
  double capacity;
};

struct CompactMetrics {
  std::vector<PathMetrics> perPath;  // software path order
  double processingCostMonth = 0.0;
  double transmissionCostMonth = 0.0;
  double totalCostMonth = 0.0;
  bool feasible = true;
  bool sloOk = true;
  std::vector<CompactViolation> violations;
};

/* Precomputed evaluator shared by the batch pipeline, the API and simulate(). */
class Simulator {
 public:
  Simulator(const InfrastructureModel &infra, const SoftwareModel &software, LinkReuseRule linkReuse = {});
  Simulator(const Simulator &) = delete;
  Simulator &operator=(const Simulator &) = delete;

  const InfrastructureModel &infra() const { return infra_; }
  const SoftwareModel &software() const { return software_; }
  const RoutingTable &routing() const { return routing_; }
  /* Component indices of services, in id order (matches CompactOption::nodeOf). */
  const std::vector<int> &services() const { return services_; }

  CompactMetrics Evaluate(const CompactOption &option) const;
  SimulationMetrics Expand(const CompactOption &option, const CompactMetrics &metrics) const;
  /* Host node per component for the option. */
  std::vector<int> Hosts(const CompactOption &option) const;
  std::vector<RoutedFlow> Flows(const CompactOption &option) const;
  std::string DescribeViolation(const CompactOption &option, const CompactViolation &v) const;

 private:
  struct Chain {
    std::vector<int> serviceComponents;
    std::vector<int> connections;
  };

  InfrastructureModel infra_;
  SoftwareModel software_;
  LinkReuseRule linkReuse_;
  RoutingTable routing_;
  std::vector<int> services_;
  std::vector<int> serviceSlot_;  // component -> position in services_ or -1
  std::vector<int> connProducer_;
  std::vector<int> connConsumer_;
  std::vector<std::vector<Chain>> chains_;  // per path
};

CompactOption ToCompact(const DesignOption &option, const InfrastructureModel &infra, const SoftwareModel &software);

RoutedFlow RouteConnection(const Connection &connection, const DesignOption &option,
                           const InfrastructureModel &infra, const SoftwareModel &software);
std::vector<Violation> CheckResources(const DesignOption &option, const InfrastructureModel &infra,
                                      const SoftwareModel &software);
PathMetrics PathLatency(const std::string &path, const DesignOption &option, const InfrastructureModel &infra,
                        const SoftwareModel &software);
CostBreakdown Costs(const DesignOption &option, const InfrastructureModel &infra, const SoftwareModel &software);
SimulationMetrics Simulate(const DesignOption &option, const InfrastructureModel &infra,
                           const SoftwareModel &software);

bool MeetsSlos(const SimulationMetrics &metrics, const SoftwareModel &software);

/* A simulated option with its enumeration index. */
struct ResultRecord {
  std::uint64_t index = 0;
  CompactOption option;
  CompactMetrics metrics;
};

std::vector<ResultRecord> FilterSlo(const std::vector<ResultRecord> &records);

/* max(1, floor(n * fraction)). */
std::size_t PercentileCount(std::size_t n, double fraction);

/*
 * Ascending cost, ties by enumeration index. When dedupeKey is given, only
 * the first record per key (in cost order) is kept before counting.
 */
std::vector<ResultRecord> SelectPercentile(const std::vector<ResultRecord> &records, double fraction,
                                           const OptionSpace *dedupe = nullptr);

Json ToJson(const SimulationMetrics &metrics);
Json ToJson(const DesignOption &option);
DesignOption DesignOptionFromJson(const Json &doc);

}  // namespace fogforge

#endif  // FOGFORGE_SIMULATOR_HPP_
