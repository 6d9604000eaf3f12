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

#ifndef FOGFORGE_MODEL_HPP_
#define FOGFORGE_MODEL_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fogforge {

using Json = nlohmann::json;

struct HardwareOption {
  std::string id;
  double rpi = 1.0;
  double memoryBytes = 0.0;
  double priceMonth = 0.0;
};

enum class LatencyClass { kLow, kMedium, kHigh };

const char *ToString(LatencyClass c);

struct InfraNode {
  std::string id;
  std::string name;
  std::string tier;
  std::vector<HardwareOption> hardwareOptions;
  std::vector<std::string> pinned;
};

struct NetworkLink {
  std::string id;
  std::string a;
  std::string b;
  double latencyMs = 0.0;
  double bandwidthBytesPerSec = 0.0;
  double bandwidthPrice = 0.0;  // currency per (byte/s) per month
  LatencyClass latencyClass = LatencyClass::kLow;
  bool latencyClassDeclared = false;
};

/* Defaults used when a link does not declare its latency class. */
struct LatencyThresholds {
  double mediumFromMs = 5.0;
  double highFromMs = 50.0;

  LatencyClass Classify(double latencyMs) const;
};

struct InfrastructureModel {
  std::vector<std::string> tierOrder;
  std::vector<InfraNode> nodes;  // sorted by id
  std::vector<NetworkLink> links;  // sorted by id

  int NodeIndex(std::string_view id) const;
  int LinkIndex(std::string_view id) const;
  int TierRank(std::string_view tier) const;
  int NodeTierRank(int node) const;
  /* Adjacency as (neighbour node, link index), neighbours in id order. */
  std::vector<std::vector<std::pair<int, int>>> Adjacency() const;
};

enum class ComponentKind { kSource, kService, kSink };
enum class ServiceRole { kNone, kEventProcessor, kPreprocessor, kHeavyAnalytics };
enum class PathClass { kEventProcessing, kDataAnalytics };

const char *ToString(ComponentKind k);
const char *ToString(ServiceRole r);
const char *ToString(PathClass c);

struct SoftwareComponent {
  std::string id;
  ComponentKind kind = ComponentKind::kService;
  std::optional<double> outputRate;  // bytes/s, sources
  double outputRatio = 0.0;
  double refDelayMs = 0.0;
  double requiredMemoryBytes = 0.0;
  ServiceRole role = ServiceRole::kNone;
  std::string pinnedNode;
};

struct Connection {
  std::string producer;
  std::string consumer;
  double dataRate = 0.0;  // bytes/s, filled by DeriveRates
};

struct ApplicationPath {
  std::string id;
  PathClass cls = PathClass::kEventProcessing;
  std::vector<std::string> members;  // sorted
  double sloLatencyMs = 0.0;
};

struct SoftwareModel {
  std::vector<SoftwareComponent> components;  // sorted by id
  std::vector<Connection> connections;  // sorted by (producer, consumer)
  std::vector<ApplicationPath> paths;  // sorted by id

  int ComponentIndex(std::string_view id) const;
  int PathIndex(std::string_view id) const;
  std::vector<int> ServiceIndices() const;
  /* Component index chains from each source to the sink of a path. */
  std::vector<std::vector<int>> PathChains(int path) const;
  int PathSink(int path) const;
  std::vector<int> PathSources(int path) const;
};

InfrastructureModel ParseInfrastructure(const Json &doc,
                                        const LatencyThresholds &thresholds = {});
SoftwareModel ParseSoftware(const Json &doc);

Json ToJson(const InfrastructureModel &infra);
Json ToJson(const SoftwareModel &software);

void Validate(const InfrastructureModel &infra);
void Validate(const SoftwareModel &software);
void ValidatePair(const InfrastructureModel &infra, const SoftwareModel &software);

std::pair<InfrastructureModel, SoftwareModel> LoadModels(
    std::string_view infraDocument, std::string_view softwareDocument,
    const LatencyThresholds &thresholds = {});

SoftwareModel DeriveRates(SoftwareModel software);

/* "250 MB", "1.5 kB", "12 B" using decimal units. */
std::string FormatBytes(double bytes);

}  // namespace fogforge

#endif  // FOGFORGE_MODEL_HPP_
