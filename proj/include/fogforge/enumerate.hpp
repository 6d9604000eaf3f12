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

#ifndef FOGFORGE_ENUMERATE_HPP_
#define FOGFORGE_ENUMERATE_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fogforge/model.hpp"

namespace fogforge {

/*
 * kUsedNodes: hardware is chosen only for nodes hosting a service.
 * kAllNodes: every node carries a hardware choice; unused choices do not
 * affect metrics but multiply the space uniformly.
 */
enum class HardwareScope { kUsedNodes, kAllNodes };

const char *ToString(HardwareScope scope);
HardwareScope ParseHardwareScope(const std::string &s);

/* service id -> allowed node ids (sorted). */
using CandidateSets = std::map<std::string, std::vector<std::string>>;

struct DesignOption {
  std::map<std::string, std::string> placement;  // service -> node
  std::map<std::string, std::string> hardware;  // node -> option id
};

/* Index form. nodeOf is per service (id order), hwOf per node (-1 = none). */
struct CompactOption {
  std::vector<int> nodeOf;
  std::vector<int> hwOf;
};

CandidateSets Unrestricted(const InfrastructureModel &infra, const SoftwareModel &software);

class OptionSpace {
 public:
  OptionSpace(const InfrastructureModel &infra, const SoftwareModel &software,
              const CandidateSets &candidates, HardwareScope scope = HardwareScope::kUsedNodes,
              bool withHardware = true);

  const InfrastructureModel &infra() const { return *infra_; }
  const SoftwareModel &software() const { return *software_; }
  HardwareScope scope() const { return scope_; }
  bool withHardware() const { return withHardware_; }
  /* Component indices of the services, in id order. */
  const std::vector<int> &services() const { return services_; }
  /* Per service, allowed node indices in id order. */
  const std::vector<std::vector<int>> &candidates() const { return candidates_; }

  std::uint64_t PlacementCount() const;
  std::uint64_t OptionCount() const;
  std::uint64_t HardwareCombos(const std::vector<int> &nodeOf) const;
  void DecodePlacement(std::uint64_t placement, std::vector<int> &nodeOf) const;
  /* Global enumeration index of the first option of every placement, plus the total. */
  std::vector<std::uint64_t> PlacementOffsets() const;
  /* Option at an enumeration index; offsets from PlacementOffsets(). Throws kInvalidArgument. */
  CompactOption Decode(std::uint64_t index, const std::vector<std::uint64_t> &offsets) const;

  DesignOption ToDesignOption(const CompactOption &option) const;
  /* Throws kInvalidArgument naming unknown or missing entries. */
  CompactOption FromDesignOption(const DesignOption &option) const;
  /* Placement plus hardware of used nodes; equal keys mean equal metrics. */
  std::string EffectiveKey(const CompactOption &option) const;
  std::vector<int> UsedNodes(const std::vector<int> &nodeOf) const;

 private:
  friend class OptionStream;
  std::vector<int> HardwareNodes(const std::vector<int> &nodeOf) const;

  std::shared_ptr<const InfrastructureModel> infra_;
  std::shared_ptr<const SoftwareModel> software_;
  HardwareScope scope_;
  bool withHardware_;
  std::vector<int> services_;
  std::vector<std::vector<int>> candidates_;
};

/*
 * Lazy lexicographic stream: service placements (first service slowest), then
 * hardware option ids of the hardware-carrying nodes in id order.
 */
class OptionStream {
 public:
  explicit OptionStream(std::shared_ptr<const OptionSpace> space, std::uint64_t placementBegin = 0,
                        std::uint64_t placementEnd = std::numeric_limits<std::uint64_t>::max(),
                        std::uint64_t firstIndex = 0);

  bool Next(CompactOption &out);
  /* Enumeration index of the option most recently returned by Next. */
  std::uint64_t index() const { return index_ - 1; }
  std::uint64_t placement() const { return placement_; }

 private:
  bool LoadPlacement();

  std::shared_ptr<const OptionSpace> space_;
  std::uint64_t placement_;
  std::uint64_t placementEnd_;
  std::uint64_t index_;
  bool placementLoaded_ = false;
  bool exhausted_ = false;
  std::vector<int> nodeOf_;
  std::vector<int> hwNodes_;
  std::vector<int> hwDigits_;
};

OptionStream EnumerateOptions(const InfrastructureModel &infra, const SoftwareModel &software,
                              const CandidateSets &candidates,
                              HardwareScope scope = HardwareScope::kUsedNodes, bool withHardware = true);

std::uint64_t CountOptions(const InfrastructureModel &infra, const SoftwareModel &software,
                           const CandidateSets &candidates, HardwareScope scope = HardwareScope::kUsedNodes,
                           bool withHardware = true);

}  // namespace fogforge

#endif  // FOGFORGE_ENUMERATE_HPP_
