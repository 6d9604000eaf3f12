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

#include "fogforge/enumerate.hpp"

#include <algorithm>

#include "fogforge/error.hpp"

namespace fogforge {

namespace {

using u128 = unsigned __int128;

std::uint64_t Narrow(u128 v) {
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "option count exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

const char *ToString(HardwareScope scope) {
  return scope == HardwareScope::kAllNodes ? "all-nodes" : "used-nodes";
}

HardwareScope ParseHardwareScope(const std::string &s) {
  if (s == "used-nodes") return HardwareScope::kUsedNodes;
  if (s == "all-nodes") return HardwareScope::kAllNodes;
  throw Error(ErrorCode::kSchema, "hardwareScope must be 'used-nodes' or 'all-nodes', got '" + s + "'");
}

CandidateSets Unrestricted(const InfrastructureModel &infra, const SoftwareModel &software) {
  std::vector<std::string> all;
  for (const auto &n : infra.nodes) all.push_back(n.id);
  CandidateSets sets;
  for (int s : software.ServiceIndices()) sets[software.components[s].id] = all;
  return sets;
}

OptionSpace::OptionSpace(const InfrastructureModel &infra, const SoftwareModel &software,
                         const CandidateSets &candidates, HardwareScope scope, bool withHardware)
    : infra_(std::make_shared<InfrastructureModel>(infra)),
      software_(std::make_shared<SoftwareModel>(software)),
      scope_(scope),
      withHardware_(withHardware) {
  services_ = software_->ServiceIndices();
  for (int s : services_) {
    const auto &id = software_->components[s].id;
    auto it = candidates.find(id);
    if (it == candidates.end()) {
      throw Error(ErrorCode::kInvalidArgument, "candidate sets do not cover service '" + id + "'");
    }
    std::vector<int> nodes;
    for (const auto &n : it->second) {
      int idx = infra_->NodeIndex(n);
      if (idx < 0) throw Error(ErrorCode::kInvalidArgument, "candidate node '" + n + "' does not exist");
      nodes.push_back(idx);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    candidates_.push_back(std::move(nodes));
  }
}

std::uint64_t OptionSpace::PlacementCount() const {
  u128 total = 1;
  for (const auto &c : candidates_) total *= c.size();
  return Narrow(total);
}

std::vector<int> OptionSpace::UsedNodes(const std::vector<int> &nodeOf) const {
  std::vector<int> used(nodeOf.begin(), nodeOf.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return used;
}

std::vector<int> OptionSpace::HardwareNodes(const std::vector<int> &nodeOf) const {
  if (withHardware_ && scope_ == HardwareScope::kAllNodes) {
    std::vector<int> all(infra_->nodes.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
  }
  return UsedNodes(nodeOf);
}

std::uint64_t OptionSpace::HardwareCombos(const std::vector<int> &nodeOf) const {
  if (!withHardware_) return 1;
  u128 total = 1;
  for (int n : HardwareNodes(nodeOf)) total *= infra_->nodes[n].hardwareOptions.size();
  return Narrow(total);
}

std::uint64_t OptionSpace::OptionCount() const {
  for (const auto &c : candidates_) {
    if (c.empty()) return 0;
  }
  if (!withHardware_) return PlacementCount();
  if (scope_ == HardwareScope::kAllNodes) {
    u128 total = PlacementCount();
    for (const auto &n : infra_->nodes) total *= n.hardwareOptions.size();
    return Narrow(total);
  }
  // Group placements by their used-node set; each group contributes
  // count x product of option counts over the set.
  std::map<std::vector<int>, u128> groups{{{}, 1}};
  for (const auto &cands : candidates_) {
    std::map<std::vector<int>, u128> next;
    for (const auto &[used, count] : groups) {
      for (int n : cands) {
        std::vector<int> grown = used;
        auto pos = std::lower_bound(grown.begin(), grown.end(), n);
        if (pos == grown.end() || *pos != n) grown.insert(pos, n);
        next[grown] += count;
      }
    }
    groups.swap(next);
  }
  u128 total = 0;
  for (const auto &[used, count] : groups) {
    u128 mult = 1;
    for (int n : used) mult *= infra_->nodes[n].hardwareOptions.size();
    total += count * mult;
  }
  return Narrow(total);
}

void OptionSpace::DecodePlacement(std::uint64_t placement, std::vector<int> &nodeOf) const {
  nodeOf.assign(candidates_.size(), -1);
  for (size_t i = candidates_.size(); i-- > 0;) {
    std::uint64_t radix = candidates_[i].size();
    nodeOf[i] = candidates_[i][placement % radix];
    placement /= radix;
  }
}

std::vector<std::uint64_t> OptionSpace::PlacementOffsets() const {
  std::uint64_t count = PlacementCount();
  std::vector<std::uint64_t> offsets(count + 1, 0);
  std::vector<int> nodeOf;
  for (std::uint64_t p = 0; p < count; ++p) {
    DecodePlacement(p, nodeOf);
    offsets[p + 1] = offsets[p] + HardwareCombos(nodeOf);
  }
  return offsets;
}

CompactOption OptionSpace::Decode(std::uint64_t index, const std::vector<std::uint64_t> &offsets) const {
  if (offsets.empty() || index >= offsets.back()) {
    throw Error(ErrorCode::kInvalidArgument, "option index " + std::to_string(index) + " is out of range");
  }
  auto it = std::upper_bound(offsets.begin(), offsets.end(), index);
  std::uint64_t placement = static_cast<std::uint64_t>(it - offsets.begin()) - 1;
  CompactOption out;
  DecodePlacement(placement, out.nodeOf);
  out.hwOf.assign(infra_->nodes.size(), -1);
  std::vector<int> nodes = HardwareNodes(out.nodeOf);
  std::uint64_t rest = index - offsets[placement];
  for (size_t i = nodes.size(); i-- > 0;) {
    std::uint64_t radix = withHardware_ ? infra_->nodes[nodes[i]].hardwareOptions.size() : 1;
    out.hwOf[nodes[i]] = static_cast<int>(rest % radix);
    rest /= radix;
  }
  return out;
}

DesignOption OptionSpace::ToDesignOption(const CompactOption &option) const {
  DesignOption out;
  for (size_t i = 0; i < services_.size(); ++i) {
    out.placement[software_->components[services_[i]].id] = infra_->nodes[option.nodeOf[i]].id;
  }
  for (size_t n = 0; n < option.hwOf.size(); ++n) {
    if (option.hwOf[n] >= 0) {
      out.hardware[infra_->nodes[n].id] = infra_->nodes[n].hardwareOptions[option.hwOf[n]].id;
    }
  }
  return out;
}

CompactOption OptionSpace::FromDesignOption(const DesignOption &option) const {
  CompactOption out;
  out.nodeOf.assign(services_.size(), -1);
  out.hwOf.assign(infra_->nodes.size(), -1);
  std::vector<std::string> problems;
  for (const auto &[svc, node] : option.placement) {
    int c = software_->ComponentIndex(svc);
    if (c < 0 || software_->components[c].kind != ComponentKind::kService) {
      problems.push_back("unknown service '" + svc + "'");
      continue;
    }
    int n = infra_->NodeIndex(node);
    if (n < 0) {
      problems.push_back("service '" + svc + "' placed on unknown node '" + node + "'");
      continue;
    }
    auto pos = std::find(services_.begin(), services_.end(), c) - services_.begin();
    out.nodeOf[pos] = n;
  }
  std::vector<std::string> unplaced;
  for (size_t i = 0; i < services_.size(); ++i) {
    if (out.nodeOf[i] < 0 && !option.placement.count(software_->components[services_[i]].id)) {
      unplaced.push_back(software_->components[services_[i]].id);
    }
  }
  if (!unplaced.empty()) {
    std::string list;
    for (const auto &u : unplaced) list += (list.empty() ? "" : ", ") + u;
    problems.push_back("unplaced services: " + list);
  }
  for (const auto &[node, opt] : option.hardware) {
    int n = infra_->NodeIndex(node);
    if (n < 0) {
      problems.push_back("hardware for unknown node '" + node + "'");
      continue;
    }
    const auto &opts = infra_->nodes[n].hardwareOptions;
    auto it = std::find_if(opts.begin(), opts.end(), [&](const HardwareOption &o) { return o.id == opt; });
    if (it == opts.end()) {
      problems.push_back("node '" + node + "' has no hardware option '" + opt + "'");
      continue;
    }
    out.hwOf[n] = static_cast<int>(it - opts.begin());
  }
  if (problems.empty()) {
    for (int n : UsedNodes(out.nodeOf)) {
      if (out.hwOf[n] >= 0) continue;
      if (infra_->nodes[n].hardwareOptions.size() == 1) {
        out.hwOf[n] = 0;
      } else {
        problems.push_back("no hardware option selected for used node '" + infra_->nodes[n].id + "'");
      }
    }
  }
  if (!problems.empty()) {
    std::string msg;
    for (const auto &p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::kInvalidArgument, msg);
  }
  return out;
}

std::string OptionSpace::EffectiveKey(const CompactOption &option) const {
  std::string key;
  key.reserve(option.nodeOf.size() * 3 + 8);
  for (int n : option.nodeOf) {
    key += std::to_string(n);
    key += ',';
  }
  key += '|';
  for (int n : UsedNodes(option.nodeOf)) {
    key += std::to_string(option.hwOf[n]);
    key += ',';
  }
  return key;
}

OptionStream::OptionStream(std::shared_ptr<const OptionSpace> space, std::uint64_t placementBegin,
                           std::uint64_t placementEnd, std::uint64_t firstIndex)
    : space_(std::move(space)),
      placement_(placementBegin),
      placementEnd_(std::min(placementEnd, space_->PlacementCount())),
      index_(firstIndex) {
  for (const auto &c : space_->candidates_) {
    if (c.empty()) exhausted_ = true;
  }
}

bool OptionStream::LoadPlacement() {
  if (placement_ >= placementEnd_) return false;
  space_->DecodePlacement(placement_, nodeOf_);
  hwNodes_ = space_->HardwareNodes(nodeOf_);
  hwDigits_.assign(hwNodes_.size(), 0);
  placementLoaded_ = true;
  return true;
}

bool OptionStream::Next(CompactOption &out) {
  if (exhausted_) return false;
  if (!placementLoaded_) {
    if (!LoadPlacement()) {
      exhausted_ = true;
      return false;
    }
  } else {
    // Advance the hardware odometer (last node fastest).
    bool carried = true;
    if (space_->withHardware_) {
      for (size_t i = hwDigits_.size(); i-- > 0;) {
        int radix = static_cast<int>(space_->infra_->nodes[hwNodes_[i]].hardwareOptions.size());
        if (++hwDigits_[i] < radix) {
          carried = false;
          break;
        }
        hwDigits_[i] = 0;
      }
    }
    if (carried) {
      ++placement_;
      if (!LoadPlacement()) {
        exhausted_ = true;
        return false;
      }
    }
  }
  out.nodeOf = nodeOf_;
  out.hwOf.assign(space_->infra_->nodes.size(), -1);
  for (size_t i = 0; i < hwNodes_.size(); ++i) out.hwOf[hwNodes_[i]] = hwDigits_[i];
  ++index_;
  return true;
}

OptionStream EnumerateOptions(const InfrastructureModel &infra, const SoftwareModel &software,
                              const CandidateSets &candidates, HardwareScope scope, bool withHardware) {
  auto space = std::make_shared<OptionSpace>(infra, software, candidates, scope, withHardware);
  for (size_t i = 0; i < space->candidates().size(); ++i) {
    if (space->candidates()[i].empty()) {
      throw Error(ErrorCode::kEmptySpace,
                  "service '" + software.components[space->services()[i]].id + "' has no candidate nodes");
    }
  }
  return OptionStream(space);
}

std::uint64_t CountOptions(const InfrastructureModel &infra, const SoftwareModel &software,
                           const CandidateSets &candidates, HardwareScope scope, bool withHardware) {
  return OptionSpace(infra, software, candidates, scope, withHardware).OptionCount();
}

}  // namespace fogforge
