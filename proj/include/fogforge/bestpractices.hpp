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

#ifndef FOGFORGE_BESTPRACTICES_HPP_
#define FOGFORGE_BESTPRACTICES_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogforge/enumerate.hpp"
#include "fogforge/model.hpp"

namespace fogforge {

struct LinkReuseRule {
  bool enabled = false;
  int threshold = 2;
  bool directed = false;
};

struct Override {
  std::optional<std::vector<std::string>> allow;  // replaces the set
  std::vector<std::string> deny;  // subtracted afterwards
};

/* An empty RuleSet disables every rule. */
struct RuleSet {
  bool shortestPath = false;
  bool orderingConstraints = false;
  std::map<std::string, std::string> zoneCeiling;  // path -> max tier
  std::map<std::string, bool> forbidHighLatencyLinks;  // path -> flag
  LinkReuseRule linkReuse;
  std::map<std::string, Override> overrides;  // service -> override
};

RuleSet ParseRules(const Json &doc);
Json ToJson(const RuleSet &rules);
void ValidateRules(const RuleSet &rules, const InfrastructureModel &infra, const SoftwareModel &software);

/* Why a (service, node) pair left the candidate set. */
struct Exclusion {
  std::string service;
  std::string node;
  std::string rule;
  std::string detail;
};

struct PruneResult {
  CandidateSets candidates;
  std::vector<Exclusion> trace;  // sorted by (service, node)
};

/* Candidates for one service within one path, overrides included. */
std::vector<std::string> CandidateNodes(const std::string &service, const std::string &path,
                                        const InfrastructureModel &infra, const SoftwareModel &software,
                                        const RuleSet &rules);

/* Throws kEmptyCandidates when some service ends with no candidate node. */
PruneResult ApplyBestPractices(const InfrastructureModel &infra, const SoftwareModel &software,
                               const RuleSet &rules);

std::string FormatTrace(const PruneResult &result);

/* True iff no link is traversed more than rule.threshold times by all routed connections. */
bool LinkReuseOk(const DesignOption &option, const InfrastructureModel &infra, const SoftwareModel &software,
                 const LinkReuseRule &rule);

}  // namespace fogforge

#endif  // FOGFORGE_BESTPRACTICES_HPP_
