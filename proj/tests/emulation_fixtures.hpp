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

#ifndef FOGFORGE_TESTS_EMULATION_FIXTURES_HPP_
#define FOGFORGE_TESTS_EMULATION_FIXTURES_HPP_

#include "fogforge/emulator.hpp"
#include "helpers.hpp"

/* a -- b -- c with src on a, svc on b, sink on c; every link is crossed once. */
namespace emufix {

constexpr double kHopAB = 3.0;
constexpr double kHopBC = 4.0;

inline std::pair<fogforge::InfrastructureModel, fogforge::SoftwareModel> ThreeHop(double extraBcMs) {
  using testutil::Hw;
  using testutil::Link;
  using testutil::Node;
  fogforge::Json infra = {{"tierOrder", {"device", "edge"}},
                          {"nodes",
                           {Node("a", "device", {Hw("a1", 1, 1e9, 1)}, {"src"}), Node("b", "edge", {Hw("b1", 2, 1e9, 5)}),
                            Node("c", "device", {Hw("c1", 1, 1e9, 1)}, {"sink"})}},
                          {"links",
                           {Link("ab", "a", "b", kHopAB, 1e7, 0.001), Link("bc", "b", "c", kHopBC + extraBcMs, 1e7, 0.001)}}};
  fogforge::Json software = {
      {"components",
       {{{"id", "src"}, {"kind", "source"}, {"outputRateBytesPerSec", 10000}, {"pinnedNode", "a"}},
        {{"id", "svc"}, {"kind", "service"}, {"outputRatio", 0.5}, {"refDelayMs", 10}, {"requiredMemoryBytes", 50e6}},
        {{"id", "sink"}, {"kind", "sink"}, {"pinnedNode", "c"}}}},
      {"connections", {{{"producer", "src"}, {"consumer", "svc"}}, {{"producer", "svc"}, {"consumer", "sink"}}}},
      {"paths", {{{"id", "P"}, {"class", "event-processing"}, {"members", {"src", "svc", "sink"}}, {"sloLatencyMs", 100}}}}};
  return fogforge::LoadModels(infra.dump(), software.dump());
}

inline fogforge::DesignOption ThreeHopOption() { return {{{"svc", "b"}}, {{"b", "b1"}}}; }

inline fogforge::WorkloadSpec ShortSpec(fogforge::ComputeMode mode, double durationSec, int repeats) {
  fogforge::WorkloadSpec spec;
  spec.durationSec = durationSec;
  spec.warmupSec = durationSec * 0.1;
  spec.repeats = repeats;
  spec.computeMode = mode;
  fogforge::SourceWorkload w;
  w.messageBytes = 500;  // 20 messages per second
  spec.sources["src"] = w;
  return spec;
}

}  // namespace emufix

#endif  // FOGFORGE_TESTS_EMULATION_FIXTURES_HPP_
