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

#ifndef FOGFORGE_EMULATOR_HPP_
#define FOGFORGE_EMULATOR_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogforge/enumerate.hpp"
#include "fogforge/model.hpp"
#include "fogforge/simulator.hpp"

namespace fogforge {

struct CalibrationProfile {
  double unitsPerMs = 0.0;
  double deviation = 0.0;  // max relative distance of a trial from the median
  int trials = 0;
  int referenceWorkUnits = 0;
};

/* Throws kCalibrationUnstable when trials disagree by more than 10%. */
CalibrationProfile Calibrate(int referenceWorkUnits = 40, int trials = 5);

/* Busy-work units for a service with the given reference delay on a node with rpi. */
std::uint64_t WorkUnits(const CalibrationProfile &profile, double refDelayMs, double rpi);

/* Runs the prime kernel; returns early once *stop becomes true. */
void Burn(std::uint64_t units, const std::atomic<bool> *stop = nullptr);

Json ToJson(const CalibrationProfile &profile);

/* kBusy burns calibrated CPU work; kTimed holds each message for its service time. */
enum class ComputeMode { kBusy, kTimed };

const char *ToString(ComputeMode mode);
ComputeMode ParseComputeMode(const std::string &s);

enum class WorkloadMode { kConstantRate, kTraceReplay };

struct SourceWorkload {
  WorkloadMode mode = WorkloadMode::kConstantRate;
  std::optional<double> rateBytesPerSec;  // defaults to the source's outputRate
  double messageBytes = 0.0;  // 0 = rate / 10
  std::optional<double> phaseSec;  // first emission offset; default staggers sources
  std::string traceFile;
  std::vector<std::pair<double, double>> trace;  // (offset seconds, bytes)
};

struct WorkloadSpec {
  std::map<std::string, SourceWorkload> sources;
  double durationSec = 60.0;
  std::optional<double> warmupSec;  // defaults to 10% of durationSec
  int repeats = 3;
  ComputeMode computeMode = ComputeMode::kBusy;
  int calibrationUnits = 40;

  double Warmup() const { return warmupSec.value_or(durationSec * 0.1); }
};

/* Trace files are resolved against baseDir and loaded eagerly. */
WorkloadSpec ParseWorkload(const Json &doc, const std::string &baseDir = ".");
Json ToJson(const WorkloadSpec &spec);
void ValidateWorkload(const WorkloadSpec &spec, const SoftwareModel &software);

struct VirtualNode {
  std::string id;
  std::string hardware;
  double computeScale = 1.0;
  double memoryCap = 0.0;
  double memoryDemand = 0.0;
};

struct VirtualLink {
  std::string id;
  double latencyMs = 0.0;
  double bandwidthBytesPerSec = 0.0;
};

struct Actor {
  std::string component;
  ComponentKind kind = ComponentKind::kService;
  int node = -1;  // index into VirtualTestbed::nodes
  double serviceTimeMs = 0.0;
  std::uint64_t workUnits = 0;
  double outputRatio = 0.0;
  double rateBytesPerSec = 0.0;  // sources
  std::vector<int> outputs;  // channel indices
};

/* One routed connection; hops index VirtualTestbed::links. */
struct Channel {
  int producer = -1;  // actor index
  int consumer = -1;
  std::vector<int> hops;
};

struct PathChain {
  std::vector<int> actors;  // source ... sink
};

struct PathPlan {
  std::string id;
  double sloMs = 0.0;
  std::vector<PathChain> chains;
};

struct VirtualTestbed {
  std::vector<VirtualNode> nodes;  // used nodes only, id order
  std::vector<VirtualLink> links;  // traversed links only, id order
  std::vector<Actor> actors;  // component id order
  std::vector<Channel> channels;  // connection order
  std::vector<PathPlan> paths;
  ComputeMode computeMode = ComputeMode::kBusy;
};

VirtualTestbed BuildTestbed(const CompactOption &option, const Simulator &simulator,
                            const CalibrationProfile &calibration, ComputeMode mode = ComputeMode::kBusy);
VirtualTestbed BuildTestbed(const DesignOption &option, const InfrastructureModel &infra,
                            const SoftwareModel &software, const CalibrationProfile &calibration,
                            ComputeMode mode = ComputeMode::kBusy);

Json ToJson(const VirtualTestbed &testbed);

struct LatencyStats {
  double meanMs = 0.0;
  double stddevMs = 0.0;
  std::uint64_t sampleCount = 0;
};

struct Sample {
  std::uint64_t messageId = 0;
  double originMs = 0.0;  // since run start
  double latencyMs = 0.0;
};

struct RunReport {
  std::map<std::string, LatencyStats> perPath;  // worst chain of each path
  std::map<std::string, std::vector<LatencyStats>> perChain;
  std::map<std::string, std::vector<std::vector<Sample>>> samples;  // path -> chain -> samples, if kept
  std::uint64_t emitted = 0;  // source messages plus fan-out copies
  std::uint64_t received = 0;  // sink deliveries, warmup included
  std::uint64_t inFlight = 0;  // found in queues, links or services at shutdown
  double wallSec = 0.0;
};

struct PathSummary {
  LatencyStats median;  // statistics of the median run for this path
  int medianRun = 0;
  std::optional<double> cov;  // across run means, >= 2 runs
  double sloMs = 0.0;
  bool sloMet = false;
};

struct EmulationReport {
  std::vector<RunReport> runs;
  std::map<std::string, PathSummary> perPath;
  bool sloMet = false;
  double worstMeanMs = 0.0;
};

struct RunOptions {
  bool keepSamples = false;
  /* Replaces the built-in compute step of service actors when set. */
  std::function<void(const std::string &service, double bytes)> serviceHook;
};

/*
 * Runs spec.repeats back-to-back experiments. Throws kResourceExhausted before
 * starting when a node's services exceed its memory, kStarvation when a path
 * records no samples after warmup.
 */
EmulationReport RunExperiment(const VirtualTestbed &testbed, const WorkloadSpec &spec,
                              const SoftwareModel &software, const RunOptions &options = {});

Json ToJson(const EmulationReport &report);

struct CompareInput {
  std::string optionId;
  std::uint64_t index = 0;
  double simulatedCostMonth = 0.0;
  std::optional<EmulationReport> report;
  std::string failure;  // set when the emulation did not complete
};

struct RankEntry {
  std::string optionId;
  std::uint64_t index = 0;
  int rank = 0;
  bool measured = false;
  bool sloMet = false;
  double simulatedCostMonth = 0.0;
  double worstMeanMs = 0.0;
  std::string failure;
};

/* Measured SLOs met first, then simulated cost, then measured worst-path mean. */
std::vector<RankEntry> Compare(const std::vector<CompareInput> &inputs);

/* option,path,meanMs,stddevMs,sloMs,sloMet rows for a per-path bar chart. */
std::string BarChartCsv(const std::vector<CompareInput> &inputs);

}  // namespace fogforge

#endif  // FOGFORGE_EMULATOR_HPP_
