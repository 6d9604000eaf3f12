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

#ifndef FOGFORGE_PIPELINE_HPP_
#define FOGFORGE_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fogforge/bestpractices.hpp"
#include "fogforge/emulator.hpp"
#include "fogforge/enumerate.hpp"
#include "fogforge/model.hpp"
#include "fogforge/simulator.hpp"

namespace fogforge {

struct PipelineConfig {
  std::string infrastructurePath;  // resolved against the config directory
  std::string softwarePath;
  std::string outputDir;
  HardwareScope hardwareScope = HardwareScope::kUsedNodes;
  double percentile = 0.05;
  int jobs = 1;  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  RuleSet rules;
  std::map<std::string, double> sloOverrides;  // path -> SLO ms
  bool emulationEnabled = true;
  WorkloadSpec workload;
  bool dumpSamples = false;
};

/* Relative paths in doc are resolved against baseDir. */
PipelineConfig ParsePipelineConfig(const Json &doc, const std::string &baseDir);
PipelineConfig LoadPipelineConfig(const std::string &path);
/* Settings only (no file paths). */
Json SettingsJson(const PipelineConfig &config);
void ValidateConfig(const PipelineConfig &config);

/* Applies SLO overrides; unknown paths are a validation error. */
SoftwareModel ApplySloOverrides(SoftwareModel software, const std::map<std::string, double> &overrides);

std::string OptionId(std::uint64_t index);
/* Throws kUnknownOption for anything but "opt-<digits>". */
std::uint64_t ParseOptionId(const std::string &id);

struct StageRecord {
  std::string name;
  std::uint64_t optionsIn = 0;
  std::uint64_t optionsOut = 0;
  std::optional<std::uint64_t> distinctIn;
  bool skipped = false;
  double wallSec = 0.0;
};

struct Recommendation {
  std::uint64_t index = 0;
  DesignOption option;
  SimulationMetrics simulated;
  std::optional<EmulationReport> emulation;
  std::string emulationFailure;
};

struct FunnelReport {
  std::vector<StageRecord> stages;
  std::optional<Recommendation> final;
};

/* Stage counts and the final option with its simulated metrics; no timings. */
Json FunnelJson(const FunnelReport &report);
std::string FunnelBytes(const FunnelReport &report);

struct CountReport {
  std::uint64_t placements = 0;  // unrestricted, no hardware
  std::uint64_t options = 0;  // unrestricted, with hardware
  std::optional<std::uint64_t> prunedPlacements;
  std::optional<std::uint64_t> prunedOptions;
  std::string pruneError;
};

Json ToJson(const CountReport &report);

struct EmulatedOption {
  ResultRecord record;
  std::optional<EmulationReport> report;
  std::string failure;
};

/*
 * One exploration over fixed models and config. Stages run lazily: asking for
 * the shortlist runs pruning and simulation first. Artifacts are written to
 * config.outputDir as each stage completes.
 */
class Pipeline {
 public:
  using Progress = std::function<void(const std::string &stage)>;

  Pipeline(PipelineConfig config, InfrastructureModel infra, SoftwareModel software);
  /* Loads and validates the models named by the config. */
  static std::unique_ptr<Pipeline> Open(const PipelineConfig &config);

  const PipelineConfig &config() const { return config_; }
  const InfrastructureModel &infra() const { return infra_; }
  const SoftwareModel &software() const { return software_; }

  CountReport Count();
  const PruneResult &Prune();
  const OptionSpace &Space();
  /* Feasible records in enumeration order. */
  const std::vector<ResultRecord> &Simulate();
  const std::vector<ResultRecord> &SloConforming();
  const std::vector<ResultRecord> &Shortlist();
  const std::vector<EmulatedOption> &Emulate();
  FunnelReport Run(const Progress &progress = {});

  /* Seeded uniform sample of the pruned space, simulated. */
  Json Sample(std::uint64_t n);
  /* Simulates an arbitrary mapping against the models. */
  Json Evaluate(const DesignOption &option);

  DesignOption ToDesignOption(const CompactOption &option) { return Space().ToDesignOption(option); }

 private:
  void WriteModels();

  PipelineConfig config_;
  InfrastructureModel infra_;
  SoftwareModel software_;
  std::unique_ptr<Simulator> simulator_;

  std::optional<PruneResult> prune_;
  std::shared_ptr<OptionSpace> space_;
  std::vector<std::uint64_t> offsets_;
  std::optional<std::vector<ResultRecord>> feasible_;
  std::uint64_t evaluated_ = 0;
  std::optional<std::vector<ResultRecord>> slo_;
  std::uint64_t distinctSlo_ = 0;
  std::optional<std::vector<ResultRecord>> shortlist_;
  std::optional<std::vector<EmulatedOption>> emulated_;
  bool modelsWritten_ = false;
};

/* Narrative for one option of a completed run directory. Throws kUnknownOption. */
std::string Explain(const std::string &outputDir, const std::string &optionId);

}  // namespace fogforge

#endif  // FOGFORGE_PIPELINE_HPP_
