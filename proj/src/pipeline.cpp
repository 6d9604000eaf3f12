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

#include "fogforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "fogforge/error.hpp"
#include "internal.hpp"

namespace fogforge {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

/* Runs fn, prefixing any library error with the stage name. */
template <typename Fn>
auto Staged(const std::string &stage, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error &e) {
    if (e.detail().rfind("stage '", 0) == 0) throw;
    throw Error(e.code(), "stage '" + stage + "': " + e.detail());
  }
}

std::string RecordLine(std::uint64_t index, const CompactMetrics &m, const Simulator &sim) {
  std::string line = "{\"id\":\"" + OptionId(index) + "\",\"feasible\":" + (m.feasible ? "true" : "false") +
                     ",\"sloOk\":" + (m.sloOk ? "true" : "false") +
                     ",\"processingCostMonth\":" + internal::Num(m.processingCostMonth) +
                     ",\"transmissionCostMonth\":" + internal::Num(m.transmissionCostMonth) +
                     ",\"totalCostMonth\":" + internal::Num(m.totalCostMonth) + ",\"endToEndMs\":{";
  const auto &paths = sim.software().paths;
  for (size_t p = 0; p < paths.size(); ++p) {
    if (p) line += ',';
    line += '"' + paths[p].id + "\":" + internal::Num(m.perPath[p].endToEndMs);
  }
  line += "},\"violations\":[";
  for (size_t i = 0; i < m.violations.size(); ++i) {
    const auto &v = m.violations[i];
    std::string subject;
    switch (v.kind) {
      case ViolationKind::kMemory:
        subject = sim.infra().nodes[v.subject].id;
        break;
      case ViolationKind::kBandwidth:
      case ViolationKind::kLinkReuse:
        subject = sim.infra().links[v.subject].id;
        break;
      case ViolationKind::kSlo:
        subject = paths[v.subject].id;
        break;
    }
    if (i) line += ',';
    line += std::string("\"") + ToString(v.kind) + ":" + subject + '"';
  }
  line += "]}\n";
  return line;
}

std::string CsvHeader(const OptionSpace &space) {
  std::string h = "id,index";
  for (int s : space.services()) h += "," + space.software().components[s].id;
  for (const auto &n : space.infra().nodes) h += ",hw:" + n.id;
  h += ",processingCostMonth,transmissionCostMonth,totalCostMonth";
  for (const auto &p : space.software().paths) h += ",e2e:" + p.id;
  h += ",sloOk\n";
  return h;
}

std::string CsvRow(const ResultRecord &r, const OptionSpace &space) {
  std::string row = OptionId(r.index) + "," + std::to_string(r.index);
  for (int n : r.option.nodeOf) row += "," + space.infra().nodes[n].id;
  for (size_t n = 0; n < space.infra().nodes.size(); ++n) {
    row += ",";
    int hw = r.option.hwOf[n];
    if (hw >= 0) row += space.infra().nodes[n].hardwareOptions[hw].id;
  }
  row += "," + internal::Num(r.metrics.processingCostMonth) + "," + internal::Num(r.metrics.transmissionCostMonth) +
         "," + internal::Num(r.metrics.totalCostMonth);
  for (const auto &pm : r.metrics.perPath) row += "," + internal::Num(pm.endToEndMs);
  row += r.metrics.sloOk ? ",true\n" : ",false\n";
  return row;
}

Json OptionJson(const ResultRecord &r, Pipeline &p, const Simulator &sim) {
  DesignOption d = p.ToDesignOption(r.option);
  return {{"id", OptionId(r.index)},
          {"index", r.index},
          {"placement", d.placement},
          {"hardware", d.hardware},
          {"simulated", ToJson(sim.Expand(r.option, r.metrics))}};
}

Json SummaryJson(const EmulationReport &report) {
  Json perPath = Json::object();
  for (const auto &[id, s] : report.perPath) {
    perPath[id] = {{"meanMs", s.median.meanMs},
                   {"stddevMs", s.median.stddevMs},
                   {"sampleCount", s.median.sampleCount},
                   {"cov", s.cov ? Json(*s.cov) : Json(nullptr)},
                   {"sloMs", s.sloMs},
                   {"sloMet", s.sloMet}};
  }
  return {{"perPath", perPath}, {"sloMet", report.sloMet}, {"worstMeanMs", report.worstMeanMs}};
}

StageRecord Counts(std::uint64_t in, std::uint64_t out) {
  StageRecord r;
  r.optionsIn = in;
  r.optionsOut = out;
  return r;
}

}  // namespace

std::string OptionId(std::uint64_t index) { return "opt-" + std::to_string(index); }

std::uint64_t ParseOptionId(const std::string &id) {
  if (id.size() <= 4 || id.compare(0, 4, "opt-") != 0 ||
      !std::all_of(id.begin() + 4, id.end(), [](char c) { return c >= '0' && c <= '9'; }) || id.size() > 24) {
    throw Error(ErrorCode::kUnknownOption, "'" + id + "' is not an option id");
  }
  return std::stoull(id.substr(4));
}

PipelineConfig ParsePipelineConfig(const Json &doc, const std::string &baseDir) {
  if (!doc.is_object()) throw Error(ErrorCode::kSchema, "pipeline config: document must be an object");
  PipelineConfig c;
  auto resolve = [&](const std::string &p) {
    fs::path path(p);
    if (path.is_relative()) path = fs::path(baseDir) / path;
    return path.lexically_normal().string();
  };
  auto str = [&](const Json &v, const std::string &key) {
    if (!v.is_string()) throw Error(ErrorCode::kSchema, "pipeline config: '" + key + "' must be a string");
    return v.get<std::string>();
  };
  c.outputDir = resolve("out");
  const Json *emulation = nullptr;
  for (const auto &[key, v] : doc.items()) {
    if (key == "infrastructure") {
      c.infrastructurePath = resolve(str(v, key));
    } else if (key == "software") {
      c.softwarePath = resolve(str(v, key));
    } else if (key == "output") {
      c.outputDir = resolve(str(v, key));
    } else if (key == "hardwareScope") {
      c.hardwareScope = ParseHardwareScope(str(v, key));
    } else if (key == "percentile") {
      if (!v.is_number()) throw Error(ErrorCode::kSchema, "pipeline config: 'percentile' must be a number");
      c.percentile = v.get<double>();
    } else if (key == "jobs") {
      if (!v.is_number_integer()) throw Error(ErrorCode::kSchema, "pipeline config: 'jobs' must be an integer");
      c.jobs = v.get<int>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw Error(ErrorCode::kSchema, "pipeline config: 'seed' must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "rules") {
      c.rules = ParseRules(v);
    } else if (key == "sloOverrides") {
      if (!v.is_object()) throw Error(ErrorCode::kSchema, "pipeline config: 'sloOverrides' must map paths to ms");
      for (const auto &[path, ms] : v.items()) {
        if (!ms.is_number()) throw Error(ErrorCode::kSchema, "pipeline config: sloOverrides." + path + " must be a number");
        c.sloOverrides[path] = ms.get<double>();
      }
    } else if (key == "emulation") {
      emulation = &v;
    } else if (key == "dumpSamples") {
      if (!v.is_boolean()) throw Error(ErrorCode::kSchema, "pipeline config: 'dumpSamples' must be a boolean");
      c.dumpSamples = v.get<bool>();
    } else {
      throw Error(ErrorCode::kSchema, "pipeline config: unexpected field '" + key + "'");
    }
  }
  if (emulation) {
    if (emulation->is_object() && emulation->contains("enabled")) {
      const Json &e = (*emulation)["enabled"];
      if (!e.is_boolean()) throw Error(ErrorCode::kSchema, "pipeline config: emulation.enabled must be a boolean");
      c.emulationEnabled = e.get<bool>();
    }
    c.workload = ParseWorkload(*emulation, baseDir);
  }
  return c;
}

PipelineConfig LoadPipelineConfig(const std::string &path) {
  Json doc = internal::ParseJson(internal::ReadFile(path), "pipeline config '" + path + "'");
  fs::path base = fs::absolute(fs::path(path)).parent_path();
  return ParsePipelineConfig(doc, base.string());
}

Json SettingsJson(const PipelineConfig &config) {
  Json workload = ToJson(config.workload);
  workload["enabled"] = config.emulationEnabled;
  return {{"hardwareScope", ToString(config.hardwareScope)},
          {"percentile", config.percentile},
          {"jobs", config.jobs},
          {"seed", config.seed},
          {"rules", ToJson(config.rules)},
          {"sloOverrides", config.sloOverrides},
          {"emulation", workload},
          {"dumpSamples", config.dumpSamples}};
}

void ValidateConfig(const PipelineConfig &config) {
  auto invalid = [](const std::string &invariant, const std::string &detail) {
    throw Error(ErrorCode::kValidation, "invariant '" + invariant + "' violated: " + detail);
  };
  if (!(config.percentile > 0.0 && config.percentile <= 1.0)) {
    invalid("fraction in (0, 1]", "percentile " + internal::Num(config.percentile));
  }
  if (config.jobs < 0) invalid("jobs >= 0", "got " + std::to_string(config.jobs));
  for (const auto &[path, ms] : config.sloOverrides) {
    if (!(ms > 0.0)) invalid("SLO overrides are positive", "path '" + path + "'");
  }
}

SoftwareModel ApplySloOverrides(SoftwareModel software, const std::map<std::string, double> &overrides) {
  for (const auto &[path, ms] : overrides) {
    int p = software.PathIndex(path);
    if (p < 0) {
      throw Error(ErrorCode::kValidation, "invariant 'sloOverrides reference existing paths' violated: '" + path + "'");
    }
    software.paths[p].sloLatencyMs = ms;
  }
  return software;
}

Json FunnelJson(const FunnelReport &report) {
  Json stages = Json::array();
  for (const auto &s : report.stages) {
    Json j = {{"stage", s.name}, {"optionsIn", s.optionsIn}, {"optionsOut", s.optionsOut}};
    if (s.distinctIn) j["distinctIn"] = *s.distinctIn;
    if (s.skipped) j["skipped"] = true;
    stages.push_back(j);
  }
  Json final = nullptr;
  if (report.final) {
    final = {{"id", OptionId(report.final->index)},
             {"index", report.final->index},
             {"placement", report.final->option.placement},
             {"hardware", report.final->option.hardware},
             {"simulated", ToJson(report.final->simulated)}};
  }
  return {{"stages", stages}, {"final", final}};
}

std::string FunnelBytes(const FunnelReport &report) { return FunnelJson(report).dump(2) + "\n"; }

Json ToJson(const CountReport &report) {
  Json j = {{"placements", report.placements}, {"options", report.options}};
  if (report.prunedPlacements) {
    j["pruned"] = {{"placements", *report.prunedPlacements}, {"options", *report.prunedOptions}};
  } else {
    j["pruned"] = nullptr;
    j["pruneError"] = report.pruneError;
  }
  return j;
}

Pipeline::Pipeline(PipelineConfig config, InfrastructureModel infra, SoftwareModel software)
    : config_(std::move(config)), infra_(std::move(infra)) {
  ValidateConfig(config_);
  software_ = ApplySloOverrides(std::move(software), config_.sloOverrides);
  Validate(infra_);
  Validate(software_);
  ValidatePair(infra_, software_);
  ValidateRules(config_.rules, infra_, software_);
  ValidateWorkload(config_.workload, software_);
  simulator_ = std::make_unique<Simulator>(infra_, software_, config_.rules.linkReuse);
}

std::unique_ptr<Pipeline> Pipeline::Open(const PipelineConfig &config) {
  for (const auto &[what, path] : {std::pair{"infrastructure", config.infrastructurePath},
                                   std::pair{"software", config.softwarePath}}) {
    if (path.empty() || !fs::is_regular_file(path)) {
      throw Error(ErrorCode::kValidation,
                  std::string("invariant 'paths exist' violated: ") + what + " model '" + path + "'");
    }
  }
  auto models = LoadModels(internal::ReadFile(config.infrastructurePath), internal::ReadFile(config.softwarePath));
  return std::make_unique<Pipeline>(config, std::move(models.first), std::move(models.second));
}

void Pipeline::WriteModels() {
  if (modelsWritten_) return;
  fs::create_directories(config_.outputDir);
  fs::path out(config_.outputDir);
  internal::WriteFile(out / "infrastructure.json", ToJson(infra_).dump(2) + "\n");
  internal::WriteFile(out / "software.json", ToJson(software_).dump(2) + "\n");
  internal::WriteFile(out / "config.json", SettingsJson(config_).dump(2) + "\n");
  modelsWritten_ = true;
}

CountReport Pipeline::Count() {
  CountReport r;
  OptionSpace unrestricted(infra_, software_, Unrestricted(infra_, software_), config_.hardwareScope);
  r.placements = unrestricted.PlacementCount();
  r.options = unrestricted.OptionCount();
  try {
    const OptionSpace &space = Space();
    r.prunedPlacements = space.PlacementCount();
    r.prunedOptions = space.OptionCount();
  } catch (const Error &e) {
    r.pruneError = e.what();
  }
  return r;
}

const PruneResult &Pipeline::Prune() {
  if (prune_) return *prune_;
  Staged("best-practices", [&] {
    WriteModels();
    PruneResult result = ApplyBestPractices(infra_, software_, config_.rules);
    space_ = std::make_shared<OptionSpace>(infra_, software_, result.candidates, config_.hardwareScope);
    offsets_ = space_->PlacementOffsets();
    fs::path out(config_.outputDir);
    Json doc = {{"hardwareScope", ToString(config_.hardwareScope)},
                {"candidates", result.candidates},
                {"placementCount", space_->PlacementCount()},
                {"optionCount", space_->OptionCount()}};
    internal::WriteFile(out / "candidates.json", doc.dump(2) + "\n");
    internal::WriteFile(out / "prune-trace.txt", FormatTrace(result));
    spdlog::info("best-practices: {} placements, {} options", space_->PlacementCount(), space_->OptionCount());
    prune_ = std::move(result);
    return 0;
  });
  return *prune_;
}

const OptionSpace &Pipeline::Space() {
  Prune();
  return *space_;
}

const std::vector<ResultRecord> &Pipeline::Simulate() {
  if (feasible_) return *feasible_;
  Prune();
  Staged("feasibility", [&] {
    const std::uint64_t placements = space_->PlacementCount();
    int jobs = config_.jobs > 0 ? config_.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::uint64_t chunkCount = std::min<std::uint64_t>(placements, static_cast<std::uint64_t>(jobs) * 8);
    if (chunkCount == 0) chunkCount = 1;
    struct Chunk {
      std::string lines;
      std::string csv;
      std::vector<ResultRecord> feasible;
    };
    std::vector<Chunk> chunks(chunkCount);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMu;
    auto work = [&] {
      for (;;) {
        std::uint64_t c = next++;
        if (c >= chunkCount) return;
        try {
          std::uint64_t begin = placements * c / chunkCount;
          std::uint64_t end = placements * (c + 1) / chunkCount;
          OptionStream stream(space_, begin, end, offsets_[begin]);
          CompactOption option;
          Chunk &out = chunks[c];
          while (stream.Next(option)) {
            CompactMetrics m = simulator_->Evaluate(option);
            out.lines += RecordLine(stream.index(), m, *simulator_);
            if (m.feasible) {
              ResultRecord r{stream.index(), option, std::move(m)};
              out.csv += CsvRow(r, *space_);
              out.feasible.push_back(std::move(r));
            }
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failureMu);
          if (!failure) failure = std::current_exception();
          next = chunkCount;
        }
      }
    };
    std::vector<std::thread> workers;
    for (int j = 1; j < jobs; ++j) workers.emplace_back(work);
    work();
    for (auto &w : workers) w.join();
    if (failure) std::rethrow_exception(failure);

    fs::path out(config_.outputDir);
    std::ofstream records(out / "records.jsonl", std::ios::binary | std::ios::trunc);
    std::ofstream csv(out / "results.csv", std::ios::binary | std::ios::trunc);
    if (!records || !csv) throw Error(ErrorCode::kIo, "cannot write simulation artifacts to '" + out.string() + "'");
    csv << CsvHeader(*space_);
    std::vector<ResultRecord> feasible;
    for (auto &c : chunks) {
      records << c.lines;
      csv << c.csv;
      for (auto &r : c.feasible) feasible.push_back(std::move(r));
    }
    evaluated_ = space_->OptionCount();
    spdlog::info("feasibility: {} of {} options feasible", feasible.size(), evaluated_);
    feasible_ = std::move(feasible);
    if (feasible_->empty()) throw Error(ErrorCode::kEmptyInput, "no option satisfies the resource constraints");
    return 0;
  });
  return *feasible_;
}

const std::vector<ResultRecord> &Pipeline::SloConforming() {
  if (slo_) return *slo_;
  const auto &feasible = Simulate();
  Staged("slo", [&] {
    slo_ = FilterSlo(feasible);
    std::unordered_set<std::string> keys;
    for (const auto &r : *slo_) keys.insert(space_->EffectiveKey(r.option));
    distinctSlo_ = keys.size();
    spdlog::info("slo: {} records ({} distinct designs) meet every SLO", slo_->size(), distinctSlo_);
    if (slo_->empty()) throw Error(ErrorCode::kEmptyInput, "no feasible option meets every SLO");
    return 0;
  });
  return *slo_;
}

const std::vector<ResultRecord> &Pipeline::Shortlist() {
  if (shortlist_) return *shortlist_;
  const auto &slo = SloConforming();
  Staged("percentile", [&] {
    shortlist_ = SelectPercentile(slo, config_.percentile, space_.get());
    Json options = Json::array();
    for (const auto &r : *shortlist_) options.push_back(OptionJson(r, *this, *simulator_));
    Json doc = {{"percentile", config_.percentile},
                {"sloConforming", slo.size()},
                {"distinct", distinctSlo_},
                {"options", options}};
    internal::WriteFile(fs::path(config_.outputDir) / "shortlist.json", doc.dump(2) + "\n");
    spdlog::info("percentile: {} shortlisted", shortlist_->size());
    return 0;
  });
  return *shortlist_;
}

const std::vector<EmulatedOption> &Pipeline::Emulate() {
  if (emulated_) return *emulated_;
  const auto &shortlist = Shortlist();
  Staged("emulation", [&] {
    const WorkloadSpec &spec = config_.workload;
    CalibrationProfile calibration;
    if (spec.computeMode == ComputeMode::kBusy) calibration = Calibrate(spec.calibrationUnits);
    std::vector<EmulatedOption> results;
    Json options = Json::array();
    RunOptions runOptions;
    runOptions.keepSamples = config_.dumpSamples;
    std::string samples = "option,run,path,chain,messageId,originMs,latencyMs\n";
    std::vector<CompareInput> inputs;
    for (const auto &r : shortlist) {
      EmulatedOption e{r, std::nullopt, ""};
      VirtualTestbed tb = BuildTestbed(r.option, *simulator_, calibration, spec.computeMode);
      try {
        e.report = RunExperiment(tb, spec, software_, runOptions);
      } catch (const Error &err) {
        if (err.code() != ErrorCode::kResourceExhausted && err.code() != ErrorCode::kStarvation) throw;
        e.failure = err.what();
        spdlog::warn("emulation of {} failed: {}", OptionId(r.index), e.failure);
      }
      Json j = {{"id", OptionId(r.index)},
                {"index", r.index},
                {"simulatedCostMonth", r.metrics.totalCostMonth},
                {"testbed", ToJson(tb)}};
      if (e.report) {
        j["report"] = ToJson(*e.report);
        if (config_.dumpSamples) {
          for (size_t run = 0; run < e.report->runs.size(); ++run) {
            for (const auto &[path, chains] : e.report->runs[run].samples) {
              for (size_t c = 0; c < chains.size(); ++c) {
                for (const auto &s : chains[c]) {
                  samples += OptionId(r.index) + "," + std::to_string(run) + "," + path + "," + std::to_string(c) +
                             "," + std::to_string(s.messageId) + "," + internal::Num(s.originMs) + "," +
                             internal::Num(s.latencyMs) + "\n";
                }
              }
            }
          }
        }
      } else {
        j["failure"] = e.failure;
      }
      options.push_back(std::move(j));
      inputs.push_back({OptionId(r.index), r.index, r.metrics.totalCostMonth, e.report, e.failure});
      results.push_back(std::move(e));
    }
    Json ranking = Json::array();
    for (const auto &entry : Compare(inputs)) {
      ranking.push_back({{"rank", entry.rank},
                         {"id", entry.optionId},
                         {"measured", entry.measured},
                         {"sloMet", entry.sloMet},
                         {"simulatedCostMonth", entry.simulatedCostMonth},
                         {"worstMeanMs", entry.measured ? Json(entry.worstMeanMs) : Json(nullptr)},
                         {"failure", entry.failure}});
    }
    fs::path out(config_.outputDir);
    Json doc = {{"computeMode", ToString(spec.computeMode)},
                {"calibration", ToJson(calibration)},
                {"workload", ToJson(spec)},
                {"options", options},
                {"ranking", ranking}};
    internal::WriteFile(out / "emulation.json", doc.dump(2) + "\n");
    internal::WriteFile(out / "emulation.csv", BarChartCsv(inputs));
    if (config_.dumpSamples) internal::WriteFile(out / "samples.csv", samples);
    emulated_ = std::move(results);
    return 0;
  });
  return *emulated_;
}

FunnelReport Pipeline::Run(const Progress &progress) {
  FunnelReport report;
  auto t0 = Clock::now();
  auto stage = [&](const std::string &name, auto &&fn) {
    if (progress) progress(name);
    auto begin = Clock::now();
    StageRecord rec = Staged(name, fn);
    rec.name = name;
    rec.wallSec = std::chrono::duration<double>(Clock::now() - begin).count();
    report.stages.push_back(rec);
    return rec;
  };
  std::uint64_t total = 0;
  stage("enumerate", [&] {
    OptionSpace unrestricted(infra_, software_, Unrestricted(infra_, software_), config_.hardwareScope);
    total = unrestricted.OptionCount();
    return Counts(total, total);
  });
  stage("best-practices", [&] { return Counts(total, Space().OptionCount()); });
  stage("feasibility", [&] {
    std::uint64_t feasible = Simulate().size();
    return Counts(evaluated_, feasible);
  });
  stage("slo", [&] { return Counts(Simulate().size(), SloConforming().size()); });
  stage("percentile", [&] {
    StageRecord r = Counts(SloConforming().size(), Shortlist().size());
    r.distinctIn = distinctSlo_;
    return r;
  });
  std::optional<ResultRecord> winner;
  std::optional<EmulationReport> winnerReport;
  std::string winnerFailure;
  if (config_.emulationEnabled) {
    std::vector<CompareInput> inputs;
    stage("emulation", [&] {
      std::uint64_t completed = 0;
      for (const auto &e : Emulate()) {
        completed += e.report ? 1 : 0;
        inputs.push_back({OptionId(e.record.index), e.record.index, e.record.metrics.totalCostMonth, e.report,
                          e.failure});
      }
      return Counts(Shortlist().size(), completed);
    });
    stage("final", [&] {
      std::uint64_t in = report.stages.back().optionsOut;
      if (in == 0) throw Error(ErrorCode::kEmptyInput, "no shortlisted option completed emulation");
      auto ranking = Compare(inputs);
      for (const auto &e : Emulate()) {
        if (OptionId(e.record.index) == ranking.front().optionId) {
          winner = e.record;
          winnerReport = e.report;
        }
      }
      return Counts(in, 1);
    });
  } else {
    stage("emulation", [&] {
      StageRecord r = Counts(Shortlist().size(), Shortlist().size());
      r.skipped = true;
      return r;
    });
    stage("final", [&] {
      winner = Shortlist().front();
      return Counts(Shortlist().size(), 1);
    });
  }
  Recommendation rec;
  rec.index = winner->index;
  rec.option = ToDesignOption(winner->option);
  rec.simulated = simulator_->Expand(winner->option, winner->metrics);
  rec.emulation = winnerReport;
  report.final = rec;

  fs::path out(config_.outputDir);
  internal::WriteFile(out / "funnel.json", FunnelBytes(report));
  Json timings = Json::array();
  for (const auto &s : report.stages) timings.push_back({{"stage", s.name}, {"wallSec", s.wallSec}});
  internal::WriteFile(out / "timings.json",
                      Json{{"stages", timings},
                           {"totalSec", std::chrono::duration<double>(Clock::now() - t0).count()}}
                              .dump(2) +
                          "\n");
  Json recommendation = {{"id", OptionId(rec.index)},
                         {"index", rec.index},
                         {"placement", rec.option.placement},
                         {"hardware", rec.option.hardware},
                         {"simulated", ToJson(rec.simulated)},
                         {"emulation", rec.emulation ? SummaryJson(*rec.emulation) : Json(nullptr)}};
  internal::WriteFile(out / "recommendation.json", recommendation.dump(2) + "\n");
  spdlog::info("final: {} at {} per month", OptionId(rec.index), rec.simulated.totalCostMonth);
  return report;
}

Json Pipeline::Sample(std::uint64_t n) {
  const OptionSpace &space = Space();
  std::uint64_t total = space.OptionCount();
  std::mt19937_64 rng(config_.seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
  std::set<std::uint64_t> chosen;
  n = std::min(n, total);
  while (chosen.size() < n) chosen.insert(pick(rng));
  Json out = Json::array();
  for (std::uint64_t index : chosen) {
    CompactOption option = space.Decode(index, offsets_);
    ResultRecord r{index, option, simulator_->Evaluate(option)};
    out.push_back(OptionJson(r, *this, *simulator_));
  }
  return out;
}

Json Pipeline::Evaluate(const DesignOption &option) {
  CompactOption compact = ToCompact(option, infra_, software_);
  CompactMetrics m = simulator_->Evaluate(compact);
  Json slo = Json::object();
  for (size_t p = 0; p < software_.paths.size(); ++p) {
    double limit = software_.paths[p].sloLatencyMs;
    slo[software_.paths[p].id] = {{"sloMs", limit},
                                  {"endToEndMs", m.perPath[p].endToEndMs},
                                  {"marginMs", limit - m.perPath[p].endToEndMs},
                                  {"met", m.perPath[p].endToEndMs <= limit}};
  }
  return {{"metrics", ToJson(simulator_->Expand(compact, m))}, {"sloOk", m.sloOk}, {"slo", slo}};
}

}  // namespace fogforge
