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

#include <cstdio>
#include <filesystem>

#include "fogforge/error.hpp"
#include "fogforge/pipeline.hpp"
#include "internal.hpp"

namespace fogforge {

namespace fs = std::filesystem;

namespace {

std::string Fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::optional<Json> Optional(const fs::path &path) {
  if (!fs::is_regular_file(path)) return std::nullopt;
  return internal::ParseJson(internal::ReadFile(path.string()), path.string());
}

const Json *FindById(const Json &array, const std::string &id) {
  for (const auto &e : array) {
    if (e.value("id", "") == id) return &e;
  }
  return nullptr;
}

}  // namespace

std::string Explain(const std::string &outputDir, const std::string &optionId) {
  fs::path dir(outputDir);
  for (const char *name : {"infrastructure.json", "software.json", "config.json", "candidates.json"}) {
    if (!fs::is_regular_file(dir / name)) {
      throw Error(ErrorCode::kIo, "'" + outputDir + "' holds no run artifacts (missing " + name + ")");
    }
  }
  auto [infra, software] = LoadModels(internal::ReadFile((dir / "infrastructure.json").string()),
                                      internal::ReadFile((dir / "software.json").string()));
  Json settings = internal::ParseJson(internal::ReadFile((dir / "config.json").string()), "config.json");
  Json cands = internal::ParseJson(internal::ReadFile((dir / "candidates.json").string()), "candidates.json");
  RuleSet rules = ParseRules(settings.at("rules"));
  HardwareScope scope = ParseHardwareScope(settings.at("hardwareScope").get<std::string>());
  OptionSpace space(infra, software, cands.at("candidates").get<CandidateSets>(), scope);
  auto offsets = space.PlacementOffsets();

  std::uint64_t index = ParseOptionId(optionId);
  if (index >= offsets.back()) {
    throw Error(ErrorCode::kUnknownOption,
                optionId + " is outside the explored space of " + std::to_string(offsets.back()) + " options");
  }
  CompactOption option = space.Decode(index, offsets);
  DesignOption design = space.ToDesignOption(option);
  Simulator sim(infra, software, rules.linkReuse);
  CompactMetrics m = sim.Evaluate(option);
  SimulationMetrics full = sim.Expand(option, m);

  std::string out = optionId + "\n\nplacement:\n";
  for (const auto &[svc, node] : design.placement) out += "  " + svc + " on " + node + "\n";
  out += "hardware:\n";
  for (const auto &[node, hw] : design.hardware) {
    const auto &n = infra.nodes[infra.NodeIndex(node)];
    for (const auto &o : n.hardwareOptions) {
      if (o.id != hw) continue;
      out += "  " + node + ": " + hw + " (rPI " + Fmt(o.rpi) + ", " + FormatBytes(o.memoryBytes) + ", " +
             Fmt(o.priceMonth) + " per month)\n";
    }
  }

  out += "\nstages:\n";
  out += "  best-practices: passed, every service sits inside its candidate set\n";
  if (m.feasible) {
    out += "  feasibility: passed\n";
  } else {
    out += "  feasibility: failed\n";
    for (const auto &v : full.violations) {
      if (v.kind != "slo") out += "    " + v.kind + " on " + v.subject + ": " + v.detail + "\n";
    }
  }
  if (!m.feasible) {
    out += "  slo: not reached\n";
  } else if (m.sloOk) {
    out += "  slo: passed\n";
  } else {
    out += "  slo: failed\n";
    for (const auto &v : full.violations) {
      if (v.kind == "slo") out += "    " + v.subject + ": " + v.detail + "\n";
    }
  }

  auto shortlist = Optional(dir / "shortlist.json");
  auto emulation = Optional(dir / "emulation.json");
  auto recommendation = Optional(dir / "recommendation.json");
  bool shortlisted = false;
  if (!m.sloOk) {
    out += "  percentile: not reached\n";
  } else if (!shortlist) {
    out += "  percentile: not run\n";
  } else {
    const Json &opts = shortlist->at("options");
    std::string key = space.EffectiveKey(option);
    std::string twin;
    double cutoff = 0.0;
    for (size_t i = 0; i < opts.size(); ++i) {
      const Json &o = opts[i];
      cutoff = std::max(cutoff, o.at("simulated").at("totalCostMonth").get<double>());
      if (o.at("id") == optionId) {
        shortlisted = true;
        out += "  percentile: selected, rank " + std::to_string(i + 1) + " of " + std::to_string(opts.size()) +
               " among " + std::to_string(shortlist->at("distinct").get<std::uint64_t>()) + " distinct designs\n";
      } else if (space.EffectiveKey(space.Decode(o.at("index").get<std::uint64_t>(), offsets)) == key) {
        twin = o.at("id").get<std::string>();
      }
    }
    if (!shortlisted && !twin.empty()) {
      out += "  percentile: same effective design as " + twin + ", which was selected in its place\n";
    } else if (!shortlisted) {
      out += "  percentile: not selected, cost " + Fmt(m.totalCostMonth) + " is above the shortlist cutoff " +
             Fmt(cutoff) + "\n";
    }
  }

  const Json *emulated = nullptr;
  if (emulation) emulated = FindById(emulation->at("options"), optionId);
  if (!shortlisted) {
    out += "  emulation: not reached\n";
  } else if (!emulation) {
    out += "  emulation: not run\n";
  } else if (emulated && emulated->contains("failure")) {
    out += "  emulation: failed, " + emulated->at("failure").get<std::string>() + "\n";
  } else if (emulated) {
    const Json &rep = emulated->at("report");
    if (rep.at("sloMet").get<bool>()) {
      out += "  emulation: measured, every SLO met\n";
    } else {
      out += "  emulation: measured, SLO missed\n";
      for (const auto &[path, s] : rep.at("perPath").items()) {
        if (!s.at("sloMet").get<bool>()) {
          out += "    " + path + ": mean " + Fmt(s.at("meanMs").get<double>()) + " ms against " +
                 Fmt(s.at("sloMs").get<double>()) + " ms\n";
        }
      }
    }
    if (const Json *r = FindById(emulation->at("ranking"), optionId)) {
      out += "    ranked " + std::to_string(r->at("rank").get<int>()) + " of " +
             std::to_string(emulation->at("ranking").size()) + "\n";
    }
  }
  if (recommendation) {
    std::string winner = recommendation->at("id").get<std::string>();
    out += winner == optionId ? "  final: recommended\n" : "  final: not recommended (" + winner + " was)\n";
  } else {
    out += "  final: not run\n";
  }

  out += "\npaths:\n";
  for (const auto &p : software.paths) {
    const PathMetrics &pm = full.perPath.at(p.id);
    out += "  " + p.id + ": processing " + Fmt(pm.processingTimeMs) + " ms + transmission " +
           Fmt(pm.transmissionTimeMs) + " ms = " + Fmt(pm.endToEndMs) + " ms; SLO " + Fmt(p.sloLatencyMs) +
           " ms, margin " + Fmt(p.sloLatencyMs - pm.endToEndMs) + " ms\n";
  }

  out += "\ncost per month:\n  processing " + Fmt(full.processingCostMonth) + " (";
  std::vector<int> used = space.UsedNodes(option.nodeOf);
  for (size_t i = 0; i < used.size(); ++i) {
    const auto &n = infra.nodes[used[i]];
    const auto &o = n.hardwareOptions[option.hwOf[used[i]]];
    out += (i ? ", " : "") + n.id + " " + Fmt(o.priceMonth);
  }
  out += ")\n  transmission " + Fmt(full.transmissionCostMonth) + "\n  total " + Fmt(full.totalCostMonth) + "\n";

  if (emulated && emulated->contains("report")) {
    out += "\nemulation (median run per path):\n";
    for (const auto &[path, s] : emulated->at("report").at("perPath").items()) {
      out += "  " + path + ": mean " + Fmt(s.at("meanMs").get<double>()) + " ms, stddev " +
             Fmt(s.at("stddevMs").get<double>()) + " ms, " + std::to_string(s.at("sampleCount").get<std::uint64_t>()) +
             " samples";
      if (!s.at("cov").is_null()) out += ", CoV " + Fmt(s.at("cov").get<double>() * 100.0) + "%";
      out += "\n";
    }
  }
  return out;
}

}  // namespace fogforge
