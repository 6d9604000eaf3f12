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

/* Acceptance checks A1..A8. Prints one PASS/FAIL line per check; pass names to run a subset. */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "api_fixture.hpp"
#include "emulation_fixtures.hpp"
#include "fogforge/fogforge.h"
#include "fogforge/pipeline.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace fogforge;

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Check(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void Note(const std::string &s) { notes.push_back(s); }
};

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

PipelineConfig CaseStudy(const std::string &out, bool emulation) {
  PipelineConfig c = LoadPipelineConfig(testutil::CaseStudyPath("pipeline.json"));
  c.outputDir = out;
  c.emulationEnabled = emulation;
  return c;
}

DesignOption DesignOne() {
  DesignOption d;
  d.placement = {{"adapt-machine", "packaging-controller"},
                 {"aggregate", "wireless-gateway"},
                 {"check-for-defects", "factory-dc"},
                 {"generate-dashboard", "cloud"},
                 {"predict-pickup", "factory-dc"}};
  d.hardware = {{"cloud", "c1"}, {"factory-dc", "f2"}, {"wireless-gateway", "w1"}, {"packaging-controller", "pkc1"}};
  return d;
}

void A1(Outcome &o) {
  testutil::TempDir out;
  auto t = Clock::now();
  auto p = Pipeline::Open(CaseStudy(out.str(), false));
  CountReport c = p->Count();
  double sec = Since(t);
  o.Check(c.placements == 32768, "placements " + std::to_string(c.placements) + " != 32768");
  o.Check(c.options == 7077888, "options " + std::to_string(c.options) + " != 7077888");
  o.Check(sec < 1.0, "count took " + Fmt(sec) + " s");
  o.Note("placements=" + std::to_string(c.placements) + " options=" + std::to_string(c.options) +
         " wall=" + Fmt(sec) + "s");
}

void A2(Outcome &o) {
  testutil::TempDir out;
  auto p = Pipeline::Open(CaseStudy(out.str(), false));
  const PruneResult &r = p->Prune();
  const CandidateSets expected = {
      {"check-for-defects", {"camera", "factory-dc", "production-controller", "wireless-gateway"}},
      {"adapt-machine", {"factory-dc", "packaging-controller", "sensor", "wireless-gateway"}},
      {"predict-pickup", {"cloud", "factory-dc", "office-dc"}},
      {"aggregate",
       {"camera", "factory-dc", "packaging-controller", "production-controller", "sensor", "wireless-gateway"}},
      {"generate-dashboard", {"cloud", "factory-dc", "office-dc"}}};
  o.Check(r.candidates == expected, "candidate sets differ from the expected table");
  std::string sizes;
  std::uint64_t product = 1;
  for (const char *svc : {"check-for-defects", "adapt-machine", "predict-pickup", "aggregate", "generate-dashboard"}) {
    std::size_t n = r.candidates.count(svc) ? r.candidates.at(svc).size() : 0;
    sizes += (sizes.empty() ? "" : ",") + std::to_string(n);
    product *= n;
  }
  o.Check(sizes == "4,4,3,6,3", "sizes " + sizes);
  o.Check(product == 864, "placements " + std::to_string(product));
  std::uint64_t options = p->Space().OptionCount();
  o.Check(options == 186624, "options " + std::to_string(options));
  o.Note("sizes=" + sizes + " placements=" + std::to_string(product) + " options=" + std::to_string(options));
}

void A3(Outcome &o) {
  testutil::TempDir out;
  PipelineConfig c = CaseStudy(out.str(), false);
  c.jobs = 4;
  auto p = Pipeline::Open(c);
  auto t = Clock::now();
  FunnelReport report = p->Run();
  double sec = Since(t);
  o.Check(sec <= 300.0, "funnel took " + Fmt(sec) + " s");
  const auto &s = report.stages;
  bool monotonic = true;
  for (size_t i = 1; i < s.size(); ++i) {
    monotonic = monotonic && s[i].optionsIn == s[i - 1].optionsOut && s[i].optionsOut <= s[i].optionsIn;
  }
  o.Check(monotonic, "funnel is not monotonic");
  o.Check(s.size() == 7 && s[2].optionsIn == 186624, "feasibility did not see all 186624 options");
  std::string counts;
  for (const auto &st : s) counts += (counts.empty() ? "" : " > ") + std::to_string(st.optionsOut);
  double simSec = s.size() > 2 ? s[2].wallSec : 0.0;
  o.Note("funnel " + counts + "; simulation " + Fmt(simSec) + "s, total " + Fmt(sec) + "s, 4 jobs");
}

void A4(Outcome &o) {
  std::vector<ResultRecord> records;
  std::mt19937_64 rng(215);
  for (std::uint64_t i = 0; i < 215; ++i) {
    ResultRecord r;
    r.index = i;
    r.metrics.totalCostMonth = oracle::Uniform(rng, 10.0, 500.0);
    records.push_back(r);
  }
  auto shortlist = SelectPercentile(records, 0.05);
  o.Check(shortlist.size() == 10, "215 records gave " + std::to_string(shortlist.size()));
  std::vector<double> costs;
  for (const auto &r : records) costs.push_back(r.metrics.totalCostMonth);
  std::sort(costs.begin(), costs.end());
  bool cheapest = shortlist.size() == 10;
  for (size_t i = 0; cheapest && i < shortlist.size(); ++i) cheapest = shortlist[i].metrics.totalCostMonth == costs[i];
  o.Check(cheapest, "shortlist is not the 10 cheapest");
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= 10000; ++n) {
    std::size_t expected = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(n * 0.05 + 1e-9)));
    if (PercentileCount(n, 0.05) != expected || expected != std::max<std::size_t>(1, n / 20)) ++bad;
  }
  o.Check(bad == 0, std::to_string(bad) + " property mismatches");

  testutil::TempDir out;
  auto p = Pipeline::Open(CaseStudy(out.str(), false));
  std::size_t slo = p->SloConforming().size();
  std::size_t shortlisted = p->Shortlist().size();
  o.Check(shortlisted == 10, "case-study shortlist has " + std::to_string(shortlisted));
  o.Note("215 -> " + std::to_string(shortlist.size()) + "; n=1..10000 property ok=" + (bad == 0 ? "yes" : "no") +
         "; case study " + std::to_string(slo) + " SLO-conforming -> " + std::to_string(shortlisted));
}

double RelErr(double got, double want) {
  double scale = std::max({std::fabs(got), std::fabs(want), 1e-300});
  return got == want ? 0.0 : std::fabs(got - want) / scale;
}

void A5(Outcome &o) {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  int mismatched = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    oracle::Instance inst = oracle::RandomInstance(rng, trial % 2 == 0);
    auto [infra, software] = LoadModels(inst.infra.dump(), inst.software.dump());
    DesignOption option = oracle::RandomOption(rng, infra, software);
    oracle::Metrics want = oracle::Evaluate(inst, infra, software, option);
    SimulationMetrics got = Simulate(option, infra, software);
    double err = std::max({RelErr(got.processingCostMonth, want.processingCost),
                           RelErr(got.transmissionCostMonth, want.transmissionCost),
                           RelErr(got.totalCostMonth, want.processingCost + want.transmissionCost)});
    for (const auto &[path, e2e] : want.endToEnd) err = std::max(err, RelErr(got.perPath.at(path).endToEndMs, e2e));
    std::set<std::string> kinds;
    for (const auto &v : got.violations) {
      if (v.kind != "slo") kinds.insert(v.kind + ":" + v.subject);
    }
    worst = std::max(worst, err);
    if (err > 1e-9 || got.feasible != want.feasible || kinds != want.violations) ++mismatched;
  }
  o.Check(mismatched == 0, std::to_string(mismatched) + " of 1000 instances differ from the oracle");

  auto [infra, software] = testutil::CaseStudyModels();
  SimulationMetrics m = Simulate(DesignOne(), infra, software);
  const std::vector<std::pair<std::string, double>> golden = {{"A1", 32.01}, {"A2", 12}, {"A3", 106}, {"A4", 266}};
  for (const auto &[path, ms] : golden) {
    o.Check(RelErr(m.perPath.at(path).endToEndMs, ms) <= 1e-9,
            path + " = " + Fmt(m.perPath.at(path).endToEndMs) + " ms, golden " + Fmt(ms));
  }
  o.Check(RelErr(m.totalCostMonth, 152.60121) <= 1e-9, "cost " + Fmt(m.totalCostMonth) + ", golden 152.60121");
  o.Note("1000 instances, max rel err " + Fmt(worst) + "; design 1: A1 " + Fmt(m.perPath.at("A1").endToEndMs) +
         " ms, cost " + Fmt(m.totalCostMonth));
}

void A6(Outcome &o) {
  using namespace emufix;
  const double injected = kHopAB + kHopBC;
  CalibrationProfile cal = Calibrate();

  auto t = Clock::now();
  double minSample = 1e300;
  for (ComputeMode mode : {ComputeMode::kBusy, ComputeMode::kTimed}) {
    auto [infra, software] = ThreeHop(0.0);
    RunOptions keep;
    keep.keepSamples = true;
    auto rep = RunExperiment(BuildTestbed(ThreeHopOption(), infra, software, cal, mode), ShortSpec(mode, 5.0, 2),
                             software, keep);
    for (const auto &run : rep.runs) {
      for (const auto &chain : run.samples.at("P")) {
        for (const auto &s : chain) minSample = std::min(minSample, s.latencyMs);
      }
    }
  }
  o.Check(minSample >= injected, "(i) a sample measured " + Fmt(minSample) + " ms < " + Fmt(injected) + " ms injected");
  double t1 = Since(t);

  t = Clock::now();
  auto [infra0, software0] = ThreeHop(0.0);
  auto [infra1, software1] = ThreeHop(50.0);
  WorkloadSpec spec = ShortSpec(ComputeMode::kBusy, 10.0, 1);
  auto base = RunExperiment(BuildTestbed(ThreeHopOption(), infra0, software0, cal, ComputeMode::kBusy), spec, software0);
  auto moved = RunExperiment(BuildTestbed(ThreeHopOption(), infra1, software1, cal, ComputeMode::kBusy), spec, software1);
  double shift = moved.perPath.at("P").median.meanMs - base.perPath.at("P").median.meanMs;
  o.Check(shift >= 40.0 && shift <= 60.0, "(ii) shift " + Fmt(shift) + " ms outside 50 +- 20%");
  double t2 = Since(t);

  // (iii) case-study design in its configured compute mode, then busy mode on the single-service chain
  auto [infra, software] = testutil::CaseStudyModels();
  PipelineConfig config = CaseStudy(".", true);
  double t3 = 0.0;
  auto covCheck = [&](const VirtualTestbed &tb, WorkloadSpec w, const SoftwareModel &sw, const std::string &label) {
    auto start = Clock::now();
    w.durationSec = 60.0;
    w.warmupSec = 6.0;
    w.repeats = 3;
    w.computeMode = tb.computeMode;
    auto rep = RunExperiment(tb, w, sw);
    std::string covs;
    for (const auto &[path, s] : rep.perPath) {
      double cov = s.cov.value_or(1.0);
      o.Check(cov <= 0.10, "(iii) " + label + " " + path + " CoV " + Fmt(cov * 100.0) + "% > 10%");
      covs += " " + path + "=" + Fmt(cov * 100.0) + "%";
    }
    t3 = std::max(t3, Since(start));
    return label + covs;
  };
  ComputeMode configured = config.workload.computeMode;
  std::string covs = covCheck(BuildTestbed(DesignOne(), infra, software, cal, configured), config.workload, software,
                              std::string("case study (") + ToString(configured) + ")");
  covs += ", " + covCheck(BuildTestbed(ThreeHopOption(), infra0, software0, cal, ComputeMode::kBusy),
                          ShortSpec(ComputeMode::kBusy, 60.0, 3), software0, "chain (busy)");

  t = Clock::now();
  bool exhausted = false;
  std::string detail;
  {
    DesignOption crowded = DesignOne();
    crowded.placement["check-for-defects"] = "camera";
    crowded.hardware["camera"] = "cam2";
    SimulationMetrics m = Simulate(crowded, infra, software);
    bool memoryViolation = std::any_of(m.violations.begin(), m.violations.end(),
                                       [](const Violation &v) { return v.kind == "memory"; });
    o.Check(memoryViolation, "(iv) fixture design is not over memory");
    WorkloadSpec brief = config.workload;
    brief.durationSec = 1.0;
    brief.repeats = 1;
    try {
      RunExperiment(BuildTestbed(crowded, infra, software, cal, ComputeMode::kTimed), brief, software);
    } catch (const Error &e) {
      exhausted = e.code() == ErrorCode::kResourceExhausted;
      detail = e.what();
    }
  }
  o.Check(exhausted, "(iv) over-memory placement gave '" + detail + "'");
  double t4 = Since(t);
  for (double sec : {t1, t2, t3, t4}) o.Check(sec <= 300.0, "a property check took " + Fmt(sec) + " s");

  o.Note("(i) min sample " + Fmt(minSample) + " >= " + Fmt(injected) + " ms; (ii) shift " + Fmt(shift) +
         " ms; (iii) CoV " + covs + "; (iv) " + detail + "; checks took " + Fmt(t1) + "/" + Fmt(t2) + "/" + Fmt(t3) +
         "/" + Fmt(t4) + " s");
}

/* `fogforge run` into dir; returns the exit status. */
int CliRun(const std::string &dir) {
  std::string cmd = std::string("\"") + FOGFORGE_CLI_PATH + "\" run --config \"" +
                    testutil::CaseStudyPath("pipeline.json") + "\" --out \"" + dir + "\" > \"" + dir +
                    ".log\" 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cliFunnel;  // from A7, reused by A8

void A7(Outcome &o) {
  testutil::TempDir root;
  std::string a = (root.path() / "a").string(), b = (root.path() / "b").string();
  int ra = CliRun(a), rb = CliRun(b);
  o.Check(ra == 0 && rb == 0, "cli exit codes " + std::to_string(ra) + ", " + std::to_string(rb) + ": " +
                                   testutil::ReadText(a + ".log") + testutil::ReadText(b + ".log"));
  if (ra != 0 || rb != 0) return;
  std::string fa = testutil::ReadText(std::filesystem::path(a) / "funnel.json");
  std::string fb = testutil::ReadText(std::filesystem::path(b) / "funnel.json");
  o.Check(fa == fb, "funnel.json differs between runs");
  Json ja = Json::parse(fa), ja2 = testutil::LoadJson(std::filesystem::path(a) / "recommendation.json");
  Json jb2 = testutil::LoadJson(std::filesystem::path(b) / "recommendation.json");
  o.Check(ja2["id"] == jb2["id"], "recommendations differ: " + ja2["id"].dump() + " vs " + jb2["id"].dump());
  std::string counts;
  for (const auto &st : ja["stages"]) counts += (counts.empty() ? "" : " > ") + st["optionsOut"].dump();
  o.Note("two runs: funnel " + counts + ", final " + ja2["id"].get<std::string>() + ", funnel.json identical=" +
         (fa == fb ? "yes" : "no"));
  cliFunnel = fa;
}

void A8(Outcome &o) {
  if (cliFunnel.empty()) {
    testutil::TempDir root;
    std::string dir = (root.path() / "cli").string();
    int rc = CliRun(dir);
    o.Check(rc == 0, "cli exit code " + std::to_string(rc));
    if (rc != 0) return;
    cliFunnel = testutil::ReadText(std::filesystem::path(dir) / "funnel.json");
  }
  testutil::TempDir data;
  apifix::LiveServer server(data.str());
  auto &c = server.client();
  auto created = c.Post("/projects", apifix::CaseStudyProject(true).dump(), "application/json");
  o.Check(created && created->status == 201, "project creation failed");
  if (!created || created->status != 201) return;
  std::string project = Json::parse(created->body)["id"];
  auto started = c.Post("/projects/" + project + "/runs", "", "application/json");
  o.Check(started && started->status == 202, "run start failed");
  if (!started || started->status != 202) return;
  std::string runId = Json::parse(started->body)["runId"];
  Json run = apifix::WaitForRun(c, runId, 900);
  o.Check(run["status"] == "done", "api run ended " + run.dump());
  auto funnel = c.Get("/runs/" + runId + "/funnel");
  o.Check(funnel && funnel->status == 200, "GET funnel failed");
  if (!funnel || funnel->status != 200) return;
  o.Check(funnel->body == cliFunnel, "API funnel differs from the CLI funnel");
  o.Note("API funnel " + std::to_string(funnel->body.size()) + " bytes, identical to CLI=" +
         (funnel->body == cliFunnel ? "yes" : "no"));
}

}  // namespace

int main(int argc, char **argv) {
  ff_set_log_level("error");
  const std::vector<std::pair<std::string, std::function<void(Outcome &)>>> checks = {
      {"A1", A1}, {"A2", A2}, {"A3", A3}, {"A4", A4}, {"A5", A5}, {"A6", A6}, {"A7", A7}, {"A8", A8}};
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto &[name, fn] : checks) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    auto t = Clock::now();
    try {
      fn(o);
    } catch (const std::exception &e) {
      o.pass = false;
      o.notes.push_back(std::string("error: ") + e.what());
    }
    std::string notes;
    for (const auto &n : o.notes) notes += (notes.empty() ? "" : "; ") + n;
    std::printf("%s %s (%.1fs) %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", Since(t), notes.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
