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

#include "fogforge/emulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include "fogforge/error.hpp"

namespace fogforge {

namespace {

using Clock = std::chrono::steady_clock;

volatile std::uint32_t g_primeLimit = 1200;
volatile std::uint64_t g_primeSink = 0;

std::uint64_t PrimeBlock() {
  std::uint32_t limit = g_primeLimit;
  std::uint64_t count = 0;
  for (std::uint32_t n = 2; n < limit; ++n) {
    bool prime = true;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        prime = false;
        break;
      }
    }
    count += prime;
  }
  return count;
}

double Ms(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

Clock::duration FromMs(double ms) {
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double, std::milli>(ms));
}

LatencyStats Stats(const std::vector<double> &xs) {
  LatencyStats s;
  s.sampleCount = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.meanMs = sum / xs.size();
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - s.meanMs) * (x - s.meanMs);
    s.stddevMs = std::sqrt(sq / (xs.size() - 1));
  }
  return s;
}

Json ToJson(const LatencyStats &s) {
  return {{"meanMs", s.meanMs}, {"stddevMs", s.stddevMs}, {"sampleCount", s.sampleCount}};
}

[[noreturn]] void Invalid(const std::string &invariant, const std::string &detail) {
  throw Error(ErrorCode::kValidation, "invariant '" + invariant + "' violated: " + detail);
}

std::vector<std::pair<double, double>> LoadTrace(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open trace file '" + path + "'");
  std::vector<std::pair<double, double>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double offset = 0.0;
    double bytes = 0.0;
    if (!(fields >> offset >> bytes)) {
      if (out.empty()) continue;  // header row
      throw Error(ErrorCode::kSchema, "trace '" + path + "': malformed line '" + line + "'");
    }
    out.emplace_back(offset, bytes);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  return out;
}

struct Message {
  std::uint64_t id = 0;
  Clock::time_point origin;
  double bytes = 0.0;
  std::vector<int> trail;  // actor indices visited
};

class MessageQueue {
 public:
  void Push(Message m) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      items_.push_back(std::move(m));
    }
    cv_.notify_one();
  }

  bool Pop(Message &out, const std::atomic<bool> &stop) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return stop.load() || !items_.empty(); });
    if (stop.load()) return false;
    out = std::move(items_.front());
    items_.pop_front();
    return true;
  }

  void Wake() {
    std::lock_guard<std::mutex> lock(mu_);
    cv_.notify_all();
  }

  std::size_t Size() {
    std::lock_guard<std::mutex> lock(mu_);
    return items_.size();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> items_;
};

struct HopEvent {
  Clock::time_point at;
  std::uint64_t seq = 0;
  int channel = 0;
  std::size_t hop = 0;  // next link to enter; == hops.size() means delivery
  Message msg;
};

struct LaterEvent {
  bool operator()(const HopEvent &a, const HopEvent &b) const {
    if (a.at != b.at) return a.at > b.at;
    return a.seq > b.seq;
  }
};

struct LinkState {
  double tokens = 0.0;
  Clock::time_point refilled;
  Clock::time_point lastDeparture;
};

/* One repeat of an experiment. */
class Run {
 public:
  Run(const VirtualTestbed &testbed, const WorkloadSpec &spec, const RunOptions &options)
      : tb_(testbed), spec_(spec), options_(options), queues_(testbed.actors.size()) {
    for (size_t p = 0; p < tb_.paths.size(); ++p) {
      for (size_t c = 0; c < tb_.paths[p].chains.size(); ++c) chainOf_[tb_.paths[p].chains[c].actors].push_back({p, c});
    }
    latencies_.resize(tb_.paths.size());
    samples_.resize(tb_.paths.size());
    for (size_t p = 0; p < tb_.paths.size(); ++p) {
      latencies_[p].resize(tb_.paths[p].chains.size());
      samples_[p].resize(tb_.paths[p].chains.size());
    }
  }

  RunReport Execute() {
    start_ = Clock::now() + std::chrono::milliseconds(20);
    warmupEnd_ = start_ + FromMs(spec_.Warmup() * 1000.0);
    auto end = start_ + FromMs(spec_.durationSec * 1000.0);
    for (const auto &l : tb_.links) {
      LinkState s;
      s.tokens = l.bandwidthBytesPerSec;
      s.refilled = start_;
      s.lastDeparture = start_;
      links_.push_back(s);
    }
    std::vector<std::thread> threads;
    threads.emplace_back([this] { NetworkLoop(); });
    for (size_t a = 0; a < tb_.actors.size(); ++a) {
      if (tb_.actors[a].kind == ComponentKind::kService) threads.emplace_back([this, a] { ServiceLoop(a); });
      if (tb_.actors[a].kind == ComponentKind::kSource) threads.emplace_back([this, a] { SourceLoop(a); });
    }
    std::this_thread::sleep_until(end);
    {
      std::lock_guard<std::mutex> lock(stopMu_);
      stop_ = true;
    }
    stopCv_.notify_all();
    {
      std::lock_guard<std::mutex> lock(netMu_);
      netCv_.notify_all();
    }
    for (auto &q : queues_) q.Wake();
    for (auto &t : threads) t.join();

    RunReport report;
    report.wallSec = std::chrono::duration<double>(Clock::now() - start_).count();
    report.emitted = emitted_.load();
    report.received = received_.load();
    std::uint64_t inFlight = abandoned_.load() + heap_.size();
    for (auto &q : queues_) inFlight += q.Size();
    report.inFlight = inFlight;
    for (size_t p = 0; p < tb_.paths.size(); ++p) {
      const auto &plan = tb_.paths[p];
      std::vector<LatencyStats> chains;
      for (const auto &xs : latencies_[p]) chains.push_back(Stats(xs));
      LatencyStats worst;
      bool starved = false;
      for (size_t c = 0; c < chains.size(); ++c) {
        if (chains[c].sampleCount == 0) starved = true;
        if (c == 0 || chains[c].meanMs > worst.meanMs) worst = chains[c];
      }
      if (starved || chains.empty()) {
        throw Error(ErrorCode::kStarvation, "path '" + plan.id + "' recorded no samples after warmup");
      }
      report.perPath[plan.id] = worst;
      report.perChain[plan.id] = chains;
      if (options_.keepSamples) report.samples[plan.id] = samples_[p];
    }
    return report;
  }

 private:
  bool WaitUntil(Clock::time_point t) {
    std::unique_lock<std::mutex> lock(stopMu_);
    return !stopCv_.wait_until(lock, t, [&] { return stop_.load(); });
  }

  void Send(int channel, Message msg) {
    const Channel &ch = tb_.channels[channel];
    if (ch.hops.empty()) {
      Deliver(ch.consumer, std::move(msg));
      return;
    }
    {
      std::lock_guard<std::mutex> lock(netMu_);
      heap_.push(HopEvent{Clock::now(), seq_++, channel, 0, std::move(msg)});
    }
    netCv_.notify_one();
  }

  void Deliver(int actor, Message msg) {
    msg.trail.push_back(actor);
    if (tb_.actors[actor].kind != ComponentKind::kSink) {
      queues_[actor].Push(std::move(msg));
      return;
    }
    auto now = Clock::now();
    std::lock_guard<std::mutex> lock(sampleMu_);
    ++received_;
    if (msg.origin < warmupEnd_) return;
    auto it = chainOf_.find(msg.trail);
    if (it == chainOf_.end()) return;
    double latency = Ms(now - msg.origin);
    for (auto [p, c] : it->second) {
      latencies_[p][c].push_back(latency);
      if (options_.keepSamples) samples_[p][c].push_back({msg.id, Ms(msg.origin - start_), latency});
    }
  }

  void NetworkLoop() {
    std::unique_lock<std::mutex> lock(netMu_);
    while (!stop_.load()) {
      if (heap_.empty()) {
        netCv_.wait(lock, [&] { return stop_.load() || !heap_.empty(); });
        continue;
      }
      auto at = heap_.top().at;
      if (Clock::now() < at) {
        netCv_.wait_until(lock, at);
        continue;
      }
      HopEvent ev = std::move(const_cast<HopEvent &>(heap_.top()));
      heap_.pop();
      const Channel &ch = tb_.channels[ev.channel];
      if (ev.hop == ch.hops.size()) {
        lock.unlock();
        Deliver(ch.consumer, std::move(ev.msg));
        lock.lock();
        continue;
      }
      int l = ch.hops[ev.hop];
      const VirtualLink &link = tb_.links[l];
      LinkState &st = links_[l];
      double bw = link.bandwidthBytesPerSec;
      auto depart = std::max(ev.at, st.lastDeparture);
      st.tokens = std::min(bw, st.tokens + bw * std::chrono::duration<double>(depart - st.refilled).count());
      st.refilled = depart;
      double need = std::min(ev.msg.bytes, bw);
      if (bw > 0.0 && st.tokens < need) {
        depart += std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>((need - st.tokens) / bw));
        st.tokens = need;
        st.refilled = depart;
      }
      st.tokens -= ev.msg.bytes;
      st.lastDeparture = depart;
      ev.at = depart + FromMs(link.latencyMs);
      ev.seq = seq_++;
      ++ev.hop;
      heap_.push(std::move(ev));
    }
  }

  void ServiceLoop(size_t a) {
    const Actor &actor = tb_.actors[a];
    Message msg;
    while (queues_[a].Pop(msg, stop_)) {
      auto begin = Clock::now();
      if (options_.serviceHook) {
        options_.serviceHook(actor.component, msg.bytes);
      } else if (tb_.computeMode == ComputeMode::kTimed) {
        WaitUntil(begin + FromMs(actor.serviceTimeMs));
      } else {
        Burn(actor.workUnits, &stop_);
      }
      if (stop_.load()) {
        ++abandoned_;
        return;
      }
      msg.bytes *= actor.outputRatio;
      Fanout(actor, std::move(msg));
    }
  }

  void Fanout(const Actor &actor, Message msg) {
    if (actor.outputs.size() > 1) emitted_ += actor.outputs.size() - 1;
    for (size_t k = 0; k < actor.outputs.size(); ++k) {
      if (k + 1 == actor.outputs.size()) {
        Send(actor.outputs[k], std::move(msg));
      } else {
        Send(actor.outputs[k], msg);
      }
    }
  }

  void SourceLoop(size_t a) {
    const Actor &actor = tb_.actors[a];
    auto it = spec_.sources.find(actor.component);
    SourceWorkload w = it != spec_.sources.end() ? it->second : SourceWorkload{};
    double rate = w.rateBytesPerSec.value_or(actor.rateBytesPerSec);
    double size = w.messageBytes > 0.0 ? w.messageBytes : rate / 10.0;
    auto emit = [&](double bytes) {
      Message m;
      m.id = nextId_++;
      m.origin = Clock::now();
      m.bytes = bytes;
      m.trail.push_back(static_cast<int>(a));
      ++emitted_;
      Fanout(actor, std::move(m));
    };
    if (w.mode == WorkloadMode::kTraceReplay) {
      for (const auto &[offset, bytes] : w.trace) {
        if (!WaitUntil(start_ + FromMs(offset * 1000.0))) return;
        emit(bytes);
      }
      return;
    }
    double intervalMs = rate > 0.0 ? size / rate * 1000.0 : 0.0;
    if (intervalMs <= 0.0) return;
    // Free-running sources are not phase-locked; stagger them deterministically.
    double phaseMs = w.phaseSec ? *w.phaseSec * 1000.0
                                : intervalMs * std::fmod(static_cast<double>(a + 1) * 0.6180339887498949, 1.0);
    for (std::uint64_t k = 0;; ++k) {
      if (!WaitUntil(start_ + FromMs(phaseMs + intervalMs * static_cast<double>(k)))) return;
      emit(size);
    }
  }

  const VirtualTestbed &tb_;
  const WorkloadSpec &spec_;
  const RunOptions &options_;
  std::vector<MessageQueue> queues_;
  std::map<std::vector<int>, std::vector<std::pair<size_t, size_t>>> chainOf_;

  Clock::time_point start_;
  Clock::time_point warmupEnd_;
  std::atomic<bool> stop_{false};
  std::mutex stopMu_;
  std::condition_variable stopCv_;

  std::mutex netMu_;
  std::condition_variable netCv_;
  std::priority_queue<HopEvent, std::vector<HopEvent>, LaterEvent> heap_;
  std::vector<LinkState> links_;
  std::uint64_t seq_ = 0;

  std::mutex sampleMu_;
  std::vector<std::vector<std::vector<double>>> latencies_;
  std::vector<std::vector<std::vector<Sample>>> samples_;

  std::atomic<std::uint64_t> nextId_{1};
  std::atomic<std::uint64_t> emitted_{0};
  std::atomic<std::uint64_t> received_{0};
  std::atomic<std::uint64_t> abandoned_{0};
};

}  // namespace

void Burn(std::uint64_t units, const std::atomic<bool> *stop) {
  for (std::uint64_t i = 0; i < units; ++i) {
    if (stop && (i & 7) == 0 && stop->load(std::memory_order_relaxed)) return;
    g_primeSink = g_primeSink + PrimeBlock();
  }
}

CalibrationProfile Calibrate(int referenceWorkUnits, int trials) {
  if (referenceWorkUnits < 1 || trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs at least one unit and one trial");
  }
  Burn(static_cast<std::uint64_t>(referenceWorkUnits));
  CalibrationProfile profile;
  profile.trials = trials;
  profile.referenceWorkUnits = referenceWorkUnits;
  // A transient blip on a quiet host is re-measured before giving up.
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<double> rates;
    for (int t = 0; t < trials; ++t) {
      std::uint64_t done = 0;
      auto begin = Clock::now();
      double elapsed = 0.0;
      do {
        Burn(static_cast<std::uint64_t>(referenceWorkUnits));
        done += static_cast<std::uint64_t>(referenceWorkUnits);
        elapsed = Ms(Clock::now() - begin);
      } while (elapsed < 40.0);
      rates.push_back(static_cast<double>(done) / elapsed);
    }
    std::vector<double> sorted = rates;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    double deviation = 0.0;
    for (double r : rates) deviation = std::max(deviation, std::fabs(r - median) / median);
    profile.unitsPerMs = median;
    profile.deviation = deviation;
    if (deviation <= 0.10) return profile;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%%", profile.deviation * 100.0);
  throw Error(ErrorCode::kCalibrationUnstable, std::string("calibration trials deviate by ") + buf);
}

std::uint64_t WorkUnits(const CalibrationProfile &profile, double refDelayMs, double rpi) {
  if (rpi <= 0.0) throw Error(ErrorCode::kInvalidArgument, "rpi must be positive");
  return static_cast<std::uint64_t>(std::llround(profile.unitsPerMs * refDelayMs / rpi));
}

Json ToJson(const CalibrationProfile &profile) {
  return {{"unitsPerMs", profile.unitsPerMs},
          {"deviation", profile.deviation},
          {"trials", profile.trials},
          {"referenceWorkUnits", profile.referenceWorkUnits}};
}

const char *ToString(ComputeMode mode) { return mode == ComputeMode::kTimed ? "timed" : "busy"; }

ComputeMode ParseComputeMode(const std::string &s) {
  if (s == "busy") return ComputeMode::kBusy;
  if (s == "timed") return ComputeMode::kTimed;
  throw Error(ErrorCode::kSchema, "computeMode must be 'busy' or 'timed', got '" + s + "'");
}

WorkloadSpec ParseWorkload(const Json &doc, const std::string &baseDir) {
  WorkloadSpec spec;
  if (doc.is_null()) return spec;
  if (!doc.is_object()) throw Error(ErrorCode::kSchema, "emulation: expected an object");
  auto number = [](const Json &v, const std::string &where) {
    if (!v.is_number()) throw Error(ErrorCode::kSchema, "emulation: '" + where + "' must be a number");
    return v.get<double>();
  };
  for (const auto &[key, v] : doc.items()) {
    if (key == "enabled") {
      continue;
    } else if (key == "durationSec") {
      spec.durationSec = number(v, key);
    } else if (key == "warmupSec") {
      spec.warmupSec = number(v, key);
    } else if (key == "repeats") {
      if (!v.is_number_integer()) throw Error(ErrorCode::kSchema, "emulation: 'repeats' must be an integer");
      spec.repeats = v.get<int>();
    } else if (key == "calibrationUnits") {
      if (!v.is_number_integer()) throw Error(ErrorCode::kSchema, "emulation: 'calibrationUnits' must be an integer");
      spec.calibrationUnits = v.get<int>();
    } else if (key == "computeMode") {
      if (!v.is_string()) throw Error(ErrorCode::kSchema, "emulation: 'computeMode' must be a string");
      spec.computeMode = ParseComputeMode(v.get<std::string>());
    } else if (key == "sources") {
      if (!v.is_object()) throw Error(ErrorCode::kSchema, "emulation: 'sources' must be an object");
      for (const auto &[id, s] : v.items()) {
        if (!s.is_object()) throw Error(ErrorCode::kSchema, "emulation.sources." + id + " must be an object");
        SourceWorkload w;
        for (const auto &[k, x] : s.items()) {
          std::string where = "sources." + id + "." + k;
          if (k == "mode") {
            std::string mode = x.is_string() ? x.get<std::string>() : "";
            if (mode == "constant-rate") {
              w.mode = WorkloadMode::kConstantRate;
            } else if (mode == "trace-replay") {
              w.mode = WorkloadMode::kTraceReplay;
            } else {
              throw Error(ErrorCode::kSchema, "emulation: '" + where + "' must be constant-rate or trace-replay");
            }
          } else if (k == "rateBytesPerSec") {
            w.rateBytesPerSec = number(x, where);
          } else if (k == "messageBytes") {
            w.messageBytes = number(x, where);
          } else if (k == "phaseSec") {
            w.phaseSec = number(x, where);
          } else if (k == "traceFile") {
            if (!x.is_string()) throw Error(ErrorCode::kSchema, "emulation: '" + where + "' must be a string");
            w.traceFile = x.get<std::string>();
          } else {
            throw Error(ErrorCode::kSchema, "emulation: unexpected field '" + where + "'");
          }
        }
        if (w.mode == WorkloadMode::kTraceReplay) {
          if (w.traceFile.empty()) throw Error(ErrorCode::kSchema, "emulation: trace-replay source '" + id + "' needs traceFile");
          std::filesystem::path p(w.traceFile);
          if (p.is_relative()) p = std::filesystem::path(baseDir) / p;
          w.trace = LoadTrace(p.string());
        }
        spec.sources[id] = std::move(w);
      }
    } else {
      throw Error(ErrorCode::kSchema, "emulation: unexpected field '" + key + "'");
    }
  }
  return spec;
}

Json ToJson(const WorkloadSpec &spec) {
  Json sources = Json::object();
  for (const auto &[id, w] : spec.sources) {
    Json j = {{"mode", w.mode == WorkloadMode::kTraceReplay ? "trace-replay" : "constant-rate"}};
    if (w.rateBytesPerSec) j["rateBytesPerSec"] = *w.rateBytesPerSec;
    if (w.messageBytes > 0.0) j["messageBytes"] = w.messageBytes;
    if (w.phaseSec) j["phaseSec"] = *w.phaseSec;
    if (!w.traceFile.empty()) j["traceFile"] = w.traceFile;
    sources[id] = j;
  }
  return {{"durationSec", spec.durationSec},
          {"warmupSec", spec.Warmup()},
          {"repeats", spec.repeats},
          {"computeMode", ToString(spec.computeMode)},
          {"calibrationUnits", spec.calibrationUnits},
          {"sources", sources}};
}

void ValidateWorkload(const WorkloadSpec &spec, const SoftwareModel &software) {
  if (!(spec.durationSec > spec.Warmup()) || spec.Warmup() < 0.0) {
    Invalid("durationSec > warmupSec >= 0", "duration " + std::to_string(spec.durationSec) + " s, warmup " +
                                               std::to_string(spec.Warmup()) + " s");
  }
  if (spec.repeats < 1) Invalid("repeats >= 1", "got " + std::to_string(spec.repeats));
  if (spec.calibrationUnits < 1) Invalid("calibrationUnits >= 1", "got " + std::to_string(spec.calibrationUnits));
  for (const auto &[id, w] : spec.sources) {
    int c = software.ComponentIndex(id);
    if (c < 0 || software.components[c].kind != ComponentKind::kSource) {
      Invalid("workload sources reference source components", "'" + id + "'");
    }
    if (w.rateBytesPerSec && *w.rateBytesPerSec <= 0.0) Invalid("rateBytesPerSec > 0", "source '" + id + "'");
    if (w.messageBytes < 0.0) Invalid("messageBytes >= 0", "source '" + id + "'");
    if (w.phaseSec && *w.phaseSec < 0.0) Invalid("phaseSec >= 0", "source '" + id + "'");
    if (w.mode == WorkloadMode::kTraceReplay && w.trace.empty()) {
      Invalid("trace-replay sources have a non-empty trace", "source '" + id + "'");
    }
  }
}

VirtualTestbed BuildTestbed(const CompactOption &option, const Simulator &simulator,
                            const CalibrationProfile &calibration, ComputeMode mode) {
  const InfrastructureModel &infra = simulator.infra();
  const SoftwareModel &software = simulator.software();
  VirtualTestbed tb;
  tb.computeMode = mode;
  std::vector<int> hosts = simulator.Hosts(option);

  std::set<int> nodeSet(hosts.begin(), hosts.end());
  std::set<int> linkSet;
  std::vector<const Route *> routes;
  for (const auto &c : software.connections) {
    const Route &r =
        simulator.routing().Get(hosts[software.ComponentIndex(c.producer)], hosts[software.ComponentIndex(c.consumer)]);
    nodeSet.insert(r.nodes.begin(), r.nodes.end());
    linkSet.insert(r.links.begin(), r.links.end());
    routes.push_back(&r);
  }
  std::map<int, int> nodeSlot;
  for (int n : nodeSet) {
    VirtualNode v;
    v.id = infra.nodes[n].id;
    int hw = option.hwOf[n];
    if (hw >= 0) {
      const auto &o = infra.nodes[n].hardwareOptions[hw];
      v.hardware = o.id;
      v.computeScale = o.rpi;
      v.memoryCap = o.memoryBytes;
    }
    nodeSlot[n] = static_cast<int>(tb.nodes.size());
    tb.nodes.push_back(v);
  }
  std::map<int, int> linkSlot;
  for (int l : linkSet) {
    linkSlot[l] = static_cast<int>(tb.links.size());
    tb.links.push_back({infra.links[l].id, infra.links[l].latencyMs, infra.links[l].bandwidthBytesPerSec});
  }
  for (size_t c = 0; c < software.components.size(); ++c) {
    const auto &comp = software.components[c];
    Actor a;
    a.component = comp.id;
    a.kind = comp.kind;
    a.node = nodeSlot[hosts[c]];
    if (comp.kind == ComponentKind::kService) {
      VirtualNode &vn = tb.nodes[a.node];
      vn.memoryDemand += comp.requiredMemoryBytes;
      a.serviceTimeMs = comp.refDelayMs / vn.computeScale;
      a.workUnits = WorkUnits(calibration, comp.refDelayMs, vn.computeScale);
      a.outputRatio = comp.outputRatio;
    } else if (comp.kind == ComponentKind::kSource) {
      a.rateBytesPerSec = comp.outputRate.value_or(0.0);
    }
    tb.actors.push_back(std::move(a));
  }
  for (size_t i = 0; i < software.connections.size(); ++i) {
    Channel ch;
    ch.producer = software.ComponentIndex(software.connections[i].producer);
    ch.consumer = software.ComponentIndex(software.connections[i].consumer);
    for (int l : routes[i]->links) ch.hops.push_back(linkSlot[l]);
    tb.actors[ch.producer].outputs.push_back(static_cast<int>(i));
    tb.channels.push_back(std::move(ch));
  }
  for (size_t p = 0; p < software.paths.size(); ++p) {
    PathPlan plan;
    plan.id = software.paths[p].id;
    plan.sloMs = software.paths[p].sloLatencyMs;
    for (auto &chain : software.PathChains(static_cast<int>(p))) plan.chains.push_back({chain});
    tb.paths.push_back(std::move(plan));
  }
  return tb;
}

VirtualTestbed BuildTestbed(const DesignOption &option, const InfrastructureModel &infra,
                            const SoftwareModel &software, const CalibrationProfile &calibration, ComputeMode mode) {
  Simulator sim(infra, software);
  return BuildTestbed(ToCompact(option, infra, software), sim, calibration, mode);
}

Json ToJson(const VirtualTestbed &testbed) {
  Json nodes = Json::array();
  for (const auto &n : testbed.nodes) {
    nodes.push_back({{"id", n.id},
                     {"hardware", n.hardware},
                     {"computeScale", n.computeScale},
                     {"memoryCap", n.memoryCap},
                     {"memoryDemand", n.memoryDemand}});
  }
  Json links = Json::array();
  for (const auto &l : testbed.links) {
    links.push_back({{"id", l.id}, {"latencyMs", l.latencyMs}, {"bandwidthBytesPerSec", l.bandwidthBytesPerSec}});
  }
  Json actors = Json::array();
  for (const auto &a : testbed.actors) {
    actors.push_back({{"component", a.component},
                      {"kind", ToString(a.kind)},
                      {"node", testbed.nodes[a.node].id},
                      {"serviceTimeMs", a.serviceTimeMs},
                      {"workUnits", a.workUnits}});
  }
  Json channels = Json::array();
  for (const auto &c : testbed.channels) {
    Json hops = Json::array();
    for (int h : c.hops) hops.push_back(testbed.links[h].id);
    channels.push_back({{"producer", testbed.actors[c.producer].component},
                        {"consumer", testbed.actors[c.consumer].component},
                        {"links", hops}});
  }
  return {{"computeMode", ToString(testbed.computeMode)},
          {"nodes", nodes},
          {"links", links},
          {"actors", actors},
          {"channels", channels}};
}

EmulationReport RunExperiment(const VirtualTestbed &testbed, const WorkloadSpec &spec, const SoftwareModel &software,
                              const RunOptions &options) {
  ValidateWorkload(spec, software);
  for (const auto &n : testbed.nodes) {
    if (n.memoryDemand > n.memoryCap) {
      throw Error(ErrorCode::kResourceExhausted, "node '" + n.id + "' (" + n.hardware + ") needs " +
                                                     FormatBytes(n.memoryDemand) + " but has " +
                                                     FormatBytes(n.memoryCap));
    }
  }
  EmulationReport report;
  for (int r = 0; r < spec.repeats; ++r) {
    Run run(testbed, spec, options);
    report.runs.push_back(run.Execute());
  }
  report.sloMet = true;
  for (const auto &plan : testbed.paths) {
    std::vector<double> means;
    for (const auto &run : report.runs) means.push_back(run.perPath.at(plan.id).meanMs);
    std::vector<int> order(means.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return means[a] < means[b]; });
    PathSummary s;
    s.medianRun = order[(order.size() - 1) / 2];
    s.median = report.runs[s.medianRun].perPath.at(plan.id);
    if (means.size() >= 2) {
      LatencyStats across = Stats(means);
      s.cov = across.meanMs > 0.0 ? across.stddevMs / across.meanMs : 0.0;
    }
    s.sloMs = plan.sloMs;
    s.sloMet = s.median.meanMs <= plan.sloMs;
    report.sloMet = report.sloMet && s.sloMet;
    report.worstMeanMs = std::max(report.worstMeanMs, s.median.meanMs);
    report.perPath[plan.id] = s;
  }
  return report;
}

Json ToJson(const EmulationReport &report) {
  Json runs = Json::array();
  for (const auto &r : report.runs) {
    Json perPath = Json::object();
    for (const auto &[id, s] : r.perPath) perPath[id] = ToJson(s);
    Json perChain = Json::object();
    for (const auto &[id, chains] : r.perChain) {
      Json arr = Json::array();
      for (const auto &s : chains) arr.push_back(ToJson(s));
      perChain[id] = arr;
    }
    runs.push_back({{"perPath", perPath},
                    {"perChain", perChain},
                    {"emitted", r.emitted},
                    {"received", r.received},
                    {"inFlight", r.inFlight},
                    {"wallSec", r.wallSec}});
  }
  Json perPath = Json::object();
  for (const auto &[id, s] : report.perPath) {
    Json j = ToJson(s.median);
    j["medianRun"] = s.medianRun;
    j["cov"] = s.cov ? Json(*s.cov) : Json(nullptr);
    j["sloMs"] = s.sloMs;
    j["sloMet"] = s.sloMet;
    perPath[id] = j;
  }
  return {{"runs", runs}, {"perPath", perPath}, {"sloMet", report.sloMet}, {"worstMeanMs", report.worstMeanMs}};
}

std::vector<RankEntry> Compare(const std::vector<CompareInput> &inputs) {
  std::vector<RankEntry> out;
  for (const auto &in : inputs) {
    RankEntry e;
    e.optionId = in.optionId;
    e.index = in.index;
    e.simulatedCostMonth = in.simulatedCostMonth;
    e.measured = in.report.has_value();
    e.failure = in.failure;
    if (in.report) {
      e.sloMet = in.report->sloMet;
      e.worstMeanMs = in.report->worstMeanMs;
    } else {
      e.worstMeanMs = std::numeric_limits<double>::infinity();
    }
    out.push_back(std::move(e));
  }
  auto tier = [](const RankEntry &e) { return e.measured ? (e.sloMet ? 0 : 1) : 2; };
  std::stable_sort(out.begin(), out.end(), [&](const RankEntry &a, const RankEntry &b) {
    if (tier(a) != tier(b)) return tier(a) < tier(b);
    if (a.simulatedCostMonth != b.simulatedCostMonth) return a.simulatedCostMonth < b.simulatedCostMonth;
    if (a.worstMeanMs != b.worstMeanMs) return a.worstMeanMs < b.worstMeanMs;
    return a.index < b.index;
  });
  for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

std::string BarChartCsv(const std::vector<CompareInput> &inputs) {
  std::ostringstream os;
  os << "option,path,meanMs,stddevMs,sampleCount,sloMs,sloMet\n";
  os.precision(10);
  for (const auto &in : inputs) {
    if (!in.report) continue;
    for (const auto &[path, s] : in.report->perPath) {
      os << in.optionId << ',' << path << ',' << s.median.meanMs << ',' << s.median.stddevMs << ','
         << s.median.sampleCount << ',' << s.sloMs << ',' << (s.sloMet ? "true" : "false") << '\n';
    }
  }
  return os.str();
}

}  // namespace fogforge
