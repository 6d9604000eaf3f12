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

#ifndef FOGFORGE_TESTS_HELPERS_HPP_
#define FOGFORGE_TESTS_HELPERS_HPP_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include <unistd.h>

#include "fogforge/bestpractices.hpp"
#include "fogforge/error.hpp"
#include "fogforge/model.hpp"

namespace testutil {

using fogforge::Json;

inline std::string CaseStudyPath(const std::string &file) {
  return std::string(FOGFORGE_CASESTUDY_DIR) + "/" + file;
}

inline std::string ReadText(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Json LoadJson(const std::filesystem::path &path) { return Json::parse(ReadText(path)); }

inline void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::pair<fogforge::InfrastructureModel, fogforge::SoftwareModel> CaseStudyModels() {
  return fogforge::LoadModels(ReadText(CaseStudyPath("infrastructure.json")), ReadText(CaseStudyPath("software.json")));
}

inline Json CaseStudyConfig() { return LoadJson(CaseStudyPath("pipeline.json")); }

inline fogforge::RuleSet CaseStudyRules() { return fogforge::ParseRules(CaseStudyConfig()["rules"]); }

/* Unique scratch directory, removed on destruction. */
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fogforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline Json Node(const std::string &id, const std::string &tier, Json hardware, Json pinned = Json::array()) {
  return {{"id", id}, {"name", id}, {"tier", tier}, {"pinned", std::move(pinned)}, {"hardwareOptions", std::move(hardware)}};
}

inline Json Hw(const std::string &id, double rpi, double memoryBytes, double priceMonth) {
  return {{"id", id}, {"rpi", rpi}, {"memoryBytes", memoryBytes}, {"priceMonth", priceMonth}};
}

inline Json Link(const std::string &id, const std::string &a, const std::string &b, double latencyMs,
                 double bandwidth, double price) {
  return {{"id", id},
          {"a", a},
          {"b", b},
          {"latencyMs", latencyMs},
          {"bandwidthBytesPerSec", bandwidth},
          {"bandwidthPriceMonthPerBytePerSec", price}};
}

/*
 * Three-tier line: dev -- gw -- cloud. Source "src" on dev, sink "sink" on
 * dev, one service "svc" between them on path P.
 */
inline std::pair<Json, Json> LineFixture() {
  Json infra = {{"tierOrder", {"device", "gateway", "cloud"}},
                {"nodes",
                 {Node("dev", "device", {Hw("d1", 0.5, 100e6, 1.0)}, {"src", "sink"}),
                  Node("gw", "gateway", {Hw("g1", 1.0, 500e6, 5.0), Hw("g2", 2.0, 1000e6, 9.0)}),
                  Node("cloud", "cloud", {Hw("c1", 4.0, 8000e6, 20.0)})}},
                {"links", {Link("l1", "dev", "gw", 2.0, 1e6, 0.001), Link("l2", "gw", "cloud", 30.0, 1e6, 0.0001)}}};
  Json software = {
      {"components",
       {{{"id", "src"}, {"kind", "source"}, {"outputRateBytesPerSec", 1000}, {"pinnedNode", "dev"}},
        {{"id", "svc"}, {"kind", "service"}, {"outputRatio", 0.5}, {"refDelayMs", 10}, {"requiredMemoryBytes", 50e6},
         {"role", "event-processor"}},
        {{"id", "sink"}, {"kind", "sink"}, {"pinnedNode", "dev"}}}},
      {"connections", {{{"producer", "src"}, {"consumer", "svc"}}, {{"producer", "svc"}, {"consumer", "sink"}}}},
      {"paths", {{{"id", "P"}, {"class", "event-processing"}, {"members", {"src", "svc", "sink"}}, {"sloLatencyMs", 100}}}}};
  return {infra, software};
}

inline std::pair<fogforge::InfrastructureModel, fogforge::SoftwareModel> LineModels() {
  auto [i, s] = LineFixture();
  return fogforge::LoadModels(i.dump(), s.dump());
}

}  // namespace testutil

#endif  // FOGFORGE_TESTS_HELPERS_HPP_
