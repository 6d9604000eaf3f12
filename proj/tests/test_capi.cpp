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

#include <string>
#include <vector>

#include "doctest.h"
#include "fogforge/fogforge.h"
#include "helpers.hpp"

using fogforge::Json;

namespace {

/* Takes ownership of a string returned by the C API. */
std::string Take(char *s) {
  std::string out = s ? s : "";
  ff_free(s);
  return out;
}

struct Engine {
  ff_engine *e = nullptr;
  ~Engine() { ff_engine_close(e); }
};

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("open reports schema and IO failures") {
    ff_engine *e = nullptr;
    CHECK(ff_engine_open(nullptr, &e) == FF_ERR_ARGUMENT);
    CHECK(std::string(ff_last_error_code()) == "InvalidArgument");
    CHECK(ff_engine_open("/nonexistent/pipeline.json", &e) == FF_ERR_IO);
    CHECK(e == nullptr);

    testutil::TempDir dir;
    testutil::WriteText(dir.path() / "bad.json", R"({"percentile": 0.05, "colour": "red"})");
    CHECK(ff_engine_open((dir.path() / "bad.json").c_str(), &e) == FF_ERR_VALIDATION);
    CHECK(std::string(ff_last_error_code()) == "SchemaError");
    CHECK(std::string(ff_last_error()).find("colour") != std::string::npos);
  }

  TEST_CASE("engine commands") {
    Engine eng;
    REQUIRE(ff_engine_open(testutil::CaseStudyPath("pipeline.json").c_str(), &eng.e) == FF_OK);
    CHECK(std::string(ff_last_error()).empty());
    testutil::TempDir out;
    CHECK(ff_engine_set_output(eng.e, out.str().c_str()) == FF_OK);
    CHECK(std::string(ff_engine_output_dir(eng.e)) == out.str());
    CHECK(ff_engine_set_jobs(eng.e, -1) == FF_ERR_VALIDATION);
    CHECK(ff_engine_set_percentile(eng.e, 1.5) == FF_ERR_VALIDATION);
    CHECK(ff_engine_set_emulation(eng.e, 0) == FF_OK);

    char *json = nullptr;
    REQUIRE(ff_count(eng.e, &json) == FF_OK);
    Json count = Json::parse(Take(json));
    CHECK(count["placements"] == 32768);
    CHECK(count["options"] == 7077888);

    REQUIRE(ff_prune(eng.e, &json) == FF_OK);
    CHECK(Json::parse(Take(json))["optionCount"] == 186624);

    REQUIRE(ff_simulate(eng.e, &json) == FF_OK);
    Json sim = Json::parse(Take(json));
    CHECK(sim["evaluated"] == 186624);
    CHECK(sim["feasible"] == 2256);

    REQUIRE(ff_shortlist(eng.e, &json) == FF_OK);
    CHECK(Json::parse(Take(json))["options"].size() == 10);

    std::vector<std::string> stages;
    auto progress = [](const char *stage, void *user) { static_cast<std::vector<std::string> *>(user)->push_back(stage); };
    REQUIRE(ff_run(eng.e, progress, &stages, &json) == FF_OK);
    std::string funnel = Take(json);
    CHECK(funnel == testutil::ReadText(out.path() / "funnel.json"));
    CHECK(stages.size() == 7);

    REQUIRE(ff_explain(out.str().c_str(), "opt-41052", &json) == FF_OK);
    CHECK(Take(json).find("final: recommended") != std::string::npos);
    CHECK(ff_explain(out.str().c_str(), "opt-x", &json) == FF_ERR_NOT_FOUND);
    CHECK(json == nullptr);

    REQUIRE(ff_sample(eng.e, 3, &json) == FF_OK);
    CHECK(Json::parse(Take(json)).size() == 3);

    CHECK(ff_evaluate(eng.e, "{", &json) == FF_ERR_VALIDATION);
    CHECK(ff_evaluate(eng.e, R"({"placement": {}, "hardware": {}})", &json) == FF_ERR_VALIDATION);
    CHECK(std::string(ff_last_error_code()) == "InvalidArgument");
    CHECK(ff_count(nullptr, &json) == FF_ERR_ARGUMENT);
    CHECK(ff_count(eng.e, nullptr) == FF_ERR_ARGUMENT);
  }

  TEST_CASE("empty stages report FF_ERR_EMPTY") {
    testutil::TempDir dir;
    Json config = testutil::CaseStudyConfig();
    config["infrastructure"] = testutil::CaseStudyPath("infrastructure.json");
    config["software"] = testutil::CaseStudyPath("software.json");
    config["output"] = (dir.path() / "out").string();
    config["sloOverrides"] = {{"A1", 0.5}};
    testutil::WriteText(dir.path() / "pipeline.json", config.dump());
    Engine eng;
    REQUIRE(ff_engine_open((dir.path() / "pipeline.json").c_str(), &eng.e) == FF_OK);
    char *json = nullptr;
    CHECK(ff_shortlist(eng.e, &json) == FF_ERR_EMPTY);
    CHECK(std::string(ff_last_error_code()) == "EmptyInput");
  }

  TEST_CASE("misc entry points") {
    CHECK(std::string(ff_version()) == "0.1.0");
    CHECK(ff_set_log_level("warn") == FF_OK);
    CHECK(ff_set_log_level("loud") == FF_ERR_ARGUMENT);
    ff_server *srv = nullptr;
    testutil::TempDir data;
    REQUIRE(ff_server_open(data.str().c_str(), &srv) == FF_OK);
    int port = 0;
    CHECK(ff_server_bind_any(srv, "127.0.0.1", &port) == FF_OK);
    CHECK(port > 0);
    CHECK(ff_server_stop(srv) == FF_OK);
    ff_server_close(srv);
    ff_free(nullptr);
  }
}
