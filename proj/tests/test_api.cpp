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

#include "api_fixture.hpp"
#include "doctest.h"
#include "fogforge/pipeline.hpp"

using namespace fogforge;
using apifix::Parse;

namespace {

std::string PostProject(httplib::Client &c, const Json &body) {
  auto r = c.Post("/projects", body.dump(), "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return Json::parse(r->body)["id"];
}

}  // namespace

TEST_SUITE("api") {
  TEST_CASE("projects can be created, read and updated") {
    testutil::TempDir data;
    apifix::LiveServer s(data.str());
    auto &c = s.client();
    Json body = apifix::CaseStudyProject(false);
    std::string id = PostProject(c, body);
    CHECK(id == "p-1");
    CHECK(PostProject(c, body) == "p-2");

    Json list = Parse(c.Get("/projects"));
    REQUIRE(list.size() == 2);
    CHECK(list[0]["id"] == "p-1");
    CHECK(list[0]["name"] == "factory");

    Json project = Parse(c.Get("/projects/p-1"));
    CHECK(project["rules"] == body["rules"]);
    CHECK(project["settings"] == body["settings"]);
    CHECK(Parse(c.Get("/projects/p-1/software")) == body["software"]);

    Json settings = body["settings"];
    settings["percentile"] = 0.1;
    auto put = c.Put("/projects/p-1/settings", settings.dump(), "application/json");
    REQUIRE(put);
    CHECK(put->status == 200);
    CHECK(Parse(c.Get("/projects/p-1/settings"))["percentile"] == 0.1);

    settings["percentile"] = 0;
    auto bad = c.Put("/projects/p-1/settings", settings.dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    CHECK(Json::parse(bad->body)["error"] == "ValidationError");
    CHECK(Parse(c.Get("/projects/p-1/settings"))["percentile"] == 0.1);
  }

  TEST_CASE("bad requests map to 400, 404 and 422") {
    testutil::TempDir data;
    apifix::LiveServer s(data.str());
    auto &c = s.client();

    auto r = c.Post("/projects", "{not json", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    Json err = Json::parse(r->body);
    CHECK(err.contains("error"));
    CHECK(err.contains("message"));

    Json body = apifix::CaseStudyProject(false);
    body.erase("software");
    r = c.Post("/projects", body.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 422);

    Json cyclic = apifix::CaseStudyProject(false);
    cyclic["software"]["connections"].push_back({{"producer", "generate-dashboard"}, {"consumer", "aggregate"}});
    r = c.Post("/projects", cyclic.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 422);
    CHECK(Json::parse(r->body)["error"] == "CyclicSoftwareGraph");

    for (const char *path : {"/projects/p-9", "/projects/p-9/rules", "/runs/r-9", "/runs/r-9/funnel",
                             "/runs/r-9/results", "/projects/..%2Fruns"}) {
      auto g = c.Get(path);
      REQUIRE(g);
      CHECK_MESSAGE(g->status == 404, path);
    }
    auto e = c.Post("/projects/p-9/evaluate", "{}", "application/json");
    REQUIRE(e);
    CHECK(e->status == 404);
  }

  TEST_CASE("evaluate simulates one mapping") {
    testutil::TempDir data;
    apifix::LiveServer s(data.str());
    auto &c = s.client();
    std::string id = PostProject(c, apifix::CaseStudyProject(false));
    Json mapping = {{"placement",
                     {{"adapt-machine", "packaging-controller"},
                      {"aggregate", "wireless-gateway"},
                      {"check-for-defects", "factory-dc"},
                      {"generate-dashboard", "cloud"},
                      {"predict-pickup", "factory-dc"}}},
                    {"hardware",
                     {{"cloud", "c1"}, {"factory-dc", "f2"}, {"wireless-gateway", "w1"}, {"packaging-controller", "pkc1"}}}};
    auto r = c.Post("/projects/" + id + "/evaluate", mapping.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    Json out = Json::parse(r->body);
    CHECK(out["sloOk"] == true);
    CHECK(out["slo"]["A2"]["endToEndMs"].get<double>() == doctest::Approx(12.0));
    CHECK(out["metrics"]["totalCostMonth"].get<double>() == doctest::Approx(152.60121));

    mapping["placement"]["aggregate"] = "moon-base";
    r = c.Post("/projects/" + id + "/evaluate", mapping.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 422);
    CHECK(Json::parse(r->body)["error"] == "InvalidMapping");
  }

  TEST_CASE("runs execute the funnel and expose paged results") {
    testutil::TempDir data;
    testutil::TempDir direct;
    std::string funnelBytes;
    {
      apifix::LiveServer s(data.str());
      auto &c = s.client();
      std::string id = PostProject(c, apifix::CaseStudyProject(false));
      auto r = c.Post("/projects/" + id + "/runs", "", "application/json");
      REQUIRE(r);
      REQUIRE(r->status == 202);
      std::string runId = Json::parse(r->body)["runId"];
      CHECK(runId == "r-1");

      auto again = c.Post("/projects/" + id + "/runs", "", "application/json");
      REQUIRE(again);
      if (again->status == 202) {
        apifix::WaitForRun(c, Json::parse(again->body)["runId"], 300);
      } else {
        CHECK(again->status == 409);
      }

      Json run = apifix::WaitForRun(c, runId, 300);
      REQUIRE(run["status"] == "done");
      CHECK(run["stages"].size() == 7);
      CHECK(run["funnel"]["stages"][3]["optionsOut"] == 1872);

      auto funnel = c.Get("/runs/" + runId + "/funnel");
      REQUIRE(funnel);
      REQUIRE(funnel->status == 200);
      funnelBytes = funnel->body;
      PipelineConfig config = LoadPipelineConfig(testutil::CaseStudyPath("pipeline.json"));
      config.outputDir = direct.str();
      config.emulationEnabled = false;
      CHECK(funnelBytes == FunnelBytes(Pipeline::Open(config)->Run()));

      auto emu = c.Get("/runs/" + runId + "/emulation");
      REQUIRE(emu);
      CHECK(emu->status == 404);

      Json top = Parse(c.Get("/runs/" + runId + "/results?feasible=true&slo=true&distinct=true&sort=cost&pageSize=10"));
      CHECK(top["total"] == 212);
      Json shortlist = testutil::LoadJson(direct.path() / "shortlist.json");
      REQUIRE(top["items"].size() == shortlist["options"].size());
      for (size_t i = 0; i < top["items"].size(); ++i) {
        CHECK(top["items"][i]["id"] == shortlist["options"][i]["id"]);
        CHECK(top["items"][i]["placement"] == shortlist["options"][i]["placement"]);
      }

      Json feasible = Parse(c.Get("/runs/" + runId + "/results?feasible=true&page=2&pageSize=1000"));
      CHECK(feasible["total"] == 2256);
      CHECK(feasible["items"].size() == 1000);
      CHECK(feasible["page"] == 2);
      Json all = Parse(c.Get("/runs/" + runId + "/results"));
      CHECK(all["total"] == 186624);
      CHECK(all["items"][0]["id"] == "opt-0");
      CHECK(all["items"][0]["hardware"].is_object());
      Json band = Parse(c.Get("/runs/" + runId + "/results?slo=true&minCost=150&maxCost=160&sort=cost"));
      for (const auto &item : band["items"]) {
        CHECK(item["totalCostMonth"].get<double>() >= 150.0);
        CHECK(item["totalCostMonth"].get<double>() <= 160.0);
      }

      for (const char *q : {"?bogus=1", "?page=0", "?pageSize=5000", "?sort=price", "?feasible=maybe"}) {
        auto bad = c.Get("/runs/" + runId + "/results" + q);
        REQUIRE(bad);
        CHECK_MESSAGE(bad->status == 400, q);
      }
    }

    apifix::LiveServer restarted(data.str());
    auto &c = restarted.client();
    CHECK(Parse(c.Get("/runs/r-1"))["status"] == "done");
    auto funnel = c.Get("/runs/r-1/funnel");
    REQUIRE(funnel);
    CHECK(funnel->body == funnelBytes);
    CHECK(Parse(c.Get("/projects")).size() == 1);
    CHECK(PostProject(c, apifix::CaseStudyProject(false)) == "p-2");
  }

  TEST_CASE("run overrides and failed runs") {
    testutil::TempDir data;
    apifix::LiveServer s(data.str());
    auto &c = s.client();
    std::string id = PostProject(c, apifix::CaseStudyProject(false));
    Json overrides = {{"sloOverrides", {{"A2", 1.0}}}};
    auto r = c.Post("/projects/" + id + "/runs", overrides.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 202);
    std::string runId = Json::parse(r->body)["runId"];
    Json run = apifix::WaitForRun(c, runId, 300);
    CHECK(run["status"] == "failed");
    CHECK(run["error"]["error"] == "EmptyInput");
    auto funnel = c.Get("/runs/" + runId + "/funnel");
    REQUIRE(funnel);
    CHECK(funnel->status == 404);

    auto bad = c.Post("/projects/" + id + "/runs", Json{{"percentile", 2}}.dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    auto arr = c.Post("/projects/" + id + "/runs", "[1]", "application/json");
    REQUIRE(arr);
    CHECK(arr->status == 400);
  }
}
