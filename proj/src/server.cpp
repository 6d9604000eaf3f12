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

#include "fogforge/server.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "fogforge/error.hpp"
#include "fogforge/pipeline.hpp"
#include "httplib.h"
#include "internal.hpp"

namespace fogforge {

namespace fs = std::filesystem;

namespace {

struct HttpError {
  int status;
  std::string error;
  std::string message;
};

[[noreturn]] void Fail(int status, const std::string &error, const std::string &message) {
  throw HttpError{status, error, message};
}

int StatusFor(ErrorCode code) {
  if (IsValidationFailure(code) || code == ErrorCode::kUnreachable || code == ErrorCode::kEmptyCandidates) return 422;
  if (code == ErrorCode::kUnknownOption) return 404;
  return 500;
}

Json Body(const httplib::Request &req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error &e) {
    Fail(400, "BadRequest", std::string("request body is not JSON: ") + e.what());
  }
}

void Reply(httplib::Response &res, int status, const Json &body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

Json ReadJson(const fs::path &path) {
  return internal::ParseJson(internal::ReadFile(path.string()), path.string());
}

void WriteJson(const fs::path &path, const Json &doc) {
  fs::path tmp = path;
  tmp += ".tmp";
  internal::WriteFile(tmp, doc.dump(2) + "\n");
  fs::rename(tmp, path);
}

bool ParseBool(const std::string &v, const std::string &name) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  Fail(400, "BadRequest", "query parameter '" + name + "' must be true or false");
}

double ParseNumber(const std::string &v, const std::string &name) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  Fail(400, "BadRequest", "query parameter '" + name + "' must be a number");
}

long ParseInt(const std::string &v, const std::string &name) {
  try {
    size_t used = 0;
    long n = std::stol(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception &) {
  }
  Fail(400, "BadRequest", "query parameter '" + name + "' must be an integer");
}

/* Parsed records of a finished run. */
struct RunRecords {
  struct Row {
    std::uint64_t index;
    bool feasible;
    bool sloOk;
    double cost;
    Json doc;
  };
  std::vector<Row> rows;
  std::unique_ptr<OptionSpace> space;
  std::vector<std::uint64_t> offsets;
};

}  // namespace

struct Server::Impl {
  fs::path root;
  httplib::Server http;

  std::mutex mu;  // guards everything below
  std::map<std::string, std::shared_ptr<std::shared_mutex>> projectLocks;
  std::map<std::string, std::string> activeRun;  // project -> run
  std::map<std::string, std::shared_ptr<RunRecords>> records;  // run -> records
  std::vector<std::thread> runThreads;
  std::uint64_t nextProject = 1;
  std::uint64_t nextRun = 1;

  explicit Impl(const std::string &dataDir) : root(dataDir) {
    fs::create_directories(root / "projects");
    fs::create_directories(root / "runs");
    for (const auto &e : fs::directory_iterator(root / "projects")) {
      nextProject = std::max(nextProject, Sequence(e.path().filename().string(), "p-") + 1);
    }
    for (const auto &e : fs::directory_iterator(root / "runs")) {
      nextRun = std::max(nextRun, Sequence(e.path().filename().string(), "r-") + 1);
      fs::path status = e.path() / "run.json";
      if (!fs::is_regular_file(status)) continue;
      Json run = ReadJson(status);
      std::string s = run.value("status", "");
      if (s != "done" && s != "failed") {
        run["status"] = "failed";
        run["error"] = {{"error", "Interrupted"}, {"message", "the service stopped before the run finished"}};
        WriteJson(status, run);
      }
    }
    Routes();
  }

  static std::uint64_t Sequence(const std::string &name, const std::string &prefix) {
    if (name.rfind(prefix, 0) != 0) return 0;
    try {
      return std::stoull(name.substr(prefix.size()));
    } catch (const std::exception &) {
      return 0;
    }
  }

  fs::path ProjectDir(const std::string &id) {
    fs::path dir = root / "projects" / id;
    if (id.find('/') != std::string::npos || !fs::is_regular_file(dir / "project.json")) {
      Fail(404, "NotFound", "unknown project '" + id + "'");
    }
    return dir;
  }

  fs::path RunDir(const std::string &id) {
    fs::path dir = root / "runs" / id;
    if (id.find('/') != std::string::npos || !fs::is_regular_file(dir / "run.json")) {
      Fail(404, "NotFound", "unknown run '" + id + "'");
    }
    return dir;
  }

  std::shared_ptr<std::shared_mutex> LockFor(const std::string &project) {
    std::lock_guard<std::mutex> lock(mu);
    auto &l = projectLocks[project];
    if (!l) l = std::make_shared<std::shared_mutex>();
    return l;
  }

  /* Validated models from documents; schema or invariant failures become 422. */
  static std::pair<InfrastructureModel, SoftwareModel> Models(const Json &infra, const Json &software) {
    return LoadModels(infra.dump(), software.dump());
  }

  static PipelineConfig ConfigFrom(const Json &settings, const Json &rules, const fs::path &out) {
    Json doc = settings.is_object() ? settings : Json::object();
    doc["rules"] = rules;
    doc.erase("infrastructure");
    doc.erase("software");
    doc.erase("output");
    PipelineConfig config = ParsePipelineConfig(doc, out.string());
    config.outputDir = out.string();
    ValidateConfig(config);
    return config;
  }

  void Handle(const httplib::Request &req, httplib::Response &res,
              const std::function<void(const httplib::Request &, httplib::Response &)> &fn) {
    try {
      fn(req, res);
    } catch (const HttpError &e) {
      Reply(res, e.status, {{"error", e.error}, {"message", e.message}});
    } catch (const Error &e) {
      Reply(res, StatusFor(e.code()), {{"error", ToString(e.code())}, {"message", e.detail()}});
    } catch (const std::exception &e) {
      Reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  }

  void Routes() {
    auto on = [this](auto method, const char *pattern, auto fn) {
      (http.*method)(pattern, [this, fn](const httplib::Request &req, httplib::Response &res) {
        Handle(req, res, fn);
      });
    };
    using S = httplib::Server;
    using Method = S &(S::*)(const std::string &, S::Handler);
    Method get = &S::Get, post = &S::Post, put = &S::Put;

    on(post, "/projects", [this](const httplib::Request &req, httplib::Response &res) { CreateProject(req, res); });
    on(get, "/projects", [this](const httplib::Request &, httplib::Response &res) { ListProjects(res); });
    on(get, R"(/projects/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
      std::string id = req.matches[1];
      auto lock = LockFor(id);
      std::shared_lock<std::shared_mutex> guard(*lock);
      fs::path dir = ProjectDir(id);
      Json p = ReadJson(dir / "project.json");
      p["rules"] = ReadJson(dir / "rules.json");
      p["settings"] = ReadJson(dir / "settings.json");
      Reply(res, 200, p);
    });
    for (const char *doc : {"infrastructure", "software", "rules", "settings"}) {
      std::string name = doc;
      on(get, (std::string(R"(/projects/([^/]+)/)") + name).c_str(),
         [this, name](const httplib::Request &req, httplib::Response &res) {
           std::string id = req.matches[1];
           auto lock = LockFor(id);
           std::shared_lock<std::shared_mutex> guard(*lock);
           Reply(res, 200, ReadJson(ProjectDir(id) / (name + ".json")));
         });
      on(put, (std::string(R"(/projects/([^/]+)/)") + name).c_str(),
         [this, name](const httplib::Request &req, httplib::Response &res) { PutDocument(req, res, name); });
    }
    on(post, R"(/projects/([^/]+)/evaluate)", [this](const httplib::Request &req, httplib::Response &res) {
      EvaluateMapping(req, res);
    });
    on(post, R"(/projects/([^/]+)/runs)", [this](const httplib::Request &req, httplib::Response &res) {
      StartRun(req, res);
    });
    on(get, R"(/runs/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
      Reply(res, 200, ReadJson(RunDir(req.matches[1]) / "run.json"));
    });
    on(get, R"(/runs/([^/]+)/funnel)", [this](const httplib::Request &req, httplib::Response &res) {
      Artifact(req, res, "funnel.json");
    });
    on(get, R"(/runs/([^/]+)/emulation)", [this](const httplib::Request &req, httplib::Response &res) {
      Artifact(req, res, "emulation.json");
    });
    on(get, R"(/runs/([^/]+)/results)", [this](const httplib::Request &req, httplib::Response &res) {
      Results(req, res);
    });
  }

  void CreateProject(const httplib::Request &req, httplib::Response &res) {
    Json body = Body(req);
    if (!body.is_object()) Fail(400, "BadRequest", "project body must be an object");
    for (const char *key : {"infrastructure", "software"}) {
      if (!body.contains(key)) Fail(422, "SchemaError", std::string("missing field '") + key + "'");
    }
    Json rules = body.value("rules", Json::object());
    Json settings = body.value("settings", Json::object());
    auto [infra, software] = Models(body["infrastructure"], body["software"]);
    PipelineConfig config = ConfigFrom(settings, rules, root);
    Pipeline check(config, infra, software);  // validates rules, workload and SLO overrides against the models
    std::string id;
    {
      std::lock_guard<std::mutex> lock(mu);
      id = "p-" + std::to_string(nextProject++);
    }
    fs::path dir = root / "projects" / id;
    fs::create_directories(dir);
    WriteJson(dir / "infrastructure.json", body["infrastructure"]);
    WriteJson(dir / "software.json", body["software"]);
    WriteJson(dir / "rules.json", rules);
    WriteJson(dir / "settings.json", settings);
    WriteJson(dir / "project.json", {{"id", id}, {"name", body.value("name", id)}});
    spdlog::info("created project {}", id);
    Reply(res, 201, {{"id", id}});
  }

  void ListProjects(httplib::Response &res) {
    std::vector<Json> out;
    for (const auto &e : fs::directory_iterator(root / "projects")) {
      if (fs::is_regular_file(e.path() / "project.json")) out.push_back(ReadJson(e.path() / "project.json"));
    }
    std::sort(out.begin(), out.end(), [](const Json &a, const Json &b) {
      return Sequence(a.value("id", ""), "p-") < Sequence(b.value("id", ""), "p-");
    });
    Reply(res, 200, out);
  }

  void PutDocument(const httplib::Request &req, httplib::Response &res, const std::string &name) {
    std::string id = req.matches[1];
    Json body = Body(req);
    auto lock = LockFor(id);
    std::unique_lock<std::shared_mutex> guard(*lock);
    fs::path dir = ProjectDir(id);
    Json infra = name == "infrastructure" ? body : ReadJson(dir / "infrastructure.json");
    Json software = name == "software" ? body : ReadJson(dir / "software.json");
    Json rules = name == "rules" ? body : ReadJson(dir / "rules.json");
    Json settings = name == "settings" ? body : ReadJson(dir / "settings.json");
    auto [im, sm] = Models(infra, software);
    Pipeline check(ConfigFrom(settings, rules, root), im, sm);
    WriteJson(dir / (name + ".json"), body);
    Reply(res, 200, body);
  }

  void EvaluateMapping(const httplib::Request &req, httplib::Response &res) {
    std::string id = req.matches[1];
    Json infra, software, rules, settings;
    {
      auto lock = LockFor(id);
      std::shared_lock<std::shared_mutex> guard(*lock);
      fs::path dir = ProjectDir(id);
      infra = ReadJson(dir / "infrastructure.json");
      software = ReadJson(dir / "software.json");
      rules = ReadJson(dir / "rules.json");
      settings = ReadJson(dir / "settings.json");
    }
    Json body = Body(req);
    auto [im, sm] = Models(infra, software);
    Pipeline pipeline(ConfigFrom(settings, rules, root), std::move(im), std::move(sm));
    try {
      Reply(res, 200, pipeline.Evaluate(DesignOptionFromJson(body)));
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kInvalidArgument) throw;
      Fail(422, "InvalidMapping", e.detail());
    }
  }

  void StartRun(const httplib::Request &req, httplib::Response &res) {
    std::string project = req.matches[1];
    Json overrides = req.body.empty() ? Json::object() : Body(req);
    if (!overrides.is_object()) Fail(400, "BadRequest", "run overrides must be an object");
    auto lock = LockFor(project);
    std::unique_lock<std::shared_mutex> guard(*lock);
    fs::path dir = ProjectDir(project);
    Json settings = ReadJson(dir / "settings.json");
    Json rules = ReadJson(dir / "rules.json");
    if (overrides.contains("rules")) {
      rules = overrides["rules"];
      overrides.erase("rules");
    }
    settings.merge_patch(overrides);
    auto [infra, software] = Models(ReadJson(dir / "infrastructure.json"), ReadJson(dir / "software.json"));

    std::string runId;
    {
      std::lock_guard<std::mutex> l(mu);
      if (activeRun.count(project)) {
        Fail(409, "Conflict", "run " + activeRun[project] + " is still active for project " + project);
      }
      runId = "r-" + std::to_string(nextRun++);
    }
    fs::path out = root / "runs" / runId;
    PipelineConfig config = ConfigFrom(settings, rules, out);
    auto pipeline = std::make_shared<Pipeline>(config, std::move(infra), std::move(software));
    fs::create_directories(out);
    Json run = {{"id", runId}, {"projectId", project}, {"status", "queued"}, {"stages", Json::array()},
                {"error", nullptr}};
    WriteJson(out / "run.json", run);
    {
      std::lock_guard<std::mutex> l(mu);
      activeRun[project] = runId;
      runThreads.emplace_back([this, pipeline, run, out, project]() mutable { Execute(*pipeline, run, out, project); });
    }
    spdlog::info("queued run {} for project {}", runId, project);
    Reply(res, 202, {{"runId", runId}, {"status", "queued"}});
  }

  void Execute(Pipeline &pipeline, Json run, const fs::path &out, const std::string &project) {
    std::vector<std::string> seen;
    try {
      FunnelReport report = pipeline.Run([&](const std::string &stage) {
        seen.push_back(stage);
        run["status"] = "stage:" + stage;
        run["stages"] = seen;
        WriteJson(out / "run.json", run);
      });
      run["status"] = "done";
      run["funnel"] = FunnelJson(report);
    } catch (const Error &e) {
      run["status"] = "failed";
      run["error"] = {{"error", ToString(e.code())}, {"message", e.detail()}};
    } catch (const std::exception &e) {
      run["status"] = "failed";
      run["error"] = {{"error", "Internal"}, {"message", e.what()}};
    }
    WriteJson(out / "run.json", run);
    std::lock_guard<std::mutex> l(mu);
    activeRun.erase(project);
  }

  void Artifact(const httplib::Request &req, httplib::Response &res, const std::string &name) {
    fs::path dir = RunDir(req.matches[1]);
    if (!fs::is_regular_file(dir / name)) {
      Json run = ReadJson(dir / "run.json");
      Fail(404, "NotFound", name + " is not available for run " + std::string(req.matches[1]) + " (status " +
                                run.value("status", "") + ")");
    }
    res.status = 200;
    res.set_content(internal::ReadFile((dir / name).string()), "application/json");
  }

  std::shared_ptr<RunRecords> Records(const std::string &runId, const fs::path &dir) {
    {
      std::lock_guard<std::mutex> l(mu);
      auto it = records.find(runId);
      if (it != records.end()) return it->second;
    }
    auto rec = std::make_shared<RunRecords>();
    auto [infra, software] = LoadModels(internal::ReadFile((dir / "infrastructure.json").string()),
                                        internal::ReadFile((dir / "software.json").string()));
    Json settings = ReadJson(dir / "config.json");
    Json cands = ReadJson(dir / "candidates.json");
    rec->space = std::make_unique<OptionSpace>(infra, software, cands.at("candidates").get<CandidateSets>(),
                                               ParseHardwareScope(settings.at("hardwareScope").get<std::string>()));
    rec->offsets = rec->space->PlacementOffsets();
    std::ifstream in(dir / "records.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json doc = Json::parse(line);
      std::uint64_t index = ParseOptionId(doc.at("id").get<std::string>());
      rec->rows.push_back({index, doc.at("feasible").get<bool>(), doc.at("sloOk").get<bool>(),
                           doc.at("totalCostMonth").get<double>(), std::move(doc)});
    }
    std::lock_guard<std::mutex> l(mu);
    records[runId] = rec;
    return rec;
  }

  void Results(const httplib::Request &req, httplib::Response &res) {
    std::string runId = req.matches[1];
    fs::path dir = RunDir(runId);
    Json run = ReadJson(dir / "run.json");
    if (!fs::is_regular_file(dir / "records.jsonl") || run.value("status", "").rfind("stage:", 0) == 0 ||
        run.value("status", "") == "queued") {
      if (run.value("status", "") == "done" || run.value("status", "") == "failed") {
        Fail(404, "NotFound", "run " + runId + " produced no simulation records");
      }
      Fail(409, "Conflict", "run " + runId + " has not finished (status " + run.value("status", "") + ")");
    }
    std::optional<bool> feasible, slo;
    bool distinct = false;
    std::optional<double> maxCost, minCost;
    std::string sort = "index";
    long page = 1, pageSize = 10;
    for (const auto &[key, value] : req.params) {
      if (key == "feasible") {
        feasible = ParseBool(value, key);
      } else if (key == "slo") {
        slo = ParseBool(value, key);
      } else if (key == "distinct") {
        distinct = ParseBool(value, key);
      } else if (key == "maxCost") {
        maxCost = ParseNumber(value, key);
      } else if (key == "minCost") {
        minCost = ParseNumber(value, key);
      } else if (key == "sort") {
        if (value != "cost" && value != "index") Fail(400, "BadRequest", "sort must be 'cost' or 'index'");
        sort = value;
      } else if (key == "page") {
        page = ParseInt(value, key);
      } else if (key == "pageSize") {
        pageSize = ParseInt(value, key);
      } else {
        Fail(400, "BadRequest", "unknown query parameter '" + key + "'");
      }
    }
    if (page < 1) Fail(400, "BadRequest", "page starts at 1");
    if (pageSize < 1 || pageSize > 1000) Fail(400, "BadRequest", "pageSize must lie in [1, 1000]");

    auto rec = Records(runId, dir);
    std::vector<const RunRecords::Row *> rows;
    for (const auto &r : rec->rows) {
      if (feasible && r.feasible != *feasible) continue;
      if (slo && r.sloOk != *slo) continue;
      if (maxCost && r.cost > *maxCost) continue;
      if (minCost && r.cost < *minCost) continue;
      rows.push_back(&r);
    }
    if (sort == "cost") {
      std::stable_sort(rows.begin(), rows.end(), [](const RunRecords::Row *a, const RunRecords::Row *b) {
        if (a->cost != b->cost) return a->cost < b->cost;
        return a->index < b->index;
      });
    }
    if (distinct) {
      std::unordered_set<std::string> keys;
      std::vector<const RunRecords::Row *> kept;
      for (const auto *r : rows) {
        if (keys.insert(rec->space->EffectiveKey(rec->space->Decode(r->index, rec->offsets))).second) kept.push_back(r);
      }
      rows.swap(kept);
    }
    Json items = Json::array();
    std::size_t begin = static_cast<std::size_t>(page - 1) * static_cast<std::size_t>(pageSize);
    for (std::size_t i = begin; i < rows.size() && i < begin + static_cast<std::size_t>(pageSize); ++i) {
      Json item = rows[i]->doc;
      DesignOption d = rec->space->ToDesignOption(rec->space->Decode(rows[i]->index, rec->offsets));
      item["index"] = rows[i]->index;
      item["placement"] = d.placement;
      item["hardware"] = d.hardware;
      items.push_back(std::move(item));
    }
    Reply(res, 200, {{"runId", runId}, {"total", rows.size()}, {"page", page}, {"pageSize", pageSize}, {"items", items}});
  }
};

Server::Server(const std::string &dataDir) : impl_(std::make_unique<Impl>(dataDir)) {}

Server::~Server() { Stop(); }

bool Server::Listen(const std::string &host, int port) {
  spdlog::info("listening on {}:{}", host, port);
  return impl_->http.listen(host, port);
}

int Server::BindToAnyPort(const std::string &host) { return impl_->http.bind_to_any_port(host); }

bool Server::ListenAfterBind() { return impl_->http.listen_after_bind(); }

void Server::Stop() {
  impl_->http.stop();
  std::vector<std::thread> threads;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    threads.swap(impl_->runThreads);
  }
  for (auto &t : threads) {
    if (t.joinable()) t.join();
  }
}

}  // namespace fogforge
