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

#include "fogforge/fogforge.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>

#include <spdlog/spdlog.h>

#include "fogforge/error.hpp"
#include "fogforge/pipeline.hpp"
#include "fogforge/server.hpp"
#include "internal.hpp"

struct ff_engine {
  fogforge::PipelineConfig config;
  fogforge::InfrastructureModel infra;
  fogforge::SoftwareModel software;
  std::unique_ptr<fogforge::Pipeline> pipeline;

  fogforge::Pipeline &Get() {
    if (!pipeline) pipeline = std::make_unique<fogforge::Pipeline>(config, infra, software);
    return *pipeline;
  }
};

struct ff_server {
  std::unique_ptr<fogforge::Server> server;
};

namespace {

thread_local std::string lastError;
thread_local std::string lastCode;

ff_status StatusOf(fogforge::ErrorCode code) {
  using fogforge::ErrorCode;
  if (fogforge::IsEmptyResult(code)) return FF_ERR_EMPTY;
  if (fogforge::IsValidationFailure(code) || code == ErrorCode::kUnreachable) return FF_ERR_VALIDATION;
  if (code == ErrorCode::kUnknownOption) return FF_ERR_NOT_FOUND;
  if (code == ErrorCode::kIo) return FF_ERR_IO;
  return FF_ERR_RUNTIME;
}

template <typename Fn>
ff_status Guard(Fn &&fn) {
  lastError.clear();
  lastCode.clear();
  try {
    fn();
    return FF_OK;
  } catch (const fogforge::Error &e) {
    lastError = e.what();
    lastCode = fogforge::ToString(e.code());
    return StatusOf(e.code());
  } catch (const std::exception &e) {
    lastError = e.what();
    lastCode = "Internal";
    return FF_ERR_RUNTIME;
  }
}

ff_status BadArgument(const char *what) {
  lastError = std::string("InvalidArgument: ") + what;
  lastCode = "InvalidArgument";
  return FF_ERR_ARGUMENT;
}

char *Dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

fogforge::Json ReadArtifact(const fogforge::PipelineConfig &config, const char *name) {
  std::string path = (std::filesystem::path(config.outputDir) / name).string();
  return fogforge::internal::ParseJson(fogforge::internal::ReadFile(path), path);
}

/* Applies a config change and drops cached stage results. */
template <typename Fn>
ff_status Set(ff_engine *engine, Fn &&fn) {
  if (!engine) return BadArgument("null engine");
  return Guard([&] {
    fogforge::PipelineConfig next = engine->config;
    fn(next);
    fogforge::ValidateConfig(next);
    engine->config = std::move(next);
    engine->pipeline.reset();
  });
}

template <typename Fn>
ff_status Command(ff_engine *engine, char **out, Fn &&fn) {
  if (!engine) return BadArgument("null engine");
  if (!out) return BadArgument("null output pointer");
  *out = nullptr;
  return Guard([&] { *out = Dup(fn(engine->Get())); });
}

}  // namespace

extern "C" {

const char *ff_last_error(void) { return lastError.c_str(); }

const char *ff_last_error_code(void) { return lastCode.c_str(); }

const char *ff_version(void) { return "0.1.0"; }

ff_status ff_set_log_level(const char *level) {
  if (!level) return BadArgument("null log level");
  auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && std::strcmp(level, "off") != 0) {
    return BadArgument("log level must be trace, debug, info, warn, error or off");
  }
  spdlog::set_level(parsed);
  return FF_OK;
}

void ff_free(char *s) { std::free(s); }

ff_status ff_engine_open(const char *config_path, ff_engine **out) {
  if (!config_path || !out) return BadArgument("null argument");
  *out = nullptr;
  return Guard([&] {
    auto engine = std::make_unique<ff_engine>();
    engine->config = fogforge::LoadPipelineConfig(config_path);
    engine->pipeline = fogforge::Pipeline::Open(engine->config);
    auto models = fogforge::LoadModels(fogforge::internal::ReadFile(engine->config.infrastructurePath),
                                       fogforge::internal::ReadFile(engine->config.softwarePath));
    engine->infra = std::move(models.first);
    engine->software = std::move(models.second);
    *out = engine.release();
  });
}

void ff_engine_close(ff_engine *engine) { delete engine; }

const char *ff_engine_output_dir(const ff_engine *engine) { return engine ? engine->config.outputDir.c_str() : ""; }

ff_status ff_engine_set_output(ff_engine *engine, const char *dir) {
  if (!dir) return BadArgument("null output directory");
  return Set(engine, [&](fogforge::PipelineConfig &c) { c.outputDir = dir; });
}

ff_status ff_engine_set_jobs(ff_engine *engine, int jobs) {
  return Set(engine, [&](fogforge::PipelineConfig &c) { c.jobs = jobs; });
}

ff_status ff_engine_set_percentile(ff_engine *engine, double fraction) {
  return Set(engine, [&](fogforge::PipelineConfig &c) { c.percentile = fraction; });
}

ff_status ff_engine_set_emulation(ff_engine *engine, int enabled) {
  return Set(engine, [&](fogforge::PipelineConfig &c) { c.emulationEnabled = enabled != 0; });
}

ff_status ff_engine_set_dump_samples(ff_engine *engine, int enabled) {
  return Set(engine, [&](fogforge::PipelineConfig &c) { c.dumpSamples = enabled != 0; });
}

ff_status ff_engine_set_seed(ff_engine *engine, uint64_t seed) {
  return Set(engine, [&](fogforge::PipelineConfig &c) { c.seed = seed; });
}

ff_status ff_count(ff_engine *engine, char **json_out) {
  return Command(engine, json_out, [](fogforge::Pipeline &p) { return fogforge::ToJson(p.Count()).dump(2); });
}

ff_status ff_sample(ff_engine *engine, uint64_t n, char **json_out) {
  return Command(engine, json_out, [n](fogforge::Pipeline &p) { return p.Sample(n).dump(2); });
}

ff_status ff_prune(ff_engine *engine, char **json_out) {
  return Command(engine, json_out, [](fogforge::Pipeline &p) {
    const auto &result = p.Prune();
    return fogforge::Json{{"candidates", result.candidates},
                          {"excluded", result.trace.size()},
                          {"placementCount", p.Space().PlacementCount()},
                          {"optionCount", p.Space().OptionCount()},
                          {"output", p.config().outputDir}}
        .dump(2);
  });
}

ff_status ff_simulate(ff_engine *engine, char **json_out) {
  return Command(engine, json_out, [](fogforge::Pipeline &p) {
    std::size_t feasible = p.Simulate().size();
    return fogforge::Json{{"evaluated", p.Space().OptionCount()},
                          {"feasible", feasible},
                          {"output", p.config().outputDir}}
        .dump(2);
  });
}

ff_status ff_shortlist(ff_engine *engine, char **json_out) {
  return Command(engine, json_out, [](fogforge::Pipeline &p) {
    p.Shortlist();
    return ReadArtifact(p.config(), "shortlist.json").dump(2);
  });
}

ff_status ff_emulate(ff_engine *engine, char **json_out) {
  return Command(engine, json_out, [](fogforge::Pipeline &p) {
    p.Emulate();
    fogforge::Json doc = ReadArtifact(p.config(), "emulation.json");
    return fogforge::Json{{"computeMode", doc["computeMode"]},
                          {"ranking", doc["ranking"]},
                          {"output", p.config().outputDir}}
        .dump(2);
  });
}

ff_status ff_run(ff_engine *engine, ff_progress_fn progress, void *user, char **json_out) {
  return Command(engine, json_out, [&](fogforge::Pipeline &p) {
    fogforge::Pipeline::Progress cb;
    if (progress) cb = [&](const std::string &stage) { progress(stage.c_str(), user); };
    return fogforge::FunnelBytes(p.Run(cb));
  });
}

ff_status ff_evaluate(ff_engine *engine, const char *mapping_json, char **json_out) {
  if (!mapping_json) return BadArgument("null mapping");
  return Command(engine, json_out, [&](fogforge::Pipeline &p) {
    fogforge::Json doc = fogforge::internal::ParseJson(mapping_json, "mapping");
    return p.Evaluate(fogforge::DesignOptionFromJson(doc)).dump(2);
  });
}

ff_status ff_explain(const char *output_dir, const char *option_id, char **text_out) {
  if (!output_dir || !option_id || !text_out) return BadArgument("null argument");
  *text_out = nullptr;
  return Guard([&] { *text_out = Dup(fogforge::Explain(output_dir, option_id)); });
}

ff_status ff_server_open(const char *data_dir, ff_server **out) {
  if (!data_dir || !out) return BadArgument("null argument");
  *out = nullptr;
  return Guard([&] {
    auto s = std::make_unique<ff_server>();
    s->server = std::make_unique<fogforge::Server>(data_dir);
    *out = s.release();
  });
}

ff_status ff_server_listen(ff_server *server, const char *host, int port) {
  if (!server || !host) return BadArgument("null argument");
  return Guard([&] {
    if (!server->server->Listen(host, port)) {
      throw fogforge::Error(fogforge::ErrorCode::kIo, "cannot listen on " + std::string(host) + ":" + std::to_string(port));
    }
  });
}

ff_status ff_server_bind_any(ff_server *server, const char *host, int *port_out) {
  if (!server || !host || !port_out) return BadArgument("null argument");
  return Guard([&] {
    int port = server->server->BindToAnyPort(host);
    if (port < 0) throw fogforge::Error(fogforge::ErrorCode::kIo, "cannot bind " + std::string(host));
    *port_out = port;
  });
}

ff_status ff_server_listen_after_bind(ff_server *server) {
  if (!server) return BadArgument("null server");
  return Guard([&] {
    if (!server->server->ListenAfterBind()) throw fogforge::Error(fogforge::ErrorCode::kIo, "listen failed");
  });
}

ff_status ff_server_stop(ff_server *server) {
  if (!server) return BadArgument("null server");
  return Guard([&] { server->server->Stop(); });
}

void ff_server_close(ff_server *server) { delete server; }

}  // extern "C"
