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

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "fogforge/fogforge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitEmpty = 3;

int ExitCode(ff_status status) {
  switch (status) {
    case FF_OK:
      return kExitOk;
    case FF_ERR_VALIDATION:
      return kExitValidation;
    case FF_ERR_EMPTY:
      return kExitEmpty;
    default:
      return kExitOther;
  }
}

int Report(ff_status status) {
  if (status != FF_OK) std::fprintf(stderr, "fogforge: %s\n", ff_last_error());
  return ExitCode(status);
}

/* Prints and releases a library string. */
int Emit(ff_status status, char *text) {
  if (status == FF_OK && text) {
    std::fputs(text, stdout);
    std::size_t n = std::char_traits<char>::length(text);
    if (n == 0 || text[n - 1] != '\n') std::fputc('\n', stdout);
  }
  ff_free(text);
  return Report(status);
}

struct Options {
  std::string config = "pipeline.json";
  std::string out;
  std::optional<int> jobs;
  std::optional<double> percentile;
  std::optional<unsigned long long> seed;
  bool noEmulation = false;
  bool dumpSamples = false;
};

struct EngineHandle {
  ff_engine *engine = nullptr;
  ~EngineHandle() { ff_engine_close(engine); }
};

ff_status OpenEngine(const Options &o, EngineHandle &h) {
  ff_status s = ff_engine_open(o.config.c_str(), &h.engine);
  if (s == FF_OK && !o.out.empty()) s = ff_engine_set_output(h.engine, o.out.c_str());
  if (s == FF_OK && o.jobs) s = ff_engine_set_jobs(h.engine, *o.jobs);
  if (s == FF_OK && o.percentile) s = ff_engine_set_percentile(h.engine, *o.percentile);
  if (s == FF_OK && o.seed) s = ff_engine_set_seed(h.engine, *o.seed);
  if (s == FF_OK && o.noEmulation) s = ff_engine_set_emulation(h.engine, 0);
  if (s == FF_OK && o.dumpSamples) s = ff_engine_set_dump_samples(h.engine, 1);
  return s;
}

void PrintStage(const char *stage, void *) { std::fprintf(stderr, "stage: %s\n", stage); }

int Serve(const std::string &data, const std::string &host, int port) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ff_server *server = nullptr;
  ff_status s = ff_server_open(data.c_str(), &server);
  if (s != FF_OK) return Report(s);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    ff_server_stop(server);
  });
  std::fprintf(stderr, "serving %s on http://%s:%d\n", data.c_str(), host.c_str(), port);
  s = ff_server_listen(server, host.c_str(), port);
  if (s != FF_OK) {
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  ff_server_close(server);
  return Report(s);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Design-space exploration for fog and edge deployments"};
  app.require_subcommand(1);
  std::string logLevel = "warn";
  app.add_option("--log-level", logLevel, "trace, debug, info, warn, error or off")->capture_default_str();
  app.set_version_flag("--version", std::string(ff_version()));

  Options o;
  auto common = [&](CLI::App *cmd, bool pipelineFlags) {
    cmd->add_option("--config", o.config, "pipeline config file")->capture_default_str();
    cmd->add_option("--out", o.out, "output directory (overrides the config)");
    cmd->add_option("--jobs", o.jobs, "worker threads, 0 = all cores");
    cmd->add_option("--seed", o.seed, "sampling seed");
    if (pipelineFlags) {
      cmd->add_option("--percentile", o.percentile, "shortlist fraction in (0, 1]");
      cmd->add_flag("--no-emulation", o.noEmulation, "skip the emulation stage");
      cmd->add_flag("--dump-samples", o.dumpSamples, "write per-message latencies to samples.csv");
    }
  };

  auto *count = app.add_subcommand("count", "size of the design space before and after pruning");
  common(count, false);
  std::uint64_t sampleN = 10;
  auto *sample = app.add_subcommand("sample", "simulate a seeded random sample of the pruned space");
  common(sample, false);
  sample->add_option("-n,--count", sampleN, "number of options")->capture_default_str();
  auto *prune = app.add_subcommand("prune", "apply best-practice rules");
  common(prune, false);
  auto *simulate = app.add_subcommand("simulate", "simulate every pruned option");
  common(simulate, false);
  auto *shortlist = app.add_subcommand("shortlist", "select the cheapest SLO-conforming designs");
  common(shortlist, true);
  auto *emulate = app.add_subcommand("emulate", "emulate the shortlist");
  common(emulate, true);
  auto *run = app.add_subcommand("run", "run the full funnel");
  common(run, true);
  std::string optionId;
  auto *explain = app.add_subcommand("explain", "explain the fate of one option in a completed run");
  explain->add_option("--config", o.config, "pipeline config naming the output directory")->capture_default_str();
  explain->add_option("--out", o.out, "run output directory");
  explain->add_option("option", optionId, "option id, e.g. opt-41052")->required();
  std::string dataDir = "fogforge-data", host = "127.0.0.1";
  int port = 8080;
  auto *serve = app.add_subcommand("serve", "start the HTTP API");
  serve->add_option("--data", dataDir, "data directory")->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (ff_set_log_level(logLevel.c_str()) != FF_OK) {
    Report(FF_ERR_ARGUMENT);
    return kExitValidation;
  }

  if (*serve) return Serve(dataDir, host, port);

  if (*explain) {
    std::string dir = o.out;
    if (dir.empty()) {
      EngineHandle h;
      ff_status s = ff_engine_open(o.config.c_str(), &h.engine);
      if (s != FF_OK) return Report(s);
      dir = ff_engine_output_dir(h.engine);
    }
    char *text = nullptr;
    ff_status s = ff_explain(dir.c_str(), optionId.c_str(), &text);
    return Emit(s, text);
  }

  EngineHandle h;
  ff_status s = OpenEngine(o, h);
  if (s != FF_OK) return Report(s);
  char *text = nullptr;
  if (*count) {
    s = ff_count(h.engine, &text);
  } else if (*sample) {
    s = ff_sample(h.engine, sampleN, &text);
  } else if (*prune) {
    s = ff_prune(h.engine, &text);
  } else if (*simulate) {
    s = ff_simulate(h.engine, &text);
  } else if (*shortlist) {
    s = ff_shortlist(h.engine, &text);
  } else if (*emulate) {
    s = ff_emulate(h.engine, &text);
  } else {
    s = ff_run(h.engine, PrintStage, nullptr, &text);
  }
  return Emit(s, text);
}
