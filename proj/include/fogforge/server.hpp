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

#ifndef FOGFORGE_SERVER_HPP_
#define FOGFORGE_SERVER_HPP_

#include <memory>
#include <string>

namespace fogforge {

/*
 * HTTP+JSON service over a data directory:
 *
 *   <dataDir>/projects/<id>/{project,infrastructure,software,rules,settings}.json
 *   <dataDir>/runs/<id>/run.json plus the pipeline artifacts of that run
 *
 * Runs interrupted by a shutdown are marked failed on the next start.
 */
class Server {
 public:
  explicit Server(const std::string &dataDir);
  ~Server();
  Server(const Server &) = delete;
  Server &operator=(const Server &) = delete;

  /* Blocks until Stop(). Returns false if the address cannot be bound. */
  bool Listen(const std::string &host, int port);
  /* Binds an ephemeral port and returns it, or -1. Follow with ListenAfterBind(). */
  int BindToAnyPort(const std::string &host);
  bool ListenAfterBind();
  /* Stops accepting requests and waits for active runs to finish. */
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fogforge

#endif  // FOGFORGE_SERVER_HPP_
