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

#ifndef FOGFORGE_SRC_INTERNAL_HPP_
#define FOGFORGE_SRC_INTERNAL_HPP_

#include <filesystem>
#include <string>

#include "fogforge/model.hpp"

namespace fogforge::internal {

/* Shortest text that reads back to the same double. */
std::string Num(double v);

std::string ReadFile(const std::string &path);
void WriteFile(const std::filesystem::path &path, const std::string &content);
/* Parse errors become kSchema naming `what`. */
Json ParseJson(const std::string &text, const std::string &what);

}  // namespace fogforge::internal

#endif  // FOGFORGE_SRC_INTERNAL_HPP_
