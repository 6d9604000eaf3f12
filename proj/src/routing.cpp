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

#include <algorithm>
#include <cmath>

#include "fogforge/error.hpp"
#include "fogforge/simulator.hpp"

namespace fogforge {

bool PriceEqual(double a, double b) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= 1e-12 * scale;
}

bool PriceLess(double a, double b) { return a < b && !PriceEqual(a, b); }

namespace {

/* Strict order on candidate routes with the same endpoints. */
bool Better(const Route &x, const Route &y) {
  if (!PriceEqual(x.price, y.price)) return x.price < y.price;
  if (x.links.size() != y.links.size()) return x.links.size() < y.links.size();
  if (x.nodes != y.nodes) return x.nodes < y.nodes;  // node indices follow id order
  return x.links < y.links;
}

}  // namespace

RoutingTable::RoutingTable(const InfrastructureModel &infra)
    : infra_(&infra), n_(infra.nodes.size()), routes_(n_ * n_) {
  auto adj = infra.Adjacency();
  for (size_t s = 0; s < n_; ++s) {
    std::vector<std::optional<Route>> best(n_);
    std::vector<char> settled(n_, 0);
    Route start;
    start.nodes.push_back(static_cast<int>(s));
    best[s] = start;
    for (;;) {
      int pick = -1;
      for (size_t v = 0; v < n_; ++v) {
        if (settled[v] || !best[v]) continue;
        if (pick < 0 || Better(*best[v], *best[pick])) pick = static_cast<int>(v);
      }
      if (pick < 0) break;
      settled[pick] = 1;
      const Route &base = *best[pick];
      for (auto [next, link] : adj[pick]) {
        if (settled[next]) continue;
        Route cand = base;
        cand.nodes.push_back(next);
        cand.links.push_back(link);
        cand.price += infra.links[link].bandwidthPrice;
        cand.latencyMs += infra.links[link].latencyMs;
        if (!best[next] || Better(cand, *best[next])) best[next] = std::move(cand);
      }
    }
    for (size_t t = 0; t < n_; ++t) routes_[s * n_ + t] = std::move(best[t]);
  }
}

bool RoutingTable::Reachable(int from, int to) const {
  return routes_[static_cast<size_t>(from) * n_ + to].has_value();
}

const Route &RoutingTable::Get(int from, int to) const {
  const auto &r = routes_[static_cast<size_t>(from) * n_ + to];
  if (!r) {
    throw Error(ErrorCode::kUnreachable,
                "no route from '" + infra_->nodes[from].id + "' to '" + infra_->nodes[to].id + "'");
  }
  return *r;
}

}  // namespace fogforge
