// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "flow.hpp"

#include <algorithm>
#include <queue>

namespace topcco::cco::detail {

BoundedFlow::BoundedFlow(std::size_t vertices)
    : graph_(vertices + 2), excess_(vertices + 2, 0) {}

std::size_t BoundedFlow::push_arc(std::size_t from, std::size_t to,
                                  std::int64_t cap) {
  graph_[from].push_back({to, graph_[to].size(), cap});
  graph_[to].push_back({from, graph_[from].size() - 1, 0});
  return graph_[from].size() - 1;
}

std::size_t BoundedFlow::add_edge(std::size_t from, std::size_t to,
                                  std::int64_t lower, std::int64_t upper) {
  const std::size_t index = push_arc(from, to, upper - lower);
  excess_[to] += lower;
  excess_[from] -= lower;
  edges_.push_back({from, index, lower, upper});
  return edges_.size() - 1;
}

bool BoundedFlow::feasible(std::size_t source, std::size_t sink) {
  const std::size_t super_source = graph_.size() - 2;
  const std::size_t super_sink = graph_.size() - 1;
  push_arc(sink, source, kInfinite);
  std::int64_t demand = 0;
  for (std::size_t v = 0; v < super_source; ++v) {
    if (excess_[v] > 0) {
      push_arc(super_source, v, excess_[v]);
      demand += excess_[v];
    } else if (excess_[v] < 0) {
      push_arc(v, super_sink, -excess_[v]);
    }
  }
  return max_flow(super_source, super_sink) == demand;
}

std::int64_t BoundedFlow::flow_on(std::size_t handle) const {
  const auto& e = edges_[handle];
  const auto& arc = graph_[e.from][e.index];
  return e.lower + (e.upper - e.lower - arc.cap);
}

bool BoundedFlow::bfs(std::size_t s, std::size_t t) {
  level_.assign(graph_.size(), -1);
  level_[s] = 0;
  std::queue<std::size_t> queue;
  queue.push(s);
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop();
    for (const auto& arc : graph_[v]) {
      if (arc.cap > 0 && level_[arc.to] < 0) {
        level_[arc.to] = level_[v] + 1;
        queue.push(arc.to);
      }
    }
  }
  return level_[t] >= 0;
}

std::int64_t BoundedFlow::dfs(std::size_t v, std::size_t t,
                              std::int64_t pushed) {
  if (v == t) return pushed;
  for (auto& i = cursor_[v]; i < graph_[v].size(); ++i) {
    auto& arc = graph_[v][i];
    if (arc.cap <= 0 || level_[arc.to] != level_[v] + 1) continue;
    const auto got = dfs(arc.to, t, std::min(pushed, arc.cap));
    if (got > 0) {
      arc.cap -= got;
      graph_[arc.to][arc.rev].cap += got;
      return got;
    }
  }
  return 0;
}

std::int64_t BoundedFlow::max_flow(std::size_t s, std::size_t t) {
  std::int64_t total = 0;
  while (bfs(s, t)) {
    cursor_.assign(graph_.size(), 0);
    while (const auto pushed = dfs(s, t, kInfinite)) total += pushed;
  }
  return total;
}

}  // namespace topcco::cco::detail
