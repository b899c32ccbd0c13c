// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace topcco::cco::detail {

// Dinic max-flow with support for edge lower bounds (feasible circulation).
class BoundedFlow {
 public:
  static constexpr std::int64_t kInfinite = std::int64_t{1} << 40;

  explicit BoundedFlow(std::size_t vertices);

  // Returns an edge handle usable with flow_on().
  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t lower,
                       std::int64_t upper);

  // True iff a flow from `source` to `sink` exists that respects every lower
  // and upper bound.
  bool feasible(std::size_t source, std::size_t sink);

  // Flow on a user edge after feasible() returned true.
  std::int64_t flow_on(std::size_t handle) const;

 private:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    std::int64_t cap;
  };
  struct UserEdge {
    std::size_t from;
    std::size_t index;
    std::int64_t lower;
    std::int64_t upper;
  };

  std::size_t push_arc(std::size_t from, std::size_t to, std::int64_t cap);
  std::int64_t max_flow(std::size_t s, std::size_t t);
  bool bfs(std::size_t s, std::size_t t);
  std::int64_t dfs(std::size_t v, std::size_t t, std::int64_t pushed);

  std::vector<std::vector<Arc>> graph_;
  std::vector<std::int64_t> excess_;
  std::vector<UserEdge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

}  // namespace topcco::cco::detail
