// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "topcco/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topcco/errors.hpp"

namespace topcco {

Micros from_ms(double ms) { return Micros{std::llround(ms * 1000.0)}; }

double to_ms(Micros t) { return static_cast<double>(t.count()) / 1000.0; }

Micros VerificationCommittee::max_leader_rtt() const {
  Micros worst{0};
  for (std::size_t m = 0; m < member_count; ++m) {
    if (m == leader_index) continue;
    worst = std::max(worst, internal_rtts[leader_index][m] +
                                internal_rtts[m][leader_index]);
  }
  return worst;
}

namespace {

bool is_rate(double x) { return x >= 0.0 && x <= 1.0; }

template <typename... Parts>
ValidationIssue issue(Parts&&... parts) {
  std::ostringstream out;
  (out << ... << parts);
  return {out.str()};
}

}  // namespace

std::vector<ValidationIssue> validate_instance(const Instance& instance) {
  std::vector<ValidationIssue> issues;
  const std::size_t n = instance.node_count();
  const auto& params = instance.params;
  const auto& delays = instance.delays;

  if (params.f == 0) issues.push_back(issue("f must be positive"));
  if (n < params.min_committee_size()) {
    issues.push_back(issue("N_c < 3f+1 (N_c=", n, ", f=", params.f, ")"));
  }
  if (!is_rate(params.max_leader_byzantine)) {
    issues.push_back(issue("B must lie in [0,1]"));
  }
  if (!is_rate(params.max_leader_crash)) {
    issues.push_back(issue("C must lie in [0,1]"));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = instance.nodes[i];
    if (!is_rate(node.byzantine_rate)) {
      issues.push_back(issue("node ", i, ": byzantine rate outside [0,1]"));
    }
    if (!is_rate(node.crash_rate)) {
      issues.push_back(issue("node ", i, ": crash rate outside [0,1]"));
    }
  }

  if (delays.d.size() != n) {
    issues.push_back(issue("delay matrix has ", delays.d.size(),
                           " rows, expected ", n));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (delays.d[i].size() != n) {
        issues.push_back(issue("delay row ", i, " has ", delays.d[i].size(),
                               " entries, expected ", n));
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const auto v = delays.d[i][j];
        if (i == j && v != Micros{0}) {
          issues.push_back(issue("diagonal delay d[", i, "][", i,
                                 "] must be 0"));
        } else if (i != j && v <= Micros{0}) {
          issues.push_back(issue("off-diagonal delay must be > 0 (d[", i,
                                 "][", j, "])"));
        }
      }
    }
  }
  auto check_vector = [&](const std::vector<Micros>& v, const char* name) {
    if (v.size() != n) {
      issues.push_back(issue(name, " has ", v.size(), " entries, expected ",
                             n));
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] < Micros{0}) {
        issues.push_back(issue(name, "[", i, "] must be >= 0"));
      }
    }
  };
  check_vector(delays.to_verification, "d_to_v");
  check_vector(delays.from_verification, "d_from_v");

  const auto& vc = instance.verification;
  if (vc.member_count == 0) {
    issues.push_back(issue("verification committee must have members"));
  } else {
    if (vc.leader_index >= vc.member_count) {
      issues.push_back(issue("verification leader index out of range"));
    }
    bool square = vc.internal_rtts.size() == vc.member_count;
    for (const auto& row : vc.internal_rtts) {
      square = square && row.size() == vc.member_count;
    }
    if (!square) {
      issues.push_back(issue("verification rtts must be ", vc.member_count,
                             "x", vc.member_count));
    } else {
      for (std::size_t a = 0; a < vc.member_count; ++a) {
        for (std::size_t b = 0; b < vc.member_count; ++b) {
          if (a != b && vc.internal_rtts[a][b] <= Micros{0}) {
            issues.push_back(
                issue("verification delay must be > 0 (", a, ",", b, ")"));
          }
        }
      }
    }
  }
  return issues;
}

Micros rtt(const DelayMatrix& delays, NodeId i, NodeId j) {
  if (i == j) throw ContractViolation("rtt: i and j must differ");
  return delays.d[i][j] + delays.d[j][i];
}

Instance scaled(const Instance& instance, double factor) {
  auto scale = [factor](Micros t) {
    return Micros{std::llround(static_cast<double>(t.count()) * factor)};
  };
  Instance out = instance;
  for (auto& row : out.delays.d) {
    for (auto& v : row) v = scale(v);
  }
  for (auto& v : out.delays.to_verification) v = scale(v);
  for (auto& v : out.delays.from_verification) v = scale(v);
  for (auto& row : out.verification.internal_rtts) {
    for (auto& v : row) v = scale(v);
  }
  return out;
}

}  // namespace topcco
