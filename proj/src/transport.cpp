// Copyright 2026 The emergence-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "elab/transport.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "elab/error.hpp"
#include "elab/simd.hpp"

namespace elab::transport {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kModule = "measures";

struct ColumnFlow {
  std::int32_t row;
  double amount;
};

std::vector<ColumnFlow>::iterator find_row(std::vector<ColumnFlow>& flows, std::int32_t row) {
  return std::find_if(flows.begin(), flows.end(),
                      [row](const ColumnFlow& f) { return f.row == row; });
}

}  // namespace

TransportPlan solve(std::span<const double> supply, std::span<const double> demand,
                    std::span<const double> cost) {
  const std::size_t rows = supply.size();
  const std::size_t cols = demand.size();
  if (cost.size() != rows * cols) {
    throw Error(ErrorKind::kInput, kModule, "transport",
                "cost matrix has " + std::to_string(cost.size()) + " entries, expected " +
                    std::to_string(rows * cols));
  }
  if (std::any_of(cost.begin(), cost.end(), [](double c) { return !(c >= 0.0) || c == kInf; })) {
    throw Error(ErrorKind::kInput, kModule, "transport", "costs must be finite and >= 0");
  }
  std::vector<double> a(supply.begin(), supply.end());
  std::vector<double> b(demand.begin(), demand.end());
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  const double eps = 1e-14 * std::max(total, 1e-300);

  TransportPlan plan;
  plan.row_potential.assign(rows, 0.0);
  plan.col_potential.assign(cols, 0.0);
  if (rows == 0 || cols == 0) return plan;

  auto& pr = plan.row_potential;
  auto& pc = plan.col_potential;
  const simd::KernelTable& kern = simd::kernels();

  std::vector<std::vector<ColumnFlow>> col_flow(cols);
  std::vector<double> dr(rows), dc(cols), row_key(rows), col_key(cols), pot_masked(cols);
  std::vector<std::int32_t> pred_col(cols), pred_row(rows);
  std::vector<std::uint8_t> row_done(rows);
  std::vector<std::int32_t> done_rows, done_cols;
  done_rows.reserve(rows);
  done_cols.reserve(cols);

  for (;;) {
    const bool has_supply = std::any_of(a.begin(), a.end(), [eps](double v) { return v > eps; });
    const bool has_demand = std::any_of(b.begin(), b.end(), [eps](double v) { return v > eps; });
    if (!has_supply || !has_demand) break;

    for (std::size_t i = 0; i < rows; ++i) {
      row_key[i] = a[i] > eps ? 0.0 : kInf;
      pred_row[i] = -1;
      row_done[i] = 0;
    }
    std::fill(col_key.begin(), col_key.end(), kInf);
    std::fill(pred_col.begin(), pred_col.end(), -1);
    std::copy(pc.begin(), pc.end(), pot_masked.begin());
    done_rows.clear();
    done_cols.clear();

    std::int32_t target = -1;
    while (target < 0) {
      const std::size_t ri = kern.argmin(row_key.data(), rows);
      const std::size_t ci = kern.argmin(col_key.data(), cols);
      const double rv = row_key[ri];
      const double cv = col_key[ci];
      if (rv <= cv && rv < kInf) {
        dr[ri] = rv;
        row_key[ri] = kInf;
        row_done[ri] = 1;
        done_rows.push_back(static_cast<std::int32_t>(ri));
        kern.relax(cost.data() + ri * cols, rv + pr[ri], pot_masked.data(), col_key.data(),
                   pred_col.data(), static_cast<std::int32_t>(ri), cols);
        continue;
      }
      if (!(cv < kInf)) {
        throw Error(ErrorKind::kInvariant, kModule, "transport",
                    "no augmenting path although demand remains");
      }
      dc[ci] = cv;
      col_key[ci] = kInf;
      pot_masked[ci] = -kInf;
      done_cols.push_back(static_cast<std::int32_t>(ci));
      if (b[ci] > eps) {
        target = static_cast<std::int32_t>(ci);
        break;
      }
      for (const ColumnFlow& f : col_flow[ci]) {
        if (row_done[f.row]) continue;
        const double reduced = -cost[f.row * cols + ci] + pc[ci] - pr[f.row];
        const double cand = cv + std::max(reduced, 0.0);
        if (cand < row_key[f.row]) {
          row_key[f.row] = cand;
          pred_row[f.row] = static_cast<std::int32_t>(ci);
        }
      }
    }

    const double reach = dc[target];
    for (std::int32_t i : done_rows) pr[i] += dr[i] - reach;
    for (std::int32_t j : done_cols) pc[j] += dc[j] - reach;

    double delta = b[target];
    std::int32_t source = -1;
    for (std::int32_t j = target;;) {
      const std::int32_t i = pred_col[j];
      if (pred_row[i] < 0) {
        source = i;
        delta = std::min(delta, a[i]);
        break;
      }
      j = pred_row[i];
      delta = std::min(delta, find_row(col_flow[j], i)->amount);
    }

    for (std::int32_t j = target;;) {
      const std::int32_t i = pred_col[j];
      auto fwd = find_row(col_flow[j], i);
      if (fwd == col_flow[j].end()) {
        col_flow[j].push_back({i, delta});
      } else {
        fwd->amount += delta;
      }
      if (i == source) break;
      j = pred_row[i];
      auto back = find_row(col_flow[j], i);
      back->amount -= delta;
      if (back->amount <= eps) col_flow[j].erase(back);
    }
    a[source] -= delta;
    b[target] -= delta;
    ++plan.augmentations;
  }

  for (std::size_t j = 0; j < cols; ++j) {
    for (const ColumnFlow& f : col_flow[j]) {
      plan.flows.push_back({f.row, static_cast<std::int32_t>(j), f.amount});
    }
  }
  std::sort(plan.flows.begin(), plan.flows.end(), [](const Flow& x, const Flow& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  for (const Flow& f : plan.flows) plan.cost += f.amount * cost[f.row * cols + f.col];
  return plan;
}

}  // namespace elab::transport
