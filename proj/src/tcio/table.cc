// Copyright 2026 The tlsmbt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <set>
#include <tuple>

#include "tlsmbt/tcio.h"

namespace tlsmbt::tcio {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<TransitionRow> transition_table(const TestCase& tc) {
  std::vector<TransitionRow> rows;
  const lts::Lts& l = tc.lts;
  if (l.empty()) return rows;
  std::set<lts::StateId> visited;
  lts::StateId s = l.initial();
  while (visited.insert(s).second) {
    const lts::Transition* next = nullptr;
    for (std::size_t i : l.outgoing(s)) {
      const lts::Transition& t = l.transitions()[i];
      if (t.label.gate == testgen::kOtherwise) continue;
      auto v = tc.verdict(t.target);
      if (v == testgen::Verdict::fail || v == testgen::Verdict::inconclusive) {
        continue;
      }
      if (next == nullptr ||
          std::forward_as_tuple(t.label.text(), t.target) <
              std::forward_as_tuple(next->label.text(), next->target)) {
        next = &t;
      }
    }
    if (next == nullptr) break;
    rows.push_back(TransitionRow{s, next->label.text(), next->target});
    if (next->label.gate == testgen::kExit) return rows;
    s = next->target;
  }
  rows.push_back(TransitionRow{s, std::string(testgen::kExit), s + 1});
  return rows;
}

std::string table_to_csv(const std::vector<TransitionRow>& rows) {
  std::string out = "pre,action,post\n";
  for (const auto& r : rows) {
    out += std::to_string(r.pre) + "," + csv_field(r.action) + "," +
           std::to_string(r.post) + "\n";
  }
  return out;
}

}  // namespace tlsmbt::tcio
