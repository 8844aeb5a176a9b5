// Copyright 2026 The Cner Authors.
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

// Five sentences with hand-counted entity and OOV scores.

#ifndef CNER_TESTING_METRIC_FIXTURE_H_
#define CNER_TESTING_METRIC_FIXTURE_H_

#include <set>
#include <string>
#include <vector>

#include "cner/eval.h"

namespace cner::testing {

struct MetricFixture {
  std::vector<std::u32string> sentences;
  std::vector<MentionList> gold;
  std::vector<MentionList> pred;
  std::set<std::u32string> training_surfaces;
};

// Per sentence (gold | predicted):
//   李刚在北京    PER 李刚, LOC 北京 | both right
//   王芳去上海    PER 王芳, LOC 上海 | 王芳 right, LOC 上 (short)
//   张三说北京好  PER 张三, LOC 北京 | LOC 张三 (type), 北京 right
//   今天下雨      none               | LOC 下雨
//   李刚和赵六    PER 李刚, PER 赵六 | both right
// Known surfaces are 李刚 and 北京. Hand counts:
//   gold 8, predicted 9, correct 6
//   PER 5/4/4, LOC 3/5/2 (gold/predicted/correct)
//   OOV gold 王芳 上海 张三 赵六 = 4, OOV found 王芳 赵六 = 2
inline MetricFixture MakeMetricFixture() {
  MetricFixture f;
  f.sentences = {U"李刚在北京", U"王芳去上海", U"张三说北京好", U"今天下雨",
                 U"李刚和赵六"};
  f.gold = {
      {{"PER", 0, 2}, {"LOC", 3, 5}},
      {{"PER", 0, 2}, {"LOC", 3, 5}},
      {{"PER", 0, 2}, {"LOC", 3, 5}},
      {},
      {{"PER", 0, 2}, {"PER", 3, 5}},
  };
  f.pred = {
      {{"PER", 0, 2}, {"LOC", 3, 5}},
      {{"PER", 0, 2}, {"LOC", 3, 4}},
      {{"LOC", 0, 2}, {"LOC", 3, 5}},
      {{"LOC", 2, 4}},
      {{"PER", 0, 2}, {"PER", 3, 5}},
  };
  f.training_surfaces = {U"李刚", U"北京"};
  return f;
}

}  // namespace cner::testing

#endif  // CNER_TESTING_METRIC_FIXTURE_H_
