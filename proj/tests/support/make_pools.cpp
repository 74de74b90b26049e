// Copyright 2026 The lcdkit Authors.
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

// Writes synthetic two-class audio pools: make_pools <dir> [per_class] [seconds] [seed]
#include <cstdlib>
#include <iostream>

#include "synth.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_pools <dir> [per_class] [seconds] [seed]\n";
    return 1;
  }
  const int per_class = argc > 2 ? std::atoi(argv[2]) : 6;
  const double seconds = argc > 3 ? std::atof(argv[3]) : 4.0;
  const auto seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1ull;
  lcd::testing::WriteClassPools(argv[1], per_class, seconds, seed);
  return 0;
}
