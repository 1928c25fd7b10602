// Copyright 2026 The gradspec Authors.
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

// Usage:
//   gradspec synth  --output data.gsg [--n-clean 900 --n-poison 100 --seed 7]
//   gradspec score  --input data.gsg --output scores.csv
//   gradspec filter --input data.gsg --output report.json [--emit-clean kept.gsg]
//   gradspec report --input report.json --output hist.csv [--bins 50]
//   gradspec bench  [--sizes 100,200,400,800 --rows 256 --cols 256]

#include <iostream>
#include <string>
#include <vector>

#include "cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gradspec::RunCli(args, std::cout, std::cerr);
}
