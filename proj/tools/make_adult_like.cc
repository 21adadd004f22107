/*
 * Copyright 2026 The fairdebug Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Writes a synthetic census-style CSV with Adult's column layout.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "synthetic.h"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic Adult-like CSV generator"};
  size_t rows = fairdebug::synth::kAdultRows;
  uint64_t seed = 0;
  std::string out;
  app.add_option("--rows", rows, "Number of rows");
  app.add_option("--seed", seed, "Random seed")->required();
  app.add_option("--out", out, "Output file (default stdout)");
  CLI11_PARSE(app, argc, argv);
  const std::string text = fairdebug::synth::adult_like_csv(rows, seed);
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream file(out, std::ios::binary);
  file << text;
  return file ? 0 : 1;
}
