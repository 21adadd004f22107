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

#ifndef FAIRDEBUG_TESTS_SUPPORT_SYNTHETIC_H_
#define FAIRDEBUG_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "fairdebug/dataset.h"

namespace fairdebug::synth {

inline constexpr size_t kAdultRows = 48842;

// Census-style data with Adult's column layout. relationship = Husband always
// implies sex = Male and Wife implies Female; income depends on education,
// age, hours, capital gain, marriage and (mildly) sex.
std::string adult_like_csv(size_t rows, uint64_t seed);
// Ingested with label income, positive ">50K", protected sex (Male, Female).
Dataset adult_like(size_t rows, uint64_t seed);

// Two features, sex and relationship, with exact cell counts so that a depth-2
// CART tree splits on sex first and then on relationship = Husband (men) and
// relationship = Wife (women). Non-married relationships are spread over
// three categories. `rows` must be a multiple of 360. Protected: sex.
Dataset proxy_dataset(size_t rows = 1800);
std::string proxy_csv(size_t rows = 1800);

// Small mixed-type dataset (two numeric, two categorical features, a binary
// protected column) with a noisy label. Protected: group (A, B).
Dataset small_mixed(size_t rows, uint64_t seed);

}  // namespace fairdebug::synth

#endif  // FAIRDEBUG_TESTS_SUPPORT_SYNTHETIC_H_
