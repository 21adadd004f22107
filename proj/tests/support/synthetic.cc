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

#include "synthetic.h"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fairdebug/csv.h"

namespace fairdebug::synth {

namespace {

template <typename T, size_t N>
const T& pick(std::mt19937_64& rng, const std::array<T, N>& options,
              const std::array<double, N>& weights) {
  std::discrete_distribution<size_t> d(weights.begin(), weights.end());
  return options[d(rng)];
}

std::string line(const csv::Record& r) { return csv::format_record(r) + "\n"; }

}  // namespace

std::string adult_like_csv(size_t rows, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  static const std::array<std::string, 6> kWorkclass = {
      "Private", "Self-emp-not-inc", "Local-gov", "State-gov", "Self-emp-inc", "?"};
  static const std::array<std::string, 8> kEducation = {
      "HS-grad", "Some-college", "Bachelors", "Masters", "Assoc-voc",
      "11th",    "Doctorate",    "Prof-school"};
  static const std::array<double, 8> kEducationNum = {9, 10, 13, 14, 11, 7, 16, 15};
  static const std::array<std::string, 8> kOccupation = {
      "Prof-specialty", "Craft-repair", "Exec-managerial", "Adm-clerical",
      "Sales",          "Other-service", "Machine-op-inspct", "Tech-support"};
  static const std::array<std::string, 5> kRace = {
      "White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"};
  static const std::array<std::string, 5> kCountry = {
      "United-States", "Mexico", "Philippines", "Germany", "India"};

  std::string out = line({"age", "workclass", "education", "education_num",
                          "marital_status", "occupation", "relationship", "race",
                          "sex", "capital_gain", "hours_per_week", "native_country",
                          "income"});
  for (size_t i = 0; i < rows; ++i) {
    const bool male = u(rng) < 0.67;
    const int age = std::clamp(static_cast<int>(std::lround(38.0 + 13.0 * normal(rng))),
                               17, 90);
    const auto& workclass =
        pick(rng, kWorkclass, std::array<double, 6>{70, 8, 6, 4, 4, 8});
    const size_t edu = std::discrete_distribution<size_t>(
        {32, 22, 16, 5, 4, 12, 1.5, 2})(rng);
    const bool married = u(rng) < (age < 25 ? 0.1 : 0.55);
    std::string marital, relationship;
    if (married) {
      marital = "Married-civ-spouse";
      relationship = male ? "Husband" : "Wife";
    } else {
      marital = pick(rng, std::array<std::string, 3>{"Never-married", "Divorced",
                                                     "Separated"},
                     std::array<double, 3>{6, 3, 1});
      relationship = age < 25 ? "Own-child"
                              : pick(rng, std::array<std::string, 3>{
                                              "Not-in-family", "Unmarried",
                                              "Other-relative"},
                                     std::array<double, 3>{6, 3, 1});
    }
    const auto& occupation =
        male ? pick(rng, kOccupation, std::array<double, 8>{12, 20, 14, 6, 11, 8, 9, 3})
             : pick(rng, kOccupation, std::array<double, 8>{14, 3, 10, 25, 11, 15, 5, 3});
    const auto& race = pick(rng, kRace, std::array<double, 5>{85, 10, 3, 1, 1});
    const auto& country = pick(rng, kCountry, std::array<double, 5>{90, 4, 2, 2, 2});
    const double hours = std::clamp(
        std::round((male ? 42.0 : 36.0) + 11.0 * normal(rng)), 1.0, 99.0);
    const double gain = u(rng) < 0.08 ? std::round(std::exp(7.0 + 1.5 * u(rng)) * 1.5)
                                      : 0.0;

    double score = -9.0 + 0.45 * kEducationNum[edu] + 0.035 * std::min(age, 60) +
                   0.035 * hours + (married ? 1.9 : 0.0) + (male ? 0.4 : 0.0) +
                   (gain > 3000 ? 2.5 : 0.0) +
                   (occupation == "Exec-managerial" || occupation == "Prof-specialty"
                        ? 0.8
                        : 0.0);
    score += 0.6 * normal(rng);
    const bool rich = u(rng) < 1.0 / (1.0 + std::exp(-score));

    out += line({std::to_string(age), workclass, kEducation[edu],
                 format_number(kEducationNum[edu]), marital, occupation, relationship,
                 race, male ? "Male" : "Female", format_number(gain),
                 format_number(hours), country, rich ? ">50K" : "<=50K"});
  }
  return out;
}

Dataset adult_like(size_t rows, uint64_t seed) {
  return set_protected(ingest_csv(adult_like_csv(rows, seed), "income", ">50K"),
                       "sex", {"Male", "Female"});
}

std::string proxy_csv(size_t rows) {
  if (rows == 0 || rows % 360 != 0) {
    throw std::invalid_argument("proxy dataset size must be a multiple of 360");
  }
  struct Cell {
    const char* sex;
    const char* relationship;
    size_t count;
    size_t positives;
  };
  const size_t twelfth = rows / 12;
  const size_t others = 5 * twelfth / 3;  // per non-married category
  // Positive rates: married men 0.8, other men 0.4, married women 0.7, other
  // women 0.
  const std::vector<Cell> cells = {
      {"Male", "Husband", twelfth, twelfth * 8 / 10},
      {"Female", "Wife", twelfth, twelfth * 7 / 10},
      {"Male", "Own-child", others, others * 4 / 10},
      {"Male", "Not-in-family", others, others * 4 / 10},
      {"Male", "Unmarried", others, others * 4 / 10},
      {"Female", "Own-child", others, 0},
      {"Female", "Not-in-family", others, 0},
      {"Female", "Unmarried", others, 0},
  };
  std::string out = line({"sex", "relationship", "income"});
  for (const auto& c : cells) {
    for (size_t i = 0; i < c.count; ++i) {
      out += line({c.sex, c.relationship, i < c.positives ? ">50K" : "<=50K"});
    }
  }
  return out;
}

Dataset proxy_dataset(size_t rows) {
  return set_protected(ingest_csv(proxy_csv(rows), "income", ">50K"), "sex",
                       {"Male", "Female"});
}

Dataset small_mixed(size_t rows, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::string out = line({"x1", "x2", "color", "size", "group", "y"});
  static const std::array<std::string, 3> kColors = {"red", "green", "blue"};
  static const std::array<std::string, 2> kSizes = {"S", "L"};
  for (size_t i = 0; i < rows; ++i) {
    const double x1 = std::round(100.0 * u(rng)) / 10.0;
    const double x2 = std::round(50.0 * u(rng));
    const auto& color = kColors[std::uniform_int_distribution<size_t>(0, 2)(rng)];
    const bool group_a = u(rng) < 0.5;
    const auto& size = kSizes[u(rng) < (group_a ? 0.7 : 0.3) ? 0 : 1];
    const double score = 0.4 * (x1 - 5.0) + 0.05 * (x2 - 25.0) +
                         (color == "red" ? 0.8 : 0.0) + (size == "L" ? 0.6 : 0.0) +
                         (group_a ? 0.3 : 0.0);
    const bool y = u(rng) < 1.0 / (1.0 + std::exp(-score));
    out += line({format_number(x1), format_number(x2), color, size,
                 group_a ? "A" : "B", y ? "yes" : "no"});
  }
  return set_protected(ingest_csv(out, "y", "yes"), "group", {"A", "B"});
}

}  // namespace fairdebug::synth
