/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HEMI_RANDOM_H_
#define HEMI_RANDOM_H_

#include <cstdint>
#include <string_view>

namespace hemi {

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable seed for a named sub-stream of `base`. Independent of platform and
// of the order in which sub-streams are requested.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(base ^ mix64(h));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return mix64(base ^ mix64(a + 0x632be59bd9b4e019ULL));
}

}  // namespace hemi

#endif  // HEMI_RANDOM_H_
