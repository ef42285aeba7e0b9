// SPDX-License-Identifier: Apache-2.0
//
// cfran-sim: system-level simulator for EDU-partitioned cell-free massive MIMO
// Copyright (C) 2026 The cfran-sim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfran/rng.hpp"

#include <array>

namespace cfran {

Rng make_rng(std::uint64_t master_seed, std::uint64_t drop_index, Stream stream) {
  const auto tag = static_cast<std::uint64_t>(stream);
  std::array<std::uint32_t, 6> words = {
      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(drop_index),  static_cast<std::uint32_t>(drop_index >> 32),
      static_cast<std::uint32_t>(tag),         0x9e3779b9u};
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

} // namespace cfran
