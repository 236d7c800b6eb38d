// Copyright 2026 The catbij Authors.
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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace catbij {

enum class CheatKind { codomain_enumeration, index_pairing, exhaustive_search };

std::string_view to_string(CheatKind kind);

struct CheatFlag {
    CheatKind kind;
    int line = 0;          // 1-based
    std::string evidence;  // the matched token

    friend bool operator==(const CheatFlag&, const CheatFlag&) = default;
};

/// Token heuristics for programs that enumerate whole object sets, pair
/// elements by index, or search instead of constructing. Flags are advisory
/// context for the judge; nothing is rejected on their account.
std::vector<CheatFlag> static_cheat_scan(std::string_view source);

}  // namespace catbij
