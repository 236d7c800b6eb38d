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

#include "catbij/cheat_scan.hpp"

#include <array>
#include <regex>

namespace catbij {

std::string_view to_string(CheatKind kind) {
    switch (kind) {
        case CheatKind::codomain_enumeration: return "codomain_enumeration";
        case CheatKind::index_pairing: return "index_pairing";
        case CheatKind::exhaustive_search: return "exhaustive_search";
    }
    return "unknown";
}

namespace {

struct Rule {
    CheatKind kind;
    std::regex pattern;
};

const std::vector<Rule>& rules() {
    static const std::vector<Rule> r = [] {
        const auto icase = std::regex::ECMAScript | std::regex::icase;
        std::vector<Rule> out;
        out.push_back({CheatKind::codomain_enumeration,
                       std::regex(R"(\b(generate_all\w*|all_(dyck|paths?|perms?|permutations|objects)\w*|enumerate_\w+|list_all\w*)\b)", icase)});
        out.push_back({CheatKind::codomain_enumeration,
                       std::regex(R"(\bitertools\.(permutations|product|combinations)\b|\bfrom\s+itertools\s+import\b.*\b(permutations|product|combinations)\b)")});
        out.push_back({CheatKind::codomain_enumeration, std::regex(R"(\bcatalan\s*\()", icase)});
        out.push_back({CheatKind::index_pairing,
                       std::regex(R"(\.index\s*\(|\b(rank|unrank)\w*\s*\(|\bdict\s*\(\s*zip\s*\(|\blookup(_table)?\b)", icase)});
        out.push_back({CheatKind::exhaustive_search,
                       std::regex(R"(\b(deque|breadth_first\w*|bfs|dfs|backtrack\w*|brute_?force\w*)\b|breadth-first)", icase)});
        return out;
    }();
    return r;
}

}  // namespace

std::vector<CheatFlag> static_cheat_scan(std::string_view source) {
    std::vector<CheatFlag> flags;
    int line_no = 0;
    std::size_t start = 0;
    while (start < source.size()) {
        auto end = source.find('\n', start);
        if (end == std::string_view::npos) end = source.size();
        ++line_no;
        const std::string line(source.substr(start, end - start));
        for (const auto& rule : rules()) {
            std::smatch m;
            if (std::regex_search(line, m, rule.pattern)) {
                flags.push_back({rule.kind, line_no, m[0].str()});
            }
        }
        start = end + 1;
    }
    return flags;
}

}  // namespace catbij
