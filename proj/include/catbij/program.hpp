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

#include <optional>
#include <string>

namespace catbij {

/// One evolved (or seeded) program.
struct CandidateProgram {
    std::string id;
    std::string source;
    std::string docstring;
    std::optional<std::string> parent_id;
    int island = 0;
    int iteration = 0;
    std::string model_name;
};

}  // namespace catbij
