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

// Runner process for the wire protocol backed by the compiled-in kernels.
#include <iostream>

#include "catbij/native_executor.hpp"
#include "catbij/wire.hpp"

int main() {
    std::ios::sync_with_stdio(false);
    catbij::NativeExecutor executor(/*parallel=*/false);
    return catbij::wire::serve(std::cin, std::cout, executor);
}
