// Copyright 2026 The qwire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

// The claim checks are compiled once (src/verify.cpp) and shared by the CLI
// and the acceptance binary.
namespace qwire::verify {

struct ClaimResult {
    std::string id;
    bool pass = false;
    double seconds = 0;
    std::vector<std::string> details;  // one line each, printed under the claim
};

struct Options {
    uint64_t seed = 20260101;
    // Path of the qwire executable, used by the whole-suite runtime claim.
    std::string self_path;
};

const std::vector<std::string> &claim_ids();
bool known_claim(const std::string &id);
ClaimResult run_claim(const std::string &id, const Options &opt = {});

// Runs every claim in id order. The runtime claim is judged on the summed
// wall time of the others rather than a nested process.
std::vector<ClaimResult> run_all(const Options &opt = {});

std::string format_table(const std::vector<ClaimResult> &rs);

}  // namespace qwire::verify
