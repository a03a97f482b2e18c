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

// One line per acceptance criterion. Criteria 1-10 run in-process; 11 times
// the installed CLI running the whole suite.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "qwire/verify.hpp"

int main() {
    using clock = std::chrono::steady_clock;
    const auto &ids = qwire::verify::claim_ids();
    int failed = 0;
    int crit = 0;
    for (auto &id : ids) {
        if (id == "verify-all-runtime") continue;
        crit++;
        auto r = qwire::verify::run_claim(id);
        std::printf("criterion %2d %-20s %s  (%.2fs)\n", crit, id.c_str(), r.pass ? "PASS" : "FAIL", r.seconds);
        for (auto &d : r.details) std::printf("        %s\n", d.c_str());
        if (!r.pass) failed++;
    }

    crit++;
    std::string cmd = std::string("\"") + QWIRE_BIN + "\" verify all > /dev/null";
    auto t0 = clock::now();
    int st = std::system(cmd.c_str());
    double secs = std::chrono::duration<double>(clock::now() - t0).count();
    int code = st == -1 ? -1 : WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    // The suite has to finish in time; whether every claim passes is judged above.
    bool ok = (code == 0 || code == 1) && secs < 120;
    std::printf("criterion %2d %-20s %s  (%.2fs, exit %d)\n", crit, "verify-all-runtime", ok ? "PASS" : "FAIL", secs,
                code);
    if (!ok) failed++;

    std::printf("%d of %d criteria passed\n", crit - failed, crit);
    return failed ? 1 : 0;
}
