// Runs the fourteen acceptance criteria and prints one PASS/FAIL line each.
// Failing checks are listed under their criterion. Exit status is 1 if any
// criterion fails.

#include <cstdio>
#include <iostream>

#include "fracdiff/io.hpp"
#include "fracdiff/verify.hpp"

int main() {
    using namespace fracdiff;
    int failed = 0;
    for (const auto& entry : verify::registry()) {
        verify::SuiteReport rep;
        try {
            rep = verify::run_suite(entry.name);
        } catch (const std::exception& e) {
            rep.suite = entry.name;
            rep.checks.push_back({"suite aborted", 0.0, 0.0, false, e.what()});
        }
        const bool ok = rep.passed();
        failed += ok ? 0 : 1;
        std::printf("%-4s %-13s %-18s %zu checks  %.1f s  %s\n", ok ? "PASS" : "FAIL", rep.suite.c_str(),
                    entry.aliases.empty() ? "" : entry.aliases.front().c_str(), rep.checks.size(), rep.seconds,
                    rep.title.c_str());
        for (const auto& c : rep.checks)
            if (!c.pass)
                std::printf("       failed: %s measured=%s tolerance=%s %s\n", c.name.c_str(),
                            io::format_number(c.measured).c_str(), io::format_number(c.tolerance).c_str(), c.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, verify::registry().size());
    return failed == 0 ? 0 : 1;
}
