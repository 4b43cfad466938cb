// Runs acceptance criteria 1..9 and prints one line per criterion.
#include <cstdio>
#include <cstdlib>

#include "rollmono/battery.hpp"

int main() {
    rollmono::BatteryOptions opt;
    if (const char* t = std::getenv("ROLLMONO_THREADS")) opt.threads = std::strtoul(t, nullptr, 10);
    int failed = 0;
    for (const auto& run : rollmono::battery()) {
        const auto r = run(opt);
        std::printf("criterion %d %s: %s (%.2fs) %s\n", r.id, r.passed ? "PASS" : "FAIL",
                    r.title.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    std::printf("%d of %zu criteria failed\n", failed, rollmono::battery().size());
    return failed == 0 ? 0 : 1;
}
