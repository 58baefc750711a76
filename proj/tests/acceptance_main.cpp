// Acceptance suite runner: executes every validation criterion at its pinned
// tolerance, prints one pass/fail line per criterion, and exits nonzero on
// any failure. `--seed N` selects the master seed (default 42), `--out PATH`
// additionally writes the JSON report.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "ecx/validate.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 42;
    std::string out_path;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
            out_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--seed N] [--out report.json]\n", argv[0]);
            return 2;
        }
    }

    ecx::ValidationOptions opts;
    opts.master_seed = seed;
    const ecx::Report report = ecx::run_validation(opts);

    int failures = 0;
    int index = 0;
    for (const auto& check : report.checks) {
        ++index;
        if (!check.pass) ++failures;
        std::printf("[%2d/%zu] %s %-28s (%.0f ms)\n", index, report.checks.size(),
                    check.pass ? "PASS" : "FAIL", check.name.c_str(), check.wall_time_ms);
        if (!check.pass) std::printf("        values: %s\n", check.values.dump().c_str());
    }
    std::printf("%s: %d/%zu criteria passed (master seed %llu)\n",
                failures == 0 ? "OK" : "FAILED", index - failures, report.checks.size(),
                static_cast<unsigned long long>(seed));

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << report.to_string();
    }
    return failures == 0 ? 0 : 1;
}
