// Acceptance suite: runs every acceptance check at its pinned tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include "dimerloops/verify.hpp"

#include <cstdio>

int main()
{
    using namespace dimerloops::verify;
    Options opts;
    auto results = run_checks(kAll, opts);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("criterion %2d [%s] %-34s (%.1fs) %s\n", r.id, r.status.c_str(),
                    r.name.c_str(), r.seconds, r.detail.c_str());
        if (r.status == "FAIL") ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures == 0 ? 0 : 1;
}
