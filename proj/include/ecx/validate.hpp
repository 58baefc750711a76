#pragma once

#include <cstdint>

#include "ecx/report.hpp"

namespace ecx {

struct ValidationOptions {
    std::uint64_t master_seed = 42;
    /// Criterion 14 re-runs the whole suite and byte-compares the reports
    /// (timings stripped); disable to run the other criteria once.
    bool include_reproducibility = true;
};

/// The acceptance suite: one CheckRecord per criterion, pinned tolerances.
Report run_validation(const ValidationOptions& opts = {});

}  // namespace ecx
