#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rismc/oracle/dense.hpp"

namespace rismc::cli {

enum class VerifyLevel { quick, full };

// Deliberate corruption of the main path, used to prove that the checks
// catch it.
enum class Fault { none, flip_z_sot_sign };

struct VerifyOptions
{
    VerifyLevel level = VerifyLevel::quick;
    std::uint64_t seed = 1;
    Fault fault = Fault::none;
};

// Cross-checks the main path against the oracle module on seeded random
// instances. worst_case_id is "seed=<s> instance=<i>", enough to replay
// the offending instance.
std::vector<oracle::OracleReport> verify(const VerifyOptions& options);

bool all_passed(const std::vector<oracle::OracleReport>& reports);

std::string format_reports(const std::vector<oracle::OracleReport>& reports);

}  // namespace rismc::cli
