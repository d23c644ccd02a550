#pragma once

#include <string>

#include "urnclt/limits.hpp"
#include "urnclt/model_io.hpp"
#include "urnclt/montecarlo.hpp"

namespace urnclt {

// Report rendering shared by the CLI, tests, and the python bindings.
std::string spectrum_json(const UrnModel& model, const std::string& hash,
                          const std::string& mode);
std::string spectrum_text(const UrnModel& model, const std::string& hash,
                          const std::string& mode);
std::string limits_json(const LimitCovariance& lim, const std::string& hash);
std::string report_json(const VerificationReport& rep);
std::string report_text(const VerificationReport& rep);

// Entry point used by main(); returns the process exit code
// (0 pass, 1 verification failure, 2 input error, 3 numerical failure).
int run_cli(int argc, char** argv);

}  // namespace urnclt
