#ifndef CMTRACE_TOOLS_CHECKS_HPP
#define CMTRACE_TOOLS_CHECKS_HPP

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cache.hpp"

namespace cmtrace::cli {

struct check_options {
    long dmax = 500;      // zagier range
    long cmax = 100000;   // poincare cutoff
    std::map<long, mpq_class> corrupt_g; // overrides of g coefficients, for mutation runs
    int threads_alt = 4;  // second thread count for the determinism check
};

struct check_result {
    std::string name;
    std::string identity; // the identity or anchor value being checked
    bool pass = false;
    json detail;
    double seconds = 0.0;
};

// in suite order
const std::vector<std::string>& check_names();
std::vector<std::string> suite(const std::string& level); // "fast" or "full"
bool is_check(const std::string& name);

check_result run_check(const std::string& name, const check_options& opt);

} // namespace cmtrace::cli

#endif
