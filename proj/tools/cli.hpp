#ifndef CMTRACE_TOOLS_CLI_HPP
#define CMTRACE_TOOLS_CLI_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cache.hpp"

namespace cmtrace::cli {

enum exit_code : int { ok = 0, verify_failed = 1, usage_error = 2, precision_failure = 3 };

struct config {
    int precision_bits = 0; // 0: per-discriminant default
    int threads = 1;
    std::filesystem::path cache_dir;
    bool use_cache = true;
    std::string format = "json";
    std::string out;
    long default_c_max_poincare = 100000;
    long default_c_max_exact = 10000;
    double default_tol = 1e-3;
    std::string version = CMTRACE_VERSION;
};

// CMTRACE_CACHE_DIR, else $XDG_CACHE_HOME/cmtrace, else ~/.cache/cmtrace
std::filesystem::path default_cache_dir();

struct table {
    std::vector<std::string> columns;
    std::vector<json> rows;
};

json table_to_json(const table& t);
table table_from_json(const json& j);

void emit_table(const table& t, const std::string& format, std::ostream& out);
void emit_report(const json& report, const std::string& format, std::ostream& out);

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cmtrace::cli

#endif
