// Runs the fourteen acceptance criteria and prints one line per criterion.
// Exit status is nonzero when any criterion fails.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "checks.hpp"

using namespace cmtrace::cli;

namespace {

// compact numbers for the summary line
std::string summary(const check_result& r)
{
    const json& d = r.detail;
    auto num = [](const json& v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
        return std::string(buf);
    };
    if (r.name == "zagier")
        return "D<=" + d["dmax"].dump() + ", " + d["checked"].dump() + " traces, mismatches " + d["mismatches"].dump();
    if (r.name == "faber")
        return "constants " + d["functions"][0]["constant"].get<std::string>() + ", " +
               d["functions"][1]["constant"].get<std::string>() + "; mismatches " +
               d["functions"][0]["mismatches"].dump() + d["functions"][1]["mismatches"].dump();
    if (r.name == "hurwitz")
        return d["checked"].dump() + " D, H(0) = " + d["H(0)"].get<std::string>() + ", mismatches " +
               d["mismatches"].dump();
    if (r.name == "atkin")
        return "J -> " + num(d["J"]["value"]) + ", 1 -> " + num(d["1"]["value"]);
    if (r.name == "poincare")
        return "n=1 err " + num(d["coefficients"][0]["abs_err"]) + ", n=2 err " + num(d["coefficients"][1]["abs_err"]) +
               " (c_max " + d["c_max"].dump() + ")";
    if (r.name == "exact")
        return "worst |err|/bound " + num(d["worst_ratio_to_bound"]) + ", D=3 partial " + num(d["D3_partial"]);
    if (r.name == "asymptotic")
        return "worst |err|/bound " + num(d["worst_ratio_to_bound"]);
    if (r.name == "duke") {
        std::string s = "window means";
        for (const auto& w : d["windows"])
            s += " " + num(w["mean"]) + " (se " + num(w["std_error"]) + ")";
        return s + "; monotone " + d["monotone"].dump() + ", last in band " + d["last_in_band"].dump();
    }
    if (r.name == "theta1")
        return "rel err " + num(d["points"][0]["rel_err"]) + " (tau=i), " + num(d["points"][1]["rel_err"]) +
               " (tau=2i)";
    if (r.name == "fourier")
        return "t(3) = " + num(d["t(3)"]["value"]) + ", t(4) = " + num(d["t(4)"]["value"]);
    if (r.name == "decay")
        return "second differences " + num(d["cosets"][0]["second_difference"]) + ", " +
               num(d["cosets"][1]["second_difference"]);
    if (r.name == "weil")
        return "max defects " + num(d["lattices"][0]["relation_defect"]) + ", " +
               num(d["lattices"][1]["relation_defect"]);
    if (r.name == "plus")
        return std::to_string(d["series"].size()) + " series";
    if (r.name == "determinism")
        return std::to_string(d["commands"].size()) + " commands, threads 1 vs " + d["threads"][1].dump();
    return "";
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);

    check_options opt;
    int failed = 0, n = 0;
    for (const auto& name : check_names()) {
        ++n;
        if (only && n != only)
            continue;
        check_result r;
        try {
            r = run_check(name, opt);
        } catch (const std::exception& e) {
            r.name = name;
            r.pass = false;
            r.detail = json{{"exception", e.what()}};
        }
        if (!r.pass)
            ++failed;
        std::printf("criterion %2d %-12s %s  %s  [%.1fs]\n", n, name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.contains("exception") ? r.detail["exception"].get<std::string>().c_str()
                                                   : summary(r).c_str(),
                    r.seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", (only ? 1 : n) - failed, only ? 1 : n);
    return failed ? 1 : 0;
}
