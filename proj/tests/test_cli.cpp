#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <unistd.h>

#include "cache.hpp"
#include "cli.hpp"
#include "doctest.h"

using namespace cmtrace::cli;
namespace fs = std::filesystem;

namespace {

struct outcome {
    int code;
    std::string out, err;
};

outcome cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("cmtrace_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> v;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            v.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    v.push_back(cur);
    return v;
}

const fs::path golden_dir = CMTRACE_GOLDEN_DIR;

} // namespace

TEST_CASE("trace rows")
{
    outcome r = cli({"trace", "--f", "J", "--D", "3", "--no-cache"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"trace\":\"-248\"") != std::string::npos);

    r = cli({"trace", "--f", "J", "--D", "8", "--no-cache"});
    json row = json::parse(r.out);
    std::vector<std::string> keys;
    for (const auto& [k, v] : row.items())
        keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"D", "f", "trace", "p", "residual", "certified", "bits"});
    CHECK(row["D"] == 8);
    CHECK(row["f"] == "J");
    CHECK(row["trace"] == "7256");
    CHECK(row["residual"].get<double>() < 1e-6);

    // level 2 Hauptmodul, rational traces are strings
    r = cli({"trace", "--f", "T", "--level", "2", "--range", "3:20", "--no-cache"});
    CHECK(r.code == 0);
    for (const auto& l : lines(r.out))
        CHECK(json::parse(l)["trace"].is_string());
}

TEST_CASE("classnum table matches a direct form count")
{
    outcome r = cli({"classnum", "--range", "3:100", "--format", "csv", "--no-cache"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    CHECK(ls.front() == "D,H,forms,weighted,fundamental");
    long rows = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i], ',');
        REQUIRE(f.size() == 5);
        const long D = std::stol(f[0]);
        long count = 0;
        mpq_class w = 0;
        for (long a = 1; 3 * a * a <= D; ++a)
            for (long b = -a; b <= a; ++b) {
                if ((b * b + D) % (4 * a))
                    continue;
                long c = (b * b + D) / (4 * a);
                if (c < a || (b < 0 && (-b == a || a == c)))
                    continue;
                ++count;
                w += mpq_class(1, (a == b && b == c) ? 3 : (b == 0 && a == c) ? 2 : 1);
            }
        w.canonicalize();
        CHECK(std::stol(f[2]) == count);
        CHECK(f[1] == w.get_str());
        CHECK(f[3] == f[1]);
        ++rows;
    }
    CHECK(rows == 50); // D = 0, 3 mod 4 in [3, 100]
}

TEST_CASE("csv and json carry the same data")
{
    for (std::vector<std::string> base : {std::vector<std::string>{"trace", "--range", "3:60"},
                                          std::vector<std::string>{"duke", "--dmax", "200"},
                                          std::vector<std::string>{"classnum", "--range", "0:50"}}) {
        base.push_back("--no-cache");
        outcome j = cli(base);
        base.insert(base.end(), {"--format", "csv"});
        outcome c = cli(base);
        REQUIRE(j.code == 0);
        REQUIRE(c.code == 0);
        auto jl = lines(j.out), cl = lines(c.out);
        REQUIRE(cl.size() == jl.size() + 1);
        auto cols = split(cl[0], ',');
        for (std::size_t i = 0; i < jl.size(); ++i) {
            json row = json::parse(jl[i]);
            auto f = split(cl[i + 1], ',');
            REQUIRE(f.size() == cols.size());
            for (std::size_t k = 0; k < cols.size(); ++k) {
                const json& v = row.at(cols[k]);
                std::string want = v.is_null() ? "" : v.is_string() ? v.get<std::string>() : v.dump();
                CHECK(f[k] == want);
            }
        }
    }
}

TEST_CASE("golden outputs")
{
    struct golden {
        const char* file;
        std::vector<std::string> args;
    };
    const std::vector<golden> tables = {
        {"trace_J_3_40.jsonl", {"trace", "--f", "J", "--range", "3:40"}},
        {"classnum_0_60.csv", {"classnum", "--range", "0:60", "--format", "csv"}},
        {"forms_84_level3.jsonl", {"forms", "--D", "84", "--level", "3"}},
        {"series_g_30.jsonl", {"series", "--name", "g", "--trunc", "30"}},
        {"duke_3_40.jsonl", {"duke", "--dmax", "40"}},
    };
    for (auto g : tables) {
        g.args.push_back("--no-cache");
        outcome r = cli(g.args);
        CHECK(r.code == 0);
        CHECK_MESSAGE(r.out == slurp(golden_dir / g.file), g.file);
    }
    // reports: everything except timing
    outcome r = cli({"reduce", "--form", "6,1,1"});
    json rep = json::parse(r.out);
    CHECK(rep.contains("timing"));
    CHECK_FALSE(rep.contains("pass"));
    rep.erase("timing");
    CHECK(rep == json::parse(slurp(golden_dir / "reduce_6_1_1.json")));
    std::vector<std::string> keys;
    const json full = json::parse(r.out);
    for (const auto& [k, v] : full.items())
        keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"command", "inputs", "outputs", "provenance", "timing"});
}

TEST_CASE("thread count does not change table output")
{
    for (std::vector<std::string> base :
         {std::vector<std::string>{"trace", "--range", "3:250"}, std::vector<std::string>{"duke", "--dmax", "1500"},
          std::vector<std::string>{"classnum", "--range", "0:2000"},
          std::vector<std::string>{"trace", "--f", "J2", "--range", "3:120", "--format", "csv"}}) {
        base.push_back("--no-cache");
        auto a = base, b = base;
        a.insert(a.end(), {"--threads", "1"});
        b.insert(b.end(), {"--threads", "3"});
        outcome x = cli(a), y = cli(b);
        CHECK(x.code == 0);
        CHECK(x.out == y.out);
        CHECK_FALSE(x.out.empty());
    }
}

TEST_CASE("cache hits are byte identical and corrupt entries are recomputed")
{
    const fs::path dir = scratch("cache");
    const std::vector<std::string> args = {"trace", "--range", "3:500", "--cache-dir", dir.string()};
    outcome first = cli(args);
    REQUIRE(first.code == 0);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        files.push_back(e.path());
    REQUIRE(files.size() == 1);
    const auto stamp = fs::last_write_time(files[0]);

    outcome second = cli(args);
    CHECK(second.out == first.out);
    CHECK(fs::last_write_time(files[0]) == stamp);

    auto nc = args;
    nc.push_back("--no-cache");
    CHECK(cli(nc).out == first.out);

    // flip one payload digit: checksum no longer matches
    std::string body = slurp(files[0]);
    const auto pos = body.find("\"-248\"");
    REQUIRE(pos != std::string::npos);
    body[pos + 4] = '7';
    std::ofstream(files[0], std::ios::binary | std::ios::trunc) << body;
    outcome third = cli(args);
    CHECK(third.code == 0);
    CHECK(third.out == first.out);
    CHECK(third.err.find("corrupt cache entry") != std::string::npos);

    // garbage header
    std::ofstream(files[0], std::ios::binary | std::ios::trunc) << "not json\n";
    outcome fourth = cli(args);
    CHECK(fourth.out == first.out);
    CHECK(fourth.err.find("corrupt cache entry") != std::string::npos);
    CHECK(cli(args).err.empty());

    // reports are cached too; provenance says so
    const std::vector<std::string> pargs = {"poincare", "--cmax", "1000", "--cache-dir", dir.string()};
    CHECK(json::parse(cli(pargs).out)["provenance"]["cached"] == false);
    json again = json::parse(cli(pargs).out);
    CHECK(again["provenance"]["cached"] == true);
    CHECK(again["inputs"]["c_max"] == 1000);
}

TEST_CASE("cache versioning")
{
    const fs::path dir = scratch("versions");
    result_cache v1(dir, "1.0.0", nullptr), v2(dir, "1.0.1", nullptr);
    const json inputs{{"D", "3:10"}};
    const std::string k1 = v1.key_of("trace", inputs, 0), k2 = v2.key_of("trace", inputs, 0);
    CHECK(k1 != k2);
    CHECK(v1.path_of(k1) != v2.path_of(k2));
    v1.put(k1, json{{"x", 1}});
    CHECK(v1.get(k1) == json{{"x", 1}});
    CHECK_FALSE(v2.get(k2).has_value());
    // an old-version file under the new name is ignored, not trusted
    fs::copy_file(v1.path_of(k1), v2.path_of(k2));
    CHECK_FALSE(v2.get(k2).has_value());
    CHECK(v1.key_of("trace", inputs, 128) != k1);

    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("cache directory from the environment")
{
    ::setenv("CMTRACE_CACHE_DIR", "/tmp/somewhere", 1);
    CHECK(default_cache_dir() == fs::path("/tmp/somewhere"));
    ::unsetenv("CMTRACE_CACHE_DIR");
    CHECK(default_cache_dir() != fs::path("/tmp/somewhere"));
}

TEST_CASE("exit codes")
{
    outcome r = cli({"trace", "--bogus"});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"trace", "--D", "5", "--no-cache"}).code == 2);
    CHECK(cli({"trace", "--D", "3", "--precision", "32", "--no-cache"}).code == 2);
    CHECK(cli({"trace", "--D", "3", "--threads", "0", "--no-cache"}).code == 2);
    CHECK(cli({"reduce", "--form", "1,1,-1"}).code == 2);
    CHECK(cli({"exactformula", "--D", "3", "--cmax", "10", "--no-cache"}).code == 2);
    CHECK(cli({"series", "--name", "nope", "--no-cache"}).code == 2);
    CHECK(cli({"--help"}).code == 0);

    r = cli({"trace", "--D", "2003", "--precision", "64", "--no-cache"});
    CHECK(r.code == 3);
    CHECK(r.err.find("2003") != std::string::npos);

    r = cli({"verify", "zagier", "--dmax", "500"});
    CHECK(r.code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["pass"] == true);
    CHECK(rep["outputs"]["checks"][0]["detail"]["rows"].size() == 250);

    r = cli({"verify", "zagier", "--dmax", "100", "--corrupt-g", "3:-247"});
    CHECK(r.code == 1);
    CHECK(r.err.find("zagier") != std::string::npos);
    rep = json::parse(r.out);
    CHECK(rep["pass"] == false);
    CHECK(rep["outputs"]["checks"][0]["detail"]["mismatches"] == json::array({3}));
}

TEST_CASE("output file and report formats")
{
    const fs::path dir = scratch("out");
    const fs::path f = dir / "t.jsonl";
    outcome a = cli({"trace", "--range", "3:30", "--no-cache"});
    outcome b = cli({"trace", "--range", "3:30", "--no-cache", "--out", f.string()});
    CHECK(b.code == 0);
    CHECK(b.out.empty());
    CHECK(slurp(f) == a.out);

    outcome c = cli({"poincare", "--cmax", "500", "--no-cache", "--format", "csv"});
    CHECK(c.code == 0);
    CHECK(lines(c.out).front() == "field,value");
    CHECK(c.out.find("/inputs/c_max,500") != std::string::npos);

    // defaults are echoed
    json p = json::parse(cli({"exactformula", "--D", "7", "--no-cache"}).out);
    CHECK(p["inputs"]["c_max"] == 10000);
    CHECK(p["outputs"]["rows"][0]["nearest"] == "-4119");
    json t = json::parse(cli({"theta", "--tau", "0,1", "--f", "1", "--no-cache"}).out);
    CHECK(t["inputs"]["tol"] == 1e-3);
    for (const char* k : {"tau", "f", "component", "integral", "prediction", "abs_err", "rel_err", "tol", "budget"})
        CHECK(t["outputs"].contains(k));
    CHECK(t["outputs"]["rel_err"].get<double>() < 0.01);
}
