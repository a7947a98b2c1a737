#ifndef CMTRACE_TOOLS_CACHE_HPP
#define CMTRACE_TOOLS_CACHE_HPP

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cmtrace::cli {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t x);

/*
 * Content-addressed result store.  One file per key:
 *   line 1: {"key": ..., "version": ..., "checksum": ...}
 *   line 2: payload
 * The file name is the FNV-1a hash of the key string, which itself contains
 * the code version, so a version bump never sees old entries.
 */
class result_cache {
public:
    result_cache(std::filesystem::path dir, std::string version, std::ostream* warn);

    std::string key_of(const std::string& op, const json& inputs, int precision) const;
    std::filesystem::path path_of(const std::string& key) const;

    std::optional<json> get(const std::string& key);
    void put(const std::string& key, const json& payload);

    const std::filesystem::path& dir() const { return dir_; }
    const std::string& version() const { return version_; }

private:
    std::filesystem::path dir_;
    std::string version_;
    std::ostream* warn_;
    std::mutex write_mutex_;
};

} // namespace cmtrace::cli

#endif
