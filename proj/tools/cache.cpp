#include "cache.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

namespace cmtrace::cli {

namespace fs = std::filesystem;

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

result_cache::result_cache(fs::path dir, std::string version, std::ostream* warn)
    : dir_(std::move(dir)), version_(std::move(version)), warn_(warn)
{
}

std::string result_cache::key_of(const std::string& op, const json& inputs, int precision) const
{
    json k;
    k["op"] = op;
    k["inputs"] = inputs;
    k["precision"] = precision;
    k["version"] = version_;
    return k.dump();
}

fs::path result_cache::path_of(const std::string& key) const
{
    return dir_ / (hex64(fnv1a(key)) + ".json");
}

std::optional<json> result_cache::get(const std::string& key)
{
    const fs::path p = path_of(key);
    std::ifstream in(p, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::string header, body;
    std::getline(in, header);
    std::getline(in, body);
    try {
        json h = json::parse(header);
        if (h.at("version").get<std::string>() != version_)
            return std::nullopt;
        // a different key with the same hash; not corruption
        if (h.at("key").get<std::string>() != key)
            return std::nullopt;
        if (h.at("checksum").get<std::string>() != hex64(fnv1a(body)))
            throw std::runtime_error("checksum mismatch");
        return json::parse(body);
    } catch (const std::exception& e) {
        if (warn_)
            *warn_ << "warning: discarding corrupt cache entry " << p.string() << " (" << e.what()
                   << "), recomputing\n";
        std::error_code ec;
        fs::remove(p, ec);
        return std::nullopt;
    }
}

void result_cache::put(const std::string& key, const json& payload)
{
    const std::string body = payload.dump();
    json h;
    h["key"] = key;
    h["version"] = version_;
    h["checksum"] = hex64(fnv1a(body));

    std::lock_guard<std::mutex> lock(write_mutex_);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const fs::path p = path_of(key);
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            if (warn_)
                *warn_ << "warning: cannot write cache entry " << p.string() << "\n";
            return;
        }
        out << h.dump() << '\n' << body << '\n';
    }
    fs::rename(tmp, p, ec);
    if (ec && warn_)
        *warn_ << "warning: cannot write cache entry " << p.string() << "\n";
}

} // namespace cmtrace::cli
