#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "hitop/fetch.hpp"

#include <httplib.h>

#include <filesystem>

#include "hitop/io.hpp"

namespace hitop {

namespace {

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string path;
    std::string basename;
};

UrlParts split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("fetch url: expected http(s)://..., got '" + url + "'");
    auto path_start = url.find('/', scheme_end + 3);
    UrlParts p;
    if (path_start == std::string::npos) {
        p.origin = url;
        p.path = "/";
    } else {
        p.origin = url.substr(0, path_start);
        p.path = url.substr(path_start);
    }
    auto slash = p.path.find_last_of('/');
    p.basename = p.path.substr(slash + 1);
    if (p.basename.empty()) throw ConfigError("fetch url: no file name in '" + url + "'");
    return p;
}

} // namespace

std::string fetch_dataset_file(const FetchEntry& entry, const std::string& dest_dir) {
    if (entry.url.empty()) throw ConfigError("fetch: entry has no url");
    UrlParts parts = split_url(entry.url);

    httplib::Client client(parts.origin);
    client.set_follow_location(true);
    client.set_connection_timeout(15, 0);
    client.set_read_timeout(60, 0);

    auto res = client.Get(parts.path);
    if (!res)
        throw DataError("fetch: request to " + entry.url + " failed: " +
                        httplib::to_string(res.error()));
    if (res->status != 200)
        throw DataError("fetch: " + entry.url + " returned HTTP " + std::to_string(res->status));

    std::span<const std::uint8_t> body(reinterpret_cast<const std::uint8_t*>(res->body.data()),
                                       res->body.size());
    if (!entry.sha256.empty()) {
        std::string got = sha256_hex(body);
        if (got != entry.sha256)
            throw DataError("fetch: checksum mismatch for " + entry.url + ": expected " +
                            entry.sha256 + ", got " + got);
    }

    std::string name = entry.filename.empty() ? parts.basename : entry.filename;
    std::string out = (std::filesystem::path(dest_dir) / name).string();
    atomic_write_file(out, body);
    return out;
}

} // namespace hitop
