#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "axby/common.hpp"

namespace axby::cli {

using Json = nlohmann::ordered_json;

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON text with every float printed as %.17g.
inline void write_json(std::ostream& os, const Json& j, int indent = 0) {
    auto pad = [&](int n) { os << std::string(static_cast<size_t>(n), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                break;
            }
            os << "{\n";
            size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                pad(indent + 2);
                os << Json(it.key()).dump() << ": ";
                write_json(os, it.value(), indent + 2);
                os << (i + 1 < j.size() ? ",\n" : "\n");
            }
            pad(indent);
            os << "}";
            break;
        }
        case Json::value_t::array: {
            os << "[";
            size_t i = 0;
            for (auto& v : j) {
                write_json(os, v, indent);
                if (++i < j.size()) os << ", ";
            }
            os << "]";
            break;
        }
        case Json::value_t::number_float: {
            double x = j.get<double>();
            if (std::isfinite(x))
                os << fmt17(x);
            else
                os << "null";
            break;
        }
        default:
            os << j.dump();
    }
}

inline std::string json_text(const Json& j) {
    std::ostringstream os;
    write_json(os, j);
    return os.str();
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

struct Manifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Json to_json(const std::string& digest) const {
        Json m;
        m["subcommand"] = subcommand;
        m["parameters"] = Json::object();
        for (auto& [k, v] : parameters) m["parameters"][k] = v;
        m["version"] = kVersion;
        char ts[32];
        std::time_t now = std::time(nullptr);
        std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m["timestamp"] = ts;
        m["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m["output_digest"] = digest;
        return m;
    }
};

// Relative paths go under $AXBY_OUT_DIR when it is set.
inline std::string resolve_output(const std::string& path) {
    if (path.empty() || path == "-") return path;
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("AXBY_OUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p.string();
}

inline void emit(const std::string& path, const std::string& text) {
    auto target = resolve_output(path);
    if (target.empty() || target == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open output " + target);
    out << text;
}

// {"manifest": ..., "data": ...}; the digest covers the data text only.
inline void emit_json(const std::string& path, const Manifest& m, const Json& data) {
    std::ostringstream bs;
    write_json(bs, data, 2);
    const std::string body = bs.str();
    std::ostringstream os;
    os << "{\n  \"manifest\": ";
    write_json(os, m.to_json(hex64(fnv1a(body))), 2);
    os << ",\n  \"data\": " << body << "\n}\n";
    emit(path, os.str());
}

// Manifest as '#'-prefixed JSON lines, then the CSV rows.
inline void emit_csv(const std::string& path, const Manifest& m, const std::string& csv) {
    std::ostringstream os;
    std::istringstream ms(json_text(m.to_json(hex64(fnv1a(csv)))));
    std::string line;
    while (std::getline(ms, line)) os << "# " << line << '\n';
    os << csv;
    emit(path, os.str());
}

}  // namespace axby::cli
