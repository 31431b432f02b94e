#include "stratify/cli/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include "stratify/classifiers/model.hpp"
#include "stratify/core/error.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::cli {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : artifacts) a.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    return {{"command", command},
            {"config", config},
            {"seed", seed},
            {"artifacts", a},
            {"started_at", started_at},
            {"finished_at", finished_at},
            {"versions",
             {{"stratify", kVersion},
              {"model_format", classifiers::kModelFormatVersion},
              {"simd", std::string(simd::isa_name(simd::active_isa()))}}}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("artifacts"))
            m.artifacts.push_back({e.at("file").get<std::string>(), e.at("sha256").get<std::string>(), e.at("bytes").get<std::uint64_t>()});
        m.started_at = j.value("started_at", "");
        m.finished_at = j.value("finished_at", "");
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("manifest: ") + e.what());
    }
    return m;
}

RunManifest write_manifest(const std::string& dir, const std::string& command, const nlohmann::json& config,
                           std::uint64_t seed, std::vector<std::string> files, const std::string& started_at) {
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    RunManifest m;
    m.command = command;
    m.config = config;
    m.seed = seed;
    m.started_at = started_at;
    for (const auto& f : files) {
        auto path = std::filesystem::path(dir) / f;
        m.artifacts.push_back({f, sha256_file(path.string()), static_cast<std::uint64_t>(std::filesystem::file_size(path))});
    }
    m.finished_at = utc_now();
    std::ofstream out(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
    if (!out) throw InputError("cannot write manifest in " + dir);
    out << m.to_json().dump(2) << '\n';
    return m;
}

}  // namespace stratify::cli
