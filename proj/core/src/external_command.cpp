#include "dpscan/external_command.hpp"

#include <array>
#include <cctype>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "dpscan/errors.hpp"
#include "dpscan/fixtures.hpp"
#include "dpscan/raster.hpp"

namespace dpscan {

namespace {

/// Removes its path on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& suffix) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dpscan-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + suffix);
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

std::string expand_command(const std::string& tmpl,
                           const std::vector<std::pair<std::string, std::string>>& vars) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size();) {
        bool replaced = false;
        if (tmpl[i] == '{') {
            for (const auto& [name, value] : vars) {
                const std::string key = "{" + name + "}";
                if (tmpl.compare(i, key.size(), key) == 0) {
                    out += shell_quote(value);
                    i += key.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += tmpl[i++];
    }
    return out;
}

std::string run_command(const std::string& command, const std::string& id) {
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) throw BackendError(id, "cannot start command");
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw BackendError(id, "command exited with status " +
                                   std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    }
    return out;
}

std::vector<OcrBlock> CommandOcr::recognize(const Raster& image) {
    TempFile png(".png");
    write_png(image, png.path());
    const auto out = run_command(expand_command(command_, {{"image", png.path().string()}}), id_);
    try {
        return parse_ocr_blocks(out);
    } catch (const Error& e) {
        throw BackendError(id_, std::string("unreadable output: ") + e.what());
    }
}

std::vector<Detection> CommandDetector::detect(const Raster& image) {
    TempFile png(".png");
    write_png(image, png.path());
    const auto out = run_command(expand_command(command_, {{"image", png.path().string()}}), id_);
    try {
        auto dets = parse_detections(out);
        for (auto& d : dets) {
            if (d.source.empty()) d.source = id_;
        }
        return dets;
    } catch (const Error& e) {
        throw BackendError(id_, std::string("unreadable output: ") + e.what());
    }
}

Raster CommandBrowser::screenshot(const std::string& url) {
    TempFile png(".png");
    run_command(expand_command(command_, {{"url", url}, {"out", png.path().string()}}), id_);
    try {
        return read_png(png.path());
    } catch (const Error& e) {
        throw BackendError(id_, std::string("no screenshot: ") + e.what());
    }
}

std::vector<std::string> CommandSearch::search(const std::string& query, std::size_t limit) {
    const auto out = run_command(
        expand_command(command_, {{"query", query}, {"limit", std::to_string(limit)}}), id_);
    std::vector<std::string> urls;
    std::istringstream is(out);
    for (std::string line; std::getline(is, line) && urls.size() < limit;) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) urls.push_back(line);
    }
    return urls;
}

std::string sanitize_for_filename(const std::string& s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '.' || c == '-') {
            out += static_cast<char>(std::tolower(c));
        } else {
            out += '_';
        }
    }
    return out;
}

Raster DirectoryBrowser::screenshot(const std::string& url) {
    namespace fs = std::filesystem;
    std::string stripped = url;
    if (auto p = stripped.find("://"); p != std::string::npos) stripped.erase(0, p + 3);
    while (!stripped.empty() && stripped.back() == '/') stripped.pop_back();
    for (const auto& name : {sanitize_for_filename(stripped), sanitize_for_filename(domain_of(url))}) {
        const fs::path p = fs::path(dir_) / (name + ".png");
        if (fs::exists(p)) return read_png(p);
    }
    throw BackendError(id_, "no screenshot for '" + url + "' in " + dir_);
}

}  // namespace dpscan
