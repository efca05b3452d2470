#pragma once

#include <string>
#include <vector>

#include "dpscan/crawler.hpp"
#include "dpscan/vision.hpp"

namespace dpscan {

/// Runs `command` through /bin/sh and returns its stdout. Throws BackendError(id) on a
/// non-zero exit status.
std::string run_command(const std::string& command, const std::string& id);

/// Single-quotes `arg` for /bin/sh.
std::string shell_quote(const std::string& arg);

/// Replaces every `{name}` in `tmpl` with the shell-quoted value.
std::string expand_command(const std::string& tmpl,
                           const std::vector<std::pair<std::string, std::string>>& vars);

/// `{image}` is replaced by a temporary PNG path; stdout must be the OCR fixture format.
class CommandOcr final : public OcrBackend {
public:
    CommandOcr(std::string command, std::string id = "command-ocr")
        : command_(std::move(command)), id_(std::move(id)) {}
    std::vector<OcrBlock> recognize(const Raster& image) override;
    std::string id() const override { return id_; }
    bool deterministic() const override { return false; }

private:
    std::string command_;
    std::string id_;
};

/// `{image}` is replaced by a temporary PNG path; stdout must be the detection fixture format.
class CommandDetector final : public DetectorBackend {
public:
    CommandDetector(std::string command, std::string id = "command-detector")
        : command_(std::move(command)), id_(std::move(id)) {}
    std::vector<Detection> detect(const Raster& image) override;
    std::string id() const override { return id_; }
    bool deterministic() const override { return false; }

private:
    std::string command_;
    std::string id_;
};

/// `{url}` and `{out}` are substituted; the command must write a PNG to `{out}`.
class CommandBrowser final : public BrowserDriver {
public:
    CommandBrowser(std::string command, std::string id = "command-browser")
        : command_(std::move(command)), id_(std::move(id)) {}
    Raster screenshot(const std::string& url) override;
    std::string id() const override { return id_; }

private:
    std::string command_;
    std::string id_;
};

/// `{query}` and `{limit}` are substituted; stdout lists one URL per line.
class CommandSearch final : public SearchBackend {
public:
    CommandSearch(std::string command, std::string id = "command-search")
        : command_(std::move(command)), id_(std::move(id)) {}
    std::vector<std::string> search(const std::string& query, std::size_t limit) override;
    std::string id() const override { return id_; }

private:
    std::string command_;
    std::string id_;
};

/// Serves every URL from a directory of PNG files named `<domain>.png`, falling back
/// to `<domain>_<n>.png` style names produced by sanitize_for_filename().
class DirectoryBrowser final : public BrowserDriver {
public:
    explicit DirectoryBrowser(std::string dir, std::string id = "directory-browser")
        : dir_(std::move(dir)), id_(std::move(id)) {}
    Raster screenshot(const std::string& url) override;
    std::string id() const override { return id_; }

private:
    std::string dir_;
    std::string id_;
};

/// Lower-case alphanumerics, dots and dashes; everything else becomes '_'.
std::string sanitize_for_filename(const std::string& s);

}  // namespace dpscan
