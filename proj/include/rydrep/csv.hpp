#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydrep {

// Shortest-faithful decimal form at 17 significant digits (printf %.17g):
// round-trips every double, identical across platforms for identical bits.
inline std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Minimal CSV emitter: comma separation, header row, LF line endings.
// The file is opened in binary mode so the byte stream is exactly what was
// written on every platform.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        path_ = path;
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        if (!out_) throw std::runtime_error("write failed: " + path_);
    }

  private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace rydrep
