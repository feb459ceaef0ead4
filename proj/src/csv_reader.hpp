#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "riskscan/error.hpp"

namespace riskscan::detail {

// Line-oriented reader for the small CSV dialect used by the input files:
// comma separated, optional double quotes, '#' comment lines and blank lines
// skipped. Row numbers are 1-based physical line numbers.
class CsvReader {
public:
    explicit CsvReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) {
            throw InputError(fmt::format("cannot open '{}'", path));
        }
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
                line.erase(0, 3);
            }
            if (line.empty() || line.front() == '#') {
                continue;
            }
            fields = split(line);
            return true;
        }
        return false;
    }

    void expect_header(std::string_view expected) {
        std::vector<std::string> fields;
        if (!next(fields)) {
            throw InputError(fmt::format("{}: empty file, expected header '{}'", path_, expected));
        }
        if (fmt::format("{}", fmt::join(fields, ",")) != expected) {
            throw InputError(fmt::format("{}: line {}: expected header '{}'", path_, line_no_, expected));
        }
    }

    [[noreturn]] void fail(std::string_view what) const {
        throw InputError(fmt::format("{}: row {}: {}", path_, line_no_, what));
    }

    std::size_t line() const { return line_no_; }
    const std::string& path() const { return path_; }

private:
    std::vector<std::string> split(const std::string& line) const {
        std::vector<std::string> out;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur.push_back(c);
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                out.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (quoted) {
            fail("unterminated quote");
        }
        out.push_back(std::move(cur));
        return out;
    }

    std::string path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

}  // namespace riskscan::detail
