#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "passport/errors.hpp"

namespace passport {

// Minimal CSV writer: header row plus %.17g-formatted numeric cells, which
// round-trips doubles exactly.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw Error("cannot open for writing: " + path);
    }

    void header(const std::vector<std::string>& cols) { row_strings(cols); }

    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    class Row {
    public:
        explicit Row(std::ofstream& out) : out_(out) {}
        Row& cell(double v) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return raw(buf);
        }
        Row& cell(long long v) { return raw(std::to_string(v)); }
        Row& cell(int v) { return raw(std::to_string(v)); }
        Row& cell(std::size_t v) { return raw(std::to_string(v)); }
        Row& cell(const std::string& s) { return raw(s); }
        ~Row() { out_ << '\n'; }

    private:
        Row& raw(const std::string& s) {
            if (!first_) out_ << ',';
            first_ = false;
            out_ << s;
            return *this;
        }
        std::ofstream& out_;
        bool first_ = true;
    };

    Row row() { return Row(out_); }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

}  // namespace passport
