#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace suptail {

// Locale-independent significant-digit formatting (std::to_chars, %g-style).
inline std::string format_sig(double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

// RFC-4180 CSV writer: UTF-8 passthrough, "\n" line endings, quoting only when needed.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out, int significant_digits = 15)
        : out_(out), sig_(significant_digits) {}

    std::string num(double v) const { return format_sig(v, sig_); }
    static std::string num(std::uint64_t v) { return std::to_string(v); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            write_escaped(cells[i]);
        }
        out_ << '\n';
    }

  private:
    void write_escaped(std::string_view cell) {
        const bool needs_quotes =
            cell.find_first_of(",\"\n\r") != std::string_view::npos;
        if (!needs_quotes) {
            out_ << cell;
            return;
        }
        out_ << '"';
        for (char ch : cell) {
            if (ch == '"') out_ << '"';
            out_ << ch;
        }
        out_ << '"';
    }

    std::ostream& out_;
    int sig_;
};

}  // namespace suptail
