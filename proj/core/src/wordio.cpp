#include "fbarlab/wordio.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fbarlab {

std::string format_word_line(const SString& s) {
    std::ostringstream out;
    for (std::size_t i = 0; i < s.symbols.size(); ++i) {
        if (i) out << ',';
        out << s.symbols[i];
    }
    if (s.shaded()) {
        out << '|';
        for (std::uint8_t b : s.shading) out << (b ? '1' : '0');
    }
    return out.str();
}

SString parse_word_line(const std::string& line) {
    SString s;
    const std::size_t bar = line.find('|');
    const std::string syms = line.substr(0, bar);
    std::istringstream in(syms);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) s.symbols.push_back(static_cast<Symbol>(std::stoul(tok)));
    if (bar != std::string::npos) {
        for (std::size_t i = bar + 1; i < line.size(); ++i) {
            const char c = line[i];
            if (c == '0' || c == '1') s.shading.push_back(c == '1');
        }
        if (s.shading.size() != s.symbols.size())
            throw std::invalid_argument("word line: shading length mismatch");
    }
    return s;
}

std::vector<SString> read_words_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<SString> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(parse_word_line(line));
    return out;
}

void write_words_file(const std::string& path, const std::vector<SString>& words) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const SString& w : words) out << format_word_line(w) << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

std::string file_digest(const std::string& path) {
    const std::string bytes = read_text_file(path);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace fbarlab
