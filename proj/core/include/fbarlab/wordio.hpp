#ifndef FBARLAB_WORDIO_HPP
#define FBARLAB_WORDIO_HPP

#include "fbar.hpp"
#include "symbols.hpp"

#include <string>
#include <vector>

namespace fbarlab {

// Word files: one string per line, comma-separated symbol ids; a shaded
// string appends "|" followed by one bit character per symbol.
std::string format_word_line(const SString& s);
SString parse_word_line(const std::string& line);

std::vector<SString> read_words_file(const std::string& path);
void write_words_file(const std::string& path, const std::vector<SString>& words);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a digest of a file's bytes, hex-encoded; used in run manifests.
std::string file_digest(const std::string& path);

}  // namespace fbarlab

#endif
