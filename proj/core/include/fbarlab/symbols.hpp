#ifndef FBARLAB_SYMBOLS_HPP
#define FBARLAB_SYMBOLS_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fbarlab {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

struct Run {
    Symbol symbol;
    std::uint64_t length;
    bool operator==(const Run&) const = default;
};

// Run-length encoded word. Adjacent runs always carry distinct symbols
// and every run has positive length (normal form).
using RleWord = std::vector<Run>;

inline RleWord rle_encode(const Word& w) {
    RleWord out;
    for (Symbol s : w) {
        if (!out.empty() && out.back().symbol == s)
            ++out.back().length;
        else
            out.push_back({s, 1});
    }
    return out;
}

inline std::uint64_t rle_length(const RleWord& r) {
    std::uint64_t n = 0;
    for (const Run& run : r) n += run.length;
    return n;
}

inline Word rle_decode(const RleWord& r) {
    Word out;
    out.reserve(static_cast<std::size_t>(rle_length(r)));
    for (const Run& run : r)
        for (std::uint64_t i = 0; i < run.length; ++i) out.push_back(run.symbol);
    return out;
}

// Collapse adjacent equal-symbol runs and drop empty ones.
inline RleWord rle_normalize(const RleWord& r) {
    RleWord out;
    for (const Run& run : r) {
        if (run.length == 0) continue;
        if (!out.empty() && out.back().symbol == run.symbol)
            out.back().length += run.length;
        else
            out.push_back(run);
    }
    return out;
}

inline Word reversed(Word w) {
    std::reverse(w.begin(), w.end());
    return w;
}

}  // namespace fbarlab

#endif
