#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace predtown {

namespace detail {

// Latin-1 supplement fold table: accented letters to ASCII base letters.
// Fixed table rather than locale collation so results never depend on the
// host environment. Code points without a base letter fold to "".
inline const char* latin1_fold(char32_t cp) {
    switch (cp) {
        case U'À': case U'Á': case U'Â': case U'Ã': case U'Ä': case U'Å':
        case U'à': case U'á': case U'â': case U'ã': case U'ä': case U'å':
            return "A";
        case U'Æ': case U'æ':
            return "AE";
        case U'Ç': case U'ç':
            return "C";
        case U'È': case U'É': case U'Ê': case U'Ë':
        case U'è': case U'é': case U'ê': case U'ë':
            return "E";
        case U'Ì': case U'Í': case U'Î': case U'Ï':
        case U'ì': case U'í': case U'î': case U'ï':
            return "I";
        case U'Ð': case U'ð':
            return "D";
        case U'Ñ': case U'ñ':
            return "N";
        case U'Ò': case U'Ó': case U'Ô': case U'Õ': case U'Ö': case U'Ø':
        case U'ò': case U'ó': case U'ô': case U'õ': case U'ö': case U'ø':
            return "O";
        case U'Ù': case U'Ú': case U'Û': case U'Ü':
        case U'ù': case U'ú': case U'û': case U'ü':
            return "U";
        case U'Ý': case U'ý': case U'ÿ':
            return "Y";
        case U'Þ': case U'þ':
            return "TH";
        case U'ß':
            return "SS";
        default:
            return "";
    }
}

// Decodes one UTF-8 code point starting at i; advances i. Malformed bytes
// decode as U+FFFD and consume a single byte.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + extra >= s.size()) {
        // not enough continuation bytes
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k <= extra; ++k) {
        const unsigned char bk = byte(i + k);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += extra + 1;
    return cp;
}

} // namespace detail

// Canonicalizes a free-text label: accented Latin-1 letters fold to ASCII,
// anything outside [A-Za-z0-9 -] is removed, the result is upper-cased,
// trimmed, and internal whitespace collapsed. Total and idempotent; the
// empty string is a legal result.
inline std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    const auto push = [&](char c) {
        if (pending_space) {
            if (!out.empty()) out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    };
    std::size_t i = 0;
    while (i < raw.size()) {
        const char32_t cp = detail::decode_utf8(raw, i);
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (c >= 'a' && c <= 'z') {
                push(static_cast<char>(c - 'a' + 'A'));
            } else if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-') {
                push(c);
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                pending_space = true;
            }
            // other ASCII: removed
        } else {
            for (const char* f = detail::latin1_fold(cp); *f; ++f) push(*f);
        }
    }
    return out;
}

} // namespace predtown
