#pragma once

// Tokenizer shared by the program and assertion parsers.

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "qimp/lang.hpp"

namespace qimp::detail {

enum class Tok {
    Ident,
    Int,
    Real,
    Sym,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceLoc loc;
    /// Byte offsets into the source, used to slice out raw matrix literals.
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct LexOptions {
    /// Allow '$' inside identifiers (reserved for generated names).
    bool dollar_idents = false;
};

inline std::vector<Token> tokenize(std::string_view src, LexOptions opt = {}) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    static constexpr std::string_view kSymbols[] = {":=", "<=", "!=", "->", "..", "(+)", "|0>",
                                                    ";",  ",",  "(",  ")",  "[",  "]",   "{",
                                                    "}",  "+",  "-",  "*",  "=",  "<",   ":",
                                                    "~",  "|",  ">"};
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.loc = {line, col};
        t.begin = i;
        const bool ident_start = std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
                                 (opt.dollar_idents && c == '$');
        if (ident_start) {
            std::size_t j = i + 1;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                      (opt.dollar_idents && src[j] == '$')))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            bool real = false;
            // "0..3" is a range, not a real number.
            if (j + 1 < src.size() && src[j] == '.' && src[j + 1] != '.') {
                real = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    real = true;
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            t.kind = real ? Tok::Real : Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            bool matched = false;
            for (auto sym : kSymbols) {
                if (src.substr(i, sym.size()) == sym) {
                    t.kind = Tok::Sym;
                    t.text = std::string(sym);
                    advance(sym.size());
                    matched = true;
                    break;
                }
            }
            if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", t.loc);
        }
        t.end = i;
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.loc = {line, col};
    end.begin = end.end = src.size();
    out.push_back(end);
    return out;
}

class TokenStream {
public:
    TokenStream(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool is_sym(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
    }
    bool is_word(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == s;
    }
    bool accept_sym(std::string_view s) {
        if (!is_sym(s)) return false;
        next();
        return true;
    }
    bool accept_word(std::string_view s) {
        if (!is_word(s)) return false;
        next();
        return true;
    }
    const Token& expect_sym(std::string_view s) {
        if (!is_sym(s)) fail("expected '" + std::string(s) + "'");
        return next();
    }
    void expect_word(std::string_view s) {
        if (!is_word(s)) fail("expected '" + std::string(s) + "'");
        next();
    }
    std::string expect_ident(std::string_view what = "identifier") {
        if (peek().kind != Tok::Ident) fail("expected " + std::string(what));
        return next().text;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", found " + found, t.loc);
    }
    bool at_end() const { return peek().kind == Tok::End; }

    std::size_t mark() const { return pos_; }
    void reset(std::size_t m) { pos_ = m; }

    /// Consumes a bracketed matrix literal and returns its raw text.
    std::string_view raw_bracketed() {
        if (!is_sym("[")) fail("expected matrix literal");
        const std::size_t start = peek().begin;
        int depth = 0;
        std::size_t stop = start;
        do {
            const Token& t = next();
            if (t.kind == Tok::End) throw ParseError("unterminated matrix literal", t.loc);
            if (t.kind == Tok::Sym && t.text == "[") ++depth;
            if (t.kind == Tok::Sym && t.text == "]") --depth;
            stop = t.end;
        } while (depth > 0);
        return src_.substr(start, stop - start);
    }

    std::string_view source() const { return src_; }

private:
    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

/// Parses a matrix literal at the current position, mapping literal errors to ParseError.
inline CMatrix parse_matrix_at(TokenStream& ts) {
    const SourceLoc loc = ts.peek().loc;
    const auto raw = ts.raw_bracketed();
    try {
        return parse_matrix(raw);
    } catch (const LiteralError& e) {
        throw ParseError(e.what(), loc);
    }
}

}  // namespace qimp::detail
