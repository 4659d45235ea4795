#include "groupcast/response.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace groupcast {

std::string_view strategy_name(ParseStrategy s) {
    switch (s) {
        case ParseStrategy::Canonical: return "canonical";
        case ParseStrategy::TolerantLine: return "tolerant_line";
        case ParseStrategy::TokenScan: return "token_scan";
        case ParseStrategy::Fallback: return "fallback";
    }
    return "fallback";
}

std::string render_canonical(const BinarySeries& series) {
    std::string out;
    const int n = series.n();
    out.reserve(static_cast<std::size_t>(n * (n - 1) * (16 + series.seconds() * 24)));
    auto yn = [](bool b) { return b ? 'Y' : 'N'; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            out += "Pair " + participant_label(i) + "->" + participant_label(j) + ":\n";
            for (int s = 0; s < series.seconds(); ++s) {
                out += "t=" + std::to_string(s + 1) + ": C=";
                out += yn(series.active(Modality::Conversation, i, j, s));
                out += ", P=";
                out += yn(series.active(Modality::Proximity, i, j, s));
                out += ", S=";
                out += yn(series.active(Modality::SharedAttention, i, j, s));
                out += '\n';
            }
        }
    return out;
}

namespace {

using Pair = std::pair<int, int>;  // 1-based labels as written

struct Entry {
    int second = 0;  // 1-based
    std::array<std::int8_t, 3> value{-1, -1, -1};
};

constexpr char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }
constexpr bool is_alnum(char c) { return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    void advance(std::size_t k = 1) { pos_ = std::min(s_.size(), pos_ + k); }
    bool at_word_start() const { return pos_ == 0 || !is_alnum(s_[pos_ - 1]); }

    bool lit(std::string_view w) {
        if (s_.substr(pos_, w.size()) != w) return false;
        pos_ += w.size();
        return true;
    }
    bool one_of(std::string_view chars) {
        if (done() || chars.find(s_[pos_]) == std::string_view::npos) return false;
        ++pos_;
        return true;
    }
    void skip(std::string_view chars) {
        while (!done() && chars.find(s_[pos_]) != std::string_view::npos) ++pos_;
    }
    void ws() { skip(" \t"); }

    std::optional<int> uint() {
        std::size_t k = pos_;
        int v = 0;
        while (k < s_.size() && is_digit(s_[k]) && k - pos_ < 7) v = v * 10 + (s_[k++] - '0');
        if (k == pos_ || (k < s_.size() && is_digit(s_[k]))) return std::nullopt;
        pos_ = k;
        return v;
    }

    /// y/n/yes/no/true/false/1/0, not followed by another word character.
    std::optional<std::int8_t> yes_no() {
        static constexpr std::array<std::pair<std::string_view, std::int8_t>, 8> words{{
            {"yes", 1}, {"true", 1}, {"no", 0}, {"false", 0}, {"y", 1}, {"n", 0}, {"1", 1}, {"0", 0}}};
        for (const auto& [w, v] : words) {
            if (s_.substr(pos_, w.size()) == w && !is_alnum(peek(w.size()))) {
                pos_ += w.size();
                return v;
            }
        }
        return std::nullopt;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

// ---- canonical grammar: [Pair Pa->Pb:][ ][t=s: C=x, P=x, S=x]

std::optional<std::int8_t> canon_yn(Cursor& c) {
    if (c.lit("Y")) return 1;
    if (c.lit("N")) return 0;
    return std::nullopt;
}

bool match_canonical(std::string_view line, std::optional<Pair>& header, std::optional<Entry>& entry) {
    Cursor c(line);
    if (c.lit("Pair P")) {
        const auto a = c.uint();
        if (!a || !c.lit("->P")) return false;
        const auto b = c.uint();
        if (!b || !c.lit(":")) return false;
        header = Pair{*a, *b};
        if (c.done()) return true;
        if (!c.lit(" ")) return false;
    }
    if (!c.lit("t=")) return false;
    const auto s = c.uint();
    if (!s || !c.lit(": C=")) return false;
    Entry e;
    e.second = *s;
    const auto cv = canon_yn(c);
    if (!cv || !c.lit(", P=")) return false;
    const auto pv = canon_yn(c);
    if (!pv || !c.lit(", S=")) return false;
    const auto sv = canon_yn(c);
    if (!sv || !c.done()) return false;
    e.value = {*cv, *pv, *sv};
    entry = e;
    return true;
}

// ---- tolerant grammar (input already lower-cased)

bool pair_separator(Cursor& c) {
    return c.lit("->") || c.lit("=>") || c.lit("\xe2\x86\x92") || c.lit("\xe2\x80\x93") || c.lit("to") ||
           c.lit(",") || c.lit("-") || c.lit(">");
}

std::optional<Pair> pair_anchor(Cursor& c) {
    const auto start = c.pos();
    if (!c.lit("p")) return std::nullopt;
    c.ws();
    const auto a = c.uint();
    if (a) {
        c.ws();
        if (pair_separator(c)) {
            c.ws();
            if (c.lit("p")) {
                c.ws();
                if (const auto b = c.uint()) return Pair{*a, *b};
            }
        }
    }
    c.seek(start);
    return std::nullopt;
}

std::optional<int> key_index(char k) {
    switch (k) {
        case 'c': return 0;
        case 'p': return 1;
        case 's': return 2;
        default: return std::nullopt;
    }
}

bool match_tolerant(std::string_view line, std::optional<Pair>& header, std::optional<Entry>& entry) {
    Cursor c(line);
    c.skip(" \t-*#>|");
    const auto mark = c.pos();
    bool had_word = c.lit("pair");
    if (had_word) c.skip(" \t:#");
    const bool paren = c.lit("(");
    c.ws();
    if (const auto p = pair_anchor(c)) {
        c.ws();
        if (paren && !c.lit(")")) return false;
        header = *p;
    } else {
        c.seek(mark);
        had_word = false;
    }
    c.skip(" \t:,;-|");
    if (c.done()) return header.has_value();

    const bool bracket = c.lit("[");
    c.ws();
    if (!c.lit("t")) return false;
    c.ws();
    if (!c.one_of("=:")) return false;
    c.ws();
    const auto s = c.uint();
    if (!s) return false;
    c.ws();
    if (bracket && !c.lit("]")) return false;
    c.skip(" \t:,;-|");
    Entry e;
    e.second = *s;
    for (int k = 0; k < 3; ++k) {
        const auto idx = key_index(c.peek());
        if (!idx || e.value[static_cast<std::size_t>(*idx)] != -1) return false;
        c.advance();
        c.ws();
        if (!c.one_of("=:")) return false;
        c.ws();
        const bool b = c.lit("[");
        c.ws();
        const auto v = c.yes_no();
        if (!v) return false;
        c.ws();
        if (b && !c.lit("]")) return false;
        c.skip(" \t,;|");
        e.value[static_cast<std::size_t>(*idx)] = *v;
    }
    c.skip(" \t.|");
    if (!c.done()) return false;
    entry = e;
    return true;
}

// ---- cell bookkeeping

class Cells {
public:
    Cells(int n, int seconds) : n_(n), T_(seconds), v_(static_cast<std::size_t>(3 * n * n * seconds), -1) {}

    std::int8_t& at(int m, int i, int j, int s) {
        return v_[((static_cast<std::size_t>(m) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)) *
                       static_cast<std::size_t>(n_) +
                   static_cast<std::size_t>(j)) *
                      static_cast<std::size_t>(T_) +
                  static_cast<std::size_t>(s)];
    }

    int n() const { return n_; }
    int seconds() const { return T_; }

private:
    int n_, T_;
    std::vector<std::int8_t> v_;
};

class Recorder {
public:
    Recorder(int n, int seconds) : cells_(n, seconds) {}

    /// Returns true if at least one cell was newly written.
    bool record(const std::optional<Pair>& pair, int second, const std::array<std::int8_t, 3>& value) {
        if (!pair) {
            ++orphaned_;
            return false;
        }
        const int i = pair->first - 1;
        const int j = pair->second - 1;
        if (i < 0 || j < 0 || i >= cells_.n() || j >= cells_.n() || i == j || second < 1 || second > cells_.seconds()) {
            ++out_of_range_;
            return false;
        }
        bool wrote = false;
        for (int m = 0; m < 3; ++m) {
            const auto v = value[static_cast<std::size_t>(m)];
            if (v < 0) continue;
            auto& cell = cells_.at(m, i, j, second - 1);
            if (cell == -1) {
                cell = v;
                wrote = true;
            } else if (cell != v) {
                ++conflicts_;
            }
        }
        return wrote;
    }

    Cells& cells() { return cells_; }
    int orphaned() const { return orphaned_; }
    int out_of_range() const { return out_of_range_; }
    int conflicts() const { return conflicts_; }

private:
    Cells cells_;
    int orphaned_ = 0;
    int out_of_range_ = 0;
    int conflicts_ = 0;
};

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = lower(ch);
    return out;
}

// Anchor scan over one lower-cased line. `pair` and `open` carry across lines.
bool token_scan(std::string_view line, std::optional<Pair>& pair, std::optional<Entry>& open, Recorder& rec) {
    bool wrote = false;
    auto flush = [&] {
        if (open) {
            wrote |= rec.record(pair, open->second, open->value);
            open.reset();
        }
    };
    Cursor c(line);
    while (!c.done()) {
        if (!c.at_word_start()) {
            c.advance();
            continue;
        }
        const auto start = c.pos();
        if (const auto p = pair_anchor(c)) {
            flush();
            pair = *p;
            continue;
        }
        c.seek(start);
        if (c.lit("t")) {
            c.ws();
            if (c.one_of("=:")) {
                c.ws();
                if (const auto s = c.uint()) {
                    flush();
                    open = Entry{};
                    open->second = *s;
                    continue;
                }
            }
            c.seek(start);
        }
        if (const auto idx = key_index(c.peek()); idx && open) {
            c.advance();
            if (!is_alnum(c.peek())) {
                c.ws();
                if (c.one_of("=:")) {
                    c.ws();
                    c.lit("[");
                    c.ws();
                    if (const auto v = c.yes_no()) {
                        auto& slot = open->value[static_cast<std::size_t>(*idx)];
                        if (slot == -1) slot = *v;
                        continue;
                    }
                }
            }
            c.seek(start);
        }
        c.advance();
    }
    return wrote;
}

}  // namespace

ParsedResponse parse_response(std::string_view text, int n, int seconds, Window window) {
    Recorder rec(n, seconds);
    std::array<bool, 3> used{};  // strategies that wrote cells
    std::optional<Pair> current;
    std::optional<Entry> open;  // token-scan entry awaiting more keys

    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(begin, end - begin);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        begin = end + 1;

        std::optional<Pair> header;
        std::optional<Entry> entry;
        if (match_canonical(line, header, entry)) {
            if (open) used[2] |= rec.record(current, open->second, open->value), open.reset();
            if (header) current = header;
            if (entry) used[0] |= rec.record(current, entry->second, entry->value);
            continue;
        }
        const std::string low = to_lower(line);
        header.reset();
        entry.reset();
        if (match_tolerant(low, header, entry)) {
            if (open) used[2] |= rec.record(current, open->second, open->value), open.reset();
            if (header) current = header;
            if (entry) used[1] |= rec.record(current, entry->second, entry->value);
            continue;
        }
        used[2] |= token_scan(low, current, open, rec);
        if (end == text.size()) break;
    }
    if (open) used[2] |= rec.record(current, open->second, open->value);

    ParsedResponse out{BinarySeries(window, n, seconds), {}};
    auto& diag = out.diagnostics;
    auto& cells = rec.cells();
    std::vector<bool> second_complete(static_cast<std::size_t>(seconds), true);

    // Conversation: ordered pairs.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            std::int8_t carry = 0;
            for (int s = 0; s < seconds; ++s) {
                diag.entries_expected += 1;
                const auto v = cells.at(0, i, j, s);
                if (v >= 0) {
                    carry = v;
                    diag.entries_recovered += 1;
                } else {
                    diag.fallback_filled += 1;
                    second_complete[static_cast<std::size_t>(s)] = false;
                }
                out.series.set_raw(Modality::Conversation, i, j, s, (v >= 0 ? v : carry) == 1);
            }
        }
    // Undirected: a pair-second is known if either direction was written; OR of known values.
    for (int m = 1; m < 3; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                std::int8_t carry = 0;
                for (int s = 0; s < seconds; ++s) {
                    diag.entries_expected += 1;
                    const auto a = cells.at(m, i, j, s);
                    const auto b = cells.at(m, j, i, s);
                    std::int8_t v = -1;
                    if (a >= 0 || b >= 0) v = (a == 1 || b == 1) ? 1 : 0;
                    if (v >= 0) {
                        carry = v;
                        diag.entries_recovered += 1;
                    } else {
                        diag.fallback_filled += 1;
                        second_complete[static_cast<std::size_t>(s)] = false;
                    }
                    out.series.set(kModalities[static_cast<std::size_t>(m)], i, j, s, (v >= 0 ? v : carry) == 1);
                }
            }
    for (bool ok : second_complete) diag.seconds_recovered += ok ? 1 : 0;

    if (used[2]) diag.strategy_used = ParseStrategy::TokenScan;
    else if (used[1]) diag.strategy_used = ParseStrategy::TolerantLine;
    else if (used[0]) diag.strategy_used = ParseStrategy::Canonical;
    else diag.strategy_used = ParseStrategy::Fallback;

    if (diag.entries_recovered == 0) diag.warnings.push_back("no parseable content; every entry defaulted to inactive");
    else if (diag.fallback_filled > 0)
        diag.warnings.push_back("filled " + std::to_string(diag.fallback_filled) + " of " +
                                std::to_string(diag.entries_expected) + " entries from the previous parsed second");
    if (rec.out_of_range() > 0)
        diag.warnings.push_back("ignored " + std::to_string(rec.out_of_range()) + " entries with unknown pair or second");
    if (rec.orphaned() > 0)
        diag.warnings.push_back("ignored " + std::to_string(rec.orphaned()) + " entries before any pair header");
    if (rec.conflicts() > 0)
        diag.warnings.push_back("kept the first of " + std::to_string(rec.conflicts()) + " conflicting duplicate values");
    return out;
}

}  // namespace groupcast
