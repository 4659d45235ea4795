#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "groupcast/domain.hpp"

namespace groupcast {

enum class ParseStrategy { Canonical = 0, TolerantLine = 1, TokenScan = 2, Fallback = 3 };

std::string_view strategy_name(ParseStrategy s);

struct ParseDiagnostics {
    /// Most lenient strategy that recovered anything; Fallback when nothing was recovered.
    ParseStrategy strategy_used = ParseStrategy::Fallback;
    /// Seconds for which every pair and modality was read from the text.
    int seconds_recovered = 0;
    /// (pair, second, modality) cells read from the text; undirected
    /// modalities count each unordered pair once.
    int entries_recovered = 0;
    int entries_expected = 0;
    /// Cells completed by carrying the pair's previous second forward (or inactive).
    int fallback_filled = 0;
    std::vector<std::string> warnings;
};

struct ParsedResponse {
    BinarySeries series;
    ParseDiagnostics diagnostics;
};

/// One block per ordered pair:
///
///     Pair P1->P2:
///     t=1: C=Y, P=N, S=N
///     ...
std::string render_canonical(const BinarySeries& series);

/// Recovers a BinarySeries from free-form model output. Each line is tried
/// as the canonical grammar, then a tolerant grammar (case, whitespace,
/// punctuation, key order), then an anchor scan (t=<s> followed by the
/// nearest Y/N per key). Never throws on content.
ParsedResponse parse_response(std::string_view text, int n, int seconds, Window window = {});

}  // namespace groupcast
