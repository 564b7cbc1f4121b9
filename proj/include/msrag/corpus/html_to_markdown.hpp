#pragma once

#include <string>
#include <string_view>

namespace msrag::corpus {

struct MarkdownConversion {
    std::string text;  // Markdown body, free of HTML open tags
    std::string title; // <title> content when present
};

/// Converts dirty web HTML into Markdown. Never fails: malformed markup
/// degrades to plain text extraction, invalid UTF-8 is replaced.
///
/// Cleaning rules: script/style/nav/footer/header/iframe/noscript subtrees
/// are dropped, comments and attributes are discarded, h1..h6 map to #
/// headings, list items to "- " (nested lists indent two spaces), anchors to
/// [text](href), tables to pipe-delimited rows with a --- separator, all
/// other elements contribute text separated by blank lines, and runs of
/// three or more newlines collapse to two.
MarkdownConversion convert_html_to_markdown(std::string_view html);

/// Markdown text only.
std::string html_to_markdown(std::string_view html);

/// Replaces bytes that do not form valid UTF-8 with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

} // namespace msrag::corpus
