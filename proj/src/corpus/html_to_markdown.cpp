#include "msrag/corpus/html_to_markdown.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <set>
#include <vector>

namespace msrag::corpus {

namespace {

bool ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool tag_name_char(char c) {
    return ascii_alpha(c) || (c >= '0' && c <= '9') || c == '-' || c == ':';
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += s[i++];
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (!name.empty() && name[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t j = 2; j < name.size(); ++j) {
                    char c = name[j];
                    std::uint32_t d;
                    if (c >= '0' && c <= '9') d = c - '0';
                    else if (c >= 'a' && c <= 'f') d = 10 + c - 'a';
                    else if (c >= 'A' && c <= 'F') d = 10 + c - 'A';
                    else { ok = false; break; }
                    cp = cp * 16 + d;
                }
            } else {
                for (std::size_t j = 1; j < name.size(); ++j) {
                    if (name[j] < '0' || name[j] > '9') { ok = false; break; }
                    cp = cp * 10 + (name[j] - '0');
                }
            }
            if (ok) {
                encode_utf8(cp, out);
                i = semi + 1;
                continue;
            }
        } else {
            std::string low = lower_ascii(name);
            const char* rep = nullptr;
            if (low == "amp") rep = "&";
            else if (low == "lt") rep = "<";
            else if (low == "gt") rep = ">";
            else if (low == "quot") rep = "\"";
            else if (low == "apos") rep = "'";
            else if (low == "nbsp") rep = " ";
            else if (low == "mdash") rep = "-";
            else if (low == "ndash") rep = "-";
            else if (low == "hellip") rep = "...";
            if (rep != nullptr) {
                out += rep;
                i = semi + 1;
                continue;
            }
        }
        out += s[i++];
    }
    return out;
}

struct Node {
    std::string tag;  // empty for text nodes
    std::string text; // text nodes only, entities already decoded
    std::string href; // anchors only
    std::vector<Node> children;

    bool is_text() const { return tag.empty(); }
};

const std::set<std::string>& void_elements() {
    static const std::set<std::string> kVoid = {
        "area",  "base", "br",   "col",   "embed",  "hr",    "img",
        "input", "link", "meta", "param", "source", "track", "wbr",
    };
    return kVoid;
}

const std::set<std::string>& raw_text_elements() {
    static const std::set<std::string> kRaw = {"script", "style", "textarea", "title"};
    return kRaw;
}

const std::set<std::string>& dropped_elements() {
    static const std::set<std::string> kDrop = {
        "script", "style", "nav", "footer", "header", "iframe", "noscript",
    };
    return kDrop;
}

const std::set<std::string>& inline_elements() {
    static const std::set<std::string> kInline = {
        "a",    "abbr", "b",    "bdi",  "bdo",  "br",   "cite", "code", "data", "dfn",
        "em",   "font", "i",    "img",  "kbd",  "mark", "q",    "s",    "samp", "small",
        "span", "strong", "sub", "sup", "time", "u",    "var",  "wbr",
    };
    return kInline;
}

class Parser {
public:
    explicit Parser(std::string_view html) : src_(html) {}

    Node parse() {
        Node root;
        root.tag = "#root";
        std::vector<Node*> stack{&root};
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<' && pos_ + 1 < src_.size()) {
                char next = src_[pos_ + 1];
                if (next == '!') {
                    skip_declaration();
                    continue;
                }
                if (next == '?') {
                    skip_until('>');
                    continue;
                }
                if (next == '/') {
                    handle_end_tag(stack);
                    continue;
                }
                if (ascii_alpha(next)) {
                    handle_start_tag(stack);
                    continue;
                }
            }
            // Plain text up to the next plausible tag opener.
            std::size_t start = pos_;
            ++pos_;
            while (pos_ < src_.size()) {
                if (src_[pos_] == '<' && pos_ + 1 < src_.size()) {
                    char next = src_[pos_ + 1];
                    if (next == '!' || next == '?' || next == '/' || ascii_alpha(next)) break;
                }
                ++pos_;
            }
            append_text(*stack.back(), src_.substr(start, pos_ - start));
        }
        return root;
    }

private:
    void append_text(Node& parent, std::string_view raw) {
        std::string decoded = decode_entities(raw);
        if (decoded.empty()) return;
        Node text;
        text.text = std::move(decoded);
        parent.children.push_back(std::move(text));
    }

    void skip_until(char c) {
        std::size_t end = src_.find(c, pos_);
        pos_ = (end == std::string_view::npos) ? src_.size() : end + 1;
    }

    void skip_declaration() {
        if (src_.compare(pos_, 4, "<!--") == 0) {
            std::size_t end = src_.find("-->", pos_ + 4);
            pos_ = (end == std::string_view::npos) ? src_.size() : end + 3;
        } else {
            skip_until('>');
        }
    }

    void handle_end_tag(std::vector<Node*>& stack) {
        std::size_t i = pos_ + 2;
        std::size_t start = i;
        while (i < src_.size() && tag_name_char(src_[i])) ++i;
        std::string name = lower_ascii(src_.substr(start, i - start));
        std::size_t end = src_.find('>', i);
        pos_ = (end == std::string_view::npos) ? src_.size() : end + 1;
        // Pop to the matching open element; unmatched end tags are ignored.
        for (std::size_t depth = stack.size(); depth > 1; --depth) {
            if (stack[depth - 1]->tag == name) {
                stack.resize(depth - 1);
                return;
            }
        }
    }

    void handle_start_tag(std::vector<Node*>& stack) {
        std::size_t i = pos_ + 1;
        std::size_t start = i;
        while (i < src_.size() && tag_name_char(src_[i])) ++i;
        std::string name = lower_ascii(src_.substr(start, i - start));

        std::string href;
        bool self_closing = false;
        while (i < src_.size() && src_[i] != '>') {
            if (src_[i] == '/' && i + 1 < src_.size() && src_[i + 1] == '>') {
                self_closing = true;
                i += 1;
                break;
            }
            if (std::isspace(static_cast<unsigned char>(src_[i]))) {
                ++i;
                continue;
            }
            // Attribute; everything except href on <a> is discarded.
            std::size_t name_start = i;
            while (i < src_.size() && src_[i] != '=' && src_[i] != '>' && src_[i] != '/' &&
                   !std::isspace(static_cast<unsigned char>(src_[i])))
                ++i;
            if (i == name_start) { // lone '/' or other junk: skip one byte
                ++i;
                continue;
            }
            std::string attr = lower_ascii(src_.substr(name_start, i - name_start));
            std::string value;
            while (i < src_.size() && std::isspace(static_cast<unsigned char>(src_[i]))) ++i;
            if (i < src_.size() && src_[i] == '=') {
                ++i;
                while (i < src_.size() && std::isspace(static_cast<unsigned char>(src_[i]))) ++i;
                if (i < src_.size() && (src_[i] == '"' || src_[i] == '\'')) {
                    char quote = src_[i++];
                    std::size_t vstart = i;
                    while (i < src_.size() && src_[i] != quote) ++i;
                    value = std::string(src_.substr(vstart, i - vstart));
                    if (i < src_.size()) ++i;
                } else {
                    std::size_t vstart = i;
                    while (i < src_.size() && src_[i] != '>' &&
                           !std::isspace(static_cast<unsigned char>(src_[i])))
                        ++i;
                    value = std::string(src_.substr(vstart, i - vstart));
                }
            }
            if (name == "a" && attr == "href") href = decode_entities(value);
        }
        pos_ = (i < src_.size()) ? i + 1 : src_.size();

        // Minimal implicit closing so sloppy lists/tables still nest sanely.
        auto implicitly_closes = [&](const std::string& open) {
            if (name == "li" && open == "li") return true;
            if (name == "p" && open == "p") return true;
            if (name == "tr" && (open == "tr" || open == "td" || open == "th")) return true;
            if ((name == "td" || name == "th") && (open == "td" || open == "th")) return true;
            return false;
        };
        while (stack.size() > 1 && implicitly_closes(stack.back()->tag)) stack.pop_back();

        Node node;
        node.tag = name;
        node.href = std::move(href);

        if (raw_text_elements().count(name) != 0 && !self_closing) {
            // Content is opaque text up to the matching close tag.
            std::string close = "</" + name;
            std::size_t end = pos_;
            while (true) {
                end = src_.find('<', end);
                if (end == std::string_view::npos) {
                    end = src_.size();
                    break;
                }
                if (src_.size() - end >= close.size() &&
                    lower_ascii(src_.substr(end, close.size())) == close) {
                    break;
                }
                ++end;
            }
            append_text(node, src_.substr(pos_, end - pos_));
            pos_ = end;
            if (pos_ < src_.size()) skip_until('>');
            stack.back()->children.push_back(std::move(node));
            return;
        }

        bool is_void = void_elements().count(name) != 0 || self_closing;
        stack.back()->children.push_back(std::move(node));
        if (!is_void) stack.push_back(&stack.back()->children.back());
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true; // trims leading whitespace
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out += ' ';
            in_space = false;
            out += c;
        }
    }
    return out;
}

int heading_level(const std::string& tag) {
    if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') return tag[1] - '0';
    return 0;
}

bool is_list(const std::string& tag) { return tag == "ul" || tag == "ol"; }

void render_inline(const Node& node, std::string& out) {
    if (node.is_text()) {
        out += node.text;
        return;
    }
    if (dropped_elements().count(node.tag) != 0) return;
    if (node.tag == "br") {
        out += ' ';
        return;
    }
    if (node.tag == "a") {
        std::string text;
        for (const Node& child : node.children) render_inline(child, text);
        text = collapse_ws(text);
        if (text.empty() && node.href.empty()) return;
        out += '[';
        out += text;
        out += "](";
        out += node.href;
        out += ')';
        return;
    }
    for (const Node& child : node.children) render_inline(child, out);
}

std::string inline_text(const Node& node) {
    std::string out;
    for (const Node& child : node.children) render_inline(child, out);
    return collapse_ws(out);
}

/// Inline text of a list item, excluding nested lists.
std::string item_text(const Node& li) {
    std::string out;
    for (const Node& child : li.children) {
        if (!child.is_text() && is_list(child.tag)) continue;
        render_inline(child, out);
    }
    return collapse_ws(out);
}

void render_list(const Node& list, int depth, std::vector<std::string>& lines) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    for (const Node& child : list.children) {
        if (child.is_text()) continue;
        if (child.tag == "li") {
            std::string text = item_text(child);
            if (!text.empty()) lines.push_back(indent + "- " + text);
            for (const Node& grand : child.children) {
                if (!grand.is_text() && is_list(grand.tag)) render_list(grand, depth + 1, lines);
            }
        } else if (is_list(child.tag)) {
            render_list(child, depth + 1, lines);
        }
    }
}

void collect_rows(const Node& node, std::vector<const Node*>& rows) {
    for (const Node& child : node.children) {
        if (child.is_text()) continue;
        if (child.tag == "tr") rows.push_back(&child);
        else if (child.tag == "thead" || child.tag == "tbody" || child.tag == "tfoot")
            collect_rows(child, rows);
    }
}

std::string render_table(const Node& table) {
    std::vector<const Node*> rows;
    collect_rows(table, rows);
    std::vector<std::string> lines;
    std::size_t header_cells = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<std::string> cells;
        for (const Node& cell : rows[r]->children) {
            if (!cell.is_text() && (cell.tag == "td" || cell.tag == "th"))
                cells.push_back(inline_text(cell));
        }
        if (cells.empty()) continue;
        std::string line = "|";
        for (const std::string& c : cells) line += " " + c + " |";
        lines.push_back(std::move(line));
        if (lines.size() == 1) {
            header_cells = cells.size();
            std::string sep = "|";
            for (std::size_t i = 0; i < header_cells; ++i) sep += " --- |";
            lines.push_back(std::move(sep));
        }
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out += '\n';
        out += lines[i];
    }
    return out;
}

struct BlockRenderer {
    std::vector<std::string> blocks;
    std::string* title = nullptr;

    void flush(std::string& para) {
        std::string text = collapse_ws(para);
        para.clear();
        if (!text.empty()) blocks.push_back(std::move(text));
    }

    void render(const Node& node) {
        std::string para;
        for (const Node& child : node.children) {
            if (child.is_text() || inline_elements().count(child.tag) != 0) {
                para += ' ';
                render_inline(child, para);
                para += ' ';
                continue;
            }
            flush(para);
            dispatch(child);
        }
        flush(para);
    }

    void dispatch(const Node& node) {
        if (dropped_elements().count(node.tag) != 0) return;
        if (node.tag == "title") {
            if (title != nullptr && title->empty()) *title = inline_text(node);
            return;
        }
        if (int level = heading_level(node.tag); level > 0) {
            std::string text = inline_text(node);
            if (!text.empty()) blocks.push_back(std::string(static_cast<std::size_t>(level), '#') + " " + text);
            return;
        }
        if (is_list(node.tag)) {
            std::vector<std::string> lines;
            render_list(node, 0, lines);
            if (!lines.empty()) {
                std::string block;
                for (std::size_t i = 0; i < lines.size(); ++i) {
                    if (i > 0) block += '\n';
                    block += lines[i];
                }
                blocks.push_back(std::move(block));
            }
            return;
        }
        if (node.tag == "table") {
            std::string block = render_table(node);
            if (!block.empty()) blocks.push_back(std::move(block));
            return;
        }
        render(node);
    }
};

std::string collapse_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    int run = 0;
    for (char c : s) {
        if (c == '\n') {
            if (++run <= 2) out += c;
        } else {
            run = 0;
            out += c;
        }
    }
    return out;
}

/// The output contract forbids any substring matching an HTML open tag.
std::string escape_stray_tags(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '<' && i + 1 < s.size() && ascii_alpha(s[i + 1])) out += "&lt;";
        else out += s[i];
    }
    return out;
}

} // namespace

std::string sanitize_utf8(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    while (i < bytes.size()) {
        unsigned char c = data[i];
        std::size_t len;
        std::uint32_t min_cp;
        if (c < 0x80) { out += static_cast<char>(c); ++i; continue; }
        if ((c & 0xE0) == 0xC0) { len = 2; min_cp = 0x80; }
        else if ((c & 0xF0) == 0xE0) { len = 3; min_cp = 0x800; }
        else if ((c & 0xF8) == 0xF0) { len = 4; min_cp = 0x10000; }
        else { out += "\xEF\xBF\xBD"; ++i; continue; }
        if (i + len > bytes.size()) { out += "\xEF\xBF\xBD"; ++i; continue; }
        std::uint32_t cp = c & (0x7F >> len);
        bool valid = true;
        for (std::size_t j = 1; j < len; ++j) {
            if ((data[i + j] & 0xC0) != 0x80) { valid = false; break; }
            cp = (cp << 6) | (data[i + j] & 0x3F);
        }
        if (!valid || cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out += "\xEF\xBF\xBD";
            ++i;
            continue;
        }
        out.append(bytes.substr(i, len));
        i += len;
    }
    return out;
}

MarkdownConversion convert_html_to_markdown(std::string_view html) {
    std::string clean = sanitize_utf8(html);
    Parser parser(clean);
    Node root = parser.parse();

    MarkdownConversion result;
    BlockRenderer renderer;
    renderer.title = &result.title;
    renderer.render(root);

    std::string body;
    for (std::size_t i = 0; i < renderer.blocks.size(); ++i) {
        if (i > 0) body += "\n\n";
        body += renderer.blocks[i];
    }
    result.text = escape_stray_tags(collapse_newlines(body));
    return result;
}

std::string html_to_markdown(std::string_view html) {
    return convert_html_to_markdown(html).text;
}

} // namespace msrag::corpus
