#include "mld/arff.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mld/error.hpp"

namespace mld {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// ---------------------------------------------------------------------------
// XML label header
// ---------------------------------------------------------------------------

class XmlScanner {
  public:
    explicit XmlScanner(const std::string& text) : text_(text) {}

    std::vector<std::string> label_names() {
        std::vector<std::string> names;
        std::vector<std::string> open_tags;
        bool seen_root = false;

        while (true) {
            skip_misc();
            if (pos_ >= text_.size()) break;
            if (text_[pos_] != '<') {
                if (open_tags.empty()) fail("text outside the root element");
                // element text content is ignored
                while (pos_ < text_.size() && text_[pos_] != '<') advance();
                continue;
            }
            if (starts_with("</")) {
                pos_ += 2;
                const std::string name = read_name();
                skip_ws();
                expect('>');
                if (open_tags.empty() || open_tags.back() != name) {
                    fail("mismatched closing tag </" + name + ">");
                }
                open_tags.pop_back();
                continue;
            }
            advance();  // consume '<'
            const std::string name = read_name();
            auto attrs = read_attributes();
            skip_ws();
            bool self_closing = false;
            if (starts_with("/>")) {
                pos_ += 2;
                self_closing = true;
            } else {
                expect('>');
            }
            if (open_tags.empty()) {
                if (seen_root) fail("multiple root elements");
                seen_root = true;
            }
            if (name == "label") {
                auto it = attrs.find("name");
                if (it == attrs.end()) fail("<label> element without a name attribute");
                names.push_back(it->second);
            }
            if (!self_closing) open_tags.push_back(name);
        }
        if (!open_tags.empty()) fail("unclosed element <" + open_tags.back() + ">");
        if (!seen_root) fail("no root element");
        return names;
    }

  private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError("col " + std::to_string(col_) + ": " + message, line_);
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool starts_with(const char* s) const { return text_.compare(pos_, std::strlen(s), s) == 0; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            advance();
        }
    }

    // Skips whitespace, the XML declaration, comments and doctype.
    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<!")) {
                skip_until(">");
            } else {
                return;
            }
        }
    }

    void skip_until(const char* end) {
        while (pos_ < text_.size() && !starts_with(end)) advance();
        if (pos_ >= text_.size()) fail(std::string("unterminated construct, expected '") + end + "'");
        for (std::size_t i = 0; end[i]; ++i) advance();
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(std::string("expected '") + c + "'");
        }
        advance();
    }

    std::string read_name() {
        std::string name;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                c == ':' || c == '.') {
                name += c;
                advance();
            } else {
                break;
            }
        }
        if (name.empty()) fail("expected a tag name");
        return name;
    }

    std::string decode_entities(const std::string& raw) {
        std::string out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string::npos) fail("unterminated entity");
            const std::string ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else fail("unknown entity &" + ent + ";");
            i = semi;
        }
        return out;
    }

    std::unordered_map<std::string, std::string> read_attributes() {
        std::unordered_map<std::string, std::string> attrs;
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) fail("unterminated tag");
            char c = text_[pos_];
            if (c == '>' || c == '/') return attrs;
            const std::string name = read_name();
            skip_ws();
            expect('=');
            skip_ws();
            if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
                fail("attribute value must be quoted");
            }
            const char quote = text_[pos_];
            advance();
            std::string value;
            while (pos_ < text_.size() && text_[pos_] != quote) {
                value += text_[pos_];
                advance();
            }
            if (pos_ >= text_.size()) fail("unterminated attribute value");
            advance();
            if (!attrs.emplace(name, decode_entities(value)).second) {
                fail("duplicate attribute '" + name + "'");
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// ---------------------------------------------------------------------------
// ARFF
// ---------------------------------------------------------------------------

// Splits a line on `sep` outside quotes; tokens are unquoted and trimmed.
std::vector<std::string> split_tokens(const std::string& line, char sep, std::size_t lineno) {
    std::vector<std::string> out;
    std::string current;
    bool in_quote = false;
    char quote = '\0';
    bool token_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quote) {
            if (c == '\\' && i + 1 < line.size()) {
                current += line[++i];
            } else if (c == quote) {
                in_quote = false;
            } else {
                current += c;
            }
        } else if (c == '\'' || c == '"') {
            in_quote = true;
            quote = c;
            token_quoted = true;
        } else if (c == sep) {
            out.push_back(token_quoted ? current : trim(current));
            current.clear();
            token_quoted = false;
        } else {
            current += c;
        }
    }
    if (in_quote) throw ParseError("unterminated quote", lineno);
    out.push_back(token_quoted ? current : trim(current));
    return out;
}

// Reads a possibly-quoted word starting at `pos`; advances `pos` past it.
std::string read_word(const std::string& s, std::size_t& pos, std::size_t lineno) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size()) throw ParseError("unexpected end of declaration", lineno);
    std::string word;
    if (s[pos] == '\'' || s[pos] == '"') {
        const char quote = s[pos++];
        while (pos < s.size() && s[pos] != quote) {
            if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
            word += s[pos++];
        }
        if (pos >= s.size()) throw ParseError("unterminated quote", lineno);
        ++pos;
    } else {
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) {
            word += s[pos++];
        }
    }
    return word;
}

double parse_number(const std::string& token, std::size_t lineno) {
    const std::string t = trim(token);
    if (t.empty()) throw ParseError("empty numeric value", lineno);
    if (t == "?") throw ParseError("missing value ('?') is not supported", lineno);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw ParseError("unparseable numeric token '" + t + "'", lineno);
    }
    return v;
}

struct Attribute {
    FeatureColumn column;       // categories empty -> numeric
    bool is_label = false;
    std::size_t label_index = 0;  // position in label_names when is_label
    double sparse_default = 0.0;  // cell value assumed for omitted sparse entries
};

bool needs_quoting(const std::string& name) {
    if (name.empty()) return true;
    if (std::isspace(static_cast<unsigned char>(name.front())) ||
        std::isspace(static_cast<unsigned char>(name.back()))) {
        return true;
    }
    return name.find_first_of(" \t,{}%'\"") != std::string::npos;
}

std::string quoted(const std::string& name) {
    if (!needs_quoting(name)) return name;
    std::string out = "'";
    for (char c : name) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    out += '\'';
    return out;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::string> parse_label_header(const std::string& xml_text) {
    XmlScanner scanner(xml_text);
    std::vector<std::string> names = scanner.label_names();
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) {
            throw SchemaError("duplicate label name '" + name + "' in XML header");
        }
    }
    if (names.size() < 2) {
        throw SchemaError("label header declares " + std::to_string(names.size()) +
                          " labels; at least 2 are required");
    }
    return names;
}

MultilabelDataset parse_arff(const std::string& arff_text,
                             const std::vector<std::string>& label_names) {
    std::unordered_map<std::string, std::size_t> label_pos;
    for (std::size_t i = 0; i < label_names.size(); ++i) label_pos[label_names[i]] = i;
    if (label_pos.size() != label_names.size()) {
        throw SchemaError("duplicate names in label list");
    }

    std::vector<Attribute> attrs;
    bool in_data = false;
    bool relation_seen = false;

    std::vector<std::vector<double>> cell_rows;  // one cell per declared attribute

    std::istringstream stream(arff_text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(stream, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '%') continue;

        if (!in_data) {
            if (line[0] != '@') throw ParseError("expected a declaration or comment", lineno);
            std::size_t pos = 0;
            const std::string keyword = lower(read_word(line, pos, lineno));
            if (keyword == "@relation") {
                relation_seen = true;
            } else if (keyword == "@attribute") {
                const std::string name = read_word(line, pos, lineno);
                std::string rest = trim(line.substr(pos));
                if (rest.empty()) throw ParseError("attribute '" + name + "' missing a type", lineno);
                Attribute attr;
                attr.column.name = name;
                if (rest[0] == '{') {
                    if (rest.back() != '}') {
                        throw ParseError("nominal domain must end with '}'", lineno);
                    }
                    auto cats = split_tokens(rest.substr(1, rest.size() - 2), ',', lineno);
                    for (auto& c : cats) {
                        if (c.empty()) throw ParseError("empty nominal category", lineno);
                    }
                    attr.column.categories = std::move(cats);
                } else {
                    const std::string kind = lower(trim(rest));
                    if (kind != "numeric" && kind != "real" && kind != "integer") {
                        throw ParseError("unsupported attribute type '" + rest + "'", lineno);
                    }
                }
                attrs.push_back(std::move(attr));
            } else if (keyword == "@data") {
                if (!relation_seen) throw ParseError("@data before @relation", lineno);
                if (attrs.empty()) throw ParseError("@data with no attributes declared", lineno);
                in_data = true;

                // Resolve label attributes and sparse defaults before any datum.
                std::unordered_set<std::string> declared;
                for (std::size_t a = 0; a < attrs.size(); ++a) {
                    auto& attr = attrs[a];
                    declared.insert(attr.column.name);
                    auto it = label_pos.find(attr.column.name);
                    if (it == label_pos.end()) {
                        if (!attr.column.numeric()) attr.sparse_default = 0.0;  // category 0
                        continue;
                    }
                    attr.is_label = true;
                    attr.label_index = it->second;
                    if (!attr.column.numeric()) {
                        auto sorted = attr.column.categories;
                        std::sort(sorted.begin(), sorted.end());
                        if (sorted != std::vector<std::string>{"0", "1"}) {
                            throw SchemaError("label attribute '" + attr.column.name +
                                              "' must have domain {0,1}");
                        }
                        // omitted sparse cells mean "absent", whatever the category order
                        const auto& cats = attr.column.categories;
                        attr.sparse_default = cats[0] == "0" ? 0.0 : 1.0;
                    }
                }
                for (const auto& name : label_names) {
                    if (!declared.count(name)) {
                        throw SchemaError("label '" + name + "' is not declared in the ARFF");
                    }
                }
            } else {
                throw ParseError("unknown declaration '" + keyword + "'", lineno);
            }
            continue;
        }

        // Data section.
        std::vector<double> cells(attrs.size());
        if (line[0] == '{') {
            if (line.back() != '}') throw ParseError("sparse row must end with '}'", lineno);
            for (std::size_t a = 0; a < attrs.size(); ++a) cells[a] = attrs[a].sparse_default;
            const std::string body = trim(line.substr(1, line.size() - 2));
            if (!body.empty()) {
                std::vector<bool> assigned(attrs.size(), false);
                for (const auto& pair : split_tokens(body, ',', lineno)) {
                    std::size_t pos = 0;
                    const std::string idx_tok = read_word(pair, pos, lineno);
                    const std::string val_tok = trim(pair.substr(pos));
                    if (val_tok.empty()) {
                        throw ParseError("sparse entry '" + pair + "' missing a value", lineno);
                    }
                    const double idx_val = parse_number(idx_tok, lineno);
                    if (idx_val < 0 || idx_val != std::floor(idx_val) ||
                        idx_val >= static_cast<double>(attrs.size())) {
                        throw ParseError("sparse index '" + idx_tok + "' out of range", lineno);
                    }
                    const auto a = static_cast<std::size_t>(idx_val);
                    if (assigned[a]) throw ParseError("duplicate sparse index " + idx_tok, lineno);
                    assigned[a] = true;
                    const auto& col = attrs[a].column;
                    if (col.numeric()) {
                        cells[a] = parse_number(val_tok, lineno);
                    } else {
                        auto it = std::find(col.categories.begin(), col.categories.end(), val_tok);
                        if (it == col.categories.end()) {
                            throw ParseError("value '" + val_tok + "' not in domain of '" +
                                             col.name + "'", lineno);
                        }
                        cells[a] = static_cast<double>(it - col.categories.begin());
                    }
                }
            }
        } else {
            const auto tokens = split_tokens(line, ',', lineno);
            if (tokens.size() != attrs.size()) {
                throw ParseError("expected " + std::to_string(attrs.size()) + " values, got " +
                                 std::to_string(tokens.size()), lineno);
            }
            for (std::size_t a = 0; a < attrs.size(); ++a) {
                const auto& col = attrs[a].column;
                if (tokens[a] == "?") {
                    throw ParseError("missing value ('?') is not supported", lineno);
                }
                if (col.numeric()) {
                    cells[a] = parse_number(tokens[a], lineno);
                } else {
                    auto it = std::find(col.categories.begin(), col.categories.end(), tokens[a]);
                    if (it == col.categories.end()) {
                        throw ParseError("value '" + tokens[a] + "' not in domain of '" +
                                         col.name + "'", lineno);
                    }
                    cells[a] = static_cast<double>(it - col.categories.begin());
                }
            }
        }

        // Validate label cells as they arrive so the error can cite the line.
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (!attrs[a].is_label) continue;
            const double v = cells[a];
            if (attrs[a].column.numeric() && v != 0.0 && v != 1.0) {
                throw ParseError("label '" + attrs[a].column.name + "' has non-{0,1} value " +
                                 format_value(v), lineno);
            }
        }
        cell_rows.push_back(std::move(cells));
    }

    if (!in_data) throw ParseError("no @data section", lineno);

    std::vector<FeatureColumn> columns;
    for (const auto& attr : attrs) {
        if (!attr.is_label) columns.push_back(attr.column);
    }
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> labelsets;
    rows.reserve(cell_rows.size());
    labelsets.reserve(cell_rows.size());
    for (const auto& cells : cell_rows) {
        std::vector<double> row;
        row.reserve(columns.size());
        std::vector<std::uint8_t> labelset(label_names.size(), 0);
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            const auto& attr = attrs[a];
            if (!attr.is_label) {
                row.push_back(cells[a]);
                continue;
            }
            bool present;
            if (attr.column.numeric()) {
                present = cells[a] == 1.0;
            } else {
                present = attr.column.categories[static_cast<std::size_t>(cells[a])] == "1";
            }
            labelset[attr.label_index] = present ? 1 : 0;
        }
        rows.push_back(std::move(row));
        labelsets.push_back(std::move(labelset));
    }

    return MultilabelDataset(std::move(columns), std::vector<std::string>(label_names.begin(),
                                                                          label_names.end()),
                             std::move(rows), std::move(labelsets));
}

std::string write_arff(const MultilabelDataset& ds, const std::string& relation) {
    std::string out;
    out += "@relation " + quoted(relation) + "\n\n";
    for (const auto& col : ds.columns()) {
        out += "@attribute " + quoted(col.name);
        if (col.numeric()) {
            out += " numeric\n";
        } else {
            out += " {";
            for (std::size_t i = 0; i < col.categories.size(); ++i) {
                if (i) out += ",";
                out += quoted(col.categories[i]);
            }
            out += "}\n";
        }
    }
    for (const auto& label : ds.labels()) {
        out += "@attribute " + quoted(label) + " {0,1}\n";
    }
    out += "\n@data\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& row = ds.row(i);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            const auto& col = ds.columns()[c];
            if (col.numeric()) {
                out += format_value(row[c]);
            } else {
                out += quoted(col.categories[static_cast<std::size_t>(row[c])]);
            }
        }
        const auto& labelset = ds.labelset(i);
        for (std::size_t l = 0; l < labelset.size(); ++l) {
            if (l || !row.empty()) out += ",";
            out += labelset[l] ? "1" : "0";
        }
        out += "\n";
    }
    return out;
}

std::string write_label_header(const MultilabelDataset& ds) {
    std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<labels>\n";
    for (const auto& label : ds.labels()) {
        std::string escaped;
        for (char c : label) {
            switch (c) {
                case '&': escaped += "&amp;"; break;
                case '<': escaped += "&lt;"; break;
                case '>': escaped += "&gt;"; break;
                case '"': escaped += "&quot;"; break;
                default: escaped += c;
            }
        }
        out += "  <label name=\"" + escaped + "\"/>\n";
    }
    out += "</labels>\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << content;
    if (!out) throw Error("failed writing to '" + path + "'");
}

MultilabelDataset load_mulan(const std::string& arff_path, const std::string& xml_path) {
    const auto labels = parse_label_header(read_file(xml_path));
    return parse_arff(read_file(arff_path), labels);
}

}  // namespace mld
