#include <cctype>
#include <charconv>

#include "taskgen/errors.hpp"
#include "taskgen/petel.hpp"

namespace taskgen {

namespace {

// Recursive-descent reader for the keyword block form. Sections are
// separated by a newline or by a comma at section level; commas inside
// operator argument lists belong to the arguments.
class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    Task task() {
        Task t;
        skip_blank_lines();
        keyword("Entity:");
        spaces();
        t.entity = bracketable_ident();
        separator("Filter:");
        keyword("Filter:");
        spaces();
        t.filter = filter();
        separator("Aggregator:");
        keyword("Aggregator:");
        spaces();
        t.agg = aggregator();
        skip_trailing_space();
        if (!at_end()) {
            separator("Params:");
            keyword("Params:");
            spaces();
            t.params = params();
            skip_blank_lines();
            if (!at_end()) fail("end of input");
        }
        return t;
    }

private:
    [[noreturn]] void fail(std::string expected) const { throw ParseError(line_, column_, std::move(expected)); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    bool consume(std::string_view s) {
        if (text_.substr(pos_).starts_with(s)) {
            for (std::size_t i = 0; i < s.size(); ++i) advance();
            return true;
        }
        return false;
    }

    void expect(std::string_view s) {
        if (!consume(s)) fail("'" + std::string(s) + "'");
    }
    void keyword(std::string_view kw) { expect(kw); }

    void spaces() {
        while (peek() == ' ' || peek() == '\t') advance();
    }

    void skip_blank_lines() {
        while (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n') advance();
    }

    void skip_trailing_space() {
        std::size_t p = pos_;
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        if (p == text_.size())
            while (!at_end()) advance();
    }

    // Newline (plus indentation) or ", " between sections.
    void separator(std::string_view next_keyword) {
        spaces();
        if (peek() == ',') {
            advance();
            spaces();
            return;
        }
        if (peek() == '\r') advance();
        if (peek() == '\n') {
            skip_blank_lines();
            return;
        }
        fail("newline or ',' before '" + std::string(next_keyword) + "'");
    }

    std::string ident() {
        if (!(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) fail("identifier");
        std::string out;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
            out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(peek()))));
            advance();
        }
        return out;
    }

    std::string op_word() {
        std::string out;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
            out.push_back(peek());
            advance();
        }
        if (out.empty()) fail("operator name");
        return out;
    }

    std::string bracketable_ident() {
        if (consume("<")) {
            spaces();
            auto id = ident();
            spaces();
            expect(">");
            return id;
        }
        return ident();
    }

    std::string bracketed_ident() {
        expect("<");
        spaces();
        auto id = ident();
        spaces();
        return id;
    }

    Literal literal() {
        if (consume("'")) {
            std::string s;
            while (true) {
                if (at_end()) fail("closing quote");
                if (peek() == '\'') {
                    advance();
                    if (peek() == '\'') {
                        s.push_back('\'');
                        advance();
                        continue;
                    }
                    break;
                }
                if (peek() == '\n') fail("closing quote");
                s.push_back(peek());
                advance();
            }
            return s;
        }
        const std::size_t start = pos_;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-' ||
                             peek() == '+' || peek() == '.' || peek() == 'e' || peek() == 'E'))
            advance();
        std::string_view num = text_.substr(start, pos_ - start);
        if (!num.empty() && num.front() == '+') num.remove_prefix(1);
        double v = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (num.empty() || ec != std::errc() || ptr != num.data() + num.size()) fail("number or quoted literal");
        return v;
    }

    bool none_word() { return consume("None") || consume("NONE"); }

    FilterExpr filter() {
        FilterExpr f;
        if (none_word()) return f;
        const std::string name = op_word();
        const auto op = filter_op_from_name(name);
        if (!op) throw UnknownOperator(name);
        f.op = *op;
        spaces();
        if (f.op == FilterOp::All) {
            if (consume("(")) {
                spaces();
                none_word();
                spaces();
                expect(")");
            }
            return f;
        }
        expect("(");
        spaces();
        f.attribute = bracketed_ident();
        if (consume(">")) {
            spaces();
            if (consume(",")) {
                spaces();
                f.other_attribute = bracketable_ident();
                spaces();
            }
        } else if (consume(",")) {
            spaces();
            f.threshold = literal();
            spaces();
            expect(">");
            spaces();
        } else {
            fail("'>' or ','");
        }
        expect(")");
        return f;
    }

    AggExpr aggregator() {
        AggExpr a;
        const std::string name = op_word();
        const auto op = agg_op_from_name(name);
        if (!op) throw UnknownOperator(name);
        a.op = *op;
        spaces();
        expect("(");
        spaces();
        if (a.op == AggOp::Count) {
            if (!none_word()) fail("None");
        } else {
            if (peek() != '<') fail("<attribute>");
            a.attribute = bracketed_ident();
            expect(">");
        }
        spaces();
        expect(")");
        return a;
    }

    std::chrono::seconds duration() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        if (peek() == 'd' || peek() == 'h' || peek() == 'm') advance();
        try {
            return parse_duration(text_.substr(start, pos_ - start));
        } catch (const std::invalid_argument&) {
            fail("duration like 1d, 6h or 30m");
        }
    }

    SearchParams params() {
        SearchParams p;
        expect("window=");
        p.window = duration();
        spaces();
        expect(",");
        spaces();
        expect("lead=");
        p.lead = duration();
        spaces();
        expect(",");
        spaces();
        expect("history=");
        p.history = duration();
        if (p.window.count() <= 0 || p.history.count() <= 0) fail("positive window and history");
        return p;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

} // namespace

Task parse_petel(std::string_view text) { return Reader(text).task(); }

} // namespace taskgen
