#include "srq/instance_io.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

namespace srq {

namespace {

struct Token {
    enum Kind { Ident, Number, LBrace, RBrace, LBracket, RBracket, Equals, Colon, Comma, End };
    Kind kind = End;
    std::string text;
    int line = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_space();
        Token tok;
        tok.line = line_;
        if (pos_ >= text_.size()) {
            tok.kind = Token::End;
            return tok;
        }
        const char c = text_[pos_];
        switch (c) {
        case '{': ++pos_; tok.kind = Token::LBrace; return tok;
        case '}': ++pos_; tok.kind = Token::RBrace; return tok;
        case '[': ++pos_; tok.kind = Token::LBracket; return tok;
        case ']': ++pos_; tok.kind = Token::RBracket; return tok;
        case '=': ++pos_; tok.kind = Token::Equals; return tok;
        case ':': ++pos_; tok.kind = Token::Colon; return tok;
        case ',': ++pos_; tok.kind = Token::Comma; return tok;
        default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok.kind = Token::Ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                tok.text += text_[pos_++];
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            tok.kind = Token::Number;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-' ||
                    text_[pos_] == '+' || text_[pos_] == '.' || text_[pos_] == 'e' ||
                    text_[pos_] == 'E'))
                tok.text += text_[pos_++];
            return tok;
        }
        throw ParseError("line " + std::to_string(line_) + ": unexpected character '" +
                         std::string(1, c) + "'");
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { advance(); }

    InstanceSpec parse() {
        InstanceSpec instance;
        instance.horizon = 0;
        instance.recourse_bit_width = -1;
        bool have_prices = false;

        while (current_.kind != Token::End) {
            const std::string name = expect_ident();
            if (name == "horizon") {
                expect(Token::Equals);
                instance.horizon = static_cast<int>(expect_integer("horizon"));
            } else if (name == "prices") {
                parse_prices(instance.prices);
                have_prices = true;
            } else if (name == "timestep") {
                parse_timestep(instance);
            } else {
                fail("unknown section or key '" + name + "'");
            }
        }

        if (!have_prices) throw ParseError("missing prices section");
        if (instance.horizon == 0) instance.horizon = static_cast<int>(instance.j_vars.size());
        if (instance.recourse_bit_width < 0)
            throw ParseError("missing recourse_bits in timestep sections");
        return instance;
    }

private:
    void parse_prices(Prices& prices) {
        expect(Token::LBrace);
        while (current_.kind != Token::RBrace) {
            const std::string key = expect_ident();
            expect(Token::Equals);
            const double value = expect_number(key);
            if (key == "ev") prices.ev = value;
            else if (key == "buy") prices.intraday_buy = value;
            else if (key == "sell") prices.intraday_sell = value;
            else fail("unknown price '" + key + "'");
        }
        advance(); // consume '}'
    }

    void parse_timestep(InstanceSpec& instance) {
        FirstStageVar j_var;
        ScenarioDistribution dist;
        std::optional<int> recourse_bits;
        bool have_dist = false;

        expect(Token::LBrace);
        while (current_.kind != Token::RBrace) {
            const std::string key = expect_ident();
            expect(Token::Equals);
            if (key == "j_bits") j_var.bit_width = static_cast<int>(expect_integer(key));
            else if (key == "j_offset") j_var.offset = expect_integer(key);
            else if (key == "recourse_bits") recourse_bits = static_cast<int>(expect_integer(key));
            else if (key == "p_offset") dist.register_offset = expect_integer(key);
            else if (key == "dist") {
                parse_dist(dist);
                have_dist = true;
            } else fail("unknown timestep key '" + key + "'");
        }
        advance(); // consume '}'

        if (!have_dist) fail("timestep without dist");
        if (recourse_bits) {
            if (instance.recourse_bit_width >= 0 && instance.recourse_bit_width != *recourse_bits)
                fail("recourse_bits differs between timesteps");
            instance.recourse_bit_width = *recourse_bits;
        }
        instance.j_vars.push_back(j_var);
        instance.p_dists.push_back(std::move(dist));
    }

    void parse_dist(ScenarioDistribution& dist) {
        expect(Token::LBracket);
        while (current_.kind != Token::RBracket) {
            ScenarioPoint pt;
            pt.value = expect_integer("dist value");
            expect(Token::Colon);
            pt.probability = expect_number("dist probability");
            dist.support.push_back(pt);
            if (current_.kind == Token::Comma) advance();
        }
        advance(); // consume ']'
    }

    void advance() { current_ = lexer_.next(); }

    void expect(Token::Kind kind) {
        if (current_.kind != kind) fail("unexpected token");
        advance();
    }

    std::string expect_ident() {
        if (current_.kind != Token::Ident) fail("expected identifier");
        std::string name = current_.text;
        advance();
        return name;
    }

    double expect_number(const std::string& what) {
        if (current_.kind != Token::Number) fail("expected number for " + what);
        try {
            const double v = std::stod(current_.text);
            advance();
            return v;
        } catch (const std::exception&) {
            fail("malformed number '" + current_.text + "' for " + what);
        }
        return 0.0; // unreachable
    }

    long long expect_integer(const std::string& what) {
        if (current_.kind != Token::Number) fail("expected integer for " + what);
        try {
            std::size_t used = 0;
            const long long v = std::stoll(current_.text, &used);
            if (used != current_.text.size()) fail("expected integer for " + what);
            advance();
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            fail("malformed integer '" + current_.text + "' for " + what);
        }
        return 0; // unreachable
    }

    [[noreturn]] void fail(const std::string& message) {
        if (current_.kind == Token::End)
            throw ParseError("unexpected end of input: " + message);
        throw ParseError("line " + std::to_string(current_.line) + ": " + message);
    }

    Lexer lexer_;
    Token current_;
};

} // namespace

InstanceSpec parse_instance(const std::string& text) {
    return Parser(text).parse();
}

InstanceSpec load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

} // namespace srq
