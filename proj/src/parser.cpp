#include "liesym/parser.hpp"

#include "liesym/error.hpp"

#include <cctype>

namespace liesym {

SymbolTable SymbolTable::standard() {
    SymbolTable s;
    for (const char* v : {"t", "x", "w"}) s.declare_variable(v);
    for (int n = 0; n <= 2; ++n)
        for (int nt = 0; nt <= n; ++nt) s.declare_jet(nt, n - nt);
    for (const char* p : {"m", "p", "b0", "b1", "c0", "c1"}) s.declare_parameter(p);
    s.declare_function("phi");
    return s;
}

void SymbolTable::declare_variable(const std::string& name) { roles_[name] = Role::Variable; }

void SymbolTable::declare_jet(int nt, int nx) {
    std::string n = jet_name(nt, nx);
    roles_[n] = Role::Jet;
    jets_[n] = {nt, nx};
}

void SymbolTable::declare_parameter(const std::string& name, std::optional<Rational> value) {
    auto it = roles_.find(name);
    if (it != roles_.end() && it->second != Role::Parameter)
        throw Error(ErrorKind::Usage, "'" + name + "' is already declared as a variable");
    roles_[name] = Role::Parameter;
    params_[name] = value;
}

void SymbolTable::declare_function(const std::string& name) { functions_.insert(name); }

void SymbolTable::assign(const std::string& param, const Rational& value) { declare_parameter(param, value); }

std::optional<SymbolTable::Role> SymbolTable::role(const std::string& name) const {
    auto it = roles_.find(name);
    if (it == roles_.end()) return std::nullopt;
    return it->second;
}

std::map<std::string, Expr> SymbolTable::assignments() const {
    std::map<std::string, Expr> out;
    for (const auto& [n, v] : params_)
        if (v) out[n] = Expr(*v);
    return out;
}

std::set<std::string> SymbolTable::parameters() const {
    std::set<std::string> out;
    for (const auto& [n, v] : params_) out.insert(n);
    return out;
}

namespace {

class Parser {
public:
    Parser(const std::string& text, const SymbolTable& table) : s_(text), table_(table) {}

    Expr run() {
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::Syntax, msg + " at position " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+')) terms.push_back(term());
            else if (accept('-')) terms.push_back(-term());
            else break;
        }
        return terms.size() == 1 ? terms[0] : add(terms);
    }

    Expr term() {
        Expr acc = unary();
        for (;;) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero()) {
                    pos_ = at;
                    fail("division by zero");
                }
                acc = acc / d;
            } else {
                break;
            }
        }
        return acc;
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr b = primary();
        if (accept('^')) {
            Expr e = unary();
            return pow(b, e);
        }
        return b;
    }

    std::string identifier() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return s_.substr(start, pos_ - start);
    }

    Expr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
            return Expr(parse_rational(s_.substr(start, pos_ - start)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t at = pos_;
            std::string id = identifier();
            int primes = 0;
            while (pos_ < s_.size() && s_[pos_] == '\'') {
                ++primes;
                ++pos_;
            }
            skip();
            bool call = pos_ < s_.size() && s_[pos_] == '(';
            if (id == "D" && call && primes == 0) return derivative();
            if ((id == "exp" || id == "log") && call && primes == 0) {
                ++pos_;
                Expr a = expr();
                expect(')');
                return id == "exp" ? exp(a) : log(a);
            }
            if (table_.is_function(id) && call) {
                ++pos_;
                Expr a = expr();
                expect(')');
                return func(id, primes, a);
            }
            if (primes) {
                pos_ = at;
                fail("primes are only allowed on declared functions");
            }
            if (!table_.declared(id)) {
                pos_ = at;
                throw Error(ErrorKind::UndeclaredSymbol, "'" + id + "' at position " + std::to_string(at));
            }
            return Expr::symbol(id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr derivative() {
        expect('(');
        Expr e = expr();
        expect(',');
        std::size_t at = pos_;
        std::string var = identifier();
        if (var.empty() || !table_.declared(var)) {
            pos_ = at;
            fail("D expects a declared variable");
        }
        int order = 1;
        if (accept(',')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("D expects an integer order");
            order = std::stoi(s_.substr(start, pos_ - start));
        }
        expect(')');
        Expr r = e;
        for (int i = 0; i < order; ++i) {
            if (var == "t" || var == "x") r = total_derivative(r, var[0], 2);
            else r = differentiate(r, var);
        }
        return r;
    }

    const std::string& s_;
    const SymbolTable& table_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse(const std::string& text, const SymbolTable& symbols) {
    Expr e = Parser(text, symbols).run();
    auto a = symbols.assignments();
    return a.empty() ? e : substitute(e, a);
}

VectorField parse_field(const std::string& text, const SymbolTable& symbols) {
    SymbolTable ext = symbols;
    for (const char* d : {"Dt", "Dx", "Du"}) ext.declare_parameter(d);
    Expr e = expand(parse(text, ext));
    VectorField v{differentiate(e, "Dt"), differentiate(e, "Dx"), differentiate(e, "Du")};
    v = expand(v);
    for (const Expr* c : {&v.xi_t, &v.xi_x, &v.eta})
        if (depends_on_any(*c, {"Dt", "Dx", "Du"}))
            throw Error(ErrorKind::Syntax, "field must be linear in Dt, Dx, Du: " + text);
    Expr rest = expand(e - v.xi_t * Expr::symbol("Dt") - v.xi_x * Expr::symbol("Dx") - v.eta * Expr::symbol("Du"));
    if (!rest.is_zero()) throw Error(ErrorKind::Syntax, "field has a term without Dt, Dx or Du: " + render(rest));
    return v;
}

Expr parse_evolution_rhs(const std::string& text, const SymbolTable& symbols) {
    auto eq = text.find('=');
    if (eq == std::string::npos) return parse(text, symbols);
    std::string lhs = text.substr(0, eq);
    Expr l = parse(lhs, symbols);
    if (!(l.is_symbol() && l.name() == "u_t")) throw Error(ErrorKind::Syntax, "left-hand side must be u_t");
    return parse(text.substr(eq + 1), symbols);
}

void parse_params(const std::string& text, SymbolTable& symbols) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            std::size_t i = 0;
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            return s.substr(i);
        };
        item = trim(item);
        if (!item.empty()) {
            auto eq = item.find('=');
            if (eq == std::string::npos) {
                symbols.declare_parameter(item);
            } else {
                std::string name = trim(item.substr(0, eq));
                Expr v = parse(trim(item.substr(eq + 1)), SymbolTable{});
                if (!v.is_number()) throw Error(ErrorKind::Usage, "parameter value must be rational: " + item);
                symbols.assign(name, v.value());
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
}

} // namespace liesym
