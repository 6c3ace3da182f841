#include "chasekit/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace chasekit {

namespace {

enum class Tok {
    Ident, Int, Str, LParen, RParen, Comma, Dot, Semi, LBrace, RBrace, Colon, Amp, Eq, Slash, Star,
    Arrow, Turnstile, End
};

const char* tokName(Tok k) {
    switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Str: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Semi: return "';'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Amp: return "'&'";
    case Tok::Eq: return "'='";
    case Tok::Slash: return "'/'";
    case Tok::Star: return "'*'";
    case Tok::Arrow: return "'->'";
    case Tok::Turnstile: return "':-'";
    case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string text;
    long long number = 0;
    SourceSpan span;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%' || c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.span = SourceSpan{line, col, i, 1};
        std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i + 1;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            try {
                t.number = std::stoll(t.text);
            } catch (const std::exception&) {
                throw ParseError("integer constant out of range", SourceSpan{line, col, i, j - i});
            }
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            std::string val;
            bool closed = false;
            while (j < src.size()) {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    val.push_back(src[j + 1]);
                    j += 2;
                    continue;
                }
                if (src[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                }
                if (src[j] == '\n') break;
                val.push_back(src[j++]);
            }
            if (!closed) throw ParseError("unterminated string constant", t.span);
            t.kind = Tok::Str;
            t.text = std::move(val);
            advance(j - i);
        } else {
            auto two = src.substr(i, 2);
            if (two == "->") {
                t.kind = Tok::Arrow;
                advance(2);
            } else if (two == ":-") {
                t.kind = Tok::Turnstile;
                advance(2);
            } else {
                switch (c) {
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                case ',': t.kind = Tok::Comma; break;
                case '.': t.kind = Tok::Dot; break;
                case ';': t.kind = Tok::Semi; break;
                case '{': t.kind = Tok::LBrace; break;
                case '}': t.kind = Tok::RBrace; break;
                case ':': t.kind = Tok::Colon; break;
                case '&': t.kind = Tok::Amp; break;
                case '=': t.kind = Tok::Eq; break;
                case '/': t.kind = Tok::Slash; break;
                case '*': t.kind = Tok::Star; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", t.span);
                }
                advance(1);
            }
        }
        t.span.length = i - start;
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.span = SourceSpan{line, col, src.size(), 0};
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
    bool atIdent(std::string_view word) const { return at(Tok::Ident) && peek().text == word; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    const Token& expect(Tok k, const char* what = nullptr) {
        if (!at(k)) fail(std::string("expected ") + (what ? what : tokName(k)) + ", found " + describe(peek()));
        return next();
    }
    bool accept(Tok k) {
        if (!at(k)) return false;
        next();
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().span); }
    [[noreturn]] static void failAt(const std::string& msg, const SourceSpan& sp) { throw ParseError(msg, sp); }
    static std::string describe(const Token& t) {
        if (t.kind == Tok::Ident || t.kind == Tok::Int) return "'" + t.text + "'";
        if (t.kind == Tok::Str) return "string \"" + t.text + "\"";
        return tokName(t.kind);
    }

    // ---- terms and atoms ----

    Term term() {
        const Token& t = peek();
        if (t.kind == Tok::Ident) {
            if (t.text.size() >= 2 && t.text[0] == '_' && t.text[1] == 'v')
                fail("variable '" + t.text + "' uses the reserved prefix '_v'");
            next();
            return Term::var(t.text);
        }
        if (t.kind == Tok::Int) {
            next();
            return Term::integer(t.number);
        }
        if (t.kind == Tok::Str) {
            next();
            return Term::string(t.text);
        }
        fail("expected a variable or constant, found " + describe(t));
    }

    Term constant() {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            next();
            return Term::integer(t.number);
        }
        if (t.kind == Tok::Str) {
            next();
            return Term::string(t.text);
        }
        fail("expected a constant, found " + describe(t));
    }

    Atom atom(const Schema& s) {
        const Token& name = expect(Tok::Ident, "relation name");
        SourceSpan sp = name.span;
        Atom a;
        a.relation = name.text;
        expect(Tok::LParen);
        if (!at(Tok::RParen)) {
            a.args.push_back(term());
            while (accept(Tok::Comma)) a.args.push_back(term());
        }
        expect(Tok::RParen);
        const RelationInfo* r = s.find(a.relation);
        if (!r) failAt("unknown relation '" + a.relation + "'", sp);
        if (static_cast<int>(a.args.size()) != r->arity)
            failAt("relation '" + a.relation + "' has arity " + std::to_string(r->arity) + ", got " +
                       std::to_string(a.args.size()) + " arguments",
                   sp);
        return a;
    }

    std::vector<Atom> conjunction(const Schema& s, bool allowComma) {
        std::vector<Atom> out;
        out.push_back(atom(s));
        while (at(Tok::Amp) || (allowComma && at(Tok::Comma))) {
            next();
            out.push_back(atom(s));
        }
        return out;
    }

    // ---- queries ----

    struct HeadArg {
        Term term;
        std::optional<AggFn> fn; // aggregate slot
        bool star = false;
        SourceSpan span;
    };

    struct RawQuery {
        std::string name;
        SourceSpan headSpan;
        std::vector<HeadArg> head;
        std::vector<Atom> body;
    };

    RawQuery rawQuery(const Schema& s) {
        RawQuery q;
        const Token& name = expect(Tok::Ident, "query name");
        q.name = name.text;
        q.headSpan = name.span;
        expect(Tok::LParen);
        if (!at(Tok::RParen)) {
            q.head.push_back(headArg());
            while (accept(Tok::Comma)) q.head.push_back(headArg());
        }
        expect(Tok::RParen);
        expect(Tok::Turnstile);
        if (at(Tok::Dot)) fail("query body is empty");
        q.body.push_back(atom(s));
        while (accept(Tok::Comma)) q.body.push_back(atom(s));
        expect(Tok::Dot);
        return q;
    }

    HeadArg headArg() {
        HeadArg h;
        h.span = peek().span;
        if (at(Tok::Ident) && at(Tok::LParen, 1)) {
            auto fn = aggFnFromName(peek().text);
            if (!fn) fail("unknown aggregate function '" + peek().text + "'");
            next();
            next();
            h.fn = fn;
            if (accept(Tok::Star) || at(Tok::RParen)) {
                if (*fn != AggFn::Count) fail(std::string(aggFnName(*fn)) + " needs a variable argument");
                h.star = true;
            } else {
                h.term = term();
                if (!h.term.isVariable()) fail("aggregated argument must be a variable");
            }
            expect(Tok::RParen);
            return h;
        }
        h.term = term();
        return h;
    }

    static Query finishPlain(const RawQuery& r) {
        Query q;
        q.head.relation = r.name;
        for (const HeadArg& h : r.head) {
            if (h.fn) failAt("aggregate in the head of a plain query", h.span);
            q.head.args.push_back(h.term);
        }
        q.body = r.body;
        if (!isSafe(q)) {
            std::set<Term> bodyVars;
            for (const Term& v : variablesOf(q.body)) bodyVars.insert(v);
            for (const HeadArg& h : r.head)
                if (h.term.isVariable() && !bodyVars.count(h.term))
                    failAt("unsafe query: head variable '" + h.term.text + "' does not occur in the body", h.span);
        }
        return q;
    }

    static AggregateQuery finishAggregate(const RawQuery& r) {
        if (r.head.empty() || !r.head.back().fn)
            failAt("aggregate query needs an aggregate as its last head argument", r.headSpan);
        std::vector<Term> grouping;
        for (std::size_t i = 0; i + 1 < r.head.size(); ++i) {
            if (r.head[i].fn) failAt("only one aggregate per head", r.head[i].span);
            grouping.push_back(r.head[i].term);
        }
        const HeadArg& last = r.head.back();
        std::optional<Term> arg;
        if (!last.star) arg = last.term;
        if (arg && std::find(grouping.begin(), grouping.end(), *arg) != grouping.end())
            failAt("aggregated variable '" + arg->text + "' also appears among grouping arguments", last.span);
        AggregateQuery a = makeAggregate(r.name, grouping, *last.fn, arg, r.body);
        if (!isSafe(a.core)) failAt("unsafe aggregate query: head variable missing from body", r.headSpan);
        return a;
    }

    static bool isAggregate(const RawQuery& r) {
        return std::any_of(r.head.begin(), r.head.end(), [](const HeadArg& h) { return h.fn.has_value(); });
    }

    // ---- dependencies ----

    std::optional<std::string> label() {
        // ident ('.' int)* ':'
        if (!at(Tok::Ident)) return std::nullopt;
        std::size_t k = 1;
        std::string id = peek().text;
        while (at(Tok::Dot, k) && at(Tok::Int, k + 1)) {
            id += "." + peek(k + 1).text;
            k += 2;
        }
        if (!at(Tok::Colon, k)) return std::nullopt;
        for (std::size_t i = 0; i <= k; ++i) next();
        return id;
    }

    Dependency dependency(const Schema& s, const std::string& defaultId) {
        Dependency d;
        SourceSpan start = peek().span;
        auto lab = label();
        d.id = lab ? *lab : defaultId;
        d.premise = conjunction(s, true);
        expect(Tok::Arrow);
        std::set<Term> premiseVars;
        for (const Term& v : variablesOf(d.premise)) premiseVars.insert(v);
        bool isEgd = !(at(Tok::Ident) && at(Tok::LParen, 1)) && !atIdent("exists");
        if (atIdent("exists") && at(Tok::Eq, 1)) isEgd = true; // variable named exists
        if (isEgd) {
            d.kind = Dependency::Kind::Egd;
            SourceSpan ls = peek().span;
            d.left = term();
            expect(Tok::Eq);
            SourceSpan rs = peek().span;
            d.right = term();
            if (d.left.isVariable() && !premiseVars.count(d.left))
                failAt("egd term '" + d.left.text + "' does not occur in the premise", ls);
            if (d.right.isVariable() && !premiseVars.count(d.right))
                failAt("egd term '" + d.right.text + "' does not occur in the premise", rs);
        } else {
            d.kind = Dependency::Kind::Tgd;
            if (atIdent("exists") && !at(Tok::LParen, 1)) {
                next();
                do {
                    SourceSpan vs = peek().span;
                    Term v = term();
                    if (!v.isVariable()) failAt("existential must be a variable", vs);
                    if (premiseVars.count(v)) failAt("existential '" + v.text + "' occurs in the premise", vs);
                    if (std::find(d.existentials.begin(), d.existentials.end(), v) != d.existentials.end())
                        failAt("existential '" + v.text + "' listed twice", vs);
                    d.existentials.push_back(v);
                } while (accept(Tok::Comma));
                expect(Tok::Colon);
            }
            std::size_t mark = pos_;
            d.conclusion = conjunction(s, true);
            std::set<Term> ex(d.existentials.begin(), d.existentials.end());
            for (const Atom& a : d.conclusion)
                for (const Term& t : a.args)
                    if (t.isVariable() && !premiseVars.count(t) && !ex.count(t))
                        failAt("conclusion variable '" + t.text + "' is neither premise-bound nor declared existential",
                               toks_[mark].span);
        }
        expect(Tok::Dot);
        (void)start;
        return d;
    }

    // ---- schema ----

    std::vector<int> positions() {
        std::vector<int> out;
        out.push_back(static_cast<int>(expect(Tok::Int, "position").number));
        while (accept(Tok::Comma)) out.push_back(static_cast<int>(expect(Tok::Int, "position").number));
        return out;
    }

    void schemaStatement(Schema& s) {
        const Token& kw = expect(Tok::Ident, "'relation', 'key' or 'fd'");
        if (kw.text == "relation") {
            const Token& name = expect(Tok::Ident, "relation name");
            expect(Tok::Slash);
            const Token& ar = expect(Tok::Int, "arity");
            bool set = false;
            std::optional<int> tid;
            SourceSpan tidSpan = ar.span;
            while (at(Tok::Ident) && (peek().text == "set" || peek().text == "tupleid")) {
                if (peek().text == "set") {
                    next();
                    set = true;
                } else if (peek().text == "tupleid") {
                    next();
                    tidSpan = peek().span;
                    tid = static_cast<int>(expect(Tok::Int, "tuple id position").number);
                }
            }
            if (s.relations.count(name.text)) failAt("duplicate relation '" + name.text + "'", name.span);
            if (ar.number < 1) failAt("arity must be >= 1", ar.span);
            if (tid && (*tid < 1 || *tid > ar.number)) failAt("tuple id position out of range", tidSpan);
            s.addRelation(name.text, static_cast<int>(ar.number), set, tid);
        } else if (kw.text == "key" || kw.text == "fd") {
            const Token& name = expect(Tok::Ident, "relation name");
            const RelationInfo* r = s.find(name.text);
            if (!r) failAt("unknown relation '" + name.text + "'", name.span);
            expect(Tok::LParen);
            SourceSpan ps = peek().span;
            std::vector<int> lhs = positions();
            std::vector<int> rhs;
            SourceSpan rs = ps;
            if (kw.text == "fd") {
                expect(Tok::Arrow);
                rs = peek().span;
                rhs = positions();
            }
            expect(Tok::RParen);
            for (int p : lhs)
                if (p < 1 || p > r->arity) failAt("position " + std::to_string(p) + " out of range for '" + name.text + "'", ps);
            for (int p : rhs)
                if (p < 1 || p > r->arity) failAt("position " + std::to_string(p) + " out of range for '" + name.text + "'", rs);
            if (kw.text == "key") {
                s.addKey(name.text, lhs);
            } else {
                for (int p : rhs) s.addFd(FunctionalDependency{name.text, lhs, p});
            }
        } else {
            failAt("expected 'relation', 'key' or 'fd', found '" + kw.text + "'", kw.span);
        }
        accept(Tok::Semi); // optional terminator
    }

    // ---- databases ----

    void databaseBody(const Schema& s, BagDatabase& d, Tok terminator) {
        while (!at(terminator)) {
            const Token& name = expect(Tok::Ident, "relation name");
            std::string rel = name.text;
            if (!s.find(rel)) {
                // capitalized names in a database block resolve to the lowercase relation
                std::string lower = rel;
                std::transform(lower.begin(), lower.end(), lower.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                if (s.find(lower)) rel = lower;
                else failAt("unknown relation '" + name.text + "'", name.span);
            }
            int arity = s.at(rel).arity;
            expect(Tok::LBrace);
            while (!at(Tok::RBrace)) {
                SourceSpan ts = peek().span;
                expect(Tok::LParen);
                Tuple t;
                if (!at(Tok::RParen)) {
                    t.push_back(constant());
                    while (accept(Tok::Comma)) t.push_back(constant());
                }
                expect(Tok::RParen);
                if (static_cast<int>(t.size()) != arity)
                    failAt("tuple of width " + std::to_string(t.size()) + " in relation '" + rel + "' of arity " +
                               std::to_string(arity),
                           ts);
                long long times = 1;
                if (accept(Tok::Star)) {
                    const Token& m = expect(Tok::Int, "multiplicity");
                    if (m.number < 1) failAt("multiplicity must be >= 1", m.span);
                    times = m.number;
                }
                d.add(rel, std::move(t), times);
                if (!accept(Tok::Semi)) accept(Tok::Comma);
            }
            expect(Tok::RBrace);
        }
    }

    std::size_t pos_ = 0;

private:
    std::vector<Token> toks_;
};

} // namespace

Schema parseSchema(std::string_view text) {
    Parser p(text);
    Schema s;
    while (!p.at(Tok::End)) p.schemaStatement(s);
    return s;
}

Query parseQuery(std::string_view text, const Schema& s) {
    Parser p(text);
    auto raw = p.rawQuery(s);
    if (Parser::isAggregate(raw)) Parser::failAt("aggregate query where a plain query was expected", raw.headSpan);
    if (!p.at(Tok::End)) p.fail("trailing input after query");
    return Parser::finishPlain(raw);
}

AggregateQuery parseAggregateQuery(std::string_view text, const Schema& s) {
    Parser p(text);
    auto raw = p.rawQuery(s);
    if (!p.at(Tok::End)) p.fail("trailing input after query");
    return Parser::finishAggregate(raw);
}

Dependency parseDependency(std::string_view text, const Schema& s, const std::string& defaultId) {
    Parser p(text);
    Dependency d = p.dependency(s, defaultId);
    if (!p.at(Tok::End)) p.fail("trailing input after dependency");
    return d;
}

std::vector<Dependency> parseDependencies(std::string_view text, const Schema& s) {
    Parser p(text);
    std::vector<Dependency> out;
    while (!p.at(Tok::End)) out.push_back(p.dependency(s, "d" + std::to_string(out.size() + 1)));
    return out;
}

BagDatabase parseDatabase(std::string_view text, const Schema& s) {
    Parser p(text);
    BagDatabase d;
    p.databaseBody(s, d, Tok::End);
    return d;
}

Document parseDocument(std::string_view text) {
    Parser p(text);
    Document doc;
    bool haveSchema = false;
    std::set<std::string> depIds;
    while (!p.at(Tok::End)) {
        const Token& kw = p.expect(Tok::Ident, "section keyword");
        if (kw.text == "schema") {
            p.expect(Tok::LBrace);
            while (!p.at(Tok::RBrace)) p.schemaStatement(doc.schema);
            p.expect(Tok::RBrace);
            haveSchema = true;
            continue;
        }
        if (!haveSchema && (kw.text == "dependencies" || kw.text == "query" || kw.text == "database"))
            Parser::failAt("'" + kw.text + "' section before the schema section", kw.span);
        if (kw.text == "dependencies") {
            p.expect(Tok::LBrace);
            while (!p.at(Tok::RBrace)) {
                SourceSpan sp = p.peek().span;
                Dependency d = p.dependency(doc.schema, "d" + std::to_string(doc.dependencies.size() + 1));
                if (!depIds.insert(d.id).second) Parser::failAt("duplicate dependency id '" + d.id + "'", sp);
                doc.dependencies.push_back(std::move(d));
            }
            p.expect(Tok::RBrace);
        } else if (kw.text == "query") {
            const Token& name = p.expect(Tok::Ident, "query name");
            std::string qn = name.text;
            if (doc.queries.count(qn) || doc.aggregates.count(qn))
                Parser::failAt("duplicate query '" + qn + "'", name.span);
            p.expect(Tok::LBrace);
            auto raw = p.rawQuery(doc.schema);
            p.expect(Tok::RBrace);
            if (Parser::isAggregate(raw)) doc.aggregates.emplace(qn, Parser::finishAggregate(raw));
            else doc.queries.emplace(qn, Parser::finishPlain(raw));
            doc.queryOrder.push_back(qn);
        } else if (kw.text == "database") {
            const Token& name = p.expect(Tok::Ident, "database name");
            if (doc.databases.count(name.text)) Parser::failAt("duplicate database '" + name.text + "'", name.span);
            std::string dn = name.text;
            p.expect(Tok::LBrace);
            BagDatabase d;
            p.databaseBody(doc.schema, d, Tok::RBrace);
            p.expect(Tok::RBrace);
            doc.databases.emplace(dn, std::move(d));
        } else {
            Parser::failAt("unknown section '" + kw.text + "'", kw.span);
        }
    }
    return doc;
}

Document loadDocument(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseDocument(ss.str());
}

// ---- printing ----

std::string printTerm(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Variable: return t.text;
    case Term::Kind::Integer: return std::to_string(t.number);
    case Term::Kind::String: {
        std::string out = "\"";
        for (char c : t.text) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        out.push_back('"');
        return out;
    }
    }
    return "?";
}

std::string printAtom(const Atom& a) {
    std::string out = a.relation + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ",";
        out += printTerm(a.args[i]);
    }
    return out + ")";
}

namespace {

// fresh `_vN` -> first unused V1, V2, ...
Substitution freshRenaming(const std::vector<const std::vector<Atom>*>& groups, const std::vector<const Atom*>& singles,
                           const std::vector<Term>& extra = {}) {
    std::set<std::string> used;
    std::vector<Term> fresh;
    std::set<Term> seenFresh;
    auto visit = [&](const Term& t) {
        if (!t.isVariable()) return;
        if (t.isFresh()) {
            if (seenFresh.insert(t).second) fresh.push_back(t);
        } else {
            used.insert(t.text);
        }
    };
    for (const Atom* a : singles)
        for (const Term& t : a->args) visit(t);
    for (const auto* g : groups)
        for (const Atom& a : *g)
            for (const Term& t : a.args) visit(t);
    for (const Term& t : extra) visit(t);
    Substitution s;
    int k = 1;
    for (const Term& f : fresh) {
        std::string name;
        do {
            name = "V" + std::to_string(k++);
        } while (used.count(name));
        used.insert(name);
        s[f] = Term::var(name);
    }
    return s;
}

std::string joinAtoms(const std::vector<Atom>& atoms, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += sep;
        out += printAtom(atoms[i]);
    }
    return out;
}

} // namespace

std::string printQuery(const Query& q0, const PrintOptions& opt) {
    Query q = q0;
    if (opt.renameFresh) q = substitute(freshRenaming({&q0.body}, {&q0.head}), q0);
    return printAtom(q.head) + " :- " + joinAtoms(q.body, ", ") + ".";
}

std::string printAggregateQuery(const AggregateQuery& a0, const PrintOptions& opt) {
    AggregateQuery a = a0;
    if (opt.renameFresh) {
        Substitution s = freshRenaming({&a0.core.body}, {&a0.core.head});
        a.core = substitute(s, a0.core);
        for (Term& t : a.grouping) t = substitute(s, t);
        if (a.aggArg) a.aggArg = substitute(s, *a.aggArg);
    }
    std::string out = a.core.head.relation + "(";
    for (const Term& t : a.grouping) out += printTerm(t) + ",";
    out += std::string(aggFnName(a.fn)) + "(" + (a.aggArg ? printTerm(*a.aggArg) : std::string("*")) + "))";
    return out + " :- " + joinAtoms(a.core.body, ", ") + ".";
}

std::string printDependency(const Dependency& d0, const PrintOptions& opt) {
    Dependency d = d0;
    if (opt.renameFresh) {
        Substitution s = freshRenaming({&d0.premise, &d0.conclusion}, {}, {d0.left, d0.right});
        d.premise = substitute(s, d0.premise);
        d.conclusion = substitute(s, d0.conclusion);
        for (Term& t : d.existentials) t = substitute(s, t);
        d.left = substitute(s, d0.left);
        d.right = substitute(s, d0.right);
    }
    std::string out = d.id + ": " + joinAtoms(d.premise, " & ") + " -> ";
    if (d.isEgd()) return out + printTerm(d.left) + " = " + printTerm(d.right) + ".";
    if (!d.existentials.empty()) {
        out += "exists ";
        for (std::size_t i = 0; i < d.existentials.size(); ++i) {
            if (i) out += ",";
            out += printTerm(d.existentials[i]);
        }
        out += " : ";
    }
    return out + joinAtoms(d.conclusion, " & ") + ".";
}

std::string printSchema(const Schema& s) {
    std::string out;
    for (const std::string& name : s.order) {
        const RelationInfo& r = s.at(name);
        out += "relation " + name + "/" + std::to_string(r.arity);
        if (r.setEnforced && !r.tupleIdPosition) out += " set";
        if (r.tupleIdPosition) out += " tupleid " + std::to_string(*r.tupleIdPosition);
        out += ";\n";
    }
    for (const FunctionalDependency& fd : s.fds) {
        const RelationInfo& r = s.at(fd.relation);
        if (r.tupleIdPosition && fd.dependent == *r.tupleIdPosition &&
            static_cast<int>(fd.determinant.size()) == r.arity - 1)
            continue; // implied by tupleid
        out += "fd " + fd.relation + "(";
        for (std::size_t i = 0; i < fd.determinant.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(fd.determinant[i]);
        }
        out += " -> " + std::to_string(fd.dependent) + ");\n";
    }
    return out;
}

std::string printTuple(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += printTerm(t[i]);
    }
    return out + ")";
}

std::string printDatabase(const BagDatabase& d, const Schema* order) {
    std::vector<std::string> names;
    if (order) {
        for (const std::string& n : order->order)
            if (d.relations.count(n)) names.push_back(n);
    }
    for (const auto& [n, _] : d.relations)
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    std::string out;
    for (const std::string& n : names) {
        out += n + " {";
        for (const auto& [t, m] : d.relations.at(n)) {
            if (m <= 3) {
                for (long long k = 0; k < m; ++k) out += " " + printTuple(t) + ";";
            } else {
                out += " " + printTuple(t) + " * " + std::to_string(m) + ";";
            }
        }
        out += " }\n";
    }
    return out;
}

std::string formatError(const ParseError& e, std::string_view file) {
    return std::string(file) + ":" + std::to_string(e.span().line) + ":" + std::to_string(e.span().column) + ": " +
           e.what();
}

} // namespace chasekit
