#include "chasekit/model.hpp"

#include <algorithm>
#include <atomic>

#include "chasekit/errors.hpp"

namespace chasekit {

std::string_view semanticsName(Semantics s) {
    switch (s) {
    case Semantics::Set: return "S";
    case Semantics::Bag: return "B";
    case Semantics::BagSet: return "BS";
    }
    return "?";
}

std::optional<Semantics> semanticsFromName(std::string_view s) {
    if (s == "S") return Semantics::Set;
    if (s == "B") return Semantics::Bag;
    if (s == "BS") return Semantics::BagSet;
    return std::nullopt;
}

std::string_view aggFnName(AggFn f) {
    switch (f) {
    case AggFn::Sum: return "sum";
    case AggFn::Count: return "count";
    case AggFn::Max: return "max";
    case AggFn::Min: return "min";
    }
    return "?";
}

std::optional<AggFn> aggFnFromName(std::string_view s) {
    if (s == "sum") return AggFn::Sum;
    if (s == "count") return AggFn::Count;
    if (s == "max") return AggFn::Max;
    if (s == "min") return AggFn::Min;
    return std::nullopt;
}

Term Term::var(std::string name) {
    Term t;
    t.kind = Kind::Variable;
    t.text = std::move(name);
    return t;
}

Term Term::integer(long long v) {
    Term t;
    t.kind = Kind::Integer;
    t.number = v;
    return t;
}

Term Term::string(std::string s) {
    Term t;
    t.kind = Kind::String;
    t.text = std::move(s);
    return t;
}

bool Term::isFresh() const {
    return kind == Kind::Variable && text.size() > 2 && text[0] == '_' && text[1] == 'v';
}

namespace {
std::atomic<unsigned long long> freshCounter{0};
}

Term freshVariable(std::string_view) {
    return Term::var("_v" + std::to_string(++freshCounter));
}

// ---- schema ----

void Schema::addRelation(const std::string& name, int arity, bool setEnforced,
                         std::optional<int> tupleId) {
    if (relations.count(name)) throw ValidationError("duplicate relation '" + name + "'");
    if (arity < 1) throw ValidationError("arity of '" + name + "' must be >= 1");
    if (tupleId && (*tupleId < 1 || *tupleId > arity))
        throw ValidationError("tuple id position of '" + name + "' out of range");
    RelationInfo info;
    info.arity = arity;
    // a tuple id column makes the relation a set
    info.setEnforced = setEnforced || tupleId.has_value();
    info.tupleIdPosition = tupleId;
    relations.emplace(name, info);
    order.push_back(name);
    if (tupleId && arity > 1) {
        FunctionalDependency fd;
        fd.relation = name;
        for (int i = 1; i <= arity; ++i)
            if (i != *tupleId) fd.determinant.push_back(i);
        fd.dependent = *tupleId;
        fds.push_back(std::move(fd));
    }
}

void Schema::addFd(FunctionalDependency fd) {
    const RelationInfo& r = at(fd.relation);
    auto bad = [&](int p) { return p < 1 || p > r.arity; };
    if (fd.determinant.empty() || bad(fd.dependent) ||
        std::any_of(fd.determinant.begin(), fd.determinant.end(), bad))
        throw ValidationError("fd position out of range for '" + fd.relation + "'");
    std::sort(fd.determinant.begin(), fd.determinant.end());
    fd.determinant.erase(std::unique(fd.determinant.begin(), fd.determinant.end()),
                         fd.determinant.end());
    if (std::find(fds.begin(), fds.end(), fd) == fds.end()) fds.push_back(std::move(fd));
}

void Schema::addKey(const std::string& rel, const std::vector<int>& positions) {
    const RelationInfo& r = at(rel);
    for (int p : positions)
        if (p < 1 || p > r.arity)
            throw ValidationError("key position " + std::to_string(p) + " out of range for '" + rel + "'");
    if (positions.empty()) throw ValidationError("empty key for '" + rel + "'");
    for (int i = 1; i <= r.arity; ++i) {
        if (std::find(positions.begin(), positions.end(), i) != positions.end()) continue;
        addFd(FunctionalDependency{rel, positions, i});
    }
}

const RelationInfo* Schema::find(std::string_view name) const {
    auto it = relations.find(std::string(name));
    return it == relations.end() ? nullptr : &it->second;
}

const RelationInfo& Schema::at(std::string_view name) const {
    const RelationInfo* r = find(name);
    if (!r) throw UnknownRelation(std::string(name));
    return *r;
}

bool Schema::isSetEnforced(std::string_view name) const {
    const RelationInfo* r = find(name);
    return r && r->setEnforced;
}

// ---- database ----

void BagDatabase::add(const std::string& rel, Tuple t, long long mult) {
    if (mult <= 0) return;
    relations[rel][std::move(t)] += mult;
}

long long BagDatabase::multiplicity(const std::string& rel, const Tuple& t) const {
    auto it = relations.find(rel);
    if (it == relations.end()) return 0;
    auto jt = it->second.find(t);
    return jt == it->second.end() ? 0 : jt->second;
}

bool BagDatabase::isSetValued(const std::string& rel) const {
    auto it = relations.find(rel);
    if (it == relations.end()) return true;
    for (const auto& [t, m] : it->second)
        if (m != 1) return false;
    return true;
}

bool BagDatabase::isSetValued() const {
    for (const auto& [name, _] : relations)
        if (!isSetValued(name)) return false;
    return true;
}

long long BagDatabase::totalTuples() const {
    long long n = 0;
    for (const auto& [_, rel] : relations)
        for (const auto& [t, m] : rel) n += m;
    return n;
}

std::size_t BagDatabase::distinctTuples() const {
    std::size_t n = 0;
    for (const auto& [_, rel] : relations) n += rel.size();
    return n;
}

std::set<Term> BagDatabase::constants() const {
    std::set<Term> out;
    for (const auto& [_, rel] : relations)
        for (const auto& [t, m] : rel) out.insert(t.begin(), t.end());
    return out;
}

const std::map<Tuple, long long>* BagDatabase::find(const std::string& rel) const {
    auto it = relations.find(rel);
    return it == relations.end() ? nullptr : &it->second;
}

// ---- substitution ----

Term substitute(const Substitution& s, const Term& t) {
    if (!t.isVariable()) return t;
    auto it = s.find(t);
    return it == s.end() ? t : it->second;
}

Atom substitute(const Substitution& s, const Atom& a) {
    Atom out;
    out.relation = a.relation;
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(substitute(s, t));
    return out;
}

std::vector<Atom> substitute(const Substitution& s, const std::vector<Atom>& atoms) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) out.push_back(substitute(s, a));
    return out;
}

Query substitute(const Substitution& s, const Query& q) {
    return Query{substitute(s, q.head), substitute(s, q.body)};
}

namespace {
void collectVars(const Atom& a, std::vector<Term>& out, std::set<Term>& seen) {
    for (const Term& t : a.args)
        if (t.isVariable() && seen.insert(t).second) out.push_back(t);
}
} // namespace

std::vector<Term> variablesOf(const std::vector<Atom>& atoms) {
    std::vector<Term> out;
    std::set<Term> seen;
    for (const Atom& a : atoms) collectVars(a, out, seen);
    return out;
}

std::vector<Term> variablesOf(const Atom& a) {
    std::vector<Term> out;
    std::set<Term> seen;
    collectVars(a, out, seen);
    return out;
}

std::vector<Term> variablesOf(const Query& q) {
    std::vector<Term> out;
    std::set<Term> seen;
    for (const Atom& a : q.body) collectVars(a, out, seen);
    collectVars(q.head, out, seen);
    return out;
}

Query canonicalRepresentation(const Query& q) {
    Query out{q.head, {}};
    std::set<Atom> seen;
    for (const Atom& a : q.body)
        if (seen.insert(a).second) out.body.push_back(a);
    return out;
}

Query dedupSetEnforced(const Query& q, const Schema& s) {
    Query out{q.head, {}};
    std::set<Atom> seen;
    for (const Atom& a : q.body) {
        if (s.isSetEnforced(a.relation) && !seen.insert(a).second) continue;
        out.body.push_back(a);
    }
    return out;
}

bool isSafe(const Query& q) {
    std::set<Term> bodyVars;
    for (const Atom& a : q.body)
        for (const Term& t : a.args)
            if (t.isVariable()) bodyVars.insert(t);
    for (const Term& t : q.head.args)
        if (t.isVariable() && !bodyVars.count(t)) return false;
    return true;
}

namespace {
void checkAtom(const Atom& a, const Schema& s) {
    const RelationInfo* r = s.find(a.relation);
    if (!r) throw ValidationError("unknown relation '" + a.relation + "'");
    if (static_cast<int>(a.args.size()) != r->arity)
        throw ValidationError("relation '" + a.relation + "' has arity " + std::to_string(r->arity) +
                              ", got " + std::to_string(a.args.size()) + " arguments");
}
} // namespace

void validateQuery(const Query& q, const Schema& s) {
    if (q.body.empty()) throw ValidationError("query body is empty");
    for (const Atom& a : q.body) checkAtom(a, s);
    if (!isSafe(q)) throw ValidationError("unsafe query: head variable missing from body");
}

void validateDependency(const Dependency& d, const Schema& s) {
    if (d.premise.empty()) throw ValidationError("dependency '" + d.id + "' has an empty premise");
    for (const Atom& a : d.premise) checkAtom(a, s);
    std::set<Term> premiseVars;
    for (const Term& v : variablesOf(d.premise)) premiseVars.insert(v);
    if (d.isTgd()) {
        if (d.conclusion.empty()) throw ValidationError("tgd '" + d.id + "' has an empty conclusion");
        std::set<Term> ex(d.existentials.begin(), d.existentials.end());
        for (const Term& z : d.existentials)
            if (premiseVars.count(z))
                throw ValidationError("existential '" + z.text + "' of '" + d.id + "' occurs in the premise");
        for (const Atom& a : d.conclusion) {
            checkAtom(a, s);
            for (const Term& t : a.args)
                if (t.isVariable() && !premiseVars.count(t) && !ex.count(t))
                    throw ValidationError("variable '" + t.text + "' of '" + d.id +
                                          "' is neither premise-bound nor existential");
        }
    } else {
        for (const Term* t : {&d.left, &d.right})
            if (t->isVariable() && !premiseVars.count(*t))
                throw ValidationError("egd term '" + t->text + "' of '" + d.id + "' not in premise");
    }
}

void validateAggregate(const AggregateQuery& a, const Schema& s) {
    validateQuery(a.core, s);
    if (a.aggArg) {
        if (!a.aggArg->isVariable()) throw ValidationError("aggregated argument must be a variable");
        if (std::find(a.grouping.begin(), a.grouping.end(), *a.aggArg) != a.grouping.end())
            throw ValidationError("aggregated variable also appears among grouping arguments");
    } else if (a.fn != AggFn::Count) {
        throw ValidationError(std::string(aggFnName(a.fn)) + " needs an argument");
    }
    std::vector<Term> expect = a.grouping;
    if (a.aggArg) expect.push_back(*a.aggArg);
    if (a.core.head.args != expect) throw ValidationError("core head must be grouping plus aggregated argument");
}

void validateDatabase(const BagDatabase& d, const Schema& s) {
    for (const auto& [name, rel] : d.relations) {
        const RelationInfo* r = s.find(name);
        if (!r) throw ValidationError("unknown relation '" + name + "'");
        for (const auto& [t, m] : rel) {
            if (static_cast<int>(t.size()) != r->arity)
                throw ValidationError("tuple width mismatch in '" + name + "'");
            for (const Term& c : t)
                if (c.isVariable()) throw ValidationError("database tuples hold constants only");
            if (m < 1) throw ValidationError("multiplicity must be positive");
        }
    }
}

AggregateQuery makeAggregate(std::string name, std::vector<Term> grouping, AggFn fn,
                             std::optional<Term> aggArg, std::vector<Atom> body) {
    AggregateQuery a;
    a.grouping = grouping;
    a.fn = fn;
    a.aggArg = aggArg;
    a.core.head.relation = std::move(name);
    a.core.head.args = std::move(grouping);
    if (aggArg) a.core.head.args.push_back(*aggArg);
    a.core.body = std::move(body);
    return a;
}

} // namespace chasekit
