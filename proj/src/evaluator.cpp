#include "chasekit/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "chasekit/errors.hpp"
#include "chasekit/text_io.hpp"

namespace chasekit {

namespace {

struct CompiledAtom {
    const std::map<Tuple, long long>* rel = nullptr;
    std::vector<int> slot;    // variable index, or -1 for a constant
    std::vector<Term> consts; // used where slot == -1
};

// Backtracking matcher; atoms are tried in the given order.
class Matcher {
public:
    Matcher(const std::vector<Atom>& atoms, const BagDatabase& d, const Substitution& anchor) {
        vars_ = variablesOf(atoms);
        std::map<Term, int> index;
        for (std::size_t i = 0; i < vars_.size(); ++i) index[vars_[i]] = static_cast<int>(i);
        values_.assign(vars_.size(), Term{});
        bound_.assign(vars_.size(), false);
        for (const Atom& a : atoms) {
            CompiledAtom c;
            c.rel = d.find(a.relation);
            for (const Term& t : a.args) {
                if (t.isVariable()) {
                    auto it = anchor.find(t);
                    if (it != anchor.end()) {
                        c.slot.push_back(-1);
                        c.consts.push_back(it->second);
                    } else {
                        c.slot.push_back(index.at(t));
                        c.consts.push_back(Term{});
                    }
                } else {
                    c.slot.push_back(-1);
                    c.consts.push_back(t);
                }
            }
            atoms_.push_back(std::move(c));
        }
        // anchored variables are fixed for the whole search
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = anchor.find(vars_[i]);
            if (it != anchor.end()) {
                values_[i] = it->second;
                bound_[i] = true;
            }
        }
    }

    void run(const AssignmentVisitor& visit) {
        for (const CompiledAtom& c : atoms_)
            if (!c.rel || c.rel->empty()) return;
        stop_ = false;
        step(0, 1, visit);
    }

private:
    void step(std::size_t i, long long weight, const AssignmentVisitor& visit) {
        if (i == atoms_.size()) {
            if (!visit(values_, weight)) stop_ = true;
            return;
        }
        const CompiledAtom& c = atoms_[i];
        std::vector<int> newly;
        for (const auto& [tuple, mult] : *c.rel) {
            newly.clear();
            bool ok = true;
            for (std::size_t p = 0; p < tuple.size() && ok; ++p) {
                int s = c.slot[p];
                if (s < 0) {
                    ok = tuple[p] == c.consts[p];
                } else if (bound_[s]) {
                    ok = tuple[p] == values_[s];
                } else {
                    values_[s] = tuple[p];
                    bound_[s] = true;
                    newly.push_back(s);
                }
            }
            if (ok) step(i + 1, weight * mult, visit);
            for (int s : newly) bound_[s] = false;
            if (stop_) return;
        }
    }

    std::vector<Term> vars_;
    std::vector<CompiledAtom> atoms_;
    std::vector<Term> values_;
    std::vector<bool> bound_;
    bool stop_ = false;
};

Tuple headTuple(const Query& q, const std::vector<Term>& vars, const std::vector<Term>& values) {
    Tuple t;
    t.reserve(q.head.args.size());
    for (const Term& a : q.head.args) {
        if (!a.isVariable()) {
            t.push_back(a);
            continue;
        }
        auto it = std::find(vars.begin(), vars.end(), a);
        t.push_back(values[static_cast<std::size_t>(it - vars.begin())]);
    }
    return t;
}

void requireSetValued(const BagDatabase& d) {
    for (const auto& [name, rel] : d.relations)
        for (const auto& [t, m] : rel)
            if (m != 1) throw NonSetDatabase(name);
}

} // namespace

void forEachAssignment(const std::vector<Atom>& atoms, const BagDatabase& d, const AssignmentVisitor& visit,
                       const Substitution& anchor) {
    if (atoms.empty()) {
        visit({}, 1);
        return;
    }
    Matcher m(atoms, d, anchor);
    m.run(visit);
}

AnswerSet evalSet(const Query& q, const BagDatabase& d) {
    AnswerSet out;
    std::vector<Term> vars = variablesOf(q.body);
    forEachAssignment(q.body, d, [&](const std::vector<Term>& v, long long) {
        out.insert(headTuple(q, vars, v));
        return true;
    });
    return out;
}

AnswerBag evalBagSet(const Query& q, const BagDatabase& d) {
    requireSetValued(d);
    AnswerBag out;
    std::vector<Term> vars = variablesOf(q.body);
    forEachAssignment(q.body, d, [&](const std::vector<Term>& v, long long) {
        out[headTuple(q, vars, v)] += 1;
        return true;
    });
    return out;
}

AnswerBag evalBag(const Query& q, const BagDatabase& d) {
    AnswerBag out;
    std::vector<Term> vars = variablesOf(q.body);
    forEachAssignment(q.body, d, [&](const std::vector<Term>& v, long long w) {
        out[headTuple(q, vars, v)] += w;
        return true;
    });
    return out;
}

bool satisfies(const BagDatabase& d, const Dependency& dep, const Schema& s) {
    for (const auto& [name, rel] : d.relations)
        if (s.isSetEnforced(name) && !d.isSetValued(name)) return false;
    std::vector<Term> vars = variablesOf(dep.premise);
    bool ok = true;
    forEachAssignment(dep.premise, d, [&](const std::vector<Term>& v, long long) {
        if (dep.isEgd()) {
            auto value = [&](const Term& t) {
                if (!t.isVariable()) return t;
                auto it = std::find(vars.begin(), vars.end(), t);
                return v[static_cast<std::size_t>(it - vars.begin())];
            };
            ok = value(dep.left) == value(dep.right);
            return ok;
        }
        Substitution anchor;
        for (std::size_t i = 0; i < vars.size(); ++i) anchor[vars[i]] = v[i];
        bool witnessed = false;
        forEachAssignment(dep.conclusion, d, [&](const std::vector<Term>&, long long) {
            witnessed = true;
            return false;
        }, anchor);
        ok = witnessed;
        return ok;
    });
    return ok;
}

bool satisfies(const BagDatabase& d, const std::vector<Dependency>& deps, const Schema& s) {
    for (const auto& [name, rel] : d.relations)
        if (s.isSetEnforced(name) && !d.isSetValued(name)) return false;
    for (const Dependency& dep : deps)
        if (!satisfies(d, dep, s)) return false;
    return true;
}

BagDatabase canonicalDatabase(const Query& q, Substitution* freeze) {
    std::set<long long> used;
    for (const Atom& a : q.body)
        for (const Term& t : a.args)
            if (t.kind == Term::Kind::Integer) used.insert(t.number);
    for (const Term& t : q.head.args)
        if (t.kind == Term::Kind::Integer) used.insert(t.number);
    Substitution f;
    long long next = 1;
    for (const Term& v : variablesOf(q.body)) {
        while (used.count(next)) ++next;
        f[v] = Term::integer(next++);
    }
    BagDatabase d;
    for (const Atom& a : q.body) {
        Tuple t = substitute(f, a).args;
        if (!d.multiplicity(a.relation, t)) d.add(a.relation, t);
    }
    if (freeze) *freeze = std::move(f);
    return d;
}

// ---- enumeration ----

namespace {

std::vector<std::string> enumerationRelations(const Schema& s, const EnumerationLimits& lim) {
    if (lim.relations.empty()) return s.order;
    std::vector<std::string> out;
    for (const std::string& r : s.order)
        if (std::find(lim.relations.begin(), lim.relations.end(), r) != lim.relations.end()) out.push_back(r);
    return out;
}

std::vector<Tuple> allTuples(int arity, int domain) {
    std::vector<Tuple> out;
    Tuple cur(static_cast<std::size_t>(arity), Term::integer(1));
    for (;;) {
        out.push_back(cur);
        int p = arity - 1;
        while (p >= 0 && cur[static_cast<std::size_t>(p)].number == domain) {
            cur[static_cast<std::size_t>(p)] = Term::integer(1);
            --p;
        }
        if (p < 0) break;
        cur[static_cast<std::size_t>(p)].number += 1;
    }
    return out;
}

double binom(double n, double k) {
    if (k < 0 || k > n) return 0;
    return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

class Enumerator {
public:
    Enumerator(const Schema& s, int domain, int mult, const std::vector<Dependency>& deps,
               const std::function<bool(const BagDatabase&)>& visit, const EnumerationLimits& lim)
        : schema_(s), visit_(visit), maxTuples_(lim.maxTuples) {
        rels_ = enumerationRelations(s, lim);
        for (const std::string& r : rels_) {
            slots_.push_back(allTuples(s.at(r).arity, domain));
            mult_.push_back(s.isSetEnforced(r) ? 1 : mult);
        }
        // a dependency is checked at the first level where all its relations are filled
        checks_.resize(rels_.size() + 1);
        for (const Dependency& d : deps) {
            std::size_t level = 0;
            bool outside = false;
            auto note = [&](const Atom& a) {
                auto it = std::find(rels_.begin(), rels_.end(), a.relation);
                if (it == rels_.end()) outside = true;
                else level = std::max(level, static_cast<std::size_t>(it - rels_.begin()) + 1);
            };
            for (const Atom& a : d.premise) note(a);
            for (const Atom& a : d.conclusion) note(a);
            if (outside) {
                // relations kept empty: premise over them never matches; a conclusion over them never holds
                bool premiseOutside = std::any_of(d.premise.begin(), d.premise.end(), [&](const Atom& a) {
                    return std::find(rels_.begin(), rels_.end(), a.relation) == rels_.end();
                });
                if (premiseOutside) continue;
            }
            checks_[level].push_back(&d);
        }
    }

    std::uint64_t run() {
        count_ = 0;
        stop_ = false;
        if (!levelOk(0)) return 0;
        level(0, maxTuples_ < 0 ? -1 : maxTuples_);
        return count_;
    }

private:
    bool levelOk(std::size_t lvl) {
        for (const Dependency* d : checks_[lvl])
            if (!satisfies(db_, *d, schema_)) return false;
        return true;
    }

    void level(std::size_t i, int budget) {
        if (stop_) return;
        if (i == rels_.size()) {
            ++count_;
            if (!visit_(db_)) stop_ = true;
            return;
        }
        const auto& slots = slots_[i];
        int maxK = static_cast<int>(slots.size());
        if (budget >= 0) maxK = std::min(maxK, budget);
        std::vector<std::size_t> pick;
        for (int k = 0; k <= maxK && !stop_; ++k) {
            pick.assign(static_cast<std::size_t>(k), 0);
            for (int j = 0; j < k; ++j) pick[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j);
            for (;;) {
                multiplicities(i, pick, 0, budget < 0 ? -1 : budget - k);
                if (stop_) return;
                // next combination
                int j = k - 1;
                while (j >= 0 && pick[static_cast<std::size_t>(j)] == slots.size() - static_cast<std::size_t>(k - j)) --j;
                if (j < 0) break;
                ++pick[static_cast<std::size_t>(j)];
                for (int t = j + 1; t < k; ++t) pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t - 1)] + 1;
            }
        }
    }

    void multiplicities(std::size_t i, const std::vector<std::size_t>& pick, std::size_t p, int budget) {
        if (p == pick.size()) {
            if (levelOk(i + 1)) level(i + 1, budget);
            return;
        }
        const std::string& rel = rels_[i];
        for (int m = 1; m <= mult_[i] && !stop_; ++m) {
            db_.relations[rel][slots_[i][pick[p]]] = m;
            multiplicities(i, pick, p + 1, budget);
        }
        auto& r = db_.relations[rel];
        r.erase(slots_[i][pick[p]]);
        if (r.empty()) db_.relations.erase(rel);
    }

    const Schema& schema_;
    const std::function<bool(const BagDatabase&)>& visit_;
    int maxTuples_;
    std::vector<std::string> rels_;
    std::vector<std::vector<Tuple>> slots_;
    std::vector<int> mult_;
    std::vector<std::vector<const Dependency*>> checks_;
    BagDatabase db_;
    std::uint64_t count_ = 0;
    bool stop_ = false;
};

} // namespace

double estimateDatabaseCount(const Schema& s, int domainSize, int maxMult, const EnumerationLimits& lim) {
    double total = 1;
    double slots = 0;
    int m = 1;
    for (const std::string& r : enumerationRelations(s, lim)) {
        double n = std::pow(static_cast<double>(domainSize), s.at(r).arity);
        int rm = s.isSetEnforced(r) ? 1 : maxMult;
        total *= std::pow(static_cast<double>(rm + 1), n);
        slots += n;
        m = std::max(m, rm);
    }
    if (lim.maxTuples < 0) return total;
    double bounded = 0;
    for (int k = 0; k <= lim.maxTuples && k <= slots; ++k) bounded += binom(slots, k) * std::pow(m, k);
    return std::min(total, bounded);
}

std::uint64_t enumerateDatabases(const Schema& s, int domainSize, int maxMult,
                                 const std::vector<Dependency>& requiredSat,
                                 const std::function<bool(const BagDatabase&)>& visit,
                                 const EnumerationLimits& lim) {
    if (domainSize < 1 || maxMult < 1) throw ValidationError("domain size and multiplicity must be >= 1");
    double est = estimateDatabaseCount(s, domainSize, maxMult, lim);
    if (est > static_cast<double>(lim.cap))
        throw ResourceBound("database enumeration would visit about " + std::to_string(static_cast<long long>(est)) +
                            " candidates (cap " + std::to_string(lim.cap) + ")");
    Enumerator e(s, domainSize, maxMult, requiredSat, visit, lim);
    return e.run();
}

// ---- aggregates ----

std::set<Tuple> evalAggregate(const AggregateQuery& a, const BagDatabase& d) {
    AnswerBag core = evalBagSet(a.core, d);
    std::size_t g = a.grouping.size();
    struct Acc {
        long long count = 0;
        long long sum = 0;
        std::optional<Term> best;
    };
    std::map<Tuple, Acc> groups;
    for (const auto& [t, m] : core) {
        Tuple key(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(g));
        Acc& acc = groups[key];
        acc.count += m;
        if (!a.aggArg) continue;
        const Term& v = t[g];
        if (a.fn == AggFn::Sum) {
            if (v.kind != Term::Kind::Integer) throw ValidationError("sum over a non-integer constant");
            acc.sum += v.number * m;
        } else if (a.fn == AggFn::Max) {
            if (!acc.best || *acc.best < v) acc.best = v;
        } else if (a.fn == AggFn::Min) {
            if (!acc.best || v < *acc.best) acc.best = v;
        }
    }
    std::set<Tuple> out;
    for (auto& [key, acc] : groups) {
        Tuple row = key;
        switch (a.fn) {
        case AggFn::Count: row.push_back(Term::integer(acc.count)); break;
        case AggFn::Sum: row.push_back(Term::integer(acc.sum)); break;
        case AggFn::Max:
        case AggFn::Min: row.push_back(*acc.best); break;
        }
        out.insert(std::move(row));
    }
    return out;
}

std::string printAnswerBag(const AnswerBag& b) {
    std::string out = "{{";
    bool first = true;
    for (const auto& [t, m] : b)
        for (long long k = 0; k < m; ++k) {
            out += first ? " " : ", ";
            first = false;
            out += printTuple(t);
        }
    return out + (first ? "}}" : " }}");
}

std::string printAnswerSet(const std::set<Tuple>& s) {
    std::string out = "{";
    bool first = true;
    for (const Tuple& t : s) {
        out += first ? " " : ", ";
        first = false;
        out += printTuple(t);
    }
    return out + (first ? "}" : " }");
}

} // namespace chasekit
