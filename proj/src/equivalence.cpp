#include "chasekit/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "chasekit/mappings.hpp"
#include "chasekit/text_io.hpp"

namespace chasekit {

EquivVerdict equivUnderSigma(Semantics sem, const Query& q1, const Query& q2, ChaseEngine& engine) {
    if (q1.head.args.size() != q2.head.args.size()) throw HeadArityMismatch(q1.head.args.size(), q2.head.args.size());
    EquivVerdict v;
    v.semantics = std::string(semanticsName(sem));
    Query r1 = engine.soundChase(sem, q1).result;
    Query r2 = engine.soundChase(sem, q2).result;
    switch (sem) {
    case Semantics::Set: v.equivalent = setEquivalent(r1, r2); break;
    case Semantics::Bag: v.equivalent = bagEquivalentWithSetRelations(r1, r2, engine.schema()); break;
    case Semantics::BagSet: v.equivalent = bagSetEquivalent(r1, r2); break;
    }
    v.chaseResults = std::make_pair(std::move(r1), std::move(r2));
    return v;
}

EquivVerdict equivUnderSigma(Semantics sem, const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                             const Schema& s, ChaseBudget budget) {
    ChaseEngine engine(s, deps, budget);
    return equivUnderSigma(sem, q1, q2, engine);
}

EquivVerdict equivSetUnderSigma(const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                                const Schema& s, ChaseBudget budget) {
    return equivUnderSigma(Semantics::Set, q1, q2, deps, s, budget);
}

EquivVerdict equivBagUnderSigma(const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                                const Schema& s, ChaseBudget budget) {
    return equivUnderSigma(Semantics::Bag, q1, q2, deps, s, budget);
}

EquivVerdict equivBagSetUnderSigma(const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                                   const Schema& s, ChaseBudget budget) {
    return equivUnderSigma(Semantics::BagSet, q1, q2, deps, s, budget);
}

void checkCompatible(const AggregateQuery& a1, const AggregateQuery& a2) {
    if (a1.fn != a2.fn)
        throw IncompatibleAggregates("aggregate functions differ: " + std::string(aggFnName(a1.fn)) + " vs " +
                                     std::string(aggFnName(a2.fn)));
    if (a1.grouping.size() != a2.grouping.size())
        throw IncompatibleAggregates("grouping arities differ: " + std::to_string(a1.grouping.size()) + " vs " +
                                     std::to_string(a2.grouping.size()));
    if (a1.aggArg.has_value() != a2.aggArg.has_value())
        throw IncompatibleAggregates("one query aggregates an argument, the other does not");
}

namespace {

Semantics aggregateCoreSemantics(AggFn fn) {
    return fn == AggFn::Max || fn == AggFn::Min ? Semantics::Set : Semantics::BagSet;
}

} // namespace

EquivVerdict equivAggregateUnderSigma(const AggregateQuery& a1, const AggregateQuery& a2,
                                      const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget) {
    checkCompatible(a1, a2);
    EquivVerdict v = equivUnderSigma(aggregateCoreSemantics(a1.fn), a1.core, a2.core, deps, s, budget);
    v.semantics = "AGG";
    return v;
}

bool answersDiffer(const Query& q1, const Query& q2, Semantics sem, const BagDatabase& d) {
    switch (sem) {
    case Semantics::Set: return evalSet(q1, d) != evalSet(q2, d);
    case Semantics::Bag: return evalBag(q1, d) != evalBag(q2, d);
    case Semantics::BagSet: return evalBagSet(q1, d) != evalBagSet(q2, d);
    }
    return false;
}

std::string renderAnswers(const Query& q1, const Query& q2, Semantics sem, const BagDatabase& d) {
    auto one = [&](const Query& q) {
        switch (sem) {
        case Semantics::Set: return printAnswerSet(evalSet(q, d));
        case Semantics::Bag: return printAnswerBag(evalBag(q, d));
        case Semantics::BagSet: return printAnswerBag(evalBagSet(q, d));
        }
        return std::string();
    };
    return q1.head.relation + ": " + one(q1) + "\n" + q2.head.relation + ": " + one(q2) + "\n";
}

bool aggregateAnswersDiffer(const AggregateQuery& a1, const AggregateQuery& a2, const BagDatabase& d) {
    return evalAggregate(a1, d) != evalAggregate(a2, d);
}

namespace {

std::size_t constantCount(const BagDatabase& d) { return d.constants().size(); }

// set partitions into at most `blocks` blocks as restricted growth strings;
// maxPrefix[i] = max(a[0..i])
bool nextPartition(std::vector<int>& a, std::vector<int>& maxPrefix, int blocks) {
    int n = static_cast<int>(a.size());
    for (int i = n - 1; i > 0; --i) {
        if (a[i] <= maxPrefix[i - 1] && a[i] + 1 < blocks) {
            ++a[i];
            int m = std::max(maxPrefix[i - 1], a[i]);
            maxPrefix[i] = m;
            for (int j = i + 1; j < n; ++j) {
                a[j] = 0;
                maxPrefix[j] = m;
            }
            return true;
        }
    }
    return false;
}

// canonical databases that are likely to separate the two queries
std::vector<BagDatabase> seedDatabases(const Query& q1, const Query& q2, Semantics sem, ChaseEngine& engine,
                                       const std::vector<Dependency>& deps, const SearchBounds& b) {
    std::vector<Query> bodies;
    for (const Query* q : {&q1, &q2}) {
        bodies.push_back(*q);
        bodies.push_back(engine.chaseSet(*q).result);
        for (Semantics other : {Semantics::Bag, Semantics::BagSet}) {
            ChaseOutcome o = engine.soundChase(other, *q);
            bodies.push_back(o.result);
            // the test query of an unsound step pins the two copies apart
            for (const Dependency& d : o.dependencies) {
                if (o.ledger.at(d.id) != DependencyState::UnsoundlyApplicable) continue;
                forEachHomomorphism(d.premise, o.result.body, {}, [&](const Homomorphism& h) {
                    if (tgdSatisfiedAt(o.result.body, d, h)) return true;
                    Query terminal;
                    engine.isAssignmentFixing(o.result, d, h, &terminal);
                    bodies.push_back(terminal);
                    bodies.push_back(tgdStep(o.result, d, h));
                    return false;
                });
            }
        }
    }
    const Schema& s = engine.schema();
    std::set<Term> pinned;
    auto pin = [&](const std::vector<Atom>& atoms) {
        for (const Atom& a : atoms)
            for (const Term& t : a.args)
                if (t.isConstant()) pinned.insert(t);
    };
    pin(q1.body);
    pin(q2.body);
    for (const Dependency& d : deps) {
        pin(d.premise);
        pin(d.conclusion);
    }

    std::vector<BagDatabase> out;
    std::set<std::string> seen;
    auto consider = [&](const BagDatabase& d) {
        if (static_cast<int>(constantCount(d)) > b.domainSize) return;
        std::string key = printDatabase(d, &s);
        if (!seen.insert(key).second) return;
        if (!satisfies(d, deps, s)) return;
        out.push_back(d);
    };
    auto withDuplicates = [&](const BagDatabase& base) {
        consider(base);
        if (sem != Semantics::Bag || b.maxMult < 2) return;
        BagDatabase all = base;
        bool any = false;
        for (auto& [rel, tuples] : all.relations) {
            if (s.isSetEnforced(rel)) continue;
            for (auto& [t, m] : tuples) {
                BagDatabase one = base;
                one.relations[rel][t] = b.maxMult;
                consider(one);
                m = b.maxMult;
                any = true;
            }
        }
        if (any) consider(all);
    };
    for (const Query& q : bodies) {
        BagDatabase base = canonicalDatabase(q);
        withDuplicates(base);
        // images of the canonical database with its unpinned constants merged into few values
        std::vector<Term> loose;
        for (const Term& c : base.constants())
            if (!pinned.count(c)) loose.push_back(c);
        int room = b.domainSize - static_cast<int>(base.constants().size() - loose.size());
        if (loose.empty() || room < 1) continue;
        std::vector<int> rgs(loose.size(), 0), rgsMax(loose.size(), 0);
        long long budgetLeft = 20'000;
        do {
            if (--budgetLeft < 0) break;
            Substitution image;
            long long next = 1;
            std::vector<Term> value(loose.size());
            for (std::size_t i = 0; i < loose.size(); ++i) {
                std::size_t blk = static_cast<std::size_t>(rgs[i]);
                if (value[blk].text.empty() && value[blk].kind == Term::Kind::Variable) {
                    while (pinned.count(Term::integer(next))) ++next;
                    value[blk] = Term::integer(next++);
                }
                image[loose[i]] = value[blk];
            }
            BagDatabase merged;
            for (const auto& [rel, tuples] : base.relations)
                for (const auto& [t, m] : tuples) {
                    Tuple u;
                    for (const Term& x : t) {
                        auto it = image.find(x); // constants, so no substitute()
                        u.push_back(it == image.end() ? x : it->second);
                    }
                    merged.relations[rel][u] = 1;
                }
            withDuplicates(merged);
        } while (nextPartition(rgs, rgsMax, room));
    }
    std::stable_sort(out.begin(), out.end(), [&](const BagDatabase& x, const BagDatabase& y) {
        if (x.totalTuples() != y.totalTuples()) return x.totalTuples() < y.totalTuples();
        return printDatabase(x, &s) < printDatabase(y, &s);
    });
    return out;
}

std::vector<std::string> relevantRelations(const std::vector<const Query*>& qs, const std::vector<Dependency>& deps,
                                           const Schema& s) {
    std::set<std::string> rels;
    for (const Query* q : qs)
        for (const Atom& a : q->body) rels.insert(a.relation);
    for (const Dependency& d : deps) {
        for (const Atom& a : d.premise) rels.insert(a.relation);
        for (const Atom& a : d.conclusion) rels.insert(a.relation);
    }
    std::vector<std::string> out;
    for (const std::string& r : s.order)
        if (rels.count(r)) out.push_back(r);
    return out;
}

// all databases by increasing number of distinct tuples while the estimate stays under the cap
SearchResult exhaustive(const Schema& s, int domain, int mult, const std::vector<Dependency>& deps,
                        const std::vector<std::string>& rels, std::uint64_t cap,
                        const std::function<bool(const BagDatabase&)>& differs, SearchResult r) {
    EnumerationLimits lim;
    lim.relations = rels;
    lim.cap = cap;
    double slots = 0;
    for (const std::string& rel : rels) slots += std::pow(static_cast<double>(domain), s.at(rel).arity);
    for (int k = 0; k <= slots; ++k) {
        lim.maxTuples = k;
        if (estimateDatabaseCount(s, domain, mult, lim) > static_cast<double>(cap)) return r;
        enumerateDatabases(
            s, domain, mult, deps,
            [&](const BagDatabase& d) {
                if (static_cast<int>(d.distinctTuples()) < k) return true; // seen in an earlier round
                ++r.examined;
                if (differs(d)) {
                    r.witness = d;
                    return false;
                }
                return true;
            },
            lim);
        if (r.witness) return r;
    }
    r.complete = true;
    return r;
}

} // namespace

SearchResult searchCounterexample(const Query& q1, const Query& q2, Semantics sem,
                                  const std::vector<Dependency>& deps, const Schema& s, const SearchBounds& b,
                                  ChaseBudget budget) {
    if (q1.head.args.size() != q2.head.args.size()) throw HeadArityMismatch(q1.head.args.size(), q2.head.args.size());
    SearchResult r;
    auto differs = [&](const BagDatabase& d) { return answersDiffer(q1, q2, sem, d); };
    if (b.seeds) {
        ChaseEngine engine(s, deps, budget);
        for (const BagDatabase& d : seedDatabases(q1, q2, sem, engine, deps, b)) {
            ++r.examined;
            if (differs(d)) {
                r.witness = d;
                return r;
            }
        }
    }
    int mult = sem == Semantics::Bag ? b.maxMult : 1;
    return exhaustive(s, b.domainSize, mult, deps, relevantRelations({&q1, &q2}, deps, s), b.cap, differs, r);
}

SearchResult searchAggregateCounterexample(const AggregateQuery& a1, const AggregateQuery& a2,
                                           const std::vector<Dependency>& deps, const Schema& s,
                                           const SearchBounds& b, ChaseBudget budget) {
    checkCompatible(a1, a2);
    SearchResult r;
    auto differs = [&](const BagDatabase& d) { return aggregateAnswersDiffer(a1, a2, d); };
    if (b.seeds) {
        ChaseEngine engine(s, deps, budget);
        SearchBounds setOnly = b;
        setOnly.maxMult = 1;
        for (const BagDatabase& d : seedDatabases(a1.core, a2.core, aggregateCoreSemantics(a1.fn), engine, deps,
                                                  setOnly)) {
            ++r.examined;
            if (differs(d)) {
                r.witness = d;
                return r;
            }
        }
    }
    return exhaustive(s, b.domainSize, 1, deps, relevantRelations({&a1.core, &a2.core}, deps, s), b.cap, differs, r);
}

BagCounterexample buildBagCounterexample(const Query& q1, const Query& q2, const Schema& s) {
    Query d1 = dedupSetEnforced(q1, s), d2 = dedupSetEnforced(q2, s);
    if (d1.head.args.size() != d2.head.args.size()) throw HeadArityMismatch(d1.head.args.size(), d2.head.args.size());
    if (!bagSetEquivalent(d1, d2)) throw HypothesesNotMet("the queries are not bag-set equivalent");
    std::map<std::string, long long> c1, c2;
    for (const Atom& a : d1.body) ++c1[a.relation];
    for (const Atom& a : d2.body) ++c2[a.relation];
    std::string rel;
    for (const std::string& r : s.order) {
        if (s.isSetEnforced(r)) continue;
        if (c1[r] != c2[r]) {
            rel = r;
            break;
        }
    }
    if (rel.empty()) throw HypothesesNotMet("no relation without set enforcement has differing atom counts");
    BagCounterexample out;
    out.relation = rel;
    const Query* big = &d1;
    const Query* small = &d2;
    if (c2[rel] > c1[rel]) {
        std::swap(big, small);
        out.swapped = true;
    }
    long long n1 = 0, n2 = 0;
    for (const Atom& a : big->body) n1 += a.relation == rel;
    for (const Atom& a : small->body) n2 += a.relation == rel;
    out.n1 = n1;
    out.n2 = n2;
    out.n3 = static_cast<long long>(small->body.size());
    out.n4 = static_cast<long long>(big->body.size()) - n1;
    long double bound = std::pow(static_cast<long double>(n1), 2 * n2);
    if (out.n3 > n2) bound *= std::pow(static_cast<long double>(out.n4), out.n3 - n2);
    if (bound > 1e12L) throw ResourceBound("replication factor too large: " + std::to_string(static_cast<double>(bound)));
    out.mStar = 1 + static_cast<long long>(std::llround(bound));
    out.db = canonicalDatabase(canonicalRepresentation(*big));
    auto it = out.db.relations.find(rel);
    if (it != out.db.relations.end())
        for (auto& [t, m] : it->second) m = out.mStar;
    return out;
}

std::string printVerdictMachine(const EquivVerdict& v, const std::string& witnessFile) {
    std::string out = "EQUIV " + v.semantics + " " + (v.equivalent ? "yes" : "no");
    if (!witnessFile.empty()) out += " witness=" + witnessFile;
    return out;
}

} // namespace chasekit
