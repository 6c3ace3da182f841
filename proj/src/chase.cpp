#include "chasekit/chase.hpp"

#include <algorithm>
#include <set>

#include "chasekit/constraints.hpp"
#include "chasekit/text_io.hpp"

namespace chasekit {

std::string_view stateName(DependencyState s) {
    switch (s) {
    case DependencyState::PreApplicable: return "pre-applicable";
    case DependencyState::PostApplicable: return "post-applicable";
    case DependencyState::SoundlyApplicable: return "soundly-applicable";
    case DependencyState::UnsoundlyApplicable: return "unsoundly-applicable";
    }
    return "?";
}

std::string_view reasonName(UnsoundReason r) {
    switch (r) {
    case UnsoundReason::NotAssignmentFixing: return "not-assignment-fixing";
    case UnsoundReason::NotSetValued: return "not-set-valued";
    }
    return "?";
}

namespace {

Substitution premiseAnchor(const Dependency& d, const Homomorphism& h) {
    Substitution a;
    for (const Term& v : variablesOf(d.premise)) a[v] = h.apply(v);
    return a;
}

} // namespace

bool tgdSatisfiedAt(const std::vector<Atom>& body, const Dependency& tgd, const Homomorphism& h) {
    return findHomomorphism(tgd.conclusion, body, premiseAnchor(tgd, h)).has_value();
}

Query tgdStep(const Query& q, const Dependency& tgd, const Homomorphism& h, std::vector<Atom>* added) {
    if (!tgd.isTgd()) throw NotApplicable("'" + tgd.id + "' is not a tgd");
    if (!findHomomorphism(tgd.premise, q.body, premiseAnchor(tgd, h)))
        throw NotApplicable("premise of '" + tgd.id + "' does not map into the query under the given homomorphism");
    if (tgdSatisfiedAt(q.body, tgd, h)) throw NotApplicable("'" + tgd.id + "' is already satisfied");
    Substitution s = premiseAnchor(tgd, h);
    for (const Term& z : tgd.existentials) s[z] = freshVariable(z.text);
    Query out = q;
    std::vector<Atom> atoms = substitute(s, tgd.conclusion);
    for (const Atom& a : atoms) out.body.push_back(a);
    if (added) *added = std::move(atoms);
    return out;
}

Query egdStep(const Query& q, const Dependency& egd, const Homomorphism& h, Semantics sem, const Schema& s,
              std::optional<std::pair<Term, Term>>* replaced) {
    if (!egd.isEgd()) throw NotApplicable("'" + egd.id + "' is not an egd");
    if (!findHomomorphism(egd.premise, q.body, premiseAnchor(egd, h)))
        throw NotApplicable("premise of '" + egd.id + "' does not map into the query under the given homomorphism");
    Term a = h.apply(egd.left), b = h.apply(egd.right);
    if (a == b) throw NotApplicable("'" + egd.id + "' equates a term with itself");
    if (a.isConstant() && b.isConstant())
        throw ChaseFailure("'" + egd.id + "' equates distinct constants " + printTerm(a) + " and " + printTerm(b));
    // keep constants, then user variables; otherwise the first term gives way
    Term from = a, to = b;
    if (a.isConstant() || (b.isVariable() && b.isFresh() && !a.isFresh())) std::swap(from, to);
    Query out = substitute(Substitution{{from, to}}, q);
    out = sem == Semantics::Bag ? dedupSetEnforced(out, s) : canonicalRepresentation(out);
    if (replaced) *replaced = std::make_pair(from, to);
    return out;
}

TestQuery associatedTestQuery(const Query& q, const Dependency& tgd, const Homomorphism& h) {
    if (!tgd.isTgd()) throw NotApplicable("'" + tgd.id + "' is not a tgd");
    if (tgdSatisfiedAt(q.body, tgd, h)) throw NotApplicable("'" + tgd.id + "' is already satisfied");
    TestQuery t;
    t.query = q;
    Substitution one = premiseAnchor(tgd, h), two = one;
    for (const Term& z : tgd.existentials) {
        one[z] = freshVariable(z.text);
        two[z] = freshVariable(z.text);
        t.copyOne.push_back(one[z]);
        t.copyTwo.push_back(two[z]);
    }
    for (const Atom& a : substitute(one, tgd.conclusion)) t.query.body.push_back(a);
    if (tgd.existentials.empty()) {
        t.query = canonicalRepresentation(t.query);
        return t;
    }
    for (const Atom& a : substitute(two, tgd.conclusion)) t.query.body.push_back(a);
    return t;
}

// ---- engine ----

ChaseEngine::ChaseEngine(const Schema& s, const std::vector<Dependency>& deps, ChaseBudget budget)
    : schema_(s), deps_(regularizeSet(deps)), budget_(budget) {}

ChaseOutcome ChaseEngine::chaseSet(const Query& q) { return run(q, Semantics::Set, nullptr); }

ChaseOutcome ChaseEngine::soundChase(Semantics sem, const Query& q) { return run(q, sem, nullptr); }

bool ChaseEngine::isAssignmentFixing(const Query& q, const Dependency& tgd, const Homomorphism& h,
                                     Query* terminalTestBody) {
    std::string key;
    if (!terminalTestBody) {
        key = printQuery(q, PrintOptions{false}) + "|" + tgd.id + "|";
        for (const Term& v : variablesOf(tgd.premise)) key += printTerm(h.apply(v)) + ",";
        auto it = fixingMemo_.find(key);
        if (it != fixingMemo_.end()) {
            ++memoHits_;
            return it->second;
        }
    }
    TestQuery t = associatedTestQuery(q, tgd, h);
    std::vector<Term> tracked = t.copyOne;
    tracked.insert(tracked.end(), t.copyTwo.begin(), t.copyTwo.end());
    ChaseOutcome o = run(t.query, Semantics::Set, &tracked);
    bool fixing = true;
    std::size_t n = t.copyOne.size();
    for (std::size_t i = 0; i < n; ++i)
        if (tracked[i] != tracked[i + n]) fixing = false;
    if (terminalTestBody) *terminalTestBody = o.result;
    else fixingMemo_[key] = fixing;
    return fixing;
}

std::optional<UnsoundReason> ChaseEngine::unsoundReason(const Query& q, const Dependency& dep, const Homomorphism& h,
                                                        Semantics sem) {
    if (dep.isEgd() || sem == Semantics::Set) return std::nullopt;
    if (!isAssignmentFixing(q, dep, h)) return UnsoundReason::NotAssignmentFixing;
    if (sem == Semantics::Bag)
        for (const Atom& a : dep.conclusion)
            if (!schema_.isSetEnforced(a.relation)) return UnsoundReason::NotSetValued;
    return std::nullopt;
}

bool ChaseEngine::soundChaseStepAllowed(const Query& q, const Dependency& dep, const Homomorphism& h, Semantics sem) {
    if (dep.isEgd() || sem == Semantics::Set) return true;
    if (sem == Semantics::Bag)
        for (const Atom& a : dep.conclusion)
            if (!schema_.isSetEnforced(a.relation)) return false;
    return isAssignmentFixing(q, dep, h);
}

ChaseOutcome ChaseEngine::run(const Query& q, Semantics sem, std::vector<Term>* tracked) {
    ChaseOutcome out;
    out.semantics = sem;
    out.dependencies = deps_;
    Query cur = sem == Semantics::Bag ? q : canonicalRepresentation(q);
    std::size_t atomsAdded = 0;
    for (;;) {
        const Dependency* chosen = nullptr;
        Homomorphism hom;
        for (const Dependency& d : deps_) {
            forEachHomomorphism(d.premise, cur.body, {}, [&](const Homomorphism& h) {
                if (d.isEgd()) {
                    if (h.apply(d.left) == h.apply(d.right)) return true;
                } else {
                    if (tgdSatisfiedAt(cur.body, d, h)) return true;
                    if (!soundChaseStepAllowed(cur, d, h, sem)) return true;
                }
                chosen = &d;
                hom = h;
                return false;
            });
            if (chosen) break;
        }
        if (!chosen) break;
        if (out.trace.size() >= budget_.maxSteps)
            throw BudgetExceeded("chase exceeded " + std::to_string(budget_.maxSteps) + " steps", cur,
                                 std::move(out.trace));
        ChaseStep st;
        st.index = out.trace.size() + 1;
        st.dependencyId = chosen->id;
        st.hom = hom;
        if (chosen->isTgd()) {
            cur = tgdStep(cur, *chosen, hom, &st.added);
            atomsAdded += st.added.size();
            if (atomsAdded > budget_.maxAtoms)
                throw BudgetExceeded("chase exceeded " + std::to_string(budget_.maxAtoms) + " generated atoms", cur,
                                     std::move(out.trace));
        } else {
            cur = egdStep(cur, *chosen, hom, sem, schema_, &st.replaced);
            if (tracked)
                for (Term& t : *tracked)
                    if (t == st.replaced->first) t = st.replaced->second;
        }
        out.trace.push_back(std::move(st));
    }
    // set-semantics results are only fixed up to equivalence; the core pins them down up to renaming
    if (sem == Semantics::Set && !tracked) cur = minimizeQuery(cur);
    out.result = cur;
    // classify every dependency against the terminal query
    for (const Dependency& d : deps_) {
        bool matched = false;
        std::optional<UnsoundReason> reason;
        forEachHomomorphism(d.premise, cur.body, {}, [&](const Homomorphism& h) {
            matched = true;
            if (d.isTgd() && !tgdSatisfiedAt(cur.body, d, h)) {
                reason = unsoundReason(cur, d, h, sem);
                if (!reason) reason = UnsoundReason::NotAssignmentFixing; // unreachable at a fixpoint
                return false;
            }
            return true;
        });
        if (reason) {
            out.ledger[d.id] = DependencyState::UnsoundlyApplicable;
            out.unsoundReason[d.id] = *reason;
        } else {
            out.ledger[d.id] = matched ? DependencyState::PostApplicable : DependencyState::PreApplicable;
        }
    }
    return out;
}

// ---- free functions ----

ChaseOutcome chaseSet(const Query& q, const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget) {
    return ChaseEngine(s, deps, budget).chaseSet(q);
}

ChaseOutcome soundChase(Semantics sem, const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                        ChaseBudget budget) {
    return ChaseEngine(s, deps, budget).soundChase(sem, q);
}

bool isAssignmentFixing(const Query& q, const Dependency& tgd, const Homomorphism& h,
                        const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget) {
    return ChaseEngine(s, deps, budget).isAssignmentFixing(q, tgd, h);
}

bool soundChaseStepAllowed(const Query& q, const Dependency& dep, const Homomorphism& h, Semantics sem,
                           const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget) {
    return ChaseEngine(s, deps, budget).soundChaseStepAllowed(q, dep, h, sem);
}

bool isKeyBasedTgd(const Dependency& tgd, const Schema& s) {
    if (!tgd.isTgd()) return false;
    std::set<Term> bound;
    for (const Term& v : variablesOf(tgd.premise)) bound.insert(v);
    for (const Atom& a : tgd.conclusion) {
        if (!s.isSetEnforced(a.relation)) return false;
        std::set<int> positions;
        for (std::size_t p = 0; p < a.args.size(); ++p)
            if (a.args[p].isConstant() || bound.count(a.args[p])) positions.insert(static_cast<int>(p) + 1);
        if (positions.empty() || !isSuperkey(s, a.relation, positions)) return false;
    }
    return true;
}

std::string printChaseStep(const ChaseStep& st) {
    std::string out = std::to_string(st.index) + " " + st.dependencyId + " [";
    bool first = true;
    for (const auto& [k, v] : st.hom.map) {
        if (!first) out += ", ";
        first = false;
        out += printTerm(k) + "->" + printTerm(v);
    }
    out += "]";
    if (st.replaced) return out + " replace " + printTerm(st.replaced->first) + " by " + printTerm(st.replaced->second);
    out += " add";
    for (std::size_t i = 0; i < st.added.size(); ++i) out += (i ? ", " : " ") + printAtom(st.added[i]);
    return out;
}

} // namespace chasekit
