#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "chasekit/chase.hpp"
#include "chasekit/constraints.hpp"
#include "chasekit/equivalence.hpp"
#include "chasekit/evaluator.hpp"
#include "chasekit/mappings.hpp"
#include "chasekit/reformulate.hpp"
#include "chasekit/sigma_max.hpp"
#include "chasekit/text_io.hpp"

using namespace chasekit;

namespace {

enum Exit { Ok = 0, InputError = 1, BudgetError = 2, NotEquivalent = 3 };

struct Config {
    std::string file;
    std::string sem = "S";
    std::string query, query2, agg, db;
    std::size_t budgetSteps = 10'000;
    std::size_t budgetAtoms = 100'000;
    int domain = 3;
    int mult = 2;
    std::uint64_t searchCap = 2'000'000;
    bool trace = false, ledger = false, verify = false, machine = false, force = false;
    bool emitAll = false;
    unsigned jobs = 1;
    std::string witness;
};

struct Loaded {
    Document doc;
    std::vector<Dependency> deps; // declared ones plus schema fds not already declared
};

Loaded load(const Config& c) {
    Loaded l;
    l.doc = loadDocument(c.file);
    l.deps = l.doc.dependencies;
    for (const Dependency& fd : fdEgds(l.doc.schema)) {
        bool present = std::any_of(l.deps.begin(), l.deps.end(),
                                   [&](const Dependency& d) { return sameDependencyShape(d, fd); });
        if (!present) l.deps.push_back(fd);
    }
    return l;
}

void requireTermination(const Loaded& l, const Config& c) {
    if (c.force || isWeaklyAcyclic(l.deps, l.doc.schema)) return;
    throw ValidationError("the dependencies are not weakly acyclic, so the chase may not terminate; "
                          "rerun with --force to chase under the step budget");
}

ChaseBudget budgetOf(const Config& c) { return ChaseBudget{c.budgetSteps, c.budgetAtoms}; }

using Named = std::variant<Query, AggregateQuery>;

AggregateQuery wrap(const Query& q, const std::string& fnName) {
    AggFn fn = *aggFnFromName(fnName); // validated by the option check
    std::vector<Term> grouping = q.head.args;
    std::optional<Term> arg;
    if (fn != AggFn::Count) {
        if (grouping.empty() || !grouping.back().isVariable())
            throw ValidationError("--agg " + fnName + " needs a variable as the last head argument of " + q.head.relation);
        arg = grouping.back();
        grouping.pop_back();
    }
    return makeAggregate(q.head.relation, grouping, fn, arg, q.body);
}

Named lookup(const Loaded& l, const std::string& name, const std::string& agg) {
    const Document& d = l.doc;
    std::string n = name;
    if (n.empty()) {
        if (d.queryOrder.empty()) throw ValidationError("the input declares no queries");
        n = d.queryOrder.front();
    }
    if (auto it = d.queries.find(n); it != d.queries.end()) {
        if (!agg.empty()) return wrap(it->second, agg);
        return it->second;
    }
    if (auto it = d.aggregates.find(n); it != d.aggregates.end()) return it->second;
    throw ValidationError("no query named '" + n + "'");
}

Query plainOrCore(const Named& q) {
    if (auto p = std::get_if<Query>(&q)) return *p;
    return std::get<AggregateQuery>(q).core;
}

Semantics semOf(const Config& c) { return *semanticsFromName(c.sem); }

std::string documentFor(const Schema& s, const BagDatabase& d, const std::string& name) {
    std::string out = "schema {\n";
    std::string body = printSchema(s);
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t nl = body.find('\n', pos);
        out += "  " + body.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
    }
    out += "}\n\ndatabase " + name + " {\n";
    std::string db = printDatabase(d, &s);
    pos = 0;
    while (pos < db.size()) {
        std::size_t nl = db.find('\n', pos);
        out += "  " + db.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
    }
    return out + "}\n";
}

// ---- subcommands ----

int cmdChase(const Config& c) {
    Loaded l = load(c);
    requireTermination(l, c);
    Query q = plainOrCore(lookup(l, c.query, c.agg));
    ChaseEngine engine(l.doc.schema, l.deps, budgetOf(c));
    ChaseOutcome o = engine.soundChase(semOf(c), q);
    if (c.machine) {
        std::cout << printQuery(o.result) << "\n";
        if (c.trace)
            for (const ChaseStep& st : o.trace) std::cout << "step " << printChaseStep(st) << "\n";
        if (c.ledger)
            for (const Dependency& d : o.dependencies) {
                std::cout << "state " << d.id << " " << stateName(o.ledger.at(d.id));
                if (o.unsoundReason.count(d.id)) std::cout << " " << reasonName(o.unsoundReason.at(d.id));
                std::cout << "\n";
            }
        return Ok;
    }
    std::cout << "semantics: " << semanticsName(o.semantics) << "\n";
    std::cout << "input:  " << printQuery(q) << "\n";
    std::cout << "result: " << printQuery(o.result) << "\n";
    std::cout << "steps:  " << o.trace.size() << "\n";
    if (c.trace) {
        std::cout << "trace:\n";
        for (const ChaseStep& st : o.trace) std::cout << "  " << printChaseStep(st) << "\n";
    }
    if (c.ledger) {
        std::cout << "ledger:\n";
        for (const Dependency& d : o.dependencies) {
            std::cout << "  " << d.id << ": " << stateName(o.ledger.at(d.id));
            if (o.unsoundReason.count(d.id)) std::cout << " (" << reasonName(o.unsoundReason.at(d.id)) << ")";
            std::cout << "\n";
        }
    }
    return Ok;
}

int cmdEquiv(const Config& c) {
    Loaded l = load(c);
    requireTermination(l, c);
    if (c.query.empty() || c.query2.empty()) throw ValidationError("equiv needs --query and --query2");
    Named a = lookup(l, c.query, c.agg);
    Named b = lookup(l, c.query2, c.agg);
    bool aggregate = std::holds_alternative<AggregateQuery>(a) || std::holds_alternative<AggregateQuery>(b);
    if (aggregate && (!std::holds_alternative<AggregateQuery>(a) || !std::holds_alternative<AggregateQuery>(b)))
        throw IncompatibleAggregates("cannot compare an aggregate query with a plain one (use --agg)");
    const Schema& s = l.doc.schema;
    EquivVerdict v;
    std::optional<SearchResult> search;
    SearchBounds bounds{c.domain, c.mult, c.searchCap, true};
    if (aggregate) {
        const auto& x = std::get<AggregateQuery>(a);
        const auto& y = std::get<AggregateQuery>(b);
        v = equivAggregateUnderSigma(x, y, l.deps, s, budgetOf(c));
        if (c.verify || (!v.equivalent && !c.witness.empty())) {
            search = searchAggregateCounterexample(x, y, l.deps, s, bounds, budgetOf(c));
            if (search->witness) {
                v.counterexample = search->witness;
                v.answerDiff = x.core.head.relation + ": " + printAnswerSet(evalAggregate(x, *search->witness)) + "\n" +
                               y.core.head.relation + ": " + printAnswerSet(evalAggregate(y, *search->witness)) + "\n";
            }
        }
    } else {
        const Query& x = std::get<Query>(a);
        const Query& y = std::get<Query>(b);
        v = equivUnderSigma(semOf(c), x, y, l.deps, s, budgetOf(c));
        if (c.verify || (!v.equivalent && !c.witness.empty())) {
            search = searchCounterexample(x, y, semOf(c), l.deps, s, bounds, budgetOf(c));
            if (search->witness) {
                v.counterexample = search->witness;
                v.answerDiff = renderAnswers(x, y, semOf(c), *search->witness);
            }
        }
    }
    std::string witnessFile;
    if (v.counterexample && !c.witness.empty()) {
        std::ofstream out(c.witness);
        if (!out) throw Error("cannot write '" + c.witness + "'");
        out << documentFor(s, *v.counterexample, "witness");
        witnessFile = c.witness;
    }
    // a witness against a positive verdict is a contradiction; a missing one is only a bound
    bool disagree = search && v.equivalent && search->witness;
    if (c.machine) {
        std::cout << printVerdictMachine(v, witnessFile) << "\n";
    } else {
        std::cout << (v.equivalent ? "equivalent" : "not equivalent") << " under "
                  << (aggregate ? std::string("aggregate semantics") : "semantics " + v.semantics) << "\n";
        if (v.chaseResults) {
            std::cout << "chase of " << c.query << ": " << printQuery(v.chaseResults->first) << "\n";
            std::cout << "chase of " << c.query2 << ": " << printQuery(v.chaseResults->second) << "\n";
        }
        if (search) {
            std::cout << "search: " << search->examined << " databases examined"
                      << (search->complete ? " (all within bounds)" : " (bounded)") << "\n";
            if (v.counterexample) {
                std::cout << "counterexample:\n" << printDatabase(*v.counterexample, &s) << v.answerDiff;
                if (!witnessFile.empty()) std::cout << "written to " << witnessFile << "\n";
            } else {
                std::cout << "no counterexample found\n";
            }
        }
    }
    if (disagree) std::cerr << "warning: the search found a counterexample to a positive verdict\n";
    if (search && !v.equivalent && !search->witness)
        std::cerr << "note: no counterexample within the search bounds\n";
    return v.equivalent ? Ok : NotEquivalent;
}

int cmdReformulate(const Config& c) {
    Loaded l = load(c);
    requireTermination(l, c);
    Named n = lookup(l, c.query, c.agg);
    ReformulationOptions opt;
    opt.jobs = c.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : c.jobs;
    if (auto a = std::get_if<AggregateQuery>(&n)) {
        AggregateReformulationSet r = candbAggregate(*a, l.deps, l.doc.schema, budgetOf(c), opt);
        std::vector<AggregateQuery> shown = r.outputs;
        if (c.emitAll) {
            shown.clear();
            for (const Query& core : r.core.candidates) {
                AggregateQuery w;
                w.fn = a->fn;
                w.core = core;
                w.grouping.assign(core.head.args.begin(), core.head.args.begin() + static_cast<std::ptrdiff_t>(a->grouping.size()));
                if (a->aggArg) w.aggArg = core.head.args[a->grouping.size()];
                shown.push_back(w);
            }
        }
        if (!c.machine) {
            std::cout << "core semantics: " << semanticsName(r.coreSemantics) << "\n";
            std::cout << "universal plan: " << printQuery(r.core.universalPlan) << "\n";
            std::cout << (c.emitAll ? "candidates" : "reformulations") << ": " << shown.size() << "\n";
        }
        for (const AggregateQuery& o : shown) std::cout << (c.machine ? "" : "  ") << printAggregateQuery(o) << "\n";
        return Ok;
    }
    const Query& q = std::get<Query>(n);
    ReformulationSet r = candb(semOf(c), q, l.deps, l.doc.schema, budgetOf(c), opt);
    const std::vector<Query>& shown = c.emitAll ? r.candidates : r.outputs;
    if (!c.machine) {
        std::cout << "semantics: " << semanticsName(r.semantics) << "\n";
        std::cout << "universal plan: " << printQuery(r.universalPlan) << "\n";
        std::cout << (c.emitAll ? "candidates" : "reformulations") << ": " << shown.size() << "\n";
    }
    for (const Query& o : shown) std::cout << (c.machine ? "" : "  ") << printQuery(o) << "\n";
    return Ok;
}

int cmdSigmaMax(const Config& c) {
    Loaded l = load(c);
    requireTermination(l, c);
    Query q = plainOrCore(lookup(l, c.query, c.agg));
    Semantics sem = semOf(c);
    if (sem == Semantics::Set) sem = Semantics::Bag;
    SigmaMaxReport r = maxSigmaSubset(sem, q, l.deps, l.doc.schema, budgetOf(c));
    std::cout << (c.machine ? printSigmaMaxMachine(r) : printSigmaMaxText(r));
    return Ok;
}

int cmdCheck(const Config& c) {
    Loaded l = load(c);
    const Schema& s = l.doc.schema;
    bool wa = isWeaklyAcyclic(l.deps, s);
    if (c.machine) {
        std::cout << "weakly-acyclic " << (wa ? "yes" : "no") << "\n";
    } else {
        std::cout << "weakly acyclic: " << (wa ? "yes" : "no") << "\n";
    }
    for (const auto& e : cyclicSpecialEdges(l.deps, s)) {
        std::string edge = e.from.first + "." + std::to_string(e.from.second) + " => " + e.to.first + "." +
                           std::to_string(e.to.second);
        if (c.machine) std::cout << "cycle " << edge << " " << e.dependencyId << "\n";
        else std::cout << "  special edge on a cycle: " << edge << " (" << e.dependencyId << ")\n";
    }
    if (!c.machine) std::cout << "regularized dependencies:\n";
    for (const Dependency& d : regularizeSet(l.deps))
        std::cout << (c.machine ? "dep " : "  ") << printDependency(d) << "\n";
    if (!c.machine) std::cout << "keys:\n";
    for (const std::string& rel : s.order) {
        std::string line = c.machine ? "keys " + rel : "  " + rel + ":";
        for (const auto& k : keys(s, rel)) {
            line += " {";
            bool first = true;
            for (int p : k) {
                line += (first ? "" : ",") + std::to_string(p);
                first = false;
            }
            line += "}";
        }
        if (s.isSetEnforced(rel)) line += c.machine ? " set" : " (set valued)";
        std::cout << line << "\n";
    }
    if (!c.machine) std::cout << "key-based tgds:";
    bool any = false;
    for (const Dependency& d : regularizeSet(l.deps)) {
        if (!isKeyBasedTgd(d, s)) continue;
        std::cout << (c.machine ? "key-based " + d.id + "\n" : " " + d.id);
        any = true;
    }
    if (!c.machine) std::cout << (any ? "" : " (none)") << "\n";
    return Ok;
}

int cmdEval(const Config& c) {
    Loaded l = load(c);
    Named n = lookup(l, c.query, c.agg);
    const Document& d = l.doc;
    std::string dbName = c.db;
    if (dbName.empty()) {
        if (d.databases.empty()) throw ValidationError("the input declares no databases");
        dbName = d.databases.begin()->first;
    }
    auto it = d.databases.find(dbName);
    if (it == d.databases.end()) throw ValidationError("no database named '" + dbName + "'");
    const BagDatabase& db = it->second;
    if (!c.machine) std::cout << "satisfies dependencies: " << (satisfies(db, l.deps, d.schema) ? "yes" : "no") << "\n";
    if (auto a = std::get_if<AggregateQuery>(&n)) {
        std::cout << printAnswerSet(evalAggregate(*a, db)) << "\n";
        return Ok;
    }
    const Query& q = std::get<Query>(n);
    switch (semOf(c)) {
    case Semantics::Set: std::cout << printAnswerSet(evalSet(q, db)) << "\n"; break;
    case Semantics::Bag: std::cout << printAnswerBag(evalBag(q, db)) << "\n"; break;
    case Semantics::BagSet: std::cout << printAnswerBag(evalBagSet(q, db)) << "\n"; break;
    }
    return Ok;
}

// Plain `key=value` lines apply to whichever subcommand runs; [section] lines still work.
class FlatConfig : public CLI::ConfigINI {
public:
    explicit FlatConfig(std::string sub) : sub_(std::move(sub)) {}
    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        auto items = CLI::ConfigINI::from_config(in);
        for (auto& it : items)
            if (!sub_.empty() && (it.parents.empty() || (it.parents.size() == 1 && it.parents[0] == "default")))
                it.parents = {sub_};
        return items;
    }

private:
    std::string sub_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chasekit: equivalence and reformulation of conjunctive queries under dependencies"};
    app.set_config("--config", "", "key=value file merged under the command-line flags");
    app.require_subcommand(1);
    std::string subName;
    for (int i = 1; i < argc && subName.empty(); ++i)
        for (const char* n : {"chase", "equiv", "reformulate", "sigma-max", "check", "eval"})
            if (std::string_view(argv[i]) == n) subName = n;
    app.config_formatter(std::make_shared<FlatConfig>(subName));
    Config c;

    auto common = [&](CLI::App* sub, bool withSem) {
        sub->add_option("file", c.file, "input .cqd file")->required()->check(CLI::ExistingFile);
        if (withSem)
            sub->add_option("--sem", c.sem, "semantics: S, B or BS")
                ->check(CLI::IsMember({"S", "B", "BS"}))
                ->capture_default_str();
        sub->add_option("--query", c.query, "query name (default: first declared)");
        sub->add_option("--agg", c.agg, "wrap plain queries as aggregates")->check(CLI::IsMember({"sum", "count", "max", "min"}));
        sub->add_option("--budget-steps", c.budgetSteps, "chase step budget")
            ->envname("CHASEKIT_BUDGET_STEPS")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--budget-atoms", c.budgetAtoms, "budget on atoms added by a chase")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_flag("--machine", c.machine, "line-oriented output");
        sub->add_flag("--force", c.force, "chase even when the dependencies are not weakly acyclic");
    };

    CLI::App* chase = app.add_subcommand("chase", "chase a query under the selected semantics");
    common(chase, true);
    chase->add_flag("--trace", c.trace, "print every chase step");
    chase->add_flag("--ledger", c.ledger, "print the state of every dependency at the end");

    CLI::App* equiv = app.add_subcommand("equiv", "decide equivalence of two queries");
    common(equiv, true);
    equiv->add_option("--query2", c.query2, "second query name")->required();
    equiv->add_flag("--verify", c.verify, "cross-check with a bounded counterexample search");
    equiv->add_option("--domain", c.domain, "constants in searched databases")->check(CLI::PositiveNumber)->capture_default_str();
    equiv->add_option("--mult", c.mult, "maximum multiplicity under bag semantics")->check(CLI::PositiveNumber)->capture_default_str();
    equiv->add_option("--search-cap", c.searchCap, "maximum databases in the exhaustive phase")->capture_default_str();
    equiv->add_option("--witness", c.witness, "write a counterexample database to this file");

    CLI::App* reform = app.add_subcommand("reformulate", "minimal equivalent reformulations (chase and backchase)");
    common(reform, true);
    auto* all = reform->add_flag("--emit-all", c.emitAll, "print every accepted backchase candidate");
    reform->add_flag("--emit-minimal", [&](std::int64_t) { c.emitAll = false; }, "print only minimal outputs (default)")
        ->excludes(all);
    reform->add_option("--jobs", c.jobs, "worker threads, 0 = hardware concurrency")->capture_default_str();

    CLI::App* smax = app.add_subcommand("sigma-max", "largest subset of the dependencies the sound chase satisfies");
    common(smax, true);

    CLI::App* check = app.add_subcommand("check", "weak acyclicity, regularization and keys");
    check->add_option("file", c.file, "input .cqd file")->required()->check(CLI::ExistingFile);
    check->add_flag("--machine", c.machine, "line-oriented output");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a query on a database of the input");
    common(eval, true);
    eval->add_option("--db", c.db, "database name (default: first)");

    for (CLI::App* sub : {chase, equiv, reform, smax, check, eval}) sub->allow_config_extras(CLI::config_extras_mode::ignore);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : InputError;
    }

    try {
        if (smax->parsed() && c.sem == "S") c.sem = "B";
        if (chase->parsed()) return cmdChase(c);
        if (equiv->parsed()) return cmdEquiv(c);
        if (reform->parsed()) return cmdReformulate(c);
        if (smax->parsed()) return cmdSigmaMax(c);
        if (check->parsed()) return cmdCheck(c);
        if (eval->parsed()) return cmdEval(c);
    } catch (const ParseError& e) {
        std::cerr << formatError(e, c.file) << "\n";
        return InputError;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        std::cerr << "partial result after " << e.trace().size() << " steps: " << printQuery(e.partial()) << "\n";
        return BudgetError;
    } catch (const ResourceBound& e) {
        std::cerr << "resource bound: " << e.what() << "\n";
        return BudgetError;
    } catch (const ChaseFailure& e) {
        std::cerr << "chase failure: " << e.what() << "\n";
        return InputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return InputError;
    }
    return InputError;
}
