#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chasekit/errors.hpp"
#include "chasekit/mappings.hpp"
#include "chasekit/model.hpp"

namespace chasekit {

struct ChaseBudget {
    std::size_t maxSteps = 10'000;
    std::size_t maxAtoms = 100'000; // atoms added over the run
};

struct ChaseStep {
    std::size_t index = 0;
    std::string dependencyId;
    Homomorphism hom;
    std::vector<Atom> added;                      // tgd
    std::optional<std::pair<Term, Term>> replaced; // egd: first replaced by second
};

enum class DependencyState { PreApplicable, PostApplicable, SoundlyApplicable, UnsoundlyApplicable };
enum class UnsoundReason { NotAssignmentFixing, NotSetValued };

std::string_view stateName(DependencyState s);
std::string_view reasonName(UnsoundReason r);

struct ChaseOutcome {
    Query result;
    std::vector<ChaseStep> trace;
    Semantics semantics = Semantics::Set;
    std::vector<Dependency> dependencies;             // the regularized set that was used
    std::map<std::string, DependencyState> ledger;    // by regularized id
    std::map<std::string, UnsoundReason> unsoundReason; // for unsoundly-applicable entries
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& msg, Query partial, std::vector<ChaseStep> trace)
        : Error(msg), partial_(std::move(partial)), trace_(std::move(trace)) {}
    const Query& partial() const { return partial_; }
    const std::vector<ChaseStep>& trace() const { return trace_; }

private:
    Query partial_;
    std::vector<ChaseStep> trace_;
};

// True when h extends to a homomorphism of premise ∧ conclusion into the body.
bool tgdSatisfiedAt(const std::vector<Atom>& body, const Dependency& tgd, const Homomorphism& h);

Query tgdStep(const Query& q, const Dependency& tgd, const Homomorphism& h, std::vector<Atom>* added = nullptr);
Query egdStep(const Query& q, const Dependency& egd, const Homomorphism& h, Semantics sem, const Schema& s,
              std::optional<std::pair<Term, Term>>* replaced = nullptr);

struct TestQuery {
    Query query;
    std::vector<Term> copyOne; // images of the existentials in the first copy
    std::vector<Term> copyTwo; // theta-renamed images, same order
};

TestQuery associatedTestQuery(const Query& q, const Dependency& tgd, const Homomorphism& h);

// Holds the dependency set (regularized on construction) and the memo for the
// assignment-fixing test. One engine per thread.
class ChaseEngine {
public:
    ChaseEngine(const Schema& s, const std::vector<Dependency>& deps, ChaseBudget budget = {});

    const std::vector<Dependency>& dependencies() const { return deps_; }
    const Schema& schema() const { return schema_; }
    const ChaseBudget& budget() const { return budget_; }

    ChaseOutcome chaseSet(const Query& q);
    ChaseOutcome soundChase(Semantics sem, const Query& q);

    // Runs the set chase of the associated test query; also reports that body.
    bool isAssignmentFixing(const Query& q, const Dependency& tgd, const Homomorphism& h,
                            Query* terminalTestBody = nullptr);
    // nullopt when the step is sound; sem is Bag or BagSet
    std::optional<UnsoundReason> unsoundReason(const Query& q, const Dependency& dep, const Homomorphism& h,
                                               Semantics sem);
    bool soundChaseStepAllowed(const Query& q, const Dependency& dep, const Homomorphism& h, Semantics sem);

    std::size_t memoHits() const { return memoHits_; }

private:
    ChaseOutcome run(const Query& q, Semantics sem, std::vector<Term>* tracked);

    Schema schema_;
    std::vector<Dependency> deps_;
    ChaseBudget budget_;
    std::map<std::string, bool> fixingMemo_;
    std::size_t memoHits_ = 0;
};

ChaseOutcome chaseSet(const Query& q, const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget = {});
ChaseOutcome soundChase(Semantics sem, const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                        ChaseBudget budget = {});
bool isAssignmentFixing(const Query& q, const Dependency& tgd, const Homomorphism& h,
                        const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget = {});
bool soundChaseStepAllowed(const Query& q, const Dependency& dep, const Homomorphism& h, Semantics sem,
                           const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget = {});
bool isKeyBasedTgd(const Dependency& tgd, const Schema& s);

std::string printChaseStep(const ChaseStep& step);

} // namespace chasekit
