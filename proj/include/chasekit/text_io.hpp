#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chasekit/errors.hpp"
#include "chasekit/model.hpp"

namespace chasekit {

// Contents of one .cqd file. Sections:
//   schema { ... }  dependencies { ... }  query <name> { ... }  database <name> { ... }
struct Document {
    Schema schema;
    std::vector<Dependency> dependencies;
    std::map<std::string, Query> queries;
    std::map<std::string, AggregateQuery> aggregates;
    std::map<std::string, BagDatabase> databases;
    std::vector<std::string> queryOrder; // plain and aggregate, as declared
};

Schema parseSchema(std::string_view text);
Query parseQuery(std::string_view text, const Schema& s);
AggregateQuery parseAggregateQuery(std::string_view text, const Schema& s);
// `defaultId` is used when the text carries no `label:` prefix
Dependency parseDependency(std::string_view text, const Schema& s, const std::string& defaultId = "d1");
std::vector<Dependency> parseDependencies(std::string_view text, const Schema& s);
BagDatabase parseDatabase(std::string_view text, const Schema& s);
Document parseDocument(std::string_view text);
Document loadDocument(const std::string& path); // throws ParseError, or Error when unreadable

struct PrintOptions {
    // rename internal `_vN` variables to parseable names not used elsewhere
    bool renameFresh = true;
};

std::string printTerm(const Term& t);
std::string printAtom(const Atom& a);
std::string printQuery(const Query& q, const PrintOptions& opt = {});
std::string printAggregateQuery(const AggregateQuery& a, const PrintOptions& opt = {});
std::string printDependency(const Dependency& d, const PrintOptions& opt = {});
std::string printSchema(const Schema& s);
std::string printDatabase(const BagDatabase& d, const Schema* order = nullptr);
std::string printTuple(const Tuple& t);

// file:line:col: message
std::string formatError(const ParseError& e, std::string_view file);

} // namespace chasekit
