#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "chasekit/mappings.hpp"
#include "chasekit/text_io.hpp"
#include "support/fixtures.hpp"

using namespace chasekit;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(CHASEKIT_BIN) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return fixture::dataPath(name); }

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "chasekit-cli-test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string firstLine(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST_CASE("chase prints the sound chase result") {
    Document motivating = fixture::load("motivating.cqd");
    Run r = run("chase --sem B --query Q4 --machine " + data("motivating.cqd"));
    CHECK(r.code == 0);
    Query q = parseQuery(firstLine(r.out), motivating.schema);
    CHECK(q.head.relation == "Q4");
    CHECK(isomorphic(q, motivating.queries.at("Q3")));

    Run t = run("chase --sem B --query Q4 --machine --trace --ledger " + data("motivating.cqd"));
    CHECK(t.out.find("\nstep 1 sigma1.1 ") != std::string::npos);
    CHECK(t.out.find("state sigma4.1 unsoundly-applicable not-assignment-fixing") != std::string::npos);

    Run text = run("chase --sem S --query Q4 " + data("motivating.cqd"));
    CHECK(text.code == 0);
    CHECK(text.out.find("result: ") != std::string::npos);
}

TEST_CASE("input errors exit with 1") {
    auto bad = scratch("bad.cqd");
    std::ofstream(bad) << "schema { relation p/2 }\nquery Q { Q(X) :- p(X). }\n";
    Run r = run("chase " + bad.string() + " 2>&1");
    CHECK(r.code == 1);
    CHECK(run("chase " + data("cyclic.cqd")).code == 1);
    CHECK(run("chase --query Nope " + data("motivating.cqd")).code == 1);
    CHECK(run("chase --sem X " + data("motivating.cqd")).code == 1);
    CHECK(run("frobnicate").code == 1);
}

TEST_CASE("budgets exit with 2") {
    CHECK(run("chase --force --budget-steps 50 " + data("cyclic.cqd")).code == 2);
    CHECK(run("chase --budget-steps 1 --query Q4 " + data("motivating.cqd")).code == 2);
    CHECK(run("chase --query Q4 " + data("motivating.cqd")).code == 0);
}

TEST_CASE("budget from the environment") {
    std::string cmd = "CHASEKIT_BUDGET_STEPS=1 " + std::string(CHASEKIT_BIN) + " chase --query Q4 " + data("motivating.cqd") +
                      " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
}

TEST_CASE("equivalence verdicts and witnesses") {
    CHECK(run("equiv --sem S --query Q1 --query2 Q4 " + data("motivating.cqd")).code == 0);
    CHECK(run("equiv --sem B --query Q4 --query2 Q4 " + data("motivating.cqd")).code == 0);
    auto w = scratch("witness.cqd");
    std::filesystem::remove(w);
    Run r = run("equiv --sem B --query Q1 --query2 Q4 --machine --witness " + w.string() + " " + data("motivating.cqd"));
    CHECK(r.code == 3);
    CHECK(firstLine(r.out) == "EQUIV B no witness=" + w.string());
    REQUIRE(std::filesystem::exists(w));
    Document doc = loadDocument(w.string());
    REQUIRE(doc.databases.count("witness") == 1);

    Run v = run("equiv --sem BS --query Q1 --query2 Q4 --verify " + data("motivating.cqd"));
    CHECK(v.code == 3);
    CHECK(v.out.find("counterexample:") != std::string::npos);
    CHECK(run("equiv --sem BS --query Q2 --query2 Q4 --machine " + data("motivating.cqd")).out == "EQUIV BS yes\n");
}

TEST_CASE("aggregate equivalence from the command line") {
    CHECK(run("equiv --query SumQ4 --query2 SumQ2 " + data("aggregates.cqd")).code == 0);
    CHECK(run("equiv --query SumQ4 --query2 SumQ1 --verify " + data("aggregates.cqd")).code == 3);
    CHECK(run("equiv --query MaxQ4 --query2 MaxQ1 " + data("aggregates.cqd")).code == 0);
    CHECK(run("equiv --query SumQ4 --query2 MaxQ4 " + data("aggregates.cqd")).code == 1);
    CHECK(run("equiv --agg max --query Q4 --query2 Q1 " + data("motivating.cqd")).code == 0);
    CHECK(run("equiv --agg sum --query Q4 --query2 Q1 " + data("motivating.cqd")).code == 3);
}

TEST_CASE("reformulate") {
    Document motivating = fixture::load("motivating.cqd");
    for (const char* sem : {"S", "B", "BS"}) {
        Run r = run(std::string("reformulate --machine --sem ") + sem + " --query Q1 " + data("motivating.cqd"));
        CHECK(r.code == 0);
        bool found = false;
        std::istringstream lines(r.out);
        for (std::string line; std::getline(lines, line);) {
            Query q = parseQuery(line, motivating.schema);
            q.head.relation = "Q4";
            if (isomorphic(q, motivating.queries.at("Q4"))) found = true;
        }
        CHECK(found == (std::string(sem) == "S"));
    }
    Run q4 = run("reformulate --machine --sem B --query Q4 --jobs 2 " + data("motivating.cqd"));
    CHECK(q4.out == "Q4(X) :- p(X,Y).\n");
    auto min = scratch("min.cqd");
    std::ofstream(min) << "schema { relation e/2 }\nquery Q { Q(X) :- e(X,Y), e(X,Z). }\n";
    CHECK(run("reformulate --machine " + min.string()).out == "Q(X) :- e(X,Y).\n");
}

TEST_CASE("sigma-max and check") {
    Run r = run("sigma-max --machine --sem B --query Q4 " + data("motivating.cqd"));
    CHECK(r.code == 0);
    CHECK(r.out.find("drop sigma4 not-assignment-fixing") != std::string::npos);
    Run u = run("sigma-max --machine --sem BS --query Q4 " + data("motivating.cqd"));
    CHECK(u.out.find("keep sigma3") != std::string::npos);
    Run c = run("check " + data("motivating.cqd"));
    CHECK(c.code == 0);
    CHECK(c.out.find("weakly acyclic: yes") != std::string::npos);
    CHECK(c.out.find("sigma4.1") != std::string::npos);
    CHECK(run("check " + data("cyclic.cqd")).out.find("weakly acyclic: no") != std::string::npos);
}

TEST_CASE("eval") {
    Run r = run("eval --sem B --query Q1 --db D " + data("motivating.cqd"));
    CHECK(r.code == 0);
    CHECK(r.out.find("{{ (1), (1) }}") != std::string::npos);
}

TEST_CASE("config files sit under the flags") {
    auto cfg = scratch("run.ini");
    std::ofstream(cfg) << "sem=B\nquery=Q4\n";
    Run r = run("--config " + cfg.string() + " chase --machine " + data("motivating.cqd"));
    Run direct = run("chase --machine --sem B --query Q4 " + data("motivating.cqd"));
    CHECK(r.out == direct.out);
    Run over = run("--config " + cfg.string() + " chase --machine --sem BS " + data("motivating.cqd"));
    CHECK(over.out == run("chase --machine --sem BS --query Q4 " + data("motivating.cqd")).out);
}

TEST_CASE("deterministic output") {
    std::string args = "reformulate --machine --sem S --query Q1 --jobs 4 " + data("motivating.cqd");
    CHECK(run(args).out == run(args).out);
}
