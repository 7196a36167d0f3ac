#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <string>

#include "doctest.h"
#include "graphacl/gradcheck.hpp"

using namespace graphacl;

TEST_CASE("default suite passes with headroom and covers every family") {
  GradCheckOptions opts;
  opts.instances = 12;  // the full 50+ run is the acceptance gate's job
  const GradCheckReport rep = run_gradcheck(opts);

  CHECK(rep.pass());
  CHECK(rep.max_rel_err <= opts.tolerance);
  CHECK(rep.instance_count == 12);
  CHECK(rep.checks.size() == 12 * 8);
  CHECK(rep.comparison_count > 1000);

  std::set<std::string> ops;
  for (const GradCheckEntry& e : rep.checks) {
    ops.insert(e.op);
    CHECK(e.comparisons > 0);
  }
  CHECK(ops == std::set<std::string>{"mi-bce", "dgi", "eq2", "eq3", "ce", "pairs-eq2",
                                     "pairs-eq18", "pairs-surrogate"});
}

TEST_CASE("deterministic per seed, robust across seeds") {
  GradCheckOptions opts;
  opts.instances = 6;
  const GradCheckReport a = run_gradcheck(opts);
  const GradCheckReport b = run_gradcheck(opts);
  CHECK(a.max_rel_err == b.max_rel_err);
  CHECK(a.comparison_count == b.comparison_count);

  opts.seed = 1234;
  const GradCheckReport c = run_gradcheck(opts);
  CHECK(c.pass());
  CHECK(c.max_rel_err != a.max_rel_err);  // different instances
}

TEST_CASE("injected wrong-sign gradient fails the suite") {
  GradCheckOptions opts;
  opts.instances = 3;
  opts.inject_bad_grad = true;
  const GradCheckReport rep = run_gradcheck(opts);
  CHECK_FALSE(rep.pass());
  CHECK(rep.max_rel_err > 0.5);
}

TEST_CASE("malformed options are rejected") {
  GradCheckOptions opts;
  opts.instances = 0;
  CHECK_THROWS_AS(run_gradcheck(opts), std::invalid_argument);
  opts.instances = 1;
  opts.tolerance = 0.0;
  CHECK_THROWS_AS(run_gradcheck(opts), std::invalid_argument);
  opts.tolerance = 1e-4;
  opts.step = -1.0;
  CHECK_THROWS_AS(run_gradcheck(opts), std::invalid_argument);
}
